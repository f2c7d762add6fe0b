#pragma once

// Planar geometry used by the kitchen simulator: SE(2) poses, convex
// polygons and discs, exact overlap tests (separating axis for polygons,
// distance tests for discs) and segment queries.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace souschef {

inline constexpr double kPi = 3.14159265358979323846;
// Contacts shallower than this count as touching, not colliding.
inline constexpr double kCollisionMargin = 1e-9;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

inline Vec2 normalized(Vec2 a) {
    double n = norm(a);
    return n > 0.0 ? Vec2{a.x / n, a.y / n} : Vec2{0.0, 0.0};
}

inline Vec2 dir(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

/// Rigid planar transform (x, y, theta).
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    bool operator==(const Pose&) const = default;

    Vec2 translation() const { return {x, y}; }

    Vec2 apply(Vec2 p) const {
        double c = std::cos(theta), s = std::sin(theta);
        return {x + c * p.x - s * p.y, y + s * p.x + c * p.y};
    }

    Pose compose(const Pose& local) const {
        Vec2 t = apply({local.x, local.y});
        return {t.x, t.y, wrap_angle(theta + local.theta)};
    }

    Pose inverse() const {
        double c = std::cos(theta), s = std::sin(theta);
        return {-(c * x + s * y), -(-s * x + c * y), wrap_angle(-theta)};
    }
};

/// Relative pose taking this frame's coordinates of `world` (i.e. inverse(this) * world).
inline Pose relative_to(const Pose& frame, const Pose& world) {
    return frame.inverse().compose(world);
}

struct AABB {
    Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    Vec2 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};

    void grow(Vec2 p) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
    bool overlaps(const AABB& o) const {
        return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y;
    }
    bool contains(Vec2 p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
    Vec2 center() const { return {(lo.x + hi.x) * 0.5, (lo.y + hi.y) * 0.5}; }
};

struct Disc {
    Vec2 center;
    double radius = 0.0;
};

/// Convex polygon, vertices in counter-clockwise order.
struct ConvexPoly {
    std::vector<Vec2> pts;
};

inline ConvexPoly make_rect(double x0, double y0, double x1, double y1) {
    return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

/// Axis-aligned rectangle centered at c.
inline ConvexPoly make_box(Vec2 c, double half_w, double half_h) {
    return make_rect(c.x - half_w, c.y - half_h, c.x + half_w, c.y + half_h);
}

inline ConvexPoly transformed(const ConvexPoly& poly, const Pose& pose) {
    ConvexPoly out;
    out.pts.reserve(poly.pts.size());
    for (Vec2 p : poly.pts) out.pts.push_back(pose.apply(p));
    return out;
}

inline AABB bounds_of(const ConvexPoly& p) {
    AABB b;
    for (Vec2 v : p.pts) b.grow(v);
    return b;
}

inline AABB bounds_of(const Disc& d) {
    AABB b;
    b.grow({d.center.x - d.radius, d.center.y - d.radius});
    b.grow({d.center.x + d.radius, d.center.y + d.radius});
    return b;
}

inline double area_of(const ConvexPoly& p) {
    double a = 0.0;
    for (std::size_t i = 0; i < p.pts.size(); ++i) {
        Vec2 u = p.pts[i], v = p.pts[(i + 1) % p.pts.size()];
        a += cross(u, v);
    }
    return 0.5 * a;
}

inline bool point_in_disc(Vec2 p, const Disc& d) {
    return dist(p, d.center) <= d.radius;
}

inline bool point_in_poly(Vec2 p, const ConvexPoly& poly) {
    std::size_t n = poly.pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = poly.pts[i], b = poly.pts[(i + 1) % n];
        if (cross(b - a, p - a) < 0.0) return false;
    }
    return true;
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 == 0.0) return dist(p, a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return dist(p, a + ab * t);
}

// Projection interval of a shape onto a unit axis.
inline std::array<double, 2> project(const ConvexPoly& poly, Vec2 axis) {
    double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
    for (Vec2 p : poly.pts) {
        double d = dot(p, axis);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return {lo, hi};
}

inline bool overlaps(const Disc& a, const Disc& b) {
    return dist(a.center, b.center) < a.radius + b.radius - kCollisionMargin;
}

inline bool overlaps(const ConvexPoly& poly, const Disc& d) {
    if (point_in_poly(d.center, poly)) return true;
    std::size_t n = poly.pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = poly.pts[i], b = poly.pts[(i + 1) % n];
        if (point_segment_distance(d.center, a, b) < d.radius - kCollisionMargin) return true;
    }
    return false;
}

inline bool overlaps(const Disc& d, const ConvexPoly& poly) { return overlaps(poly, d); }

/// Separating-axis test over both polygons' edge normals.
inline bool overlaps(const ConvexPoly& a, const ConvexPoly& b) {
    const ConvexPoly* polys[2] = {&a, &b};
    for (const ConvexPoly* poly : polys) {
        std::size_t n = poly->pts.size();
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 e = poly->pts[(i + 1) % n] - poly->pts[i];
            Vec2 axis = normalized(perp(e));
            auto pa = project(a, axis);
            auto pb = project(b, axis);
            if (pa[1] <= pb[0] + kCollisionMargin || pb[1] <= pa[0] + kCollisionMargin)
                return false;
        }
    }
    return true;
}

/// Penetration depth along the least-overlapping axis (0 when separated).
inline double penetration_depth(const ConvexPoly& a, const ConvexPoly& b) {
    double best = std::numeric_limits<double>::max();
    const ConvexPoly* polys[2] = {&a, &b};
    for (const ConvexPoly* poly : polys) {
        std::size_t n = poly->pts.size();
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 e = poly->pts[(i + 1) % n] - poly->pts[i];
            Vec2 axis = normalized(perp(e));
            auto pa = project(a, axis);
            auto pb = project(b, axis);
            double overlap = std::min(pa[1], pb[1]) - std::max(pa[0], pb[0]);
            if (overlap <= 0.0) return 0.0;
            best = std::min(best, overlap);
        }
    }
    return best;
}

inline double penetration_depth(const Disc& a, const Disc& b) {
    return std::max(0.0, a.radius + b.radius - dist(a.center, b.center));
}

inline double penetration_depth(const ConvexPoly& poly, const Disc& d) {
    double dmin = std::numeric_limits<double>::max();
    std::size_t n = poly.pts.size();
    for (std::size_t i = 0; i < n; ++i)
        dmin = std::min(dmin, point_segment_distance(d.center, poly.pts[i], poly.pts[(i + 1) % n]));
    if (point_in_poly(d.center, poly)) return d.radius + dmin;
    return std::max(0.0, d.radius - dmin);
}

inline bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    auto orient = [](Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); };
    double d1 = orient(q1, q2, p1);
    double d2 = orient(q1, q2, p2);
    double d3 = orient(p1, p2, q1);
    double d4 = orient(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on_segment = [](Vec2 a, Vec2 b, Vec2 c) {
        return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
               std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
    };
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

inline bool segment_hits(Vec2 a, Vec2 b, const ConvexPoly& poly) {
    if (point_in_poly(a, poly) || point_in_poly(b, poly)) return true;
    std::size_t n = poly.pts.size();
    for (std::size_t i = 0; i < n; ++i)
        if (segments_intersect(a, b, poly.pts[i], poly.pts[(i + 1) % n])) return true;
    return false;
}

inline bool segment_hits(Vec2 a, Vec2 b, const Disc& d) {
    return point_segment_distance(d.center, a, b) < d.radius - kCollisionMargin;
}

/// Uniform point inside the shape, used by placement sampling.
template <typename Rng>
Vec2 sample_point_in(const ConvexPoly& poly, Rng& uniform01) {
    AABB b = bounds_of(poly);
    for (int i = 0; i < 1024; ++i) {
        Vec2 p{b.lo.x + (b.hi.x - b.lo.x) * uniform01(), b.lo.y + (b.hi.y - b.lo.y) * uniform01()};
        if (point_in_poly(p, poly)) return p;
    }
    return b.center();
}

template <typename Rng>
Vec2 sample_point_in(const Disc& d, Rng& uniform01) {
    double r = d.radius * std::sqrt(uniform01());
    double a = 2.0 * kPi * uniform01();
    return d.center + dir(a) * r;
}

/// Shrink a shape inward by `inset` (used for placement margins).
inline ConvexPoly inset_poly(const ConvexPoly& poly, double inset) {
    Vec2 c{0.0, 0.0};
    for (Vec2 p : poly.pts) c = c + p;
    c = c * (1.0 / static_cast<double>(poly.pts.size()));
    ConvexPoly out;
    out.pts.reserve(poly.pts.size());
    for (std::size_t i = 0; i < poly.pts.size(); ++i) {
        Vec2 a = poly.pts[i];
        Vec2 b = poly.pts[(i + 1) % poly.pts.size()];
        Vec2 prev = poly.pts[(i + poly.pts.size() - 1) % poly.pts.size()];
        // Interior lies left of CCW edges, so perp() yields inward normals.
        Vec2 n1 = normalized(perp(a - prev));
        Vec2 n2 = normalized(perp(b - a));
        Vec2 n = normalized(n1 + n2);
        out.pts.push_back(a + n * (inset / std::max(0.1, dot(n, n1))));
    }
    return out;
}

}  // namespace souschef
