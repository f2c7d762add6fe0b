#pragma once

// Observation bundles: the symbolic projection, its English rendering, and a
// deterministic annotated SVG (top-down view with name labels and axis-aligned
// bounding boxes for movables, joints and surfaces).

#include <sstream>
#include <string>
#include <vector>

#include "souschef/world.hpp"

namespace souschef {

struct ObservationBundle {
    SymbolicState literals;
    std::vector<std::string> relation_lines;  // one sentence per literal
    std::string relations_paragraph;          // lines joined with "; "
    std::string svg;
};

namespace render_detail {

inline constexpr double kScale = 200.0;  // px per meter

inline double sx(double x) { return x * kScale; }
inline double sy(const Scene& scene, double y) { return (scene.bounds.y - y) * kScale; }

inline std::string num(double v) { return format_num(v, 2); }

inline void rect(std::ostringstream& out, const Scene& scene, const AABB& b,
                 const std::string& attrs) {
    out << "<rect x=\"" << num(sx(b.lo.x)) << "\" y=\"" << num(sy(scene, b.hi.y)) << "\" width=\""
        << num(sx(b.hi.x - b.lo.x)) << "\" height=\"" << num(sx(b.hi.y - b.lo.y)) << "\" " << attrs
        << "/>\n";
}

inline void shape(std::ostringstream& out, const Scene& scene, const Shape& s,
                  const std::string& attrs) {
    if (s.tag == Shape::Tag::Disc) {
        out << "<circle cx=\"" << num(sx(s.disc.center.x)) << "\" cy=\""
            << num(sy(scene, s.disc.center.y)) << "\" r=\"" << num(s.disc.radius * kScale) << "\" "
            << attrs << "/>\n";
    } else {
        out << "<polygon points=\"";
        for (std::size_t i = 0; i < s.poly.pts.size(); ++i) {
            if (i) out << ' ';
            out << num(sx(s.poly.pts[i].x)) << ',' << num(sy(scene, s.poly.pts[i].y));
        }
        out << "\" " << attrs << "/>\n";
    }
}

inline void bbox_label(std::ostringstream& out, const Scene& scene, const std::string& name,
                       const Shape& s, const char* cls) {
    AABB b = s.bounds();
    out << "<g class=\"bbox " << cls << "\" id=\"bbox-" << name << "\">\n";
    rect(out, scene, b, "fill=\"none\" stroke=\"#222\" stroke-width=\"1\" stroke-dasharray=\"3,2\"");
    out << "<text x=\"" << num(sx(b.lo.x)) << "\" y=\"" << num(sy(scene, b.hi.y) - 2.0)
        << "\" font-size=\"10\" font-family=\"monospace\">" << name << "</text>\n";
    out << "</g>\n";
}

}  // namespace render_detail

/// Deterministic standalone SVG of the state: fixtures, regions, joint
/// panels, movables, the robot, and one labeled bounding box per movable,
/// joint, and surface.
inline std::string render_svg(const WorldState& state) {
    using namespace render_detail;
    const Scene& scene = *state.scene;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(sx(scene.bounds.x))
        << "\" height=\"" << num(sy(scene, 0.0)) << "\" viewBox=\"0 0 " << num(sx(scene.bounds.x))
        << ' ' << num(sy(scene, 0.0)) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#fbfaf7\"/>\n";

    out << "<g id=\"statics\">\n";
    for (const StaticBody& s : scene.statics)
        shape(out, scene, s.shape,
              s.tall ? std::string("fill=\"#6b6b6b\"") : std::string("fill=\"#cfc5b4\""));
    out << "</g>\n";

    out << "<g id=\"regions\">\n";
    for (const Region& r : scene.regions)
        shape(out, scene, region_shape(state, r.id),
              "fill=\"#e8f0e4\" fill-opacity=\"0.7\" stroke=\"#88a080\" stroke-width=\"1\"");
    out << "</g>\n";

    out << "<g id=\"joints\">\n";
    for (const ArticulatedJoint& j : scene.joints) {
        if (auto panel = j.panel_shape(state.joint_value(j.id)))
            shape(out, scene, *panel, "fill=\"#8c6f46\"");
        Vec2 h = j.handle_point(state.joint_value(j.id));
        out << "<circle cx=\"" << num(sx(h.x)) << "\" cy=\"" << num(sy(scene, h.y))
            << "\" r=\"3\" fill=\"#333\"/>\n";
    }
    out << "</g>\n";

    out << "<g id=\"movables\">\n";
    for (const MovableBody& m : scene.movables)
        shape(out, scene, movable_shape(state, m.id),
              "fill=\"#d98452\" stroke=\"#7c4a25\" stroke-width=\"1\"");
    out << "</g>\n";

    out << "<g id=\"robot\">\n";
    Disc base = base_disc(scene, state.robot);
    out << "<circle cx=\"" << num(sx(base.center.x)) << "\" cy=\"" << num(sy(scene, base.center.y))
        << "\" r=\"" << num(base.radius * kScale) << "\" fill=\"#5b7fb4\" fill-opacity=\"0.85\"/>\n";
    Vec2 nose = base.center + dir(state.robot.theta) * base.radius;
    out << "<line x1=\"" << num(sx(base.center.x)) << "\" y1=\"" << num(sy(scene, base.center.y))
        << "\" x2=\"" << num(sx(nose.x)) << "\" y2=\"" << num(sy(scene, nose.y))
        << "\" stroke=\"#16325c\" stroke-width=\"2\"/>\n";
    out << "</g>\n";

    out << "<g id=\"annotations\">\n";
    for (const MovableBody& m : scene.movables)
        bbox_label(out, scene, scene.table.name(m.id), movable_shape(state, m.id), "movable");
    for (const ArticulatedJoint& j : scene.joints) {
        auto panel = j.panel_shape(state.joint_value(j.id));
        Shape s = panel ? *panel
                        : Shape::of(Disc{j.handle_point(state.joint_value(j.id)), 0.03});
        bbox_label(out, scene, scene.table.name(j.id), s, "joint");
    }
    for (const Region& r : scene.regions) {
        if (scene.table.kind(r.id) != ObjectKind::Surface) continue;
        bbox_label(out, scene, scene.table.name(r.id), region_shape(state, r.id), "surface");
    }
    out << "</g>\n";
    out << "</svg>\n";
    return out.str();
}

/// Full observation of a state: literals, English relations (one line per
/// literal, same order), and the annotated render.
inline ObservationBundle observe(const WorldState& state, const Domain& domain) {
    ObservationBundle out;
    out.literals = relations(state, domain);
    out.relation_lines = relations_text(out.literals, domain, state.scene->table);
    out.relations_paragraph = join(out.relation_lines, "; ");
    out.svg = render_svg(state);
    return out;
}

}  // namespace souschef
