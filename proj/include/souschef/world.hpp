#pragma once

// Deterministic top-down 2D kitchen: static furniture, articulated joints,
// movable bodies, a disc-base robot with annulus-reach arms, and the symbolic
// projection of the continuous state.
//
// Height is modeled with three layers rather than a z axis:
//   - tall bodies (walls, fridge/cabinet boxes, door panels) block the base,
//     the arm's reach segment, and carried objects;
//   - low bodies (counters, sink, stove, drawer front) block only the base —
//     the arm and carried objects pass over them;
//   - movables live at counter level (or under it, inside the drawer) and
//     interact with each other and with carried objects at the same level.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "souschef/common.hpp"
#include "souschef/geometry.hpp"
#include "souschef/pddl.hpp"
#include "souschef/symbols.hpp"

namespace souschef {

// Reserved body ids used alongside SymbolTable ids.
inline constexpr ObjectId kRobotBody = -2;
inline constexpr ObjectId kStaticsBody = -3;

struct Shape {
    enum class Tag : std::uint8_t { Poly, Disc } tag = Tag::Disc;
    ConvexPoly poly;
    Disc disc;

    static Shape of(ConvexPoly p) { return {Tag::Poly, std::move(p), {}}; }
    static Shape of(Disc d) { return {Tag::Disc, {}, d}; }

    AABB bounds() const { return tag == Tag::Poly ? bounds_of(poly) : bounds_of(disc); }

    bool contains(Vec2 p) const {
        return tag == Tag::Poly ? point_in_poly(p, poly) : point_in_disc(p, disc);
    }

    Shape transformed_by(const Pose& pose) const {
        if (tag == Tag::Poly) return of(transformed(poly, pose));
        return of(Disc{pose.apply(disc.center), disc.radius});
    }
};

inline bool shapes_overlap(const Shape& a, const Shape& b) {
    if (!a.bounds().overlaps(b.bounds())) return false;
    if (a.tag == Shape::Tag::Poly && b.tag == Shape::Tag::Poly) return overlaps(a.poly, b.poly);
    if (a.tag == Shape::Tag::Poly) return overlaps(a.poly, b.disc);
    if (b.tag == Shape::Tag::Poly) return overlaps(b.poly, a.disc);
    return overlaps(a.disc, b.disc);
}

inline bool segment_hits_shape(Vec2 a, Vec2 b, const Shape& s) {
    return s.tag == Shape::Tag::Poly ? segment_hits(a, b, s.poly) : segment_hits(a, b, s.disc);
}

struct StaticBody {
    std::string name;
    Shape shape;
    bool tall = true;
    bool canopy = false;             // counters: cover under-counter regions
    bool placement_obstacle = false; // pot base: placements may not overlap it
};

enum class RegionLevel : std::uint8_t { Top, UnderCounter };

/// Placement region backing a surface or space object.
struct Region {
    ObjectId id = kNoObject;
    Shape shape;  // at joint value 0 for joint-attached regions
    RegionLevel level = RegionLevel::Top;
    ObjectId attached_joint = kNoObject;  // region rides this joint (drawer)
    int ignore_static = -1;               // index into statics exempt from placement overlap
};

enum class JointKind : std::uint8_t { RevoluteDoor, PrismaticDrawer, Knob };

struct ArticulatedJoint {
    ObjectId id = kNoObject;
    JointKind kind = JointKind::RevoluteDoor;
    Vec2 anchor;
    // Revolute: panel points along base_dir + swing * value.
    double base_dir = 0.0;
    double swing = 1.0;
    double panel_length = 0.0;
    double panel_thickness = 0.05;
    // Prismatic: panel/handle translate along axis * value.
    Vec2 axis{0.0, -1.0};
    ConvexPoly panel_at_zero;  // drawer front at value 0
    double min = 0.0;
    double max = 1.0;
    double open_threshold = 0.6;  // fraction of range above which Opened holds
    double on_threshold = 0.9;    // knobs: TurnedOn at/above this fraction
    double handle_frac = 0.9;     // revolute: handle at this fraction of panel length

    double range() const { return max - min; }

    bool is_door_like() const { return kind != JointKind::Knob; }

    /// Colliding panel body at a given joint value (knobs have none).
    std::optional<Shape> panel_shape(double value) const {
        if (kind == JointKind::Knob) return std::nullopt;
        if (kind == JointKind::PrismaticDrawer) {
            Pose shift{axis.x * value, axis.y * value, 0.0};
            return Shape::of(transformed(panel_at_zero, shift));
        }
        double delta = base_dir + swing * value;
        Vec2 d = dir(delta);
        Vec2 n = perp(d) * (panel_thickness * 0.5);
        Vec2 a0 = anchor - n, a1 = anchor + n;
        Vec2 b0 = anchor + d * panel_length - n, b1 = anchor + d * panel_length + n;
        ConvexPoly poly{{a0, b0, b1, a1}};
        if (area_of(poly) < 0.0) std::reverse(poly.pts.begin(), poly.pts.end());
        return Shape::of(poly);
    }

    Vec2 handle_point(double value) const {
        if (kind == JointKind::Knob) return anchor;
        if (kind == JointKind::PrismaticDrawer) return anchor + axis * value;
        return anchor + dir(base_dir + swing * value) * (panel_length * handle_frac);
    }

    bool opened_at(double value) const {
        return value > min + open_threshold * range();
    }
    bool turned_on_at(double value) const {
        return value >= min + on_threshold * range();
    }
};

struct MovableBody {
    ObjectId id = kNoObject;
    Shape footprint;           // local frame, centered at the body origin
    double grasp_radius = 0.0; // circumradius, used by samplers
};

struct ArmModel {
    ObjectId id = kNoObject;
    double reach_min = 0.25;
    double reach_max = 0.85;
    double half_window = 1.309;  // +/- 75 degrees around base heading
    double carry_bearing = 0.0;  // carried-object bearing relative to heading
    double carry_dist = 0.33;
};

struct RobotModel {
    double base_radius = 0.22;
    std::vector<ArmModel> arms;  // index 0 = left
};

enum class SceneVariant : std::uint8_t {
    EasySingleArm,
    EasyDualArm,
    MoreObstaclesSingleArm,
    MoreObstaclesDualArm,
};

inline bool variant_is_easy(SceneVariant v) {
    return v == SceneVariant::EasySingleArm || v == SceneVariant::EasyDualArm;
}
inline bool variant_is_dual(SceneVariant v) {
    return v == SceneVariant::EasyDualArm || v == SceneVariant::MoreObstaclesDualArm;
}

inline std::string_view variant_name(SceneVariant v) {
    switch (v) {
        case SceneVariant::EasySingleArm: return "easy-single";
        case SceneVariant::EasyDualArm: return "easy-dual";
        case SceneVariant::MoreObstaclesSingleArm: return "obstacles-single";
        case SceneVariant::MoreObstaclesDualArm: return "obstacles-dual";
    }
    return "?";
}

inline std::optional<SceneVariant> variant_from_name(std::string_view s) {
    if (s == "easy-single") return SceneVariant::EasySingleArm;
    if (s == "easy-dual") return SceneVariant::EasyDualArm;
    if (s == "obstacles-single") return SceneVariant::MoreObstaclesSingleArm;
    if (s == "obstacles-dual") return SceneVariant::MoreObstaclesDualArm;
    return std::nullopt;
}

struct Scene {
    SceneVariant variant = SceneVariant::EasySingleArm;
    Vec2 bounds{4.0, 3.0};
    SymbolTable table;
    std::vector<StaticBody> statics;
    std::vector<Region> regions;           // surfaces + spaces
    std::vector<ArticulatedJoint> joints;
    std::vector<MovableBody> movables;
    RobotModel robot;

    std::map<ObjectId, int> region_index;
    std::map<ObjectId, int> joint_index;
    std::map<ObjectId, int> movable_index;

    const Region& region(ObjectId id) const { return regions.at(at_or_throw(region_index, id, "region")); }
    const ArticulatedJoint& joint(ObjectId id) const { return joints.at(at_or_throw(joint_index, id, "joint")); }
    const MovableBody& movable(ObjectId id) const { return movables.at(at_or_throw(movable_index, id, "movable")); }

    bool is_region(ObjectId id) const { return region_index.count(id) > 0; }
    bool is_joint(ObjectId id) const { return joint_index.count(id) > 0; }
    bool is_movable(ObjectId id) const { return movable_index.count(id) > 0; }

private:
    static int at_or_throw(const std::map<ObjectId, int>& m, ObjectId id, const char* what) {
        auto it = m.find(id);
        if (it == m.end()) throw std::out_of_range(std::string("no such ") + what);
        return it->second;
    }
};

using ScenePtr = std::shared_ptr<const Scene>;

struct Attachment {
    ObjectId object = kNoObject;
    Pose rel;  // object pose in the base frame

    bool operator==(const Attachment&) const = default;
};

struct MovableState {
    Pose pose;
    ObjectId support = kNoObject;  // region id, or arm id when held

    bool operator==(const MovableState&) const = default;
};

/// Full continuous world state. A value type: transitions return new states.
struct WorldState {
    ScenePtr scene;
    std::vector<double> joint_values;          // parallel to scene->joints
    std::vector<MovableState> movable_states;  // parallel to scene->movables
    Pose robot;
    std::vector<std::optional<Attachment>> attachments;  // parallel to robot.arms
    std::set<std::pair<ObjectId, ObjectId>> sprinkled;

    bool operator==(const WorldState& o) const {
        return scene == o.scene && joint_values == o.joint_values &&
               movable_states == o.movable_states && robot == o.robot &&
               attachments == o.attachments && sprinkled == o.sprinkled;
    }

    double joint_value(ObjectId id) const {
        return joint_values.at(static_cast<std::size_t>(scene->joint_index.at(id)));
    }
    const MovableState& movable_state(ObjectId id) const {
        return movable_states.at(static_cast<std::size_t>(scene->movable_index.at(id)));
    }
    MovableState& movable_state(ObjectId id) {
        return movable_states.at(static_cast<std::size_t>(scene->movable_index.at(id)));
    }

    std::optional<int> holding_arm(ObjectId obj) const {
        for (std::size_t i = 0; i < attachments.size(); ++i)
            if (attachments[i] && attachments[i]->object == obj) return static_cast<int>(i);
        return std::nullopt;
    }
};

// ---------------------------------------------------------------------------
// Body shapes and levels

enum class BodyLevel : std::uint8_t { Top, UnderCounter };

/// Current level of a movable: carried objects travel at counter level.
inline BodyLevel movable_level(const WorldState& state, ObjectId id) {
    const MovableState& ms = state.movable_state(id);
    if (state.scene->is_region(ms.support) &&
        state.scene->region(ms.support).level == RegionLevel::UnderCounter)
        return BodyLevel::UnderCounter;
    return BodyLevel::Top;
}

inline Shape movable_shape(const WorldState& state, ObjectId id) {
    return state.scene->movable(id).footprint.transformed_by(state.movable_state(id).pose);
}

inline std::optional<Shape> joint_panel(const WorldState& state, ObjectId id) {
    return state.scene->joint(id).panel_shape(state.joint_value(id));
}

/// Region shape at the current joint configuration.
inline Shape region_shape(const WorldState& state, ObjectId id) {
    const Region& r = state.scene->region(id);
    if (r.attached_joint == kNoObject) return r.shape;
    const ArticulatedJoint& j = state.scene->joint(r.attached_joint);
    double v = state.joint_value(r.attached_joint);
    Pose shift{j.axis.x * v, j.axis.y * v, 0.0};
    return r.shape.transformed_by(shift);
}

inline Disc base_disc(const Scene& scene, const Pose& config) {
    return {config.translation(), scene.robot.base_radius};
}

inline Vec2 carry_point(const Scene& scene, const Pose& config, int arm_index) {
    const ArmModel& arm = scene.robot.arms.at(static_cast<std::size_t>(arm_index));
    return config.translation() + dir(config.theta + arm.carry_bearing) * arm.carry_dist;
}

inline Shape attachment_shape(const Scene& scene, const Pose& config, const Attachment& att) {
    Pose world = config.compose(att.rel);
    return scene.movable(att.object).footprint.transformed_by(world);
}

/// Raw pairwise overlap test between two bodies at their current poses.
/// Accepts movable/joint ids plus kRobotBody; attached bodies follow the base.
inline bool collides(const WorldState& state, ObjectId body_a, ObjectId body_b) {
    auto shape_of = [&](ObjectId id) -> std::optional<Shape> {
        if (id == kRobotBody) return Shape::of(base_disc(*state.scene, state.robot));
        if (state.scene->is_movable(id)) {
            if (auto arm = state.holding_arm(id))
                return attachment_shape(*state.scene, state.robot, *state.attachments[static_cast<std::size_t>(*arm)]);
            return movable_shape(state, id);
        }
        if (state.scene->is_joint(id)) return joint_panel(state, id);
        throw std::out_of_range("collides: not a physical body");
    };
    auto a = shape_of(body_a);
    auto b = shape_of(body_b);
    if (!a || !b) return false;  // knob "bodies" never collide
    return shapes_overlap(*a, *b);
}

/// Movable/articulated bodies intersecting the robot footprint or any
/// attachment at `config`. Statics are reported under kStaticsBody.
inline std::set<ObjectId> robot_collisions(const WorldState& state, const Pose& config,
                                           const std::vector<std::optional<Attachment>>& attachments) {
    const Scene& scene = *state.scene;
    std::set<ObjectId> out;
    Shape base = Shape::of(base_disc(scene, config));

    std::vector<std::pair<ObjectId, Shape>> carried;
    std::set<ObjectId> held_ids;
    for (const auto& att : attachments)
        if (att) {
            carried.emplace_back(att->object, attachment_shape(scene, config, *att));
            held_ids.insert(att->object);
        }

    for (const StaticBody& s : scene.statics) {
        if (shapes_overlap(base, s.shape)) {
            out.insert(kStaticsBody);
        } else if (s.tall) {
            for (const auto& [id, shape] : carried)
                if (shapes_overlap(shape, s.shape)) out.insert(kStaticsBody);
        }
    }
    for (const ArticulatedJoint& j : scene.joints) {
        auto panel = j.panel_shape(state.joint_value(j.id));
        if (!panel) continue;
        bool tall_panel = j.kind == JointKind::RevoluteDoor;
        if (shapes_overlap(base, *panel)) out.insert(j.id);
        if (tall_panel)
            for (const auto& [id, shape] : carried)
                if (shapes_overlap(shape, *panel)) out.insert(j.id);
    }
    // The base never meets movables (they sit on elevated surfaces), but
    // carried objects travel at their level.
    for (const MovableBody& m : scene.movables) {
        if (held_ids.count(m.id)) continue;
        if (movable_level(state, m.id) != BodyLevel::Top) continue;
        Shape shape = movable_shape(state, m.id);
        for (const auto& [cid, cshape] : carried)
            if (shapes_overlap(cshape, shape)) out.insert(m.id);
    }
    return out;
}

struct OutOfRange : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Set a joint value; objects resting in a joint-attached space translate
/// rigidly with it.
inline WorldState set_joint(const WorldState& state, ObjectId joint_id, double value) {
    const ArticulatedJoint& j = state.scene->joint(joint_id);
    if (value < j.min - 1e-12 || value > j.max + 1e-12)
        throw OutOfRange("joint value " + format_num(value, 4) + " outside [" +
                         format_num(j.min, 4) + ", " + format_num(j.max, 4) + "] for " +
                         state.scene->table.name(joint_id));
    WorldState next = state;
    double old = state.joint_value(joint_id);
    next.joint_values[static_cast<std::size_t>(state.scene->joint_index.at(joint_id))] = value;
    Vec2 delta = j.axis * (value - old);
    if (j.kind == JointKind::PrismaticDrawer) {
        for (MovableState& ms : next.movable_states) {
            if (state.scene->is_region(ms.support) &&
                state.scene->region(ms.support).attached_joint == joint_id) {
                ms.pose.x += delta.x;
                ms.pose.y += delta.y;
            }
        }
    }
    return next;
}

// ---------------------------------------------------------------------------
// Symbolic projection

/// Project the continuous state onto literals: On/In from supports,
/// Opened/Closed/TurnedOn from joint thresholds, Holding/HandEmpty from
/// grippers, plus the accumulated Sprinkled facts.
inline SymbolicState relations(const WorldState& state, const Domain& domain) {
    const Scene& scene = *state.scene;
    auto pred = [&](const char* name) {
        auto p = domain.find_predicate(name);
        if (!p) throw std::logic_error(std::string("domain lacks predicate ") + name);
        return *p;
    };
    const auto on = pred("On"), in = pred("In"), holding = pred("Holding"),
               hand_empty = pred("HandEmpty"), opened = pred("Opened"), closed = pred("Closed"),
               turned_on = pred("TurnedOn"), sprinkled = pred("Sprinkled");

    std::vector<Literal> lits;
    for (const MovableBody& m : scene.movables) {
        const MovableState& ms = state.movable_state(m.id);
        if (scene.is_region(ms.support)) {
            const Region& r = scene.region(ms.support);
            bool is_space = scene.table.kind(r.id) == ObjectKind::Space;
            lits.push_back({is_space ? in : on, {m.id, r.id}, true});
        } else {
            lits.push_back({holding, {ms.support, m.id}, true});
        }
    }
    for (std::size_t i = 0; i < scene.robot.arms.size(); ++i)
        if (!state.attachments[i]) lits.push_back({hand_empty, {scene.robot.arms[i].id}, true});
    for (const ArticulatedJoint& j : scene.joints) {
        double v = state.joint_value(j.id);
        if (j.is_door_like())
            lits.push_back({j.opened_at(v) ? opened : closed, {j.id}, true});
        else if (j.turned_on_at(v))
            lits.push_back({turned_on, {j.id}, true});
    }
    for (const auto& [a, b] : state.sprinkled) lits.push_back({sprinkled, {a, b}, true});
    return SymbolicState(std::move(lits));
}

/// One English sentence per literal, in the state's canonical literal order.
inline std::vector<std::string> relations_text(const SymbolicState& symbolic, const Domain& domain,
                                               const SymbolTable& table) {
    std::vector<std::string> out;
    out.reserve(symbolic.size());
    for (const Literal& l : symbolic.literals()) out.push_back(literal_english(l, domain, table));
    return out;
}

// ---------------------------------------------------------------------------
// Reach model

struct ReachCheck {
    bool ok = false;
    std::string reason;
    std::set<ObjectId> colliders;  // movable/articulated blockers only
    bool hit_static = false;
};

inline bool within_arm_window(const ArmModel& arm, const Pose& config, Vec2 p) {
    Vec2 d = p - config.translation();
    double r = norm(d);
    if (r < arm.reach_min || r > arm.reach_max) return false;
    double bearing = std::atan2(d.y, d.x);
    return std::abs(angle_diff(bearing, config.theta)) <= arm.half_window;
}

/// Can the arm at `config` operate at point `p`?
///   - p inside the reach annulus and angular window;
///   - the segment base->p crosses no tall static and no door panel
///     (except the joint being manipulated);
///   - p not covered: under-counter targets must be clear of canopy statics,
///     and no other counter-level movable footprint may contain p.
/// Blockers are reported so failed attempts feed the collision set.
inline ReachCheck reach_target(const WorldState& state, int arm_index, const Pose& config, Vec2 p,
                               ObjectId manipulated = kNoObject, ObjectId target_region = kNoObject,
                               ObjectId also_ignore = kNoObject) {
    const Scene& scene = *state.scene;
    ReachCheck out;
    const ArmModel& arm = scene.robot.arms.at(static_cast<std::size_t>(arm_index));
    if (!within_arm_window(arm, config, p)) {
        out.reason = "outside reach window";
        return out;
    }
    Vec2 base = config.translation();
    bool blocked = false;
    for (const StaticBody& s : scene.statics) {
        if (!s.tall) continue;
        if (segment_hits_shape(base, p, s.shape)) {
            out.hit_static = true;
            blocked = true;
        }
    }
    for (const ArticulatedJoint& j : scene.joints) {
        if (j.id == manipulated) continue;
        if (j.kind != JointKind::RevoluteDoor) continue;  // drawer front is low
        auto panel = j.panel_shape(state.joint_value(j.id));
        if (panel && segment_hits_shape(base, p, *panel)) {
            out.colliders.insert(j.id);
            blocked = true;
        }
    }
    RegionLevel target_level = RegionLevel::Top;
    if (target_region != kNoObject && scene.is_region(target_region))
        target_level = scene.region(target_region).level;
    if (target_level == RegionLevel::UnderCounter) {
        for (const StaticBody& s : scene.statics) {
            if (!s.canopy) continue;
            if (s.shape.contains(p)) {
                // Attribute the cover to the joint owning the region: opening
                // it is what exposes the target.
                ObjectId owner = scene.region(target_region).attached_joint;
                if (owner != kNoObject)
                    out.colliders.insert(owner);
                else
                    out.hit_static = true;
                blocked = true;
            }
        }
    }
    for (const MovableBody& m : scene.movables) {
        if (m.id == manipulated || m.id == also_ignore) continue;
        if (state.holding_arm(m.id)) continue;
        BodyLevel lvl = movable_level(state, m.id);
        bool same_level = (target_level == RegionLevel::UnderCounter)
                              ? lvl == BodyLevel::UnderCounter
                              : lvl == BodyLevel::Top;
        if (!same_level) continue;
        if (movable_shape(state, m.id).contains(p)) {
            out.colliders.insert(m.id);
            blocked = true;
        }
    }
    if (blocked) {
        out.reason = "reach blocked";
        return out;
    }
    out.ok = true;
    return out;
}

/// Sweep a movable's footprint along a straight line between two poses,
/// collecting counter-level blockers (used for pick retract / place transfer).
inline ReachCheck sweep_movable(const WorldState& state, ObjectId obj, const Pose& from,
                                const Pose& to) {
    const Scene& scene = *state.scene;
    ReachCheck out;
    const MovableBody& body = scene.movable(obj);
    double steps = std::max(1.0, std::ceil(dist(from.translation(), to.translation()) / 0.01));
    bool blocked = false;
    for (double i = 0; i <= steps; ++i) {
        double t = i / steps;
        Pose at{from.x + (to.x - from.x) * t, from.y + (to.y - from.y) * t,
                from.theta + angle_diff(to.theta, from.theta) * t};
        Shape s = body.footprint.transformed_by(at);
        for (const StaticBody& st : scene.statics)
            if (st.tall && shapes_overlap(s, st.shape)) {
                out.hit_static = true;
                blocked = true;
            }
        for (const ArticulatedJoint& j : scene.joints) {
            if (j.kind != JointKind::RevoluteDoor) continue;
            auto panel = j.panel_shape(state.joint_value(j.id));
            if (panel && shapes_overlap(s, *panel)) {
                out.colliders.insert(j.id);
                blocked = true;
            }
        }
        for (const MovableBody& m : scene.movables) {
            if (m.id == obj || state.holding_arm(m.id)) continue;
            if (movable_level(state, m.id) != BodyLevel::Top) continue;
            if (shapes_overlap(s, movable_shape(state, m.id))) {
                out.colliders.insert(m.id);
                blocked = true;
            }
        }
    }
    out.ok = !blocked;
    if (blocked) out.reason = "transfer blocked";
    return out;
}

/// Sweep a joint through [v0, v1], collecting what the moving panel hits.
/// Doors meet the base, carried objects, and counter-level movables; the low
/// drawer front only meets the base.
inline ReachCheck sweep_joint(const WorldState& state, ObjectId joint_id, double v0, double v1,
                              const Pose& config,
                              const std::vector<std::optional<Attachment>>& attachments) {
    const Scene& scene = *state.scene;
    ReachCheck out;
    const ArticulatedJoint& j = scene.joint(joint_id);
    if (j.kind == JointKind::Knob) {
        out.ok = true;
        return out;
    }
    Shape base = Shape::of(base_disc(scene, config));
    std::vector<std::pair<ObjectId, Shape>> carried;
    for (const auto& att : attachments)
        if (att) carried.emplace_back(att->object, attachment_shape(scene, config, *att));

    int steps = 48;
    bool blocked = false;
    for (int i = 0; i <= steps; ++i) {
        double v = v0 + (v1 - v0) * (static_cast<double>(i) / steps);
        auto panel = j.panel_shape(v);
        if (!panel) continue;
        if (shapes_overlap(*panel, base)) {
            out.colliders.insert(kRobotBody);
            blocked = true;
        }
        if (j.kind == JointKind::RevoluteDoor) {
            for (const auto& [cid, cshape] : carried)
                if (shapes_overlap(*panel, cshape)) {
                    out.colliders.insert(cid);
                    blocked = true;
                }
            for (const MovableBody& m : scene.movables) {
                if (state.holding_arm(m.id)) continue;
                if (movable_level(state, m.id) != BodyLevel::Top) continue;
                if (shapes_overlap(*panel, movable_shape(state, m.id))) {
                    out.colliders.insert(m.id);
                    blocked = true;
                }
            }
        }
    }
    out.ok = !blocked;
    if (blocked) out.reason = "joint sweep blocked";
    return out;
}

/// Placement feasibility: footprint inside the (inset) region, clear of other
/// counter-level movables, door panels, placement-obstacle statics, and the
/// robot base. The inset is 1 cm from region edges.
inline ReachCheck placement_clear(const WorldState& state, ObjectId obj, const Pose& pose,
                                  ObjectId region_id) {
    const Scene& scene = *state.scene;
    ReachCheck out;
    const Region& region = scene.region(region_id);
    Shape region_now = region_shape(state, region_id);
    Shape fp = scene.movable(obj).footprint.transformed_by(pose);

    // Containment: every polygon vertex, or the disc shrunk by its radius.
    constexpr double inset = 0.01;
    bool inside = true;
    if (region_now.tag == Shape::Tag::Poly) {
        ConvexPoly r = inset_poly(region_now.poly, inset);
        if (fp.tag == Shape::Tag::Poly) {
            for (Vec2 p : fp.poly.pts) inside = inside && point_in_poly(p, r);
        } else {
            ConvexPoly shrunk = inset_poly(region_now.poly, inset + fp.disc.radius);
            inside = point_in_poly(fp.disc.center, shrunk) && area_of(shrunk) > 0;
        }
    } else {
        double limit = region_now.disc.radius - inset;
        if (fp.tag == Shape::Tag::Poly) {
            for (Vec2 p : fp.poly.pts)
                inside = inside && dist(p, region_now.disc.center) <= limit;
        } else {
            inside = dist(fp.disc.center, region_now.disc.center) + fp.disc.radius <= limit;
        }
    }
    if (!inside) {
        out.reason = "outside region";
        return out;
    }

    bool blocked = false;
    RegionLevel lvl = region.level;
    for (const MovableBody& m : scene.movables) {
        if (m.id == obj || state.holding_arm(m.id)) continue;
        BodyLevel ml = movable_level(state, m.id);
        bool same = (lvl == RegionLevel::UnderCounter) ? ml == BodyLevel::UnderCounter
                                                       : ml == BodyLevel::Top;
        if (!same) continue;
        if (shapes_overlap(fp, movable_shape(state, m.id))) {
            out.colliders.insert(m.id);
            blocked = true;
        }
    }
    for (const ArticulatedJoint& j : scene.joints) {
        if (j.kind != JointKind::RevoluteDoor) continue;
        auto panel = j.panel_shape(state.joint_value(j.id));
        if (panel && shapes_overlap(fp, *panel)) {
            out.colliders.insert(j.id);
            blocked = true;
        }
    }
    for (std::size_t i = 0; i < scene.statics.size(); ++i) {
        const StaticBody& s = scene.statics[i];
        if (!s.placement_obstacle) continue;
        if (region.ignore_static == static_cast<int>(i)) continue;
        if (shapes_overlap(fp, s.shape)) {
            out.hit_static = true;
            blocked = true;
        }
    }
    if (shapes_overlap(fp, Shape::of(base_disc(scene, state.robot)))) {
        out.colliders.insert(kRobotBody);
        blocked = true;
    }
    out.ok = !blocked;
    if (blocked && out.reason.empty()) out.reason = "placement blocked";
    return out;
}

/// Grow a shape by a safety margin (discs exactly, polygons by vertex
/// outset). Used by the motion grid so interpolation between checked
/// configs cannot tunnel into contact.
inline Shape inflated(const Shape& s, double margin) {
    if (margin <= 0.0) return s;
    if (s.tag == Shape::Tag::Disc) return Shape::of(Disc{s.disc.center, s.disc.radius + margin});
    return Shape::of(inset_poly(s.poly, -margin));
}

/// Base-disc collision against statics and door/drawer panels only (movables
/// are elevated). Returns blockers; empty means the config is free. `margin`
/// inflates the base for conservative (grid) queries.
inline std::set<ObjectId> base_blockers(const WorldState& state, const Pose& config,
                                        double margin = 0.0) {
    const Scene& scene = *state.scene;
    std::set<ObjectId> out;
    double r = scene.robot.base_radius + margin;
    Shape base = Shape::of(Disc{config.translation(), r});
    Vec2 c = config.translation();
    if (c.x < r || c.y < r || c.x > scene.bounds.x - r || c.y > scene.bounds.y - r)
        out.insert(kStaticsBody);
    for (const StaticBody& s : scene.statics)
        if (shapes_overlap(base, s.shape)) out.insert(kStaticsBody);
    for (const ArticulatedJoint& j : scene.joints) {
        auto panel = j.panel_shape(state.joint_value(j.id));
        if (panel && shapes_overlap(base, *panel)) out.insert(j.id);
    }
    return out;
}

/// Carried-object collision at a config: tall statics, door panels and
/// counter-level movables. Used by motion planning when something is held.
inline std::set<ObjectId> attachment_blockers(const WorldState& state, const Pose& config,
                                              const std::vector<std::optional<Attachment>>& attachments,
                                              double margin = 0.0) {
    const Scene& scene = *state.scene;
    std::set<ObjectId> out;
    std::set<ObjectId> held;
    std::vector<Shape> carried;
    for (const auto& att : attachments)
        if (att) {
            carried.push_back(inflated(attachment_shape(scene, config, *att), margin));
            held.insert(att->object);
        }
    if (carried.empty()) return out;
    for (const Shape& s : carried) {
        AABB sb = s.bounds();
        if (sb.lo.x < 0 || sb.lo.y < 0 || sb.hi.x > scene.bounds.x || sb.hi.y > scene.bounds.y)
            out.insert(kStaticsBody);
        for (const StaticBody& st : scene.statics)
            if (st.tall && shapes_overlap(s, st.shape)) out.insert(kStaticsBody);
        for (const ArticulatedJoint& j : scene.joints) {
            if (j.kind != JointKind::RevoluteDoor) continue;
            auto panel = j.panel_shape(state.joint_value(j.id));
            if (panel && shapes_overlap(s, *panel)) out.insert(j.id);
        }
        for (const MovableBody& m : scene.movables) {
            if (held.count(m.id)) continue;
            if (movable_level(state, m.id) != BodyLevel::Top) continue;
            if (shapes_overlap(s, movable_shape(state, m.id))) out.insert(m.id);
        }
    }
    return out;
}

}  // namespace souschef
