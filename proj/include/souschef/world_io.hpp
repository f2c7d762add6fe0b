#pragma once

// scene.json serialization (schema documented in docs/scene-schema.md):
// geometry in meters, poses as [x, y, theta_rad], object references by name.

#include <json.hpp>

#include <memory>
#include <string>

#include "souschef/scene_gen.hpp"
#include "souschef/world.hpp"

namespace souschef {

namespace io_detail {

using nlohmann::json;

inline json pose_json(const Pose& p) { return json::array({p.x, p.y, p.theta}); }
inline Pose pose_from(const json& j) { return {j.at(0), j.at(1), j.at(2)}; }

inline json shape_json(const Shape& s) {
    if (s.tag == Shape::Tag::Disc)
        return {{"type", "disc"}, {"center", {s.disc.center.x, s.disc.center.y}}, {"radius", s.disc.radius}};
    json pts = json::array();
    for (Vec2 p : s.poly.pts) pts.push_back({p.x, p.y});
    return {{"type", "poly"}, {"points", pts}};
}

inline Shape shape_from(const json& j) {
    if (j.at("type") == "disc")
        return Shape::of(Disc{{j.at("center").at(0), j.at("center").at(1)}, j.at("radius")});
    ConvexPoly poly;
    for (const auto& p : j.at("points")) poly.pts.push_back({p.at(0), p.at(1)});
    return Shape::of(poly);
}

}  // namespace io_detail

inline nlohmann::json scene_to_json(const WorldState& state) {
    using nlohmann::json;
    using namespace io_detail;
    const Scene& scene = *state.scene;
    json out;
    out["format"] = "souschef-scene-1";
    out["variant"] = std::string(variant_name(scene.variant));
    out["bounds"] = {scene.bounds.x, scene.bounds.y};

    json objects = json::array();
    for (ObjectId id : scene.table.all())
        objects.push_back({{"name", scene.table.name(id)}, {"kind", std::string(kind_name(scene.table.kind(id)))}});
    out["objects"] = objects;

    json statics = json::array();
    for (const StaticBody& s : scene.statics)
        statics.push_back({{"name", s.name},
                           {"shape", shape_json(s.shape)},
                           {"tall", s.tall},
                           {"canopy", s.canopy},
                           {"placement_obstacle", s.placement_obstacle}});
    out["statics"] = statics;

    json regions = json::array();
    for (const Region& r : scene.regions) {
        json jr = {{"object", scene.table.name(r.id)},
                   {"shape", shape_json(r.shape)},
                   {"level", r.level == RegionLevel::Top ? "top" : "under-counter"},
                   {"ignore_static", r.ignore_static}};
        jr["attached_joint"] = r.attached_joint == kNoObject ? json() : json(scene.table.name(r.attached_joint));
        regions.push_back(jr);
    }
    out["regions"] = regions;

    json joints = json::array();
    for (const ArticulatedJoint& j : scene.joints) {
        const char* kind = j.kind == JointKind::RevoluteDoor    ? "revolute-door"
                           : j.kind == JointKind::PrismaticDrawer ? "prismatic-drawer"
                                                                  : "knob";
        json jj = {{"object", scene.table.name(j.id)},
                   {"kind", kind},
                   {"anchor", {j.anchor.x, j.anchor.y}},
                   {"base_dir", j.base_dir},
                   {"swing", j.swing},
                   {"panel_length", j.panel_length},
                   {"panel_thickness", j.panel_thickness},
                   {"axis", {j.axis.x, j.axis.y}},
                   {"min", j.min},
                   {"max", j.max},
                   {"open_threshold", j.open_threshold},
                   {"on_threshold", j.on_threshold},
                   {"handle_frac", j.handle_frac}};
        if (!j.panel_at_zero.pts.empty()) jj["panel_at_zero"] = shape_json(Shape::of(j.panel_at_zero));
        joints.push_back(jj);
    }
    out["joints"] = joints;

    json movables = json::array();
    for (const MovableBody& m : scene.movables)
        movables.push_back({{"object", scene.table.name(m.id)},
                            {"footprint", shape_json(m.footprint)},
                            {"grasp_radius", m.grasp_radius}});
    out["movables"] = movables;

    json arms = json::array();
    for (const ArmModel& a : scene.robot.arms)
        arms.push_back({{"object", scene.table.name(a.id)},
                        {"reach_min", a.reach_min},
                        {"reach_max", a.reach_max},
                        {"half_window", a.half_window},
                        {"carry_bearing", a.carry_bearing},
                        {"carry_dist", a.carry_dist}});
    out["robot"] = {{"base_radius", scene.robot.base_radius}, {"arms", arms}};

    json st;
    st["joint_values"] = state.joint_values;
    json ms = json::array();
    for (const MovableBody& m : scene.movables) {
        const MovableState& s = state.movable_state(m.id);
        ms.push_back({{"pose", pose_json(s.pose)}, {"support", scene.table.name(s.support)}});
    }
    st["movables"] = ms;
    st["robot"] = pose_json(state.robot);
    json atts = json::array();
    for (const auto& att : state.attachments) {
        if (att)
            atts.push_back({{"object", scene.table.name(att->object)}, {"rel", pose_json(att->rel)}});
        else
            atts.push_back(nullptr);
    }
    st["attachments"] = atts;
    json spr = json::array();
    for (const auto& [a, b] : state.sprinkled)
        spr.push_back({scene.table.name(a), scene.table.name(b)});
    st["sprinkled"] = spr;
    out["state"] = st;
    return out;
}

inline GeneratedScene scene_from_json(const nlohmann::json& in) {
    using namespace io_detail;
    if (in.at("format") != "souschef-scene-1")
        throw std::invalid_argument("unsupported scene format");
    auto scene = std::make_shared<Scene>();
    auto variant = variant_from_name(in.at("variant").get<std::string>());
    if (!variant) throw std::invalid_argument("unknown variant");
    scene->variant = *variant;
    scene->bounds = {in.at("bounds").at(0), in.at("bounds").at(1)};

    for (const auto& o : in.at("objects")) {
        auto kind = kind_from_name(o.at("kind").get<std::string>());
        if (!kind) throw std::invalid_argument("unknown kind");
        scene->table.add(o.at("name").get<std::string>(), *kind);
    }
    auto id_of = [&](const nlohmann::json& name) {
        auto id = scene->table.find(name.get<std::string>());
        if (!id) throw std::invalid_argument("unknown object " + name.get<std::string>());
        return *id;
    };

    for (const auto& s : in.at("statics")) {
        StaticBody b;
        b.name = s.at("name").get<std::string>();
        b.shape = shape_from(s.at("shape"));
        b.tall = s.at("tall").get<bool>();
        b.canopy = s.at("canopy").get<bool>();
        b.placement_obstacle = s.at("placement_obstacle").get<bool>();
        scene->statics.push_back(std::move(b));
    }
    for (const auto& r : in.at("regions")) {
        Region region;
        region.id = id_of(r.at("object"));
        region.shape = shape_from(r.at("shape"));
        region.level = r.at("level") == "top" ? RegionLevel::Top : RegionLevel::UnderCounter;
        region.ignore_static = r.at("ignore_static").get<int>();
        if (!r.at("attached_joint").is_null()) region.attached_joint = id_of(r.at("attached_joint"));
        scene->region_index[region.id] = static_cast<int>(scene->regions.size());
        scene->regions.push_back(std::move(region));
    }
    for (const auto& jj : in.at("joints")) {
        ArticulatedJoint j;
        j.id = id_of(jj.at("object"));
        std::string kind = jj.at("kind").get<std::string>();
        j.kind = kind == "revolute-door"      ? JointKind::RevoluteDoor
                 : kind == "prismatic-drawer" ? JointKind::PrismaticDrawer
                                              : JointKind::Knob;
        j.anchor = {jj.at("anchor").at(0), jj.at("anchor").at(1)};
        j.base_dir = jj.at("base_dir");
        j.swing = jj.at("swing");
        j.panel_length = jj.at("panel_length");
        j.panel_thickness = jj.at("panel_thickness");
        j.axis = {jj.at("axis").at(0), jj.at("axis").at(1)};
        j.min = jj.at("min");
        j.max = jj.at("max");
        j.open_threshold = jj.at("open_threshold");
        j.on_threshold = jj.at("on_threshold");
        j.handle_frac = jj.at("handle_frac");
        if (jj.contains("panel_at_zero")) j.panel_at_zero = shape_from(jj.at("panel_at_zero")).poly;
        scene->joint_index[j.id] = static_cast<int>(scene->joints.size());
        scene->joints.push_back(std::move(j));
    }
    for (const auto& m : in.at("movables")) {
        MovableBody body;
        body.id = id_of(m.at("object"));
        body.footprint = shape_from(m.at("footprint"));
        body.grasp_radius = m.at("grasp_radius");
        scene->movable_index[body.id] = static_cast<int>(scene->movables.size());
        scene->movables.push_back(std::move(body));
    }
    scene->robot.base_radius = in.at("robot").at("base_radius");
    for (const auto& a : in.at("robot").at("arms")) {
        ArmModel arm;
        arm.id = id_of(a.at("object"));
        arm.reach_min = a.at("reach_min");
        arm.reach_max = a.at("reach_max");
        arm.half_window = a.at("half_window");
        arm.carry_bearing = a.at("carry_bearing");
        arm.carry_dist = a.at("carry_dist");
        scene->robot.arms.push_back(arm);
    }

    WorldState state;
    state.scene = scene;
    const auto& st = in.at("state");
    state.joint_values = st.at("joint_values").get<std::vector<double>>();
    for (const auto& m : st.at("movables"))
        state.movable_states.push_back({pose_from(m.at("pose")), id_of(m.at("support"))});
    state.robot = pose_from(st.at("robot"));
    for (const auto& a : st.at("attachments")) {
        if (a.is_null())
            state.attachments.push_back(std::nullopt);
        else
            state.attachments.push_back(Attachment{id_of(a.at("object")), pose_from(a.at("rel"))});
    }
    for (const auto& s : st.at("sprinkled"))
        state.sprinkled.insert({id_of(s.at(0)), id_of(s.at(1))});
    return {scene, std::move(state)};
}

}  // namespace souschef
