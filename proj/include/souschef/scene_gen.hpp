#pragma once

// Procedural kitchen construction for the four task variants. Geometry is
// fixed; the variant controls arm count plus initial joint values and the
// pot-lid placement, and the seed jitters the open joints inside their open
// band so repeated trials start from slightly different articulations.

#include <memory>
#include <utility>

#include "souschef/world.hpp"

namespace souschef {

struct GeneratedScene {
    ScenePtr scene;
    WorldState state;
};

namespace scene_detail {

inline StaticBody wall(std::string name, double x0, double y0, double x1, double y1,
                       bool tall = true) {
    StaticBody b;
    b.name = std::move(name);
    b.shape = Shape::of(make_rect(x0, y0, x1, y1));
    b.tall = tall;
    return b;
}

}  // namespace scene_detail

/// Build the kitchen. Same variant and seed give bitwise-identical results.
inline GeneratedScene generate_scene(SceneVariant variant, std::uint64_t seed) {
    using scene_detail::wall;
    auto scene = std::make_shared<Scene>();
    scene->variant = variant;
    scene->bounds = {4.0, 3.0};
    SymbolTable& tab = scene->table;

    // --- objects (5 movables + 8 surfaces + 2 spaces + 6 joints = 21) ---
    ObjectId chicken = tab.add("chicken leg", ObjectKind::Movable);
    ObjectId cabbage = tab.add("cabbage", ObjectKind::Movable);
    ObjectId salt = tab.add("salt shaker", ObjectKind::Movable);
    ObjectId pepper = tab.add("pepper shaker", ObjectKind::Movable);
    ObjectId lid = tab.add("pot lid", ObjectKind::Movable);

    ObjectId counter = tab.add("counter", ObjectKind::Surface);
    ObjectId burner_left = tab.add("left burner", ObjectKind::Surface);
    ObjectId burner_right = tab.add("right burner", ObjectKind::Surface);
    ObjectId sink = tab.add("sink", ObjectKind::Surface);
    ObjectId pot = tab.add("pot", ObjectKind::Surface);
    ObjectId fridge_shelf = tab.add("fridge shelf", ObjectKind::Surface);
    ObjectId cabinet_shelf = tab.add("cabinet shelf", ObjectKind::Surface);
    ObjectId board = tab.add("chopping board", ObjectKind::Surface);

    ObjectId fridge_space = tab.add("fridge interior", ObjectKind::Space);
    ObjectId drawer_space = tab.add("drawer interior", ObjectKind::Space);

    ObjectId fridge_door = tab.add("fridge door", ObjectKind::Joint);
    ObjectId cab_left = tab.add("cabinet left door", ObjectKind::Joint);
    ObjectId cab_right = tab.add("cabinet right door", ObjectKind::Joint);
    ObjectId drawer = tab.add("drawer", ObjectKind::Joint);
    ObjectId stove_knob = tab.add("stove knob", ObjectKind::Joint);
    ObjectId faucet = tab.add("faucet handle", ObjectKind::Joint);

    ObjectId left_arm = tab.add("left arm", ObjectKind::RobotPart);
    ObjectId right_arm = kNoObject;
    if (variant_is_dual(variant)) right_arm = tab.add("right arm", ObjectKind::RobotPart);

    // --- statics ---
    auto& st = scene->statics;
    st.push_back(wall("wall-n", 0.00, 2.95, 4.00, 3.00));
    st.push_back(wall("wall-s", 0.00, 0.00, 4.00, 0.05));
    st.push_back(wall("wall-w", 0.00, 0.05, 0.05, 2.95));
    st.push_back(wall("wall-e", 3.95, 0.05, 4.00, 2.95));

    // Fridge box (front opening x in [0.30, 0.80] at y ~ 2.35).
    st.push_back(wall("fridge-w", 0.10, 2.35, 0.15, 2.95));
    st.push_back(wall("fridge-e", 0.95, 2.35, 1.00, 2.95));
    st.push_back(wall("fridge-f1", 0.15, 2.35, 0.30, 2.40));
    st.push_back(wall("fridge-f2", 0.80, 2.35, 0.95, 2.40));

    // Sink block and main counter run (low).
    st.push_back(wall("sink-block", 1.00, 2.45, 1.60, 2.95, /*tall=*/false));
    {
        StaticBody counter_block = wall("counter-block", 1.60, 2.45, 3.00, 2.95, /*tall=*/false);
        counter_block.canopy = true;  // covers the drawer interior when shut
        st.push_back(counter_block);
    }
    st.push_back(wall("stove-block", 3.00, 2.45, 3.90, 2.95, /*tall=*/false));

    // Pot base plate: placements may not land under the pot.
    {
        StaticBody pot_base;
        pot_base.name = "pot-base";
        pot_base.shape = Shape::of(Disc{{3.27, 2.70}, 0.26});
        pot_base.tall = false;
        pot_base.placement_obstacle = true;
        st.push_back(pot_base);
    }
    int pot_base_index = static_cast<int>(st.size()) - 1;

    // Cabinet box on the east wall (front opening y in [1.00, 1.50] at x ~ 3.33).
    st.push_back(wall("cabinet-n", 3.30, 1.65, 3.95, 1.70));
    st.push_back(wall("cabinet-s", 3.30, 0.80, 3.95, 0.85));
    st.push_back(wall("cabinet-f1", 3.30, 1.50, 3.35, 1.65));
    st.push_back(wall("cabinet-f2", 3.30, 0.85, 3.35, 1.00));

    // --- regions ---
    auto add_region = [&](ObjectId id, Shape shape, RegionLevel level = RegionLevel::Top,
                          ObjectId attached = kNoObject, int ignore_static = -1) {
        Region r;
        r.id = id;
        r.shape = std::move(shape);
        r.level = level;
        r.attached_joint = attached;
        r.ignore_static = ignore_static;
        scene->region_index[id] = static_cast<int>(scene->regions.size());
        scene->regions.push_back(std::move(r));
    };
    add_region(counter, Shape::of(make_rect(1.62, 2.47, 2.55, 2.93)));
    add_region(burner_left, Shape::of(Disc{{3.27, 2.70}, 0.14}));
    add_region(burner_right, Shape::of(Disc{{3.70, 2.72}, 0.14}));
    add_region(sink, Shape::of(make_rect(1.10, 2.55, 1.50, 2.90)));
    add_region(pot, Shape::of(Disc{{3.27, 2.70}, 0.22}), RegionLevel::Top, kNoObject,
               pot_base_index);
    add_region(fridge_shelf, Shape::of(make_rect(0.20, 2.65, 0.90, 2.90)));
    add_region(cabinet_shelf, Shape::of(make_rect(3.40, 0.90, 3.90, 1.60)));
    add_region(board, Shape::of(make_rect(2.60, 2.50, 2.95, 2.90)));
    add_region(fridge_space, Shape::of(make_rect(0.20, 2.45, 0.90, 2.60)));
    add_region(drawer_space, Shape::of(make_rect(1.75, 2.50, 2.25, 2.85)),
               RegionLevel::UnderCounter, drawer);

    // --- joints ---
    auto add_joint = [&](ArticulatedJoint j) {
        scene->joint_index[j.id] = static_cast<int>(scene->joints.size());
        scene->joints.push_back(std::move(j));
    };
    {
        ArticulatedJoint j;
        j.id = fridge_door;
        j.kind = JointKind::RevoluteDoor;
        j.anchor = {0.80, 2.32};
        j.base_dir = kPi;  // closed panel covers the opening, pointing west
        j.swing = 1.0;     // free end sweeps south
        j.panel_length = 0.50;
        j.min = 0.0;
        j.max = 1.745;  // ~100 degrees
        add_joint(j);
    }
    {
        // Cabinet doors fold back toward the cabinet face when fully open so
        // an open door leaves the approach corridor usable.
        ArticulatedJoint j;
        j.id = cab_left;
        j.kind = JointKind::RevoluteDoor;
        j.anchor = {3.27, 1.50};
        j.base_dir = -kPi / 2.0;  // closed panel points south over the opening
        j.swing = -1.0;           // free end sweeps west then north
        j.panel_length = 0.25;
        j.min = 0.0;
        j.max = 2.97;  // ~170 degrees
        add_joint(j);
    }
    {
        ArticulatedJoint j;
        j.id = cab_right;
        j.kind = JointKind::RevoluteDoor;
        j.anchor = {3.27, 1.00};
        j.base_dir = kPi / 2.0;
        j.swing = 1.0;
        j.panel_length = 0.25;
        j.min = 0.0;
        j.max = 2.97;
        add_joint(j);
    }
    {
        ArticulatedJoint j;
        j.id = drawer;
        j.kind = JointKind::PrismaticDrawer;
        j.anchor = {2.00, 2.39};  // handle on the front panel, follows the slide
        j.axis = {0.0, -1.0};
        j.panel_at_zero = make_rect(1.70, 2.39, 2.30, 2.45);
        j.min = 0.0;
        j.max = 0.45;
        add_joint(j);
    }
    {
        ArticulatedJoint j;
        j.id = stove_knob;
        j.kind = JointKind::Knob;
        j.anchor = {3.45, 2.43};
        j.min = 0.0;
        j.max = kPi / 2.0;
        add_joint(j);
    }
    {
        ArticulatedJoint j;
        j.id = faucet;
        j.kind = JointKind::Knob;
        j.anchor = {1.30, 2.92};
        j.min = 0.0;
        j.max = kPi / 2.0;
        add_joint(j);
    }

    // --- movables ---
    auto add_movable = [&](ObjectId id, Shape footprint, double grasp_radius) {
        MovableBody m;
        m.id = id;
        m.footprint = std::move(footprint);
        m.grasp_radius = grasp_radius;
        scene->movable_index[id] = static_cast<int>(scene->movables.size());
        scene->movables.push_back(std::move(m));
    };
    add_movable(chicken, Shape::of(Disc{{0, 0}, 0.055}), 0.055);
    add_movable(cabbage, Shape::of(Disc{{0, 0}, 0.065}), 0.065);
    add_movable(salt, Shape::of(make_box({0, 0}, 0.03, 0.03)), 0.043);
    add_movable(pepper, Shape::of(make_box({0, 0}, 0.03, 0.03)), 0.043);
    add_movable(lid, Shape::of(Disc{{0, 0}, 0.16}), 0.16);

    // --- robot ---
    scene->robot.base_radius = 0.22;
    {
        ArmModel a;
        a.id = left_arm;
        a.carry_bearing = 0.44;
        scene->robot.arms.push_back(a);
    }
    if (right_arm != kNoObject) {
        ArmModel a;
        a.id = right_arm;
        a.carry_bearing = -0.44;
        scene->robot.arms.push_back(a);
    }

    // --- initial state ---
    WorldState state;
    state.scene = scene;
    state.joint_values.assign(scene->joints.size(), 0.0);
    state.attachments.assign(scene->robot.arms.size(), std::nullopt);
    state.robot = {2.0, 1.5, kPi / 2.0};

    state.movable_states.resize(scene->movables.size());
    auto put = [&](ObjectId id, Pose pose, ObjectId support) {
        state.movable_states[static_cast<std::size_t>(scene->movable_index.at(id))] = {pose, support};
    };
    put(chicken, {0.55, 2.775, 0.0}, fridge_shelf);
    put(cabbage, {2.00, 2.675, 0.0}, drawer_space);  // closed-drawer coordinates
    put(salt, {3.60, 1.38, 0.0}, cabinet_shelf);
    put(pepper, {3.60, 1.12, 0.0}, cabinet_shelf);
    if (variant_is_easy(variant))
        put(lid, {2.10, 2.70, 0.0}, counter);
    else
        put(lid, {3.27, 2.70, 0.0}, pot);

    if (variant_is_easy(variant)) {
        // Doors and drawer open, jittered deterministically within +/-10% of
        // range around 80%; knobs stay off.
        Rng rng(seed * 0x9e3779b97f4a7c15ULL + 17);
        for (const ArticulatedJoint& j : scene->joints) {
            if (!j.is_door_like()) continue;
            double frac = 0.8 + 0.1 * (2.0 * rng.uniform() - 1.0);
            double value = j.min + frac * j.range();
            state = set_joint(state, j.id, value);
        }
    }
    return {scene, std::move(state)};
}

}  // namespace souschef
