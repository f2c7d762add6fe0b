#pragma once

// Continuous refinement of plan skeletons: budgeted pose/grasp/IK samplers,
// grid-based base motion planning, collision-set tracking, object-set
// reduction with failure-driven growth, and the two solve modes (free
// skeleton for subgoals, pinned skeleton for actions).

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "souschef/planner.hpp"
#include "souschef/world.hpp"

namespace souschef {

struct SamplerBudgets {
    int pose_attempts = 20;
    int grasp_attempts = 10;
    int ik_attempts = 30;
    int motion_attempts = 1;  // deterministic grid search
    int skeleton_limit = 12;
    std::uint64_t rng_seed = 0;
};

/// Approach bearing (direction from the grasp point toward the base) plus a
/// standoff jitter applied to the base distance.
struct Grasp {
    double approach = 0.0;
    double standoff = 0.0;
};

struct Trajectory {
    std::vector<Pose> waypoints;
};

struct ContinuousBindings {
    std::optional<Pose> place_pose;
    std::optional<Grasp> grasp;
    std::optional<Pose> base_config;
    std::optional<double> joint_target;
};

struct GroundedAction {
    DiscreteAction discrete;
    ContinuousBindings continuous;
};

struct Solution {
    std::vector<GroundedAction> plan;      // includes inserted move-base actions
    std::vector<Trajectory> trajectories;  // parallel to plan
    std::set<ObjectId> colliders_seen;
    int rounds_used = 1;
};

enum class FailureReason : std::uint8_t {
    NoSkeletonFound,
    RefinementBudgetExhausted,
    SemanticallyImpossible,
};

inline std::string_view failure_reason_name(FailureReason r) {
    switch (r) {
        case FailureReason::NoSkeletonFound: return "no-skeleton-found";
        case FailureReason::RefinementBudgetExhausted: return "refinement-budget-exhausted";
        case FailureReason::SemanticallyImpossible: return "semantically-impossible";
    }
    return "?";
}

struct RefinementFailure {
    FailureReason reason = FailureReason::RefinementBudgetExhausted;
    std::set<ObjectId> colliders;          // movable/articulated ids only
    std::vector<std::string> diagnostics;  // per-skeleton failure trace
    bool statics_involved = false;
};

using RefineResult = std::variant<Solution, RefinementFailure>;

inline bool refine_ok(const RefineResult& r) { return std::holds_alternative<Solution>(r); }

/// Sampler-level trace record (serialized as JSONL behind --trace).
struct TraceEvent {
    std::string stage;  // round | skeleton | pose | grasp | ik | motion
    int step = -1;
    bool accepted = false;
    std::string detail;
};
using TraceFn = std::function<void(const TraceEvent&)>;

struct RefineContext {
    const Domain* domain = nullptr;
    SamplerBudgets budgets;
    TraceFn trace;  // optional

    void emit(const char* stage, int step, bool ok, std::string detail = {}) const {
        if (trace) trace(TraceEvent{stage, step, ok, std::move(detail)});
    }
};

// ---------------------------------------------------------------------------
// Object reduction

/// Goal-relevant universe: goal arguments plus currently grasped objects plus
/// the memory of past colliders. Statics and the robot are always implicitly
/// present for collision purposes; the set only limits which movables and
/// joints the symbolic search may bind.
inline std::set<ObjectId> reduce_objects(const WorldState& state,
                                         const std::vector<Literal>& goals,
                                         const std::set<ObjectId>& memory) {
    std::set<ObjectId> out = memory;
    const SymbolTable& table = state.scene->table;
    for (const Literal& g : goals)
        for (ObjectId a : g.args)
            if (table.kind(a) != ObjectKind::RobotPart) out.insert(a);
    for (const auto& att : state.attachments)
        if (att) out.insert(att->object);
    return out;
}

// ---------------------------------------------------------------------------
// Motion planning (grid A*, 2 cm / 5 degrees, shortcut smoothing)

struct MotionResult {
    bool ok = false;
    Trajectory traj;
    std::set<ObjectId> colliders;  // movable/articulated blockers at the frontier
    bool hit_static = false;
    bool budget_hit = false;
};

namespace motion_detail {

inline constexpr double kGridRes = 0.02;
inline constexpr int kThetaBins = 72;

struct Grid {
    const WorldState* state;
    const std::vector<std::optional<Attachment>>* attachments;
    bool with_attachment;
    int nx, ny;
    std::vector<std::int8_t> base_free;    // -1 unknown, 0 blocked, 1 free
    std::vector<std::int8_t> attach_free;  // per (cell, theta bin)
    std::set<ObjectId>* colliders;
    bool* hit_static;

    Grid(const WorldState& s, const std::vector<std::optional<Attachment>>& att,
         std::set<ObjectId>* coll, bool* hs)
        : state(&s), attachments(&att), colliders(coll), hit_static(hs) {
        with_attachment = false;
        for (const auto& a : att)
            if (a) with_attachment = true;
        nx = static_cast<int>(std::lround(s.scene->bounds.x / kGridRes));
        ny = static_cast<int>(std::lround(s.scene->bounds.y / kGridRes));
        base_free.assign(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), -1);
        if (with_attachment)
            attach_free.assign(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * kThetaBins, -1);
    }

    Vec2 cell_center(int cx, int cy) const {
        return {(cx + 0.5) * kGridRes, (cy + 0.5) * kGridRes};
    }
    static double bin_theta(int bt) { return -kPi + (bt + 0.5) * (2.0 * kPi / kThetaBins); }
    static int theta_bin(double theta) {
        int b = static_cast<int>(std::floor((wrap_angle(theta) + kPi) / (2.0 * kPi / kThetaBins)));
        return std::clamp(b, 0, kThetaBins - 1);
    }

    void record(const std::set<ObjectId>& blockers) {
        for (ObjectId id : blockers) {
            if (id == kStaticsBody)
                *hit_static = true;
            else
                colliders->insert(id);
        }
    }

    // Grid queries inflate shapes by a safety margin so interpolation
    // between free cells cannot graze an obstacle.
    static constexpr double kMargin = 0.02;

    bool base_ok(int cx, int cy) {
        std::size_t idx = static_cast<std::size_t>(cy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(cx);
        if (base_free[idx] < 0) {
            Vec2 c = cell_center(cx, cy);
            auto blockers = base_blockers(*state, {c.x, c.y, 0.0}, kMargin);
            if (!blockers.empty()) record(blockers);
            base_free[idx] = blockers.empty() ? 1 : 0;
        }
        return base_free[idx] == 1;
    }

    bool free_at(int cx, int cy, int bt) {
        if (!base_ok(cx, cy)) return false;
        if (!with_attachment) return true;
        std::size_t idx =
            (static_cast<std::size_t>(cy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(cx)) * kThetaBins +
            static_cast<std::size_t>(bt);
        if (attach_free[idx] < 0) {
            Vec2 c = cell_center(cx, cy);
            auto blockers = attachment_blockers(*state, {c.x, c.y, bin_theta(bt)}, *attachments, kMargin);
            if (!blockers.empty()) record(blockers);
            attach_free[idx] = blockers.empty() ? 1 : 0;
        }
        return attach_free[idx] == 1;
    }
};

inline bool config_free_exact(const WorldState& state, const Pose& q,
                              const std::vector<std::optional<Attachment>>& att) {
    if (!base_blockers(state, q).empty()) return false;
    return attachment_blockers(state, q, att).empty();
}

/// Exact collision check of a straight interpolation between two configs.
inline bool segment_free_exact(const WorldState& state, const Pose& a, const Pose& b,
                               const std::vector<std::optional<Attachment>>& att) {
    double d = dist(a.translation(), b.translation());
    double dth = std::abs(angle_diff(b.theta, a.theta));
    int steps = std::max(1, static_cast<int>(std::ceil(std::max(d / 0.01, dth / 0.05))));
    for (int i = 0; i <= steps; ++i) {
        double t = static_cast<double>(i) / steps;
        Pose p{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t,
               wrap_angle(a.theta + angle_diff(b.theta, a.theta) * t)};
        if (!config_free_exact(state, p, att)) return false;
    }
    return true;
}

}  // namespace motion_detail

/// Collision-free piecewise-linear base path between configs. Without an
/// attachment the base is a disc, so heading is interpolated freely and the
/// search runs in 2D; with one it runs over (x, y, theta). On failure the
/// result carries the movable/articulated bodies met at the search frontier;
/// an invalid goal config yields empty colliders.
inline MotionResult plan_motion(const WorldState& state, const Pose& from, const Pose& to,
                                const std::vector<std::optional<Attachment>>& attachments,
                                std::size_t node_budget = 150000) {
    using namespace motion_detail;
    MotionResult result;
    if (from == to) {
        result.ok = true;
        result.traj.waypoints = {from};
        return result;
    }
    if (!config_free_exact(state, to, attachments)) {
        // The target itself is invalid: failure with no colliders.
        return result;
    }

    Grid grid(state, attachments, &result.colliders, &result.hit_static);
    bool use_theta = grid.with_attachment;

    int sx = std::clamp(static_cast<int>(from.x / kGridRes), 0, grid.nx - 1);
    int sy = std::clamp(static_cast<int>(from.y / kGridRes), 0, grid.ny - 1);
    int gx = std::clamp(static_cast<int>(to.x / kGridRes), 0, grid.nx - 1);
    int gy = std::clamp(static_cast<int>(to.y / kGridRes), 0, grid.ny - 1);
    int sb = use_theta ? Grid::theta_bin(from.theta) : 0;
    int gb = use_theta ? Grid::theta_bin(to.theta) : 0;

    int bins = use_theta ? kThetaBins : 1;
    auto key = [&](int x, int y, int b) { return (y * grid.nx + x) * bins + b; };
    std::size_t total = static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny) * static_cast<std::size_t>(bins);
    std::vector<float> gcost(total, -1.0f);
    std::vector<std::int32_t> parent(total, -1);
    std::vector<std::uint8_t> closed(total, 0);

    struct QItem {
        float f;
        std::uint32_t seq;
        std::int32_t node;
    };
    auto cmp = [](const QItem& a, const QItem& b) {
        return a.f > b.f || (a.f == b.f && a.seq > b.seq);
    };
    std::priority_queue<QItem, std::vector<QItem>, decltype(cmp)> open(cmp);

    auto heuristic = [&](int x, int y) {
        double dx = std::abs(x - gx), dy = std::abs(y - gy);
        return static_cast<float>((std::max(dx, dy) + 0.41421356 * std::min(dx, dy)) * kGridRes);
    };

    // Snapped start/goal cells are forced free: the exact configs are known
    // free even when the cell-center approximation disagrees at boundaries.
    auto cell_free = [&](int x, int y, int b) {
        if (x < 0 || y < 0 || x >= grid.nx || y >= grid.ny) return false;
        if ((x == sx && y == sy && b == sb) || (x == gx && y == gy && b == gb)) return true;
        return use_theta ? grid.free_at(x, y, b) : grid.base_ok(x, y);
    };

    std::uint32_t seq = 0;
    int start = key(sx, sy, sb);
    gcost[static_cast<std::size_t>(start)] = 0.0f;
    open.push({heuristic(sx, sy), seq++, start});
    int goal_key = key(gx, gy, gb);
    bool found = false;
    std::size_t pops = 0;

    static const int dxs[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    static const int dys[8] = {0, 1, 1, 1, 0, -1, -1, -1};

    while (!open.empty()) {
        QItem item = open.top();
        open.pop();
        if (++pops > node_budget) {
            result.budget_hit = true;
            break;
        }
        std::int32_t cur = item.node;
        std::size_t ci = static_cast<std::size_t>(cur);
        if (closed[ci]) continue;
        closed[ci] = 1;
        if (cur == goal_key) {
            found = true;
            break;
        }
        int b = cur % bins;
        int xy = cur / bins;
        int x = xy % grid.nx;
        int y = xy / grid.nx;
        auto relax = [&](int nx_, int ny_, int nb_, float step) {
            if (nx_ < 0 || ny_ < 0 || nx_ >= grid.nx || ny_ >= grid.ny) return;
            if (!cell_free(nx_, ny_, nb_)) return;
            int nk = key(nx_, ny_, nb_);
            std::size_t ni = static_cast<std::size_t>(nk);
            if (closed[ni]) return;
            float ng = gcost[ci] + step;
            if (gcost[ni] < 0.0f || ng < gcost[ni]) {
                gcost[ni] = ng;
                parent[ni] = cur;
                open.push({ng + heuristic(nx_, ny_), seq++, nk});
            }
        };
        for (int m = 0; m < 8; ++m) {
            float step = (m % 2 == 0) ? static_cast<float>(kGridRes)
                                      : static_cast<float>(kGridRes * 1.41421356);
            relax(x + dxs[m], y + dys[m], b, step);
        }
        if (use_theta) {
            relax(x, y, (b + 1) % kThetaBins, 0.01f);
            relax(x, y, (b + kThetaBins - 1) % kThetaBins, 0.01f);
        }
    }

    if (!found) return result;

    // Reconstruct (cells -> configs), then shortcut-smooth with exact checks.
    std::vector<Pose> raw;
    for (int n = goal_key;; n = parent[static_cast<std::size_t>(n)]) {
        int b = n % bins;
        int xy = n / bins;
        Vec2 c = grid.cell_center(xy % grid.nx, xy / grid.nx);
        raw.push_back({c.x, c.y, use_theta ? Grid::bin_theta(b) : 0.0});
        if (n == start) break;
    }
    std::reverse(raw.begin(), raw.end());
    raw.front() = from;
    raw.back() = to;
    if (!use_theta) {
        // Heading is free for a disc base: blend it along the path.
        for (std::size_t i = 0; i < raw.size(); ++i) {
            double t = raw.size() > 1 ? static_cast<double>(i) / static_cast<double>(raw.size() - 1) : 1.0;
            raw[i].theta = wrap_angle(from.theta + angle_diff(to.theta, from.theta) * t);
        }
    }

    std::vector<Pose> smooth;
    smooth.push_back(raw.front());
    std::size_t i = 0;
    while (i + 1 < raw.size()) {
        std::size_t j = raw.size() - 1;
        for (; j > i + 1; --j)
            if (motion_detail::segment_free_exact(state, raw[i], raw[j], attachments)) break;
        smooth.push_back(raw[j]);
        i = j;
    }
    result.ok = true;
    result.colliders.clear();  // blockers only matter on failure
    result.hit_static = false;
    result.traj.waypoints = std::move(smooth);
    return result;
}

// ---------------------------------------------------------------------------
// Samplers

/// Uniformly sampled collision-free placement of `obj` inside the region
/// (1 cm inset from edges). Rejections accumulate blockers.
inline std::optional<Pose> sample_pose(const WorldState& state, ObjectId region_id, ObjectId obj,
                                       Rng& rng, int attempts, std::set<ObjectId>* colliders,
                                       bool* hit_static) {
    const Scene& scene = *state.scene;
    Shape region_now = region_shape(state, region_id);
    bool poly_fp = scene.movable(obj).footprint.tag == Shape::Tag::Poly;
    auto u01 = [&rng]() { return rng.uniform(); };
    for (int i = 0; i < attempts; ++i) {
        Vec2 c = region_now.tag == Shape::Tag::Poly ? sample_point_in(region_now.poly, u01)
                                                    : sample_point_in(region_now.disc, u01);
        double theta = poly_fp ? rng.uniform(0.0, 2.0 * kPi) : 0.0;
        Pose pose{c.x, c.y, theta};
        ReachCheck pc = placement_clear(state, obj, pose, region_id);
        if (pc.ok) return pose;
        if (colliders)
            for (ObjectId id : pc.colliders)
                if (id != kRobotBody) colliders->insert(id);
        if (hit_static && pc.hit_static) *hit_static = true;
    }
    return std::nullopt;
}

/// Approach direction + standoff jitter. Movables admit any bearing; doors,
/// drawers and knobs are approached from their free side.
inline Grasp sample_grasp(const WorldState& state, ObjectId target, Rng& rng) {
    const Scene& scene = *state.scene;
    Grasp g;
    g.standoff = rng.uniform(-0.05, 0.05);
    if (scene.is_joint(target)) {
        const ArticulatedJoint& j = scene.joint(target);
        double approach;
        if (j.kind == JointKind::RevoluteDoor)
            approach = j.base_dir + j.swing * state.joint_value(target) + j.swing * kPi / 2.0;
        else if (j.kind == JointKind::PrismaticDrawer)
            approach = std::atan2(j.axis.y, j.axis.x);
        else
            approach = -kPi / 2.0;  // knobs sit on south-facing fixture fronts
        g.approach = wrap_angle(approach + rng.uniform(-0.6, 0.6));
    } else {
        g.approach = rng.uniform(-kPi, kPi);
    }
    return g;
}

/// Base configuration placing the grasp point inside the arm's annulus and
/// angular window, collision-free, with the reach rules satisfied. One
/// attempt fixes an approach bearing and probes a ladder of base distances
/// along that ray. Rejected candidates feed the collider set.
inline std::optional<Pose> solve_base_ik(const WorldState& state, int arm_index, Vec2 grasp_point,
                                         const Grasp& grasp, Rng& rng, int attempts,
                                         std::set<ObjectId>* colliders, bool* hit_static,
                                         ObjectId manipulated = kNoObject,
                                         ObjectId target_region = kNoObject,
                                         ObjectId also_ignore = kNoObject,
                                         int* attempts_used = nullptr, int phase = 0) {
    const Scene& scene = *state.scene;
    const ArmModel& arm = scene.robot.arms.at(static_cast<std::size_t>(arm_index));
    auto note = [&](const std::set<ObjectId>& ids) {
        for (ObjectId id : ids) {
            if (id == kStaticsBody) {
                if (hit_static) *hit_static = true;
            } else if (colliders && id != also_ignore) {
                colliders->insert(id);
            }
        }
    };
    constexpr int kLadder = 8;
    // Golden-angle stride spreads successive approach bearings around the
    // circle, so a handful of attempts covers every free direction.
    constexpr double kGolden = 2.39996322972865332;
    for (int i = 0; i < attempts; ++i) {
        if (attempts_used) *attempts_used = i + 1;
        double alpha = wrap_angle(grasp.approach + kGolden * (phase + i) + rng.uniform(-0.3, 0.3));
        double head_jitter = rng.uniform(-arm.half_window * 0.4, arm.half_window * 0.4);
        double u = rng.uniform();
        int offset = static_cast<int>(rng.below(kLadder));
        for (int step = 0; step < kLadder; ++step) {
            int rung = (step + offset) % kLadder;
            double r = arm.reach_min +
                       (arm.reach_max - arm.reach_min) * ((rung + u) / kLadder) + grasp.standoff;
            r = std::clamp(r, arm.reach_min, arm.reach_max);
            Vec2 base = grasp_point + dir(alpha) * r;
            double heading =
                wrap_angle(std::atan2(grasp_point.y - base.y, grasp_point.x - base.x) + head_jitter);
            Pose q{base.x, base.y, heading};
            auto blockers = base_blockers(state, q);
            if (!blockers.empty()) {
                note(blockers);
                continue;
            }
            auto att_block = attachment_blockers(state, q, state.attachments);
            if (!att_block.empty()) {
                note(att_block);
                continue;
            }
            ReachCheck rc = reach_target(state, arm_index, q, grasp_point, manipulated,
                                         target_region, also_ignore);
            if (!rc.ok) {
                note(rc.colliders);
                if (hit_static && rc.hit_static) *hit_static = true;
                continue;
            }
            return q;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Committing refined actions

inline int arm_index_of(const Scene& scene, ObjectId arm_id) {
    for (std::size_t i = 0; i < scene.robot.arms.size(); ++i)
        if (scene.robot.arms[i].id == arm_id) return static_cast<int>(i);
    throw std::out_of_range("no such arm");
}

/// Keep held-object poses rigidly following the gripper.
inline void sync_attachments(WorldState& state) {
    for (std::size_t i = 0; i < state.attachments.size(); ++i) {
        if (!state.attachments[i]) continue;
        Pose world = state.robot.compose(state.attachments[i]->rel);
        state.movable_state(state.attachments[i]->object).pose = world;
    }
}

/// End-of-action world transition shared by the refiner's lookahead and the
/// orchestrator's execution: base update, attach/detach, joint motion,
/// sprinkle marks. The trajectory's last waypoint is the robot config during
/// and after the action.
inline WorldState apply_grounded(const WorldState& state, const Domain& domain,
                                 const GroundedAction& ga, const Trajectory& traj) {
    const Scene& scene = *state.scene;
    WorldState next = state;
    if (!traj.waypoints.empty()) next.robot = traj.waypoints.back();
    sync_attachments(next);

    const ActionSchema& schema = domain.actions.at(static_cast<std::size_t>(ga.discrete.schema));
    const std::string& name = schema.name;
    const auto& args = ga.discrete.args;
    if (name == "pick" || name == "pull") {
        int arm = arm_index_of(scene, args.at(0));
        ObjectId obj = args.at(1);
        if (next.attachments[static_cast<std::size_t>(arm)])
            throw std::logic_error("pick with occupied gripper");
        Vec2 cp = carry_point(scene, next.robot, arm);
        Pose carry_world{cp.x, cp.y, next.movable_state(obj).pose.theta};
        Attachment att{obj, relative_to(next.robot, carry_world)};
        next.attachments[static_cast<std::size_t>(arm)] = att;
        next.movable_state(obj).support = scene.robot.arms[static_cast<std::size_t>(arm)].id;
        next.movable_state(obj).pose = carry_world;
    } else if (name == "place" || name == "push") {
        int arm = arm_index_of(scene, args.at(0));
        ObjectId obj = args.at(1);
        ObjectId region = args.at(2);
        if (!ga.continuous.place_pose) throw std::logic_error("place without a bound pose");
        next.attachments[static_cast<std::size_t>(arm)].reset();
        next.movable_state(obj).support = region;
        next.movable_state(obj).pose = *ga.continuous.place_pose;
    } else if (name == "open" || name == "close" || name == "turn-on") {
        if (!ga.continuous.joint_target) throw std::logic_error(name + " without a joint target");
        next = set_joint(next, args.at(1), *ga.continuous.joint_target);
    } else if (name == "sprinkle") {
        next.sprinkled.insert({args.at(1), args.at(2)});
    } else if (name == "move-base") {
        // base update already applied
    } else {
        throw std::logic_error("apply_grounded: unknown action " + name);
    }
    return next;
}

// ---------------------------------------------------------------------------
// Skeleton refinement engine

namespace refine_detail {

enum class StepStatus : std::uint8_t { Ok, Budget, Impossible };

struct Engine {
    const RefineContext& ctx;
    const Domain& domain;
    WorldState world;
    std::vector<GroundedAction> plan;
    std::vector<Trajectory> trajs;
    std::set<ObjectId> colliders;
    bool statics_hit = false;
    Rng rng;
    std::string fail_note;

    Engine(const RefineContext& c, WorldState start, Rng r)
        : ctx(c), domain(*c.domain), world(std::move(start)), rng(r) {}

    std::int32_t schema_id(const char* name) const {
        auto id = domain.find_action(name);
        if (!id) throw std::logic_error(std::string("domain lacks action ") + name);
        return *id;
    }

    void commit(GroundedAction ga, Trajectory traj) {
        world = apply_grounded(world, domain, ga, traj);
        plan.push_back(std::move(ga));
        trajs.push_back(std::move(traj));
    }

    /// Drive the base to q, inserting a move-base action unless already there.
    bool ensure_motion(const Pose& q, int step, int& motion_left) {
        if (world.robot == q) return true;
        if (motion_left <= 0) {
            fail_note = "motion budget exhausted";
            return false;
        }
        --motion_left;
        MotionResult mr = plan_motion(world, world.robot, q, world.attachments);
        ctx.emit("motion", step, mr.ok);
        if (!mr.ok) {
            for (ObjectId id : mr.colliders) colliders.insert(id);
            statics_hit = statics_hit || mr.hit_static;
            fail_note = "no base path";
            return false;
        }
        GroundedAction mb;
        mb.discrete = {schema_id("move-base"), {}};
        mb.continuous.base_config = q;
        commit(std::move(mb), std::move(mr.traj));
        return true;
    }

    /// IK attempts allotted to each outer sample, so one poor approach
    /// cannot starve the rest of the chain.
    int ik_share(int outer_budget) const {
        return std::max(1, ctx.budgets.ik_attempts / std::max(1, outer_budget));
    }

    StepStatus step_pick(const DiscreteAction& a, int step) {
        const Scene& scene = *world.scene;
        int arm = arm_index_of(scene, a.args[0]);
        ObjectId obj = a.args[1];
        ObjectId region = a.args[2];
        if (world.attachments[static_cast<std::size_t>(arm)]) {
            fail_note = "gripper occupied";
            return StepStatus::Impossible;
        }
        if (world.movable_state(obj).support != region) {
            fail_note = "object not at the expected source";
            return StepStatus::Impossible;
        }
        Vec2 g = world.movable_state(obj).pose.translation();
        int ik_left = ctx.budgets.ik_attempts;
        int motion_left = ctx.budgets.motion_attempts;
        int share = ik_share(ctx.budgets.grasp_attempts);
        for (int gi = 0; gi < ctx.budgets.grasp_attempts && ik_left > 0; ++gi) {
            Grasp grasp = sample_grasp(world, obj, rng);
            ctx.emit("grasp", step, true);
            int budget_here = std::min(share, ik_left);
            int phase = 0;
            while (budget_here > 0) {
                int used = 0;
                auto q = solve_base_ik(world, arm, g, grasp, rng, budget_here, &colliders,
                                       &statics_hit, obj, region, kNoObject, &used, phase);
                ik_left -= used;
                budget_here -= used;
                phase += used;
                ctx.emit("ik", step, q.has_value());
                if (!q) break;
                // Retract: the object must sweep clear from its resting pose
                // to the carry point.
                Vec2 cp = carry_point(scene, *q, arm);
                Pose carry{cp.x, cp.y, world.movable_state(obj).pose.theta};
                ReachCheck sweep = sweep_movable(world, obj, world.movable_state(obj).pose, carry);
                if (!sweep.ok) {
                    for (ObjectId id : sweep.colliders) colliders.insert(id);
                    statics_hit = statics_hit || sweep.hit_static;
                    continue;
                }
                if (!ensure_motion(*q, step, motion_left)) return StepStatus::Budget;
                GroundedAction ga;
                ga.discrete = a;
                ga.continuous.grasp = grasp;
                ga.continuous.base_config = *q;
                commit(std::move(ga), Trajectory{{*q}});
                return StepStatus::Ok;
            }
        }
        fail_note = "pick sampling exhausted";
        return StepStatus::Budget;
    }

    StepStatus step_place(const DiscreteAction& a, int step) {
        const Scene& scene = *world.scene;
        int arm = arm_index_of(scene, a.args[0]);
        ObjectId obj = a.args[1];
        ObjectId region = a.args[2];
        const auto& att = world.attachments[static_cast<std::size_t>(arm)];
        if (!att || att->object != obj) {
            fail_note = "object not held by that arm";
            return StepStatus::Impossible;
        }
        Pose rel = att->rel;
        int pose_left = ctx.budgets.pose_attempts;
        int grasp_left = ctx.budgets.grasp_attempts;
        int ik_left = ctx.budgets.ik_attempts;
        int motion_left = ctx.budgets.motion_attempts;
        int share = std::max(2, ik_share(ctx.budgets.pose_attempts));
        while (pose_left-- > 0 && ik_left > 0) {
            auto pose = sample_pose(world, region, obj, rng, 1, &colliders, &statics_hit);
            ctx.emit("pose", step, pose.has_value());
            if (!pose) continue;
            Grasp grasp;
            if (grasp_left > 0) {
                --grasp_left;
                grasp = sample_grasp(world, obj, rng);
            } else {
                grasp.approach = rng.uniform(-kPi, kPi);
            }
            int budget_here = std::min(share, ik_left);
            int phase = 0;
            while (budget_here > 0) {
                int used = 0;
                auto q = solve_base_ik(world, arm, pose->translation(), grasp, rng, budget_here,
                                       &colliders, &statics_hit, obj, region, kNoObject, &used,
                                       phase);
                ik_left -= used;
                budget_here -= used;
                phase += used;
                ctx.emit("ik", step, q.has_value());
                if (!q) break;
                Shape fp = scene.movable(obj).footprint.transformed_by(*pose);
                if (shapes_overlap(fp, Shape::of(base_disc(scene, *q)))) continue;
                // Transfer: carried pose at q down to the placement pose.
                WorldState at_q = world;
                at_q.robot = *q;
                sync_attachments(at_q);
                Pose carry = q->compose(rel);
                ReachCheck sweep = sweep_movable(at_q, obj, carry, *pose);
                if (!sweep.ok) {
                    for (ObjectId id : sweep.colliders) colliders.insert(id);
                    statics_hit = statics_hit || sweep.hit_static;
                    continue;
                }
                if (!ensure_motion(*q, step, motion_left)) return StepStatus::Budget;
                GroundedAction ga;
                ga.discrete = a;
                ga.continuous.place_pose = *pose;
                ga.continuous.grasp = grasp;
                ga.continuous.base_config = *q;
                commit(std::move(ga), Trajectory{{*q}});
                return StepStatus::Ok;
            }
        }
        fail_note = "place sampling exhausted";
        return StepStatus::Budget;
    }

    StepStatus step_joint(const DiscreteAction& a, int step, const std::string& name) {
        const Scene& scene = *world.scene;
        int arm = arm_index_of(scene, a.args[0]);
        ObjectId jid = a.args[1];
        const ArticulatedJoint& j = scene.joint(jid);
        if (world.attachments[static_cast<std::size_t>(arm)]) {
            fail_note = "gripper occupied";
            return StepStatus::Impossible;
        }
        if (name == "turn-on" && j.kind != JointKind::Knob) {
            fail_note = "turn-on applies to knobs";
            return StepStatus::Impossible;
        }
        if ((name == "open" || name == "close") && j.kind == JointKind::Knob) {
            fail_note = "knobs are turned, not opened";
            return StepStatus::Impossible;
        }
        double v_now = world.joint_value(jid);
        double range = j.range();
        int pose_left = ctx.budgets.pose_attempts;
        int grasp_left = ctx.budgets.grasp_attempts;
        int ik_left = ctx.budgets.ik_attempts;
        int motion_left = ctx.budgets.motion_attempts;
        int share = std::max(2, ik_share(ctx.budgets.pose_attempts));
        const ArmModel& arm_model = scene.robot.arms[static_cast<std::size_t>(arm)];
        while (pose_left-- > 0 && ik_left > 0) {
            double target;
            if (name == "open")
                target = rng.uniform(j.min + (j.open_threshold + 0.1) * range, j.max);
            else if (name == "close")
                target = rng.uniform(j.min, j.min + 0.1 * range);
            else
                target = rng.uniform(j.min + j.on_threshold * range, j.max);
            ctx.emit("pose", step, true, "joint-target");
            Grasp grasp;
            if (grasp_left > 0) {
                --grasp_left;
                grasp = sample_grasp(world, jid, rng);
            } else {
                grasp = sample_grasp(world, jid, rng);
            }
            Vec2 handle_now = j.handle_point(v_now);
            Vec2 handle_end = j.handle_point(target);
            int budget_here = std::min(share, ik_left);
            int phase = 0;
            while (budget_here > 0) {
                int used = 0;
                auto q = solve_base_ik(world, arm, handle_now, grasp, rng, budget_here, &colliders,
                                       &statics_hit, jid, kNoObject, kNoObject, &used, phase);
                ik_left -= used;
                budget_here -= used;
                phase += used;
                ctx.emit("ik", step, q.has_value());
                if (!q) break;
                // The hand follows the handle: both ends of the sweep must be
                // inside the reach window.
                if (!within_arm_window(arm_model, *q, handle_end)) continue;
                ReachCheck sweep = sweep_joint(world, jid, v_now, target, *q, world.attachments);
                if (!sweep.ok) {
                    bool self_block = sweep.colliders.count(kRobotBody) > 0;
                    for (ObjectId id : sweep.colliders)
                        if (id != kRobotBody) colliders.insert(id);
                    if (!self_block) {
                        // Something other than this base sample is in the arc;
                        // a different swing target is needed, not a new config.
                        break;
                    }
                    continue;
                }
                if (!ensure_motion(*q, step, motion_left)) return StepStatus::Budget;
                GroundedAction ga;
                ga.discrete = a;
                ga.continuous.joint_target = target;
                ga.continuous.grasp = grasp;
                ga.continuous.base_config = *q;
                commit(std::move(ga), Trajectory{{*q}});
                return StepStatus::Ok;
            }
        }
        fail_note = name + " sampling exhausted";
        return StepStatus::Budget;
    }

    StepStatus step_sprinkle(const DiscreteAction& a, int step) {
        const Scene& scene = *world.scene;
        int arm = arm_index_of(scene, a.args[0]);
        ObjectId obj = a.args[1];
        ObjectId target = a.args[2];
        const auto& att = world.attachments[static_cast<std::size_t>(arm)];
        if (!att || att->object != obj) {
            fail_note = "shaker not held by that arm";
            return StepStatus::Impossible;
        }
        ObjectId region = world.movable_state(target).support;
        if (!scene.is_region(region)) {
            fail_note = "sprinkle target is not resting in a region";
            return StepStatus::Impossible;
        }
        Shape region_now = region_shape(world, region);
        int pose_left = ctx.budgets.pose_attempts;
        int ik_left = ctx.budgets.ik_attempts;
        int motion_left = ctx.budgets.motion_attempts;
        int share = std::max(2, ik_share(ctx.budgets.pose_attempts));
        auto u01 = [this]() { return rng.uniform(); };
        while (pose_left-- > 0 && ik_left > 0) {
            Vec2 p = region_now.tag == Shape::Tag::Poly ? sample_point_in(region_now.poly, u01)
                                                        : sample_point_in(region_now.disc, u01);
            ctx.emit("pose", step, true, "sprinkle-point");
            Grasp grasp = sample_grasp(world, obj, rng);
            // The reach test below flags covering movables (say, a lid over
            // the pot) as colliders, which is exactly what the collision set
            // needs from a blocked sprinkle.
            int budget_here = std::min(share, ik_left);
            int phase = 0;
            while (budget_here > 0) {
                int used = 0;
                auto q = solve_base_ik(world, arm, p, grasp, rng, budget_here, &colliders,
                                       &statics_hit, obj, region, target, &used, phase);
                ik_left -= used;
                budget_here -= used;
                phase += used;
                ctx.emit("ik", step, q.has_value());
                if (!q) break;
                if (!ensure_motion(*q, step, motion_left)) return StepStatus::Budget;
                GroundedAction ga;
                ga.discrete = a;
                ga.continuous.grasp = grasp;
                ga.continuous.base_config = *q;
                commit(std::move(ga), Trajectory{{*q}});
                return StepStatus::Ok;
            }
        }
        fail_note = "sprinkle sampling exhausted";
        return StepStatus::Budget;
    }

    StepStatus refine_step(const DiscreteAction& a, int step) {
        const ActionSchema& schema = domain.actions.at(static_cast<std::size_t>(a.schema));
        const std::string& name = schema.name;
        if (name == "pick" || name == "pull") return step_pick(a, step);
        if (name == "place" || name == "push") return step_place(a, step);
        if (name == "open" || name == "close" || name == "turn-on")
            return step_joint(a, step, name);
        if (name == "sprinkle") return step_sprinkle(a, step);
        if (name == "move-base") return StepStatus::Ok;  // no-op when unparameterized
        fail_note = "no refinement recipe for action " + name;
        return StepStatus::Impossible;
    }
};

}  // namespace refine_detail

/// Refine one skeleton from `state`. On success the returned Solution's plan
/// includes inserted move-base actions and replays collision-free.
inline RefineResult refine_skeleton(const WorldState& state, const PlanSkeleton& skeleton,
                                    const RefineContext& ctx, Rng rng) {
    refine_detail::Engine eng(ctx, state, rng);
    for (std::size_t i = 0; i < skeleton.steps.size(); ++i) {
        auto status = eng.refine_step(skeleton.steps[i], static_cast<int>(i));
        if (status != refine_detail::StepStatus::Ok) {
            RefinementFailure f;
            f.reason = status == refine_detail::StepStatus::Impossible
                           ? FailureReason::SemanticallyImpossible
                           : FailureReason::RefinementBudgetExhausted;
            f.colliders = std::move(eng.colliders);
            f.statics_involved = eng.statics_hit;
            f.diagnostics.push_back("step " + std::to_string(i) + " (" +
                                    unparse(skeleton.steps[i], *ctx.domain, state.scene->table) +
                                    "): " + eng.fail_note);
            return f;
        }
    }
    Solution sol;
    sol.plan = std::move(eng.plan);
    sol.trajectories = std::move(eng.trajs);
    sol.colliders_seen = std::move(eng.colliders);
    return sol;
}

/// Subgoal solving: up to n_tamp rounds; round i plans over the reduced
/// object set grown by the colliders of rounds < i, enumerating up to
/// skeleton_limit diverse skeletons per round and refining each in order.
inline RefineResult solve_subgoal(const WorldState& state, const Literal& goal,
                                  const RefineContext& ctx, int n_tamp = 3) {
    const Domain& domain = *ctx.domain;
    const SymbolTable& table = state.scene->table;
    Rng master(ctx.budgets.rng_seed);
    std::set<ObjectId> memory;
    std::set<ObjectId> all_colliders;
    std::vector<std::string> diags;
    bool statics_involved = false;
    bool saw_skeleton = false;

    for (int round = 1; round <= n_tamp; ++round) {
        std::set<ObjectId> objects = reduce_objects(state, {goal}, memory);
        SymbolicState init = relations(state, domain);
        std::vector<PlanSkeleton> skeletons =
            diverse_skeletons(domain, table, init, {goal},
                              static_cast<std::size_t>(ctx.budgets.skeleton_limit), &objects, {},
                              &memory);
        ctx.emit("round", round, !skeletons.empty(),
                 "skeletons=" + std::to_string(skeletons.size()));
        if (skeletons.empty()) {
            diags.push_back("round " + std::to_string(round) + ": no skeleton found");
        }
        for (std::size_t si = 0; si < skeletons.size(); ++si) {
            saw_skeleton = true;
            Rng skel_rng = master.fork(static_cast<std::uint64_t>(round) * 1000 + si);
            RefineResult r = refine_skeleton(state, skeletons[si], ctx, skel_rng);
            if (refine_ok(r)) {
                Solution sol = std::get<Solution>(std::move(r));
                for (ObjectId id : all_colliders) sol.colliders_seen.insert(id);
                sol.rounds_used = round;
                ctx.emit("skeleton", static_cast<int>(si), true);
                return sol;
            }
            RefinementFailure f = std::get<RefinementFailure>(std::move(r));
            ctx.emit("skeleton", static_cast<int>(si), false, f.diagnostics.empty() ? "" : f.diagnostics.front());
            for (ObjectId id : f.colliders) all_colliders.insert(id);
            statics_involved = statics_involved || f.statics_involved;
            for (std::string& d : f.diagnostics)
                diags.push_back("round " + std::to_string(round) + " skeleton " +
                                std::to_string(si) + ": " + d);
        }
        memory = all_colliders;
    }
    RefinementFailure f;
    f.reason = saw_skeleton ? FailureReason::RefinementBudgetExhausted
                            : FailureReason::NoSkeletonFound;
    f.colliders = std::move(all_colliders);
    f.diagnostics = std::move(diags);
    f.statics_involved = statics_involved;
    return f;
}

/// Action refinement: the skeleton is pinned to exactly the given action
/// (base motions may still be inserted), with the same retry and
/// object-growth machinery as subgoal solving.
inline RefineResult refine_action(const WorldState& state, const DiscreteAction& action,
                                  const RefineContext& ctx, int n_tamp = 3) {
    const Domain& domain = *ctx.domain;
    const SymbolTable& table = state.scene->table;
    SymbolicState now = relations(state, domain);
    const ActionSchema& schema = domain.actions.at(static_cast<std::size_t>(action.schema));
    for (const LiteralTemplate& t : schema.preconditions) {
        Literal lit = instantiate(t, action.args);
        if (!holds(now, lit)) {
            RefinementFailure f;
            f.reason = FailureReason::SemanticallyImpossible;
            f.diagnostics.push_back("precondition not met: " + literal_english(lit, domain, table));
            return f;
        }
    }
    std::vector<Literal> goal = effects_of(domain, action);
    if (goal.empty()) return Solution{};  // nothing to achieve (e.g. bare move-base)

    Rng master(ctx.budgets.rng_seed);
    std::set<ObjectId> memory;
    std::set<ObjectId> all_colliders;
    std::vector<std::string> diags;
    bool statics_involved = false;
    PlanSkeleton skeleton{{action}};

    for (int round = 1; round <= n_tamp; ++round) {
        std::set<ObjectId> objects = reduce_objects(state, goal, memory);
        (void)objects;  // the skeleton is pinned; reduction cannot prune it further
        Rng skel_rng = master.fork(static_cast<std::uint64_t>(round) * 1000);
        RefineResult r = refine_skeleton(state, skeleton, ctx, skel_rng);
        if (refine_ok(r)) {
            Solution sol = std::get<Solution>(std::move(r));
            for (ObjectId id : all_colliders) sol.colliders_seen.insert(id);
            sol.rounds_used = round;
            return sol;
        }
        RefinementFailure f = std::get<RefinementFailure>(std::move(r));
        if (f.reason == FailureReason::SemanticallyImpossible) {
            f.colliders.insert(all_colliders.begin(), all_colliders.end());
            return f;
        }
        for (ObjectId id : f.colliders) all_colliders.insert(id);
        statics_involved = statics_involved || f.statics_involved;
        for (std::string& d : f.diagnostics)
            diags.push_back("round " + std::to_string(round) + ": " + d);
        memory = all_colliders;
    }
    RefinementFailure f;
    f.reason = FailureReason::RefinementBudgetExhausted;
    f.colliders = std::move(all_colliders);
    f.diagnostics = std::move(diags);
    f.statics_involved = statics_involved;
    return f;
}

}  // namespace souschef
