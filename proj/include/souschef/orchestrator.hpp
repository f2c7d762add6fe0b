#pragma once

// The planning loop: query the language model for subgoals or actions, pop
// items in order, validate semantics, call the TAMP refiner, execute and
// re-observe, and reprompt with history and collision context on failure up
// to the reprompt budget. Every run produces an EpisodeReport; nothing
// escapes except ExecutionDrift, which indicates a refiner soundness bug.

#include <json.hpp>

#include <chrono>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "souschef/gateway.hpp"
#include "souschef/refiner.hpp"
#include "souschef/render.hpp"
#include "souschef/scene_gen.hpp"
#include "souschef/world.hpp"

namespace souschef {

struct EpisodeConfig {
    SequenceMode mode = SequenceMode::Subgoals;
    int n_reprompt = 0;  // in {0, 1, 2}
    int n_tamp = 3;
    SamplerBudgets budgets;
    std::string goal_eng = "make chicken soup";
    double wall_clock_limit_s = 900.0;  // 15 minutes, recorded as a timeout failure
    int max_internal_retries = 3;       // translation-error retries inside one query
    TraceFn trace;                      // optional sampler trace
};

struct SubproblemRecord {
    std::string item;  // tuple text as proposed
    bool solved = false;
    int rounds_used = 0;
    std::vector<std::string> colliders;
    int plan_len = 0;        // executed actions including base motions
    int non_base_len = 0;    // executed actions excluding base motions
    int query_index = 0;     // which VLM query proposed it
    double wall_time_s = 0.0;
    std::string failure;     // empty when solved
};

struct ExecutedStep {
    GroundedAction action;
    Trajectory trajectory;
};

struct EpisodeEvent {
    std::string kind;  // observe|query|pop|reduce|check|tamp|extend|execute|reprompt|success|failure
    std::string detail;
};

struct EpisodeReport {
    bool success = false;
    std::string failure_reason;  // taxonomy slug, empty on success
    std::vector<SubproblemRecord> subproblems;
    std::vector<int> proposed_per_query;  // validated sequence lengths, query order
    int reprompts_used = 0;
    int internal_retries = 0;
    double completion_percentage = 0.0;
    double wall_time_s = 0.0;
    std::vector<ExecutedStep> executed;  // the whole plan, replayable
    std::vector<EpisodeEvent> events;
    // provenance
    std::string variant;
    std::string mode;
    int n_reprompt = 0;
    std::uint64_t scene_seed = 0;
    std::uint64_t sampler_seed = 0;
    std::string goal_eng;
};

struct ExecutionDrift : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Replay a solution's trajectories step by step against the full world and
/// commit each action. Any collision on the way is ExecutionDrift: refined
/// solutions are supposed to be sound.
inline WorldState execute(const WorldState& state, const Domain& domain, const Solution& solution) {
    WorldState current = state;
    for (std::size_t i = 0; i < solution.plan.size(); ++i) {
        const GroundedAction& ga = solution.plan[i];
        const Trajectory& traj = solution.trajectories.at(i);
        const std::vector<Pose>& wp = traj.waypoints;
        for (std::size_t k = 0; k + 1 < wp.size(); ++k) {
            double d = dist(wp[k].translation(), wp[k + 1].translation());
            double dth = std::abs(angle_diff(wp[k + 1].theta, wp[k].theta));
            int steps = std::max(1, static_cast<int>(std::ceil(std::max(d / 0.01, dth / 0.05))));
            for (int s = 0; s <= steps; ++s) {
                double t = static_cast<double>(s) / steps;
                Pose p{wp[k].x + (wp[k + 1].x - wp[k].x) * t,
                       wp[k].y + (wp[k + 1].y - wp[k].y) * t,
                       wrap_angle(wp[k].theta + angle_diff(wp[k + 1].theta, wp[k].theta) * t)};
                if (!base_blockers(current, p).empty() ||
                    !attachment_blockers(current, p, current.attachments).empty())
                    throw ExecutionDrift("collision while replaying step " + std::to_string(i));
            }
        }
        const ActionSchema& schema =
            domain.actions.at(static_cast<std::size_t>(ga.discrete.schema));
        if ((schema.name == "open" || schema.name == "close" || schema.name == "turn-on") &&
            ga.continuous.joint_target) {
            Pose at = wp.empty() ? current.robot : wp.back();
            ReachCheck sweep = sweep_joint(current, ga.discrete.args.at(1),
                                           current.joint_value(ga.discrete.args.at(1)),
                                           *ga.continuous.joint_target, at, current.attachments);
            if (!sweep.ok)
                throw ExecutionDrift("joint sweep collides while replaying step " + std::to_string(i));
        }
        current = apply_grounded(current, domain, ga, traj);
    }
    return current;
}

/// Completion percentage: solved subproblems over subproblems generated,
/// where abandoned remainders of superseded queries are excluded and the
/// last query's unfinished items count.
inline double completion_percentage(const std::vector<int>& proposed_per_query,
                                    const std::vector<int>& solved_per_query) {
    if (proposed_per_query.empty()) return 0.0;
    int solved = 0;
    for (int s : solved_per_query) solved += s;
    int unfinished_last = proposed_per_query.back() - solved_per_query.back();
    int denom = solved + unfinished_last;
    if (denom <= 0) return 0.0;
    return static_cast<double>(solved) / static_cast<double>(denom);
}

inline double completion_percentage(const EpisodeReport& report) {
    std::vector<int> solved(report.proposed_per_query.size(), 0);
    for (const SubproblemRecord& r : report.subproblems)
        if (r.solved) solved.at(static_cast<std::size_t>(r.query_index))++;
    return completion_percentage(report.proposed_per_query, solved);
}

namespace orchestrator_detail {

inline std::string item_text(const Domain& domain, const SymbolTable& table,
                             const std::variant<Literal, DiscreteAction>& item) {
    if (const Literal* l = std::get_if<Literal>(&item)) return unparse(*l, domain, table);
    return unparse(std::get<DiscreteAction>(item), domain, table);
}

inline std::string arm_status_text(const WorldState& state) {
    const Scene& scene = *state.scene;
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < scene.robot.arms.size(); ++i) {
        std::string name = display_name(scene.table.name(scene.robot.arms[i].id));
        if (state.attachments[i])
            parts.push_back("the " + name + " is holding the " +
                            display_name(scene.table.name(state.attachments[i]->object)));
        else
            parts.push_back("the " + name + " is empty");
    }
    return join(parts, "; ");
}

}  // namespace orchestrator_detail

/// Run one episode. `backend` must match the scene when scripted. The
/// returned report carries every subproblem, the executed plan with
/// trajectories, and the event trace. Transcript and transport faults land
/// in the report; only ExecutionDrift (a refiner soundness bug) escapes.
inline EpisodeReport run_episode(const EpisodeConfig& config, const GeneratedScene& generated,
                                 const Domain& domain, Backend& backend,
                                 std::uint64_t scene_seed = 0) {
    using Clock = std::chrono::steady_clock;
    const auto t_start = Clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(Clock::now() - t_start).count();
    };

    const Scene& scene = *generated.scene;
    const SymbolTable& table = scene.table;
    WorldState state = generated.state;

    EpisodeReport report;
    report.variant = std::string(variant_name(scene.variant));
    report.mode = config.mode == SequenceMode::Subgoals ? "subgoals" : "actions";
    report.n_reprompt = config.n_reprompt;
    report.scene_seed = scene_seed;
    report.sampler_seed = config.budgets.rng_seed;
    report.goal_eng = config.goal_eng;

    auto event = [&](const char* kind, std::string detail = {}) {
        report.events.push_back({kind, std::move(detail)});
    };

    RefineContext refine_ctx;
    refine_ctx.domain = &domain;
    refine_ctx.budgets = config.budgets;
    refine_ctx.trace = config.trace;

    std::vector<std::variant<Literal, DiscreteAction>> queue;
    std::vector<std::string> queue_sources;
    std::vector<int> solved_per_query;

    auto finish = [&](bool success, std::string reason) {
        report.success = success;
        report.failure_reason = std::move(reason);
        report.completion_percentage =
            completion_percentage(report.proposed_per_query, solved_per_query);
        if (success) report.completion_percentage = 1.0;
        report.wall_time_s = elapsed();
        event(success ? "success" : "failure", report.failure_reason);
        return report;
    };

    auto ingest = [&](ParsedSequence&& parsed) -> bool {
        if (std::holds_alternative<ValidationFailure>(parsed)) return false;
        queue.clear();
        queue_sources.clear();
        if (SubgoalSequence* sg = std::get_if<SubgoalSequence>(&parsed)) {
            for (std::size_t i = 0; i < sg->items.size(); ++i) {
                queue.emplace_back(sg->items[i]);
                queue_sources.push_back(sg->sources[i]);
            }
        } else {
            ActionSequence& ac = std::get<ActionSequence>(parsed);
            for (std::size_t i = 0; i < ac.items.size(); ++i) {
                queue.emplace_back(ac.items[i]);
                queue_sources.push_back(ac.sources[i]);
            }
        }
        report.proposed_per_query.push_back(static_cast<int>(queue.size()));
        solved_per_query.push_back(0);
        return true;
    };

    ObservationBundle obs = observe(state, domain);
    event("observe");

    std::string transcript_fault;
    RepromptInfo reprompt_info;

    // One full query, retried through the reprompt budget while the model
    // cannot produce a valid sequence (Algorithm semantics: every failure
    // kind funnels through the same branch). Returns false when the budget
    // is spent or the backend faulted.
    auto acquire = [&](const RepromptInfo* info) -> bool {
        for (;;) {
            QueryOutcome q;
            try {
                q = run_vlm_query(backend, config.mode, config.goal_eng, domain, table,
                                  obs.literals, obs, info, config.max_internal_retries);
            } catch (const TranscriptExhausted& e) {
                transcript_fault = e.what();
                return false;
            } catch (const TranscriptMismatch& e) {
                transcript_fault = e.what();
                return false;
            } catch (const TransportError& e) {
                transcript_fault = e.what();
                return false;
            }
            report.internal_retries += q.internal_retries;
            event("query", info ? "reprompt" : "initial");
            if (ingest(std::move(q.result))) return true;
            const auto& failure = std::get<ValidationFailure>(q.result);
            if (report.reprompts_used >= config.n_reprompt) return false;
            report.reprompts_used++;
            event("reprompt", "after translation failure");
            reprompt_info = RepromptInfo{};
            for (const ExecutedStep& step : report.executed)
                reprompt_info.executed.push_back(unparse(step.action.discrete, domain, table));
            reprompt_info.failed_item = "translating the proposed plan";
            reprompt_info.semantic_error = failure.message;
            reprompt_info.arm_status = orchestrator_detail::arm_status_text(state);
            info = &reprompt_info;
        }
    };

    // Lines 1-4: observe, then the initial query (the executed plan is empty,
    // so no history slots are filled).
    if (!acquire(nullptr))
        return finish(false, transcript_fault.empty() ? "vlm-translation" : "transcript-fault");

    while (!queue.empty()) {
        if (elapsed() > config.wall_clock_limit_s) return finish(false, "timeout");

        // Line 6: pop the next subgoal or action.
        std::variant<Literal, DiscreteAction> item = queue.front();
        queue.erase(queue.begin());
        std::string source = queue_sources.front();
        queue_sources.erase(queue_sources.begin());
        int query_index = static_cast<int>(report.proposed_per_query.size()) - 1;
        event("pop", source);

        SubproblemRecord record;
        record.item = source;
        record.query_index = query_index;
        const auto t_sub = Clock::now();

        // Line 7: reduce-object (recorded; the refiner re-reduces per round).
        std::vector<Literal> goals;
        if (const Literal* l = std::get_if<Literal>(&item))
            goals.push_back(*l);
        else
            goals = effects_of(domain, std::get<DiscreteAction>(item));
        std::set<ObjectId> reduced = reduce_objects(state, goals, {});
        {
            std::vector<std::string> names;
            for (ObjectId id : reduced) names.push_back(table.name(id));
            event("reduce", join(names, ","));
        }

        // Line 8: per-item semantic check from the current state.
        SymbolicState symbolic_now = relations(state, domain);
        std::vector<SequenceItem> single;
        if (const Literal* l = std::get_if<Literal>(&item))
            single.emplace_back(*l);
        else
            single.emplace_back(std::get<DiscreteAction>(item));
        SemanticVerdict verdict = check_semantics(domain, table, symbolic_now, single, config.mode);
        event("check", verdict.success ? "success" : verdict.message);

        bool solved = false;
        std::string semantic_error;
        std::set<ObjectId> colliders;
        std::string failure_slug;
        if (!verdict.success) {
            semantic_error = verdict.message;
            record.failure = "semantic: " + verdict.message;
            failure_slug = "semantic";
        } else {
            // Line 10: the TAMP call.
            RefineResult result =
                std::holds_alternative<Literal>(item)
                    ? solve_subgoal(state, std::get<Literal>(item), refine_ctx, config.n_tamp)
                    : refine_action(state, std::get<DiscreteAction>(item), refine_ctx,
                                    config.n_tamp);
            if (refine_ok(result)) {
                Solution solution = std::get<Solution>(std::move(result));
                event("tamp", "success rounds=" + std::to_string(solution.rounds_used));
                record.rounds_used = solution.rounds_used;
                for (ObjectId id : solution.colliders_seen)
                    record.colliders.push_back(table.name(id));
                record.plan_len = static_cast<int>(solution.plan.size());
                for (const GroundedAction& ga : solution.plan)
                    if (domain.actions[static_cast<std::size_t>(ga.discrete.schema)].name !=
                        "move-base")
                        record.non_base_len++;
                // Lines 12-14: extend pi, execute, observe.
                for (std::size_t i = 0; i < solution.plan.size(); ++i)
                    report.executed.push_back({solution.plan[i], solution.trajectories[i]});
                event("extend", std::to_string(solution.plan.size()) + " actions");
                state = execute(state, domain, solution);
                event("execute");
                obs = observe(state, domain);
                event("observe");
                solved = true;
            } else {
                RefinementFailure failure = std::get<RefinementFailure>(std::move(result));
                colliders = failure.colliders;
                for (ObjectId id : colliders) record.colliders.push_back(table.name(id));
                record.failure = std::string(failure_reason_name(failure.reason));
                failure_slug = failure.reason == FailureReason::SemanticallyImpossible
                                   ? "semantic"
                                   : (failure.reason == FailureReason::NoSkeletonFound
                                          ? "tamp-no-skeleton"
                                          : "tamp-budget");
                event("tamp", "failure " + record.failure);
            }
        }

        record.solved = solved;
        record.wall_time_s = std::chrono::duration<double>(Clock::now() - t_sub).count();
        report.subproblems.push_back(record);
        if (solved) {
            solved_per_query[static_cast<std::size_t>(query_index)]++;
            continue;
        }

        // Lines 15-16: any failure funnels into one reprompt branch; the new
        // sequence replaces the whole remaining queue.
        if (report.reprompts_used >= config.n_reprompt) return finish(false, failure_slug);
        report.reprompts_used++;
        event("reprompt", "after " + failure_slug);
        reprompt_info = RepromptInfo{};
        for (const ExecutedStep& step : report.executed)
            reprompt_info.executed.push_back(unparse(step.action.discrete, domain, table));
        reprompt_info.failed_item = source;
        for (ObjectId id : colliders)
            reprompt_info.collided.push_back(display_name(table.name(id)));
        reprompt_info.semantic_error = semantic_error;
        reprompt_info.arm_status = orchestrator_detail::arm_status_text(state);
        if (!acquire(&reprompt_info))
            return finish(false, transcript_fault.empty() ? "vlm-translation" : "transcript-fault");
    }
    return finish(true, "");
}

// ---------------------------------------------------------------------------
// Report serialization (schema in docs/report-schema.md)

inline nlohmann::json report_to_json(const EpisodeReport& report, const Domain& domain,
                                     const SymbolTable& table) {
    using nlohmann::json;
    json out;
    out["format"] = "souschef-report-1";
    out["variant"] = report.variant;
    out["mode"] = report.mode;
    out["n_reprompt"] = report.n_reprompt;
    out["scene_seed"] = report.scene_seed;
    out["sampler_seed"] = report.sampler_seed;
    out["goal"] = report.goal_eng;
    out["outcome"] = report.success ? "success" : "failure";
    out["failure_reason"] = report.failure_reason;
    out["completion_percentage"] = report.completion_percentage;
    out["reprompts_used"] = report.reprompts_used;
    out["internal_retries"] = report.internal_retries;
    out["wall_time_s"] = report.wall_time_s;
    out["proposed_per_query"] = report.proposed_per_query;

    json subs = json::array();
    for (const SubproblemRecord& r : report.subproblems)
        subs.push_back({{"item", r.item},
                        {"solved", r.solved},
                        {"rounds_used", r.rounds_used},
                        {"colliders", r.colliders},
                        {"plan_len", r.plan_len},
                        {"non_base_len", r.non_base_len},
                        {"query_index", r.query_index},
                        {"wall_time_s", r.wall_time_s},
                        {"failure", r.failure}});
    out["subproblems"] = subs;

    json executed = json::array();
    for (const ExecutedStep& step : report.executed) {
        const ActionSchema& schema =
            domain.actions.at(static_cast<std::size_t>(step.action.discrete.schema));
        json ja;
        ja["name"] = schema.name;
        json args = json::array();
        for (ObjectId id : step.action.discrete.args) args.push_back(table.name(id));
        ja["args"] = args;
        const ContinuousBindings& cb = step.action.continuous;
        if (cb.place_pose) ja["place_pose"] = {cb.place_pose->x, cb.place_pose->y, cb.place_pose->theta};
        if (cb.base_config) ja["base_config"] = {cb.base_config->x, cb.base_config->y, cb.base_config->theta};
        if (cb.joint_target) ja["joint_target"] = *cb.joint_target;
        if (cb.grasp) ja["grasp"] = {cb.grasp->approach, cb.grasp->standoff};
        json wps = json::array();
        for (const Pose& p : step.trajectory.waypoints) wps.push_back({p.x, p.y, p.theta});
        ja["waypoints"] = wps;
        executed.push_back(ja);
    }
    out["executed"] = executed;

    json events = json::array();
    for (const EpisodeEvent& e : report.events) events.push_back({{"kind", e.kind}, {"detail", e.detail}});
    out["events"] = events;
    return out;
}

}  // namespace souschef
