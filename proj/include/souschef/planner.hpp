#pragma once

// Pure symbolic planning: breadth-first forward search with full duplicate
// detection over packed states, diverse plan-skeleton enumeration in order of
// nondecreasing length, semantic validation of language-model output, and
// symbolic-effect extraction for action refinement.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <variant>
#include <vector>

#include "souschef/pddl.hpp"
#include "souschef/symbols.hpp"

namespace souschef {

/// Action sequence with discrete parameters bound, continuous ones untouched.
struct PlanSkeleton {
    std::vector<DiscreteAction> steps;
    std::size_t cost() const { return steps.size(); }

    bool operator==(const PlanSkeleton&) const = default;
};

struct SemanticVerdict {
    bool success = true;
    std::string message;          // English diagnostic for reprompting
    int failing_index = -1;       // position in the VLM sequence

    static SemanticVerdict ok() { return {}; }
    static SemanticVerdict fail(int index, std::string msg) {
        return {false, std::move(msg), index};
    }
};

/// A parsed element of a VLM sequence. Parse-stage failures travel alongside
/// valid items so the verdict can name the exact offending position.
struct ItemError {
    std::string text;
    std::string message;
};
using SequenceItem = std::variant<Literal, DiscreteAction, ItemError>;

enum class SequenceMode : std::uint8_t { Subgoals, Actions };

// ---------------------------------------------------------------------------
// Grounding

/// Grounded operator with literal codes precomputed for the search hot path.
struct GroundedOp {
    DiscreteAction action;
    std::string lex_key;  // "name(arg, ...)"; grounded sets are sorted by it
    std::vector<LiteralCode> pre_pos;
    std::vector<LiteralCode> pre_neg;
    std::vector<LiteralCode> add;
    std::vector<LiteralCode> del;

    bool applicable(const SymbolicState& s) const {
        for (LiteralCode c : pre_pos)
            if (!s.contains_code(c)) return false;
        for (LiteralCode c : pre_neg)
            if (s.contains_code(c)) return false;
        return true;
    }

    SymbolicState successor(const SymbolicState& s) const {
        SymbolicState next = s;
        for (LiteralCode c : del) next.erase_code(c);
        for (LiteralCode c : add) next.insert_code(c);
        return next;
    }
};

/// Enumerate every type-consistent grounding, sorted lexicographically by
/// action name then argument names. When `allowed` is given, movable and
/// joint arguments are restricted to it -- surfaces, spaces and robot parts
/// stay unrestricted (the object reduction shrinks the manipulable universe,
/// not the set of passive targets).
inline std::vector<GroundedOp> ground_actions(const Domain& domain, const SymbolTable& table,
                                              const std::set<ObjectId>* allowed = nullptr) {
    std::vector<GroundedOp> ops;
    std::vector<std::vector<ObjectId>> by_kind(5);
    for (int k = 0; k < 5; ++k) by_kind[static_cast<std::size_t>(k)] = table.of_kind(static_cast<ObjectKind>(k));

    for (std::size_t si = 0; si < domain.actions.size(); ++si) {
        const ActionSchema& schema = domain.actions[si];
        if (schema.effects.empty()) continue;  // no symbolic consequence, nothing to search over
        std::vector<ObjectId> bind(schema.discrete.size(), kNoObject);
        auto rec = [&](auto&& self, std::size_t p) -> void {
            if (p == schema.discrete.size()) {
                GroundedOp op;
                op.action = {static_cast<std::int32_t>(si), bind};
                op.lex_key = unparse(op.action, domain, table);
                for (const LiteralTemplate& t : schema.preconditions) {
                    LiteralCode c = encode_literal(instantiate(t, bind));
                    (t.positive ? op.pre_pos : op.pre_neg).push_back(c);
                }
                for (const LiteralTemplate& t : schema.effects) {
                    LiteralCode c = encode_literal(instantiate(t, bind));
                    (t.positive ? op.add : op.del).push_back(c);
                }
                ops.push_back(std::move(op));
                return;
            }
            ObjectKind kind = schema.discrete[p].kind;
            for (ObjectId id : by_kind[static_cast<std::size_t>(kind)]) {
                if (allowed && (kind == ObjectKind::Movable || kind == ObjectKind::Joint) &&
                    !allowed->count(id))
                    continue;
                bind[p] = id;
                self(self, p + 1);
            }
            bind[p] = kNoObject;
        };
        rec(rec, 0);
    }
    std::sort(ops.begin(), ops.end(),
              [](const GroundedOp& a, const GroundedOp& b) { return a.lex_key < b.lex_key; });
    return ops;
}

// ---------------------------------------------------------------------------
// Shortest-plan search

enum class PlanOutcome : std::uint8_t {
    Found,
    Unsolvable,     // frontier exhausted below the depth bound: proven
    DepthExceeded,  // cut off by depth or node budget: unknown
};

struct PlanResult {
    PlanOutcome outcome = PlanOutcome::Unsolvable;
    std::vector<DiscreteAction> plan;
    std::size_t expanded = 0;
};

struct SearchLimits {
    int max_depth = 10;
    std::size_t node_budget = 200000;
};

/// Breadth-first forward search with duplicate detection. Returns a shortest
/// plan; among equal-length plans the lexicographically smallest action
/// sequence wins (expansion is in grounded lex order, first visit is kept).
inline PlanResult plan_symbolic(const Domain& domain, const SymbolTable& table,
                                const SymbolicState& init, const std::vector<Literal>& goals,
                                SearchLimits limits = {},
                                const std::set<ObjectId>* allowed = nullptr) {
    PlanResult result;
    if (limits.max_depth < 0) throw std::invalid_argument("max_depth must be >= 0");
    if (holds_all(init, goals)) {
        result.outcome = PlanOutcome::Found;
        return result;
    }
    std::vector<GroundedOp> ops = ground_actions(domain, table, allowed);

    struct Node {
        SymbolicState state;
        std::int32_t parent;
        std::int32_t op;
        std::int32_t depth;
    };
    std::vector<Node> nodes;
    nodes.push_back({init, -1, -1, 0});
    std::unordered_map<SymbolicState, std::int32_t, SymbolicStateHash> seen;
    seen.emplace(init, 0);

    bool truncated = false;
    std::size_t head = 0;
    while (head < nodes.size()) {
        std::int32_t cur = static_cast<std::int32_t>(head++);
        std::int32_t depth = nodes[static_cast<std::size_t>(cur)].depth;
        if (depth >= limits.max_depth) {
            truncated = true;
            continue;
        }
        if (nodes.size() > limits.node_budget) {
            truncated = true;
            break;
        }
        ++result.expanded;
        for (std::size_t oi = 0; oi < ops.size(); ++oi) {
            const SymbolicState& state = nodes[static_cast<std::size_t>(cur)].state;
            if (!ops[oi].applicable(state)) continue;
            SymbolicState next = ops[oi].successor(state);
            auto [it, inserted] = seen.emplace(next, static_cast<std::int32_t>(nodes.size()));
            if (!inserted) continue;
            nodes.push_back({std::move(next), cur, static_cast<std::int32_t>(oi), depth + 1});
            if (holds_all(nodes.back().state, goals)) {
                std::vector<DiscreteAction> plan;
                for (std::int32_t n = static_cast<std::int32_t>(nodes.size()) - 1;
                     nodes[static_cast<std::size_t>(n)].parent >= 0;
                     n = nodes[static_cast<std::size_t>(n)].parent)
                    plan.push_back(ops[static_cast<std::size_t>(nodes[static_cast<std::size_t>(n)].op)].action);
                std::reverse(plan.begin(), plan.end());
                result.outcome = PlanOutcome::Found;
                result.plan = std::move(plan);
                return result;
            }
        }
    }
    result.outcome = truncated ? PlanOutcome::DepthExceeded : PlanOutcome::Unsolvable;
    return result;
}

// ---------------------------------------------------------------------------
// Diverse skeleton enumeration

struct DiverseLimits {
    int max_depth = 8;
    int slack = 3;  // lengths enumerated: optimal .. optimal + slack
    std::size_t node_budget = 150000;
};

/// Up to k distinct symbolically-valid plans in nondecreasing length order.
/// Within one length the order is deterministic: skeletons that manipulate
/// `priority` objects (the collision-set growth that motivated this round)
/// come first, then lexicographic. Distinct means distinct action sequences:
/// two orderings of the same steps are two skeletons.
inline std::vector<PlanSkeleton> diverse_skeletons(const Domain& domain, const SymbolTable& table,
                                                   const SymbolicState& init,
                                                   const std::vector<Literal>& goals,
                                                   std::size_t k = 12,
                                                   const std::set<ObjectId>* allowed = nullptr,
                                                   DiverseLimits limits = {},
                                                   const std::set<ObjectId>* priority = nullptr) {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    std::vector<PlanSkeleton> out;
    bool init_is_goal = holds_all(init, goals);
    if (init_is_goal) {
        out.push_back(PlanSkeleton{});  // the empty plan already achieves the goal
        if (out.size() >= k) return out;
    }
    std::vector<GroundedOp> ops = ground_actions(domain, table, allowed);

    // Layered state-graph construction (full duplicate detection, so the
    // graph is over states, and plans are paths).
    struct Node {
        SymbolicState state;
        std::int32_t depth;
        bool goal;
        std::vector<std::pair<std::int32_t, std::int32_t>> edges;  // (op, child) in lex order
    };
    std::vector<Node> nodes;
    nodes.push_back({init, 0, init_is_goal, {}});
    std::unordered_map<SymbolicState, std::int32_t, SymbolicStateHash> seen;
    seen.emplace(init, 0);

    int goal_depth = init_is_goal ? 0 : -1;
    int depth_limit = init_is_goal ? std::min(limits.max_depth, limits.slack) : limits.max_depth;
    std::size_t head = 0;
    while (head < nodes.size()) {
        std::int32_t cur = static_cast<std::int32_t>(head++);
        std::int32_t depth = nodes[static_cast<std::size_t>(cur)].depth;
        if (depth >= depth_limit) continue;
        if (nodes.size() > limits.node_budget) break;
        for (std::size_t oi = 0; oi < ops.size(); ++oi) {
            if (!ops[oi].applicable(nodes[static_cast<std::size_t>(cur)].state)) continue;
            SymbolicState next = ops[oi].successor(nodes[static_cast<std::size_t>(cur)].state);
            auto [it, inserted] = seen.emplace(next, static_cast<std::int32_t>(nodes.size()));
            std::int32_t child = it->second;
            if (inserted) {
                bool is_goal = holds_all(next, goals);
                nodes.push_back({std::move(next), depth + 1, is_goal, {}});
                if (is_goal && goal_depth < 0) {
                    goal_depth = depth + 1;
                    depth_limit = std::min(depth_limit, goal_depth + limits.slack);
                }
            }
            nodes[static_cast<std::size_t>(cur)].edges.emplace_back(static_cast<std::int32_t>(oi), child);
        }
    }
    if (goal_depth < 0) return out;  // no symbolic plan within bounds

    // Distance-to-goal over the explored graph, for path pruning.
    std::vector<std::int32_t> dist(nodes.size(), -1);
    {
        std::vector<std::vector<std::int32_t>> rev(nodes.size());
        for (std::size_t n = 0; n < nodes.size(); ++n)
            for (auto [op, child] : nodes[n].edges) rev[static_cast<std::size_t>(child)].push_back(static_cast<std::int32_t>(n));
        std::deque<std::int32_t> q;
        for (std::size_t n = 0; n < nodes.size(); ++n)
            if (nodes[n].goal) {
                dist[n] = 0;
                q.push_back(static_cast<std::int32_t>(n));
            }
        while (!q.empty()) {
            std::int32_t n = q.front();
            q.pop_front();
            for (std::int32_t p : rev[static_cast<std::size_t>(n)])
                if (dist[static_cast<std::size_t>(p)] < 0) {
                    dist[static_cast<std::size_t>(p)] = dist[static_cast<std::size_t>(n)] + 1;
                    q.push_back(p);
                }
        }
    }

    // Enumerate exact-length loop-free goal paths, shortest lengths first.
    // Paths of one length are collected (up to a cap), ranked, and appended.
    std::vector<std::int32_t> path_ops;
    std::vector<std::int32_t> path_nodes{0};
    std::vector<std::vector<std::int32_t>> level_paths;
    std::size_t level_cap = 4 * k;
    auto dfs = [&](auto&& self, std::int32_t node, int remaining) -> bool {
        if (level_paths.size() >= level_cap) return true;
        if (remaining == 0) {
            if (nodes[static_cast<std::size_t>(node)].goal) level_paths.push_back(path_ops);
            return level_paths.size() >= level_cap;
        }
        std::int32_t d = dist[static_cast<std::size_t>(node)];
        if (d < 0 || d > remaining) return false;
        for (auto [op, child] : nodes[static_cast<std::size_t>(node)].edges) {
            if (std::find(path_nodes.begin(), path_nodes.end(), child) != path_nodes.end())
                continue;  // simple paths only
            path_ops.push_back(op);
            path_nodes.push_back(child);
            bool full = self(self, child, remaining - 1);
            path_ops.pop_back();
            path_nodes.pop_back();
            if (full) return true;
        }
        return false;
    };
    auto rank_key = [&](const std::vector<std::int32_t>& path) {
        int touches = 0;
        int first_touch = static_cast<int>(path.size());
        if (priority && !priority->empty()) {
            for (std::size_t i = 0; i < path.size(); ++i) {
                const DiscreteAction& a = ops[static_cast<std::size_t>(path[i])].action;
                bool touch = false;
                for (ObjectId id : a.args)
                    if (priority->count(id)) touch = true;
                if (touch) {
                    ++touches;
                    first_touch = std::min(first_touch, static_cast<int>(i));
                }
            }
        }
        std::string lex;
        for (std::int32_t oi : path) lex += ops[static_cast<std::size_t>(oi)].lex_key + ";";
        return std::make_tuple(-touches, first_touch, std::move(lex));
    };
    int first_len = std::max(1, goal_depth);
    int last_len = std::min(limits.max_depth, goal_depth + limits.slack);
    for (int len = first_len; len <= last_len && out.size() < k; ++len) {
        level_paths.clear();
        dfs(dfs, 0, len);
        std::sort(level_paths.begin(), level_paths.end(),
                  [&](const auto& a, const auto& b) { return rank_key(a) < rank_key(b); });
        for (const auto& path : level_paths) {
            if (out.size() >= k) break;
            PlanSkeleton skel;
            for (std::int32_t oi : path) skel.steps.push_back(ops[static_cast<std::size_t>(oi)].action);
            out.push_back(std::move(skel));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Semantic validation (Success/Failure verdicts, never exceptions)

/// Subgoal mode: each item must admit a symbolic plan from the state reached
/// by the previous items (the state advances along the found plan). Action
/// mode: the sequence must execute in order with preconditions satisfied.
inline SemanticVerdict check_semantics(const Domain& domain, const SymbolTable& table,
                                       const SymbolicState& init,
                                       const std::vector<SequenceItem>& sequence,
                                       SequenceMode mode, SearchLimits limits = {}) {
    SymbolicState state = init;
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        int idx = static_cast<int>(i);
        if (const ItemError* err = std::get_if<ItemError>(&sequence[i]))
            return SemanticVerdict::fail(idx, err->message);
        if (mode == SequenceMode::Subgoals) {
            const Literal& goal = std::get<Literal>(sequence[i]);
            PlanResult r = plan_symbolic(domain, table, state, {goal}, limits);
            if (r.outcome != PlanOutcome::Found)
                return SemanticVerdict::fail(
                    idx, "no way to achieve '" + unparse(goal, domain, table) +
                             "' was found by symbolic planning from the state it would be attempted in");
            for (const DiscreteAction& a : r.plan) state = apply(state, domain, a, table);
        } else {
            const DiscreteAction& action = std::get<DiscreteAction>(sequence[i]);
            const ActionSchema& schema = domain.actions.at(static_cast<std::size_t>(action.schema));
            bool ok = true;
            for (const LiteralTemplate& t : schema.preconditions) {
                Literal lit = instantiate(t, action.args);
                if (!holds(state, lit)) {
                    return SemanticVerdict::fail(
                        idx, "cannot execute '" + unparse(action, domain, table) +
                                 "': it requires that " + literal_english(lit, domain, table));
                }
            }
            if (ok) {
                SymbolicState next;
                try_apply(state, domain, action, &next);
                state = std::move(next);
            }
        }
    }
    return SemanticVerdict::ok();
}

// ---------------------------------------------------------------------------
// Symbolic effects of a partially grounded action

struct UnboundDiscreteParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Positive effect literals with the discrete bindings substituted in.
inline std::vector<Literal> effects_of(const Domain& domain, const DiscreteAction& action) {
    const ActionSchema& schema = domain.actions.at(static_cast<std::size_t>(action.schema));
    if (action.args.size() != schema.discrete.size())
        throw UnboundDiscreteParameter("binding count mismatch for " + schema.name);
    for (ObjectId id : action.args)
        if (id == kNoObject) throw UnboundDiscreteParameter("unbound discrete parameter in " + schema.name);
    std::vector<Literal> out;
    for (const LiteralTemplate& t : schema.effects)
        if (t.positive) out.push_back(instantiate(t, action.args));
    return out;
}

// ---------------------------------------------------------------------------
// VLM tuple resolution

/// Pick an arm for actions/goals that omit it: prefer an arm whose hand is
/// empty in `state`; ties and the no-empty-hand case go left before right.
inline ObjectId select_arm(const Domain& domain, const SymbolTable& table,
                           const SymbolicState& state) {
    std::vector<ObjectId> arms = table.of_kind(ObjectKind::RobotPart);
    if (arms.empty()) throw std::logic_error("no robot parts in symbol table");
    auto hand_empty = domain.find_predicate("HandEmpty");
    if (hand_empty) {
        for (ObjectId arm : arms)
            if (state.contains(Literal{*hand_empty, {arm}, true})) return arm;
    }
    return arms.front();
}

/// Map a VLM-facing action tuple onto a fully discrete-bound action. Robot
/// arms are auto-selected; source regions (a surface or space that appears
/// in a positive precondition with a movable argument) are read off the
/// current state rather than taken from the tuple.
inline std::variant<DiscreteAction, LiteralError> resolve_vlm_action(
    const Domain& domain, const SymbolTable& table, const SymbolicState& state,
    std::string_view name, const std::vector<std::string>& args) {
    auto make_err = [&](LiteralErrorKind kind, std::string msg, std::string offender = {},
                        std::string suggestion = {}) {
        return LiteralError{kind, std::move(msg), std::move(offender), std::move(suggestion)};
    };
    auto ai = domain.find_action(name);
    if (!ai)
        return make_err(LiteralErrorKind::UnknownPredicate,
                        "unknown action '" + std::string(name) + "'", std::string(name));
    const ActionSchema& schema = domain.actions[static_cast<std::size_t>(*ai)];

    // Which region parameters are source-bound?
    std::vector<bool> source_bound(schema.discrete.size(), false);
    for (std::size_t p = 0; p < schema.discrete.size(); ++p) {
        ObjectKind k = schema.discrete[p].kind;
        if (k != ObjectKind::Surface && k != ObjectKind::Space) continue;
        for (const LiteralTemplate& t : schema.preconditions) {
            if (!t.positive) continue;
            bool has_p = false, has_movable = false;
            for (std::int32_t tp : t.params) {
                if (tp == static_cast<std::int32_t>(p)) has_p = true;
                if (schema.discrete[static_cast<std::size_t>(tp)].kind == ObjectKind::Movable)
                    has_movable = true;
            }
            if (has_p && has_movable) source_bound[p] = true;
        }
    }

    DiscreteAction action;
    action.schema = *ai;
    action.args.assign(schema.discrete.size(), kNoObject);
    std::size_t next_arg = 0;
    for (std::size_t p = 0; p < schema.discrete.size(); ++p) {
        ObjectKind kind = schema.discrete[p].kind;
        if (kind == ObjectKind::RobotPart) {
            action.args[p] = select_arm(domain, table, state);
            continue;
        }
        if (source_bound[p]) {
            // Find the movable bound earlier in the same precondition literal.
            ObjectId found = kNoObject;
            for (const LiteralTemplate& t : schema.preconditions) {
                if (!t.positive) continue;
                bool mentions = false;
                for (std::int32_t tp : t.params)
                    if (tp == static_cast<std::int32_t>(p)) mentions = true;
                if (!mentions) continue;
                for (const Literal& l : state.literals()) {
                    if (l.predicate != t.predicate) continue;
                    bool match = true;
                    for (std::size_t k = 0; k < t.params.size(); ++k) {
                        ObjectId bound = action.args[static_cast<std::size_t>(t.params[k])];
                        if (t.params[k] != static_cast<std::int32_t>(p) && bound != kNoObject &&
                            bound != l.args[k])
                            match = false;
                    }
                    if (match) {
                        for (std::size_t k = 0; k < t.params.size(); ++k)
                            if (t.params[k] == static_cast<std::int32_t>(p)) found = l.args[k];
                        break;
                    }
                }
                if (found != kNoObject) break;
            }
            if (found == kNoObject) {
                std::string who = next_arg > 0 && !args.empty()
                                      ? display_name(normalize_name(args[0]))
                                      : "the object";
                return make_err(LiteralErrorKind::KindMismatch,
                                "cannot apply " + schema.name + ": " + who +
                                    " is not in a matching location in the current state",
                                schema.name);
            }
            action.args[p] = found;
            continue;
        }
        if (next_arg >= args.size()) {
            std::ostringstream msg;
            msg << schema.name << " needs more arguments: got " << args.size();
            return make_err(LiteralErrorKind::ArityMismatch, msg.str(), schema.name);
        }
        const std::string& raw = args[next_arg++];
        auto id = table.find(raw);
        if (!id) {
            std::string near = table.nearest_name(raw);
            std::string msg = "unknown object '" + raw + "'";
            if (!near.empty()) msg += "; did you mean '" + display_name(near) + "'?";
            return make_err(LiteralErrorKind::UnknownObject, msg, raw, near);
        }
        if (table.kind(*id) != kind) {
            std::ostringstream msg;
            msg << "argument " << next_arg << " of " << schema.name << " must be a "
                << kind_name(kind) << ", but '" << raw << "' is a " << kind_name(table.kind(*id));
            return make_err(LiteralErrorKind::KindMismatch, msg.str(), raw);
        }
        action.args[p] = *id;
    }
    if (next_arg != args.size()) {
        std::ostringstream msg;
        msg << schema.name << " takes " << next_arg << " argument" << (next_arg == 1 ? "" : "s")
            << ", got " << args.size();
        return make_err(LiteralErrorKind::ArityMismatch, msg.str(), schema.name);
    }
    return action;
}

/// VLM-facing signature of a schema, e.g. "pick(<movable>)"; hidden
/// parameters (arms, source regions) are omitted.
inline std::string vlm_action_signature(const ActionSchema& schema) {
    std::vector<bool> source_bound(schema.discrete.size(), false);
    for (std::size_t p = 0; p < schema.discrete.size(); ++p) {
        ObjectKind k = schema.discrete[p].kind;
        if (k != ObjectKind::Surface && k != ObjectKind::Space) continue;
        for (const LiteralTemplate& t : schema.preconditions) {
            if (!t.positive) continue;
            bool has_p = false, has_movable = false;
            for (std::int32_t tp : t.params) {
                if (tp == static_cast<std::int32_t>(p)) has_p = true;
                if (schema.discrete[static_cast<std::size_t>(tp)].kind == ObjectKind::Movable)
                    has_movable = true;
            }
            if (has_p && has_movable) source_bound[p] = true;
        }
    }
    std::string out = schema.name + "(";
    bool first = true;
    for (std::size_t p = 0; p < schema.discrete.size(); ++p) {
        if (schema.discrete[p].kind == ObjectKind::RobotPart || source_bound[p]) continue;
        if (!first) out += ", ";
        first = false;
        out += "<" + std::string(kind_name(schema.discrete[p].kind)) + ">";
    }
    out += ")";
    return out;
}

/// Apply a whole plan (used to advance the semantic-check state).
inline SymbolicState apply_plan(const SymbolicState& init, const Domain& domain,
                                const std::vector<DiscreteAction>& plan, const SymbolTable& table) {
    SymbolicState s = init;
    for (const DiscreteAction& a : plan) s = apply(s, domain, a, table);
    return s;
}

}  // namespace souschef
