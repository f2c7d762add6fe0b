#pragma once

// Two-phase language-model querying: an initial request for English steps,
// a translation request into goal or action tuples, semantic validation of
// the result, and reprompt construction carrying execution history and
// collision context. Backends are interchangeable: a live chat-completion
// endpoint or a recorded transcript replayed by prompt digest.

#include <json.hpp>

#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "souschef/planner.hpp"
#include "souschef/render.hpp"
#include "souschef/world.hpp"

namespace souschef {

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;
};

struct PromptBundle {
    SequenceMode mode = SequenceMode::Subgoals;
    std::vector<ChatMessage> messages;
    std::string image_svg;  // attached render; excluded from the digest

    /// Stable digest of the text content (the image is deterministic but
    /// large; the text is the binding content).
    std::string digest() const {
        std::string all = mode == SequenceMode::Subgoals ? "subgoals\n" : "actions\n";
        for (const ChatMessage& m : messages) {
            all += m.role;
            all += '|';
            all += m.content;
            all += '\n';
        }
        return content_digest(all);
    }
};

// ---------------------------------------------------------------------------
// Transcripts (JSONL: {digest, prompt_text, response_text, meta})

struct TranscriptEntry {
    std::string digest;
    std::string prompt_text;
    std::string response_text;
    nlohmann::json meta;
};

struct Transcript {
    std::vector<TranscriptEntry> entries;

    static Transcript from_jsonl(std::istream& in) {
        Transcript t;
        std::string line;
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line);
            TranscriptEntry e;
            e.digest = j.at("digest").get<std::string>();
            e.prompt_text = j.at("prompt_text").get<std::string>();
            e.response_text = j.at("response_text").get<std::string>();
            e.meta = j.value("meta", nlohmann::json::object());
            t.entries.push_back(std::move(e));
        }
        return t;
    }

    static Transcript load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open transcript: " + path);
        return from_jsonl(in);
    }

    std::string to_jsonl() const {
        std::string out;
        for (const TranscriptEntry& e : entries) {
            nlohmann::json j{{"digest", e.digest},
                             {"prompt_text", e.prompt_text},
                             {"response_text", e.response_text},
                             {"meta", e.meta}};
            out += j.dump();
            out += '\n';
        }
        return out;
    }
};

inline std::string prompt_text_of(const PromptBundle& bundle) {
    std::string all;
    for (const ChatMessage& m : bundle.messages) {
        all += m.role;
        all += ": ";
        all += m.content;
        all += '\n';
    }
    return all;
}

// ---------------------------------------------------------------------------
// Errors

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TranscriptExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TranscriptMismatch : std::runtime_error {
    std::string digest;
    explicit TranscriptMismatch(std::string d)
        : std::runtime_error("no transcript entry matches prompt digest " + d), digest(std::move(d)) {}
};

// ---------------------------------------------------------------------------
// Backends

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string complete(const PromptBundle& bundle) = 0;
};

/// Replays a recorded conversation: each query consumes the next entry whose
/// digest matches the prompt.
class ScriptedBackend final : public Backend {
public:
    explicit ScriptedBackend(Transcript transcript) : transcript_(std::move(transcript)) {}

    std::string complete(const PromptBundle& bundle) override {
        if (cursor_ >= transcript_.entries.size())
            throw TranscriptExhausted("transcript exhausted after " + std::to_string(cursor_) +
                                      " exchanges");
        std::string d = bundle.digest();
        for (std::size_t i = cursor_; i < transcript_.entries.size(); ++i) {
            if (transcript_.entries[i].digest == d) {
                cursor_ = i + 1;
                return transcript_.entries[i].response_text;
            }
        }
        throw TranscriptMismatch(d);
    }

    std::size_t cursor() const { return cursor_; }

private:
    Transcript transcript_;
    std::size_t cursor_ = 0;
};

/// Answers prompts via a callback. Used by tests and by the fixture
/// generator (which records the resulting exchanges into transcripts).
class FunctionBackend final : public Backend {
public:
    using Fn = std::function<std::string(const PromptBundle&)>;
    explicit FunctionBackend(Fn fn) : fn_(std::move(fn)) {}
    std::string complete(const PromptBundle& bundle) override { return fn_(bundle); }

private:
    Fn fn_;
};

// ---------------------------------------------------------------------------
// Prompt construction

/// Reprompt context: what already happened, what failed, what collided.
struct RepromptInfo {
    std::vector<std::string> executed;   // grounded actions, in execution order
    std::string failed_item;             // the subgoal/action that failed
    std::vector<std::string> collided;   // display names from the collision set
    std::string semantic_error;          // verbatim diagnostic, when semantic
    std::string arm_status;              // which arms hold what
};

namespace gateway_detail {

inline std::string objects_by_kind(const SymbolTable& table) {
    std::ostringstream out;
    const std::pair<ObjectKind, const char*> kinds[] = {
        {ObjectKind::Movable, "movable"},
        {ObjectKind::Surface, "surface"},
        {ObjectKind::Space, "space"},
        {ObjectKind::Joint, "joint"},
        {ObjectKind::RobotPart, "robot part"},
    };
    bool first_kind = true;
    for (auto [kind, label] : kinds) {
        std::vector<ObjectId> ids = table.of_kind(kind);
        if (ids.empty()) continue;
        if (!first_kind) out << "\n";
        first_kind = false;
        out << label << ": ";
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (i) out << ", ";
            out << display_name(table.name(ids[i]));
        }
    }
    return out.str();
}

inline std::string subgoal_catalogue(const Domain& domain) {
    std::ostringstream out;
    out << "subgoals = [";
    bool first = true;
    for (const PredicateSpec& p : domain.predicates) {
        if (p.level != PredicateLevel::Spatial) continue;
        if (!first) out << ", ";
        first = false;
        out << "'" << p.name << "(";
        for (std::size_t i = 0; i < p.arg_kinds.size(); ++i) {
            if (i) out << ", ";
            out << "<" << kind_name(p.arg_kinds[i]) << ">";
        }
        out << ")': " << (p.gloss.empty() ? "no description" : p.gloss);
    }
    // Convenience goal: holding an item, without naming an arm.
    out << ", 'Picked(<movable>)': the robot is holding the movable with some arm";
    out << "]";
    return out.str();
}

inline std::string action_catalogue(const Domain& domain) {
    std::ostringstream out;
    out << "actions = [";
    bool first = true;
    for (const ActionSchema& a : domain.actions) {
        if (!first) out << ", ";
        first = false;
        out << "'" << vlm_action_signature(a) << "': " << (a.gloss.empty() ? "no description" : a.gloss);
    }
    out << "]";
    return out.str();
}

}  // namespace gateway_detail

inline constexpr std::string_view kSystemPrompt =
    "You are a planning assistant for a mobile kitchen robot. "
    "You must have at least one empty hand before you can pick up an object or open or close a joint.";

/// Phase-1 prompt asking for English steps. When `reprompt` is present the
/// purple history/failure/collision slots are filled.
inline PromptBundle build_initial_prompt(SequenceMode mode, const std::string& goal_eng,
                                         const SymbolTable& table, const ObservationBundle& obs,
                                         const RepromptInfo* reprompt = nullptr) {
    PromptBundle bundle;
    bundle.mode = mode;
    bundle.image_svg = obs.svg;
    bundle.messages.push_back({"system", std::string(kSystemPrompt)});

    std::ostringstream u;
    u << "Plan a short sequence of "
      << (mode == SequenceMode::Subgoals ? "intermediate goals" : "actions")
      << " that accomplishes the following goal: " << goal_eng << ".\n";
    u << "Respond with one step per line in plain English, where <movable>, <surface>, <space>, "
         "<joint> must be items from the following planning objects:\n";
    u << gateway_detail::objects_by_kind(table) << "\n";
    u << "Currently, you can see "
      << (obs.relations_paragraph.empty() ? std::string("nothing") : obs.relations_paragraph)
      << ".\n";
    u << "The accompanying image shows the scene from above, annotated with object names and "
         "bounding boxes.\n";
    if (reprompt) {
        if (!reprompt->arm_status.empty()) u << "Arm status: " << reprompt->arm_status << "\n";
        u << "So far, the robot has executed: ";
        if (reprompt->executed.empty()) {
            u << "nothing";
        } else {
            for (std::size_t i = 0; i < reprompt->executed.size(); ++i)
                u << (i ? ", " : "") << (i + 1) << ". " << reprompt->executed[i];
        }
        u << ".\n";
        u << "The last attempt failed at: " << reprompt->failed_item << ".";
        if (!reprompt->semantic_error.empty()) u << " " << reprompt->semantic_error << ".";
        u << "\n";
        u << "During the failed planning attempts, the robot collided with: ";
        if (reprompt->collided.empty()) {
            u << "none detected";
        } else {
            for (std::size_t i = 0; i < reprompt->collided.size(); ++i)
                u << (i ? ", " : "") << reprompt->collided[i];
        }
        u << ".\n";
        u << "Plan a new sequence from the current state.\n";
    }
    bundle.messages.push_back({"user", u.str()});
    return bundle;
}

/// Phase-2 prompt translating the phase-1 English answer into tuples. The
/// conversation is shared: the phase-1 exchange stays in the message list.
inline PromptBundle build_translation_prompt(const PromptBundle& phase1,
                                             const std::string& phase1_response,
                                             const Domain& domain, const SymbolTable& table) {
    PromptBundle bundle = phase1;
    bundle.image_svg.clear();
    bundle.messages.push_back({"assistant", phase1_response});
    std::ostringstream u;
    if (bundle.mode == SequenceMode::Subgoals) {
        u << "Translate the above intermediate goals into a formal language defined by the "
             "following subgoals.\n";
        u << gateway_detail::subgoal_catalogue(domain) << "\n";
    } else {
        u << "Translate the each of the listed actions in English into a formal language defined "
             "by the following primitive actions. Each action in English may correspond to "
             "multiple actions:\n";
        u << gateway_detail::action_catalogue(domain) << "\n";
    }
    u << "Please answer with objects in the respective types:\n"
      << gateway_detail::objects_by_kind(table) << "\n";
    u << "Respond with one tuple per line, in execution order.";
    bundle.messages.push_back({"user", u.str()});
    return bundle;
}

/// Internal-retry prompt after a translation error; the diagnostic is fed
/// back verbatim.
inline PromptBundle build_retry_prompt(const PromptBundle& phase2,
                                       const std::string& phase2_response,
                                       const std::string& error_message) {
    PromptBundle bundle = phase2;
    bundle.messages.push_back({"assistant", phase2_response});
    bundle.messages.push_back(
        {"user", "There is a problem with that translation: " + error_message +
                     ". Please answer again with the full corrected list of tuples, one per line."});
    return bundle;
}

/// Reprompt after a planning failure (Algorithm-style: updated scene,
/// executed actions, collision set). Same template as the initial question
/// with the update slots filled.
inline PromptBundle build_reprompt(SequenceMode mode, const std::string& goal_eng,
                                   const SymbolTable& table, const ObservationBundle& obs,
                                   const RepromptInfo& info) {
    return build_initial_prompt(mode, goal_eng, table, obs, &info);
}

inline std::string query(Backend& backend, const PromptBundle& bundle) {
    return backend.complete(bundle);
}

// ---------------------------------------------------------------------------
// Response parsing and validation

struct SubgoalSequence {
    std::vector<Literal> items;
    std::vector<std::string> sources;  // raw tuple text per item
};
struct ActionSequence {
    std::vector<DiscreteAction> items;
    std::vector<std::string> sources;
};
struct ValidationFailure {
    int index = -1;  // failing item position; -1 when nothing was extractable
    std::string message;
};

using ParsedSequence = std::variant<SubgoalSequence, ActionSequence, ValidationFailure>;

/// Extract candidate tuples "name(arg, ...)" from free-form response text:
/// numbered lists, several per line, and code fences are all tolerated.
inline std::vector<std::string> extract_tuples(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    auto is_name_char = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '-';
    };
    while (i < text.size()) {
        if (!is_name_char(text[i])) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() && is_name_char(text[i])) ++i;
        std::size_t j = i;
        while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) ++j;
        if (j < text.size() && text[j] == '(') {
            std::size_t close = text.find(')', j);
            if (close != std::string_view::npos &&
                text.find('(', j + 1) > close) {  // no nested open before the close
                out.emplace_back(text.substr(start, close - start + 1));
                i = close + 1;
                continue;
            }
        }
    }
    return out;
}

/// Parse a phase-2 response into a validated sequence. Tuples are parsed and
/// kind-checked, unary Picked goals get an arm assigned, and the whole
/// sequence is checked by pure symbolic planning from `init`. Failures carry
/// the item index and an English diagnostic for reprompting.
inline ParsedSequence parse_and_validate(SequenceMode mode, std::string_view raw,
                                         const Domain& domain, const SymbolTable& table,
                                         const SymbolicState& init) {
    std::vector<std::string> tuples = extract_tuples(raw);
    if (tuples.empty())
        return ValidationFailure{-1, "no goal or action tuples could be extracted from the reply"};

    std::vector<SequenceItem> items;
    std::vector<std::string> sources;
    for (const std::string& t : tuples) {
        auto split = split_tuple(t);
        if (!split) {
            items.push_back(ItemError{t, "'" + t + "' is not of the form Name(arg, ...)"});
            sources.push_back(t);
            continue;
        }
        auto [head, args] = *split;
        sources.push_back(t);
        if (mode == SequenceMode::Subgoals) {
            // Unary "Picked" is a gateway-level convenience: assign an arm by
            // the empty-hand rule and translate to Holding.
            if (normalize_name(head) == "picked") {
                if (args.size() != 1) {
                    items.push_back(ItemError{t, "Picked takes 1 argument, got " +
                                                     std::to_string(args.size())});
                    continue;
                }
                auto obj = table.find(args[0]);
                if (!obj) {
                    std::string near = table.nearest_name(args[0]);
                    std::string msg = "unknown object '" + args[0] + "'";
                    if (!near.empty()) msg += "; did you mean '" + display_name(near) + "'?";
                    items.push_back(ItemError{t, msg});
                    continue;
                }
                if (table.kind(*obj) != ObjectKind::Movable) {
                    items.push_back(ItemError{t, "'" + args[0] + "' is not a movable"});
                    continue;
                }
                auto holding = domain.find_predicate("Holding");
                if (!holding) {
                    items.push_back(ItemError{t, "domain has no Holding predicate"});
                    continue;
                }
                items.push_back(Literal{*holding, {select_arm(domain, table, init), *obj}, true});
                continue;
            }
            LiteralParseResult r = parse_literal(t, domain, table);
            if (const LiteralError* err = std::get_if<LiteralError>(&r)) {
                items.push_back(ItemError{t, err->message});
            } else {
                items.push_back(std::get<Literal>(r));
            }
        } else {
            auto r = resolve_vlm_action(domain, table, init, head, args);
            if (const LiteralError* err = std::get_if<LiteralError>(&r)) {
                items.push_back(ItemError{t, err->message});
            } else {
                items.push_back(std::get<DiscreteAction>(r));
            }
        }
    }

    SemanticVerdict verdict = check_semantics(domain, table, init, items, mode);
    if (!verdict.success) {
        std::string at = verdict.failing_index >= 0 &&
                                 verdict.failing_index < static_cast<int>(sources.size())
                             ? sources[static_cast<std::size_t>(verdict.failing_index)]
                             : std::string("?");
        return ValidationFailure{verdict.failing_index,
                                 "item " + std::to_string(verdict.failing_index + 1) + " ('" + at +
                                     "'): " + verdict.message};
    }
    if (mode == SequenceMode::Subgoals) {
        SubgoalSequence out;
        out.sources = sources;
        for (SequenceItem& item : items) out.items.push_back(std::get<Literal>(item));
        return out;
    }
    ActionSequence out;
    out.sources = sources;
    for (SequenceItem& item : items) out.items.push_back(std::get<DiscreteAction>(item));
    return out;
}

// ---------------------------------------------------------------------------
// One full "VLM query" (two phases plus bounded internal translation retries)

struct VlmExchange {
    PromptBundle bundle;
    std::string response;
};

struct QueryOutcome {
    ParsedSequence result;
    std::vector<VlmExchange> exchanges;
    int internal_retries = 0;
};

/// Drive one complete query: phase 1 (English steps), phase 2 (translation),
/// then validation with at most `max_retries` in-conversation corrections.
/// This whole exchange counts as a single query for reprompt accounting.
inline QueryOutcome run_vlm_query(Backend& backend, SequenceMode mode,
                                  const std::string& goal_eng, const Domain& domain,
                                  const SymbolTable& table, const SymbolicState& init,
                                  const ObservationBundle& obs,
                                  const RepromptInfo* reprompt = nullptr, int max_retries = 3) {
    QueryOutcome outcome;
    PromptBundle p1 = build_initial_prompt(mode, goal_eng, table, obs, reprompt);
    std::string r1 = query(backend, p1);
    outcome.exchanges.push_back({p1, r1});

    PromptBundle p2 = build_translation_prompt(p1, r1, domain, table);
    std::string r2 = query(backend, p2);
    outcome.exchanges.push_back({p2, r2});

    ParsedSequence parsed = parse_and_validate(mode, r2, domain, table, init);
    while (std::holds_alternative<ValidationFailure>(parsed) &&
           outcome.internal_retries < max_retries) {
        const auto& failure = std::get<ValidationFailure>(parsed);
        ++outcome.internal_retries;
        PromptBundle retry = build_retry_prompt(p2, r2, failure.message);
        std::string r3 = query(backend, retry);
        outcome.exchanges.push_back({retry, r3});
        p2 = std::move(retry);
        r2 = std::move(r3);
        parsed = parse_and_validate(mode, r2, domain, table, init);
    }
    outcome.result = std::move(parsed);
    return outcome;
}

}  // namespace souschef
