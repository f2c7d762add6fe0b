#pragma once

// Symbolic planning vocabulary: predicates, literals, action schemas with a
// discrete/continuous parameter split, symbolic states under the closed-world
// assumption, and the parsers for the domain dialect and literal tuples.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "souschef/common.hpp"
#include "souschef/symbols.hpp"

namespace souschef {

enum class PredicateLevel : std::uint8_t { Symbolic, Spatial };

struct PredicateSpec {
    std::string name;                  // canonical, as declared
    std::vector<ObjectKind> arg_kinds;
    PredicateLevel level = PredicateLevel::Symbolic;
    std::string gloss;                 // one-line English description for prompts

    std::size_t arity() const { return arg_kinds.size(); }
};

struct Literal {
    std::int32_t predicate = -1;
    std::vector<ObjectId> args;
    bool positive = true;

    bool operator==(const Literal&) const = default;
    auto operator<=>(const Literal&) const = default;
};

enum class ContinuousKind : std::uint8_t { Pose, Grasp, BaseConfig, JointValue, Trajectory };

struct DiscreteParam {
    std::string var;
    ObjectKind kind;
};

struct ContinuousParam {
    std::string var;
    ContinuousKind kind;
};

/// Literal whose arguments refer to schema parameters by index.
struct LiteralTemplate {
    std::int32_t predicate = -1;
    std::vector<std::int32_t> params;
    bool positive = true;
};

struct ActionSchema {
    std::string name;
    std::vector<DiscreteParam> discrete;
    std::vector<ContinuousParam> continuous;
    std::vector<LiteralTemplate> preconditions;
    std::vector<LiteralTemplate> effects;
    std::string gloss;
};

/// Action with all discrete parameters bound; the continuous side is the
/// refiner's business.
struct DiscreteAction {
    std::int32_t schema = -1;
    std::vector<ObjectId> args;

    bool operator==(const DiscreteAction&) const = default;
    auto operator<=>(const DiscreteAction&) const = default;
};

struct Domain {
    std::string name;
    std::vector<PredicateSpec> predicates;
    std::vector<ActionSchema> actions;
    std::map<std::string, std::int32_t, std::less<>> predicate_index;  // normalized name
    std::map<std::string, std::int32_t, std::less<>> action_index;     // normalized name
    std::map<std::string, std::string, std::less<>> aliases;           // normalized alias -> canonical normalized

    std::optional<std::int32_t> find_predicate(std::string_view raw) const {
        std::string key = normalize_name(raw);
        if (auto a = aliases.find(key); a != aliases.end()) key = a->second;
        auto it = predicate_index.find(key);
        if (it == predicate_index.end()) return std::nullopt;
        return it->second;
    }

    std::optional<std::int32_t> find_action(std::string_view raw) const {
        auto it = action_index.find(normalize_name(raw));
        if (it == action_index.end()) return std::nullopt;
        return it->second;
    }
};

// ---------------------------------------------------------------------------
// Errors

struct SyntaxError : std::runtime_error {
    int line;
    int col;
    std::string expected;
    SyntaxError(int line_, int col_, std::string expected_)
        : std::runtime_error("syntax error at " + std::to_string(line_) + ":" +
                             std::to_string(col_) + ", expected " + expected_),
          line(line_), col(col_), expected(std::move(expected_)) {}
};

struct SchemaTypeError : std::runtime_error {
    std::string schema;
    std::string variable;
    SchemaTypeError(std::string schema_, std::string variable_, const std::string& what_)
        : std::runtime_error("in action '" + schema_ + "': " + what_),
          schema(std::move(schema_)), variable(std::move(variable_)) {}
};

struct PreconditionUnmet : std::runtime_error {
    Literal literal;
    PreconditionUnmet(Literal lit, const std::string& text)
        : std::runtime_error("precondition unmet: " + text), literal(std::move(lit)) {}
};

// Literal tuple parsing reports failures as values: the diagnostics are fed
// back to the language model, so they must be data, not exceptions.
enum class LiteralErrorKind : std::uint8_t {
    Malformed,
    UnknownPredicate,
    UnknownObject,
    ArityMismatch,
    KindMismatch,
};

struct LiteralError {
    LiteralErrorKind kind;
    std::string message;     // English, usable verbatim in a reprompt
    std::string offender;    // the name or tuple that failed
    std::string suggestion;  // nearest known name, when applicable
};

using LiteralParseResult = std::variant<Literal, LiteralError>;

// ---------------------------------------------------------------------------
// Symbolic state (closed world, positive literals only)
//
// Literals are packed into single 64-bit codes so states copy as flat memory;
// forward search copies states on every expansion.

using LiteralCode = std::uint64_t;

inline LiteralCode encode_literal(const Literal& l) {
    if (l.args.size() > 3) throw std::invalid_argument("literal arity > 3 unsupported");
    if (l.predicate < 0 || l.predicate >= (1 << 12)) throw std::invalid_argument("predicate id out of range");
    LiteralCode code = (static_cast<LiteralCode>(l.predicate) << 50) |
                       (static_cast<LiteralCode>(l.args.size()) << 48);
    for (std::size_t i = 0; i < l.args.size(); ++i) {
        ObjectId a = l.args[i];
        if (a < 0 || a >= (1 << 14)) throw std::invalid_argument("object id out of range");
        code |= static_cast<LiteralCode>(a) << (i * 14);
    }
    return code;
}

inline Literal decode_literal(LiteralCode code) {
    Literal l;
    l.predicate = static_cast<std::int32_t>(code >> 50);
    std::size_t n = static_cast<std::size_t>((code >> 48) & 0x3);
    l.positive = true;
    for (std::size_t i = 0; i < n; ++i)
        l.args.push_back(static_cast<ObjectId>((code >> (i * 14)) & 0x3fff));
    return l;
}

class SymbolicState {
public:
    SymbolicState() = default;
    explicit SymbolicState(const std::vector<Literal>& lits) {
        codes_.reserve(lits.size());
        for (const Literal& l : lits) {
            if (!l.positive) throw std::invalid_argument("state literals must be positive");
            codes_.push_back(encode_literal(l));
        }
        canonicalize();
    }

    std::vector<Literal> literals() const {
        std::vector<Literal> out;
        out.reserve(codes_.size());
        for (LiteralCode c : codes_) out.push_back(decode_literal(c));
        return out;
    }

    const std::vector<LiteralCode>& codes() const { return codes_; }
    std::size_t size() const { return codes_.size(); }

    bool contains_code(LiteralCode c) const {
        return std::binary_search(codes_.begin(), codes_.end(), c);
    }
    bool contains(const Literal& l) const {
        Literal key = l;
        key.positive = true;
        return contains_code(encode_literal(key));
    }

    void insert_code(LiteralCode c) {
        auto it = std::lower_bound(codes_.begin(), codes_.end(), c);
        if (it == codes_.end() || *it != c) codes_.insert(it, c);
    }
    void erase_code(LiteralCode c) {
        auto it = std::lower_bound(codes_.begin(), codes_.end(), c);
        if (it != codes_.end() && *it == c) codes_.erase(it);
    }
    void insert(Literal l) {
        l.positive = true;
        insert_code(encode_literal(l));
    }
    void erase(Literal l) {
        l.positive = true;
        erase_code(encode_literal(l));
    }

    bool operator==(const SymbolicState&) const = default;
    auto operator<=>(const SymbolicState&) const = default;

    std::uint64_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (LiteralCode c : codes_) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

private:
    void canonicalize() {
        std::sort(codes_.begin(), codes_.end());
        codes_.erase(std::unique(codes_.begin(), codes_.end()), codes_.end());
    }

    std::vector<LiteralCode> codes_;  // sorted, unique
};

struct SymbolicStateHash {
    std::size_t operator()(const SymbolicState& s) const { return static_cast<std::size_t>(s.hash()); }
};

/// Closed-world truth test; negative literals invert membership.
inline bool holds(const SymbolicState& state, const Literal& literal) {
    return literal.positive ? state.contains(literal) : !state.contains(literal);
}

inline bool holds_all(const SymbolicState& state, const std::vector<Literal>& literals) {
    for (const Literal& l : literals)
        if (!holds(state, l)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string unparse(const Literal& l, const Domain& domain, const SymbolTable& table) {
    std::string out;
    if (!l.positive) out += '!';
    out += domain.predicates.at(static_cast<std::size_t>(l.predicate)).name;
    out += '(';
    for (std::size_t i = 0; i < l.args.size(); ++i) {
        if (i) out += ", ";
        out += table.name(l.args[i]);
    }
    out += ')';
    return out;
}

inline std::string unparse(const DiscreteAction& a, const Domain& domain, const SymbolTable& table) {
    std::string out = domain.actions.at(static_cast<std::size_t>(a.schema)).name;
    out += '(';
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ", ";
        out += table.name(a.args[i]);
    }
    out += ')';
    return out;
}

/// English rendering of one literal, shared by scene descriptions and
/// semantic diagnostics.
inline std::string literal_english(const Literal& l, const Domain& domain, const SymbolTable& table) {
    const std::string& pname = domain.predicates.at(static_cast<std::size_t>(l.predicate)).name;
    auto name = [&](std::size_t i) { return display_name(table.name(l.args.at(i))); };
    std::string s;
    if (pname == "On")
        s = "the " + name(0) + " is on the " + name(1);
    else if (pname == "In")
        s = "the " + name(0) + " is in the " + name(1);
    else if (pname == "Holding")
        s = "the " + name(0) + " is holding the " + name(1);
    else if (pname == "HandEmpty")
        s = "the " + name(0) + " is empty";
    else if (pname == "Opened")
        s = "the " + name(0) + " is open";
    else if (pname == "Closed")
        s = "the " + name(0) + " is closed";
    else if (pname == "TurnedOn")
        s = "the " + name(0) + " is turned on";
    else if (pname == "Sprinkled")
        s = "the " + name(0) + " has been sprinkled over the " + name(1);
    else {
        s = pname + "(";
        for (std::size_t i = 0; i < l.args.size(); ++i) s += (i ? ", " : "") + name(i);
        s += ")";
    }
    if (!l.positive) s = "it is not the case that " + s;
    return s;
}

inline Literal instantiate(const LiteralTemplate& t, const std::vector<ObjectId>& bindings) {
    Literal out;
    out.predicate = t.predicate;
    out.positive = t.positive;
    out.args.reserve(t.params.size());
    for (std::int32_t p : t.params) out.args.push_back(bindings.at(static_cast<std::size_t>(p)));
    return out;
}

// ---------------------------------------------------------------------------
// Literal tuple parsing:  Name(arg1, arg2, ...)  with optional '!' prefix.

namespace detail {
inline LiteralError make_error(LiteralErrorKind kind, std::string message,
                               std::string offender = {}, std::string suggestion = {}) {
    return LiteralError{kind, std::move(message), std::move(offender), std::move(suggestion)};
}
}  // namespace detail

/// Split "Name(a, b)" into head + raw args. Returns nullopt if the text is
/// not shaped like a tuple at all.
inline std::optional<std::pair<std::string, std::vector<std::string>>>
split_tuple(std::string_view text) {
    std::string s = trim(text);
    if (s.empty()) return std::nullopt;
    std::size_t open = s.find('(');
    std::size_t close = s.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) return std::nullopt;
    std::string head = trim(s.substr(0, open));
    if (head.empty()) return std::nullopt;
    std::string body = s.substr(open + 1, close - open - 1);
    std::vector<std::string> args;
    if (!trim(body).empty()) {
        for (const std::string& part : split(body, ',')) args.push_back(trim(part));
    }
    return std::make_pair(head, args);
}

inline LiteralParseResult parse_literal(std::string_view text, const Domain& domain,
                                        const SymbolTable& table) {
    auto tuple = split_tuple(text);
    if (!tuple)
        return detail::make_error(LiteralErrorKind::Malformed,
                                  "'" + std::string(trim(text)) + "' is not of the form Name(arg, ...)",
                                  std::string(trim(text)));
    auto [head, raw_args] = *tuple;
    bool positive = true;
    if (!head.empty() && head.front() == '!') {
        positive = false;
        head = trim(head.substr(1));
    }
    auto pred = domain.find_predicate(head);
    if (!pred)
        return detail::make_error(LiteralErrorKind::UnknownPredicate,
                                  "unknown predicate '" + head + "'", head);
    const PredicateSpec& spec = domain.predicates[static_cast<std::size_t>(*pred)];
    if (raw_args.size() != spec.arity()) {
        std::ostringstream msg;
        msg << spec.name << " takes " << spec.arity() << " argument"
            << (spec.arity() == 1 ? "" : "s") << ", got " << raw_args.size();
        return detail::make_error(LiteralErrorKind::ArityMismatch, msg.str(), std::string(trim(text)));
    }
    Literal lit;
    lit.predicate = *pred;
    lit.positive = positive;
    for (std::size_t i = 0; i < raw_args.size(); ++i) {
        auto id = table.find(raw_args[i]);
        if (!id) {
            std::string near = table.nearest_name(raw_args[i]);
            std::string msg = "unknown object '" + raw_args[i] + "'";
            if (!near.empty()) msg += "; did you mean '" + display_name(near) + "'?";
            return detail::make_error(LiteralErrorKind::UnknownObject, msg, raw_args[i], near);
        }
        if (table.kind(*id) != spec.arg_kinds[i]) {
            std::ostringstream msg;
            msg << "argument " << (i + 1) << " of " << spec.name << " must be a "
                << kind_name(spec.arg_kinds[i]) << ", but '" << raw_args[i] << "' is a "
                << kind_name(table.kind(*id));
            return detail::make_error(LiteralErrorKind::KindMismatch, msg.str(), raw_args[i]);
        }
        lit.args.push_back(*id);
    }
    return lit;
}

// ---------------------------------------------------------------------------
// Transitions

/// Apply a grounded action. Preconditions are checked in declaration order;
/// the input state is untouched.
inline SymbolicState apply(const SymbolicState& state, const Domain& domain,
                           const DiscreteAction& action, const SymbolTable& table) {
    const ActionSchema& schema = domain.actions.at(static_cast<std::size_t>(action.schema));
    if (action.args.size() != schema.discrete.size())
        throw std::invalid_argument("binding count mismatch for " + schema.name);
    for (const LiteralTemplate& t : schema.preconditions) {
        Literal lit = instantiate(t, action.args);
        if (!holds(state, lit))
            throw PreconditionUnmet(lit, unparse(lit, domain, table) + " required by " + schema.name);
    }
    SymbolicState next = state;
    for (const LiteralTemplate& t : schema.effects) {
        Literal lit = instantiate(t, action.args);
        if (t.positive)
            next.insert(lit);
        else
            next.erase(lit);
    }
    return next;
}

/// Non-throwing variant used by search inner loops.
inline bool try_apply(const SymbolicState& state, const Domain& domain,
                      const DiscreteAction& action, SymbolicState* out) {
    const ActionSchema& schema = domain.actions[static_cast<std::size_t>(action.schema)];
    for (const LiteralTemplate& t : schema.preconditions)
        if (!holds(state, instantiate(t, action.args))) return false;
    SymbolicState next = state;
    for (const LiteralTemplate& t : schema.effects) {
        Literal lit = instantiate(t, action.args);
        if (t.positive)
            next.insert(lit);
        else
            next.erase(lit);
    }
    *out = std::move(next);
    return true;
}

// ---------------------------------------------------------------------------
// Exclusivity: one support per movable, Opened/Closed mutually exclusive.
// Predicates are looked up by name so the check also runs on toy domains
// that declare a subset of them.

inline std::vector<std::string> exclusivity_violations(const SymbolicState& state,
                                                       const Domain& domain,
                                                       const SymbolTable& table) {
    std::vector<std::string> out;
    auto pred = [&](const char* n) { return domain.find_predicate(n); };
    auto on = pred("On"), in = pred("In"), holding = pred("Holding");
    auto opened = pred("Opened"), closed = pred("Closed");

    std::map<ObjectId, int> supports;
    std::map<ObjectId, int> open_state;
    for (const Literal& l : state.literals()) {
        if ((on && l.predicate == *on) || (in && l.predicate == *in))
            supports[l.args.at(0)]++;
        if (holding && l.predicate == *holding) supports[l.args.at(1)]++;
        if (opened && l.predicate == *opened) open_state[l.args.at(0)] |= 1;
        if (closed && l.predicate == *closed) open_state[l.args.at(0)] |= 2;
    }
    for (auto [id, n] : supports)
        if (n > 1) out.push_back(table.name(id) + " has " + std::to_string(n) + " supports");
    for (auto [id, bits] : open_state)
        if (bits == 3) out.push_back(table.name(id) + " is both Opened and Closed");
    return out;
}

// ---------------------------------------------------------------------------
// Domain dialect parser (s-expression based; grammar in docs/dialect.md)

namespace detail {

struct Token {
    enum Type { LParen, RParen, Atom, End } type;
    std::string text;
    int line;
    int col;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip();
        if (pos_ >= src_.size()) return {Token::End, "", line_, col_};
        char c = src_[pos_];
        if (c == '(') {
            Token t{Token::LParen, "(", line_, col_};
            advance();
            return t;
        }
        if (c == ')') {
            Token t{Token::RParen, ")", line_, col_};
            advance();
            return t;
        }
        Token t{Token::Atom, "", line_, col_};
        while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) &&
               src_[pos_] != '(' && src_[pos_] != ')' && src_[pos_] != ';') {
            t.text.push_back(src_[pos_]);
            advance();
        }
        return t;
    }

private:
    void skip() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ';') {  // comment to end of line
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

struct Node {
    // Either an atom or a list.
    std::string atom;
    std::vector<Node> items;
    bool is_atom = false;
    int line = 0;
    int col = 0;
};

inline Node parse_sexpr(Lexer& lex, const Token& first) {
    if (first.type == Token::Atom) {
        Node n;
        n.is_atom = true;
        n.atom = first.text;
        n.line = first.line;
        n.col = first.col;
        return n;
    }
    if (first.type != Token::LParen) throw SyntaxError(first.line, first.col, "'(' or atom");
    Node n;
    n.line = first.line;
    n.col = first.col;
    for (;;) {
        Token t = lex.next();
        if (t.type == Token::RParen) return n;
        if (t.type == Token::End) throw SyntaxError(t.line, t.col, "')'");
        n.items.push_back(parse_sexpr(lex, t));
    }
}

inline const Node& expect_list(const Node& n, const char* what) {
    if (n.is_atom) throw SyntaxError(n.line, n.col, what);
    return n;
}

inline const std::string& expect_atom(const Node& n, const char* what) {
    if (!n.is_atom) throw SyntaxError(n.line, n.col, what);
    return n.atom;
}

inline std::optional<ContinuousKind> continuous_kind_from(std::string_view s) {
    if (s == "pose") return ContinuousKind::Pose;
    if (s == "grasp") return ContinuousKind::Grasp;
    if (s == "base-config") return ContinuousKind::BaseConfig;
    if (s == "joint-value") return ContinuousKind::JointValue;
    if (s == "trajectory") return ContinuousKind::Trajectory;
    return std::nullopt;
}

}  // namespace detail

inline Domain parse_domain(std::string_view text) {
    detail::Lexer lex(text);
    detail::Token first = lex.next();
    if (first.type == detail::Token::End) throw SyntaxError(first.line, first.col, "'(domain ...)'");
    detail::Node root = detail::parse_sexpr(lex, first);
    detail::Token trailing = lex.next();
    if (trailing.type != detail::Token::End)
        throw SyntaxError(trailing.line, trailing.col, "end of input");

    detail::expect_list(root, "'(domain ...)'");
    if (root.items.empty() || !root.items[0].is_atom || root.items[0].atom != "domain")
        throw SyntaxError(root.line, root.col, "'domain'");
    if (root.items.size() < 2 || !root.items[1].is_atom)
        throw SyntaxError(root.line, root.col, "domain name");

    Domain domain;
    domain.name = root.items[1].atom;

    struct PendingAction {
        const detail::Node* node;
    };
    std::vector<PendingAction> pending;

    for (std::size_t i = 2; i < root.items.size(); ++i) {
        const detail::Node& section = detail::expect_list(root.items[i], "section list");
        if (section.items.empty())
            throw SyntaxError(section.line, section.col, "section keyword");
        const std::string& kw = detail::expect_atom(section.items[0], "section keyword");
        if (kw == "predicates") {
            for (std::size_t j = 1; j < section.items.size(); ++j) {
                const detail::Node& p = detail::expect_list(section.items[j], "predicate declaration");
                if (p.items.empty()) throw SyntaxError(p.line, p.col, "predicate name");
                PredicateSpec spec;
                spec.name = detail::expect_atom(p.items[0], "predicate name");
                std::size_t k = 1;
                for (; k < p.items.size(); ++k) {
                    const std::string& a = detail::expect_atom(p.items[k], "argument kind or attribute");
                    if (a.starts_with(":")) break;
                    auto kind = kind_from_name(a);
                    if (!kind) throw SyntaxError(p.items[k].line, p.items[k].col, "object kind");
                    spec.arg_kinds.push_back(*kind);
                }
                for (; k < p.items.size(); ++k) {
                    const std::string& a = detail::expect_atom(p.items[k], "attribute");
                    if (a == ":level") {
                        const std::string& v =
                            detail::expect_atom(p.items.at(++k), "'spatial' or 'symbolic'");
                        if (v == "spatial")
                            spec.level = PredicateLevel::Spatial;
                        else if (v == "symbolic")
                            spec.level = PredicateLevel::Symbolic;
                        else
                            throw SyntaxError(p.items[k].line, p.items[k].col, "'spatial' or 'symbolic'");
                    } else if (a == ":gloss") {
                        // Gloss text: remaining atoms until next attribute, joined with spaces.
                        std::vector<std::string> words;
                        while (k + 1 < p.items.size() && p.items[k + 1].is_atom &&
                               !p.items[k + 1].atom.starts_with(":"))
                            words.push_back(p.items[++k].atom);
                        spec.gloss = join(words, " ");
                    } else {
                        throw SyntaxError(p.items[k].line, p.items[k].col, "known attribute");
                    }
                }
                std::string key = normalize_name(spec.name);
                if (domain.predicate_index.count(key))
                    throw SyntaxError(p.line, p.col, "unique predicate name");
                domain.predicate_index[key] = static_cast<std::int32_t>(domain.predicates.size());
                domain.predicates.push_back(std::move(spec));
            }
        } else if (kw == "alias") {
            if (section.items.size() != 3)
                throw SyntaxError(section.line, section.col, "(alias New Canonical)");
            std::string from = normalize_name(detail::expect_atom(section.items[1], "alias name"));
            std::string to = normalize_name(detail::expect_atom(section.items[2], "canonical name"));
            domain.aliases[from] = to;
        } else if (kw == "action") {
            pending.push_back({&section});
        } else {
            throw SyntaxError(section.line, section.col, "'predicates', 'alias' or 'action'");
        }
    }

    // Alias targets must name real predicates.
    for (const auto& [from, to] : domain.aliases)
        if (!domain.predicate_index.count(to))
            throw SyntaxError(root.line, root.col, "alias target '" + to + "' declared as predicate");

    for (const PendingAction& pa : pending) {
        const detail::Node& a = *pa.node;
        if (a.items.size() < 2 || !a.items[1].is_atom)
            throw SyntaxError(a.line, a.col, "action name");
        ActionSchema schema;
        schema.name = a.items[1].atom;

        auto param_index = [&schema](std::string_view var) -> std::int32_t {
            for (std::size_t i = 0; i < schema.discrete.size(); ++i)
                if (schema.discrete[i].var == var) return static_cast<std::int32_t>(i);
            return -1;
        };

        auto parse_template = [&](const detail::Node& node) -> LiteralTemplate {
            const detail::Node* body = &node;
            bool positive = true;
            if (!node.items.empty() && node.items[0].is_atom && node.items[0].atom == "not") {
                if (node.items.size() != 2)
                    throw SyntaxError(node.line, node.col, "(not (Literal ...))");
                positive = false;
                body = &node.items[1];
            }
            const detail::Node& lit = detail::expect_list(*body, "literal");
            if (lit.items.empty()) throw SyntaxError(lit.line, lit.col, "predicate name");
            LiteralTemplate t;
            t.positive = positive;
            const std::string& pname = detail::expect_atom(lit.items[0], "predicate name");
            auto pred = domain.find_predicate(pname);
            if (!pred) throw SyntaxError(lit.items[0].line, lit.items[0].col, "declared predicate");
            t.predicate = *pred;
            const PredicateSpec& spec = domain.predicates[static_cast<std::size_t>(*pred)];
            if (lit.items.size() - 1 != spec.arity())
                throw SyntaxError(lit.line, lit.col,
                                  std::to_string(spec.arity()) + " arguments for " + spec.name);
            for (std::size_t k = 1; k < lit.items.size(); ++k) {
                const std::string& var = detail::expect_atom(lit.items[k], "parameter variable");
                std::int32_t idx = param_index(var);
                if (idx < 0)
                    throw SchemaTypeError(schema.name, var,
                                          "variable '" + var + "' is not a declared parameter");
                if (schema.discrete[static_cast<std::size_t>(idx)].kind != spec.arg_kinds[k - 1])
                    throw SchemaTypeError(schema.name, var,
                                          "variable '" + var + "' has kind " +
                                              std::string(kind_name(schema.discrete[static_cast<std::size_t>(idx)].kind)) +
                                              " but " + spec.name + " expects " +
                                              std::string(kind_name(spec.arg_kinds[k - 1])));
                t.params.push_back(idx);
            }
            return t;
        };

        for (std::size_t i = 2; i < a.items.size(); ++i) {
            const detail::Node& sec = detail::expect_list(a.items[i], "action section");
            if (sec.items.empty()) throw SyntaxError(sec.line, sec.col, "section keyword");
            const std::string& kw = detail::expect_atom(sec.items[0], "section keyword");
            if (kw == "params") {
                for (std::size_t j = 1; j < sec.items.size(); ++j) {
                    const detail::Node& p = detail::expect_list(sec.items[j], "(?var kind)");
                    if (p.items.size() != 2) throw SyntaxError(p.line, p.col, "(?var kind)");
                    DiscreteParam dp;
                    dp.var = detail::expect_atom(p.items[0], "?variable");
                    auto kind = kind_from_name(detail::expect_atom(p.items[1], "object kind"));
                    if (!kind) throw SyntaxError(p.items[1].line, p.items[1].col, "object kind");
                    dp.kind = *kind;
                    schema.discrete.push_back(std::move(dp));
                }
            } else if (kw == "continuous") {
                for (std::size_t j = 1; j < sec.items.size(); ++j) {
                    const detail::Node& p = detail::expect_list(sec.items[j], "(?var continuous-kind)");
                    if (p.items.size() != 2) throw SyntaxError(p.line, p.col, "(?var continuous-kind)");
                    ContinuousParam cp;
                    cp.var = detail::expect_atom(p.items[0], "?variable");
                    auto kind = detail::continuous_kind_from(detail::expect_atom(p.items[1], "continuous kind"));
                    if (!kind) throw SyntaxError(p.items[1].line, p.items[1].col, "continuous kind");
                    cp.kind = *kind;
                    schema.continuous.push_back(std::move(cp));
                }
            } else if (kw == "pre") {
                for (std::size_t j = 1; j < sec.items.size(); ++j)
                    schema.preconditions.push_back(parse_template(sec.items[j]));
            } else if (kw == "eff") {
                for (std::size_t j = 1; j < sec.items.size(); ++j)
                    schema.effects.push_back(parse_template(sec.items[j]));
            } else if (kw == "gloss") {
                std::vector<std::string> words;
                for (std::size_t j = 1; j < sec.items.size(); ++j)
                    words.push_back(detail::expect_atom(sec.items[j], "gloss word"));
                schema.gloss = join(words, " ");
            } else {
                throw SyntaxError(sec.line, sec.col, "'params', 'continuous', 'pre', 'eff' or 'gloss'");
            }
        }

        // Load-time sanity: no effect literal may appear with both polarities.
        for (const LiteralTemplate& x : schema.effects)
            for (const LiteralTemplate& y : schema.effects)
                if (&x != &y && x.predicate == y.predicate && x.params == y.params &&
                    x.positive != y.positive)
                    throw SchemaTypeError(schema.name,
                                          domain.predicates[static_cast<std::size_t>(x.predicate)].name,
                                          "effect literal appears with both polarities");

        std::string key = normalize_name(schema.name);
        if (domain.action_index.count(key))
            throw SyntaxError(a.line, a.col, "unique action name");
        domain.action_index[key] = static_cast<std::int32_t>(domain.actions.size());
        domain.actions.push_back(std::move(schema));
    }

    return domain;
}

}  // namespace souschef
