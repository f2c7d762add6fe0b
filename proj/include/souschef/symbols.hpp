#pragma once

// Problem constants: object identifiers and their kinds.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "souschef/common.hpp"

namespace souschef {

using ObjectId = std::int32_t;
inline constexpr ObjectId kNoObject = -1;

enum class ObjectKind : std::uint8_t { Movable, Surface, Space, Joint, RobotPart };

inline std::string_view kind_name(ObjectKind k) {
    switch (k) {
        case ObjectKind::Movable: return "movable";
        case ObjectKind::Surface: return "surface";
        case ObjectKind::Space: return "space";
        case ObjectKind::Joint: return "joint";
        case ObjectKind::RobotPart: return "robot-part";
    }
    return "?";
}

inline std::optional<ObjectKind> kind_from_name(std::string_view s) {
    if (s == "movable") return ObjectKind::Movable;
    if (s == "surface") return ObjectKind::Surface;
    if (s == "space") return ObjectKind::Space;
    if (s == "joint") return ObjectKind::Joint;
    if (s == "robot-part") return ObjectKind::RobotPart;
    return std::nullopt;
}

/// Registry of problem objects. Names are unique after normalization
/// (case-insensitive, whitespace collapsed to underscores); ids are dense
/// and stable in insertion order.
class SymbolTable {
public:
    ObjectId add(std::string_view name, ObjectKind kind) {
        std::string key = normalize_name(name);
        if (key.empty()) throw std::invalid_argument("empty object name");
        auto [it, inserted] = index_.emplace(key, static_cast<ObjectId>(entries_.size()));
        if (!inserted) throw std::invalid_argument("duplicate object name: " + key);
        entries_.push_back({key, kind});
        return it->second;
    }

    std::optional<ObjectId> find(std::string_view name) const {
        auto it = index_.find(normalize_name(name));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& name(ObjectId id) const { return entries_.at(check(id)).name; }
    ObjectKind kind(ObjectId id) const { return entries_.at(check(id)).kind; }
    std::size_t size() const { return entries_.size(); }

    std::vector<ObjectId> of_kind(ObjectKind k) const {
        std::vector<ObjectId> out;
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].kind == k) out.push_back(static_cast<ObjectId>(i));
        return out;
    }

    std::vector<ObjectId> all() const {
        std::vector<ObjectId> out(entries_.size());
        for (std::size_t i = 0; i < entries_.size(); ++i) out[i] = static_cast<ObjectId>(i);
        return out;
    }

    /// Closest registered name by edit distance over normalized forms,
    /// scanning the whole table. Ties go to the earlier entry.
    std::string nearest_name(std::string_view name) const {
        std::string key = normalize_name(name);
        std::size_t best = std::string::npos;
        std::size_t best_d = 0;
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            std::size_t d = edit_distance(key, entries_[i].name);
            if (best == std::string::npos || d < best_d) {
                best = i;
                best_d = d;
            }
        }
        return best == std::string::npos ? std::string() : entries_[best].name;
    }

private:
    struct Entry {
        std::string name;
        ObjectKind kind;
    };

    std::size_t check(ObjectId id) const {
        if (id < 0 || static_cast<std::size_t>(id) >= entries_.size())
            throw std::out_of_range("bad ObjectId");
        return static_cast<std::size_t>(id);
    }

    std::vector<Entry> entries_;
    std::map<std::string, ObjectId, std::less<>> index_;
};

}  // namespace souschef
