#pragma once

#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace souschef {

/// Deterministic RNG. All randomness in the project flows through explicit
/// instances of this so that identical seeds reproduce identical runs.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free modulo bias is negligible for our n, but keep it exact.
        std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do { v = engine_(); } while (v >= limit);
        return v % n;
    }

    std::uint64_t raw() { return engine_(); }

    /// Independent child stream; mixing keeps sibling streams decorrelated.
    Rng fork(std::uint64_t salt) {
        std::uint64_t s = engine_() ^ (salt * 0x9e3779b97f4a7c15ULL + 0x7f4a7c15ULL);
        return Rng(s);
    }

private:
    std::mt19937_64 engine_;
};

/// Stable non-cryptographic content hash (FNV-1a, 64-bit), rendered as hex.
inline std::string content_digest(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* hexdig = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = hexdig[h & 0xf];
        h >>= 4;
    }
    return out;
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

inline std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

/// Lowercase, trim, and collapse interior separator runs (spaces, '_', '-')
/// to single '_'. "Fridge  Door", "fridge-door" and "fridge_door" normalize
/// identically.
inline std::string normalize_name(std::string_view s) {
    std::string t = trim(s);
    std::string out;
    out.reserve(t.size());
    bool gap = false;
    for (char c : t) {
        if (c == ' ' || c == '\t' || c == '_' || c == '-') {
            gap = true;
            continue;
        }
        if (gap && !out.empty()) out.push_back('_');
        gap = false;
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        out.push_back(c);
    }
    return out;
}

/// Human-facing form of an internal name: underscores become spaces.
inline std::string display_name(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c == '_') c = ' ';
    return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

/// Fixed-format float used anywhere bytes must be replay-stable.
inline std::string format_num(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    // Trim trailing zeros but keep one digit after the point.
    std::string s(buf);
    std::size_t pt = s.find('.');
    if (pt != std::string::npos) {
        std::size_t last = s.find_last_not_of('0');
        if (last == pt) last = pt + 1;
        s.erase(last + 1);
    }
    return s;
}

}  // namespace souschef
