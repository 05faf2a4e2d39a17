#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace obw {

// A cycle type [^{m1}c1, ^{m2}c2, ...]: the multiset of cycle lengths of a
// 2-factor, stored as (length, multiplicity) pairs with strictly increasing
// lengths. Every length >= 3, every multiplicity >= 1.
struct CycleType {
    std::vector<std::pair<int, int>> parts;  // (length, multiplicity)

    int order() const {
        int v = 0;
        for (auto [len, mult] : parts) v += len * mult;
        return v;
    }

    int cycle_count() const {
        int c = 0;
        for (auto [len, mult] : parts) c += mult;
        return c;
    }

    int multiplicity_of(int len) const {
        for (auto [l, m] : parts)
            if (l == len) return m;
        return 0;
    }

    // All cycle lengths expanded with multiplicity, ascending.
    std::vector<int> lengths() const {
        std::vector<int> out;
        for (auto [len, mult] : parts)
            for (int i = 0; i < mult; ++i) out.push_back(len);
        return out;
    }

    bool operator==(const CycleType&) const = default;
    auto operator<=>(const CycleType&) const = default;
};

// Builds a CycleType from an arbitrary list of cycle lengths; validates.
inline CycleType make_cycle_type(std::vector<int> lens) {
    if (lens.empty()) throw std::invalid_argument("cycle type: no cycles");
    std::sort(lens.begin(), lens.end());
    CycleType ct;
    for (int l : lens) {
        if (l < 3) throw std::invalid_argument("cycle type: length < 3");
        if (!ct.parts.empty() && ct.parts.back().first == l)
            ct.parts.back().second++;
        else
            ct.parts.push_back({l, 1});
    }
    return ct;
}

// Canonical text form: ascending lengths, `L^M` with the exponent only when
// M > 1, comma separated. E.g. "3^2,5".
inline std::string format_cycle_type(const CycleType& ct) {
    std::string out;
    for (size_t i = 0; i < ct.parts.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(ct.parts[i].first);
        if (ct.parts[i].second > 1) {
            out += '^';
            out += std::to_string(ct.parts[i].second);
        }
    }
    return out;
}

// Grammar: comma-separated terms, each `L` or `L^M` (L >= 3, M >= 1);
// whitespace ignored anywhere.
inline CycleType parse_cycle_type(const std::string& text) {
    std::vector<int> lens;
    size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto parse_int = [&](const char* what) {
        skip_ws();
        size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (i == start)
            throw std::invalid_argument(std::string("cycle type parse: expected ") + what +
                                        " at position " + std::to_string(start));
        long val = std::stol(text.substr(start, i - start));
        if (val > 1000000) throw std::invalid_argument("cycle type parse: number too large");
        return static_cast<int>(val);
    };
    while (true) {
        int len = parse_int("cycle length");
        int mult = 1;
        skip_ws();
        if (i < text.size() && text[i] == '^') {
            ++i;
            mult = parse_int("multiplicity");
        }
        if (len < 3) throw std::invalid_argument("cycle type parse: length < 3");
        if (mult < 1) throw std::invalid_argument("cycle type parse: multiplicity < 1");
        for (int k = 0; k < mult; ++k) lens.push_back(len);
        skip_ws();
        if (i == text.size()) break;
        if (text[i] != ',')
            throw std::invalid_argument("cycle type parse: expected ',' at position " +
                                        std::to_string(i));
        ++i;
    }
    return make_cycle_type(std::move(lens));
}

enum class Residue { R4t, R4t1, R4t2, R4t3 };

struct InstanceClass {
    Residue residue;
    int t;
    bool known_unsolvable;
};

// The four cycle types with no OP solution: [^2 3], [^4 3], [4,5], [^2 3,5].
inline bool is_known_unsolvable(const CycleType& ct) {
    static const std::vector<CycleType> kNone = {
        make_cycle_type({3, 3}),
        make_cycle_type({3, 3, 3, 3}),
        make_cycle_type({4, 5}),
        make_cycle_type({3, 3, 5}),
    };
    return std::find(kNone.begin(), kNone.end(), ct) != kNone.end();
}

inline InstanceClass classify(const CycleType& ct) {
    int v = ct.order();
    InstanceClass ic;
    ic.t = v / 4;
    switch (v % 4) {
        case 0: ic.residue = Residue::R4t; break;
        case 1: ic.residue = Residue::R4t1; break;
        case 2: ic.residue = Residue::R4t2; break;
        default: ic.residue = Residue::R4t3; break;
    }
    ic.known_unsolvable = is_known_unsolvable(ct);
    return ic;
}

// Enumerates every multiset of integers >= 3 summing to v with at least
// min_cycles parts, each exactly once. Order is descending-largest-part
// lexicographic ([9], [6,3], [5,4], [3,3,3]) so batch output is reproducible.
inline void enumerate_cycle_types(int v, int min_cycles,
                                  const std::function<void(const CycleType&)>& yield) {
    if (v < 3) return;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int remaining, int max_part) {
        if (remaining == 0) {
            if (static_cast<int>(cur.size()) >= min_cycles) {
                CycleType ct;
                for (auto it = cur.rbegin(); it != cur.rend(); ++it) {
                    if (!ct.parts.empty() && ct.parts.back().first == *it)
                        ct.parts.back().second++;
                    else
                        ct.parts.push_back({*it, 1});
                }
                yield(ct);
            }
            return;
        }
        for (int p = std::min(max_part, remaining); p >= 3; --p) {
            int rest = remaining - p;
            if (rest != 0 && rest < 3) continue;
            cur.push_back(p);
            rec(rest, p);
            cur.pop_back();
        }
    };
    rec(v, v);
}

inline std::vector<CycleType> list_cycle_types(int v, int min_cycles) {
    std::vector<CycleType> out;
    enumerate_cycle_types(v, min_cycles, [&](const CycleType& ct) { out.push_back(ct); });
    return out;
}

inline std::int64_t count_cycle_types(int v, int min_cycles) {
    std::int64_t n = 0;
    enumerate_cycle_types(v, min_cycles, [&](const CycleType&) { ++n; });
    return n;
}

}  // namespace obw
