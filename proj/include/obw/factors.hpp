#pragma once

#include <cassert>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "obw/cycle_type.hpp"

namespace obw {

// Vertex label schemes for rotational 2-factors.
//   OneRot: labels in Z_{2n} plus infinity (and infinity' after extension).
//   TwoRot: labels in {0,1} x Z_n plus infinity (and infinity').
enum class Scheme { OneRot, TwoRot };

struct VertexLabel {
    enum class Kind : std::uint8_t { Finite, Inf, InfPrime };
    Kind kind = Kind::Finite;
    int bit = 0;    // TwoRot only: the {0,1} coordinate
    int value = 0;  // finite label, reduced mod scheme modulus

    static VertexLabel finite(int value, int bit = 0) { return {Kind::Finite, bit, value}; }
    static VertexLabel inf() { return {Kind::Inf, 0, 0}; }
    static VertexLabel inf_prime() { return {Kind::InfPrime, 0, 0}; }

    bool is_finite() const { return kind == Kind::Finite; }
    bool operator==(const VertexLabel&) const = default;
};

// A labeled 2-regular spanning graph: vertex-disjoint cycles, each length >=3,
// covering `order` distinct vertices.
struct TwoFactor {
    Scheme scheme = Scheme::OneRot;
    int modulus = 0;  // OneRot: 2n; TwoRot: n
    int order = 0;    // number of vertices
    std::vector<std::vector<VertexLabel>> cycles;

    CycleType cycle_type() const {
        std::vector<int> lens;
        for (const auto& c : cycles) lens.push_back(static_cast<int>(c.size()));
        return make_cycle_type(std::move(lens));
    }
};

struct Edge {
    int a = 0, b = 0;  // canonical integer vertices, unordered
};

// A candidate OP solution over canonical integer vertices 0..v-1.
// v odd: no one-factor and (v-1)/2 factors; v even: one-factor present.
struct Factorization {
    int order = 0;
    std::vector<std::vector<std::vector<int>>> factors;  // factor -> cycles -> vertices
    std::optional<std::vector<Edge>> one_factor;
};

// Multiset of modular differences; excludes any vertex of infinity type.
struct DiffMultiset {
    int modulus = 0;
    std::vector<int> counts;  // counts[d] = multiplicity of difference d

    explicit DiffMultiset(int m = 0) : modulus(m), counts(std::max(m, 0), 0) {}
    void add(int d) { counts[((d % modulus) + modulus) % modulus]++; }
    int count(int d) const { return counts[((d % modulus) + modulus) % modulus]; }
    int total() const { return std::accumulate(counts.begin(), counts.end(), 0); }
    bool operator==(const DiffMultiset&) const = default;
};

inline int mod_reduce(int x, int m) { return ((x % m) + m) % m; }

// Order of x in Z_m: the smallest positive u with x*u = 0 (mod m).
// element_order(0, m) == 1.
inline int element_order(int x, int m) {
    if (m <= 0) throw std::invalid_argument("element_order: modulus must be positive");
    int r = mod_reduce(x, m);
    return m / std::gcd(r, m);
}

// One-rot differences: every edge with both ends finite contributes both
// x-y and y-x mod 2n; edges at infinity contribute nothing.
inline DiffMultiset differences_one_rot(const TwoFactor& f) {
    if (f.scheme != Scheme::OneRot)
        throw std::invalid_argument("differences_one_rot: wrong scheme");
    DiffMultiset d(f.modulus);
    for (const auto& cyc : f.cycles) {
        int n = static_cast<int>(cyc.size());
        for (int i = 0; i < n; ++i) {
            const VertexLabel& a = cyc[i];
            const VertexLabel& b = cyc[(i + 1) % n];
            if (!a.is_finite() || !b.is_finite()) continue;
            d.add(a.value - b.value);
            d.add(b.value - a.value);
        }
    }
    return d;
}

struct TwoRotDiffs {
    DiffMultiset d00, d11, d01;  // d01 oriented bit-0 label minus bit-1 label
};

// Two-rot differences: same-bit edges contribute both signed differences;
// each mixed edge contributes exactly one difference, bit-0 minus bit-1.
inline TwoRotDiffs differences_two_rot(const TwoFactor& f) {
    if (f.scheme != Scheme::TwoRot)
        throw std::invalid_argument("differences_two_rot: wrong scheme");
    TwoRotDiffs d{DiffMultiset(f.modulus), DiffMultiset(f.modulus), DiffMultiset(f.modulus)};
    for (const auto& cyc : f.cycles) {
        int n = static_cast<int>(cyc.size());
        for (int i = 0; i < n; ++i) {
            const VertexLabel& a = cyc[i];
            const VertexLabel& b = cyc[(i + 1) % n];
            if (!a.is_finite() || !b.is_finite()) continue;
            if (a.bit == 0 && b.bit == 0) {
                d.d00.add(a.value - b.value);
                d.d00.add(b.value - a.value);
            } else if (a.bit == 1 && b.bit == 1) {
                d.d11.add(a.value - b.value);
                d.d11.add(b.value - a.value);
            } else if (a.bit == 0) {
                d.d01.add(a.value - b.value);
            } else {
                d.d01.add(b.value - a.value);
            }
        }
    }
    return d;
}

// Translation by g: infinity-type vertices fixed, finite labels shifted.
inline TwoFactor translate(const TwoFactor& f, int g) {
    TwoFactor out = f;
    for (auto& cyc : out.cycles)
        for (auto& v : cyc)
            if (v.is_finite()) v.value = mod_reduce(v.value + g, f.modulus);
    return out;
}

// Canonical integer relabeling used by the verifier and the file format.
//   OneRot: x -> x, inf -> 2n, inf' -> 2n+1
//   TwoRot: (0,x) -> x, (1,x) -> n+x, inf -> 2n, inf' -> 2n+1
inline int canonical_vertex(const VertexLabel& v, Scheme scheme, int modulus) {
    switch (v.kind) {
        case VertexLabel::Kind::Inf:
            return scheme == Scheme::OneRot ? modulus : 2 * modulus;
        case VertexLabel::Kind::InfPrime:
            return scheme == Scheme::OneRot ? modulus + 1 : 2 * modulus + 1;
        default:
            return scheme == Scheme::OneRot ? v.value : v.bit * modulus + v.value;
    }
}

inline std::vector<std::vector<int>> to_canonical_cycles(const TwoFactor& f) {
    std::vector<std::vector<int>> out;
    for (const auto& cyc : f.cycles) {
        std::vector<int> c;
        c.reserve(cyc.size());
        for (const auto& v : cyc) c.push_back(canonical_vertex(v, f.scheme, f.modulus));
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace obw
