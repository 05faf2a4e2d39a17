#pragma once

#include <string>
#include <vector>

#include "obw/cycle_type.hpp"
#include "obw/factors.hpp"

namespace obw {

struct VerifyReport {
    bool pass = false;
    std::string violation;  // first violation found, empty when pass

    static VerifyReport ok() { return {true, ""}; }
    static VerifyReport fail(std::string why) { return {false, std::move(why)}; }
};

// Checks that fz is a 2-factorization of K_v (v odd) or K_v - I (v even)
// into copies of `target`. Works on plain integers; never trusts solver
// metadata. Malformed input is a report outcome, not a fault.
inline VerifyReport verify_factorization(int v, const CycleType& target, const Factorization& fz) {
    if (v < 3) return VerifyReport::fail("order must be >= 3");
    if (fz.order != v) return VerifyReport::fail("record order does not match");
    if (target.order() != v) return VerifyReport::fail("cycle type order does not match");
    if (fz.factors.empty()) return VerifyReport::fail("no factors");

    int expected_factors = (v % 2 == 1) ? (v - 1) / 2 : (v - 2) / 2;
    if (static_cast<int>(fz.factors.size()) != expected_factors)
        return VerifyReport::fail("expected " + std::to_string(expected_factors) + " factors, got " +
                                  std::to_string(fz.factors.size()));
    if (v % 2 == 1 && fz.one_factor.has_value())
        return VerifyReport::fail("one-factor present for odd order");
    if (v % 2 == 0 && !fz.one_factor.has_value())
        return VerifyReport::fail("one-factor required for even order");

    // pair_count[a][b]: times the unordered pair {a,b} is covered.
    std::vector<std::vector<int>> pair_count(v, std::vector<int>(v, 0));
    auto add_edge = [&](int a, int b, const std::string& where) -> std::string {
        if (a < 0 || a >= v || b < 0 || b >= v) return "vertex out of range in " + where;
        if (a == b) return "self-loop in " + where;
        pair_count[std::min(a, b)][std::max(a, b)]++;
        return "";
    };

    for (size_t fi = 0; fi < fz.factors.size(); ++fi) {
        const auto& factor = fz.factors[fi];
        std::string where = "factor " + std::to_string(fi);
        std::vector<int> seen(v, 0);
        std::vector<int> lens;
        int covered = 0;
        for (const auto& cyc : factor) {
            if (cyc.size() < 3) return VerifyReport::fail("cycle shorter than 3 in " + where);
            lens.push_back(static_cast<int>(cyc.size()));
            for (int x : cyc) {
                if (x < 0 || x >= v) return VerifyReport::fail("vertex out of range in " + where);
                if (seen[x]++) return VerifyReport::fail("vertex repeated in " + where);
                ++covered;
            }
            for (size_t i = 0; i < cyc.size(); ++i) {
                std::string err = add_edge(cyc[i], cyc[(i + 1) % cyc.size()], where);
                if (!err.empty()) return VerifyReport::fail(err);
            }
        }
        if (covered != v) return VerifyReport::fail(where + " is not spanning");
        CycleType got = make_cycle_type(std::move(lens));
        if (!(got == target))
            return VerifyReport::fail(where + " has cycle type " + format_cycle_type(got) +
                                      ", expected " + format_cycle_type(target));
    }

    if (fz.one_factor) {
        std::vector<int> seen(v, 0);
        for (const Edge& e : *fz.one_factor) {
            if (e.a < 0 || e.a >= v || e.b < 0 || e.b >= v || e.a == e.b)
                return VerifyReport::fail("bad edge in one-factor");
            if (seen[e.a]++ || seen[e.b]++) return VerifyReport::fail("one-factor edges not disjoint");
            pair_count[std::min(e.a, e.b)][std::max(e.a, e.b)]++;
        }
        for (int x = 0; x < v; ++x)
            if (!seen[x]) return VerifyReport::fail("one-factor is not a perfect matching");
    }

    for (int a = 0; a < v; ++a)
        for (int b = a + 1; b < v; ++b) {
            if (pair_count[a][b] == 0)
                return VerifyReport::fail("pair {" + std::to_string(a) + "," + std::to_string(b) +
                                          "} not covered");
            if (pair_count[a][b] > 1)
                return VerifyReport::fail("pair {" + std::to_string(a) + "," + std::to_string(b) +
                                          "} covered twice");
        }
    return VerifyReport::ok();
}

}  // namespace obw
