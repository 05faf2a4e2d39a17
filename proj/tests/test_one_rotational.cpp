#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <set>

#include "obw/one_rotational.hpp"
#include "obw/verify.hpp"

using namespace obw;

namespace {

// Independent exhaustive oracle over all F*-labelings. Builds the quotient
// structure straight from the cycle type and recursively tries every label
// assignment; shares nothing with the CSP engine.
struct ExhaustiveFstar {
    int gamma = 0;
    std::vector<std::vector<int>> components;  // vertex ids per component
    std::vector<std::array<int, 3>> edges;     // (a, b, offset): diff (a+off) - b
    std::vector<int> flat_order;               // assignment order

    explicit ExhaustiveFstar(const CycleType& ct) {
        gamma = (ct.order() - 1) / 2;
        int next = 0;
        auto new_component = [&](int size) {
            std::vector<int> ids(size);
            for (int& id : ids) id = next++;
            components.push_back(ids);
            return components.back();
        };
        int l1 = -1;
        for (auto [len, mult] : ct.parts)
            if (len % 2 == 1 && mult % 2 == 1) l1 = len;
        REQUIRE(l1 > 0);  // parity condition must hold for the structure to exist
        {
            auto ids = new_component((l1 - 1) / 2);
            for (size_t i = 0; i + 1 < ids.size(); ++i)
                edges.push_back({ids[i + 1], ids[i], 0});
        }
        for (auto [len, mult] : ct.parts) {
            int reps = len % 2 == 1 ? (mult - (len == l1 ? 1 : 0)) / 2 : mult / 2;
            for (int r = 0; r < reps; ++r) {
                auto ids = new_component(len);
                for (int i = 0; i < len; ++i) edges.push_back({ids[(i + 1) % len], ids[i], 0});
            }
            if (len % 2 == 0 && mult % 2 == 1) {
                auto ids = new_component(len / 2);
                for (size_t i = 0; i + 1 < ids.size(); ++i)
                    edges.push_back({ids[i + 1], ids[i], 0});
                edges.push_back({ids.front(), ids.back(), gamma});  // virtual closure
            }
        }
        for (const auto& comp : components)
            for (int id : comp) flat_order.push_back(id);
    }

    long long count_labelings(long long stop_after = -1) const {
        int n = static_cast<int>(flat_order.size());
        std::vector<int> label(n, -1);
        std::vector<char> label_used(2 * gamma, 0), diff_used(2 * gamma, 0), pair_used(gamma, 0);
        long long found = 0;

        auto place_diffs = [&](int vertex, std::vector<int>& touched) {
            for (const auto& e : edges) {
                int a = e[0], b = e[1], off = e[2];
                if (a != vertex && b != vertex) continue;
                if (label[a] < 0 || label[b] < 0) continue;
                int d = ((label[a] + off - label[b]) % (2 * gamma) + 2 * gamma) % (2 * gamma);
                int nd = (2 * gamma - d) % (2 * gamma);
                if (d == 0 || d == gamma || diff_used[d] || diff_used[nd] || d == nd) return false;
                diff_used[d] = diff_used[nd] = 1;
                touched.push_back(d);
                touched.push_back(nd);
            }
            return true;
        };

        std::function<bool(int)> rec = [&](int pos) -> bool {
            if (pos == n) {
                ++found;
                return stop_after > 0 && found >= stop_after;
            }
            int v = flat_order[pos];
            for (int lab = 0; lab < 2 * gamma; ++lab) {
                if (label_used[lab] || pair_used[lab % gamma]) continue;
                label[v] = lab;
                label_used[lab] = 1;
                pair_used[lab % gamma] = 1;
                std::vector<int> touched;
                if (place_diffs(v, touched)) {
                    if (rec(pos + 1)) return true;
                }
                for (int d : touched) diff_used[d] = 0;
                label[v] = -1;
                label_used[lab] = 0;
                pair_used[lab % gamma] = 0;
            }
            return false;
        };
        rec(0);
        return found;
    }
};

}  // namespace

TEST_CASE("check_necessary") {
    Eligibility a = check_necessary(parse_cycle_type("3,6"));
    CHECK(a.ok);

    Eligibility b = check_necessary(parse_cycle_type("3^3,4"));
    CHECK(!b.ok);
    CHECK(b.reason == Eligibility::Reason::FailsMod4);

    Eligibility c = check_necessary(parse_cycle_type("3^2,7"));
    CHECK(c.ok);

    Eligibility d = check_necessary(parse_cycle_type("3,5,9,4^2"));  // order 25, three odd-odd
    CHECK(!d.ok);
    CHECK(d.reason == Eligibility::Reason::FailsParity);

    CHECK_THROWS_AS(static_cast<void>(check_necessary(parse_cycle_type("3^2,5"))),
                    std::invalid_argument);
}

TEST_CASE("reduce_to_fstar shapes") {
    ReducedGraph rg = reduce_to_fstar(parse_cycle_type("5,3^2,4^2,6"));
    CHECK(rg.gamma == 12);
    CHECK(rg.l1 == 5);
    CHECK(rg.inf_chain == 2);
    CHECK(rg.rep_cycles == std::vector<int>{3, 4});
    CHECK(rg.chains == std::vector<int>{3});
    CHECK(rg.finite_vertices() == 12);

    ReducedGraph r2 = reduce_to_fstar(parse_cycle_type("3^3"));
    CHECK(r2.gamma == 4);
    CHECK(r2.inf_chain == 1);
    CHECK(r2.rep_cycles == std::vector<int>{3});
    CHECK(r2.chains.empty());

    ReducedGraph r3 = reduce_to_fstar(parse_cycle_type("3,6"));
    CHECK(r3.inf_chain == 1);
    CHECK(r3.rep_cycles.empty());
    CHECK(r3.chains == std::vector<int>{3});

    CHECK_THROWS(static_cast<void>(reduce_to_fstar(parse_cycle_type("3^3,4"))));
}

TEST_CASE("build_fstar_model variable counts") {
    FstarModel a = build_fstar_model(reduce_to_fstar(parse_cycle_type("5,3^2,4^2,6")));
    CHECK(a.vertex_var_count == 12);
    CHECK(a.diff_var_count == 22);  // 2*gamma - 2

    FstarModel b = build_fstar_model(reduce_to_fstar(parse_cycle_type("3^3")));
    CHECK(b.vertex_var_count == 4);
    CHECK(b.diff_var_count == 6);

    FstarModel c = build_fstar_model(reduce_to_fstar(parse_cycle_type("5")));
    CHECK(c.vertex_var_count == 2);
    CHECK(c.diff_var_count == 2);

    for (int v : {9, 13, 17, 21}) {
        enumerate_cycle_types(v, 1, [&](const CycleType& ct) {
            if (ct.order() % 4 != 1 || !check_necessary(ct).ok) return;
            FstarModel fm = build_fstar_model(reduce_to_fstar(ct));
            CHECK(fm.diff_var_count == 2 * fm.rg.gamma - 2);
            CHECK(fm.vertex_var_count == fm.rg.gamma);
        });
    }
}

TEST_CASE("solve and lift OP(3,6): starter conditions") {
    OneRotResult r = solve_one_rotational(parse_cycle_type("3,6"), {10000.0, 1, std::nullopt});
    REQUIRE(r.status == OneRotResult::Status::Solved);
    const TwoFactor& f = *r.factor;
    CHECK(f.cycle_type() == parse_cycle_type("3,6"));
    // F + 4 = F and every nonzero difference has multiplicity exactly 2.
    CHECK(edge_set(translate(f, 4)) == edge_set(f));
    DiffMultiset d = differences_one_rot(f);
    for (int x = 1; x < 8; ++x) CHECK(d.count(x) == 2);
}

TEST_CASE("lift of 3^3 covers Z8 differences twice") {
    OneRotResult r = solve_one_rotational(parse_cycle_type("3^3"), {10000.0, 1, std::nullopt});
    REQUIRE(r.status == OneRotResult::Status::Solved);
    CHECK(r.factor->cycles.size() == 3);
    DiffMultiset d = differences_one_rot(*r.factor);
    for (int x = 1; x < 8; ++x) CHECK(d.count(x) == 2);
    CHECK(r.factor->cycle_type() == parse_cycle_type("3^3"));
}

TEST_CASE("expand decomposes the complete graph") {
    for (const char* type : {"3,6", "3^3", "9"}) {
        CAPTURE(type);
        CycleType ct = parse_cycle_type(type);
        OneRotResult r = solve_one_rotational(ct, {10000.0, 2, std::nullopt});
        REQUIRE(r.status == OneRotResult::Status::Solved);
        Factorization fz = expand_one_rotational(*r.factor);
        CHECK(fz.factors.size() == 4);
        VerifyReport vr = verify_factorization(9, ct, fz);
        INFO(vr.violation);
        CHECK(vr.pass);
    }
}

TEST_CASE("translating the whole expansion permutes its factors") {
    OneRotResult r = solve_one_rotational(parse_cycle_type("3,6"), {10000.0, 3, std::nullopt});
    REQUIRE(r.status == OneRotResult::Status::Solved);
    Factorization a = expand_one_rotational(*r.factor);
    Factorization b = expand_one_rotational(translate(*r.factor, 1));
    auto normalize = [](const Factorization& fz) {
        std::set<std::set<std::pair<int, int>>> out;
        for (const auto& factor : fz.factors) {
            std::set<std::pair<int, int>> edges;
            for (const auto& cyc : factor)
                for (size_t i = 0; i < cyc.size(); ++i) {
                    int x = cyc[i], y = cyc[(i + 1) % cyc.size()];
                    edges.insert({std::min(x, y), std::max(x, y)});
                }
            out.insert(std::move(edges));
        }
        return out;
    };
    CHECK(normalize(a) == normalize(b));
}

TEST_CASE("solve on every eligible instance of orders 9, 13, 17") {
    // The parity and mod-4 conditions are necessary, not sufficient: when the
    // search exhausts, the independent oracle must agree that no labeling
    // exists at all.
    int solved = 0, searched_out = 0;
    for (int v : {9, 13, 17}) {
        enumerate_cycle_types(v, 1, [&](const CycleType& ct) {
            if (is_known_unsolvable(ct) || !check_necessary(ct).ok) return;
            CAPTURE(format_cycle_type(ct));
            OneRotResult r = solve_one_rotational(ct, {20000.0, 5, std::nullopt});
            REQUIRE(r.status != OneRotResult::Status::BudgetExhausted);
            if (r.status == OneRotResult::Status::Solved) {
                ++solved;
                Factorization fz = expand_one_rotational(*r.factor);
                CHECK(verify_factorization(v, ct, fz).pass);
            } else {
                ++searched_out;
                ExhaustiveFstar oracle(ct);
                CHECK(oracle.count_labelings() == 0);
            }
        });
    }
    CHECK(solved >= 12);
    CHECK(searched_out <= 2);  // 3^4,5 at order 17 is the known case
}

TEST_CASE("the worked order-25 instance solves and lifts") {
    CycleType ct = parse_cycle_type("5,3^2,4^2,6");
    OneRotResult r = solve_one_rotational(ct, {20000.0, 4, std::nullopt});
    REQUIRE(r.status == OneRotResult::Status::Solved);
    CHECK(r.factor->cycle_type() == ct);
    CHECK(edge_set(translate(*r.factor, 12)) == edge_set(*r.factor));
    Factorization fz = expand_one_rotational(*r.factor);
    CHECK(fz.factors.size() == 12);
    CHECK(verify_factorization(25, ct, fz).pass);
}

TEST_CASE("wrong residue class is rejected") {
    CHECK_THROWS_AS(static_cast<void>(solve_one_rotational(parse_cycle_type("3^2,5"))),
                    std::invalid_argument);
}

TEST_CASE("necessary-condition failures are infeasible without search") {
    OneRotResult r = solve_one_rotational(parse_cycle_type("3^3,4"));
    CHECK(r.status == OneRotResult::Status::Infeasible);
    CHECK(!r.eligibility.ok);
}

TEST_CASE("exhaustive oracle agrees with the necessary conditions at order 13") {
    std::vector<std::string> violating;
    enumerate_cycle_types(13, 1, [&](const CycleType& ct) {
        Eligibility e = check_necessary(ct);
        if (!e.ok && e.reason == Eligibility::Reason::FailsMod4)
            violating.push_back(format_cycle_type(ct));
    });
    // Exactly the order-13 types whose infinity cycle is forced to length 3
    // while 2t = 6 is not divisible by 4.
    std::sort(violating.begin(), violating.end());
    CHECK(violating == std::vector<std::string>{"3,10", "3,4,6", "3,5^2", "3^3,4"});
    for (const std::string& s : violating) {
        CAPTURE(s);
        ExhaustiveFstar oracle(parse_cycle_type(s));
        CHECK(oracle.count_labelings() == 0);
    }
    // Sanity: eligible instances admit labelings.
    ExhaustiveFstar ok(parse_cycle_type("3,6"));
    CHECK(ok.count_labelings(1) >= 1);
    ExhaustiveFstar ok13(parse_cycle_type("3^2,7"));
    CHECK(ok13.count_labelings(1) >= 1);
}

TEST_CASE("infinity-cycle extension is always available") {
    // The turnaround difference n has order 2, so incrementing the infinity
    // cycle length never needs a re-solve.
    OneRotResult r = solve_one_rotational(parse_cycle_type("9"), {10000.0, 7, std::nullopt});
    REQUIRE(r.status == OneRotResult::Status::Solved);
    CycleType target = parse_cycle_type("10");
    Factorization fz = extend_to_even(*r.factor, target);
    CHECK(fz.factors.size() == 4);
    REQUIRE(fz.one_factor.has_value());
    CHECK(fz.one_factor->size() == 5);
    CHECK(verify_factorization(10, target, fz).pass);
}

TEST_CASE("extension rejects targets not one increment away") {
    OneRotResult r = solve_one_rotational(parse_cycle_type("9"), {10000.0, 7, std::nullopt});
    REQUIRE(r.status == OneRotResult::Status::Solved);
    CHECK_THROWS_AS(static_cast<void>(extend_to_even(*r.factor, parse_cycle_type("11"))),
                    std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(extend_to_even(*r.factor, parse_cycle_type("3,7"))),
                    std::invalid_argument);
}

TEST_CASE("targeted requirement lands a difference in a chosen component") {
    CycleType base = parse_cycle_type("3,18,4");
    ReducedGraph rg = reduce_to_fstar(base);
    REQUIRE(rg.chains.size() == 2);  // 18 -> 9-vertex chain, 4 -> 2-vertex chain
    // Force difference 4 (order 6 in Z24, which is 2 mod 4) into the 9-chain.
    int chain_idx = rg.chains[0] == 9 ? 0 : 1;
    FstarRequirement req{FstarRequirement::Component::Chain, chain_idx, 4};
    OneRotResult r = solve_one_rotational(base, {30000.0, 11, req});
    REQUIRE(r.status == OneRotResult::Status::Solved);
    Factorization fz = extend_to_even(*r.factor, parse_cycle_type("3,19,4"));
    CHECK(verify_factorization(26, parse_cycle_type("3,19,4"), fz).pass);
}
