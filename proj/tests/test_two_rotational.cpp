#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "obw/two_rotational.hpp"
#include "obw/verify.hpp"

using namespace obw;

namespace {

RotStructure structure_for(const char* type) {
    CycleType ct = parse_cycle_type(type);
    return make_structure(ct, (ct.order() - 1) / 2);
}

}  // namespace

TEST_CASE("structure layout hosts infinity in the longest cycle") {
    RotStructure st = structure_for("5,6");
    CHECK(st.lengths == std::vector<int>{5, 6});
    CHECK(st.host == 1);
    CHECK(st.finite_count == 10);
    CHECK(st.slot_ids[1].size() == 5);          // host path drops one slot for infinity
    CHECK(st.finite_edges.size() == 5 + 4);     // full 5-cycle + 4 path edges
    CHECK(st.cycle_edge_indices[0].size() == 5);
    CHECK(st.cycle_edge_indices[1].size() == 4);
}

TEST_CASE("pattern labeling for OP(5,6)") {
    RotStructure st = structure_for("5,6");
    auto bl = blp_solve_patterns(st, 5, 5);
    REQUIRE(bl.has_value());
    CHECK(blp_check(*bl));
    int zeros = 0;
    for (int b : bl->bits) zeros += (b == 0);
    CHECK(zeros == 5);
    CHECK(mixed_edge_count(st, bl->bits) == 5);
}

TEST_CASE("pattern labeling reduces a long single cycle by 4-blocks") {
    RotStructure st = structure_for("11");
    auto bl = blp_solve_patterns(st, 5, 5);
    REQUIRE(bl.has_value());
    CHECK(blp_check(*bl));
}

TEST_CASE("a valid binary labeling exists for 3^2,5 even though the OP does not") {
    RotStructure st = structure_for("3^2,5");
    auto bl = blp_solve_patterns(st, 5, 5);
    REQUIRE(bl.has_value());
    CHECK(blp_check(*bl));
}

TEST_CASE("blp_check rejects bad labelings") {
    RotStructure st = structure_for("5,6");
    BinaryLabeling all_zero{st, std::vector<int>(st.finite_count, 0)};
    CHECK(!blp_check(all_zero));

    auto good = blp_solve_patterns(st, 5, 5);
    REQUIRE(good.has_value());
    for (int i = 0; i < st.finite_count; ++i) {
        BinaryLabeling flipped = *good;
        flipped.bits[i] ^= 1;
        CHECK(!blp_check(flipped));  // class sizes break
    }
}

TEST_CASE("csp labeling path") {
    for (const char* type : {"5,6", "3", "7"}) {
        CAPTURE(type);
        CycleType ct = parse_cycle_type(type);
        int n = (ct.order() - 1) / 2;
        RotStructure st = make_structure(ct, n);
        auto bl = blp_solve_csp(st, n, n, 3);
        REQUIRE(bl.has_value());
        CHECK(blp_check(*bl));
    }
}

TEST_CASE("pattern path and csp path agree on feasibility for orders 11-23") {
    for (int v = 11; v <= 23; v += 4) {
        enumerate_cycle_types(v, 1, [&](const CycleType& ct) {
            CAPTURE(format_cycle_type(ct));
            int n = (ct.order() - 1) / 2;
            RotStructure st = make_structure(ct, n);
            auto pat = blp_solve_patterns(st, n, n);
            if (pat) CHECK(blp_check(*pat));
            auto csp = blp_solve_csp(st, n, n, 5);
            if (csp) CHECK(blp_check(*csp));
            CHECK(pat.has_value() == csp.has_value());
        });
    }
}

TEST_CASE("glp model shape for OP(5,6)") {
    RotStructure st = structure_for("5,6");
    auto bl = blp_solve_patterns(st, 5, 5);
    REQUIRE(bl.has_value());
    GlpModel gm = glp_build_model(*bl);
    CHECK(gm.label_vars.size() == 10);
    // 10 label vars + 4 + 4 same-bit diff vars + 5 mixed diff vars.
    CHECK(gm.model.domains.size() == 10 + 4 + 4 + 5);
}

TEST_CASE("solve OP(5,6) and check the difference sets") {
    TwoRotResult r = solve_two_rotational_odd(parse_cycle_type("5,6"), {20000.0, 1, -1, 4});
    REQUIRE(r.status == TwoRotResult::Status::Solved);
    const TwoFactor& f = *r.factor;
    CHECK(f.cycle_type() == parse_cycle_type("5,6"));
    TwoRotDiffs d = differences_two_rot(f);
    for (int x = 1; x < 5; ++x) {
        CHECK(d.d00.count(x) == 1);
        CHECK(d.d11.count(x) == 1);
    }
    CHECK(d.d00.count(0) == 0);
    CHECK(d.d11.count(0) == 0);
    for (int x = 0; x < 5; ++x) CHECK(d.d01.count(x) == 1);
}

TEST_CASE("expansion decomposes K11 and K15") {
    for (const char* type : {"5,6", "5^3", "3,5,7", "11"}) {
        CAPTURE(type);
        CycleType ct = parse_cycle_type(type);
        TwoRotResult r = solve_two_rotational_odd(ct, {30000.0, 2, -1, 4});
        REQUIRE(r.status == TwoRotResult::Status::Solved);
        Factorization fz = expand_two_rotational(*r.factor);
        CHECK(static_cast<int>(fz.factors.size()) == (ct.order() - 1) / 2);
        VerifyReport vr = verify_factorization(ct.order(), ct, fz);
        INFO(vr.violation);
        CHECK(vr.pass);
    }
}

TEST_CASE("single translate matches factors.translate") {
    TwoRotResult r = solve_two_rotational_odd(parse_cycle_type("5,6"), {20000.0, 3, -1, 4});
    REQUIRE(r.status == TwoRotResult::Status::Solved);
    Factorization fz = expand_two_rotational(*r.factor);
    CHECK(fz.factors[0] == to_canonical_cycles(translate(*r.factor, 1)));
}

TEST_CASE("known unsolvable guard") {
    CHECK_THROWS_AS(static_cast<void>(solve_two_rotational_odd(parse_cycle_type("3^2,5"))),
                    std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(solve_two_rotational_odd(parse_cycle_type("3,6"))),
                    std::invalid_argument);
}

TEST_CASE("order increment from an order-11 base") {
    CycleType base = parse_cycle_type("3,4^2");
    TwoRotResult r = solve_two_rotational_odd(base, {20000.0, 4, 3, 4});
    REQUIRE(r.status == TwoRotResult::Status::Solved);
    CycleType target = parse_cycle_type("4^3");
    Factorization fz = extend_two_rotational(*r.factor, target);
    REQUIRE(fz.one_factor.has_value());
    CHECK(fz.one_factor->size() == 6);
    VerifyReport vr = verify_factorization(12, target, fz);
    INFO(vr.violation);
    CHECK(vr.pass);
}

TEST_CASE("order increment into the host cycle") {
    CycleType base = parse_cycle_type("5,6");
    TwoRotResult r = solve_two_rotational_odd(base, {20000.0, 5, -1, 4});
    REQUIRE(r.status == TwoRotResult::Status::Solved);
    for (const char* t : {"5,7", "6^2"}) {
        CAPTURE(t);
        CycleType target = parse_cycle_type(t);
        Factorization fz = extend_two_rotational(*r.factor, target);
        VerifyReport vr = verify_factorization(12, target, fz);
        INFO(vr.violation);
        CHECK(vr.pass);
    }
}

TEST_CASE("solve across all order-15 instances") {
    enumerate_cycle_types(15, 1, [&](const CycleType& ct) {
        if (is_known_unsolvable(ct)) return;
        CAPTURE(format_cycle_type(ct));
        TwoRotResult r = solve_two_rotational_odd(ct, {30000.0, 6, -1, 4});
        REQUIRE(r.status == TwoRotResult::Status::Solved);
        Factorization fz = expand_two_rotational(*r.factor);
        CHECK(verify_factorization(15, ct, fz).pass);
    });
}
