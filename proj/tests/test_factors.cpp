#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "obw/factors.hpp"
#include "obw/verify.hpp"

using namespace obw;

namespace {

// Random labeled 2-regular graph over a scheme, for property tests.
TwoFactor random_factor(std::mt19937& rng, Scheme scheme) {
    int n = 4 + static_cast<int>(rng() % 5);  // modulus
    int modulus = scheme == Scheme::OneRot ? 2 * n : n;
    int finite = scheme == Scheme::OneRot ? 2 * n : 2 * n;
    std::vector<int> perm(finite);
    for (int i = 0; i < finite; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);

    TwoFactor f;
    f.scheme = scheme;
    f.modulus = modulus;
    f.order = finite + 1;
    size_t pos = 0;
    std::vector<VertexLabel> all;
    all.push_back(VertexLabel::inf());
    for (int p : perm) {
        if (scheme == Scheme::OneRot)
            all.push_back(VertexLabel::finite(p));
        else
            all.push_back(VertexLabel::finite(p % n, p / n));
    }
    while (pos < all.size()) {
        size_t remaining = all.size() - pos;
        size_t len = remaining <= 5 ? remaining : 3 + rng() % 3;
        if (remaining - len > 0 && remaining - len < 3) len = remaining;
        f.cycles.emplace_back(all.begin() + pos, all.begin() + pos + len);
        pos += len;
    }
    return f;
}

}  // namespace

TEST_CASE("element_order") {
    CHECK(element_order(4, 8) == 2);
    for (int n = 1; n <= 12; ++n) CHECK(element_order(n, 2 * n) == 2);

    // Direct-scan oracle: smallest u with x*u = 0 mod m.
    auto scan = [](int x, int m) {
        for (int u = 1;; ++u)
            if ((x * u) % m == 0) return u;
    };
    CHECK(element_order(3, 12) == 4);
    CHECK(scan(3, 12) == 4);
    for (int m = 1; m <= 40; ++m)
        for (int x = 0; x < m; ++x) CHECK(element_order(x, m) == scan(x, m));
    CHECK(element_order(0, 7) == 1);
    CHECK_THROWS(element_order(1, 0));
}

TEST_CASE("one-rot differences of a single edge") {
    TwoFactor f;
    f.scheme = Scheme::OneRot;
    f.modulus = 8;
    f.order = 9;
    f.cycles = {{VertexLabel::finite(2), VertexLabel::finite(1), VertexLabel::inf()}};
    DiffMultiset d = differences_one_rot(f);
    // Edge {2,1} contributes 1 and 7; edges at infinity contribute nothing.
    CHECK(d.count(1) == 1);
    CHECK(d.count(7) == 1);
    CHECK(d.total() == 2);
}

TEST_CASE("factor with only infinity-incident edges has empty differences") {
    TwoFactor f;
    f.scheme = Scheme::OneRot;
    f.modulus = 4;
    f.order = 5;
    f.cycles = {{VertexLabel::inf(), VertexLabel::finite(0), VertexLabel::inf_prime(),
                 VertexLabel::finite(1)}};
    CHECK(differences_one_rot(f).total() == 0);
}

TEST_CASE("translate is a group action fixing infinity") {
    std::mt19937 rng(7);
    for (int it = 0; it < 50; ++it) {
        TwoFactor f = random_factor(rng, Scheme::OneRot);
        int a = rng() % f.modulus, b = rng() % f.modulus;
        TwoFactor t0 = translate(f, 0);
        CHECK(t0.cycles == f.cycles);
        TwoFactor lhs = translate(translate(f, a), b);
        TwoFactor rhs = translate(f, a + b);
        CHECK(lhs.cycles == rhs.cycles);
    }
}

TEST_CASE("differences are translation invariant (both schemes)") {
    std::mt19937 rng(11);
    for (int it = 0; it < 50; ++it) {
        TwoFactor f = random_factor(rng, Scheme::OneRot);
        int g = rng() % f.modulus;
        CHECK(differences_one_rot(translate(f, g)) == differences_one_rot(f));

        TwoFactor h = random_factor(rng, Scheme::TwoRot);
        int g2 = rng() % h.modulus;
        TwoRotDiffs d1 = differences_two_rot(h);
        TwoRotDiffs d2 = differences_two_rot(translate(h, g2));
        CHECK(d1.d00 == d2.d00);
        CHECK(d1.d11 == d2.d11);
        CHECK(d1.d01 == d2.d01);
    }
}

TEST_CASE("one-rot difference multisets are symmetric under negation") {
    std::mt19937 rng(13);
    for (int it = 0; it < 50; ++it) {
        TwoFactor f = random_factor(rng, Scheme::OneRot);
        DiffMultiset d = differences_one_rot(f);
        for (int x = 0; x < f.modulus; ++x) CHECK(d.count(x) == d.count(f.modulus - x));
    }
}

TEST_CASE("two-rot mixed differences are oriented bit0 minus bit1") {
    TwoFactor f;
    f.scheme = Scheme::TwoRot;
    f.modulus = 5;
    f.order = 11;
    f.cycles = {{VertexLabel::finite(2, 0), VertexLabel::finite(4, 1), VertexLabel::finite(1, 1)}};
    TwoRotDiffs d = differences_two_rot(f);
    CHECK(d.d01.count(mod_reduce(2 - 4, 5)) == 1);  // (0,2)-(1,4)
    CHECK(d.d01.count(mod_reduce(2 - 1, 5)) == 1);  // (1,1)-(0,2)
    CHECK(d.d01.total() == 2);
    CHECK(d.d11.count(3) == 1);
    CHECK(d.d11.count(2) == 1);
}

TEST_CASE("verifier rejects structural violations") {
    // Double cover: duplicate factor.
    Factorization fz;
    fz.order = 9;
    std::vector<std::vector<int>> f1 = {{0, 1, 2}, {3, 4, 5, 6, 7, 8}};
    fz.factors = {f1, f1, f1, f1};
    VerifyReport r = verify_factorization(9, parse_cycle_type("3,6"), fz);
    CHECK(!r.pass);
    CHECK(r.violation.find("covered twice") != std::string::npos);

    // Missing one-factor for even order.
    Factorization f6;
    f6.order = 6;
    f6.factors = {{{0, 1, 2, 3, 4, 5}}, {{0, 2, 4, 1, 3, 5}}};
    VerifyReport r6 = verify_factorization(6, parse_cycle_type("6"), f6);
    CHECK(!r6.pass);
    CHECK(r6.violation.find("one-factor required") != std::string::npos);

    // Wrong factor count.
    Factorization fz2;
    fz2.order = 9;
    fz2.factors = {f1};
    CHECK(!verify_factorization(9, parse_cycle_type("3,6"), fz2).pass);

    // Wrong cycle type inside a factor.
    Factorization fz3;
    fz3.order = 9;
    fz3.factors = {{{0, 1, 2, 3}, {4, 5, 6, 7, 8}},
                   {{0, 2, 4, 6}, {1, 3, 5, 7, 8}},
                   {{0, 3, 6, 1}, {2, 4, 7, 5, 8}},
                   {{0, 4, 8, 1}, {2, 5, 3, 6, 7}}};
    VerifyReport r3 = verify_factorization(9, parse_cycle_type("3,6"), fz3);
    CHECK(!r3.pass);
    CHECK(r3.violation.find("cycle type") != std::string::npos);
}

TEST_CASE("canonical relabeling") {
    CHECK(canonical_vertex(VertexLabel::finite(3), Scheme::OneRot, 8) == 3);
    CHECK(canonical_vertex(VertexLabel::inf(), Scheme::OneRot, 8) == 8);
    CHECK(canonical_vertex(VertexLabel::inf_prime(), Scheme::OneRot, 8) == 9);
    CHECK(canonical_vertex(VertexLabel::finite(3, 0), Scheme::TwoRot, 5) == 3);
    CHECK(canonical_vertex(VertexLabel::finite(3, 1), Scheme::TwoRot, 5) == 8);
    CHECK(canonical_vertex(VertexLabel::inf(), Scheme::TwoRot, 5) == 10);
    CHECK(canonical_vertex(VertexLabel::inf_prime(), Scheme::TwoRot, 5) == 11);
}
