#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "obw/csp.hpp"
#include "obw/cycle_type.hpp"
#include "obw/factors.hpp"

namespace obw {

// Asymmetric quotient F* of a 2-factor under the translation-by-n symmetry:
// one chain holding infinity, one representative cycle per symmetric pair,
// and one open chain per unpaired even length.
struct ReducedGraph {
    int gamma = 0;                // 2t; labels live in Z_{2*gamma}
    int l1 = 0;                   // length of the infinity cycle in F (odd)
    int inf_chain = 0;            // finite vertices of the infinity chain, (l1-1)/2
    std::vector<int> rep_cycles;  // representative cycle lengths
    std::vector<int> chains;      // finite vertices per leftover even cycle, m_j/2

    int finite_vertices() const {
        int n = inf_chain;
        for (int l : rep_cycles) n += l;
        for (int m : chains) n += m;
        return n;
    }
};

struct Eligibility {
    enum class Reason { None, FailsParity, FailsMod4 };
    bool ok = false;
    Reason reason = Reason::None;
};

// Necessary conditions for a 1-rotational solution of order 4t+1 (n = 2t):
// exactly one odd length with odd multiplicity, and if that length is 3 the
// half-order 2t must be divisible by 4.
inline Eligibility check_necessary(const CycleType& ct) {
    if (ct.order() % 4 != 1)
        throw std::invalid_argument("check_necessary: order must be 1 mod 4");
    int odd_odd = 0, the_length = 0;
    for (auto [len, mult] : ct.parts)
        if (len % 2 == 1 && mult % 2 == 1) {
            ++odd_odd;
            the_length = len;
        }
    if (odd_odd != 1) return {false, Eligibility::Reason::FailsParity};
    int n = (ct.order() - 1) / 2;  // = 2t
    if (the_length == 3 && n % 4 != 0) return {false, Eligibility::Reason::FailsMod4};
    return {true, Eligibility::Reason::None};
}

inline ReducedGraph reduce_to_fstar(const CycleType& ct) {
    Eligibility e = check_necessary(ct);
    if (!e.ok) throw std::invalid_argument("reduce_to_fstar: necessary conditions fail");
    ReducedGraph rg;
    rg.gamma = (ct.order() - 1) / 2;
    for (auto [len, mult] : ct.parts) {
        if (len % 2 == 1) {
            int pairs = mult / 2;
            if (mult % 2 == 1) {
                rg.l1 = len;
                rg.inf_chain = (len - 1) / 2;
            }
            for (int i = 0; i < pairs; ++i) rg.rep_cycles.push_back(len);
        } else {
            for (int i = 0; i < mult / 2; ++i) rg.rep_cycles.push_back(len);
            if (mult % 2 == 1) rg.chains.push_back(len / 2);
        }
    }
    return rg;
}

struct FstarModel {
    CspModel model;
    ReducedGraph rg;
    // Vertex variable ids per component.
    std::vector<int> inf_chain_vars;
    std::vector<std::vector<int>> cycle_vars;
    std::vector<std::vector<int>> chain_vars;
    // Difference variable ids per component.
    std::vector<int> inf_chain_diffs;
    std::vector<std::vector<int>> cycle_diffs;
    std::vector<std::vector<int>> chain_diffs;
    int vertex_var_count = 0;
    int diff_var_count = 0;
};

// Extra requirement used when a derived order needs a specific difference to
// land inside a specific component (exactly once, given the global
// alldifferent over differences).
struct FstarRequirement {
    enum class Component { RepCycle, Chain };
    Component comp;
    int index = 0;  // index into rep_cycles / chains
    int diff_value = 0;
};

inline FstarModel build_fstar_model(const ReducedGraph& rg,
                                    const std::optional<FstarRequirement>& req = std::nullopt) {
    FstarModel fm;
    fm.rg = rg;
    CspModel& m = fm.model;
    int gamma = rg.gamma;
    int mod = 2 * gamma;
    if (mod > Domain::kMax)
        throw std::invalid_argument("build_fstar_model: order too large for engine domains");

    Domain vdom = Domain::range(0, mod);
    Domain ddom = Domain::range(1, mod);
    ddom.erase(gamma);

    std::vector<int> all_vertex, all_diff;
    auto new_vertex = [&] {
        int id = m.add_var(vdom);
        all_vertex.push_back(id);
        return id;
    };
    auto new_diff = [&] {
        int id = m.add_var(ddom);
        all_diff.push_back(id);
        return id;
    };
    // Both signed differences of the edge (a, b); `extra` shifts a by +extra.
    auto link_edge = [&](int a, int b, int extra, std::vector<int>& sink) {
        int fwd = new_diff();
        m.add({Constraint::Kind::ModDiffLink, {fwd, a, b}, 0, 0, false, mod, extra, 0});
        sink.push_back(fwd);
        int bwd = new_diff();
        m.add({Constraint::Kind::ModDiffLink, {bwd, b, a}, 0, 0, false, mod, -extra, 0});
        sink.push_back(bwd);
    };

    for (int i = 0; i < rg.inf_chain; ++i) fm.inf_chain_vars.push_back(new_vertex());
    for (int len : rg.rep_cycles) {
        std::vector<int> vars;
        for (int i = 0; i < len; ++i) vars.push_back(new_vertex());
        fm.cycle_vars.push_back(std::move(vars));
    }
    for (int len : rg.chains) {
        std::vector<int> vars;
        for (int i = 0; i < len; ++i) vars.push_back(new_vertex());
        fm.chain_vars.push_back(std::move(vars));
    }

    for (int i = 0; i + 1 < rg.inf_chain; ++i)
        link_edge(fm.inf_chain_vars[i + 1], fm.inf_chain_vars[i], 0, fm.inf_chain_diffs);
    for (auto& vars : fm.cycle_vars) {
        fm.cycle_diffs.emplace_back();
        int len = static_cast<int>(vars.size());
        for (int i = 0; i < len; ++i)
            link_edge(vars[(i + 1) % len], vars[i], 0, fm.cycle_diffs.back());
    }
    for (auto& vars : fm.chain_vars) {
        fm.chain_diffs.emplace_back();
        int len = static_cast<int>(vars.size());
        for (int i = 0; i + 1 < len; ++i) link_edge(vars[i + 1], vars[i], 0, fm.chain_diffs.back());
        // Virtual closure: phi = omega_1 + gamma, differences +-(phi - omega_last).
        link_edge(vars[0], vars[len - 1], gamma, fm.chain_diffs.back());
    }

    m.add({Constraint::Kind::AllDifferent, all_vertex});
    m.add({Constraint::Kind::HalfPairUse, all_vertex, 0, 0, false, mod, 0, gamma});
    m.add({Constraint::Kind::AllDifferent, all_diff});
    // Translation symmetry: pin the first finite vertex of the infinity chain.
    m.add({Constraint::Kind::Fix, {fm.inf_chain_vars[0]}, 0});
    // Component symmetries. Every representative cycle tolerates rotation,
    // reflection and a shift by gamma (it swaps with its translate); chains
    // tolerate reversal and the gamma shift. Components of equal size and
    // kind are interchangeable.
    Domain low_half = Domain::range(0, gamma);
    for (auto& vars : fm.cycle_vars) {
        int len = static_cast<int>(vars.size());
        for (int i = 1; i < len; ++i) m.add({Constraint::Kind::Less, {vars[0], vars[i]}});
        if (len >= 3) m.add({Constraint::Kind::Less, {vars[1], vars[len - 1]}});
        m.domains[vars[0]].intersect(low_half);
    }
    for (auto& vars : fm.chain_vars) {
        if (vars.size() >= 2) m.add({Constraint::Kind::Less, {vars[0], vars.back()}});
        m.domains[vars[0]].intersect(low_half);
    }
    for (size_t i = 0; i + 1 < fm.cycle_vars.size(); ++i)
        if (rg.rep_cycles[i] == rg.rep_cycles[i + 1])
            m.add({Constraint::Kind::Less, {fm.cycle_vars[i][0], fm.cycle_vars[i + 1][0]}});
    for (size_t i = 0; i + 1 < fm.chain_vars.size(); ++i)
        if (rg.chains[i] == rg.chains[i + 1])
            m.add({Constraint::Kind::Less, {fm.chain_vars[i][0], fm.chain_vars[i + 1][0]}});
    m.decision_vars = all_vertex;  // differences follow by propagation
    m.branch_order = CspModel::BranchOrder::Static;

    if (req) {
        const std::vector<int>& diffs = req->comp == FstarRequirement::Component::RepCycle
                                            ? fm.cycle_diffs[req->index]
                                            : fm.chain_diffs[req->index];
        m.add({Constraint::Kind::Cardinality, diffs, req->diff_value, 1, false});
    }

    fm.vertex_var_count = static_cast<int>(all_vertex.size());
    fm.diff_var_count = static_cast<int>(all_diff.size());
    return fm;
}

// Inverse of the reduction: rebuild the starter 2-factor from an F* labeling.
inline TwoFactor lift_fstar_labeling(const FstarModel& fm, const std::vector<int>& assignment) {
    const ReducedGraph& rg = fm.rg;
    int gamma = rg.gamma;
    TwoFactor f;
    f.scheme = Scheme::OneRot;
    f.modulus = 2 * gamma;  // 2n with n = 2t = gamma
    f.order = f.modulus + 1;

    auto val = [&](int var) { return assignment[var]; };

    // Infinity cycle: (inf, c_0..c_{m-1}, c_{m-1}+g, ..., c_0+g).
    std::vector<VertexLabel> inf_cycle;
    inf_cycle.push_back(VertexLabel::inf());
    for (int v : fm.inf_chain_vars) inf_cycle.push_back(VertexLabel::finite(val(v)));
    for (auto it = fm.inf_chain_vars.rbegin(); it != fm.inf_chain_vars.rend(); ++it)
        inf_cycle.push_back(VertexLabel::finite(mod_reduce(val(*it) + gamma, f.modulus)));
    f.cycles.push_back(std::move(inf_cycle));

    // Each representative cycle K lifts to K and K+gamma.
    for (const auto& vars : fm.cycle_vars) {
        std::vector<VertexLabel> k, kg;
        for (int v : vars) {
            k.push_back(VertexLabel::finite(val(v)));
            kg.push_back(VertexLabel::finite(mod_reduce(val(v) + gamma, f.modulus)));
        }
        f.cycles.push_back(std::move(k));
        f.cycles.push_back(std::move(kg));
    }

    // Each chain lifts to the rotation-symmetric cycle (w_0..w_{m-1}, w_0+g..).
    for (const auto& vars : fm.chain_vars) {
        std::vector<VertexLabel> c;
        for (int v : vars) c.push_back(VertexLabel::finite(val(v)));
        for (int v : vars) c.push_back(VertexLabel::finite(mod_reduce(val(v) + gamma, f.modulus)));
        f.cycles.push_back(std::move(c));
    }
    return f;
}

inline std::vector<std::pair<int, int>> edge_set(const TwoFactor& f) {
    std::vector<std::pair<int, int>> edges;
    for (const auto& cyc : f.cycles) {
        int n = static_cast<int>(cyc.size());
        for (int i = 0; i < n; ++i) {
            int a = canonical_vertex(cyc[i], f.scheme, f.modulus);
            int b = canonical_vertex(cyc[(i + 1) % n], f.scheme, f.modulus);
            edges.push_back({std::min(a, b), std::max(a, b)});
        }
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

// Conditions of the 1-rotational existence theorem: full vertex set, every
// nonzero residue twice among the differences, and invariance under +n.
inline bool satisfies_one_rot_conditions(const TwoFactor& f) {
    if (f.scheme != Scheme::OneRot) return false;
    int two_n = f.modulus;
    std::vector<int> seen(two_n, 0);
    int infs = 0, total = 0;
    for (const auto& cyc : f.cycles)
        for (const auto& v : cyc) {
            ++total;
            if (v.kind == VertexLabel::Kind::Inf)
                ++infs;
            else if (v.kind == VertexLabel::Kind::Finite)
                seen[v.value]++;
            else
                return false;
        }
    if (infs != 1 || total != two_n + 1) return false;
    for (int x = 0; x < two_n; ++x)
        if (seen[x] != 1) return false;
    DiffMultiset d = differences_one_rot(f);
    for (int x = 1; x < two_n; ++x)
        if (d.count(x) != 2) return false;
    int n = two_n / 2;
    return edge_set(translate(f, n)) == edge_set(f);
}

struct OneRotOptions {
    double budget_ms = 0.0;  // 0: default |V(F*)|/20 seconds
    std::uint64_t seed = 0;
    std::optional<FstarRequirement> requirement;
};

struct OneRotResult {
    enum class Status { Solved, Infeasible, BudgetExhausted, NotEligible };
    Status status;
    Eligibility eligibility;
    std::optional<TwoFactor> factor;
    std::int64_t nodes = 0;
    double elapsed_ms = 0.0;
};

inline OneRotResult solve_one_rotational(const CycleType& ct, const OneRotOptions& opts = {}) {
    if (ct.order() % 4 != 1)
        throw std::invalid_argument("solve_one_rotational: order must be 1 mod 4");
    OneRotResult res{OneRotResult::Status::NotEligible, check_necessary(ct), std::nullopt, 0, 0.0};
    if (!res.eligibility.ok) {
        res.status = OneRotResult::Status::Infeasible;
        return res;
    }
    ReducedGraph rg = reduce_to_fstar(ct);
    FstarModel fm = build_fstar_model(rg, opts.requirement);
    double budget = opts.budget_ms > 0 ? opts.budget_ms
                                       : 1000.0 * (rg.finite_vertices() + 1) / 20.0;
    SearchOutcome out = CspSolver::solve(fm.model, budget, opts.seed);
    res.nodes = out.nodes;
    res.elapsed_ms = out.elapsed_ms;
    switch (out.status) {
        case SearchOutcome::Status::Solution: {
            TwoFactor f = lift_fstar_labeling(fm, out.assignment);
            if (!satisfies_one_rot_conditions(f))
                throw std::logic_error("solve_one_rotational: lifted factor fails conditions");
            res.factor = std::move(f);
            res.status = OneRotResult::Status::Solved;
            break;
        }
        case SearchOutcome::Status::Infeasible:
            res.status = OneRotResult::Status::Infeasible;
            break;
        case SearchOutcome::Status::BudgetExhausted:
            res.status = OneRotResult::Status::BudgetExhausted;
            break;
    }
    return res;
}

// All n distinct translates of the starter: a 2-factorization of K_{2n+1}.
inline Factorization expand_one_rotational(const TwoFactor& f) {
    int n = f.modulus / 2;
    Factorization fz;
    fz.order = f.modulus + 1;
    for (int g = 0; g < n; ++g) fz.factors.push_back(to_canonical_cycles(translate(f, g)));
    return fz;
}

// Eligible differences for the order-increment extension: elements of
// Z_{2n} whose order is congruent to 2 mod 4.
inline std::vector<int> order2mod4_elements(int two_n) {
    std::vector<int> out;
    for (int x = 1; x < two_n; ++x)
        if (element_order(x, two_n) % 4 == 2) out.push_back(x);
    // Prefer x = n, the unique self-paired difference always present in the
    // infinity cycle.
    std::stable_sort(out.begin(), out.end(), [&](int a, int b) {
        return (a == two_n / 2) > (b == two_n / 2);
    });
    return out;
}

// Inserts infinity' into an edge of difference x (order 2 mod 4) inside a
// cycle whose length the target increments, and assembles the factorization
// of K_{2n+2} minus the induced one-factor.
inline Factorization extend_to_even(const TwoFactor& f, const CycleType& target) {
    if (f.scheme != Scheme::OneRot) throw std::invalid_argument("extend_to_even: one-rot input");
    int two_n = f.modulus;
    CycleType base = f.cycle_type();
    if (target.order() != base.order() + 1)
        throw std::invalid_argument("extend_to_even: target must be one-increment away");

    // Determine the incremented length: target = base with one length L-1 -> L.
    std::vector<int> base_lens = base.lengths(), tgt_lens = target.lengths();
    int inc_len = -1;
    {
        std::vector<int> b = base_lens;
        for (int L : tgt_lens) {
            auto it = std::find(b.begin(), b.end(), L);
            if (it != b.end()) {
                b.erase(it);
            } else if (inc_len == -1) {
                inc_len = L;
            } else {
                inc_len = -2;
            }
        }
        if (inc_len < 0 || b.size() != 1 || b[0] != inc_len - 1)
            throw std::invalid_argument("extend_to_even: target must be one-increment away");
    }
    int lambda = inc_len - 1;  // length of the cycle to extend in the base

    std::vector<int> eligible = order2mod4_elements(two_n);
    for (int x : eligible) {
        for (size_t ci = 0; ci < f.cycles.size(); ++ci) {
            const auto& cyc = f.cycles[ci];
            if (static_cast<int>(cyc.size()) != lambda) continue;
            int len = static_cast<int>(cyc.size());
            for (int i = 0; i < len; ++i) {
                const VertexLabel& a = cyc[i];
                const VertexLabel& b = cyc[(i + 1) % len];
                if (!a.is_finite() || !b.is_finite()) continue;
                if (mod_reduce(a.value - b.value, two_n) != x) continue;

                // Found edge (c1, c2) with c1 - c2 = x; build the extension.
                int u = element_order(x, two_n);
                std::vector<int> group;
                std::vector<int> mark(two_n, 0);
                for (int j = 0; j < u / 2; ++j)
                    for (int k = 0; k < two_n / u; ++k)
                        group.push_back(mod_reduce(2 * x * j + k, two_n));
                for (int g : group) {
                    if (mark[g]) throw std::logic_error("extend_to_even: translate set not distinct");
                    mark[g] = 1;
                }
                // {G, G+x} and {G, G+n} must partition Z_2n.
                for (int g : group)
                    if (mark[mod_reduce(g + x, two_n)] || mark[mod_reduce(g + two_n / 2, two_n)])
                        throw std::logic_error("extend_to_even: translate set is not a transversal");

                TwoFactor fp = f;
                fp.order = f.order + 1;
                auto& c = fp.cycles[ci];
                c.insert(c.begin() + i + 1, VertexLabel::inf_prime());

                Factorization fz;
                fz.order = two_n + 2;
                for (int g : group) fz.factors.push_back(to_canonical_cycles(translate(fp, g)));
                // The translates drop exactly the edges {c2+g, c1+g}; together
                // with {inf, inf'} they form the removed one-factor.
                std::vector<Edge> matching;
                matching.push_back({two_n, two_n + 1});
                for (int g : group)
                    matching.push_back(
                        {mod_reduce(b.value + g, two_n), mod_reduce(a.value + g, two_n)});
                fz.one_factor = std::move(matching);
                return fz;
            }
        }
    }
    throw std::runtime_error("extend_to_even: no eligible edge in any cycle of length " +
                             std::to_string(lambda));
}

}  // namespace obw
