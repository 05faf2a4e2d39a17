#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <stdexcept>
#include <vector>

#include "obw/csp.hpp"
#include "obw/cycle_type.hpp"
#include "obw/factors.hpp"
#include "obw/two_rotational.hpp"

namespace obw {

// Four consecutive vertices of one cycle carrying bits (0,0,1,1); the group
// labeling pins them to ((0,0),(0,t),(1,t),(1,0)).
struct CriticalPath {
    std::array<int, 4> ids;  // flat finite vertex ids, in path order
};

namespace evendetail {

// Ordered windows of four consecutive finite vertices, both directions.
inline std::vector<std::array<int, 4>> enumerate_windows(const RotStructure& st) {
    std::vector<std::array<int, 4>> out;
    for (size_t c = 0; c < st.slot_ids.size(); ++c) {
        const auto& ids = st.slot_ids[c];
        int k = static_cast<int>(ids.size());
        if (static_cast<int>(c) == st.host) {
            for (int i = 0; i + 3 < k; ++i) {
                out.push_back({ids[i], ids[i + 1], ids[i + 2], ids[i + 3]});
                out.push_back({ids[i + 3], ids[i + 2], ids[i + 1], ids[i]});
            }
        } else if (k >= 4) {
            for (int i = 0; i < k; ++i) {
                out.push_back({ids[i], ids[(i + 1) % k], ids[(i + 2) % k], ids[(i + 3) % k]});
                out.push_back({ids[(i + 3) % k], ids[(i + 2) % k], ids[(i + 1) % k], ids[i]});
            }
        }
    }
    return out;
}

}  // namespace evendetail

struct EblpResult {
    BinaryLabeling labeling;
    std::vector<CriticalPath> paths;  // candidate critical paths, deterministic order
};

// Binary labeling for order 4t+1, n = 2t: classes of 2t, infinity neighbors
// differ, 2t-1 mixed edges in total (2t-2 outside one critical path), and at
// least one (0,0,1,1) window.
inline std::optional<EblpResult> eblp_solve(const RotStructure& st, std::uint64_t seed = 0,
                                            int require_mixed_cycle = -1,
                                            double budget_ms = 30000.0) {
    int n = st.modulus;  // 2t
    int t = n / 2;
    auto windows = evendetail::enumerate_windows(st);
    if (windows.empty()) return std::nullopt;

    CspModel m;
    Domain bin = Domain::range(0, 2);
    std::vector<int> bit_vars;
    for (int i = 0; i < st.finite_count; ++i) bit_vars.push_back(m.add_var(bin));
    std::vector<int> flags;
    std::vector<std::vector<int>> cycle_flags(st.lengths.size());
    for (size_t c = 0; c < st.lengths.size(); ++c)
        for (int ei : st.cycle_edge_indices[c]) {
            auto [a, b] = st.finite_edges[ei];
            int f1 = m.add_var(bin);
            m.add({Constraint::Kind::MixedEdgeFlag, {f1, bit_vars[a], bit_vars[b]}});
            int f2 = m.add_var(bin);
            m.add({Constraint::Kind::MixedEdgeFlag, {f2, bit_vars[b], bit_vars[a]}});
            flags.push_back(f1);
            flags.push_back(f2);
            cycle_flags[c].push_back(f1);
            cycle_flags[c].push_back(f2);
        }
    m.add({Constraint::Kind::Cardinality, bit_vars, 0, 2 * t, false});
    m.add({Constraint::Kind::Cardinality, bit_vars, 1, 2 * t, false});
    m.add({Constraint::Kind::Cardinality, flags, 1, 2 * t - 1, false});
    m.add({Constraint::Kind::Fix, {bit_vars[st.host_first()]}, 1});
    m.add({Constraint::Kind::Fix, {bit_vars[st.host_last()]}, 0});
    std::vector<int> window_flags;
    for (const auto& w : windows) {
        int f = m.add_var(bin);
        m.add({Constraint::Kind::WindowFlag,
               {f, bit_vars[w[0]], bit_vars[w[1]], bit_vars[w[2]], bit_vars[w[3]]}});
        window_flags.push_back(f);
    }
    m.add({Constraint::Kind::Cardinality, window_flags, 1, 1, true});
    if (require_mixed_cycle >= 0)
        m.add({Constraint::Kind::Cardinality, cycle_flags[require_mixed_cycle], 1, 1, true});
    m.decision_vars = bit_vars;

    SearchOutcome out = CspSolver::solve(m, budget_ms, seed);
    if (out.status != SearchOutcome::Status::Solution) return std::nullopt;

    EblpResult res{{st, std::vector<int>(st.finite_count)}, {}};
    for (int i = 0; i < st.finite_count; ++i) res.labeling.bits[i] = out.assignment[i];
    for (const auto& w : windows)
        if (res.labeling.bits[w[0]] == 0 && res.labeling.bits[w[1]] == 0 &&
            res.labeling.bits[w[2]] == 1 && res.labeling.bits[w[3]] == 1)
            res.paths.push_back({w});
    return res;
}

inline bool eblp_check(const BinaryLabeling& bl) {
    const RotStructure& st = bl.st;
    int n = st.modulus;
    if (st.finite_count != 2 * n) return false;
    int ones = 0;
    for (int b : bl.bits) ones += b;
    if (ones != n) return false;
    if (bl.bits[st.host_first()] == bl.bits[st.host_last()]) return false;
    if (mixed_edge_count(st, bl.bits) != n - 1) return false;
    for (const auto& w : evendetail::enumerate_windows(st))
        if (bl.bits[w[0]] == 0 && bl.bits[w[1]] == 0 && bl.bits[w[2]] == 1 && bl.bits[w[3]] == 1)
            return true;
    return false;
}

// Group labeling for n = 2t even, relative to a fixed critical path: path
// labels pinned to (0,t,t,0), every other difference set hits Z_2t minus
// {0,t} exactly once.
inline std::optional<std::vector<int>> eglp_solve(const BinaryLabeling& bl, const CriticalPath& path,
                                                  double budget_ms, std::uint64_t seed,
                                                  std::int64_t* nodes_out = nullptr) {
    const RotStructure& st = bl.st;
    int n = st.modulus;
    int t = n / 2;
    if (n > Domain::kMax) throw std::invalid_argument("eglp_solve: order too large");

    auto is_path_edge = [&](int a, int b) {
        for (int q = 0; q < 3; ++q) {
            if ((path.ids[q] == a && path.ids[q + 1] == b) ||
                (path.ids[q] == b && path.ids[q + 1] == a))
                return true;
        }
        return false;
    };

    CspModel m;
    Domain ldom = Domain::range(0, n);
    Domain diff_dom = Domain::range(1, n);
    diff_dom.erase(t);

    std::vector<int> label_vars, a_vars, b_vars;
    for (int i = 0; i < st.finite_count; ++i) {
        int id = m.add_var(ldom);
        label_vars.push_back(id);
        (bl.bits[i] == 0 ? a_vars : b_vars).push_back(id);
    }
    m.add({Constraint::Kind::Fix, {label_vars[path.ids[0]]}, 0});
    m.add({Constraint::Kind::Fix, {label_vars[path.ids[1]]}, t});
    m.add({Constraint::Kind::Fix, {label_vars[path.ids[2]]}, t});
    m.add({Constraint::Kind::Fix, {label_vars[path.ids[3]]}, 0});

    std::vector<int> da, db, dab;
    for (auto [u, v] : st.finite_edges) {
        if (is_path_edge(u, v)) continue;
        int lu = label_vars[u], lv = label_vars[v];
        if (bl.bits[u] == bl.bits[v]) {
            auto& sink = bl.bits[u] == 0 ? da : db;
            int d1 = m.add_var(diff_dom);
            m.add({Constraint::Kind::ModDiffLink, {d1, lu, lv}, 0, 0, false, n, 0, 0});
            int d2 = m.add_var(diff_dom);
            m.add({Constraint::Kind::ModDiffLink, {d2, lv, lu}, 0, 0, false, n, 0, 0});
            sink.push_back(d1);
            sink.push_back(d2);
        } else {
            int zero_end = bl.bits[u] == 0 ? lu : lv;
            int one_end = bl.bits[u] == 0 ? lv : lu;
            int d = m.add_var(diff_dom);
            m.add({Constraint::Kind::ModDiffLink, {d, zero_end, one_end}, 0, 0, false, n, 0, 0});
            dab.push_back(d);
        }
    }
    if (!a_vars.empty()) m.add({Constraint::Kind::AllDifferent, a_vars});
    if (!b_vars.empty()) m.add({Constraint::Kind::AllDifferent, b_vars});
    if (!da.empty()) m.add({Constraint::Kind::AllDifferent, da});
    if (!db.empty()) m.add({Constraint::Kind::AllDifferent, db});
    if (!dab.empty()) m.add({Constraint::Kind::AllDifferent, dab});
    // The path pins four labels, so its cycle must keep its slot structure.
    std::vector<char> skip(st.lengths.size(), 0);
    for (size_t c = 0; c < st.slot_ids.size(); ++c)
        for (int id : st.slot_ids[c])
            if (id == path.ids[0]) skip[c] = 1;
    glpdetail::break_cycle_symmetries(m, st, bl.bits, label_vars, skip);
    m.decision_vars = label_vars;  // difference variables follow by propagation
    m.branch_order = CspModel::BranchOrder::Static;

    SearchOutcome out = CspSolver::solve(m, budget_ms, seed);
    if (nodes_out) *nodes_out += out.nodes;
    if (out.status != SearchOutcome::Status::Solution) return std::nullopt;
    std::vector<int> labels(st.finite_count);
    for (int i = 0; i < st.finite_count; ++i) labels[i] = out.assignment[label_vars[i]];
    return labels;
}

// Existence conditions for n even: full two-orbit vertex set, infinity
// neighbors differ, path P present, and all three difference sets over F - P
// equal to Z_n minus {0, n/2} exactly once.
inline bool satisfies_two_rot_even_conditions(const TwoFactor& f) {
    if (f.scheme != Scheme::TwoRot || f.modulus % 2 != 0) return false;
    int n = f.modulus, t = n / 2;
    std::vector<std::vector<int>> seen(2, std::vector<int>(n, 0));
    int infs = 0, total = 0;
    int inf_bits[2] = {-1, -1};
    for (const auto& cyc : f.cycles) {
        int len = static_cast<int>(cyc.size());
        for (int i = 0; i < len; ++i) {
            const VertexLabel& v = cyc[i];
            ++total;
            if (v.kind == VertexLabel::Kind::Inf) {
                ++infs;
                inf_bits[0] = cyc[(i + 1) % len].bit;
                inf_bits[1] = cyc[(i + len - 1) % len].bit;
            } else if (v.kind == VertexLabel::Kind::Finite) {
                seen[v.bit][v.value]++;
            } else {
                return false;
            }
        }
    }
    if (infs != 1 || total != 2 * n + 1) return false;
    for (int b = 0; b < 2; ++b)
        for (int x = 0; x < n; ++x)
            if (seen[b][x] != 1) return false;
    if (inf_bits[0] == inf_bits[1]) return false;

    auto pwhere = find_critical_path(f);
    if (!pwhere) return false;

    // Difference sets over F - P.
    TwoRotDiffs d{DiffMultiset(n), DiffMultiset(n), DiffMultiset(n)};
    for (size_t c = 0; c < f.cycles.size(); ++c) {
        const auto& cyc = f.cycles[c];
        int len = static_cast<int>(cyc.size());
        for (int i = 0; i < len; ++i) {
            const VertexLabel& a = cyc[i];
            const VertexLabel& b = cyc[(i + 1) % len];
            if (!a.is_finite() || !b.is_finite()) continue;
            bool in_p = false;
            if (static_cast<int>(c) == (*pwhere)[0]) {
                auto norm = [&](int q) { return ((q % len) + len) % len; };
                for (int q = 0; q < 3 && !in_p; ++q) {
                    int pa = norm((*pwhere)[1] + (*pwhere)[2] * q);
                    int pb = norm((*pwhere)[1] + (*pwhere)[2] * (q + 1));
                    in_p = (pa == i && pb == (i + 1) % len) || (pb == i && pa == (i + 1) % len);
                }
            }
            if (in_p) continue;
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
    for (int x = 0; x < n; ++x) {
        int want = (x == 0 || x == t) ? 0 : 1;
        if (d.d00.count(x) != want || d.d11.count(x) != want || d.d01.count(x) != want) return false;
    }
    return true;
}

struct TwoRotEvenOptions {
    double budget_ms = 0.0;
    std::uint64_t seed = 0;
    int require_mixed_len = -1;
    int max_blp_alternatives = 3;
};

// Solves order-4t+1 instances outside the 1-rotational necessary conditions:
// host choices, binary labeling, then one group labeling per critical path.
inline TwoRotResult solve_two_rotational_even(const CycleType& ct,
                                              const TwoRotEvenOptions& opts = {}) {
    int v = ct.order();
    if (v % 4 != 1)
        throw std::invalid_argument("solve_two_rotational_even: order must be 1 mod 4");
    if (is_known_unsolvable(ct))
        throw std::invalid_argument("solve_two_rotational_even: known unsolvable type");
    int n = (v - 1) / 2;  // 2t, even

    double budget = opts.budget_ms > 0 ? opts.budget_ms : 5000.0 * (1.0 + v / 50.0);
    auto t0 = std::chrono::steady_clock::now();
    auto deadline = t0 + std::chrono::duration<double, std::milli>(budget);
    auto remaining = [&] {
        return std::chrono::duration<double, std::milli>(deadline - std::chrono::steady_clock::now())
            .count();
    };

    TwoRotResult res;
    auto finish = [&](TwoRotResult& r) -> TwoRotResult {
        r.elapsed_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        return r;
    };

    // Host candidates: distinct lengths, longest first.
    std::vector<int> lens = ct.lengths();
    std::vector<int> host_candidates;
    for (int i = static_cast<int>(lens.size()) - 1; i >= 0; --i)
        if (host_candidates.empty() || lens[host_candidates.back()] != lens[i])
            host_candidates.push_back(i);

    // Small instances get a complete sweep over every labeling, critical
    // path and host, so Infeasible is a finished proof (needed to classify
    // method-unreachable types honestly).
    if (ct.order() <= 17) {
        for (int host : host_candidates) {
            RotStructure st = make_structure(ct, n, host);
            int fc = st.finite_count;
            auto windows = evendetail::enumerate_windows(st);
            if (windows.empty()) continue;
            for (std::uint32_t mask = 0; mask < (1u << fc); ++mask) {
                // Bit-flip symmetry: pin the infinity neighbors to (1, 0).
                if (!((mask >> st.host_first()) & 1) || ((mask >> st.host_last()) & 1)) continue;
                BinaryLabeling bl{st, std::vector<int>(fc)};
                for (int i = 0; i < fc; ++i) bl.bits[i] = (mask >> i) & 1;
                if (!eblp_check(bl)) continue;
                if (opts.require_mixed_len > 0) {
                    bool has = false;
                    for (size_t c = 0; c < st.lengths.size() && !has; ++c) {
                        if (st.lengths[c] != opts.require_mixed_len) continue;
                        for (int ei : st.cycle_edge_indices[c])
                            if (bl.bits[st.finite_edges[ei].first] !=
                                bl.bits[st.finite_edges[ei].second]) {
                                has = true;
                                break;
                            }
                    }
                    if (!has) continue;
                }
                for (const auto& w : windows) {
                    if (bl.bits[w[0]] != 0 || bl.bits[w[1]] != 0 || bl.bits[w[2]] != 1 ||
                        bl.bits[w[3]] != 1)
                        continue;
                    double left = remaining();
                    if (left <= 0) {
                        res.status = TwoRotResult::Status::BudgetExhausted;
                        return finish(res);
                    }
                    auto labels = eglp_solve(bl, CriticalPath{w}, left, opts.seed, &res.nodes);
                    if (!labels) continue;
                    TwoFactor f = build_two_factor(st, bl.bits, *labels);
                    if (!satisfies_two_rot_even_conditions(f))
                        throw std::logic_error("solve_two_rotational_even: factor fails conditions");
                    res.factor = std::move(f);
                    res.status = TwoRotResult::Status::Solved;
                    return finish(res);
                }
            }
        }
        res.status = TwoRotResult::Status::Infeasible;
        res.proven = true;
        return finish(res);
    }

    // A single unlucky group-label search can eat the whole budget, so every
    // (labeling, path) attempt gets a bounded slice.
    double slice = budget / 10.0;
    bool any_blp = false;
    for (int host : host_candidates) {
        RotStructure st = make_structure(ct, n, host);
        int require_cycle = -1;
        if (opts.require_mixed_len > 0 && st.lengths[st.host] != opts.require_mixed_len) {
            for (size_t c = 0; c < st.lengths.size(); ++c)
                if (st.lengths[c] == opts.require_mixed_len) {
                    require_cycle = static_cast<int>(c);
                    break;
                }
            if (require_cycle < 0)
                throw std::invalid_argument("solve_two_rotational_even: no cycle of required length");
        }
        for (int alt = 0; alt < opts.max_blp_alternatives; ++alt) {
            double left = remaining();
            if (left <= 0) {
                res.status = TwoRotResult::Status::BudgetExhausted;
                return finish(res);
            }
            auto eb = eblp_solve(st, opts.seed + alt, require_cycle, std::min(left, 30000.0));
            if (!eb) break;  // no (further) labeling for this host
            any_blp = true;
            if (!eblp_check(eb->labeling))
                throw std::logic_error("eblp_solve produced an invalid labeling");
            int path_idx = 0;
            for (const CriticalPath& path : eb->paths) {
                double share = remaining();
                if (share <= 0) {
                    res.status = TwoRotResult::Status::BudgetExhausted;
                    return finish(res);
                }
                auto labels = eglp_solve(eb->labeling, path, std::min(share, slice),
                                         opts.seed + 131 * alt + path_idx, &res.nodes);
                ++path_idx;
                if (!labels) continue;
                TwoFactor f = build_two_factor(st, eb->labeling.bits, *labels);
                if (!satisfies_two_rot_even_conditions(f))
                    throw std::logic_error("solve_two_rotational_even: factor fails conditions");
                res.factor = std::move(f);
                res.status = TwoRotResult::Status::Solved;
                return finish(res);
            }
        }
    }
    res.status = any_blp && remaining() <= 0 ? TwoRotResult::Status::BudgetExhausted
                                             : TwoRotResult::Status::Infeasible;
    return finish(res);
}

}  // namespace obw
