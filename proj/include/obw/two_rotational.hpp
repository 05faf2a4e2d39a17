#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "obw/csp.hpp"
#include "obw/cycle_type.hpp"
#include "obw/factors.hpp"

namespace obw {

// Abstract cycle layout for the two-step (binary label, group label)
// constructions. Finite vertices get flat ids; the host cycle carries
// infinity between its last and first finite slot, so its finite part is an
// open path of length-1 vertices.
struct RotStructure {
    std::vector<int> lengths;
    int host = 0;
    int modulus = 0;  // n: group labels live in Z_n
    std::vector<std::vector<int>> slot_ids;
    std::vector<std::pair<int, int>> finite_edges;      // flat id pairs
    std::vector<std::vector<int>> cycle_edge_indices;   // per cycle, into finite_edges
    int finite_count = 0;

    int host_first() const { return slot_ids[host].front(); }
    int host_last() const { return slot_ids[host].back(); }
};

inline RotStructure make_structure(const CycleType& ct, int modulus, int host_index = -1) {
    RotStructure st;
    st.lengths = ct.lengths();
    st.modulus = modulus;
    if (host_index < 0) {
        // Infinity lies in the longest cycle.
        host_index = static_cast<int>(st.lengths.size()) - 1;
    }
    st.host = host_index;
    int next_id = 0;
    for (size_t c = 0; c < st.lengths.size(); ++c) {
        int finite = st.lengths[c] - (static_cast<int>(c) == st.host ? 1 : 0);
        std::vector<int> ids(finite);
        for (int& id : ids) id = next_id++;
        st.slot_ids.push_back(std::move(ids));
    }
    st.finite_count = next_id;
    for (size_t c = 0; c < st.lengths.size(); ++c) {
        st.cycle_edge_indices.emplace_back();
        const auto& ids = st.slot_ids[c];
        int k = static_cast<int>(ids.size());
        int edges = (static_cast<int>(c) == st.host) ? k - 1 : k;
        for (int i = 0; i < edges; ++i) {
            st.cycle_edge_indices.back().push_back(static_cast<int>(st.finite_edges.size()));
            st.finite_edges.push_back({ids[i], ids[(i + 1) % k]});
        }
    }
    return st;
}

struct BinaryLabeling {
    RotStructure st;
    std::vector<int> bits;  // per flat finite vertex
};

inline int mixed_edge_count(const RotStructure& st, const std::vector<int>& bits) {
    int m = 0;
    for (auto [a, b] : st.finite_edges) m += (bits[a] != bits[b]);
    return m;
}

// Binary labeling conditions for order 4t+3, n = 2t+1: equal class sizes,
// infinity neighbors with different bits, exactly n mixed edges.
inline bool blp_check(const BinaryLabeling& bl) {
    const RotStructure& st = bl.st;
    if (static_cast<int>(bl.bits.size()) != st.finite_count) return false;
    int n = st.modulus;
    if (st.finite_count != 2 * n) return false;
    int ones = 0;
    for (int b : bl.bits) {
        if (b != 0 && b != 1) return false;
        ones += b;
    }
    if (ones != n || st.finite_count - ones != n) return false;
    if (bl.bits[st.host_first()] == bl.bits[st.host_last()]) return false;
    return mixed_edge_count(st, bl.bits) == n;
}

namespace blpdetail {

struct Cand {
    int zeros = 0;
    int changes = 0;
    bool has_mixed = false;
    std::vector<int> bits;
};

inline std::vector<int> assemble(int core_bits, int core_len, int chunks, int flip) {
    std::vector<int> s;
    for (int i = 0; i < core_len; ++i) s.push_back((core_bits >> i) & 1);
    for (int c = 0; c < chunks; ++c) {
        if (flip) {
            s.insert(s.end(), {0, 0, 1, 1});
        } else {
            s.insert(s.end(), {1, 1, 0, 0});
        }
    }
    return s;
}

// All bit strings reachable as a short core plus repeated 4-blocks, reduced
// to distinct (zeros, changes) signatures.
inline std::vector<Cand> cycle_candidates(int length, bool host_path) {
    int len = host_path ? length - 1 : length;
    int core, chunks;
    if (host_path) {
        core = len <= 5 ? len : ((len - 2) % 4) + 2;
    } else {
        core = len <= 6 ? len : ((len - 3) % 4) + 3;
    }
    chunks = (len - core) / 4;
    std::vector<Cand> out;
    auto seen = [&](int z, int c) {
        for (const Cand& q : out)
            if (q.zeros == z && q.changes == c) return true;
        return false;
    };
    for (int flip = 0; flip < (chunks > 0 ? 2 : 1); ++flip) {
        for (int bitsv = 0; bitsv < (1 << core); ++bitsv) {
            std::vector<int> s = assemble(bitsv, core, chunks, flip);
            int z = 0;
            for (int b : s) z += (b == 0);
            int changes = 0;
            int limit = host_path ? static_cast<int>(s.size()) - 1 : static_cast<int>(s.size());
            for (int i = 0; i < limit; ++i) changes += (s[i] != s[(i + 1) % s.size()]);
            if (host_path && changes % 2 == 0) continue;  // infinity neighbors must differ
            if (seen(z, changes)) continue;
            out.push_back({z, changes, changes > 0, std::move(s)});
        }
    }
    return out;
}

}  // namespace blpdetail

// Linear-time pattern construction: peel repeated 4-blocks off every long
// cycle, then pick one short-core pattern per cycle so zeros and mixed-edge
// counts land exactly on target. Returns nothing on a miss (caller falls
// back to the CSP formulation).
inline std::optional<BinaryLabeling> blp_solve_patterns(const RotStructure& st, int zeros_target,
                                                        int mixed_target,
                                                        int require_mixed_cycle = -1) {
    int k = static_cast<int>(st.lengths.size());
    std::vector<std::vector<blpdetail::Cand>> cands(k);
    for (int c = 0; c < k; ++c) {
        cands[c] = blpdetail::cycle_candidates(st.lengths[c], c == st.host);
        if (c == require_mixed_cycle && c != st.host) {
            std::erase_if(cands[c], [](const blpdetail::Cand& q) { return !q.has_mixed; });
        }
        if (cands[c].empty()) return std::nullopt;
    }
    // dp[c][z][m]: candidate chosen for cycle c reaching (z zeros, m mixed).
    int Z = zeros_target, M = mixed_target;
    std::vector<std::vector<std::vector<int>>> dp(
        k + 1, std::vector<std::vector<int>>(Z + 1, std::vector<int>(M + 1, -1)));
    dp[0][0][0] = 0;  // marker
    for (int c = 0; c < k; ++c)
        for (int z = 0; z <= Z; ++z)
            for (int m = 0; m <= M; ++m) {
                if (dp[c][z][m] < 0) continue;
                for (size_t qi = 0; qi < cands[c].size(); ++qi) {
                    const auto& q = cands[c][qi];
                    int nz = z + q.zeros, nm = m + q.changes;
                    if (nz > Z || nm > M) continue;
                    if (dp[c + 1][nz][nm] < 0) dp[c + 1][nz][nm] = static_cast<int>(qi);
                }
            }
    if (dp[k][Z][M] < 0) return std::nullopt;

    BinaryLabeling bl{st, std::vector<int>(st.finite_count, 0)};
    int z = Z, m = M;
    for (int c = k - 1; c >= 0; --c) {
        const auto& q = cands[c][dp[c + 1][z][m]];
        for (size_t s = 0; s < st.slot_ids[c].size(); ++s) bl.bits[st.slot_ids[c][s]] = q.bits[s];
        z -= q.zeros;
        m -= q.changes;
    }
    return bl;
}

// CSP transcription of the binary labeling problem. Each edge carries one
// flag per orientation so the flag cardinality counts mixed edges exactly.
inline CspModel build_blp_model(const RotStructure& st, int zeros_target, int mixed_target,
                                int require_mixed_cycle = -1) {
    CspModel m;
    Domain bin = Domain::range(0, 2);
    std::vector<int> bit_vars;
    for (int i = 0; i < st.finite_count; ++i) bit_vars.push_back(m.add_var(bin));
    std::vector<int> flags;
    std::vector<std::vector<int>> cycle_flags(st.lengths.size());
    for (size_t c = 0; c < st.lengths.size(); ++c) {
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
    }
    m.add({Constraint::Kind::Cardinality, bit_vars, 0, zeros_target, false});
    m.add({Constraint::Kind::Cardinality, bit_vars, 1, st.finite_count - zeros_target, false});
    m.add({Constraint::Kind::Cardinality, flags, 1, mixed_target, false});
    m.add({Constraint::Kind::Fix, {bit_vars[st.host_first()]}, 1});
    m.add({Constraint::Kind::Fix, {bit_vars[st.host_last()]}, 0});
    if (require_mixed_cycle >= 0)
        m.add({Constraint::Kind::Cardinality, cycle_flags[require_mixed_cycle], 1, 1, true});
    m.decision_vars = bit_vars;
    return m;
}

inline std::optional<BinaryLabeling> blp_solve_csp(const RotStructure& st, int zeros_target,
                                                   int mixed_target, std::uint64_t seed = 0,
                                                   int require_mixed_cycle = -1,
                                                   double budget_ms = 30000.0) {
    CspModel m = build_blp_model(st, zeros_target, mixed_target, require_mixed_cycle);
    SearchOutcome out = CspSolver::solve(m, budget_ms, seed);
    if (out.status != SearchOutcome::Status::Solution) return std::nullopt;
    BinaryLabeling bl{st, std::vector<int>(st.finite_count)};
    for (int i = 0; i < st.finite_count; ++i) bl.bits[i] = out.assignment[i];
    return bl;
}

struct GlpModel {
    CspModel model;
    std::vector<int> label_vars;  // per flat finite vertex
};

namespace glpdetail {

// Symmetry breaking shared by the odd and even group-labeling models.
// Rotating or reflecting the label sequence of a cycle whose bit pattern is
// constant leaves the 2-factor unchanged, and cycles with identical length
// and bit pattern are interchangeable. `skip` marks cycles that must stay
// untouched (the infinity host; the critical-path cycle in the even case).
inline void break_cycle_symmetries(CspModel& m, const RotStructure& st,
                                   const std::vector<int>& bits,
                                   const std::vector<int>& label_vars,
                                   const std::vector<char>& skip) {
    auto pattern = [&](size_t c) {
        std::string p;
        for (int id : st.slot_ids[c]) p += char('0' + bits[id]);
        return std::to_string(st.lengths[c]) + ":" + p;
    };
    for (size_t c = 0; c < st.lengths.size(); ++c) {
        if (skip[c] || static_cast<int>(c) == st.host) continue;
        const auto& ids = st.slot_ids[c];
        bool mono = true;
        for (int id : ids) mono = mono && bits[id] == bits[ids[0]];
        if (mono && ids.size() >= 3) {
            for (size_t i = 1; i < ids.size(); ++i)
                m.add({Constraint::Kind::Less, {label_vars[ids[0]], label_vars[ids[i]]}});
            m.add({Constraint::Kind::Less, {label_vars[ids[1]], label_vars[ids.back()]}});
        }
    }
    // Order interchangeable cycles by their first slot label.
    std::map<std::string, int> last_seen;
    for (size_t c = 0; c < st.lengths.size(); ++c) {
        if (skip[c] || static_cast<int>(c) == st.host) continue;
        std::string key = pattern(c);
        auto it = last_seen.find(key);
        if (it != last_seen.end())
            m.add({Constraint::Kind::Less,
                   {label_vars[st.slot_ids[it->second][0]], label_vars[st.slot_ids[c][0]]}});
        last_seen[key] = static_cast<int>(c);
    }
}

}  // namespace glpdetail

// Group labeling for n odd: bijective labels per bit class, same-bit edges
// contribute both signed differences (all distinct, nonzero), mixed edges
// one directed difference each (all residues hit).
inline GlpModel glp_build_model(const BinaryLabeling& bl) {
    const RotStructure& st = bl.st;
    int n = st.modulus;
    if (n > Domain::kMax) throw std::invalid_argument("glp_build_model: order too large");
    GlpModel gm;
    CspModel& m = gm.model;
    Domain ldom = Domain::range(0, n);
    Domain same_dom = Domain::range(1, n);
    Domain mixed_dom = Domain::range(0, n);

    std::vector<int> a_vars, b_vars;
    for (int i = 0; i < st.finite_count; ++i) {
        int id = m.add_var(ldom);
        gm.label_vars.push_back(id);
        (bl.bits[i] == 0 ? a_vars : b_vars).push_back(id);
    }
    std::vector<int> da, db, dab;
    for (auto [u, v] : st.finite_edges) {
        int lu = gm.label_vars[u], lv = gm.label_vars[v];
        if (bl.bits[u] == bl.bits[v]) {
            auto& sink = bl.bits[u] == 0 ? da : db;
            int d1 = m.add_var(same_dom);
            m.add({Constraint::Kind::ModDiffLink, {d1, lu, lv}, 0, 0, false, n, 0, 0});
            int d2 = m.add_var(same_dom);
            m.add({Constraint::Kind::ModDiffLink, {d2, lv, lu}, 0, 0, false, n, 0, 0});
            sink.push_back(d1);
            sink.push_back(d2);
        } else {
            int zero_end = bl.bits[u] == 0 ? lu : lv;
            int one_end = bl.bits[u] == 0 ? lv : lu;
            int d = m.add_var(mixed_dom);
            m.add({Constraint::Kind::ModDiffLink, {d, zero_end, one_end}, 0, 0, false, n, 0, 0});
            dab.push_back(d);
        }
    }
    if (!a_vars.empty()) m.add({Constraint::Kind::AllDifferent, a_vars});
    if (!b_vars.empty()) m.add({Constraint::Kind::AllDifferent, b_vars});
    if (!da.empty()) m.add({Constraint::Kind::AllDifferent, da});
    if (!db.empty()) m.add({Constraint::Kind::AllDifferent, db});
    if (!dab.empty()) m.add({Constraint::Kind::AllDifferent, dab});
    // Simultaneous translation of both coordinates is a symmetry.
    if (!a_vars.empty())
        m.add({Constraint::Kind::Fix, {a_vars[0]}, 0});
    else if (!b_vars.empty())
        m.add({Constraint::Kind::Fix, {b_vars[0]}, 0});
    glpdetail::break_cycle_symmetries(m, st, bl.bits, gm.label_vars,
                                      std::vector<char>(st.lengths.size(), 0));
    m.decision_vars = gm.label_vars;  // difference variables follow by propagation
    m.branch_order = CspModel::BranchOrder::Static;  // creep along the cycles
    return gm;
}

inline TwoFactor build_two_factor(const RotStructure& st, const std::vector<int>& bits,
                                  const std::vector<int>& labels) {
    TwoFactor f;
    f.scheme = Scheme::TwoRot;
    f.modulus = st.modulus;
    f.order = 2 * st.modulus + 1;
    for (size_t c = 0; c < st.lengths.size(); ++c) {
        std::vector<VertexLabel> cyc;
        if (static_cast<int>(c) == st.host) cyc.push_back(VertexLabel::inf());
        for (int id : st.slot_ids[c]) cyc.push_back(VertexLabel::finite(labels[id], bits[id]));
        f.cycles.push_back(std::move(cyc));
    }
    return f;
}

// Existence conditions for the two-orbit construction, n odd.
inline bool satisfies_two_rot_odd_conditions(const TwoFactor& f) {
    if (f.scheme != Scheme::TwoRot) return false;
    int n = f.modulus;
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
    TwoRotDiffs d = differences_two_rot(f);
    for (int x = 1; x < n; ++x)
        if (d.d00.count(x) != 1 || d.d11.count(x) != 1) return false;
    if (d.d00.count(0) != 0 || d.d11.count(0) != 0) return false;
    for (int x = 0; x < n; ++x)
        if (d.d01.count(x) != 1) return false;
    return true;
}

// Locates the fixed path P = ((0,0),(0,n/2),(1,n/2),(1,0)) inside a cycle of
// F; required by the n-even expansion. Returns (cycle, start, direction).
inline std::optional<std::array<int, 3>> find_critical_path(const TwoFactor& f) {
    int n = f.modulus;
    if (n % 2 != 0) return std::nullopt;
    int h = n / 2;
    const VertexLabel want[4] = {VertexLabel::finite(0, 0), VertexLabel::finite(h, 0),
                                 VertexLabel::finite(h, 1), VertexLabel::finite(0, 1)};
    for (size_t c = 0; c < f.cycles.size(); ++c) {
        const auto& cyc = f.cycles[c];
        int len = static_cast<int>(cyc.size());
        if (len < 4) continue;
        for (int i = 0; i < len; ++i) {
            for (int dir : {1, -1}) {
                bool ok = true;
                for (int j = 0; j < 4 && ok; ++j)
                    ok = cyc[((i + dir * j) % len + len) % len] == want[j];
                if (ok) return std::array<int, 3>{static_cast<int>(c), i, dir};
            }
        }
    }
    return std::nullopt;
}

// Swaps P for P* (middle two vertices exchanged) in a copy of F.
inline TwoFactor swap_critical_path(const TwoFactor& f, const std::array<int, 3>& where) {
    TwoFactor g = f;
    auto& cyc = g.cycles[where[0]];
    int len = static_cast<int>(cyc.size());
    int i1 = ((where[1] + where[2]) % len + len) % len;
    int i2 = ((where[1] + 2 * where[2]) % len + len) % len;
    std::swap(cyc[i1], cyc[i2]);
    return g;
}

// Orbit of the starter: n translates (n odd), or n/2 translates of F plus
// n/2 translates of the path-swapped starter (n even).
inline Factorization expand_two_rotational(const TwoFactor& f) {
    int n = f.modulus;
    Factorization fz;
    fz.order = 2 * n + 1;
    if (n % 2 == 1) {
        for (int g = 1; g <= n; ++g) fz.factors.push_back(to_canonical_cycles(translate(f, g)));
    } else {
        auto where = find_critical_path(f);
        if (!where) throw std::invalid_argument("expand_two_rotational: missing path P");
        TwoFactor swapped = swap_critical_path(f, *where);
        for (int g = 1; g <= n / 2; ++g) {
            fz.factors.push_back(to_canonical_cycles(translate(f, g)));
            fz.factors.push_back(to_canonical_cycles(translate(swapped, n / 2 + g)));
        }
    }
    return fz;
}

struct TwoRotOptions {
    double budget_ms = 0.0;  // 0: default 5*(1+|V(F)|/50) seconds per attempt train
    std::uint64_t seed = 0;
    int require_mixed_len = -1;  // a cycle of this length must carry a mixed edge
    int max_blp_alternatives = 8;
};

struct TwoRotResult {
    enum class Status { Solved, Infeasible, BudgetExhausted };
    Status status = Status::Infeasible;
    std::optional<TwoFactor> factor;
    bool pattern_blp_used = false;
    bool proven = false;  // Infeasible backed by a completed exhaustive sweep
    std::int64_t nodes = 0;
    double elapsed_ms = 0.0;
};

inline TwoRotResult solve_two_rotational_odd(const CycleType& ct, const TwoRotOptions& opts = {}) {
    int v = ct.order();
    if (v % 4 != 3) throw std::invalid_argument("solve_two_rotational_odd: order must be 3 mod 4");
    if (is_known_unsolvable(ct))
        throw std::invalid_argument("solve_two_rotational_odd: known unsolvable type");
    int n = (v - 1) / 2;  // odd

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

    // Host candidates: the longest cycle first, then the other distinct
    // lengths. Hosting infinity elsewhere is sometimes the only way: with
    // [3,4,4] every labeling that puts infinity in a 4-cycle fails the group
    // step, while the 3-cycle host admits solutions.
    std::vector<int> lens = ct.lengths();
    std::vector<int> host_candidates;
    for (int i = static_cast<int>(lens.size()) - 1; i >= 0; --i)
        if (host_candidates.empty() || lens[host_candidates.back()] != lens[i])
            host_candidates.push_back(i);

    for (int host : host_candidates) {
        RotStructure st = make_structure(ct, n, host);
        // The host path always carries a mixed edge; only a non-host cycle of
        // the required length needs an explicit constraint.
        int require_cycle = -1;
        if (opts.require_mixed_len > 0 && st.lengths[st.host] != opts.require_mixed_len) {
            for (size_t c = 0; c < st.lengths.size(); ++c)
                if (st.lengths[c] == opts.require_mixed_len) {
                    require_cycle = static_cast<int>(c);
                    break;
                }
            if (require_cycle < 0)
                throw std::invalid_argument("solve_two_rotational_odd: no cycle of required length");
        }

        std::vector<BinaryLabeling> tried;
        // Group labelings are near-instant for typical labelings but can be
        // intractable for unlucky ones (the periodic peel strings especially),
        // so every attempt gets a bounded slice and the alternatives keep
        // coming.
        double slice = budget / (opts.max_blp_alternatives + 2.0);
        auto attempt = [&](const BinaryLabeling& bl, bool from_pattern, bool last) -> bool {
            for (const BinaryLabeling& old : tried)
                if (old.bits == bl.bits) return false;
            tried.push_back(bl);
            GlpModel gm = glp_build_model(bl);
            double left = last ? remaining() : std::min(remaining(), slice);
            if (left <= 0) return false;
            SearchOutcome out = CspSolver::solve(gm.model, left, opts.seed);
            res.nodes += out.nodes;
            if (out.status != SearchOutcome::Status::Solution) return false;
            std::vector<int> labels(st.finite_count);
            for (int i = 0; i < st.finite_count; ++i) labels[i] = out.assignment[gm.label_vars[i]];
            TwoFactor f = build_two_factor(st, bl.bits, labels);
            if (!satisfies_two_rot_odd_conditions(f))
                throw std::logic_error("solve_two_rotational_odd: factor fails conditions");
            res.factor = std::move(f);
            res.status = TwoRotResult::Status::Solved;
            res.pattern_blp_used = from_pattern;
            return true;
        };

        auto pat = blp_solve_patterns(st, n, n, require_cycle);
        if (pat && blp_check(*pat) &&
            (require_cycle < 0 || [&] {
                for (int ei : st.cycle_edge_indices[require_cycle]) {
                    auto [a, b] = st.finite_edges[ei];
                    if (pat->bits[a] != pat->bits[b]) return true;
                }
                return false;
            }())) {
            if (attempt(*pat, true, false)) return finish(res);
        }
        for (int alt = 0; alt < opts.max_blp_alternatives && remaining() > 0; ++alt) {
            auto bl = blp_solve_csp(st, n, n, opts.seed + 1 + alt, require_cycle,
                                    std::min(remaining(), 30000.0));
            if (!bl) break;  // binary problem itself infeasible for this host
            if (!blp_check(*bl)) throw std::logic_error("blp_solve_csp produced an invalid labeling");
            if (attempt(*bl, false, alt + 1 == opts.max_blp_alternatives)) return finish(res);
        }
        if (remaining() <= 0) {
            res.status = TwoRotResult::Status::BudgetExhausted;
            return finish(res);
        }
    }
    res.status = remaining() <= 0 ? TwoRotResult::Status::BudgetExhausted
                                  : TwoRotResult::Status::Infeasible;
    return finish(res);
}

// Prop-5 order increment: replace a mixed edge of a matching cycle by a
// 2-path through infinity', and take the orbit minus the induced matching.
inline Factorization extend_two_rotational(const TwoFactor& f, const CycleType& target) {
    if (f.scheme != Scheme::TwoRot) throw std::invalid_argument("extend_two_rotational: two-rot input");
    int n = f.modulus;
    CycleType base = f.cycle_type();
    if (target.order() != base.order() + 1)
        throw std::invalid_argument("extend_two_rotational: target must be one-increment away");
    std::vector<int> base_lens = base.lengths(), tgt_lens = target.lengths();
    int inc_len = -1;
    {
        std::vector<int> b = base_lens;
        for (int L : tgt_lens) {
            auto it = std::find(b.begin(), b.end(), L);
            if (it != b.end())
                b.erase(it);
            else if (inc_len == -1)
                inc_len = L;
            else
                inc_len = -2;
        }
        if (inc_len < 0 || b.size() != 1 || b[0] != inc_len - 1)
            throw std::invalid_argument("extend_to_even: target must be one-increment away");
    }
    int lambda = inc_len - 1;

    std::optional<std::array<int, 3>> pwhere;
    if (n % 2 == 0) {
        pwhere = find_critical_path(f);
        if (!pwhere) throw std::invalid_argument("extend_two_rotational: missing path P");
    }
    auto in_path = [&](size_t c, int i, int j, int len) {
        if (!pwhere) return false;
        if (static_cast<int>(c) != (*pwhere)[0]) return false;
        auto norm = [&](int k) { return ((k % len) + len) % len; };
        for (int q = 0; q < 3; ++q) {
            int a = norm((*pwhere)[1] + (*pwhere)[2] * q);
            int b = norm((*pwhere)[1] + (*pwhere)[2] * (q + 1));
            if ((a == i && b == j) || (a == j && b == i)) return true;
        }
        return false;
    };

    for (size_t c = 0; c < f.cycles.size(); ++c) {
        const auto& cyc = f.cycles[c];
        if (static_cast<int>(cyc.size()) != lambda) continue;
        int len = static_cast<int>(cyc.size());
        for (int i = 0; i < len; ++i) {
            const VertexLabel& a = cyc[i];
            const VertexLabel& b = cyc[(i + 1) % len];
            if (!a.is_finite() || !b.is_finite() || a.bit == b.bit) continue;
            int y0 = a.bit == 0 ? a.value : b.value;
            int y1 = a.bit == 0 ? b.value : a.value;
            if (n % 2 == 0 && mod_reduce(y0 - y1, n) == n / 2) continue;
            if (in_path(c, i, (i + 1) % len, len)) continue;

            TwoFactor h = f;
            h.order = f.order + 1;
            h.cycles[c].insert(h.cycles[c].begin() + i + 1, VertexLabel::inf_prime());

            Factorization fz;
            fz.order = 2 * n + 2;
            if (n % 2 == 1) {
                for (int g = 1; g <= n; ++g) fz.factors.push_back(to_canonical_cycles(translate(h, g)));
            } else {
                TwoFactor swapped = swap_critical_path(f, *pwhere);
                swapped.order = f.order + 1;
                // The chosen edge is outside P, so it exists in the swapped
                // starter as well; insert infinity' there too.
                bool inserted = false;
                for (auto& scyc : swapped.cycles) {
                    int sl = static_cast<int>(scyc.size());
                    for (int si = 0; si < sl && !inserted; ++si) {
                        if (scyc[si] == a && scyc[(si + 1) % sl] == b) {
                            scyc.insert(scyc.begin() + si + 1, VertexLabel::inf_prime());
                            inserted = true;
                        } else if (scyc[si] == b && scyc[(si + 1) % sl] == a) {
                            scyc.insert(scyc.begin() + si + 1, VertexLabel::inf_prime());
                            inserted = true;
                        }
                    }
                    if (inserted) break;
                }
                if (!inserted)
                    throw std::logic_error("extend_two_rotational: edge missing from swapped starter");
                for (int g = 1; g <= n / 2; ++g) {
                    fz.factors.push_back(to_canonical_cycles(translate(h, g)));
                    fz.factors.push_back(to_canonical_cycles(translate(swapped, n / 2 + g)));
                }
            }
            std::vector<Edge> matching;
            matching.push_back({2 * n, 2 * n + 1});
            for (int g = 1; g <= n; ++g)
                matching.push_back({mod_reduce(y0 + g, n), n + mod_reduce(y1 + g, n)});
            fz.one_factor = std::move(matching);
            return fz;
        }
    }
    throw std::runtime_error("extend_two_rotational: no eligible mixed edge in any cycle of length " +
                             std::to_string(lambda));
}

}  // namespace obw
