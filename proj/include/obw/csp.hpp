#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace obw {

// Finite integer domain over [0, 256) backed by a fixed bitset.
class Domain {
    std::array<std::uint64_t, 4> w_{};

  public:
    static constexpr int kMax = 256;

    static Domain range(int lo, int hi) {  // [lo, hi)
        Domain d;
        for (int v = lo; v < hi; ++v) d.insert(v);
        return d;
    }
    static Domain single(int v) {
        Domain d;
        d.insert(v);
        return d;
    }

    void insert(int v) { w_[v >> 6] |= (std::uint64_t{1} << (v & 63)); }
    void erase(int v) { w_[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }
    bool contains(int v) const { return (w_[v >> 6] >> (v & 63)) & 1; }

    int size() const {
        return std::popcount(w_[0]) + std::popcount(w_[1]) + std::popcount(w_[2]) +
               std::popcount(w_[3]);
    }
    bool empty() const { return !(w_[0] | w_[1] | w_[2] | w_[3]); }
    bool is_single() const { return size() == 1; }

    int first() const {
        for (int i = 0; i < 4; ++i)
            if (w_[i]) return i * 64 + std::countr_zero(w_[i]);
        return -1;
    }
    int next(int v) const {  // smallest element > v, or -1
        ++v;
        if (v >= kMax) return -1;
        int i = v >> 6;
        std::uint64_t cur = w_[i] & (~std::uint64_t{0} << (v & 63));
        while (true) {
            if (cur) return i * 64 + std::countr_zero(cur);
            if (++i >= 4) return -1;
            cur = w_[i];
        }
    }
    int single_value() const { return first(); }

    void intersect(const Domain& o) {
        for (int i = 0; i < 4; ++i) w_[i] &= o.w_[i];
    }
    void unite(const Domain& o) {
        for (int i = 0; i < 4; ++i) w_[i] |= o.w_[i];
    }
    bool operator==(const Domain&) const = default;
};

// Constraint kinds understood by the engine. `vars` carries the operands:
//   AllDifferent : all vars pairwise distinct
//   Cardinality  : #(vars == value) == count, or >= count when at_least
//   ModDiffLink  : vars={d,x,y}: d == (x - y + offset) mod modulus
//   HalfPairUse  : exactly one of {x, x+half} used across vars, per x in [0,half)
//   Fix          : vars={x}: x == value
//   Less         : vars={u,v}: u < v (symmetry breaking)
//   MixedEdgeFlag: vars={b,cx,cy}: b == 1 iff (cx,cy) == (0,1)
//   WindowFlag   : vars={b,x,y,z,k}: b == 1 iff bits (x,y,z,k) == (0,0,1,1)
struct Constraint {
    enum class Kind {
        AllDifferent,
        Cardinality,
        ModDiffLink,
        HalfPairUse,
        Fix,
        Less,
        MixedEdgeFlag,
        WindowFlag
    };
    Kind kind;
    std::vector<int> vars;
    int value = 0;
    int count = 0;
    bool at_least = false;
    int modulus = 0;
    int offset = 0;
    int half = 0;
};

struct CspModel {
    std::vector<Domain> domains;
    std::vector<Constraint> constraints;
    // Branching hint: search decides these first (all vars when empty);
    // the rest are expected to follow by propagation.
    std::vector<int> decision_vars;
    // Static: take decision vars in the given order (placement problems want
    // the frontier to creep along the cycles). MinDomain: smallest domain.
    enum class BranchOrder { MinDomain, Static };
    BranchOrder branch_order = BranchOrder::MinDomain;

    int add_var(Domain d) {
        domains.push_back(d);
        return static_cast<int>(domains.size()) - 1;
    }
    void add(Constraint c) { constraints.push_back(std::move(c)); }

    void validate() const {
        int n = static_cast<int>(domains.size());
        for (const Domain& d : domains)
            if (d.empty()) throw std::invalid_argument("csp model: empty initial domain");
        for (const Constraint& c : constraints)
            for (int v : c.vars)
                if (v < 0 || v >= n) throw std::invalid_argument("csp model: dangling variable id");
        for (int v : decision_vars)
            if (v < 0 || v >= n) throw std::invalid_argument("csp model: dangling decision var");
    }
};

struct SearchOutcome {
    enum class Status { Solution, Infeasible, BudgetExhausted };
    Status status = Status::Infeasible;
    std::vector<int> assignment;  // valid when status == Solution
    std::int64_t nodes = 0;
    std::int64_t backtracks = 0;
    double elapsed_ms = 0.0;
};

struct CheckResult {
    bool ok = true;
    int violated = -1;  // constraint index
    std::string reason;
};

// Evaluates every constraint by direct definition; shares no propagation
// machinery with the solver, so it doubles as an independent oracle.
inline CheckResult check(const CspModel& model, const std::vector<int>& assignment) {
    if (assignment.size() != model.domains.size())
        throw std::invalid_argument("check: assignment is not total");
    for (size_t i = 0; i < assignment.size(); ++i)
        if (!model.domains[i].contains(assignment[i]))
            return {false, static_cast<int>(i), "value outside variable domain"};

    auto a = [&](int v) { return assignment[v]; };
    for (size_t ci = 0; ci < model.constraints.size(); ++ci) {
        const Constraint& c = model.constraints[ci];
        int idx = static_cast<int>(ci);
        switch (c.kind) {
            case Constraint::Kind::AllDifferent:
                for (size_t i = 0; i < c.vars.size(); ++i)
                    for (size_t j = i + 1; j < c.vars.size(); ++j)
                        if (a(c.vars[i]) == a(c.vars[j]))
                            return {false, idx, "alldifferent violated"};
                break;
            case Constraint::Kind::Cardinality: {
                int n = 0;
                for (int v : c.vars) n += (a(v) == c.value);
                if (c.at_least ? (n < c.count) : (n != c.count))
                    return {false, idx, "cardinality violated"};
                break;
            }
            case Constraint::Kind::ModDiffLink: {
                int m = c.modulus;
                int want = (((a(c.vars[1]) - a(c.vars[2]) + c.offset) % m) + m) % m;
                if (a(c.vars[0]) != want) return {false, idx, "difference link violated"};
                break;
            }
            case Constraint::Kind::HalfPairUse: {
                std::vector<int> used(2 * c.half, 0);
                for (int v : c.vars) {
                    int x = a(v);
                    if (x < 0 || x >= 2 * c.half) return {false, idx, "value outside pair range"};
                    used[x] = 1;
                }
                for (int x = 0; x < c.half; ++x)
                    if (used[x] + used[x + c.half] != 1)
                        return {false, idx, "half-pair use violated"};
                break;
            }
            case Constraint::Kind::Fix:
                if (a(c.vars[0]) != c.value) return {false, idx, "fix violated"};
                break;
            case Constraint::Kind::Less:
                if (a(c.vars[0]) >= a(c.vars[1])) return {false, idx, "less violated"};
                break;
            case Constraint::Kind::MixedEdgeFlag: {
                int want = (a(c.vars[1]) == 0 && a(c.vars[2]) == 1) ? 1 : 0;
                if (a(c.vars[0]) != want) return {false, idx, "mixed edge flag violated"};
                break;
            }
            case Constraint::Kind::WindowFlag: {
                int want = (a(c.vars[1]) == 0 && a(c.vars[2]) == 0 && a(c.vars[3]) == 1 &&
                            a(c.vars[4]) == 1)
                               ? 1
                               : 0;
                if (a(c.vars[0]) != want) return {false, idx, "window flag violated"};
                break;
            }
        }
    }
    return {};
}

inline std::string dump_model(const CspModel& model) {
    std::ostringstream out;
    out << "vars " << model.domains.size() << "\n";
    for (size_t i = 0; i < model.domains.size(); ++i) {
        out << "var " << i << " {";
        bool first = true;
        for (int v = model.domains[i].first(); v >= 0; v = model.domains[i].next(v)) {
            if (!first) out << ',';
            out << v;
            first = false;
        }
        out << "}\n";
    }
    for (const Constraint& c : model.constraints) {
        switch (c.kind) {
            case Constraint::Kind::AllDifferent: out << "alldifferent"; break;
            case Constraint::Kind::Cardinality:
                out << "card value=" << c.value << (c.at_least ? " >= " : " == ") << c.count;
                break;
            case Constraint::Kind::ModDiffLink:
                out << "moddiff m=" << c.modulus << " off=" << c.offset;
                break;
            case Constraint::Kind::HalfPairUse: out << "halfpair k=" << c.half; break;
            case Constraint::Kind::Fix: out << "fix value=" << c.value; break;
            case Constraint::Kind::Less: out << "less"; break;
            case Constraint::Kind::MixedEdgeFlag: out << "mixedflag"; break;
            case Constraint::Kind::WindowFlag: out << "windowflag"; break;
        }
        out << " vars";
        for (int v : c.vars) out << ' ' << v;
        out << "\n";
    }
    return out.str();
}

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Residue arithmetic over Z_m packed in one 64-bit word (m <= 64):
// rotate_left(mask, s) within m bits is addition of s to every element.
inline std::uint64_t rot_residues(std::uint64_t mask, int s, int m) {
    s %= m;
    if (s < 0) s += m;
    std::uint64_t low = m == 64 ? ~0ULL : ((1ULL << m) - 1);
    mask &= low;
    if (s == 0) return mask;
    return ((mask << s) | (mask >> (m - s))) & low;
}

class Propagator {
  public:
    const CspModel& model;
    std::vector<Domain> dom;
    std::vector<std::vector<int>> var_cons;  // var -> constraint indices
    std::vector<int> queued;
    std::vector<int> queue;

    explicit Propagator(const CspModel& m)
        : model(m),
          dom(m.domains),
          var_cons(m.domains.size()),
          queued(m.constraints.size(), 0),
          stamp_(m.domains.size(), -1) {
        for (size_t ci = 0; ci < m.constraints.size(); ++ci)
            for (int v : m.constraints[ci].vars) var_cons[v].push_back(static_cast<int>(ci));
        for (auto& vc : var_cons) {
            std::sort(vc.begin(), vc.end());
            vc.erase(std::unique(vc.begin(), vc.end()), vc.end());
        }
        bijective_.assign(m.constraints.size(), 0);
        for (size_t ci = 0; ci < m.constraints.size(); ++ci) {
            const Constraint& c = m.constraints[ci];
            if (c.kind != Constraint::Kind::AllDifferent) continue;
            Domain uni;
            for (int v : c.vars) uni.unite(m.domains[v]);
            bijective_[ci] = uni.size() == static_cast<int>(c.vars.size());
        }
    }

    // Trail management: domains touched in the current node are saved once.
    std::size_t mark() const { return trail_.size(); }
    void undo_to(std::size_t m) {
        while (trail_.size() > m) {
            dom[trail_.back().var] = trail_.back().saved;
            trail_.pop_back();
        }
    }
    void new_node() { ++node_id_; }

    void push_all() {
        for (size_t ci = 0; ci < model.constraints.size(); ++ci)
            push_constraint(static_cast<int>(ci));
    }
    void push_constraint(int ci) {
        if (!queued[ci]) {
            queued[ci] = 1;
            queue.push_back(ci);
        }
    }
    void touched(int var) {
        for (int ci : var_cons[var]) push_constraint(ci);
    }

    void save(int var) {
        if (stamp_[var] != node_id_) {
            stamp_[var] = node_id_;
            trail_.push_back({var, dom[var]});
        }
    }
    bool erase_value(int var, int v) {  // returns false on wipeout
        if (!dom[var].contains(v)) return true;
        save(var);
        dom[var].erase(v);
        if (dom[var].empty()) return false;
        touched(var);
        return true;
    }
    bool assign_value(int var, int v) {
        if (!dom[var].contains(v)) return false;
        if (dom[var].is_single()) return true;
        save(var);
        dom[var] = Domain::single(v);
        touched(var);
        return true;
    }
    bool restrict_to(int var, const Domain& d) {
        Domain nd = dom[var];
        nd.intersect(d);
        if (nd.empty()) return false;
        if (!(nd == dom[var])) {
            save(var);
            dom[var] = nd;
            touched(var);
        }
        return true;
    }

    bool propagate() {
        while (!queue.empty()) {
            int ci = queue.back();
            queue.pop_back();
            queued[ci] = 0;
            if (!revise(static_cast<size_t>(ci))) {
                for (int q : queue) queued[q] = 0;
                queue.clear();
                return false;
            }
        }
        return true;
    }

  private:
    struct Saved {
        int var;
        Domain saved;
    };
    std::vector<Saved> trail_;
    std::vector<int> stamp_;
    int node_id_ = 0;
    std::vector<char> bijective_;

    bool revise(size_t ci) {
        const Constraint& c = model.constraints[ci];
        switch (c.kind) {
            case Constraint::Kind::AllDifferent: return revise_alldiff(c, bijective_[ci]);
            case Constraint::Kind::Cardinality: return revise_card(c);
            case Constraint::Kind::ModDiffLink: return revise_moddiff(c);
            case Constraint::Kind::HalfPairUse: return revise_halfpair(c);
            case Constraint::Kind::Fix: return assign_value(c.vars[0], c.value);
            case Constraint::Kind::Less: return revise_less(c);
            case Constraint::Kind::MixedEdgeFlag: return revise_mixedflag(c);
            case Constraint::Kind::WindowFlag: return revise_windowflag(c);
        }
        return true;
    }

    bool revise_alldiff(const Constraint& c, bool bijective) {
        // Assigned-value elimination to fixpoint within the constraint.
        bool changed = true;
        while (changed) {
            changed = false;
            for (int v : c.vars) {
                if (!dom[v].is_single()) continue;
                int val = dom[v].single_value();
                for (int u : c.vars) {
                    if (u == v) continue;
                    if (dom[u].contains(val)) {
                        if (!erase_value(u, val)) return false;
                        changed = true;
                    }
                }
            }
        }
        // Pigeonhole over the union of unassigned domains.
        Domain uni;
        int unassigned = 0;
        for (int v : c.vars)
            if (!dom[v].is_single()) {
                uni.unite(dom[v]);
                ++unassigned;
            }
        if (uni.size() < unassigned) return false;
        // Bijective case (as many values as variables): every value must be
        // used, so a value supported by a single variable pins it.
        if (bijective) {
            Domain all = uni;
            for (int v : c.vars)
                if (dom[v].is_single()) all.unite(dom[v]);
            for (int val = all.first(); val >= 0; val = all.next(val)) {
                int holder = -1, supports = 0;
                for (int v : c.vars) {
                    if (dom[v].contains(val)) {
                        holder = v;
                        if (++supports > 1) break;
                    }
                }
                if (supports == 0) return false;
                if (supports == 1 && !dom[holder].is_single()) {
                    if (!assign_value(holder, val)) return false;
                }
            }
        }
        return true;
    }

    bool revise_card(const Constraint& c) {
        int fixed = 0, possible = 0;
        for (int v : c.vars) {
            if (!dom[v].contains(c.value)) continue;
            ++possible;
            if (dom[v].is_single()) ++fixed;
        }
        if (possible < c.count) return false;
        if (!c.at_least && fixed > c.count) return false;
        if (!c.at_least && fixed == c.count && possible > fixed) {
            for (int v : c.vars)
                if (!dom[v].is_single() && dom[v].contains(c.value))
                    if (!erase_value(v, c.value)) return false;
        }
        if (possible == c.count && fixed < possible) {
            for (int v : c.vars)
                if (dom[v].contains(c.value) && !dom[v].is_single())
                    if (!assign_value(v, c.value)) return false;
        }
        return true;
    }

    // Residue bitmask of a domain modulo m (m <= 64).
    std::uint64_t residues(int var, int m) const {
        std::uint64_t out = 0;
        const Domain& d = dom[var];
        for (int v = d.first(); v >= 0; v = d.next(v)) out |= 1ULL << (v % m);
        return out;
    }
    bool keep_by_residue(int var, std::uint64_t allowed, int m) {
        Domain keep;
        bool drop = false;
        const Domain& d = dom[var];
        for (int v = d.first(); v >= 0; v = d.next(v)) {
            if (allowed >> (v % m) & 1)
                keep.insert(v);
            else
                drop = true;
        }
        if (!drop) return true;
        return restrict_to(var, keep);
    }

    bool revise_moddiff(const Constraint& c) {
        int d = c.vars[0], x = c.vars[1], y = c.vars[2];
        int m = c.modulus, off = c.offset;
        if (m <= 64) {
            // Residue-level arc consistency via 64-bit rotations:
            // d = x - y + off, x = d + y - off, y = x - d + off (all mod m).
            auto negate = [&](std::uint64_t mask) {
                std::uint64_t out = 0, rest = mask;
                while (rest) {
                    int bit = std::countr_zero(rest);
                    rest &= rest - 1;
                    out |= 1ULL << ((m - bit) % m);
                }
                return out;
            };
            auto spread = [&](std::uint64_t points, std::uint64_t base, int shift) {
                std::uint64_t out = 0, rest = points;
                while (rest) {
                    int bit = std::countr_zero(rest);
                    rest &= rest - 1;
                    out |= rot_residues(base, bit + shift, m);
                }
                return out;
            };
            // d must equal the reduced difference, so values of d outside
            // [0, m) are never satisfiable.
            if (!restrict_to(d, Domain::range(0, m))) return false;
            std::uint64_t rx = residues(x, m), ry = residues(y, m);
            if (!keep_by_residue(d, spread(rx, negate(ry), off), m)) return false;
            std::uint64_t rd = residues(d, m);
            if (!keep_by_residue(x, spread(ry, rd, -off), m)) return false;
            rx = residues(x, m);
            if (!keep_by_residue(y, spread(rx, negate(rd), off), m)) return false;
            return true;
        }
        // Large moduli: bounded pairwise filtering.
        auto red = [m](int v) { return ((v % m) + m) % m; };
        if (dom[x].size() * dom[y].size() <= 4096) {
            Domain feas;
            for (int a = dom[x].first(); a >= 0; a = dom[x].next(a))
                for (int b = dom[y].first(); b >= 0; b = dom[y].next(b))
                    feas.insert(red(a - b + off));
            if (!restrict_to(d, feas)) return false;
            Domain keep_x;
            for (int a = dom[x].first(); a >= 0; a = dom[x].next(a))
                for (int b = dom[y].first(); b >= 0; b = dom[y].next(b))
                    if (dom[d].contains(red(a - b + off))) {
                        keep_x.insert(a);
                        break;
                    }
            if (!restrict_to(x, keep_x)) return false;
            Domain keep_y;
            for (int b = dom[y].first(); b >= 0; b = dom[y].next(b))
                for (int a = dom[x].first(); a >= 0; a = dom[x].next(a))
                    if (dom[d].contains(red(a - b + off))) {
                        keep_y.insert(b);
                        break;
                    }
            if (!restrict_to(y, keep_y)) return false;
        }
        return true;
    }

    bool revise_less(const Constraint& c) {
        int u = c.vars[0], v = c.vars[1];
        int vmax = -1, umin = Domain::kMax;
        for (int x = dom[v].first(); x >= 0; x = dom[v].next(x)) vmax = x;
        umin = dom[u].first();
        Domain keep_u;
        for (int x = dom[u].first(); x >= 0; x = dom[u].next(x))
            if (x < vmax) keep_u.insert(x);
        if (!restrict_to(u, keep_u)) return false;
        Domain keep_v;
        for (int x = dom[v].first(); x >= 0; x = dom[v].next(x))
            if (x > umin) keep_v.insert(x);
        return restrict_to(v, keep_v);
    }

    bool revise_halfpair(const Constraint& c) {
        int k = c.half;
        // Assigned value kills its partner everywhere.
        for (int v : c.vars) {
            if (!dom[v].is_single()) continue;
            int val = dom[v].single_value();
            int partner = val < k ? val + k : val - k;
            for (int u : c.vars)
                if (dom[u].contains(partner))
                    if (!erase_value(u, partner)) return false;
        }
        // A pair with both values unreachable is a wipeout.
        Domain uni;
        for (int v : c.vars) uni.unite(dom[v]);
        for (int x = 0; x < k; ++x)
            if (!uni.contains(x) && !uni.contains(x + k)) return false;
        return true;
    }

    bool set_bool(int var, int val) {
        if (!dom[var].contains(val)) return false;
        return assign_value(var, val);
    }

    bool revise_mixedflag(const Constraint& c) {
        int b = c.vars[0], cx = c.vars[1], cy = c.vars[2];
        bool x0 = dom[cx].contains(0), x1 = dom[cx].contains(1);
        bool y0 = dom[cy].contains(0), y1 = dom[cy].contains(1);
        if (!x0 || !y1) {  // (0,1) impossible
            if (!set_bool(b, 0)) return false;
        } else if (!x1 && !y0) {  // forced (0,1)
            if (!set_bool(b, 1)) return false;
        }
        if (dom[b].is_single()) {
            if (dom[b].single_value() == 1) {
                if (!set_bool(cx, 0) || !set_bool(cy, 1)) return false;
            } else {
                if (!x1 && y1) {  // cx == 0, so cy must avoid 1
                    if (!set_bool(cy, 0)) return false;
                }
                if (!y0 && x0) {  // cy == 1, so cx must avoid 0
                    if (!set_bool(cx, 1)) return false;
                }
            }
        }
        return true;
    }

    bool revise_windowflag(const Constraint& c) {
        int b = c.vars[0];
        const int want[4] = {0, 0, 1, 1};
        int mismatch = -1, undecided = -1, nundecided = 0;
        for (int i = 0; i < 4; ++i) {
            int v = c.vars[1 + i];
            if (dom[v].is_single()) {
                if (dom[v].single_value() != want[i]) mismatch = i;
            } else {
                undecided = i;
                ++nundecided;
            }
        }
        if (mismatch >= 0) return set_bool(b, 0);
        if (nundecided == 0) return set_bool(b, 1);
        if (dom[b].is_single()) {
            if (dom[b].single_value() == 1) {
                for (int i = 0; i < 4; ++i)
                    if (!set_bool(c.vars[1 + i], want[i])) return false;
            } else if (nundecided == 1) {
                if (!set_bool(c.vars[1 + undecided], 1 - want[undecided])) return false;
            }
        }
        return true;
    }
};

}  // namespace detail

// Complete backtracking search with propagation. Deterministic for a fixed
// (model, seed). Infeasible is only reported after exhausting the space;
// budget_ms == 0 means no time limit.
class CspSolver {
  public:
    static SearchOutcome solve(const CspModel& model, double budget_ms = 0.0,
                               std::uint64_t seed = 0) {
        model.validate();
        auto t0 = std::chrono::steady_clock::now();
        SearchOutcome out;
        if (model.domains.empty()) {
            out.status = SearchOutcome::Status::Solution;
            return out;
        }

        // Restart ladder: node-limited probes with seeded value orders, then
        // one unbounded run. A probe that exhausts the space under its node
        // limit is itself a proof of infeasibility.
        static constexpr std::int64_t kProbeLimits[] = {500,   1000,  2000,  4000,  8000,
                                                        16000, 32000, 64000, 128000, 256000};
        int restart = 0;
        while (true) {
            std::int64_t limit =
                restart < static_cast<int>(std::size(kProbeLimits)) ? kProbeLimits[restart] : 0;
            RunOutcome run = run_once(model, budget_ms, seed, restart, limit, t0, out.nodes,
                                      out.backtracks);
            out.nodes = run.nodes;
            out.backtracks = run.backtracks;
            out.elapsed_ms = elapsed(t0);
            if (run.status == SearchOutcome::Status::Solution) {
                out.status = run.status;
                out.assignment = std::move(run.assignment);
                return out;
            }
            if (run.status == SearchOutcome::Status::Infeasible && !run.hit_node_limit) {
                out.status = SearchOutcome::Status::Infeasible;
                return out;
            }
            if (budget_ms > 0 && elapsed(t0) >= budget_ms) {
                out.status = SearchOutcome::Status::BudgetExhausted;
                return out;
            }
            ++restart;
        }
    }

  private:
    struct RunOutcome : SearchOutcome {
        bool hit_node_limit = false;
    };

    static double elapsed(std::chrono::steady_clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }

    static RunOutcome run_once(const CspModel& model, double budget_ms, std::uint64_t seed,
                               int restart, std::int64_t node_limit,
                               std::chrono::steady_clock::time_point t0, std::int64_t nodes0,
                               std::int64_t backtracks0) {
        RunOutcome out;
        out.nodes = nodes0;
        out.backtracks = backtracks0;

        detail::Propagator prop(model);
        prop.push_all();
        if (!prop.propagate()) {
            out.status = SearchOutcome::Status::Infeasible;
            return out;
        }

        struct Frame {
            std::size_t trail_mark;
            int var;
            std::vector<int> values;
            size_t next;
        };
        std::vector<Frame> stack;
        std::int64_t run_nodes = 0;

        const std::vector<int>& decisions =
            model.decision_vars.empty() ? all_vars(model) : model.decision_vars;

        auto pick_var = [&]() {
            int best = -1, best_size = Domain::kMax + 1;
            if (model.branch_order == CspModel::BranchOrder::Static) {
                for (int v : decisions)
                    if (!prop.dom[v].is_single()) return v;
            } else {
                for (int v : decisions) {
                    int s = prop.dom[v].size();
                    if (s > 1 && s < best_size) {
                        best = v;
                        best_size = s;
                    }
                }
                if (best >= 0) return best;
            }
            for (size_t v = 0; v < prop.dom.size(); ++v) {
                int s = prop.dom[v].size();
                if (s > 1 && s < best_size) {
                    best = static_cast<int>(v);
                    best_size = s;
                }
            }
            return best;
        };
        auto order_values = [&](int var, std::vector<int>& vals) {
            vals.clear();
            for (int v = prop.dom[var].first(); v >= 0; v = prop.dom[var].next(v))
                vals.push_back(v);
            if (restart > 0 || seed != 0) {
                std::uint64_t st = detail::mix64(
                    seed ^ detail::mix64(static_cast<std::uint64_t>(restart) * 1315423911ULL ^
                                         static_cast<std::uint64_t>(var)));
                for (size_t i = vals.size(); i > 1; --i) {
                    st = detail::mix64(st);
                    std::swap(vals[i - 1], vals[st % i]);
                }
            }
        };

        auto open_frame = [&](int var) {
            Frame f;
            f.trail_mark = prop.mark();
            f.var = var;
            order_values(var, f.values);
            f.next = 0;
            stack.push_back(std::move(f));
        };

        auto emit_solution = [&]() {
            out.status = SearchOutcome::Status::Solution;
            out.assignment.resize(prop.dom.size());
            for (size_t v = 0; v < prop.dom.size(); ++v)
                out.assignment[v] = prop.dom[v].single_value();
        };

        int var0 = pick_var();
        if (var0 < 0) {
            emit_solution();
            return out;
        }
        open_frame(var0);

        while (!stack.empty()) {
            Frame& f = stack.back();
            prop.undo_to(f.trail_mark);
            if (f.next >= f.values.size()) {
                stack.pop_back();
                out.backtracks++;
                continue;
            }
            int val = f.values[f.next++];
            out.nodes++;
            run_nodes++;

            if (node_limit > 0 && run_nodes > node_limit) {
                out.hit_node_limit = true;
                out.status = SearchOutcome::Status::Infeasible;
                return out;
            }
            if (budget_ms > 0 && (run_nodes & 63) == 0 && elapsed(t0) >= budget_ms) {
                out.status = SearchOutcome::Status::BudgetExhausted;
                return out;
            }

            prop.new_node();
            if (!prop.assign_value(f.var, val)) continue;
            if (!prop.propagate()) continue;

            int var = pick_var();
            if (var < 0) {
                emit_solution();
                return out;
            }
            open_frame(var);
        }
        out.status = SearchOutcome::Status::Infeasible;
        return out;
    }

    static const std::vector<int>& all_vars(const CspModel& model) {
        thread_local std::vector<int> cache;
        cache.resize(model.domains.size());
        for (size_t i = 0; i < cache.size(); ++i) cache[i] = static_cast<int>(i);
        return cache;
    }
};

}  // namespace obw
