#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace obw {

// One table of a meal: either a triplet (K3 adjacencies) or a 5-cycle in
// canonical form (minimal rotation/reflection). Adjacencies are stored as a
// bitmask over the C(labels,2) unordered pairs.
struct SeatingBlock {
    enum class Kind { Triplet, FiveCycle };
    Kind kind;
    std::vector<int> labels;     // triplet: sorted; 5-cycle: canonical order
    std::uint64_t adjacency = 0; // bit per unordered pair
};

namespace op335detail {

inline int pair_index(int a, int b, int labels) {
    if (a > b) std::swap(a, b);
    return a * labels - a * (a + 1) / 2 + (b - a - 1);
}

inline std::uint64_t cycle_adjacency(const std::vector<int>& cyc, int labels) {
    std::uint64_t mask = 0;
    int k = static_cast<int>(cyc.size());
    for (int i = 0; i < k; ++i)
        mask |= std::uint64_t{1} << pair_index(cyc[i], cyc[(i + 1) % k], labels);
    return mask;
}

// Canonical form of a cyclic sequence up to rotation and reflection.
inline std::vector<int> canonical_cycle(std::vector<int> cyc) {
    int k = static_cast<int>(cyc.size());
    std::vector<int> best;
    for (int rev = 0; rev < 2; ++rev) {
        for (int r = 0; r < k; ++r) {
            std::vector<int> cand(k);
            for (int i = 0; i < k; ++i) cand[i] = cyc[(r + i) % k];
            if (best.empty() || cand < best) best = cand;
        }
        std::reverse(cyc.begin(), cyc.end());
    }
    return best;
}

}  // namespace op335detail

// All C(11,3) = 165 triplets over 11 labels.
inline std::vector<SeatingBlock> enumerate_triplets(int labels = 11) {
    std::vector<SeatingBlock> out;
    for (int a = 0; a < labels; ++a)
        for (int b = a + 1; b < labels; ++b)
            for (int c = b + 1; c < labels; ++c) {
                SeatingBlock blk{SeatingBlock::Kind::Triplet, {a, b, c}, 0};
                blk.adjacency = op335detail::cycle_adjacency(blk.labels, labels);
                out.push_back(std::move(blk));
            }
    return out;
}

// All C(11,5) * 12 = 5544 labeled 5-cycles with distinct adjacencies:
// 462 label sets, 12 cyclic arrangements each (up to rotation/reflection).
inline std::vector<SeatingBlock> enumerate_five_cycles(int labels = 11) {
    std::vector<SeatingBlock> out;
    std::vector<int> set(5);
    for (set[0] = 0; set[0] < labels; ++set[0])
        for (set[1] = set[0] + 1; set[1] < labels; ++set[1])
            for (set[2] = set[1] + 1; set[2] < labels; ++set[2])
                for (set[3] = set[2] + 1; set[3] < labels; ++set[3])
                    for (set[4] = set[3] + 1; set[4] < labels; ++set[4]) {
                        // Fix the smallest label first; enumerate arrangements of the
                        // rest, keeping one representative per reflection.
                        std::array<int, 4> rest{set[1], set[2], set[3], set[4]};
                        std::sort(rest.begin(), rest.end());
                        do {
                            if (rest[0] > rest[3]) continue;  // reflection representative
                            std::vector<int> cyc{set[0], rest[0], rest[1], rest[2], rest[3]};
                            SeatingBlock blk{SeatingBlock::Kind::FiveCycle,
                                             op335detail::canonical_cycle(cyc), 0};
                            blk.adjacency = op335detail::cycle_adjacency(blk.labels, labels);
                            out.push_back(std::move(blk));
                        } while (std::next_permutation(rest.begin(), rest.end()));
                    }
    return out;
}

struct Certificate {
    enum class Status { Infeasible, Feasible, BudgetExhausted };
    Status status = Status::Infeasible;
    std::int64_t nodes = 0;
    double elapsed_ms = 0.0;
    int day_configs = 0;     // distinct one-meal arrangements considered
    bool day1_fixed = true;  // symmetry reduction applied
};

namespace op335detail {

struct DayConfig {
    std::uint64_t mask;  // 11 adjacency pairs for [3,3,5]; 9 for all-triplets
};

// All one-meal arrangements: one 5-cycle plus two disjoint triplets
// partitioning the 11 labels (or a triplet partition for the all-triplet
// reduced instance on 9 labels).
inline std::vector<DayConfig> day_configs_335() {
    std::vector<DayConfig> out;
    auto fives = enumerate_five_cycles(11);
    for (const SeatingBlock& f : fives) {
        int used = 0;
        for (int l : f.labels) used |= 1 << l;
        std::vector<int> rest;
        for (int l = 0; l < 11; ++l)
            if (!(used & (1 << l))) rest.push_back(l);
        // Partition the 6 leftovers into two unordered triplets: anchor the
        // smallest, choose its two companions.
        for (int i = 1; i < 6; ++i)
            for (int j = i + 1; j < 6; ++j) {
                std::vector<int> t1{rest[0], rest[i], rest[j]}, t2;
                for (int q = 1; q < 6; ++q)
                    if (q != i && q != j) t2.push_back(rest[q]);
                std::uint64_t mask = f.adjacency | cycle_adjacency(t1, 11) | cycle_adjacency(t2, 11);
                out.push_back({mask});
            }
    }
    return out;
}

inline std::vector<DayConfig> day_configs_triplets9() {
    std::vector<DayConfig> out;
    // Partitions of 9 labels into three unordered triplets.
    std::vector<int> all(9);
    for (int i = 0; i < 9; ++i) all[i] = i;
    for (int i = 1; i < 9; ++i)
        for (int j = i + 1; j < 9; ++j) {
            std::vector<int> t1{0, i, j}, rest;
            for (int q = 1; q < 9; ++q)
                if (q != i && q != j) rest.push_back(q);
            for (int a = 1; a < 6; ++a)
                for (int b = a + 1; b < 6; ++b) {
                    std::vector<int> t2{rest[0], rest[a], rest[b]}, t3;
                    for (int q = 1; q < 6; ++q)
                        if (q != a && q != b) t3.push_back(rest[q]);
                    std::uint64_t mask = cycle_adjacency(t1, 9) | cycle_adjacency(t2, 9) |
                                         cycle_adjacency(t3, 9);
                    out.push_back({mask});
                }
        }
    return out;
}

struct SeatingSearch {
    const std::vector<DayConfig>& configs;
    int days;
    std::uint64_t full_mask;
    std::int64_t nodes = 0;
    std::int64_t node_budget;
    bool budget_hit = false;
    std::vector<std::vector<int>> by_pair;  // pair bit -> configs covering it

    void index_pairs(int npairs) {
        by_pair.assign(npairs, {});
        for (size_t i = 0; i < configs.size(); ++i)
            for (int p = 0; p < npairs; ++p)
                if (configs[i].mask >> p & 1) by_pair[p].push_back(static_cast<int>(i));
    }

    // Exact cover of the pair set by `days` disjoint configurations: always
    // branch on the lowest uncovered pair, which also makes the meal order
    // canonical.
    bool rec(int day, std::uint64_t used) {
        if (day == days) return used == full_mask;
        std::uint64_t uncovered = full_mask & ~used;
        if (uncovered == 0) return false;  // too few pairs left for remaining days
        int p = std::countr_zero(uncovered);
        for (int ci : by_pair[p]) {
            if (configs[ci].mask & used) continue;
            if (++nodes > node_budget) {
                budget_hit = true;
                return false;
            }
            if (rec(day + 1, used | configs[ci].mask)) return true;
            if (budget_hit) return false;
        }
        return false;
    }
};

}  // namespace op335detail

// Complete search for a solution of OP(^2 3, 5): five meals, each one
// 5-cycle plus two disjoint triplets over 11 labels, every pair adjacent
// exactly once. Day 1 may be pinned to a canonical arrangement (vertex
// relabeling maps any solution to one through it).
inline Certificate prove_infeasible(double budget_ms = 60000.0, bool fix_day1 = true) {
    auto t0 = std::chrono::steady_clock::now();
    auto configs = op335detail::day_configs_335();
    Certificate cert;
    cert.day_configs = static_cast<int>(configs.size());
    cert.day1_fixed = fix_day1;
    std::uint64_t full = (std::uint64_t{1} << (11 * 10 / 2)) - 1;
    op335detail::SeatingSearch search{configs, 5, full, 0,
                                      static_cast<std::int64_t>(4e18), false, {}};
    search.index_pairs(11 * 10 / 2);
    bool found;
    if (fix_day1) {
        // Canonical day 1: 5-cycle (0,1,2,3,4) + triplets {5,6,7}, {8,9,10}.
        std::vector<int> c5{0, 1, 2, 3, 4}, t1{5, 6, 7}, t2{8, 9, 10};
        std::uint64_t day1 = op335detail::cycle_adjacency(c5, 11) |
                             op335detail::cycle_adjacency(t1, 11) |
                             op335detail::cycle_adjacency(t2, 11);
        found = search.rec(1, day1);
    } else {
        found = search.rec(0, 0);
    }
    cert.nodes = search.nodes;
    cert.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (search.budget_hit || (budget_ms > 0 && cert.elapsed_ms > budget_ms))
        cert.status = Certificate::Status::BudgetExhausted;
    else
        cert.status = found ? Certificate::Status::Feasible : Certificate::Status::Infeasible;
    return cert;
}

// Same engine on the 9-label all-triplet analog (a Kirkman-type system
// exists, so the search must come back feasible).
inline Certificate search_triplets9(bool fix_day1 = true) {
    auto t0 = std::chrono::steady_clock::now();
    auto configs = op335detail::day_configs_triplets9();
    Certificate cert;
    cert.day_configs = static_cast<int>(configs.size());
    cert.day1_fixed = fix_day1;
    std::uint64_t full = (std::uint64_t{1} << (9 * 8 / 2)) - 1;
    op335detail::SeatingSearch search{configs, 4, full, 0,
                                      static_cast<std::int64_t>(4e18), false, {}};
    search.index_pairs(9 * 8 / 2);
    bool found;
    if (fix_day1) {
        std::vector<int> t1{0, 1, 2}, t2{3, 4, 5}, t3{6, 7, 8};
        std::uint64_t day1 = op335detail::cycle_adjacency(t1, 9) |
                             op335detail::cycle_adjacency(t2, 9) |
                             op335detail::cycle_adjacency(t3, 9);
        found = search.rec(1, day1);
    } else {
        found = search.rec(0, 0);
    }
    cert.nodes = search.nodes;
    cert.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    cert.status = found ? Certificate::Status::Feasible : Certificate::Status::Infeasible;
    return cert;
}

// Text dump of the 0-1 selection system: variables per (block, day), one
// 5-cycle and two triplets per day, one seat per label per day, every pair
// adjacent exactly once across days.
inline std::string emit_op335_model() {
    std::ostringstream out;
    auto triplets = enumerate_triplets(11);
    auto fives = enumerate_five_cycles(11);
    out << "labels 11\ndays 5\n";
    out << "five_cycles " << fives.size() << "\n";
    out << "triplets " << triplets.size() << "\n";
    out << "vars F[i,d] i=1.." << fives.size() << " d=1..5 binary\n";
    out << "vars T[j,d] j=1.." << triplets.size() << " d=1..5 binary\n";
    out << "for each d: sum_i F[i,d] = 1\n";
    out << "for each d: sum_j T[j,d] = 2\n";
    out << "for each d, label l: sum_i F[i,d]*fl[i,l] + sum_j T[j,d]*tl[j,l] = 1\n";
    out << "for each pair {a,b}: sum_d (sum_i F[i,d]*fa[i,a,b] + sum_j T[j,d]*ta[j,a,b]) = 1\n";
    for (size_t i = 0; i < fives.size(); ++i) {
        out << "five " << i + 1 << ":";
        for (int l : fives[i].labels) out << ' ' << l;
        out << "\n";
    }
    for (size_t j = 0; j < triplets.size(); ++j) {
        out << "triplet " << j + 1 << ":";
        for (int l : triplets[j].labels) out << ' ' << l;
        out << "\n";
    }
    return out.str();
}

}  // namespace obw
