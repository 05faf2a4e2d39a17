// Command-line front end: instance enumeration, single and batch solving,
// verification, and the OP(3,3,5) non-existence certificate.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "obw/op335.hpp"
#include "obw/pipeline.hpp"

using namespace obw;
namespace fs = std::filesystem;

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("OBW_OUT");
    return env && *env ? env : "obw-out";
}

int cmd_partitions(int order, int min_cycles, bool list, bool json) {
    if (json) {
        nlohmann::json j;
        j["order"] = order;
        j["min_cycles"] = min_cycles;
        j["count"] = count_cycle_types(order, min_cycles);
        if (list) {
            auto arr = nlohmann::json::array();
            enumerate_cycle_types(order, min_cycles,
                                  [&](const CycleType& ct) { arr.push_back(format_cycle_type(ct)); });
            j["types"] = arr;
        }
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    if (list)
        enumerate_cycle_types(order, min_cycles,
                              [](const CycleType& ct) { std::cout << format_cycle_type(ct) << "\n"; });
    std::cout << count_cycle_types(order, min_cycles) << "\n";
    return 0;
}

int write_and_verify(const SolutionRecord& rec, const std::string& out_path, bool json) {
    std::string text = serialize(rec);
    // Round trip through the file before declaring success.
    {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "cannot write " << out_path << "\n";
            return 1;
        }
        out << text;
    }
    std::ifstream in(out_path);
    std::string back((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    SolutionRecord rt = deserialize(back);
    VerifyReport vr = verify_factorization(rt.order, rt.type, rt.fz);
    if (!vr.pass) {
        std::cerr << "round-trip verification failed: " << vr.violation << "\n";
        return 1;
    }
    if (json) {
        nlohmann::json j = to_json(rec);
        j["file"] = out_path;
        j["verified"] = true;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "solved " << format_cycle_type(rec.type) << " (order " << rec.order
                  << ") via " << rec.method << ", verified, written to " << out_path << "\n";
    }
    return 0;
}

int cmd_solve(const std::string& type_text, const std::string& method, double budget_ms,
              std::uint64_t seed, std::string out, bool json, const std::string& emit_model) {
    CycleType ct = parse_cycle_type(type_text);
    if (is_known_unsolvable(ct)) {
        std::cout << "known unsolvable: OP(" << format_cycle_type(ct) << ") has no solution\n";
        return 1;
    }
    if (!emit_model.empty()) {
        // Dump the constraint model this instance would be solved with.
        std::ofstream m(emit_model);
        int v = ct.order();
        if (v % 4 == 1 && check_necessary(ct).ok) {
            m << dump_model(build_fstar_model(reduce_to_fstar(ct)).model);
        } else if (v % 4 == 3) {
            int n = (v - 1) / 2;
            RotStructure st = make_structure(ct, n);
            m << dump_model(build_blp_model(st, n, n));
            auto bl = blp_solve_patterns(st, n, n);
            if (bl) m << dump_model(glp_build_model(*bl).model);
        } else if (v % 4 == 1) {
            int n = (v - 1) / 2;
            RotStructure st = make_structure(ct, n);
            m << dump_model(build_blp_model(st, n, n - 1));
        } else {
            m << "derived order: no direct model (solved from order " << v - 1 << " bases)\n";
        }
    }

    SolveResult res;
    BaseCache cache;
    PipelineOptions opts{budget_ms, seed};
    if (method == "auto") {
        res = solve_instance(ct, opts, &cache);
    } else if (method == "1rot") {
        if (ct.order() % 4 != 1) {
            std::cerr << "1rot applies to orders 1 mod 4\n";
            return 2;
        }
        OneRotResult r = solve_one_rotational(ct, {budget_ms, seed, std::nullopt});
        if (r.status == OneRotResult::Status::Solved) {
            res.status = SolveStatus::Solved;
            SolutionRecord rec{ct.order(), ct, "1rot", expand_one_rotational(*r.factor)};
            res.record = rec;
        } else {
            res.status = SolveStatus::Failed;
            res.detail = r.status == OneRotResult::Status::Infeasible
                             ? "no 1-rotational starter exists"
                             : "budget exhausted";
        }
    } else if (method == "2rot") {
        TwoRotResult r;
        if (ct.order() % 4 == 3)
            r = solve_two_rotational_odd(ct, {budget_ms, seed, -1, 4});
        else if (ct.order() % 4 == 1)
            r = solve_two_rotational_even(ct, {budget_ms, seed, -1, 3});
        else {
            std::cerr << "2rot applies to odd orders\n";
            return 2;
        }
        if (r.status == TwoRotResult::Status::Solved) {
            res.status = SolveStatus::Solved;
            std::string m = ct.order() % 4 == 3 ? "2rot-odd" : "2rot-even";
            SolutionRecord rec{ct.order(), ct, m, expand_two_rotational(*r.factor)};
            res.record = rec;
        } else {
            res.status = SolveStatus::Failed;
            res.detail = r.status == TwoRotResult::Status::Infeasible ? "no starter found"
                                                                      : "budget exhausted";
        }
    } else {
        std::cerr << "unknown method " << method << "\n";
        return 2;
    }

    switch (res.status) {
        case SolveStatus::Solved: break;
        case SolveStatus::KnownUnsolvable:
            std::cout << "known unsolvable\n";
            return 1;
        case SolveStatus::Unsupported:
            std::cout << "unsupported: " << res.detail << "\n";
            return 1;
        case SolveStatus::Failed:
            std::cout << "failed: " << res.detail << "\n";
            return 1;
    }
    VerifyReport vr = verify_factorization(res.record->order, res.record->type, res.record->fz);
    if (!vr.pass) {
        std::cerr << "internal verification failed: " << vr.violation << "\n";
        return 1;
    }
    if (out.empty()) {
        fs::create_directories(default_out_dir());
        out = (fs::path(default_out_dir()) / (format_cycle_type(ct) + ".obw")).string();
    }
    return write_and_verify(*res.record, out, json);
}

int cmd_solve_order(int order, int min_cycles, int jobs, double budget_ms, std::uint64_t seed,
                    const std::string& out, bool json) {
    BaseCache cache;
    BatchReport rep = solve_order(order, min_cycles, jobs, {budget_ms, seed}, &cache, out, true);
    if (json) {
        nlohmann::json j;
        j["order"] = rep.order;
        j["min_cycles"] = rep.min_cycles;
        j["total"] = rep.total;
        j["solved"] = rep.solved;
        j["known_unsolvable"] = rep.known_unsolvable;
        j["unsupported"] = rep.unsupported;
        j["failed"] = rep.failed;
        j["by_method"] = rep.solved_by_method;
        j["wall_ms"] = rep.wall_ms;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "order " << rep.order << ": " << rep.total << " instances, " << rep.solved
                  << " solved";
        for (const auto& [m, c] : rep.solved_by_method) std::cout << " [" << m << " " << c << "]";
        if (rep.known_unsolvable) std::cout << ", " << rep.known_unsolvable << " known unsolvable";
        if (rep.unsupported) std::cout << ", " << rep.unsupported << " unsupported";
        if (rep.failed) std::cout << ", " << rep.failed << " FAILED";
        std::cout << ", wall " << rep.wall_ms / 1000.0 << " s\n";
        for (const auto& [name, status] : rep.outcomes)
            if (status == SolveStatus::Unsupported) std::cout << "  unsupported: " << name << "\n";
        for (const auto& [name, status] : rep.outcomes)
            if (status == SolveStatus::Failed) std::cout << "  FAILED: " << name << "\n";
    }
    return rep.failed == 0 ? 0 : 1;
}

int cmd_verify(const std::string& file, bool json) {
    std::ifstream in(file);
    if (!in) {
        std::cerr << "cannot read " << file << "\n";
        return 2;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        SolutionRecord rec = deserialize(text);
        VerifyReport vr = verify_factorization(rec.order, rec.type, rec.fz);
        if (json) {
            nlohmann::json j;
            j["file"] = file;
            j["pass"] = vr.pass;
            if (!vr.pass) j["violation"] = vr.violation;
            std::cout << j.dump(2) << "\n";
        } else if (vr.pass) {
            std::cout << "PASS: valid 2-factorization for OP(" << format_cycle_type(rec.type)
                      << "), order " << rec.order << "\n";
        } else {
            std::cout << "FAIL: " << vr.violation << "\n";
        }
        return vr.pass ? 0 : 1;
    } catch (const ParseError& e) {
        std::cout << "FAIL: " << e.what() << "\n";
        return 1;
    }
}

int cmd_prove335(double budget_ms, bool no_symmetry, bool json, const std::string& emit_model) {
    if (!emit_model.empty()) {
        std::ofstream m(emit_model);
        m << emit_op335_model();
    }
    Certificate cert = prove_infeasible(budget_ms, !no_symmetry);
    std::string status = cert.status == Certificate::Status::Infeasible ? "infeasible"
                         : cert.status == Certificate::Status::Feasible ? "feasible"
                                                                        : "budget-exhausted";
    if (json) {
        nlohmann::json j;
        j["status"] = status;
        j["nodes"] = cert.nodes;
        j["elapsed_ms"] = cert.elapsed_ms;
        j["day_configurations"] = cert.day_configs;
        j["day1_fixed"] = cert.day1_fixed;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "OP(3^2,5): " << status << " (" << cert.nodes << " nodes, "
                  << cert.elapsed_ms / 1000.0 << " s, " << cert.day_configs
                  << " one-meal configurations" << (cert.day1_fixed ? ", day 1 pinned" : "")
                  << ")\n";
    }
    return cert.status == Certificate::Status::Infeasible ? 0 : 1;
}

int cmd_bench(int from, int to, int min_cycles, int jobs, double budget_ms, std::uint64_t seed,
              const std::string& out, bool json) {
    BaseCache cache;
    nlohmann::json rows = nlohmann::json::array();
    if (!json) std::cout << "order  partitions  solved  unsup  failed  wall(s)  avg(ms)\n";
    int bad = 0;
    for (int v = from; v <= to; ++v) {
        BatchReport rep =
            solve_order(v, min_cycles, jobs, {budget_ms, seed}, &cache, out, !out.empty());
        double avg = rep.total ? rep.sum_solve_ms / rep.total : 0.0;
        if (json) {
            nlohmann::json j;
            j["order"] = v;
            j["partitions"] = rep.total;
            j["solved"] = rep.solved;
            j["known_unsolvable"] = rep.known_unsolvable;
            j["unsupported"] = rep.unsupported;
            j["failed"] = rep.failed;
            j["by_method"] = rep.solved_by_method;
            j["wall_ms"] = rep.wall_ms;
            j["avg_ms"] = avg;
            rows.push_back(j);
        } else {
            std::printf("%5d  %10d  %6d  %5d  %6d  %7.1f  %7.1f\n", v, rep.total, rep.solved,
                        rep.unsupported, rep.failed, rep.wall_ms / 1000.0, avg);
            std::fflush(stdout);
        }
        bad += rep.failed;
    }
    if (json) std::cout << rows.dump(2) << "\n";
    return bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Oberwolfach Problem solver: rotational 2-factorizations of complete graphs"};
    app.require_subcommand(1);

    int order = 0, min_cycles = 1, jobs = static_cast<int>(std::thread::hardware_concurrency());
    double budget_ms = 0.0;
    std::uint64_t seed = 0;
    std::string type_text, method = "auto", out, file, emit_model;
    bool list = false, json = false, no_symmetry = false;
    int from = 40, to = 60;

    auto* partitions = app.add_subcommand("partitions", "enumerate cycle types of one order");
    partitions->add_option("--order", order, "graph order")->required()->check(CLI::Range(3, 10000));
    partitions->add_option("--min-cycles", min_cycles, "minimum number of cycles")
        ->check(CLI::PositiveNumber);
    partitions->add_flag("--list", list, "print each cycle type");
    partitions->add_flag("--json", json);

    auto* solve = app.add_subcommand("solve", "solve one instance and write the solution file");
    solve->add_option("--type", type_text, "cycle type, e.g. \"3^2,5\"")->required();
    solve->add_option("--method", method, "auto|1rot|2rot")
        ->check(CLI::IsMember({"auto", "1rot", "2rot"}));
    solve->add_option("--budget-ms", budget_ms, "time budget per search (0: defaults)");
    solve->add_option("--seed", seed, "search seed");
    solve->add_option("--out", out, "output file (default: $OBW_OUT/<type>.obw)");
    solve->add_option("--emit-model", emit_model, "write the constraint model to this path");
    solve->add_flag("--json", json);

    auto* batch = app.add_subcommand("solve-order", "solve every instance of one order");
    batch->add_option("--order", order, "graph order")->required()->check(CLI::Range(3, 10000));
    batch->add_option("--min-cycles", min_cycles, "minimum number of cycles")
        ->check(CLI::PositiveNumber);
    batch->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    batch->add_option("--budget-ms", budget_ms, "time budget per search (0: defaults)");
    batch->add_option("--seed", seed, "base seed");
    batch->add_option("--out", out, "output directory (default: $OBW_OUT)");
    batch->add_flag("--json", json);

    auto* verify = app.add_subcommand("verify", "verify a solution file");
    verify->add_option("file", file, "solution file")->required();
    verify->add_flag("--json", json);

    auto* prove =
        app.add_subcommand("prove-335", "complete-search certificate that OP(3^2,5) is unsolvable");
    prove->add_option("--budget-ms", budget_ms, "time budget (0: unlimited)");
    prove->add_flag("--no-symmetry", no_symmetry, "disable the day-1 canonical fixing");
    prove->add_option("--emit-model", emit_model, "write the 0-1 selection system to this path");
    prove->add_flag("--json", json);

    auto* bench = app.add_subcommand("bench", "batch report over a range of orders");
    bench->add_option("--from", from, "first order")->required();
    bench->add_option("--to", to, "last order")->required();
    bench->add_option("--min-cycles", min_cycles, "minimum number of cycles (3 matches the tables)");
    bench->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    bench->add_option("--budget-ms", budget_ms, "time budget per search (0: defaults)");
    bench->add_option("--seed", seed, "base seed");
    bench->add_option("--out", out, "also write solution files here");
    bench->add_flag("--json", json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (partitions->parsed()) return cmd_partitions(order, min_cycles, list, json);
        if (solve->parsed())
            return cmd_solve(type_text, method, budget_ms, seed, out, json, emit_model);
        if (batch->parsed()) {
            std::string dir = out.empty() ? default_out_dir() : out;
            return cmd_solve_order(order, min_cycles, jobs, budget_ms, seed, dir, json);
        }
        if (verify->parsed()) return cmd_verify(file, json);
        if (prove->parsed()) return cmd_prove335(budget_ms, no_symmetry, json, emit_model);
        if (bench->parsed()) return cmd_bench(from, to, min_cycles, jobs, budget_ms, seed, out, json);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
