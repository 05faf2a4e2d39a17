#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "obw/pipeline.hpp"

using namespace obw;

TEST_CASE("direct 1-rotational route") {
    BaseCache cache;
    SolveResult r = solve_instance(parse_cycle_type("3,6"), {20000.0, 1}, &cache);
    REQUIRE(r.status == SolveStatus::Solved);
    CHECK(r.record->method == "1rot");
    CHECK(r.record->order == 9);
    CHECK(verify_factorization(9, r.record->type, r.record->fz).pass);
}

TEST_CASE("known unsolvable types return without search") {
    for (const char* t : {"3^2", "3^4", "4,5", "3^2,5"}) {
        CAPTURE(t);
        SolveResult r = solve_instance(parse_cycle_type(t), {20000.0, 1});
        CHECK(r.status == SolveStatus::KnownUnsolvable);
        CHECK(r.solve_ms < 1000.0);
    }
}

TEST_CASE("derived orders reuse one cached base") {
    BaseCache cache;
    PipelineOptions opts{60000.0, 2};
    // Decrement candidates go ascending, so 18,5,3 decrements its 5 first:
    // base 18,4,3.
    SolveResult a = solve_instance(parse_cycle_type("18,5,3"), opts, &cache);
    REQUIRE(a.status == SolveStatus::Solved);
    CHECK(a.record->method == "derived-1rot");
    CHECK(verify_factorization(26, a.record->type, a.record->fz).pass);
    REQUIRE(cache.find("3,4,18").has_value());

    // A second target sharing the same base.
    SolveResult b = solve_instance(parse_cycle_type("18,4,4"), opts, &cache);
    REQUIRE(b.status == SolveStatus::Solved);
    CHECK(verify_factorization(26, b.record->type, b.record->fz).pass);

    // The worked pair of derived instances both solve.
    SolveResult c = solve_instance(parse_cycle_type("19,4,3"), opts, &cache);
    REQUIRE(c.status == SolveStatus::Solved);
    CHECK(c.record->method == "derived-1rot");
    CHECK(verify_factorization(26, c.record->type, c.record->fz).pass);
}

TEST_CASE("unsupported classifications") {
    BaseCache cache;
    PipelineOptions opts{30000.0, 3};
    // Even order, all triangles: no cycle >= 4 to decrement.
    SolveResult a = solve_instance(parse_cycle_type("3^6"), opts, &cache);
    CHECK(a.status == SolveStatus::Unsupported);

    // Both decrement bases are known unsolvable or method-infeasible.
    SolveResult b = solve_instance(parse_cycle_type("5,5"), opts, &cache);
    CHECK(b.status == SolveStatus::Unsupported);
    SolveResult c = solve_instance(parse_cycle_type("3,3,6"), opts, &cache);
    CHECK(c.status == SolveStatus::Unsupported);

    // Order 13 type with no rotational starter at all (proven).
    SolveResult d = solve_instance(parse_cycle_type("3,10"), opts, &cache);
    CHECK(d.status == SolveStatus::Unsupported);
}

TEST_CASE("4t route derives from the two-rotational base") {
    BaseCache cache;
    SolveResult r = solve_instance(parse_cycle_type("4^3"), {30000.0, 4}, &cache);
    REQUIRE(r.status == SolveStatus::Solved);
    CHECK(r.record->method == "derived-2rot");
    CHECK(verify_factorization(12, r.record->type, r.record->fz).pass);
}

TEST_CASE("4t+1 fallback to the even two-orbit method") {
    BaseCache cache;
    SolveResult r = solve_instance(parse_cycle_type("3,4,6"), {30000.0, 5}, &cache);
    REQUIRE(r.status == SolveStatus::Solved);
    CHECK(r.record->method == "2rot-even");
    CHECK(verify_factorization(13, r.record->type, r.record->fz).pass);
}

TEST_CASE("order-9 batch matches the expected outcome set") {
    BaseCache cache;
    BatchReport rep = solve_order(9, 1, 2, {20000.0, 6}, &cache, "", false);
    CHECK(rep.total == 4);
    CHECK(rep.solved == 3);
    CHECK(rep.known_unsolvable == 1);
    CHECK(rep.unsupported == 0);
    CHECK(rep.failed == 0);
    CHECK(rep.total == rep.solved + rep.known_unsolvable + rep.unsupported + rep.failed);
}

TEST_CASE("batch outcome is independent of the job count") {
    BaseCache c1, c2;
    BatchReport one = solve_order(10, 1, 1, {30000.0, 7}, &c1, "", false);
    BatchReport two = solve_order(10, 1, 4, {30000.0, 7}, &c2, "", false);
    CHECK(one.outcomes == two.outcomes);
    CHECK(one.solved == two.solved);
}

TEST_CASE("batch writes one solution file per solved instance") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "obw_test_batch";
    fs::remove_all(dir);
    BaseCache cache;
    BatchReport rep = solve_order(9, 1, 2, {20000.0, 8}, &cache, dir.string(), true);
    CHECK(rep.solved == 3);
    int files = 0;
    for (const auto& entry : fs::directory_iterator(dir / "9")) {
        ++files;
        std::ifstream in(entry.path());
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        SolutionRecord rec = deserialize(text);
        CHECK(verify_factorization(rec.order, rec.type, rec.fz).pass);
    }
    CHECK(files == 3);
    fs::remove_all(dir);
}

TEST_CASE("desk-scale sweep of orders 10, 12 and 14") {
    BaseCache cache;
    for (int v : {10, 12, 14}) {
        CAPTURE(v);
        BatchReport rep = solve_order(v, 1, 2, {30000.0, 9}, &cache, "", false);
        CHECK(rep.failed == 0);
        for (const auto& [name, status] : rep.outcomes) {
            CAPTURE(name);
            CHECK(status != SolveStatus::Failed);
        }
    }
}
