// Benchmark harness pieces: the generator, the seed picker, the queue-based
// BFS oracle, summary statistics and the CSV report. The oracle cross-check
// against the in-process k-hop counter is the load-bearing test here.
#include <doctest.h>

#include <fmt/format.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "matgraph/bench.hpp"
#include "matgraph/error.hpp"
#include "matgraph/execute.hpp"
#include "matgraph/graph.hpp"
#include "matgraph/server.hpp"

using namespace matgraph;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() /
           fmt::format("matgraph-bench-test-{}-{}", ::getpid(), name);
}

}  // namespace

TEST_CASE("rmat generation is deterministic and in bounds") {
    RmatParams params;
    params.scale = 8;
    params.rng_seed = 42;
    const EdgeList first = rmat_generate(params);
    const EdgeList second = rmat_generate(params);
    REQUIRE(first.size() == params.edge_count());
    CHECK(first == second);

    params.rng_seed = 43;
    CHECK(rmat_generate(params) != first);

    const auto nodes = params.node_count();
    for (const EdgeTuple& e : first) {
        REQUIRE(e.src < nodes);
        REQUIRE(e.dst < nodes);
    }
}

TEST_CASE("the top-left quadrant draws its configured share of edges") {
    RmatParams params;
    params.scale = 10;
    const EdgeList edges = rmat_generate(params);
    const std::uint32_t half = params.node_count() / 2;
    std::size_t top_left = 0;
    for (const EdgeTuple& e : edges) {
        if (e.src < half && e.dst < half) ++top_left;
    }
    const double fraction = static_cast<double>(top_left) / edges.size();
    CHECK(fraction > params.a - 0.03);
    CHECK(fraction < params.a + 0.03);
}

TEST_CASE("rmat parameters are validated") {
    RmatParams params;
    params.scale = 25;
    CHECK_THROWS_WITH_AS(params.validate(), "RMAT scale 25 exceeds the cap of 24",
                         ContractError);
    params.scale = 10;
    params.a = 0.9;
    CHECK_THROWS_AS(params.validate(), ContractError);
    params.a = -0.1;
    params.b = 0.57 + 0.19 + 0.1 - 0.05;
    CHECK_THROWS_WITH_AS(params.validate(),
                         "RMAT quadrant probabilities must be non-negative",
                         ContractError);
}

TEST_CASE("the bench graph carries ids and one edge relation") {
    const EdgeList edges = {{0, 1}, {1, 2}, {1, 2}, {2, 0}};
    PropertyGraph g = build_bench_graph(edges, 4);
    CHECK(g.node_count() == 4);
    CHECK(g.node_props(3).at("id").as_int() == 3);
    CHECK(g.relation_names() == std::vector<std::string>{std::string(kBenchRelation)});
    CHECK(g.edge_record_count() == 3);  // the duplicate collapses

    CHECK_THROWS_WITH_AS(build_bench_graph({{5, 9}}, 4),
                         "edge (5, 9) outside the 4-node range", ContractError);
}

TEST_CASE("seed picking is deterministic and sticks to source nodes") {
    RmatParams params;
    params.scale = 7;
    const EdgeList edges = rmat_generate(params);
    PropertyGraph g = build_bench_graph(edges, params.node_count());

    const auto seeds = pick_seeds(g, 50, 9);
    CHECK(seeds == pick_seeds(g, 50, 9));
    CHECK(seeds != pick_seeds(g, 50, 10));
    CHECK(std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() == seeds.size());
    const SparseMatrix& adjacency = g.relation_matrix();
    for (std::uint64_t seed : seeds) CHECK_FALSE(adjacency.row(seed).empty());
}

TEST_CASE("seed picking fails loudly when too few nodes qualify") {
    PropertyGraph g = build_bench_graph({{0, 1}}, 3);
    CHECK(pick_seeds(g, 1, 1) == std::vector<std::uint64_t>{0});
    CHECK_THROWS_WITH_AS(pick_seeds(g, 2, 1),
                         "need 2 seeds but only 1 nodes have out-degree >= 1",
                         HarnessError);
}

TEST_CASE("the oracle agrees with the sparse k-hop counter on rmat graphs") {
    RmatParams params;
    params.scale = 6;
    params.rng_seed = 3;
    const EdgeList edges = rmat_generate(params);
    PropertyGraph g = build_bench_graph(edges, params.node_count());
    BfsOracle oracle(edges, params.node_count());

    const auto seeds = pick_seeds(g, 20, 5);
    for (std::uint64_t seed : seeds) {
        for (std::uint32_t k : {1u, 2u, 3u, 6u}) {
            for (TraverseMode mode : {TraverseMode::Exact, TraverseMode::Cumulative}) {
                CAPTURE(seed);
                CAPTURE(k);
                const auto expected = oracle.count(seed, k, mode);
                CHECK(k_hop_count(g, {.seed = seed,
                                      .k = k,
                                      .relation = std::string(kBenchRelation),
                                      .mode = mode}) == expected);
                CHECK(bfs_oracle(g, seed, k, mode) == expected);
            }
        }
    }
}

TEST_CASE("the oracle validates seeds and hop counts") {
    BfsOracle oracle({{0, 1}}, 2);
    CHECK_THROWS_WITH_AS(oracle.count(2, 1, TraverseMode::Exact),
                         "oracle seed 2 is out of range", ContractError);
    CHECK_THROWS_WITH_AS(oracle.count(0, 0, TraverseMode::Exact),
                         "oracle hop count 0 outside [1, 32]", ContractError);
}

TEST_CASE("summary statistics match hand-computed values") {
    std::vector<SeedRun> runs = {
        {.seed = 0, .count = 2, .elapsed_us = 10},
        {.seed = 1, .count = 4, .elapsed_us = 30},
        {.seed = 2, .count = 6, .elapsed_us = 20},
        {.seed = 3, .count = 8, .elapsed_us = 40},
    };
    const SectionStats stats = summarize(runs);
    CHECK(stats.mean_us == 25.0);
    CHECK(stats.median_us == 25.0);  // even count: mean of the middle two
    CHECK(stats.p99_us == 40.0);     // nearest-rank sample, never interpolated
    CHECK(stats.mean_count == 5.0);

    const SectionStats odd = summarize({{.seed = 0, .count = 0, .elapsed_us = 1},
                                        {.seed = 1, .count = 0, .elapsed_us = 100},
                                        {.seed = 2, .count = 0, .elapsed_us = 2}});
    CHECK(odd.median_us == 2.0);

    CHECK_THROWS_WITH_AS(summarize({}), "cannot summarize an empty run list",
                         ContractError);
}

TEST_CASE("schedules validate their shape before any work starts") {
    BenchSchedule schedule;
    schedule.ks = {1, 2};
    schedule.seeds_per_k = {10};
    CHECK_THROWS_WITH_AS(schedule.validate(),
                         "schedule pairs 2 hop counts with 1 seed counts",
                         ContractError);
    schedule.seeds_per_k = {10, 0};
    CHECK_THROWS_WITH_AS(schedule.validate(), "seed count for k=2 must be at least 1",
                         ContractError);
    schedule.ks = {0, 2};
    schedule.seeds_per_k = {10, 10};
    CHECK_THROWS_WITH_AS(schedule.validate(), "hop count 0 outside [1, 32]",
                         ContractError);
    schedule.ks = {33};
    schedule.seeds_per_k = {1};
    CHECK_THROWS_WITH_AS(schedule.validate(), "hop count 33 outside [1, 32]",
                         ContractError);
}

TEST_CASE("reports serialize with fixed headers and one row per unit") {
    KHopReport empty;
    CHECK(report_csv_string(empty) ==
          "k,seed,count,elapsed_us\n"
          "k,n_seeds,mean_us,median_us,p99_us,mean_count\n");

    KHopReport report;
    report.sections.push_back(
        {.k = 2,
         .runs = {{.seed = 5, .count = 7, .elapsed_us = 10},
                  {.seed = 6, .count = 9, .elapsed_us = 20}},
         .stats = summarize({{.seed = 5, .count = 7, .elapsed_us = 10},
                             {.seed = 6, .count = 9, .elapsed_us = 20}})});
    CHECK(report_csv_string(report) ==
          "k,seed,count,elapsed_us\n"
          "2,5,7,10\n"
          "2,6,9,20\n"
          "k,n_seeds,mean_us,median_us,p99_us,mean_count\n"
          "2,2,15,15,20,8\n");
}

TEST_CASE("report files round-trip the serialized bytes") {
    const auto path = temp_file("report.csv");
    KHopReport report;
    report.sections.push_back(
        {.k = 1,
         .runs = {{.seed = 0, .count = 3, .elapsed_us = 12}},
         .stats = summarize({{.seed = 0, .count = 3, .elapsed_us = 12}})});
    report_csv(report, path);
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    CHECK(bytes == report_csv_string(report));
    std::filesystem::remove(path);
}

TEST_CASE("edge lists parse tabs, tolerate blanks and reject junk") {
    const auto path = temp_file("edges.tsv");
    {
        std::ofstream out(path, std::ios::binary);
        out << "0\t1\n2\t3\r\n\n4\t0\n";
    }
    const EdgeList edges = load_edge_list(path);
    CHECK(edges == EdgeList{{0, 1}, {2, 3}, {4, 0}});
    CHECK(edge_list_node_count(edges) == 5);
    CHECK(edge_list_node_count({}) == 0);

    {
        std::ofstream out(path, std::ios::binary);
        out << "0 1\n";
    }
    CHECK_THROWS_WITH_AS(load_edge_list(path),
                         fmt::format("edge list line 1: expected 'src<TAB>dst'").c_str(),
                         HarnessError);
    {
        std::ofstream out(path, std::ios::binary);
        out << "0\t1\nx\t2\n";
    }
    CHECK_THROWS_WITH_AS(load_edge_list(path), "edge list line 2: malformed node id",
                         HarnessError);
    {
        std::ofstream out(path, std::ios::binary);
        out << "16777216\t0\n";
    }
    CHECK_THROWS_WITH_AS(load_edge_list(path),
                         "edge list line 1: node id 16777216 is at or above 2^24",
                         HarnessError);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(load_edge_list(temp_file("missing.tsv")), HarnessError);
}

TEST_CASE("local benchmark runs are deterministic apart from timing") {
    RmatParams params;
    params.scale = 6;
    const EdgeList edges = rmat_generate(params);
    PropertyGraph g = build_bench_graph(edges, params.node_count());

    BenchSchedule schedule;
    schedule.ks = {1, 2, 3};
    schedule.seeds_per_k = {8, 8, 4};
    schedule.rng_seed = 7;

    const KHopReport first = run_khop_benchmark(g, schedule);
    const KHopReport second = run_khop_benchmark(g, schedule);
    REQUIRE(first.sections.size() == 3);
    for (std::size_t i = 0; i < first.sections.size(); ++i) {
        const auto& a = first.sections[i];
        const auto& b = second.sections[i];
        CHECK(a.k == b.k);
        REQUIRE(a.runs.size() == b.runs.size());
        CHECK(a.runs.size() == schedule.seeds_per_k[i]);
        for (std::size_t j = 0; j < a.runs.size(); ++j) {
            CHECK(a.runs[j].seed == b.runs[j].seed);
            CHECK(a.runs[j].count == b.runs[j].count);
        }
    }

    // Each section's seed list is a prefix of the widest section's list, so
    // sections of different sizes stay comparable run over run.
    for (std::size_t j = 0; j < first.sections[2].runs.size(); ++j) {
        CHECK(first.sections[2].runs[j].seed == first.sections[0].runs[j].seed);
    }
}

TEST_CASE("benchmark counts agree with the oracle in both modes") {
    RmatParams params;
    params.scale = 6;
    params.rng_seed = 11;
    const EdgeList edges = rmat_generate(params);
    PropertyGraph g = build_bench_graph(edges, params.node_count());
    BfsOracle oracle(edges, params.node_count());

    for (TraverseMode mode : {TraverseMode::Exact, TraverseMode::Cumulative}) {
        BenchSchedule schedule;
        schedule.ks = {1, 2, 6};
        schedule.seeds_per_k = {10, 10, 10};
        schedule.mode = mode;
        const KHopReport report = run_khop_benchmark(g, schedule);
        for (const KHopSection& section : report.sections) {
            for (const SeedRun& run : section.runs) {
                CAPTURE(section.k);
                CAPTURE(run.seed);
                CHECK(run.count == oracle.count(run.seed, section.k, mode));
            }
        }
    }
}

TEST_CASE("over-the-wire runs reproduce the local counts") {
    RmatParams params;
    params.scale = 6;
    const EdgeList edges = rmat_generate(params);
    PropertyGraph g = build_bench_graph(edges, params.node_count());

    BenchSchedule schedule;
    schedule.ks = {1, 2};
    schedule.seeds_per_k = {5, 5};

    ServerConfig config;
    config.port = 0;
    config.workers = 2;
    Server server(config);
    server.start();
    const KHopReport local = run_khop_benchmark(g, schedule);
    const KHopReport wire = run_khop_benchmark_wire(g, schedule, "127.0.0.1", server.port());
    server.stop();
    server.wait();

    REQUIRE(local.sections.size() == wire.sections.size());
    for (std::size_t i = 0; i < local.sections.size(); ++i) {
        const auto& a = local.sections[i].runs;
        const auto& b = wire.sections[i].runs;
        REQUIRE(a.size() == b.size());
        for (std::size_t j = 0; j < a.size(); ++j) {
            CHECK(a[j].seed == b[j].seed);
            CHECK(a[j].count == b[j].count);
        }
    }
}
