#include <charconv>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "matgraph/bench.hpp"
#include "matgraph/error.hpp"
#include "matgraph/server.hpp"

namespace {

struct BenchOptions {
    std::uint32_t scale = 14;
    std::uint32_t edge_factor = 16;
    std::vector<std::uint32_t> ks = {1, 2, 3, 6};
    std::vector<std::size_t> seeds = {300, 300, 10, 10};
    std::string mode = "exact";
    std::uint64_t rng_seed = 1;
    std::string out = "report.csv";
    std::string over_wire;
    std::string edge_list;
};

std::pair<std::string, std::uint16_t> parse_host_port(const std::string& spec) {
    const std::size_t colon = spec.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == spec.size())
        throw matgraph::HarnessError(
            fmt::format("--over-wire expects host:port, got '{}'", spec));
    std::uint16_t port = 0;
    const char* first = spec.data() + colon + 1;
    const char* last = spec.data() + spec.size();
    const auto [end, ec] = std::from_chars(first, last, port);
    if (ec != std::errc{} || end != last)
        throw matgraph::HarnessError(
            fmt::format("--over-wire expects host:port, got '{}'", spec));
    return {spec.substr(0, colon), port};
}

int run_bench(const BenchOptions& options) {
    using namespace matgraph;

    BenchSchedule schedule;
    schedule.ks = options.ks;
    schedule.seeds_per_k = options.seeds;
    schedule.mode =
        options.mode == "cumulative" ? TraverseMode::Cumulative : TraverseMode::Exact;
    schedule.rng_seed = options.rng_seed;
    schedule.validate();

    EdgeList edges;
    std::uint64_t node_count = 0;
    if (!options.edge_list.empty()) {
        edges = load_edge_list(options.edge_list);
        node_count = edge_list_node_count(edges);
        fmt::print("loaded {} edges over {} nodes from {}\n", edges.size(), node_count,
                   options.edge_list);
    } else {
        RmatParams params;
        params.scale = options.scale;
        params.edge_factor = options.edge_factor;
        params.rng_seed = options.rng_seed;
        edges = rmat_generate(params);
        node_count = params.node_count();
        fmt::print("generated RMAT scale {} with {} edges\n", options.scale, edges.size());
    }
    const PropertyGraph graph = build_bench_graph(edges, node_count);

    KHopReport report;
    if (!options.over_wire.empty()) {
        const auto [host, port] = parse_host_port(options.over_wire);
        fmt::print("timing over the wire via {}:{}\n", host, port);
        report = run_khop_benchmark_wire(graph, schedule, host, port);
    } else {
        report = run_khop_benchmark(graph, schedule);
    }

    for (const auto& section : report.sections)
        fmt::print("k={}: {} seeds, mean {:.1f} us, median {:.1f} us, p99 {:.1f} us, "
                   "mean count {:.1f}\n",
                   section.k, section.runs.size(), section.stats.mean_us,
                   section.stats.median_us, section.stats.p99_us,
                   section.stats.mean_count);
    report_csv(report, options.out);
    fmt::print("wrote {}\n", options.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse-matrix property graph engine"};
    app.require_subcommand(1);

    matgraph::ServerConfig server_config;
    std::string snapshot_dir;
    auto* serve_cmd = app.add_subcommand("serve", "Run the TCP server in the foreground");
    serve_cmd->add_option("--port", server_config.port, "Listen port")
        ->capture_default_str();
    serve_cmd->add_option("--workers", server_config.workers, "Worker thread count")
        ->envname("MATGRAPH_WORKERS")
        ->capture_default_str();
    serve_cmd->add_option("--snapshot-dir", snapshot_dir,
                          "Directory for graph snapshots; restored on start");

    auto* repl_cmd =
        app.add_subcommand("repl", "Read protocol requests from stdin, no sockets");

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Time k-hop neighborhood counts");
    bench_cmd->add_option("--scale", bench.scale, "RMAT scale (log2 node count)")
        ->capture_default_str();
    bench_cmd->add_option("--edge-factor", bench.edge_factor, "Edges per node")
        ->capture_default_str();
    bench_cmd->add_option("--ks", bench.ks, "Hop counts to time")
        ->delimiter(',')
        ->capture_default_str();
    bench_cmd->add_option("--seeds", bench.seeds, "Seed count per hop count")
        ->delimiter(',')
        ->capture_default_str();
    bench_cmd->add_option("--mode", bench.mode, "exact (distance = k) or cumulative (1..k)")
        ->check(CLI::IsMember({"exact", "cumulative"}))
        ->capture_default_str();
    bench_cmd->add_option("--rng-seed", bench.rng_seed, "Generator and seed-pick RNG seed")
        ->capture_default_str();
    bench_cmd->add_option("--out", bench.out, "CSV report path")->capture_default_str();
    bench_cmd->add_option("--over-wire", bench.over_wire,
                          "Time through a running server at host:port");
    bench_cmd->add_option("--edge-list", bench.edge_list,
                          "Load a src<TAB>dst edge-list file instead of generating");

    CLI11_PARSE(app, argc, argv);

    try {
        if (serve_cmd->parsed()) {
            if (!snapshot_dir.empty()) server_config.snapshot_dir = snapshot_dir;
            matgraph::serve(server_config);
            return 0;
        }
        if (repl_cmd->parsed()) {
            matgraph::repl(std::cin, std::cout);
            return 0;
        }
        return run_bench(bench);
    } catch (const matgraph::Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
