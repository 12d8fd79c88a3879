#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "matgraph/graph.hpp"
#include "matgraph/plan.hpp"

namespace matgraph {

/// RMAT generator configuration. Defaults are the standard Graph500
/// settings at desk scale: quadrant probabilities (0.57, 0.19, 0.19, 0.05),
/// 16 edges per vertex, 2^14 vertices.
struct RmatParams {
    std::uint32_t scale = 14;
    std::uint32_t edge_factor = 16;
    double a = 0.57;
    double b = 0.19;
    double c = 0.19;
    double d = 0.05;
    std::uint64_t rng_seed = 1;

    std::uint64_t node_count() const noexcept { return std::uint64_t{1} << scale; }
    std::uint64_t edge_count() const noexcept {
        return std::uint64_t{edge_factor} << scale;
    }

    /// Throws ContractError unless a+b+c+d = 1 within 1e-9 and scale <= 24.
    void validate() const;
};

struct EdgeTuple {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;

    friend bool operator==(const EdgeTuple&, const EdgeTuple&) = default;
};

using EdgeList = std::vector<EdgeTuple>;

/// Recursive-quadrant RMAT generation. Emits exactly edge_factor * 2^scale
/// directed edges; duplicates and self-loops are kept (the store collapses
/// them). Deterministic for a fixed rng_seed.
EdgeList rmat_generate(const RmatParams& params);

/// Reads a `src<TAB>dst` edge-list file (one edge per line, decimal ids,
/// blank lines ignored). Throws HarnessError with the line number on
/// malformed input or endpoints at or above 2^24.
EdgeList load_edge_list(const std::filesystem::path& path);

/// Smallest node count covering every endpoint: max endpoint + 1, 0 when
/// the list is empty.
std::uint64_t edge_list_node_count(const EdgeList& edges);

inline constexpr std::string_view kBenchRelation = "EDGE";

/// Materializes the benchmark graph: node ids 0..node_count-1, each with an
/// integer `id` property, every edge typed EDGE. The returned graph is
/// flushed. Throws ContractError if an endpoint is >= node_count.
PropertyGraph build_bench_graph(const EdgeList& edges, std::uint64_t node_count);

/// n distinct node ids with out-degree >= 1, drawn uniformly without
/// replacement. Deterministic per rng_seed (partial Fisher-Yates with a
/// rejection-sampled bounded draw, so the sequence does not depend on the
/// standard library). Throws HarnessError when fewer than n nodes qualify.
std::vector<std::uint64_t> pick_seeds(const PropertyGraph& graph, std::size_t n,
                                      std::uint64_t rng_seed);

/// Queue-based BFS oracle over a raw edge list. Shares no code with the
/// sparse kernels or the executor; backs every k-hop count in the tests.
class BfsOracle {
public:
    BfsOracle(const EdgeList& edges, std::uint64_t node_count);

    /// Same semantics as k_hop_count: exact counts vertices at BFS distance
    /// exactly k from the seed, cumulative counts distance 1..k; the seed
    /// itself is never counted.
    std::uint64_t count(std::uint64_t seed, std::uint32_t k, TraverseMode mode) const;

    std::uint64_t node_count() const noexcept { return adjacency_.size(); }

private:
    std::vector<std::vector<std::uint32_t>> adjacency_;
};

/// BfsOracle over the graph's any-relation adjacency (tuples extracted from
/// the store, BFS still matrix-free).
std::uint64_t bfs_oracle(const PropertyGraph& graph, std::uint64_t seed,
                         std::uint32_t k, TraverseMode mode);

struct SeedRun {
    std::uint64_t seed = 0;
    std::uint64_t count = 0;
    std::int64_t elapsed_us = 0;
};

struct SectionStats {
    double mean_us = 0.0;
    double median_us = 0.0;
    double p99_us = 0.0;
    double mean_count = 0.0;
};

/// Aggregates one per-k section. Median is the midpoint of the sorted
/// elapsed times; p99 is the nearest-rank sample (index ceil(0.99 n) - 1).
/// Throws ContractError on an empty run list.
SectionStats summarize(const std::vector<SeedRun>& runs);

struct KHopSection {
    std::uint32_t k = 0;
    std::vector<SeedRun> runs;
    SectionStats stats;
};

struct KHopReport {
    TraverseMode mode = TraverseMode::Exact;
    std::vector<KHopSection> sections;
};

/// Benchmark schedule: ks[i] paired with seeds_per_k[i]. Seeds are drawn
/// once as a master list sized by the largest request; each k uses the
/// first seeds_per_k[i] entries, so smaller schedules are prefixes of
/// larger ones.
struct BenchSchedule {
    std::vector<std::uint32_t> ks;
    std::vector<std::size_t> seeds_per_k;
    TraverseMode mode = TraverseMode::Exact;
    std::uint64_t rng_seed = 1;

    /// Throws ContractError unless the vectors are parallel, every k is in
    /// [1, 32] and every seed count is >= 1.
    void validate() const;
};

/// Runs the schedule strictly sequentially, wall-clock timing each
/// k_hop_count call in-process.
KHopReport run_khop_benchmark(const PropertyGraph& graph, const BenchSchedule& schedule);

/// Same schedule timed through the wire protocol: stages a snapshot of the
/// graph into a temporary file, issues `LOAD bench <path>` to the server
/// (which must share this filesystem; loopback is the intended target),
/// then times one QUERY round-trip per (k, seed). Counts match the
/// in-process run. Throws HarnessError on protocol failures.
KHopReport run_khop_benchmark_wire(const PropertyGraph& graph, const BenchSchedule& schedule,
                                   const std::string& host, std::uint16_t port);

/// Detail section `k,seed,count,elapsed_us` followed by a summary section
/// `k,n_seeds,mean_us,median_us,p99_us,mean_count`. LF line endings;
/// deterministic given the report. An empty report yields the two header
/// lines only.
std::string report_csv_string(const KHopReport& report);

/// report_csv_string written to path; throws HarnessError on I/O failure.
void report_csv(const KHopReport& report, const std::filesystem::path& path);

}  // namespace matgraph
