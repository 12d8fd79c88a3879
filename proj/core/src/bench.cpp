#include "matgraph/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <queue>
#include <random>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <unistd.h>

#include <fmt/format.h>

#include "matgraph/encoding.hpp"
#include "matgraph/error.hpp"
#include "matgraph/execute.hpp"
#include "matgraph/server.hpp"
#include "matgraph/snapshot.hpp"
#include "matgraph/sparse.hpp"

namespace matgraph {

namespace {

constexpr std::uint32_t kEdgeListIdCap = 1u << 24;
constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

/// Uniform double in [0, 1) from the top 53 bits, so the sequence does not
/// depend on the standard library's distribution implementation.
double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform draw in [0, bound) by rejection sampling; bound > 0.
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % bound;
    std::uint64_t draw = rng();
    while (draw >= limit) draw = rng();
    return draw % bound;
}

std::string one_line(std::string text) {
    for (char& c : text)
        if (c == '\n' || c == '\r') c = ' ';
    return text;
}

std::uint64_t parse_count_response(const std::string& response, std::uint32_t k,
                                   std::uint64_t seed) {
    if (response.rfind("ERR ", 0) == 0) {
        throw HarnessError(fmt::format("k={} seed={}: server error: {}", k, seed,
                                       one_line(response.substr(4))));
    }
    // Expected frame: "OK 1\ncount(b)\n<count>\nEND\n".
    std::vector<std::string_view> lines;
    std::string_view rest = response;
    while (!rest.empty()) {
        const std::size_t nl = rest.find('\n');
        if (nl == std::string_view::npos) {
            lines.push_back(rest);
            break;
        }
        lines.push_back(rest.substr(0, nl));
        rest.remove_prefix(nl + 1);
    }
    if (lines.size() == 4 && lines[0] == "OK 1" && lines[1] == "count(b)" &&
        lines[3] == "END") {
        std::uint64_t count = 0;
        const auto [end, ec] =
            std::from_chars(lines[2].data(), lines[2].data() + lines[2].size(), count);
        if (ec == std::errc{} && end == lines[2].data() + lines[2].size()) return count;
    }
    throw HarnessError(fmt::format("k={} seed={}: unexpected response '{}'", k, seed,
                                   one_line(response)));
}

std::string wire_query(std::uint64_t seed, std::uint32_t k, TraverseMode mode) {
    const std::uint32_t min_hops = mode == TraverseMode::Exact ? k : 1;
    // The <> term drops the seed itself, which a variable-length pattern can
    // reach around a cycle but k_hop_count never counts.
    return fmt::format(
        "QUERY bench MATCH (a {{id: {}}})-[*{}..{}]->(b) WHERE b.id <> {} RETURN count(b)",
        seed, min_hops, k, seed);
}

}  // namespace

void RmatParams::validate() const {
    if (scale > 24)
        throw ContractError(fmt::format("RMAT scale {} exceeds the cap of 24", scale));
    if (a < 0 || b < 0 || c < 0 || d < 0)
        throw ContractError("RMAT quadrant probabilities must be non-negative");
    const double sum = a + b + c + d;
    if (std::abs(sum - 1.0) > 1e-9)
        throw ContractError(
            fmt::format("RMAT quadrant probabilities sum to {}, expected 1", sum));
}

EdgeList rmat_generate(const RmatParams& params) {
    params.validate();
    std::mt19937_64 rng(params.rng_seed);
    const double ab = params.a + params.b;
    const double abc = ab + params.c;
    EdgeList edges;
    edges.reserve(params.edge_count());
    for (std::uint64_t e = 0; e < params.edge_count(); ++e) {
        std::uint32_t src = 0;
        std::uint32_t dst = 0;
        for (std::uint32_t level = 0; level < params.scale; ++level) {
            const double r = unit_double(rng);
            std::uint32_t src_bit = 0;
            std::uint32_t dst_bit = 0;
            if (r < params.a) {
                // top-left quadrant: both bits stay 0
            } else if (r < ab) {
                dst_bit = 1;
            } else if (r < abc) {
                src_bit = 1;
            } else {
                src_bit = 1;
                dst_bit = 1;
            }
            src = (src << 1) | src_bit;
            dst = (dst << 1) | dst_bit;
        }
        edges.push_back({src, dst});
    }
    return edges;
}

EdgeList load_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw HarnessError(fmt::format("cannot open edge list '{}'", path.string()));
    EdgeList edges;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw HarnessError(
                fmt::format("edge list line {}: expected 'src<TAB>dst'", line_no));
        std::uint32_t ids[2] = {0, 0};
        const std::pair<const char*, const char*> fields[2] = {
            {line.data(), line.data() + tab},
            {line.data() + tab + 1, line.data() + line.size()},
        };
        for (int i = 0; i < 2; ++i) {
            const auto [end, ec] = std::from_chars(fields[i].first, fields[i].second, ids[i]);
            if (ec != std::errc{} || end != fields[i].second)
                throw HarnessError(
                    fmt::format("edge list line {}: malformed node id", line_no));
            if (ids[i] >= kEdgeListIdCap)
                throw HarnessError(fmt::format(
                    "edge list line {}: node id {} is at or above 2^24", line_no, ids[i]));
        }
        edges.push_back({ids[0], ids[1]});
    }
    if (in.bad())
        throw HarnessError(fmt::format("I/O error reading '{}'", path.string()));
    return edges;
}

std::uint64_t edge_list_node_count(const EdgeList& edges) {
    std::uint64_t max_id = 0;
    bool any = false;
    for (const auto& e : edges) {
        max_id = std::max<std::uint64_t>(max_id, std::max(e.src, e.dst));
        any = true;
    }
    return any ? max_id + 1 : 0;
}

PropertyGraph build_bench_graph(const EdgeList& edges, std::uint64_t node_count) {
    PropertyGraph graph(std::max<std::uint64_t>(node_count, 1));
    for (std::uint64_t id = 0; id < node_count; ++id)
        graph.create_node({}, {{"id", Value(static_cast<std::int64_t>(id))}});
    const std::string relation(kBenchRelation);
    for (const auto& e : edges) {
        if (e.src >= node_count || e.dst >= node_count)
            throw ContractError(fmt::format("edge ({}, {}) outside the {}-node range",
                                            e.src, e.dst, node_count));
        graph.create_edge(e.src, relation, e.dst);
    }
    graph.flush();
    return graph;
}

std::vector<std::uint64_t> pick_seeds(const PropertyGraph& graph, std::size_t n,
                                      std::uint64_t rng_seed) {
    graph.flush();
    const SparseMatrix& adjacency = graph.relation_matrix();
    std::vector<std::uint64_t> eligible;
    for (std::uint64_t id = 0; id < graph.node_count(); ++id)
        if (!adjacency.row(id).empty()) eligible.push_back(id);
    if (eligible.size() < n)
        throw HarnessError(fmt::format(
            "need {} seeds but only {} nodes have out-degree >= 1", n, eligible.size()));
    std::mt19937_64 rng(rng_seed);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(bounded_draw(rng, eligible.size() - i));
        std::swap(eligible[i], eligible[j]);
    }
    eligible.resize(n);
    return eligible;
}

BfsOracle::BfsOracle(const EdgeList& edges, std::uint64_t node_count) {
    if (node_count > std::numeric_limits<std::uint32_t>::max())
        throw ContractError(fmt::format("oracle supports at most 2^32 nodes, got {}",
                                        node_count));
    adjacency_.resize(node_count);
    for (const auto& e : edges) {
        if (e.src >= node_count || e.dst >= node_count)
            throw ContractError(fmt::format("edge ({}, {}) outside the {}-node range",
                                            e.src, e.dst, node_count));
        adjacency_[e.src].push_back(e.dst);
    }
}

std::uint64_t BfsOracle::count(std::uint64_t seed, std::uint32_t k,
                               TraverseMode mode) const {
    if (seed >= adjacency_.size())
        throw ContractError(fmt::format("oracle seed {} is out of range", seed));
    if (k < 1 || k > kMaxHops)
        throw ContractError(
            fmt::format("oracle hop count {} outside [1, {}]", k, kMaxHops));
    std::vector<std::uint32_t> dist(adjacency_.size(), kUnreached);
    std::queue<std::uint32_t> pending;
    dist[seed] = 0;
    pending.push(static_cast<std::uint32_t>(seed));
    std::uint64_t exact = 0;
    std::uint64_t cumulative = 0;
    while (!pending.empty()) {
        const std::uint32_t node = pending.front();
        pending.pop();
        if (dist[node] == k) continue;
        for (const std::uint32_t next : adjacency_[node]) {
            if (dist[next] != kUnreached) continue;
            dist[next] = dist[node] + 1;
            if (dist[next] == k) ++exact;
            ++cumulative;
            pending.push(next);
        }
    }
    return mode == TraverseMode::Exact ? exact : cumulative;
}

std::uint64_t bfs_oracle(const PropertyGraph& graph, std::uint64_t seed,
                         std::uint32_t k, TraverseMode mode) {
    graph.flush();
    EdgeList edges;
    for (const auto& tuple : graph.relation_matrix().extract_tuples())
        edges.push_back({static_cast<std::uint32_t>(tuple.row),
                         static_cast<std::uint32_t>(tuple.col)});
    return BfsOracle(edges, graph.node_count()).count(seed, k, mode);
}

SectionStats summarize(const std::vector<SeedRun>& runs) {
    if (runs.empty()) throw ContractError("cannot summarize an empty run list");
    const std::size_t n = runs.size();
    std::vector<std::int64_t> elapsed;
    elapsed.reserve(n);
    std::int64_t total_us = 0;
    std::uint64_t total_count = 0;
    for (const auto& run : runs) {
        elapsed.push_back(run.elapsed_us);
        total_us += run.elapsed_us;
        total_count += run.count;
    }
    std::sort(elapsed.begin(), elapsed.end());
    SectionStats stats;
    stats.mean_us = static_cast<double>(total_us) / static_cast<double>(n);
    stats.median_us =
        n % 2 == 1 ? static_cast<double>(elapsed[n / 2])
                   : (static_cast<double>(elapsed[n / 2 - 1]) +
                      static_cast<double>(elapsed[n / 2])) /
                         2.0;
    const std::size_t rank = (99 * n + 99) / 100;  // nearest rank, 1-based
    stats.p99_us = static_cast<double>(elapsed[rank - 1]);
    stats.mean_count = static_cast<double>(total_count) / static_cast<double>(n);
    return stats;
}

void BenchSchedule::validate() const {
    if (ks.size() != seeds_per_k.size())
        throw ContractError(fmt::format("schedule pairs {} hop counts with {} seed counts",
                                        ks.size(), seeds_per_k.size()));
    for (const std::uint32_t k : ks)
        if (k < 1 || k > kMaxHops)
            throw ContractError(
                fmt::format("hop count {} outside [1, {}]", k, kMaxHops));
    for (std::size_t i = 0; i < seeds_per_k.size(); ++i)
        if (seeds_per_k[i] == 0)
            throw ContractError(
                fmt::format("seed count for k={} must be at least 1", ks[i]));
}

KHopReport run_khop_benchmark(const PropertyGraph& graph, const BenchSchedule& schedule) {
    schedule.validate();
    KHopReport report{schedule.mode, {}};
    if (schedule.ks.empty()) return report;
    graph.flush();
    const std::size_t max_seeds =
        *std::max_element(schedule.seeds_per_k.begin(), schedule.seeds_per_k.end());
    const auto master = pick_seeds(graph, max_seeds, schedule.rng_seed);
    for (std::size_t i = 0; i < schedule.ks.size(); ++i) {
        KHopSection section{schedule.ks[i], {}, {}};
        section.runs.reserve(schedule.seeds_per_k[i]);
        for (std::size_t j = 0; j < schedule.seeds_per_k[i]; ++j) {
            const std::uint64_t seed = master[j];
            const KHopQuery query{seed, section.k, RelationRef::any(), schedule.mode};
            const auto start = std::chrono::steady_clock::now();
            std::uint64_t count = 0;
            try {
                count = k_hop_count(graph, query);
            } catch (const Error& e) {
                throw HarnessError(
                    fmt::format("k={} seed={}: {}", section.k, seed, e.what()));
            }
            const auto stop = std::chrono::steady_clock::now();
            section.runs.push_back(
                {seed, count,
                 std::chrono::duration_cast<std::chrono::microseconds>(stop - start)
                     .count()});
        }
        section.stats = summarize(section.runs);
        report.sections.push_back(std::move(section));
    }
    return report;
}

KHopReport run_khop_benchmark_wire(const PropertyGraph& graph, const BenchSchedule& schedule,
                                   const std::string& host, std::uint16_t port) {
    schedule.validate();
    KHopReport report{schedule.mode, {}};
    if (schedule.ks.empty()) return report;
    graph.flush();
    const std::size_t max_seeds =
        *std::max_element(schedule.seeds_per_k.begin(), schedule.seeds_per_k.end());
    const auto master = pick_seeds(graph, max_seeds, schedule.rng_seed);

    const auto snap_path = std::filesystem::temp_directory_path() /
                           fmt::format("matgraph-bench-{}.snap", ::getpid());
    snapshot_save(graph, snap_path);
    LineClient client(host, port);
    const std::string load_response =
        client.request(fmt::format("LOAD bench {}", snap_path.string()));
    std::error_code ec;
    std::filesystem::remove(snap_path, ec);
    if (load_response != "OK 0\nEND\n")
        throw HarnessError(fmt::format("LOAD rejected: {}", one_line(load_response)));

    for (std::size_t i = 0; i < schedule.ks.size(); ++i) {
        KHopSection section{schedule.ks[i], {}, {}};
        section.runs.reserve(schedule.seeds_per_k[i]);
        for (std::size_t j = 0; j < schedule.seeds_per_k[i]; ++j) {
            const std::uint64_t seed = master[j];
            const std::string query = wire_query(seed, section.k, schedule.mode);
            const auto start = std::chrono::steady_clock::now();
            const std::string response = client.request(query);
            const auto stop = std::chrono::steady_clock::now();
            const std::uint64_t count = parse_count_response(response, section.k, seed);
            section.runs.push_back(
                {seed, count,
                 std::chrono::duration_cast<std::chrono::microseconds>(stop - start)
                     .count()});
        }
        section.stats = summarize(section.runs);
        report.sections.push_back(std::move(section));
    }
    return report;
}

std::string report_csv_string(const KHopReport& report) {
    std::string out = "k,seed,count,elapsed_us\n";
    for (const auto& section : report.sections)
        for (const auto& run : section.runs)
            fmt::format_to(std::back_inserter(out), "{},{},{},{}\n", section.k, run.seed,
                           run.count, run.elapsed_us);
    out += "k,n_seeds,mean_us,median_us,p99_us,mean_count\n";
    for (const auto& section : report.sections)
        fmt::format_to(std::back_inserter(out), "{},{},{},{},{},{}\n", section.k,
                       section.runs.size(), format_double(section.stats.mean_us),
                       format_double(section.stats.median_us),
                       format_double(section.stats.p99_us),
                       format_double(section.stats.mean_count));
    return out;
}

void report_csv(const KHopReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw HarnessError(fmt::format("cannot open '{}' for writing", path.string()));
    const std::string text = report_csv_string(report);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw HarnessError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace matgraph
