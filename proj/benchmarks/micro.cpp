// Microbenchmarks for the hot paths: the sparse kernels a traversal step is
// made of, the full k-hop walk, and the query front end. Graphs are RMAT so
// numbers track the shipped benchmark workload. Run manually:
//   build/benchmarks/matgraph_benchmarks --benchmark_min_time=0.5
#include <benchmark/benchmark.h>

#include <cstdint>
#include <map>
#include <string>

#include "matgraph/bench.hpp"
#include "matgraph/cypher.hpp"
#include "matgraph/execute.hpp"
#include "matgraph/graph.hpp"
#include "matgraph/plan.hpp"
#include "matgraph/sparse.hpp"

using namespace matgraph;

namespace {

const PropertyGraph& rmat_graph(std::uint32_t scale) {
    static std::map<std::uint32_t, PropertyGraph> cache;
    auto it = cache.find(scale);
    if (it == cache.end()) {
        RmatParams params;
        params.scale = scale;
        it = cache.emplace(scale, build_bench_graph(rmat_generate(params),
                                                    params.node_count()))
                 .first;
        it->second.flush();
    }
    return it->second;
}

BitVector frontier_for(const PropertyGraph& graph, std::uint64_t seed) {
    BitVector v(graph.relation_matrix().nrows());
    return BitVector::from_unsorted(v.dimension(), {seed});
}

void BM_vxm_single_hop(benchmark::State& state) {
    const PropertyGraph& graph = rmat_graph(static_cast<std::uint32_t>(state.range(0)));
    const SparseMatrix& adjacency = graph.relation_matrix();
    const BitVector frontier = frontier_for(graph, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(vxm(frontier, adjacency));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_vxm_single_hop)->Arg(10)->Arg(12)->Arg(14);

void BM_vxm_masked(benchmark::State& state) {
    const PropertyGraph& graph = rmat_graph(static_cast<std::uint32_t>(state.range(0)));
    const SparseMatrix& adjacency = graph.relation_matrix();
    const BitVector frontier = frontier_for(graph, 1);
    const BitVector visited = vxm(frontier, adjacency);
    for (auto _ : state) {
        benchmark::DoNotOptimize(vxm(visited, adjacency, &visited, true));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_vxm_masked)->Arg(10)->Arg(12)->Arg(14);

void BM_mxm_boolean_square(benchmark::State& state) {
    const PropertyGraph& graph = rmat_graph(static_cast<std::uint32_t>(state.range(0)));
    const SparseMatrix& adjacency = graph.relation_matrix();
    for (auto _ : state) {
        benchmark::DoNotOptimize(mxm(adjacency, adjacency));
    }
}
BENCHMARK(BM_mxm_boolean_square)->Arg(8)->Arg(10);

void BM_k_hop_count(benchmark::State& state) {
    const PropertyGraph& graph = rmat_graph(12);
    const auto seeds = pick_seeds(graph, 32, 1);
    const std::uint32_t k = static_cast<std::uint32_t>(state.range(0));
    std::size_t next = 0;
    for (auto _ : state) {
        const std::uint64_t seed = seeds[next++ % seeds.size()];
        benchmark::DoNotOptimize(
            k_hop_count(graph, {.seed = seed, .k = k, .mode = TraverseMode::Exact}));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_k_hop_count)->Arg(1)->Arg(2)->Arg(3)->Arg(6);

void BM_parse(benchmark::State& state) {
    const std::string query =
        "MATCH (a {id: 42})-[:EDGE*2..2]->(b) WHERE b.id <> 42 RETURN count(b)";
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse(query));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_parse);

void BM_plan_and_execute_one_hop(benchmark::State& state) {
    PropertyGraph& graph = const_cast<PropertyGraph&>(rmat_graph(10));
    const QueryAst ast =
        parse("MATCH (a {id: 7})-[:EDGE]->(b) RETURN count(b)");
    for (auto _ : state) {
        benchmark::DoNotOptimize(execute(plan(ast, graph), graph));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_plan_and_execute_one_hop);

}  // namespace

BENCHMARK_MAIN();
