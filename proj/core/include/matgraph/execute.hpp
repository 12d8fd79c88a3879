#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "matgraph/graph.hpp"
#include "matgraph/plan.hpp"
#include "matgraph/sparse.hpp"
#include "matgraph/value.hpp"

namespace matgraph {

struct NodeRef {
    std::uint64_t id = 0;

    friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

/// One result cell. monostate encodes null (a missing property).
using Cell = std::variant<std::monostate, NodeRef, Value>;

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    friend bool operator==(const ResultTable&, const ResultTable&) = default;
};

/// Wire form of a cell: `#<id>` for nodes, decimal for integers, shortest
/// round-trip decimal for floats, `true`/`false`, percent-encoded strings,
/// and the empty string for null.
std::string encode_cell(const Cell& cell);

/// Tab-separated header plus rows, LF line endings. Tables without
/// projections (write queries) serialize to the empty string.
std::string to_string(const ResultTable& table);

/// Invoked once per operator, on the thread evaluating it. The server uses
/// this to verify that a query never spreads across workers.
using ExecObserver = std::function<void(std::string_view op_name)>;

/// Run a compiled plan. Read plans leave the graph untouched; Create plans
/// mutate it and flush before returning, so later readers never race a
/// pending-edge flush. Row order is ascending by bound node-id tuple.
ResultTable execute(const PhysicalPlan& plan, PropertyGraph& graph,
                    const ExecObserver& observer = {});

/// The benchmark's unit of work: count vertices around one seed.
struct KHopQuery {
    std::uint64_t seed = 0;
    std::uint32_t k = 1;
    RelationRef relation = RelationRef::any();
    TraverseMode mode = TraverseMode::Exact;
};

/// Masked BFS from the seed: frontier starts at {seed}, visited starts as
/// {seed}, and each step expands through vxm with the complemented visited
/// mask. Exact mode returns the k-th frontier (vertices at shortest
/// distance exactly k); cumulative mode returns visited minus the seed
/// (distance 1..k). Exits early once a frontier comes up empty.
BitVector k_hop_frontier(const PropertyGraph& graph, const KHopQuery& query);

/// nvals(k_hop_frontier(graph, query)).
std::uint64_t k_hop_count(const PropertyGraph& graph, const KHopQuery& query);

}  // namespace matgraph
