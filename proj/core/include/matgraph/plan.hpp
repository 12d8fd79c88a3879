#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "matgraph/ast.hpp"
#include "matgraph/graph.hpp"

namespace matgraph {

/// Exact collects vertices at distance exactly max (min == max);
/// Cumulative collects every distance in [min, max].
enum class TraverseMode : std::uint8_t { Exact, Cumulative };

/// Emit every node id, restricted to a label when present. Always binds a
/// fresh variable; re-used variables continue an existing chain instead.
struct NodeScanOp {
    std::string var;
    std::optional<std::string> label;
};

/// Single-hop expansion of `src` along `relation`. When `dst_new` is false
/// the destination variable is already bound and the op filters rows to
/// those whose binding is reachable (a semi-join) instead of widening.
struct TraverseOp {
    std::string src;
    RelationRef relation;
    Direction direction = Direction::Out;
    std::string dst;
    bool dst_new = true;
};

/// Masked frontier expansion collecting targets at hop depths [min, max].
struct VarLenTraverseOp {
    std::string src;
    RelationRef relation;
    Direction direction = Direction::Out;
    std::uint32_t min = 1;
    std::uint32_t max = 1;
    std::string dst;
    TraverseMode mode = TraverseMode::Exact;
    bool dst_new = true;
};

/// Label membership test desugared from a non-scan pattern node.
struct LabelCheck {
    std::string var;
    std::string label;
    std::size_t offset = 0;
};

using Predicate = std::variant<Comparison, LabelCheck>;

/// Row filter: pattern-derived predicates first, then WHERE comparisons.
struct FilterOp {
    std::vector<Predicate> predicates;
};

struct ProjectOp {
    std::vector<Projection> projections;
};

/// All projections are count(...); produces exactly one row.
struct AggregateOp {
    std::vector<Projection> projections;
};

struct LimitOp {
    std::uint64_t limit = 0;
};

struct CreateOp {
    std::vector<PatternPath> paths;
};

using PlanOp = std::variant<NodeScanOp, TraverseOp, VarLenTraverseOp, FilterOp,
                            ProjectOp, AggregateOp, LimitOp, CreateOp>;

/// Linear operator chain, leaf first. ops[0] is a NodeScanOp or a CreateOp;
/// every variable an operator consumes is bound by an operator before it.
struct PhysicalPlan {
    std::vector<PlanOp> ops;

    bool is_write() const noexcept;
};

std::string_view op_name(const PlanOp& op);

/// Compile a parsed query. Pattern order maps one-to-one onto operator
/// order: the leftmost unbound pattern node becomes a NodeScan, each edge a
/// Traverse or VarLenTraverse, WHERE a Filter, RETURN a Project or
/// Aggregate, LIMIT a Limit. Throws PlanError on type errors and on
/// constructs the executor cannot evaluate.
PhysicalPlan plan(const QueryAst& ast, const PropertyGraph& graph);

/// One operator per line, for tests and debugging.
std::string describe(const PhysicalPlan& plan);

}  // namespace matgraph
