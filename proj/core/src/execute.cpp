#include "matgraph/execute.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include <fmt/format.h>

#include "matgraph/encoding.hpp"
#include "matgraph/error.hpp"

namespace matgraph {

namespace {

/// Intermediate state: one column of node ids per bound pattern variable.
/// Rows stay sorted ascending by tuple throughout; every operator either
/// appends in order or drops rows.
struct Bindings {
    std::vector<std::string> vars;
    std::vector<std::vector<std::uint64_t>> rows;

    std::size_t col(std::string_view var) const {
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (vars[i] == var) return i;
        }
        throw ContractError(fmt::format("unbound plan variable '{}'", var));
    }
};

BitVector singleton(std::uint64_t dimension, std::uint64_t index) {
    return BitVector::from_sorted(dimension, {index});
}

const SparseMatrix& adjacency(const PropertyGraph& graph, const RelationRef& rel,
                              Direction dir) {
    return dir == Direction::Out ? graph.relation_matrix(rel)
                                 : graph.transposed_matrix(rel);
}

/// Frontier levels 1..max from src with nothing pre-visited: level h holds
/// the vertices whose shortest nonempty walk from src has length h, so src
/// itself can appear (on a cycle). Collects levels min..max, sorted.
std::vector<std::uint64_t> walk_targets(const SparseMatrix& adj, std::uint64_t src,
                                        std::uint32_t min, std::uint32_t max) {
    std::vector<std::uint64_t> out;
    const std::uint64_t dim = adj.nrows();
    BitVector frontier = singleton(dim, src);
    BitVector visited(dim);
    for (std::uint32_t hop = 1; hop <= max; ++hop) {
        frontier = vxm(frontier, adj, &visited, /*complement_mask=*/true);
        if (frontier.empty()) break;
        if (hop >= min) {
            out.insert(out.end(), frontier.indices().begin(), frontier.indices().end());
        }
        visited = ewise_union(visited, frontier);
    }
    std::sort(out.begin(), out.end());  // levels are disjoint; no dedup needed
    return out;
}

class Executor {
public:
    Executor(PropertyGraph& graph, const ExecObserver& observer)
        : graph_(graph), observer_(observer) {}

    ResultTable run(const PhysicalPlan& plan) {
        bindings_.rows.push_back({});  // one empty row seeds scans and creates
        for (const PlanOp& op : plan.ops) {
            if (observer_) observer_(op_name(op));
            std::visit([&](const auto& concrete) { apply(concrete); }, op);
        }
        if (!produced_) {
            // Write plans have no RETURN; serialize as zero columns, zero rows.
            table_ = ResultTable{};
        }
        return std::move(table_);
    }

private:
    void apply(const NodeScanOp& op) {
        std::vector<std::uint64_t> ids;
        if (op.label) {
            auto members = graph_.label_members(*op.label);
            ids.assign(members.begin(), members.end());
        } else {
            ids.resize(graph_.node_count());
            for (std::uint64_t i = 0; i < ids.size(); ++i) ids[i] = i;
        }
        std::vector<std::vector<std::uint64_t>> next;
        next.reserve(bindings_.rows.size() * ids.size());
        for (const auto& row : bindings_.rows) {
            for (std::uint64_t id : ids) {
                auto widened = row;
                widened.push_back(id);
                next.push_back(std::move(widened));
            }
        }
        bindings_.vars.push_back(op.var);
        bindings_.rows = std::move(next);
    }

    void apply(const TraverseOp& op) {
        expand(op.src, op.dst, op.dst_new, adjacency(graph_, op.relation, op.direction),
               [&](std::uint64_t src, const SparseMatrix& adj) {
                   return vxm(singleton(adj.nrows(), src), adj);
               });
    }

    void apply(const VarLenTraverseOp& op) {
        expand(op.src, op.dst, op.dst_new, adjacency(graph_, op.relation, op.direction),
               [&](std::uint64_t src, const SparseMatrix& adj) {
                   return BitVector::from_sorted(adj.nrows(),
                                                 walk_targets(adj, src, op.min, op.max));
               });
    }

    template <typename Step>
    void expand(const std::string& src_var, const std::string& dst_var, bool dst_new,
                const SparseMatrix& adj, Step step) {
        const std::size_t src_col = bindings_.col(src_var);
        std::vector<std::vector<std::uint64_t>> next;
        if (dst_new) {
            for (const auto& row : bindings_.rows) {
                const BitVector reached = step(row[src_col], adj);
                for (std::uint64_t dst : reached.indices()) {
                    auto widened = row;
                    widened.push_back(dst);
                    next.push_back(std::move(widened));
                }
            }
            bindings_.vars.push_back(dst_var);
        } else {
            const std::size_t dst_col = bindings_.col(dst_var);
            for (const auto& row : bindings_.rows) {
                const BitVector reached = step(row[src_col], adj);
                if (reached.contains(row[dst_col])) next.push_back(row);
            }
        }
        bindings_.rows = std::move(next);
    }

    void apply(const FilterOp& op) {
        std::vector<std::vector<std::uint64_t>> kept;
        for (const auto& row : bindings_.rows) {
            bool pass = true;
            for (const Predicate& pred : op.predicates) {
                if (!evaluate(pred, row)) {
                    pass = false;
                    break;
                }
            }
            if (pass) kept.push_back(row);
        }
        bindings_.rows = std::move(kept);
    }

    bool evaluate(const Predicate& pred, const std::vector<std::uint64_t>& row) {
        if (const auto* check = std::get_if<LabelCheck>(&pred)) {
            std::uint64_t id = row[bindings_.col(check->var)];
            auto members = graph_.label_members(check->label);
            return std::binary_search(members.begin(), members.end(), id);
        }
        const auto& cmp = std::get<Comparison>(pred);
        const Value* lhs = resolve(cmp.lhs, row);
        const Value* rhs = resolve(cmp.rhs, row);
        if (!lhs || !rhs) return false;  // null never compares true
        return compare(*lhs, cmp.op, *rhs);
    }

    /// Looks an operand up against a row; null (missing property) -> nullptr.
    const Value* resolve(const Operand& operand, const std::vector<std::uint64_t>& row) {
        if (const auto* literal = std::get_if<Value>(&operand)) return literal;
        const auto& access = std::get<PropertyAccess>(operand);
        const PropertyMap& props = graph_.node_props(row[bindings_.col(access.var)]);
        auto it = props.find(access.key);
        return it == props.end() ? nullptr : &it->second;
    }

    /// Int and float compare numerically (1 = 1.0 holds); strings and bools
    /// support equality only. Everything else is unequal and unordered, so
    /// ordering a non-number drops the row rather than erroring.
    static bool compare(const Value& lhs, CompareOp op, const Value& rhs) {
        if (lhs.is_numeric() && rhs.is_numeric()) {
            if (lhs.is_int() && rhs.is_int()) {
                return compare_ordered(lhs.as_int(), op, rhs.as_int());
            }
            const double l = lhs.is_int() ? static_cast<double>(lhs.as_int()) : lhs.as_float();
            const double r = rhs.is_int() ? static_cast<double>(rhs.as_int()) : rhs.as_float();
            return compare_ordered(l, op, r);
        }
        if (lhs.is_string() && rhs.is_string()) {
            return equality_only(op, lhs.as_string() == rhs.as_string());
        }
        if (lhs.is_bool() && rhs.is_bool()) {
            return equality_only(op, lhs.as_bool() == rhs.as_bool());
        }
        return op == CompareOp::Ne;  // mixed types: unequal, never ordered
    }

    template <typename T>
    static bool compare_ordered(T lhs, CompareOp op, T rhs) {
        switch (op) {
            case CompareOp::Eq: return lhs == rhs;
            case CompareOp::Ne: return lhs != rhs;
            case CompareOp::Lt: return lhs < rhs;
            case CompareOp::Le: return lhs <= rhs;
            case CompareOp::Gt: return lhs > rhs;
            case CompareOp::Ge: return lhs >= rhs;
        }
        return false;
    }

    static bool equality_only(CompareOp op, bool equal) {
        if (op == CompareOp::Eq) return equal;
        if (op == CompareOp::Ne) return !equal;
        return false;
    }

    void apply(const ProjectOp& op) {
        for (const Projection& proj : op.projections) {
            table_.columns.push_back(proj.display());
        }
        table_.rows.reserve(bindings_.rows.size());
        for (const auto& row : bindings_.rows) {
            std::vector<Cell> cells;
            cells.reserve(op.projections.size());
            for (const Projection& proj : op.projections) {
                const std::uint64_t id = row[bindings_.col(proj.var)];
                if (!proj.key) {
                    cells.emplace_back(NodeRef{id});
                    continue;
                }
                const PropertyMap& props = graph_.node_props(id);
                auto it = props.find(*proj.key);
                if (it == props.end()) {
                    cells.emplace_back(std::monostate{});
                } else {
                    cells.emplace_back(it->second);
                }
            }
            table_.rows.push_back(std::move(cells));
        }
        produced_ = true;
    }

    void apply(const AggregateOp& op) {
        std::vector<Cell> cells;
        for (const Projection& proj : op.projections) {
            table_.columns.push_back(proj.display());
            std::uint64_t count = 0;
            if (!proj.key) {
                count = bindings_.rows.size();
            } else {
                const std::size_t col = bindings_.col(proj.var);
                for (const auto& row : bindings_.rows) {
                    const PropertyMap& props = graph_.node_props(row[col]);
                    if (props.find(*proj.key) != props.end()) ++count;
                }
            }
            cells.emplace_back(Value(static_cast<std::int64_t>(count)));
        }
        table_.rows.push_back(std::move(cells));
        produced_ = true;
    }

    void apply(const LimitOp& op) {
        if (table_.rows.size() > op.limit) table_.rows.resize(op.limit);
    }

    void apply(const CreateOp& op) {
        std::map<std::string, std::uint64_t> created;
        auto materialize = [&](const NodePattern& node) -> std::uint64_t {
            if (node.var) {
                auto it = created.find(*node.var);
                if (it != created.end()) return it->second;
            }
            std::vector<std::string> labels;
            if (node.label) labels.push_back(*node.label);
            const std::uint64_t id = graph_.create_node(labels, node.props);
            if (node.var) created.emplace(*node.var, id);
            return id;
        };
        for (const PatternPath& path : op.paths) {
            std::uint64_t prev = materialize(path.nodes[0]);
            for (std::size_t i = 0; i < path.edges.size(); ++i) {
                const EdgePattern& edge = path.edges[i];
                const std::uint64_t next = materialize(path.nodes[i + 1]);
                if (edge.direction == Direction::Out) {
                    graph_.create_edge(prev, *edge.relation, next);
                } else {
                    graph_.create_edge(next, *edge.relation, prev);
                }
                prev = next;
            }
        }
        // Flush now, while the caller still holds exclusive access; later
        // shared-lock readers must never trigger the flush themselves.
        graph_.flush();
    }

    PropertyGraph& graph_;
    const ExecObserver& observer_;
    Bindings bindings_;
    ResultTable table_;
    bool produced_ = false;
};

}  // namespace

std::string encode_cell(const Cell& cell) {
    if (std::holds_alternative<std::monostate>(cell)) return "";
    if (const auto* node = std::get_if<NodeRef>(&cell)) return fmt::format("#{}", node->id);
    const Value& value = std::get<Value>(cell);
    switch (value.type()) {
        case Value::Type::Int: return fmt::format("{}", value.as_int());
        case Value::Type::Float: return format_double(value.as_float());
        case Value::Type::Bool: return value.as_bool() ? "true" : "false";
        case Value::Type::String: return percent_encode(value.as_string());
    }
    return "";
}

std::string to_string(const ResultTable& table) {
    if (table.columns.empty()) return "";
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i > 0) out += '\t';
        out += table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out += '\t';
            out += encode_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

ResultTable execute(const PhysicalPlan& plan, PropertyGraph& graph,
                    const ExecObserver& observer) {
    return Executor(graph, observer).run(plan);
}

BitVector k_hop_frontier(const PropertyGraph& graph, const KHopQuery& query) {
    if (query.seed >= graph.node_count()) {
        throw ContractError(
            fmt::format("k-hop seed {} is not an allocated node", query.seed));
    }
    if (query.k < 1 || query.k > kMaxHops) {
        throw ContractError(fmt::format("k-hop count {} outside [1, {}]", query.k, kMaxHops));
    }
    const SparseMatrix& adj = graph.relation_matrix(query.relation);
    const std::uint64_t dim = adj.nrows();
    BitVector frontier = singleton(dim, query.seed);
    BitVector visited = frontier;
    for (std::uint32_t hop = 1; hop <= query.k; ++hop) {
        frontier = vxm(frontier, adj, &visited, /*complement_mask=*/true);
        if (frontier.empty()) break;
        visited = ewise_union(visited, frontier);
    }
    if (query.mode == TraverseMode::Exact) return frontier;
    std::vector<std::uint64_t> reached;
    reached.reserve(visited.nvals() - 1);
    for (std::uint64_t index : visited.indices()) {
        if (index != query.seed) reached.push_back(index);
    }
    return BitVector::from_sorted(dim, std::move(reached));
}

std::uint64_t k_hop_count(const PropertyGraph& graph, const KHopQuery& query) {
    return k_hop_frontier(graph, query).nvals();
}

}  // namespace matgraph
