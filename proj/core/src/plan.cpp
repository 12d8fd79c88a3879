#include "matgraph/plan.hpp"

#include <map>
#include <utility>

#include <fmt/format.h>

#include "matgraph/cypher.hpp"
#include "matgraph/error.hpp"

namespace matgraph {

namespace {

[[noreturn]] void fail_at(std::size_t offset, std::string_view detail) {
    throw PlanError(offset, fmt::format("plan error at byte {}: {}", offset, detail));
}

enum class VarKind { Node, Edge };

/// Tracks which variables are bound while the operator chain grows.
/// Anonymous pattern nodes get synthetic names ("#0", "#1", ...) that can
/// never collide with user identifiers.
class Compiler {
public:
    explicit Compiler(const QueryAst& ast) : ast_(ast) {}

    PhysicalPlan run() {
        PhysicalPlan out;
        if (ast_.create) {
            compile_create(*ast_.create);
            out.ops = std::move(ops_);
            return out;
        }
        for (const PatternPath& path : ast_.match->paths) compile_path(path);
        // WHERE stays a single filter above every traversal; pattern-derived
        // predicates were already placed where their variables got bound.
        if (ast_.match->where) {
            for (const Comparison& cmp : ast_.match->where->comparisons) {
                check_comparison(cmp);
                predicates_.push_back(cmp);
            }
            flush_predicates();
        }
        compile_return(*ast_.ret);
        out.ops = std::move(ops_);
        return out;
    }

private:
    std::string fresh_name() { return fmt::format("#{}", next_anon_++); }

    bool is_bound(const std::string& var) const { return vars_.count(var) > 0; }

    /// Returns the chain name of a pattern node, emitting a NodeScan when
    /// the node is not bound yet. Bound re-occurrences must be bare: the
    /// executor has nowhere to re-check labels or properties for them.
    std::string bind_node(const NodePattern& node, bool scan_if_new) {
        if (node.var && is_bound(*node.var)) {
            if (vars_.at(*node.var) == VarKind::Edge) {
                fail_at(node.offset, fmt::format("variable '{}' is a relationship, not a node",
                                                 *node.var));
            }
            if (node.label || !node.props.empty()) {
                fail_at(node.offset,
                        fmt::format("variable '{}' is already bound; a repeated pattern node "
                                    "may not add labels or properties",
                                    *node.var));
            }
            return *node.var;
        }
        std::string name = node.var ? *node.var : fresh_name();
        vars_.emplace(name, VarKind::Node);
        if (scan_if_new) {
            ops_.push_back(NodeScanOp{name, node.label});
        } else if (node.label) {
            predicates_.push_back(LabelCheck{name, *node.label, node.offset});
        }
        for (const auto& [key, value] : node.props) {
            Comparison cmp;
            cmp.lhs = PropertyAccess{name, key, node.offset};
            cmp.op = CompareOp::Eq;
            cmp.rhs = value;
            cmp.offset = node.offset;
            predicates_.push_back(std::move(cmp));
        }
        return name;
    }

    /// Drains buffered pattern predicates into a FilterOp directly after
    /// the operator that bound their variables, so literal anchors like
    /// `(a {id: 5})` prune before any traversal work happens.
    void flush_predicates() {
        if (!predicates_.empty()) ops_.push_back(FilterOp{std::move(predicates_)});
        predicates_.clear();
    }

    void compile_path(const PatternPath& path) {
        std::string src = bind_node(path.nodes[0], /*scan_if_new=*/true);
        flush_predicates();
        for (std::size_t i = 0; i < path.edges.size(); ++i) {
            const EdgePattern& edge = path.edges[i];
            if (edge.var) vars_.emplace(*edge.var, VarKind::Edge);
            const NodePattern& dst_node = path.nodes[i + 1];
            const bool rebinding = dst_node.var && is_bound(*dst_node.var);
            std::string dst = bind_node(dst_node, /*scan_if_new=*/false);
            RelationRef rel =
                edge.relation ? RelationRef{*edge.relation} : RelationRef::any();
            if (edge.hops) {
                const TraverseMode mode = edge.hops->min == edge.hops->max
                                              ? TraverseMode::Exact
                                              : TraverseMode::Cumulative;
                ops_.push_back(VarLenTraverseOp{src, std::move(rel), edge.direction,
                                                edge.hops->min, edge.hops->max, dst, mode,
                                                !rebinding});
            } else {
                ops_.push_back(
                    TraverseOp{src, std::move(rel), edge.direction, dst, !rebinding});
            }
            flush_predicates();
            src = std::move(dst);
        }
    }

    void check_operand(const Operand& operand) const {
        const auto* access = std::get_if<PropertyAccess>(&operand);
        if (!access) return;
        auto it = vars_.find(access->var);
        // parse() already rejected unbound variables.
        if (it != vars_.end() && it->second == VarKind::Edge) {
            fail_at(access->offset,
                    fmt::format("edge variable '{}' cannot be referenced in WHERE or RETURN",
                                access->var));
        }
    }

    /// Ordering comparisons are defined on numbers only, so a string or
    /// boolean literal operand can never match and is a static error.
    void check_comparison(const Comparison& cmp) const {
        check_operand(cmp.lhs);
        check_operand(cmp.rhs);
        if (cmp.op == CompareOp::Eq || cmp.op == CompareOp::Ne) return;
        for (const Operand* operand : {&cmp.lhs, &cmp.rhs}) {
            const auto* literal = std::get_if<Value>(operand);
            if (literal && !literal->is_numeric()) {
                fail_at(cmp.offset,
                        fmt::format("type error in '{}': ordering requires numeric operands",
                                    pretty_print(cmp)));
            }
        }
    }

    void compile_return(const ReturnClause& ret) {
        for (const Projection& proj : ret.projections) {
            auto it = vars_.find(proj.var);
            if (it != vars_.end() && it->second == VarKind::Edge) {
                fail_at(proj.offset,
                        fmt::format("edge variable '{}' cannot be referenced in WHERE or RETURN",
                                    proj.var));
            }
        }
        if (ret.projections.front().is_count) {
            ops_.push_back(AggregateOp{ret.projections});
        } else {
            ops_.push_back(ProjectOp{ret.projections});
        }
        if (ret.limit) ops_.push_back(LimitOp{*ret.limit});
    }

    void compile_create(const CreateClause& create) {
        std::map<std::string, const NodePattern*> declared;
        for (const PatternPath& path : create.paths) {
            for (const NodePattern& node : path.nodes) {
                if (!node.var) continue;
                auto [it, inserted] = declared.emplace(*node.var, &node);
                if (!inserted && (node.label || !node.props.empty())) {
                    fail_at(node.offset,
                            fmt::format("variable '{}' is already bound; a repeated pattern "
                                        "node may not add labels or properties",
                                        *node.var));
                }
            }
            for (const EdgePattern& edge : path.edges) {
                if (!edge.relation) {
                    fail_at(edge.offset, "CREATE requires a relation type on every edge");
                }
                if (edge.hops) {
                    fail_at(edge.offset, "variable-length edges cannot appear in CREATE");
                }
            }
        }
        ops_.push_back(CreateOp{create.paths});
    }

    const QueryAst& ast_;
    std::vector<PlanOp> ops_;
    std::vector<Predicate> predicates_;
    std::map<std::string, VarKind> vars_;
    std::uint64_t next_anon_ = 0;
};

std::string relation_text(const RelationRef& rel) {
    return rel.is_any() ? "ANY" : *rel.name;
}

std::string_view direction_text(Direction dir) {
    return dir == Direction::Out ? "out" : "in";
}

struct Describe {
    std::string operator()(const NodeScanOp& op) const {
        if (op.label) return fmt::format("NodeScan({}, {})", op.var, *op.label);
        return fmt::format("NodeScan({})", op.var);
    }
    std::string operator()(const TraverseOp& op) const {
        return fmt::format("Traverse({}, {}, {}, {}{})", op.src, relation_text(op.relation),
                           direction_text(op.direction), op.dst, op.dst_new ? "" : ", join");
    }
    std::string operator()(const VarLenTraverseOp& op) const {
        return fmt::format("VarLenTraverse({}, {}, {}, {}, {}, {}, {}{})", op.src,
                           relation_text(op.relation), direction_text(op.direction), op.min,
                           op.max, op.dst,
                           op.mode == TraverseMode::Exact ? "exact" : "cumulative",
                           op.dst_new ? "" : ", join");
    }
    std::string operator()(const FilterOp& op) const {
        std::string body;
        for (const Predicate& pred : op.predicates) {
            if (!body.empty()) body += " AND ";
            if (const auto* check = std::get_if<LabelCheck>(&pred)) {
                body += fmt::format("{}:{}", check->var, check->label);
            } else {
                body += pretty_print(std::get<Comparison>(pred));
            }
        }
        return fmt::format("Filter({})", body);
    }
    std::string operator()(const ProjectOp& op) const {
        return fmt::format("Project({})", join_projections(op.projections));
    }
    std::string operator()(const AggregateOp& op) const {
        return fmt::format("Aggregate({})", join_projections(op.projections));
    }
    std::string operator()(const LimitOp& op) const {
        return fmt::format("Limit({})", op.limit);
    }
    std::string operator()(const CreateOp& op) const {
        std::string body;
        for (const PatternPath& path : op.paths) {
            if (!body.empty()) body += ", ";
            body += pretty_print(path);
        }
        return fmt::format("Create({})", body);
    }

    static std::string join_projections(const std::vector<Projection>& projections) {
        std::string out;
        for (const Projection& proj : projections) {
            if (!out.empty()) out += ", ";
            out += proj.display();
        }
        return out;
    }
};

}  // namespace

bool PhysicalPlan::is_write() const noexcept {
    return !ops.empty() && std::holds_alternative<CreateOp>(ops.front());
}

std::string_view op_name(const PlanOp& op) {
    switch (op.index()) {
        case 0: return "NodeScan";
        case 1: return "Traverse";
        case 2: return "VarLenTraverse";
        case 3: return "Filter";
        case 4: return "Project";
        case 5: return "Aggregate";
        case 6: return "Limit";
        case 7: return "Create";
    }
    return "?";
}

PhysicalPlan plan(const QueryAst& ast, const PropertyGraph& graph) {
    (void)graph;  // schema is dynamic; nothing to resolve against it yet
    return Compiler(ast).run();
}

std::string describe(const PhysicalPlan& plan) {
    std::string out;
    for (const PlanOp& op : plan.ops) {
        out += std::visit(Describe{}, op);
        out += '\n';
    }
    return out;
}

}  // namespace matgraph
