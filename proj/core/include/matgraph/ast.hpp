#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "matgraph/value.hpp"

namespace matgraph {

/// Hard cap on variable-length hop ranges; guards against pathological plans.
inline constexpr std::uint32_t kMaxHops = 32;

/// Edge direction as written in the pattern. Out is `-[..]->`, In is `<-[..]-`.
enum class Direction : std::uint8_t { Out, In };

/// Inclusive hop range of a variable-length edge. A plain edge has no range.
struct HopRange {
    std::uint32_t min = 1;
    std::uint32_t max = 1;

    friend bool operator==(const HopRange&, const HopRange&) = default;
};

/// One `(var:Label {key: literal, ...})` element. All parts optional.
/// `offset` is the byte position of the opening parenthesis; it carries no
/// semantic weight and is ignored by equality.
struct NodePattern {
    std::optional<std::string> var;
    std::optional<std::string> label;
    PropertyMap props;
    std::size_t offset = 0;

    friend bool operator==(const NodePattern& a, const NodePattern& b) {
        return a.var == b.var && a.label == b.label && a.props == b.props;
    }
};

/// One `-[var:REL*min..max]->` element. `hops` is empty for a plain
/// single-hop edge. `offset` points at the first byte of the edge syntax.
struct EdgePattern {
    std::optional<std::string> var;
    std::optional<std::string> relation;
    Direction direction = Direction::Out;
    std::optional<HopRange> hops;
    std::size_t offset = 0;

    friend bool operator==(const EdgePattern& a, const EdgePattern& b) {
        return a.var == b.var && a.relation == b.relation &&
               a.direction == b.direction && a.hops == b.hops;
    }
};

/// Alternating node/edge chain: nodes.size() == edges.size() + 1.
struct PatternPath {
    std::vector<NodePattern> nodes;
    std::vector<EdgePattern> edges;

    friend bool operator==(const PatternPath&, const PatternPath&) = default;
};

/// `var.key` in a WHERE comparison or a projection.
struct PropertyAccess {
    std::string var;
    std::string key;
    std::size_t offset = 0;

    friend bool operator==(const PropertyAccess& a, const PropertyAccess& b) {
        return a.var == b.var && a.key == b.key;
    }
};

enum class CompareOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

/// A comparison operand: a property access or a literal value.
using Operand = std::variant<PropertyAccess, Value>;

/// One `lhs op rhs` term of a WHERE expression. `offset` points at the
/// start of the left operand.
struct Comparison {
    Operand lhs;
    CompareOp op;
    Operand rhs;
    std::size_t offset = 0;

    friend bool operator==(const Comparison& a, const Comparison& b) {
        return a.lhs == b.lhs && a.op == b.op && a.rhs == b.rhs;
    }
};

/// AND-combined comparisons; no other connectives.
struct WhereExpr {
    std::vector<Comparison> comparisons;

    friend bool operator==(const WhereExpr&, const WhereExpr&) = default;
};

/// One RETURN item: a variable, a property access, or count of either.
struct Projection {
    bool is_count = false;
    std::string var;
    std::optional<std::string> key;
    std::size_t offset = 0;

    /// Canonical column header: `a`, `a.age`, `count(a)`, `count(a.age)`.
    std::string display() const {
        std::string body = var;
        if (key) {
            body += '.';
            body += *key;
        }
        return is_count ? "count(" + body + ")" : body;
    }

    friend bool operator==(const Projection& a, const Projection& b) {
        return a.is_count == b.is_count && a.var == b.var && a.key == b.key;
    }
};

struct MatchClause {
    std::vector<PatternPath> paths;
    std::optional<WhereExpr> where;

    friend bool operator==(const MatchClause&, const MatchClause&) = default;
};

struct CreateClause {
    std::vector<PatternPath> paths;

    friend bool operator==(const CreateClause&, const CreateClause&) = default;
};

struct ReturnClause {
    std::vector<Projection> projections;
    std::optional<std::uint64_t> limit;

    friend bool operator==(const ReturnClause&, const ReturnClause&) = default;
};

/// A parsed query: either a bare CREATE, or a MATCH with a RETURN (and an
/// optional WHERE folded into the MatchClause). parse() enforces the shape.
struct QueryAst {
    std::optional<CreateClause> create;
    std::optional<MatchClause> match;
    std::optional<ReturnClause> ret;

    bool is_write() const noexcept { return create.has_value(); }

    friend bool operator==(const QueryAst&, const QueryAst&) = default;
};

}  // namespace matgraph
