#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "matgraph/sparse.hpp"
#include "matgraph/value.hpp"

namespace matgraph {

/// Selects either one named relation type or the union of all of them.
struct RelationRef {
    std::optional<std::string> name;  // nullopt = ANY

    RelationRef() = default;
    RelationRef(std::string n) : name(std::move(n)) {}
    RelationRef(std::string_view n) : name(std::string(n)) {}
    RelationRef(const char* n) : name(std::string(n)) {}

    static RelationRef any() { return {}; }
    bool is_any() const noexcept { return !name.has_value(); }

    friend bool operator==(const RelationRef&, const RelationRef&) = default;
};

/// Property graph backed by one boolean adjacency matrix per relation type
/// plus a maintained any-relation union matrix. Node ids are dense in
/// [0, node_count) and never reused; matrices are square capacity x capacity
/// and grow by doubling.
///
/// Edge inserts land in a pending buffer and are folded into the matrices by
/// flush(), which any read accessor triggers. The store is not internally
/// synchronized: callers must serialize writers against readers (the server
/// holds a per-graph reader-writer lock and flushes before releasing a write
/// lock, so concurrent readers never race on a pending flush).
class PropertyGraph {
public:
    explicit PropertyGraph(std::uint64_t initial_capacity = 16);

    PropertyGraph(PropertyGraph&&) noexcept = default;
    PropertyGraph& operator=(PropertyGraph&&) noexcept = default;
    PropertyGraph(const PropertyGraph&) = delete;
    PropertyGraph& operator=(const PropertyGraph&) = delete;

    /// Allocates the next node id. Labels must be Cypher identifiers.
    std::uint64_t create_node(const std::vector<std::string>& labels, PropertyMap props = {});

    /// Records a directed typed edge. Re-creating an existing (src, type, dst)
    /// edge leaves the matrix pattern unchanged and overwrites the edge
    /// properties. Throws ContractError for unallocated endpoints.
    void create_edge(std::uint64_t src, const std::string& relation, std::uint64_t dst,
                     PropertyMap props = {});

    std::uint64_t node_count() const noexcept { return node_count_; }
    std::uint64_t capacity() const noexcept { return capacity_; }

    /// The adjacency matrix for one relation type, or the any-relation union.
    /// Flushes pending edges. Unknown names yield the empty matrix. The
    /// reference stays valid until the next write.
    const SparseMatrix& relation_matrix(const RelationRef& rel = RelationRef::any()) const;

    /// Transposed adjacency, for right-to-left traversal. Computed lazily and
    /// cached until the next write.
    const SparseMatrix& transposed_matrix(const RelationRef& rel = RelationRef::any()) const;

    /// Membership set of a label; empty vector for unknown labels.
    BitVector label_vector(std::string_view label) const;

    std::vector<std::string> relation_names() const;
    std::vector<std::string> label_names() const;

    /// Sorted node ids carrying the label (empty for unknown labels).
    std::span<const std::uint64_t> label_members(std::string_view label) const;

    /// Labels of one node, sorted by name.
    std::vector<std::string> node_labels(std::uint64_t id) const;

    const PropertyMap& node_props(std::uint64_t id) const;
    const PropertyMap* edge_props(std::uint64_t src, std::string_view relation,
                                  std::uint64_t dst) const;

    /// Total stored entries across the typed relation matrices.
    std::uint64_t edge_record_count() const;

    /// Folds pending edge tuples into the relation matrices and the union
    /// matrix, and drops stale transpose caches.
    void flush() const;

    /// Structural equality: same ids, labels, edges and properties.
    /// Capacity and matrix dimensions are not compared.
    bool equals(const PropertyGraph& other) const;

private:
    struct RelationSlot {
        SparseMatrix matrix;
        std::vector<std::pair<std::uint64_t, std::uint64_t>> pending;
        std::optional<SparseMatrix> transposed;
    };

    void grow_to(std::uint64_t needed);
    const RelationSlot* find_slot(const RelationRef& rel) const;
    static void flush_slot(RelationSlot& slot, std::uint64_t dim);
    void check_union_invariant() const;

    std::uint64_t capacity_ = 0;
    std::uint64_t node_count_ = 0;
    mutable std::map<std::string, RelationSlot, std::less<>> relations_;
    mutable RelationSlot any_;
    SparseMatrix empty_;  // capacity x capacity, returned for unknown relations
    std::map<std::string, std::vector<std::uint64_t>, std::less<>> labels_;
    std::vector<PropertyMap> node_props_;
    std::map<std::tuple<std::uint64_t, std::string, std::uint64_t>, PropertyMap> edge_props_;
    mutable std::unique_ptr<std::mutex> transpose_mutex_;
};

}  // namespace matgraph
