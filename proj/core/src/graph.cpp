#include "matgraph/graph.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "matgraph/encoding.hpp"
#include "matgraph/error.hpp"

namespace matgraph {

namespace {

constexpr std::uint64_t kMinCapacity = 16;

std::uint64_t next_capacity(std::uint64_t current, std::uint64_t needed) {
    std::uint64_t cap = std::max(current, kMinCapacity);
    while (cap < needed) cap *= 2;
    return cap;
}

}  // namespace

PropertyGraph::PropertyGraph(std::uint64_t initial_capacity)
    : capacity_(std::max(initial_capacity, kMinCapacity)),
      any_{SparseMatrix(capacity_, capacity_), {}, std::nullopt},
      empty_(capacity_, capacity_),
      transpose_mutex_(std::make_unique<std::mutex>()) {}

std::uint64_t PropertyGraph::create_node(const std::vector<std::string>& labels,
                                         PropertyMap props) {
    for (const auto& label : labels) {
        if (!is_identifier(label)) {
            throw ContractError(fmt::format("label '{}' is not a valid identifier", label));
        }
    }
    for (const auto& [key, value] : props) {
        (void)value;
        if (!is_identifier(key)) {
            throw ContractError(fmt::format("property key '{}' is not a valid identifier", key));
        }
    }
    grow_to(node_count_ + 1);
    const std::uint64_t id = node_count_++;
    for (const auto& label : labels) {
        auto& members = labels_[label];
        if (members.empty() || members.back() != id) members.push_back(id);
    }
    node_props_.push_back(std::move(props));
    return id;
}

void PropertyGraph::create_edge(std::uint64_t src, const std::string& relation,
                                std::uint64_t dst, PropertyMap props) {
    if (src >= node_count_ || dst >= node_count_) {
        throw ContractError(fmt::format("unknown node id {} in edge ({})-[:{}]->({})",
                                        src >= node_count_ ? src : dst, src, relation, dst));
    }
    if (!is_identifier(relation)) {
        throw ContractError(fmt::format("relation type '{}' is not a valid identifier", relation));
    }
    for (const auto& [key, value] : props) {
        (void)value;
        if (!is_identifier(key)) {
            throw ContractError(fmt::format("property key '{}' is not a valid identifier", key));
        }
    }

    auto [it, inserted] = relations_.try_emplace(relation);
    if (inserted) it->second.matrix = SparseMatrix(capacity_, capacity_);
    it->second.pending.emplace_back(src, dst);
    any_.pending.emplace_back(src, dst);

    // Re-creating an edge overwrites its properties; empty maps are not stored.
    const auto key = std::make_tuple(src, relation, dst);
    if (props.empty()) {
        edge_props_.erase(key);
    } else {
        edge_props_[key] = std::move(props);
    }
}

const SparseMatrix& PropertyGraph::relation_matrix(const RelationRef& rel) const {
    flush();
    const RelationSlot* slot = find_slot(rel);
    return slot ? slot->matrix : empty_;
}

const SparseMatrix& PropertyGraph::transposed_matrix(const RelationRef& rel) const {
    flush();
    const RelationSlot* slot = find_slot(rel);
    if (!slot) return empty_;
    // Lazy init is the only mutation readers can race on; a dedicated mutex
    // keeps it safe without serializing whole queries.
    std::lock_guard lock(*transpose_mutex_);
    auto& mutable_slot = const_cast<RelationSlot&>(*slot);
    if (!mutable_slot.transposed) {
        mutable_slot.transposed = transpose(mutable_slot.matrix);
    }
    return *mutable_slot.transposed;
}

BitVector PropertyGraph::label_vector(std::string_view label) const {
    auto it = labels_.find(label);
    if (it == labels_.end()) return BitVector(capacity_);
    return BitVector::from_sorted(capacity_, it->second);
}

std::vector<std::string> PropertyGraph::relation_names() const {
    std::vector<std::string> names;
    names.reserve(relations_.size());
    for (const auto& [name, slot] : relations_) {
        (void)slot;
        names.push_back(name);
    }
    return names;
}

std::vector<std::string> PropertyGraph::label_names() const {
    std::vector<std::string> names;
    names.reserve(labels_.size());
    for (const auto& [name, members] : labels_) {
        (void)members;
        names.push_back(name);
    }
    return names;
}

std::span<const std::uint64_t> PropertyGraph::label_members(std::string_view label) const {
    auto it = labels_.find(label);
    if (it == labels_.end()) return {};
    return it->second;
}

std::vector<std::string> PropertyGraph::node_labels(std::uint64_t id) const {
    std::vector<std::string> out;
    for (const auto& [name, members] : labels_) {
        if (std::binary_search(members.begin(), members.end(), id)) out.push_back(name);
    }
    return out;
}

const PropertyMap& PropertyGraph::node_props(std::uint64_t id) const {
    if (id >= node_count_) {
        throw ContractError(fmt::format("unknown node id {}", id));
    }
    return node_props_[id];
}

const PropertyMap* PropertyGraph::edge_props(std::uint64_t src, std::string_view relation,
                                             std::uint64_t dst) const {
    auto it = edge_props_.find({src, std::string(relation), dst});
    return it == edge_props_.end() ? nullptr : &it->second;
}

std::uint64_t PropertyGraph::edge_record_count() const {
    flush();
    std::uint64_t total = 0;
    for (const auto& [name, slot] : relations_) {
        (void)name;
        total += slot.matrix.nvals();
    }
    return total;
}

void PropertyGraph::flush() const {
    bool dirty = !any_.pending.empty();
    for (auto& [name, slot] : relations_) {
        (void)name;
        dirty = dirty || !slot.pending.empty();
        flush_slot(slot, capacity_);
    }
    flush_slot(any_, capacity_);
    if (dirty) {
#if MATGRAPH_INTERNAL_CHECKS
        check_union_invariant();
#endif
    }
}

void PropertyGraph::flush_slot(RelationSlot& slot, std::uint64_t dim) {
    if (slot.pending.empty()) return;
    auto& pending = slot.pending;
    std::sort(pending.begin(), pending.end());
    pending.erase(std::unique(pending.begin(), pending.end()), pending.end());

    const SparseMatrix& old = slot.matrix;
    std::vector<std::uint64_t> row_ptr(dim + 1, 0);
    std::vector<std::uint64_t> col_idx;
    col_idx.reserve(old.nvals() + pending.size());

    std::size_t p = 0;
    for (std::uint64_t r = 0; r < dim; ++r) {
        auto cols = r < old.nrows() ? old.row(r) : std::span<const std::uint64_t>{};
        std::size_t q = 0;
        while (q < cols.size() || (p < pending.size() && pending[p].first == r)) {
            if (q < cols.size() &&
                (p >= pending.size() || pending[p].first != r || cols[q] <= pending[p].second)) {
                if (p < pending.size() && pending[p].first == r && pending[p].second == cols[q]) {
                    ++p;  // duplicate of an existing entry
                }
                col_idx.push_back(cols[q]);
                ++q;
            } else {
                col_idx.push_back(pending[p].second);
                ++p;
            }
        }
        row_ptr[r + 1] = col_idx.size();
    }
    pending.clear();
    slot.matrix = SparseMatrix::from_parts(dim, dim, std::move(row_ptr), std::move(col_idx));
    slot.transposed.reset();
}

void PropertyGraph::check_union_invariant() const {
    std::set<std::pair<std::uint64_t, std::uint64_t>> expected;
    for (const auto& [name, slot] : relations_) {
        (void)name;
        for (const auto& t : slot.matrix.extract_tuples()) expected.insert({t.row, t.col});
    }
    std::set<std::pair<std::uint64_t, std::uint64_t>> actual;
    for (const auto& t : any_.matrix.extract_tuples()) actual.insert({t.row, t.col});
    if (expected != actual) {
        throw Error("store invariant violated: any-relation matrix is not the union of the typed matrices");
    }
}

const PropertyGraph::RelationSlot* PropertyGraph::find_slot(const RelationRef& rel) const {
    if (rel.is_any()) return &any_;
    auto it = relations_.find(*rel.name);
    return it == relations_.end() ? nullptr : &it->second;
}

void PropertyGraph::grow_to(std::uint64_t needed) {
    if (needed <= capacity_) return;
    const std::uint64_t cap = next_capacity(capacity_, needed);
    capacity_ = cap;
    for (auto& [name, slot] : relations_) {
        (void)name;
        slot.matrix = slot.matrix.padded(cap, cap);
        slot.transposed.reset();
    }
    any_.matrix = any_.matrix.padded(cap, cap);
    any_.transposed.reset();
    empty_ = SparseMatrix(cap, cap);
}

bool PropertyGraph::equals(const PropertyGraph& other) const {
    flush();
    other.flush();
    if (node_count_ != other.node_count_) return false;
    if (labels_ != other.labels_) return false;
    auto patterns = [](const PropertyGraph& g) {
        std::map<std::string, std::vector<std::pair<std::uint64_t, std::uint64_t>>> out;
        for (const auto& [name, slot] : g.relations_) {
            auto& edges = out[name];
            for (const auto& t : slot.matrix.extract_tuples()) edges.emplace_back(t.row, t.col);
        }
        return out;
    };
    if (patterns(*this) != patterns(other)) return false;
    if (node_props_ != other.node_props_) return false;
    return edge_props_ == other.edge_props_;
}

}  // namespace matgraph
