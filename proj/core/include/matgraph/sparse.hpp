#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace matgraph {

/// Sorted sparse set of positions in [0, dimension). Represents traversal
/// frontiers, label membership sets and vxm masks. Immutable after
/// construction; safe to share across concurrent readers.
class BitVector {
public:
    BitVector() = default;

    /// Empty vector of the given dimension.
    explicit BitVector(std::uint64_t dimension) : dimension_(dimension) {}

    /// Build from indices already sorted strictly ascending. Validates.
    static BitVector from_sorted(std::uint64_t dimension, std::vector<std::uint64_t> indices);

    /// Build from arbitrary indices; sorts and removes duplicates.
    static BitVector from_unsorted(std::uint64_t dimension, std::vector<std::uint64_t> indices);

    std::uint64_t dimension() const noexcept { return dimension_; }
    std::uint64_t nvals() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }
    std::span<const std::uint64_t> indices() const noexcept { return indices_; }

    bool contains(std::uint64_t index) const;

    /// Same stored set viewed at a larger dimension.
    BitVector widened(std::uint64_t dimension) const;

    void check_invariants() const;

    friend bool operator==(const BitVector&, const BitVector&) = default;

private:
    std::uint64_t dimension_ = 0;
    std::vector<std::uint64_t> indices_;
};

/// Binary operators on the 64-bit integer value domain. BoolOr/BoolAnd treat
/// values as truth values (nonzero = true) and yield 0 or 1.
enum class BinaryOp : std::uint8_t { BoolOr, BoolAnd, Plus, Times, Min };

std::int64_t apply(BinaryOp op, std::int64_t lhs, std::int64_t rhs);

/// An (add, multiply) operator pair with additive identity. Three semirings
/// ship: boolean or-and (traversal/reachability), plus-times and min-plus
/// over 64-bit integers.
struct Semiring {
    BinaryOp add_op;
    BinaryOp mul_op;
    std::int64_t add_identity;

    static const Semiring& bool_or_and();
    static const Semiring& plus_times();
    static const Semiring& min_plus();

    /// Boolean semirings produce structural (value-less) matrices.
    bool is_boolean() const noexcept { return add_op == BinaryOp::BoolOr; }

    friend bool operator==(const Semiring&, const Semiring&) = default;
};

/// One (row, col[, value]) entry for matrix_build / extract_tuples.
/// A missing value marks a structural (boolean) entry.
struct MatrixTuple {
    std::uint64_t row = 0;
    std::uint64_t col = 0;
    std::optional<std::int64_t> value;

    friend bool operator==(const MatrixTuple&, const MatrixTuple&) = default;
};

/// Compressed-sparse-row matrix. Boolean (structural) matrices store no
/// value array; valued matrices store one 64-bit integer per entry.
/// Column indices are strictly ascending within each row. Instances are
/// immutable after construction and safe to share across readers.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Empty pattern of the given shape.
    SparseMatrix(std::uint64_t nrows, std::uint64_t ncols);

    /// Assemble from raw CSR arrays. Validates all structural invariants.
    static SparseMatrix from_parts(std::uint64_t nrows, std::uint64_t ncols,
                                   std::vector<std::uint64_t> row_ptr,
                                   std::vector<std::uint64_t> col_idx,
                                   std::vector<std::int64_t> vals = {});

    std::uint64_t nrows() const noexcept { return nrows_; }
    std::uint64_t ncols() const noexcept { return ncols_; }
    std::uint64_t nvals() const noexcept { return col_idx_.size(); }
    bool has_values() const noexcept { return valued_; }

    std::span<const std::uint64_t> row_ptr() const noexcept { return row_ptr_; }
    std::span<const std::uint64_t> col_idx() const noexcept { return col_idx_; }
    std::span<const std::int64_t> values() const noexcept { return vals_; }

    /// True when entries carry values; false for structural (boolean) storage.
    bool valued() const noexcept { return valued_; }

    /// Column indices stored in row r.
    std::span<const std::uint64_t> row(std::uint64_t r) const;

    /// Values stored in row r (empty for structural matrices).
    std::span<const std::int64_t> row_values(std::uint64_t r) const;

    bool contains(std::uint64_t r, std::uint64_t c) const;

    /// Stored entries in row-major order.
    std::vector<MatrixTuple> extract_tuples() const;

    /// Same stored entries embedded in a larger shape.
    SparseMatrix padded(std::uint64_t nrows, std::uint64_t ncols) const;

    /// Throws Error if any structural invariant is violated.
    void check_invariants() const;

    friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

private:
    std::uint64_t nrows_ = 0;
    std::uint64_t ncols_ = 0;
    bool valued_ = false;  // distinguishes an empty valued matrix from a structural one
    std::vector<std::uint64_t> row_ptr_ = {0};
    std::vector<std::uint64_t> col_idx_;
    std::vector<std::int64_t> vals_;
};

/// Build a matrix from tuples. Duplicate (row, col) pairs combine with the
/// semiring's add operator; under the boolean semiring the result is
/// structural and duplicates collapse by union. Tuples must either all carry
/// values (valued build) or none (structural build).
SparseMatrix matrix_build(std::uint64_t nrows, std::uint64_t ncols,
                          std::span<const MatrixTuple> tuples,
                          const Semiring& semiring = Semiring::bool_or_and());

/// Row-vector times matrix over the boolean semiring: the single-hop
/// traversal step. Returns { c : some r in v has (r,c) stored in m },
/// intersected with the mask (or its complement when complement_mask).
BitVector vxm(const BitVector& v, const SparseMatrix& m,
              const BitVector* mask = nullptr, bool complement_mask = false);

/// Semiring matrix product. With a mask, the stored pattern of the result is
/// restricted to the mask's pattern. Boolean results are structural.
/// Structural inputs behave as if every stored entry held the value 1.
SparseMatrix mxm(const SparseMatrix& a, const SparseMatrix& b,
                 const Semiring& semiring = Semiring::bool_or_and(),
                 const SparseMatrix* mask = nullptr);

/// Sorted set union of two equal-dimension vectors.
BitVector ewise_union(const BitVector& a, const BitVector& b);

/// (r, c) stored in the result iff (c, r) stored in m. Values carried along.
SparseMatrix transpose(const SparseMatrix& m);

/// Number of stored entries.
std::uint64_t nvals(const SparseMatrix& m);
std::uint64_t nvals(const BitVector& v);

}  // namespace matgraph
