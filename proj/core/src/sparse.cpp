#include "matgraph/sparse.hpp"

#include <algorithm>
#include <utility>

#include <fmt/format.h>

#include "matgraph/error.hpp"

namespace matgraph {

namespace {

#if MATGRAPH_INTERNAL_CHECKS
inline void post_check(const BitVector& v) { v.check_invariants(); }
inline void post_check(const SparseMatrix& m) { m.check_invariants(); }
#else
inline void post_check(const BitVector&) {}
inline void post_check(const SparseMatrix&) {}
#endif

}  // namespace

// ---------------------------------------------------------------------------
// BitVector

BitVector BitVector::from_sorted(std::uint64_t dimension, std::vector<std::uint64_t> indices) {
    BitVector v(dimension);
    v.indices_ = std::move(indices);
    v.check_invariants();
    return v;
}

BitVector BitVector::from_unsorted(std::uint64_t dimension, std::vector<std::uint64_t> indices) {
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    return from_sorted(dimension, std::move(indices));
}

bool BitVector::contains(std::uint64_t index) const {
    return std::binary_search(indices_.begin(), indices_.end(), index);
}

BitVector BitVector::widened(std::uint64_t dimension) const {
    if (dimension < dimension_) {
        throw ContractError(fmt::format(
            "cannot widen BitVector of dimension {} to smaller dimension {}", dimension_, dimension));
    }
    BitVector v(dimension);
    v.indices_ = indices_;
    return v;
}

void BitVector::check_invariants() const {
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        if (indices_[i] >= dimension_) {
            throw Error(fmt::format("BitVector invariant violated: index {} >= dimension {}",
                                    indices_[i], dimension_));
        }
        if (i > 0 && indices_[i - 1] >= indices_[i]) {
            throw Error(fmt::format("BitVector invariant violated: indices not strictly increasing at {}", i));
        }
    }
}

// ---------------------------------------------------------------------------
// Semiring

std::int64_t apply(BinaryOp op, std::int64_t lhs, std::int64_t rhs) {
    switch (op) {
        case BinaryOp::BoolOr: return (lhs != 0 || rhs != 0) ? 1 : 0;
        case BinaryOp::BoolAnd: return (lhs != 0 && rhs != 0) ? 1 : 0;
        case BinaryOp::Plus: return lhs + rhs;
        case BinaryOp::Times: return lhs * rhs;
        case BinaryOp::Min: return lhs < rhs ? lhs : rhs;
    }
    throw ContractError("unknown binary operator");
}

const Semiring& Semiring::bool_or_and() {
    static const Semiring s{BinaryOp::BoolOr, BinaryOp::BoolAnd, 0};
    return s;
}

const Semiring& Semiring::plus_times() {
    static const Semiring s{BinaryOp::Plus, BinaryOp::Times, 0};
    return s;
}

const Semiring& Semiring::min_plus() {
    static const Semiring s{BinaryOp::Min, BinaryOp::Plus, INT64_MAX};
    return s;
}

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix::SparseMatrix(std::uint64_t nrows, std::uint64_t ncols)
    : nrows_(nrows), ncols_(ncols), row_ptr_(nrows + 1, 0) {}

SparseMatrix SparseMatrix::from_parts(std::uint64_t nrows, std::uint64_t ncols,
                                      std::vector<std::uint64_t> row_ptr,
                                      std::vector<std::uint64_t> col_idx,
                                      std::vector<std::int64_t> vals) {
    SparseMatrix m;
    m.nrows_ = nrows;
    m.ncols_ = ncols;
    m.valued_ = !vals.empty();
    m.row_ptr_ = std::move(row_ptr);
    m.col_idx_ = std::move(col_idx);
    m.vals_ = std::move(vals);
    m.check_invariants();
    return m;
}

std::span<const std::uint64_t> SparseMatrix::row(std::uint64_t r) const {
    if (r >= nrows_) {
        throw ContractError(fmt::format("row {} out of range for {}x{} matrix", r, nrows_, ncols_));
    }
    return std::span(col_idx_).subspan(row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
}

std::span<const std::int64_t> SparseMatrix::row_values(std::uint64_t r) const {
    if (r >= nrows_) {
        throw ContractError(fmt::format("row {} out of range for {}x{} matrix", r, nrows_, ncols_));
    }
    if (!valued_) return {};
    return std::span(vals_).subspan(row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
}

bool SparseMatrix::contains(std::uint64_t r, std::uint64_t c) const {
    if (r >= nrows_) return false;
    auto cols = row(r);
    return std::binary_search(cols.begin(), cols.end(), c);
}

std::vector<MatrixTuple> SparseMatrix::extract_tuples() const {
    std::vector<MatrixTuple> out;
    out.reserve(col_idx_.size());
    for (std::uint64_t r = 0; r < nrows_; ++r) {
        for (std::uint64_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            MatrixTuple t{r, col_idx_[p], std::nullopt};
            if (valued_) t.value = vals_[p];
            out.push_back(t);
        }
    }
    return out;
}

SparseMatrix SparseMatrix::padded(std::uint64_t nrows, std::uint64_t ncols) const {
    if (nrows < nrows_ || ncols < ncols_) {
        throw ContractError(fmt::format("cannot pad {}x{} matrix down to {}x{}",
                                        nrows_, ncols_, nrows, ncols));
    }
    SparseMatrix m = *this;
    m.nrows_ = nrows;
    m.ncols_ = ncols;
    m.row_ptr_.resize(nrows + 1, row_ptr_.back());
    post_check(m);
    return m;
}

void SparseMatrix::check_invariants() const {
    if (row_ptr_.size() != nrows_ + 1) {
        throw Error(fmt::format("SparseMatrix invariant violated: row_ptr length {} != nrows+1 ({})",
                                row_ptr_.size(), nrows_ + 1));
    }
    if (row_ptr_.front() != 0) {
        throw Error("SparseMatrix invariant violated: row_ptr[0] != 0");
    }
    if (row_ptr_.back() != col_idx_.size()) {
        throw Error(fmt::format("SparseMatrix invariant violated: row_ptr[nrows]={} != nnz={}",
                                row_ptr_.back(), col_idx_.size()));
    }
    for (std::uint64_t r = 0; r < nrows_; ++r) {
        if (row_ptr_[r] > row_ptr_[r + 1]) {
            throw Error(fmt::format("SparseMatrix invariant violated: row_ptr decreasing at row {}", r));
        }
        for (std::uint64_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            if (col_idx_[p] >= ncols_) {
                throw Error(fmt::format("SparseMatrix invariant violated: col {} >= ncols {} in row {}",
                                        col_idx_[p], ncols_, r));
            }
            if (p > row_ptr_[r] && col_idx_[p - 1] >= col_idx_[p]) {
                throw Error(fmt::format("SparseMatrix invariant violated: columns not strictly increasing in row {}", r));
            }
        }
    }
    if (valued_ && vals_.size() != col_idx_.size()) {
        throw Error(fmt::format("SparseMatrix invariant violated: {} values for {} entries",
                                vals_.size(), col_idx_.size()));
    }
    if (!valued_ && !vals_.empty()) {
        throw Error("SparseMatrix invariant violated: structural matrix carries values");
    }
}

// ---------------------------------------------------------------------------
// Operations

SparseMatrix matrix_build(std::uint64_t nrows, std::uint64_t ncols,
                          std::span<const MatrixTuple> tuples, const Semiring& semiring) {
    bool valued = false;
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        const auto& t = tuples[i];
        if (t.row >= nrows || t.col >= ncols) {
            throw BuildError(fmt::format("tuple {} ({},{}) out of bounds for {}x{} matrix",
                                         i, t.row, t.col, nrows, ncols));
        }
        if (i == 0) {
            valued = t.value.has_value();
        } else if (t.value.has_value() != valued) {
            throw BuildError(fmt::format("tuple {} ({},{}) mixes valued and structural entries",
                                         i, t.row, t.col));
        }
    }
    // Boolean builds are structural regardless of supplied values.
    if (semiring.is_boolean()) valued = false;

    std::vector<MatrixTuple> sorted(tuples.begin(), tuples.end());
    std::sort(sorted.begin(), sorted.end(), [](const MatrixTuple& x, const MatrixTuple& y) {
        return x.row != y.row ? x.row < y.row : x.col < y.col;
    });

    std::vector<std::uint64_t> row_ptr(nrows + 1, 0);
    std::vector<std::uint64_t> col_idx;
    std::vector<std::int64_t> vals;
    col_idx.reserve(sorted.size());
    if (valued) vals.reserve(sorted.size());

    for (std::size_t i = 0; i < sorted.size();) {
        const std::uint64_t r = sorted[i].row;
        const std::uint64_t c = sorted[i].col;
        std::int64_t acc = valued ? *sorted[i].value : 1;
        std::size_t j = i + 1;
        while (j < sorted.size() && sorted[j].row == r && sorted[j].col == c) {
            if (valued) acc = apply(semiring.add_op, acc, *sorted[j].value);
            ++j;
        }
        col_idx.push_back(c);
        if (valued) vals.push_back(acc);
        ++row_ptr[r + 1];
        i = j;
    }
    for (std::uint64_t r = 0; r < nrows; ++r) row_ptr[r + 1] += row_ptr[r];

    SparseMatrix m = SparseMatrix::from_parts(nrows, ncols, std::move(row_ptr),
                                              std::move(col_idx), std::move(vals));
    post_check(m);
    return m;
}

BitVector vxm(const BitVector& v, const SparseMatrix& m,
              const BitVector* mask, bool complement_mask) {
    if (v.dimension() != m.nrows()) {
        throw ContractError(fmt::format("vxm: vector dimension {} != matrix nrows {}",
                                        v.dimension(), m.nrows()));
    }
    if (mask && mask->dimension() != m.ncols()) {
        throw ContractError(fmt::format("vxm: mask dimension {} != matrix ncols {}",
                                        mask->dimension(), m.ncols()));
    }

    std::vector<char> mask_bits;
    if (mask) {
        mask_bits.assign(m.ncols(), 0);
        for (std::uint64_t i : mask->indices()) mask_bits[i] = 1;
    }
    auto admitted = [&](std::uint64_t c) {
        if (!mask) return true;
        const bool in_mask = mask_bits[c] != 0;
        return complement_mask ? !in_mask : in_mask;
    };

    std::vector<char> seen(m.ncols(), 0);
    std::vector<std::uint64_t> touched;
    for (std::uint64_t r : v.indices()) {
        for (std::uint64_t c : m.row(r)) {
            if (!seen[c] && admitted(c)) {
                seen[c] = 1;
                touched.push_back(c);
            }
        }
    }
    std::sort(touched.begin(), touched.end());

    BitVector out = BitVector::from_sorted(m.ncols(), std::move(touched));
    post_check(out);
    return out;
}

SparseMatrix mxm(const SparseMatrix& a, const SparseMatrix& b,
                 const Semiring& semiring, const SparseMatrix* mask) {
    if (a.ncols() != b.nrows()) {
        throw ContractError(fmt::format("mxm: inner dimensions disagree ({}x{} times {}x{})",
                                        a.nrows(), a.ncols(), b.nrows(), b.ncols()));
    }
    if (mask && (mask->nrows() != a.nrows() || mask->ncols() != b.ncols())) {
        throw ContractError(fmt::format("mxm: mask shape {}x{} != result shape {}x{}",
                                        mask->nrows(), mask->ncols(), a.nrows(), b.ncols()));
    }

    const bool boolean = semiring.is_boolean();
    std::vector<std::uint64_t> row_ptr(a.nrows() + 1, 0);
    std::vector<std::uint64_t> col_idx;
    std::vector<std::int64_t> vals;

    // Gustavson row-by-row product with a sparse accumulator.
    std::vector<char> seen(b.ncols(), 0);
    std::vector<std::int64_t> acc(boolean ? 0 : b.ncols(), 0);
    std::vector<char> mask_row(mask ? b.ncols() : 0, 0);
    std::vector<std::uint64_t> touched;

    for (std::uint64_t i = 0; i < a.nrows(); ++i) {
        if (mask) {
            for (std::uint64_t c : mask->row(i)) mask_row[c] = 1;
        }
        touched.clear();
        auto a_cols = a.row(i);
        auto a_vals = a.row_values(i);
        for (std::size_t p = 0; p < a_cols.size(); ++p) {
            const std::uint64_t k = a_cols[p];
            const std::int64_t a_val = a.has_values() ? a_vals[p] : 1;
            auto b_cols = b.row(k);
            auto b_vals = b.row_values(k);
            for (std::size_t q = 0; q < b_cols.size(); ++q) {
                const std::uint64_t j = b_cols[q];
                if (mask && !mask_row[j]) continue;
                if (boolean) {
                    if (!seen[j]) {
                        seen[j] = 1;
                        touched.push_back(j);
                    }
                    continue;
                }
                const std::int64_t b_val = b.has_values() ? b_vals[q] : 1;
                const std::int64_t product = apply(semiring.mul_op, a_val, b_val);
                if (!seen[j]) {
                    seen[j] = 1;
                    touched.push_back(j);
                    acc[j] = product;
                } else {
                    acc[j] = apply(semiring.add_op, acc[j], product);
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        for (std::uint64_t j : touched) {
            col_idx.push_back(j);
            if (!boolean) vals.push_back(acc[j]);
            seen[j] = 0;
        }
        row_ptr[i + 1] = col_idx.size();
        if (mask) {
            for (std::uint64_t c : mask->row(i)) mask_row[c] = 0;
        }
    }

    SparseMatrix m = SparseMatrix::from_parts(a.nrows(), b.ncols(), std::move(row_ptr),
                                              std::move(col_idx), std::move(vals));
    post_check(m);
    return m;
}

BitVector ewise_union(const BitVector& a, const BitVector& b) {
    if (a.dimension() != b.dimension()) {
        throw ContractError(fmt::format("ewise_union: dimensions disagree ({} vs {})",
                                        a.dimension(), b.dimension()));
    }
    std::vector<std::uint64_t> merged;
    merged.reserve(a.nvals() + b.nvals());
    std::set_union(a.indices().begin(), a.indices().end(),
                   b.indices().begin(), b.indices().end(), std::back_inserter(merged));
    BitVector out = BitVector::from_sorted(a.dimension(), std::move(merged));
    post_check(out);
    return out;
}

SparseMatrix transpose(const SparseMatrix& m) {
    // Counting sort by column; preserves within-row order, so the transposed
    // rows come out sorted.
    std::vector<std::uint64_t> row_ptr(m.ncols() + 1, 0);
    for (std::uint64_t c : m.col_idx()) ++row_ptr[c + 1];
    for (std::uint64_t c = 0; c < m.ncols(); ++c) row_ptr[c + 1] += row_ptr[c];

    std::vector<std::uint64_t> col_idx(m.nvals());
    std::vector<std::int64_t> vals(m.has_values() ? m.nvals() : 0);
    std::vector<std::uint64_t> fill(row_ptr.begin(), row_ptr.end() - 1);
    for (std::uint64_t r = 0; r < m.nrows(); ++r) {
        auto cols = m.row(r);
        auto rvals = m.row_values(r);
        for (std::size_t p = 0; p < cols.size(); ++p) {
            const std::uint64_t pos = fill[cols[p]]++;
            col_idx[pos] = r;
            if (m.has_values()) vals[pos] = rvals[p];
        }
    }

    SparseMatrix t = SparseMatrix::from_parts(m.ncols(), m.nrows(), std::move(row_ptr),
                                              std::move(col_idx), std::move(vals));
    post_check(t);
    return t;
}

std::uint64_t nvals(const SparseMatrix& m) { return m.nvals(); }
std::uint64_t nvals(const BitVector& v) { return v.nvals(); }

}  // namespace matgraph
