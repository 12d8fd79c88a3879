#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "matgraph/error.hpp"
#include "matgraph/sparse.hpp"
#include "oracles.hpp"

using namespace matgraph;

namespace {

SparseMatrix build_structural(std::uint64_t n,
                              std::vector<std::pair<std::uint64_t, std::uint64_t>> edges) {
    std::vector<MatrixTuple> tuples;
    for (auto [r, c] : edges) tuples.push_back({r, c, std::nullopt});
    return matrix_build(n, n, tuples);
}

}  // namespace

TEST_CASE("bitvector construction and membership") {
    const BitVector empty(5);
    CHECK(empty.dimension() == 5);
    CHECK(empty.nvals() == 0);
    CHECK_FALSE(empty.contains(0));

    const BitVector v = BitVector::from_sorted(8, {1, 3, 7});
    CHECK(v.nvals() == 3);
    CHECK(v.contains(3));
    CHECK_FALSE(v.contains(4));
    CHECK_THROWS_AS(BitVector::from_sorted(8, {3, 1}), Error);
    CHECK_THROWS_AS(BitVector::from_sorted(8, {1, 1}), Error);
    CHECK_THROWS_AS(BitVector::from_sorted(8, {8}), Error);

    const BitVector u = BitVector::from_unsorted(8, {7, 1, 3, 1, 7});
    CHECK(u == v);

    const BitVector wide = v.widened(20);
    CHECK(wide.dimension() == 20);
    CHECK(wide.nvals() == 3);
    CHECK(wide.contains(7));
}

TEST_CASE("ewise_union matches std::set_union") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t dim = 1 + rng() % 40;
        const auto pa = oracle::random_pattern(rng, dim, 0.3);
        const auto pb = oracle::random_pattern(rng, dim, 0.3);
        std::vector<std::uint64_t> ia, ib;
        for (std::size_t i = 0; i < dim; ++i) {
            if (pa[i]) ia.push_back(i);
            if (pb[i]) ib.push_back(i);
        }
        std::vector<std::uint64_t> want;
        std::set_union(ia.begin(), ia.end(), ib.begin(), ib.end(), std::back_inserter(want));
        const BitVector got = ewise_union(BitVector::from_sorted(dim, ia),
                                          BitVector::from_sorted(dim, ib));
        CHECK(got == BitVector::from_sorted(dim, want));
    }
    CHECK_THROWS_AS(ewise_union(BitVector(3), BitVector(4)), ContractError);
}

TEST_CASE("matrix_build structural basics") {
    const SparseMatrix m = build_structural(3, {{0, 1}, {1, 2}, {0, 1}});
    CHECK(m.nrows() == 3);
    CHECK(m.ncols() == 3);
    CHECK(nvals(m) == 2);  // duplicate (0,1) collapses
    CHECK(m.contains(0, 1));
    CHECK(m.contains(1, 2));
    CHECK_FALSE(m.contains(1, 0));
    CHECK_FALSE(m.valued());
    CHECK(m.row(0).size() == 1);
    CHECK(m.row(2).empty());
}

TEST_CASE("matrix_build combines duplicates with the add operator") {
    const std::vector<MatrixTuple> dup = {{0, 0, 2}, {0, 0, 3}, {1, 1, 7}};
    const SparseMatrix sum = matrix_build(2, 2, dup, Semiring::plus_times());
    CHECK(sum.valued());
    CHECK(sum.row_values(0)[0] == 5);
    CHECK(sum.row_values(1)[0] == 7);

    const SparseMatrix mn = matrix_build(2, 2, dup, Semiring::min_plus());
    CHECK(mn.row_values(0)[0] == 2);
}

TEST_CASE("matrix_build rejects bad tuples") {
    const std::vector<MatrixTuple> out_of_range = {{2, 0, std::nullopt}};
    CHECK_THROWS_AS(matrix_build(2, 2, out_of_range), BuildError);
    const std::vector<MatrixTuple> col_out = {{0, 5, std::nullopt}};
    CHECK_THROWS_AS(matrix_build(2, 2, col_out), BuildError);
    const std::vector<MatrixTuple> mixed = {{0, 0, 1}, {1, 1, std::nullopt}};
    CHECK_THROWS_AS(matrix_build(2, 2, mixed), BuildError);
    const std::vector<MatrixTuple> structural_under_plus = {{0, 0, std::nullopt}};
    CHECK_FALSE(matrix_build(2, 2, structural_under_plus, Semiring::plus_times()).valued());
}

TEST_CASE("boolean builds drop supplied values") {
    const std::vector<MatrixTuple> valued = {{0, 1, 42}, {1, 0, -3}};
    const SparseMatrix m = matrix_build(2, 2, valued, Semiring::bool_or_and());
    CHECK_FALSE(m.valued());
    CHECK(nvals(m) == 2);
    CHECK(m.row_values(0).empty());
}

TEST_CASE("vxm single hop on a path graph") {
    // 0 -> 1 -> 2 -> 3
    const SparseMatrix path = build_structural(4, {{0, 1}, {1, 2}, {2, 3}});
    const BitVector frontier = BitVector::from_sorted(4, {0});
    const BitVector step1 = vxm(frontier, path);
    CHECK(step1 == BitVector::from_sorted(4, {1}));
    const BitVector step2 = vxm(step1, path);
    CHECK(step2 == BitVector::from_sorted(4, {2}));

    // A mask keeps only allowed targets; complemented it removes them.
    const BitVector mask = BitVector::from_sorted(4, {2});
    CHECK(vxm(step1, path, &mask, false) == BitVector::from_sorted(4, {2}));
    CHECK(vxm(step1, path, &mask, true) == BitVector(4));
}

TEST_CASE("vxm dimension checks") {
    const SparseMatrix m = build_structural(3, {{0, 1}});
    CHECK_THROWS_AS(vxm(BitVector(2), m), ContractError);
    const BitVector bad_mask(2);
    CHECK_THROWS_AS(vxm(BitVector(3), m, &bad_mask, false), ContractError);
}

TEST_CASE("vxm agrees with the dense oracle") {
    std::mt19937_64 rng(101);
    const double densities[] = {0.02, 0.1, 0.35};
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t nrows = 1 + rng() % 32;
        const std::size_t ncols = 1 + rng() % 32;
        const double density = densities[trial % 3];
        const auto tuples = oracle::random_tuples(rng, nrows, ncols, density, false);
        const SparseMatrix m = matrix_build(nrows, ncols, tuples);
        const oracle::DenseMatrix dense = oracle::from_sparse(m);

        const auto vpat = oracle::random_pattern(rng, nrows, 0.3);
        std::vector<std::uint64_t> vidx;
        for (std::size_t i = 0; i < nrows; ++i)
            if (vpat[i]) vidx.push_back(i);
        const BitVector v = BitVector::from_sorted(nrows, vidx);

        const int mask_kind = trial % 3;  // none, straight, complemented
        if (mask_kind == 0) {
            CHECK(oracle::matches(oracle::dense_vxm(vpat, dense, nullptr, false), vxm(v, m)));
        } else {
            const auto mpat = oracle::random_pattern(rng, ncols, 0.5);
            std::vector<std::uint64_t> midx;
            for (std::size_t i = 0; i < ncols; ++i)
                if (mpat[i]) midx.push_back(i);
            const BitVector mask = BitVector::from_sorted(ncols, midx);
            const bool complement = mask_kind == 2;
            CHECK(oracle::matches(oracle::dense_vxm(vpat, dense, &mpat, complement),
                                  vxm(v, m, &mask, complement)));
        }
    }
}

TEST_CASE("mxm hand examples") {
    // Boolean reachability: path^2 gives the two-hop pairs.
    const SparseMatrix path = build_structural(4, {{0, 1}, {1, 2}, {2, 3}});
    const SparseMatrix two = mxm(path, path);
    CHECK(nvals(two) == 2);
    CHECK(two.contains(0, 2));
    CHECK(two.contains(1, 3));
    CHECK_FALSE(two.valued());

    // Plus-times on a 2x2: [[1,2],[0,3]] * [[4,0],[5,6]] = [[14,12],[15,18]].
    const std::vector<MatrixTuple> ta = {{0, 0, 1}, {0, 1, 2}, {1, 1, 3}};
    const std::vector<MatrixTuple> tb = {{0, 0, 4}, {1, 0, 5}, {1, 1, 6}};
    const SparseMatrix a = matrix_build(2, 2, ta, Semiring::plus_times());
    const SparseMatrix b = matrix_build(2, 2, tb, Semiring::plus_times());
    const SparseMatrix c = mxm(a, b, Semiring::plus_times());
    const auto tuples = c.extract_tuples();
    REQUIRE(tuples.size() == 4);
    CHECK(tuples[0] == MatrixTuple{0, 0, 14});
    CHECK(tuples[1] == MatrixTuple{0, 1, 12});
    CHECK(tuples[2] == MatrixTuple{1, 0, 15});
    CHECK(tuples[3] == MatrixTuple{1, 1, 18});

    // Min-plus relaxation step: distances propagate along edges.
    const std::vector<MatrixTuple> td = {{0, 1, 5}, {1, 2, 2}, {0, 2, 9}};
    const SparseMatrix d = matrix_build(3, 3, td, Semiring::min_plus());
    const SparseMatrix dd = mxm(d, d, Semiring::min_plus());
    // Only 0 -> 1 -> 2 composes: cost 7.
    const auto dist = dd.extract_tuples();
    REQUIRE(dist.size() == 1);
    CHECK(dist[0] == MatrixTuple{0, 2, 7});

    CHECK_THROWS_AS(mxm(a, build_structural(3, {})), ContractError);
}

TEST_CASE("mxm mask restricts the result pattern") {
    const SparseMatrix path = build_structural(4, {{0, 1}, {1, 2}, {2, 3}});
    const SparseMatrix mask = build_structural(4, {{0, 2}});
    const SparseMatrix two = mxm(path, path, Semiring::bool_or_and(), &mask);
    CHECK(nvals(two) == 1);
    CHECK(two.contains(0, 2));
}

TEST_CASE("mxm agrees with the dense oracle across semirings") {
    std::mt19937_64 rng(202);
    const Semiring* semirings[] = {&Semiring::bool_or_and(), &Semiring::plus_times(),
                                   &Semiring::min_plus()};
    const double densities[] = {0.02, 0.1, 0.35};
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t m_dim = 1 + rng() % 20;
        const std::size_t k_dim = 1 + rng() % 20;
        const std::size_t n_dim = 1 + rng() % 20;
        const Semiring& semiring = *semirings[trial % 3];
        const double density = densities[(trial / 3) % 3];
        const bool valued = !semiring.is_boolean();
        const auto ta = oracle::random_tuples(rng, m_dim, k_dim, density, valued);
        const auto tb = oracle::random_tuples(rng, k_dim, n_dim, density, valued);
        const SparseMatrix a = matrix_build(m_dim, k_dim, ta, semiring);
        const SparseMatrix b = matrix_build(k_dim, n_dim, tb, semiring);
        const oracle::DenseMatrix da = oracle::from_sparse(a);
        const oracle::DenseMatrix db = oracle::from_sparse(b);

        if (trial % 4 == 0) {
            const auto tm = oracle::random_tuples(rng, m_dim, n_dim, 0.5, false);
            const SparseMatrix mask = matrix_build(m_dim, n_dim, tm);
            const oracle::DenseMatrix dm = oracle::from_sparse(mask);
            CHECK(oracle::matches(oracle::dense_mxm(da, db, semiring, &dm),
                                  mxm(a, b, semiring, &mask)));
        } else {
            CHECK(oracle::matches(oracle::dense_mxm(da, db, semiring, nullptr),
                                  mxm(a, b, semiring)));
        }
    }
}

TEST_CASE("structural inputs multiply as all-ones") {
    const SparseMatrix pattern = build_structural(3, {{0, 1}, {1, 2}});
    const SparseMatrix counted = mxm(pattern, pattern, Semiring::plus_times());
    const auto tuples = counted.extract_tuples();
    REQUIRE(tuples.size() == 1);
    CHECK(tuples[0] == MatrixTuple{0, 2, 1});
}

TEST_CASE("transpose mirrors tuples and is an involution") {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t nrows = 1 + rng() % 24;
        const std::size_t ncols = 1 + rng() % 24;
        const bool valued = trial % 2 == 0;
        const auto tuples = oracle::random_tuples(rng, nrows, ncols, 0.2, valued);
        const SparseMatrix m =
            matrix_build(nrows, ncols, tuples,
                         valued ? Semiring::plus_times() : Semiring::bool_or_and());
        const SparseMatrix t = transpose(m);
        CHECK(t.nrows() == m.ncols());
        CHECK(t.ncols() == m.nrows());
        CHECK(nvals(t) == nvals(m));
        for (const auto& tuple : m.extract_tuples()) {
            CHECK(t.contains(tuple.col, tuple.row));
        }
        CHECK(transpose(t) == m);
    }
}

TEST_CASE("padded embeds the same entries in a larger shape") {
    const SparseMatrix m = build_structural(2, {{0, 1}, {1, 0}});
    const SparseMatrix big = m.padded(5, 5);
    CHECK(big.nrows() == 5);
    CHECK(nvals(big) == 2);
    CHECK(big.contains(0, 1));
    CHECK(big.contains(1, 0));
    CHECK_FALSE(big.contains(4, 4));
    CHECK_THROWS_AS(m.padded(1, 2), ContractError);
}
