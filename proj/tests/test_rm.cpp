#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

#include "camellia/errors.hpp"
#include "camellia/rm.hpp"
#include "camellia/rng.hpp"

using namespace camellia;

namespace {

// Independent weight histogram via the plain subset-sum enumeration.
std::map<std::size_t, std::size_t> weight_histogram(const Gf2Matrix& gen) {
    std::map<std::size_t, std::size_t> hist;
    for_each_codeword(gen, [&](const BitVector& w) { ++hist[w.weight()]; });
    return hist;
}

Gf2Matrix random_invertible(unsigned m, std::mt19937_64& rng) {
    for (;;) {
        Gf2Matrix A(m, m);
        for (unsigned r = 0; r < m; ++r)
            for (unsigned c = 0; c < m; ++c) A.set(r, c, rng() & 1);
        if (A.is_invertible()) return A;
    }
}

}  // namespace

TEST_CASE("point/index conversions are little endian and inverse") {
    CHECK(point_of_index(5, 3).to_string() == "101");
    for (std::uint64_t k = 0; k < 16; ++k) CHECK(index_of_point(point_of_index(k, 4)) == k);
}

TEST_CASE("generator shapes on pinned codes") {
    const RmCode rep = RmCode::build(1, 0);
    CHECK(rep.dimension() == 1);
    CHECK(rep.block_length() == 2);
    CHECK(rep.generator().row(0).to_string() == "11");

    const RmCode full = RmCode::build(2, 2);
    CHECK(full.dimension() == 4);
    CHECK(full.block_length() == 4);
    CHECK(full.generator().rank() == 4);

    const RmCode first = RmCode::build(3, 1);
    CHECK(first.dimension() == 4);
    CHECK(first.block_length() == 8);
    CHECK(first.generator().rank() == 4);
}

TEST_CASE("dimension is the binomial sum and the generator has full row rank") {
    for (unsigned m = 1; m <= 6; ++m) {
        for (unsigned r = 0; r <= m; ++r) {
            const RmCode code = RmCode::build(m, r);
            std::uint64_t dim = 0;
            for (unsigned i = 0; i <= r; ++i) dim += oracles::binom(m, i);
            CHECK(code.dimension() == dim);
            CHECK(code.generator().rank() == dim);
        }
    }
}

TEST_CASE("rate pinned values and duality") {
    CHECK(RmCode::build(3, 1).rate() == 0.5);
    CHECK(RmCode::build(4, 2).rate() == 0.6875);
    for (unsigned m = 1; m <= 4; ++m) CHECK(RmCode::build(m, m).rate() == 1.0);
    // complementary orders tile the full space: dim RM(m,r) + dim RM(m,m-r-1) = 2^m
    for (unsigned m = 1; m <= 8; ++m)
        for (unsigned r = 0; r < m; ++r)
            CHECK(RmCode::build(m, r).rate() + RmCode::build(m, m - r - 1).rate() == 1.0);
}

TEST_CASE("monomial rows evaluate their mask and come in canonical order") {
    for (unsigned m = 1; m <= 4; ++m) {
        const RmCode code = RmCode::build(m, m);
        const auto& masks = code.monomial_masks();
        REQUIRE(masks.size() == code.dimension());
        // row r evaluates the monomial prod_{j in mask} x_j: 1 iff mask subset of point
        for (std::size_t r = 0; r < masks.size(); ++r)
            for (std::size_t k = 0; k < code.block_length(); ++k)
                CHECK(code.generator().get(r, k) == ((masks[r] & ~k) == 0));
        // ascending degree, lexicographic variable index sequences within a degree
        auto vars_of = [](std::uint32_t mask) {
            std::vector<unsigned> v;
            for (unsigned j = 0; j < 32; ++j)
                if ((mask >> j) & 1) v.push_back(j);
            return v;
        };
        for (std::size_t r = 0; r + 1 < masks.size(); ++r) {
            const int da = std::popcount(masks[r]), db = std::popcount(masks[r + 1]);
            CHECK(da <= db);
            if (da == db) CHECK(vars_of(masks[r]) < vars_of(masks[r + 1]));
        }
    }
    CHECK(RmCode::build(3, 2).monomial_masks() ==
          std::vector<std::uint32_t>{0, 1, 2, 4, 3, 5, 6});
}

TEST_CASE("encode pinned values") {
    const RmCode c21 = RmCode::build(2, 1);
    CHECK(c21.encode(BitVector::from_string("000")).to_string() == "0000");
    // the first degree-1 row is the first variable, which is the low bit of
    // the point index
    CHECK(c21.encode(BitVector::from_string("010")).to_string() == "0101");
    const RmCode c22 = RmCode::build(2, 2);
    // the top-degree monomial of 2 variables hits only the all-ones point
    CHECK(c22.encode(BitVector::from_string("0001")).to_string() == "0001");
}

TEST_CASE("encode matches the generator row combination") {
    auto rng = stream_rng(21, 0);
    const RmCode code = RmCode::build(4, 2);
    for (int t = 0; t < 50; ++t) {
        BitVector msg(code.dimension());
        for (std::size_t i = 0; i < msg.size(); ++i) msg.set(i, rng() & 1);
        CHECK(code.encode(msg) == code.generator().row_combine(msg));
    }
}

TEST_CASE("generator_column packs the column bits") {
    const RmCode code = RmCode::build(3, 2);
    for (std::uint32_t c = 0; c < code.block_length(); ++c) {
        const std::uint64_t col = code.generator_column(c);
        for (std::size_t r = 0; r < code.dimension(); ++r)
            CHECK(((col >> r) & 1) == std::uint64_t(code.generator().get(r, c)));
    }
}

TEST_CASE("first-order codewords have the three balanced weights") {
    const auto h21 = weight_histogram(RmCode::build(2, 1).generator());
    std::size_t total = 0;
    for (auto [w, c] : h21) total += c;
    CHECK(total == 8);
    CHECK(h21.at(0) == 1);
    // minimum nonzero weight is 2
    CHECK(h21.begin()->first == 0);
    CHECK(std::next(h21.begin())->first == 2);

    const auto h31 = weight_histogram(RmCode::build(3, 1).generator());
    CHECK(h31 == std::map<std::size_t, std::size_t>{{0, 1}, {4, 14}, {8, 1}});

    for (unsigned m = 2; m <= 4; ++m) {
        for (auto [w, c] : weight_histogram(RmCode::build(m, 1).generator())) {
            CHECK((w == 0 || w == (std::size_t{1} << (m - 1)) || w == (std::size_t{1} << m)));
        }
    }
}

TEST_CASE("codeword enumeration is exhaustive and matches all_codewords") {
    const RmCode code = RmCode::build(3, 1);
    std::set<std::string> seen;
    for_each_codeword(code.generator(), [&](const BitVector& w) { seen.insert(w.to_string()); });
    CHECK(seen.size() == 16);
    const auto all = all_codewords(code.generator());
    CHECK(all.size() == 16);
    for (const auto& w : all) CHECK(seen.count(w.to_string()) == 1);
    // every enumerated word really is in the row space
    for (const auto& w : all) CHECK(in_row_space(code.generator(), w));
}

TEST_CASE("codeword enumeration rejects oversized generators") {
    const Gf2Matrix big(25, 4);
    CHECK_THROWS_AS(for_each_codeword(big, [](const BitVector&) {}), BudgetError);
}

TEST_CASE("affine permutation pinned cases") {
    const unsigned m = 2;
    const auto id = affine_permutation(Gf2Matrix::identity(m), BitVector(m));
    CHECK(id == std::vector<std::uint32_t>{0, 1, 2, 3});
    // a pure translation permutes points by xor with the shift index; the
    // string "01" is bit 1, i.e. the point with index 2
    const auto shift = affine_permutation(Gf2Matrix::identity(m), BitVector::from_string("01"));
    CHECK(shift == std::vector<std::uint32_t>{2, 3, 0, 1});
    CHECK_THROWS_AS(affine_permutation(Gf2Matrix(2, 2), BitVector(2)), ConfigError);
}

TEST_CASE("codeword sets are closed under affine permutations") {
    auto rng = stream_rng(22, 0);
    for (unsigned m = 2; m <= 4; ++m) {
        for (unsigned r = 1; r < m; ++r) {
            const RmCode code = RmCode::build(m, r);
            std::set<std::string> words;
            for (const auto& w : all_codewords(code.generator())) words.insert(w.to_string());
            for (int t = 0; t < 5; ++t) {
                const Gf2Matrix A = random_invertible(m, rng);
                BitVector b(m);
                for (unsigned j = 0; j < m; ++j) b.set(j, rng() & 1);
                const auto perm = affine_permutation(A, b);
                for (const auto& w : all_codewords(code.generator())) {
                    BitVector moved(w.size());
                    // codeword value at k moves to the image coordinate perm[k]
                    for (std::size_t k = 0; k < w.size(); ++k) moved.set(perm[k], w.get(k));
                    CHECK(words.count(moved.to_string()) == 1);
                }
            }
        }
    }
}

TEST_CASE("restrict_columns pinned ranks") {
    const RmCode c31 = RmCode::build(3, 1);
    // the whole coordinate list keeps the rank
    std::vector<std::uint32_t> all_cols(c31.block_length());
    for (std::uint32_t k = 0; k < all_cols.size(); ++k) all_cols[k] = k;
    CHECK(restrict_columns(c31.generator(), all_cols).rank() == 4);

    // a 2-dimensional subspace of F2^3: {000, 001, 010, 011}
    const std::vector<std::uint32_t> plane{0, 1, 2, 3};
    CHECK(restrict_columns(c31.generator(), plane).rank() == 3);

    // a 3-dimensional coset inside F2^4: indices with bit 3 set
    const RmCode c42 = RmCode::build(4, 2);
    const std::vector<std::uint32_t> coset{8, 9, 10, 11, 12, 13, 14, 15};
    CHECK(restrict_columns(c42.generator(), coset).rank() == 7);

    CHECK_THROWS_AS(restrict_columns(c31.generator(), std::vector<std::uint32_t>{9}),
                    ConfigError);
}

TEST_CASE("build rejects bad parameters") {
    CHECK_THROWS_AS(RmCode::build(3, 4), ConfigError);
    CHECK_THROWS_AS(RmCode::build(kMaxAmbientDim + 1, 1), ConfigError);
}
