#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "camellia/gf2.hpp"

namespace camellia {

/// Largest supported ambient dimension m (block length 2^m).
constexpr unsigned kMaxAmbientDim = 20;
/// Codeword enumeration budget: generators with more rows are rejected.
constexpr unsigned kMaxEnumerationRows = 24;

/// Coordinate k of a codeword is the polynomial evaluated at the point whose
/// little-endian binary expansion is k (variable j = bit j of k).
inline BitVector point_of_index(std::uint64_t k, unsigned m) { return BitVector::from_index(k, m); }
inline std::uint64_t index_of_point(const BitVector& p) { return p.to_index(); }

/// Reed-Muller code RM(m, r): evaluations of all degree-<=r polynomials on F2^m.
/// Generator rows are monomial evaluation vectors in a fixed canonical order
/// (by degree, then lexicographically by variable index set).
class RmCode {
public:
    static RmCode build(unsigned m, unsigned r);

    unsigned m() const { return m_; }
    unsigned r() const { return r_; }
    std::size_t block_length() const { return std::size_t{1} << m_; }
    std::size_t dimension() const { return generator_.rows(); }

    /// dimension / 2^m. Exact: the divisor is a power of two.
    double rate() const { return double(dimension()) / double(block_length()); }

    const Gf2Matrix& generator() const { return generator_; }

    /// Variable masks of the generator rows, in row order (bit j set = variable j).
    const std::vector<std::uint32_t>& monomial_masks() const { return monomial_masks_; }

    /// message . generator (message.size() == dimension()).
    BitVector encode(const BitVector& message) const;

    /// Column c of the generator packed into a word, row 0 at bit 0.
    /// Only available when dimension() <= 64.
    std::uint64_t generator_column(std::uint32_t c) const;

private:
    RmCode() = default;
    unsigned m_ = 0, r_ = 0;
    Gf2Matrix generator_;
    std::vector<std::uint32_t> monomial_masks_;
    std::vector<std::uint64_t> columns_;  // packed columns when dimension <= 64
};

/// Coordinate permutation induced by the affine map x -> A x + b on F2^m:
/// perm[k] = index(A . point(k) + b). Throws ConfigError if A is singular.
std::vector<std::uint32_t> affine_permutation(const Gf2Matrix& A, const BitVector& b);

/// Generator of the restriction of a code to a list of coordinates, in the
/// given order: selects those columns and row-reduces, dropping zero rows.
Gf2Matrix restrict_columns(const Gf2Matrix& gen, std::span<const std::uint32_t> columns);

/// Visit all 2^rows codewords of the generator exactly once, in Gray-code
/// order starting from the zero word. fn(const BitVector&) must not retain
/// the reference. Throws BudgetError beyond kMaxEnumerationRows rows.
template <typename F>
void for_each_codeword(const Gf2Matrix& gen, F&& fn) {
    if (gen.rows() > kMaxEnumerationRows)
        throw BudgetError("for_each_codeword: generator exceeds enumeration budget");
    BitVector current(gen.cols());
    fn(const_cast<const BitVector&>(current));
    const std::uint64_t total = std::uint64_t{1} << gen.rows();
    for (std::uint64_t t = 1; t < total; ++t) {
        const unsigned flip_row = unsigned(std::countr_zero(t));
        current ^= gen.row(flip_row);
        fn(const_cast<const BitVector&>(current));
    }
}

std::vector<BitVector> all_codewords(const Gf2Matrix& gen);

}  // namespace camellia
