#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "camellia/errors.hpp"

namespace camellia {

using BigInt = boost::multiprecision::cpp_int;

/// Dense bit vector over F2, packed into 64-bit words (bit i lives in
/// word i/64 at position i%64). Unused tail bits are kept zero.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t length);

    /// Parse a '0'/'1' string, character j becoming bit j.
    static BitVector from_string(std::string_view s);
    /// Little-endian binary expansion of k into m bits (bit j = (k>>j)&1).
    static BitVector from_index(std::uint64_t k, std::size_t m);

    std::size_t size() const { return length_; }
    bool empty() const { return length_ == 0; }

    bool get(std::size_t i) const;
    void set(std::size_t i, bool value);
    void flip(std::size_t i);

    BitVector& operator^=(const BitVector& other);
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }

    /// Parity of the AND with `other` (inner product over F2).
    bool dot(const BitVector& other) const;

    std::size_t weight() const;
    bool any() const;

    /// Interpret the bits as a little-endian integer. Requires size() <= 64.
    std::uint64_t to_index() const;

    std::string to_string() const;

    bool operator==(const BitVector& other) const = default;

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    std::size_t length_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Row-major bit matrix over F2.
class Gf2Matrix {
public:
    Gf2Matrix() = default;
    Gf2Matrix(std::size_t rows, std::size_t cols);

    static Gf2Matrix identity(std::size_t n);
    static Gf2Matrix from_rows(std::vector<BitVector> rows);
    /// One '0'/'1' string per row.
    static Gf2Matrix from_strings(const std::vector<std::string>& rows);
    /// Parse the newline-separated text format emitted by to_text().
    static Gf2Matrix from_text(std::string_view text);

    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const { return rows_[r].get(c); }
    void set(std::size_t r, std::size_t c, bool v) { rows_[r].set(c, v); }

    const BitVector& row(std::size_t r) const { return rows_[r]; }
    BitVector& row(std::size_t r) { return rows_[r]; }

    void append_row(BitVector row);

    /// Reduced row echelon form with zero rows dropped; canonical for the
    /// row space, hence idempotent.
    Gf2Matrix rref() const;

    std::size_t rank() const;
    bool is_invertible() const;

    /// coeffs . M  (XOR of the rows selected by coeffs; coeffs.size() == rows()).
    BitVector row_combine(const BitVector& coeffs) const;

    /// M . x  (length-rows() vector of row/x inner products; x.size() == cols()).
    BitVector apply(const BitVector& x) const;

    Gf2Matrix transpose() const;

    /// One row per line, '0'/'1' characters. The golden-file text format.
    std::string to_text() const;

    bool operator==(const Gf2Matrix& other) const = default;

private:
    std::size_t cols_ = 0;
    std::vector<BitVector> rows_;
};

/// True iff v lies in the row space of M. Throws ConfigError on length mismatch.
bool in_row_space(const Gf2Matrix& M, const BitVector& v);

/// Number of d-dimensional subspaces of F2^m, exactly.
BigInt gaussian_binomial(unsigned m, unsigned d);

/// Basis of a subspace drawn uniformly over all d-dimensional subspaces of
/// F2^m, as a full-rank d x m matrix. Rejection-samples uniform full-rank
/// matrices; every subspace has the same number of ordered bases, so the
/// induced law on subspaces is uniform.
Gf2Matrix random_subspace(unsigned m, unsigned d, std::mt19937_64& rng);

/// All d-dimensional subspaces of F2^m, each as its canonical RREF basis.
/// Intended for small m (the count is gaussian_binomial(m, d)).
std::vector<Gf2Matrix> enumerate_subspaces(unsigned m, unsigned d);

}  // namespace camellia
