#include "camellia/gf2.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace camellia {

namespace {
constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t length) { return (length + kWordBits - 1) / kWordBits; }
}  // namespace

BitVector::BitVector(std::size_t length) : length_(length), words_(word_count(length), 0) {}

BitVector BitVector::from_string(std::string_view s) {
    BitVector v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1') {
            v.set(i, true);
        } else if (s[i] != '0') {
            throw ConfigError("BitVector::from_string: expected '0'/'1', got '" +
                              std::string(1, s[i]) + "'");
        }
    }
    return v;
}

BitVector BitVector::from_index(std::uint64_t k, std::size_t m) {
    if (m < 64 && (k >> m) != 0)
        throw ConfigError("BitVector::from_index: index does not fit in m bits");
    BitVector v(m);
    for (std::size_t j = 0; j < m && j < 64; ++j) v.set(j, (k >> j) & 1u);
    return v;
}

bool BitVector::get(std::size_t i) const {
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
}

void BitVector::set(std::size_t i, bool value) {
    const std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
    if (value)
        words_[i / kWordBits] |= mask;
    else
        words_[i / kWordBits] &= ~mask;
}

void BitVector::flip(std::size_t i) { words_[i / kWordBits] ^= std::uint64_t{1} << (i % kWordBits); }

BitVector& BitVector::operator^=(const BitVector& other) {
    if (length_ != other.length_) throw ConfigError("BitVector xor: length mismatch");
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    return *this;
}

bool BitVector::dot(const BitVector& other) const {
    if (length_ != other.length_) throw ConfigError("BitVector dot: length mismatch");
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < words_.size(); ++w)
        acc ^= std::uint64_t(std::popcount(words_[w] & other.words_[w]));
    return acc & 1u;
}

std::size_t BitVector::weight() const {
    std::size_t total = 0;
    for (std::uint64_t w : words_) total += std::size_t(std::popcount(w));
    return total;
}

bool BitVector::any() const {
    return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
}

std::uint64_t BitVector::to_index() const {
    if (length_ > 64) throw ConfigError("BitVector::to_index: vector longer than 64 bits");
    return words_.empty() ? 0 : words_[0];
}

std::string BitVector::to_string() const {
    std::string s(length_, '0');
    for (std::size_t i = 0; i < length_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

Gf2Matrix::Gf2Matrix(std::size_t rows, std::size_t cols)
    : cols_(cols), rows_(rows, BitVector(cols)) {}

Gf2Matrix Gf2Matrix::identity(std::size_t n) {
    Gf2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

Gf2Matrix Gf2Matrix::from_rows(std::vector<BitVector> rows) {
    Gf2Matrix m;
    if (!rows.empty()) {
        m.cols_ = rows[0].size();
        for (const auto& r : rows)
            if (r.size() != m.cols_) throw ConfigError("Gf2Matrix: ragged rows");
    }
    m.rows_ = std::move(rows);
    return m;
}

Gf2Matrix Gf2Matrix::from_strings(const std::vector<std::string>& rows) {
    std::vector<BitVector> parsed;
    parsed.reserve(rows.size());
    for (const auto& s : rows) parsed.push_back(BitVector::from_string(s));
    return from_rows(std::move(parsed));
}

Gf2Matrix Gf2Matrix::from_text(std::string_view text) {
    std::vector<std::string> lines;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) lines.push_back(line);
    return from_strings(lines);
}

void Gf2Matrix::append_row(BitVector row) {
    if (rows_.empty() && cols_ == 0) cols_ = row.size();
    if (row.size() != cols_) throw ConfigError("Gf2Matrix::append_row: length mismatch");
    rows_.push_back(std::move(row));
}

Gf2Matrix Gf2Matrix::rref() const {
    std::vector<BitVector> work = rows_;
    std::size_t pivot_row = 0;
    for (std::size_t col = 0; col < cols_ && pivot_row < work.size(); ++col) {
        std::size_t sel = pivot_row;
        while (sel < work.size() && !work[sel].get(col)) ++sel;
        if (sel == work.size()) continue;
        std::swap(work[pivot_row], work[sel]);
        for (std::size_t r = 0; r < work.size(); ++r)
            if (r != pivot_row && work[r].get(col)) work[r] ^= work[pivot_row];
        ++pivot_row;
    }
    work.resize(pivot_row);  // zero rows dropped
    Gf2Matrix result;
    result.cols_ = cols_;
    result.rows_ = std::move(work);
    return result;
}

std::size_t Gf2Matrix::rank() const { return rref().rows(); }

bool Gf2Matrix::is_invertible() const { return rows() == cols() && rank() == rows(); }

BitVector Gf2Matrix::row_combine(const BitVector& coeffs) const {
    if (coeffs.size() != rows()) throw ConfigError("row_combine: coefficient length mismatch");
    BitVector acc(cols_);
    for (std::size_t r = 0; r < rows(); ++r)
        if (coeffs.get(r)) acc ^= rows_[r];
    return acc;
}

BitVector Gf2Matrix::apply(const BitVector& x) const {
    if (x.size() != cols_) throw ConfigError("apply: vector length mismatch");
    BitVector y(rows());
    for (std::size_t r = 0; r < rows(); ++r) y.set(r, rows_[r].dot(x));
    return y;
}

Gf2Matrix Gf2Matrix::transpose() const {
    Gf2Matrix t(cols_, rows());
    for (std::size_t r = 0; r < rows(); ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            if (get(r, c)) t.set(c, r, true);
    return t;
}

std::string Gf2Matrix::to_text() const {
    std::string out;
    for (std::size_t r = 0; r < rows(); ++r) {
        out += rows_[r].to_string();
        out += '\n';
    }
    return out;
}

bool in_row_space(const Gf2Matrix& M, const BitVector& v) {
    if (v.size() != M.cols()) throw ConfigError("in_row_space: dimension mismatch");
    const Gf2Matrix reduced = M.rref();
    BitVector residual = v;
    for (std::size_t r = 0; r < reduced.rows(); ++r) {
        // leading column of this pivot row
        std::size_t lead = 0;
        while (!reduced.get(r, lead)) ++lead;
        if (residual.get(lead)) residual ^= reduced.row(r);
    }
    return !residual.any();
}

BigInt gaussian_binomial(unsigned m, unsigned d) {
    if (d > m) throw ConfigError("gaussian_binomial: d > m");
    BigInt num = 1, den = 1;
    for (unsigned i = 0; i < d; ++i) {
        num *= (BigInt(1) << (m - i)) - 1;
        den *= (BigInt(1) << (d - i)) - 1;
    }
    BigInt q, r;
    boost::multiprecision::divide_qr(num, den, q, r);
    if (r != 0) throw std::logic_error("gaussian_binomial: inexact division");
    return q;
}

Gf2Matrix random_subspace(unsigned m, unsigned d, std::mt19937_64& rng) {
    if (d == 0 || d > m) throw ConfigError("random_subspace: need 0 < d <= m");
    // Expected < 4 attempts for any d <= m.
    for (;;) {
        Gf2Matrix cand(d, m);
        for (unsigned r = 0; r < d; ++r) {
            BitVector row(m);
            for (unsigned j = 0; j < m; j += 64) {
                const std::uint64_t bits = rng();
                for (unsigned b = 0; b < 64 && j + b < m; ++b)
                    row.set(j + b, (bits >> b) & 1u);
            }
            cand.row(r) = std::move(row);
        }
        if (cand.rank() == d) return cand;
    }
}

std::vector<Gf2Matrix> enumerate_subspaces(unsigned m, unsigned d) {
    if (d > m) throw ConfigError("enumerate_subspaces: d > m");
    std::vector<Gf2Matrix> result;
    if (d == 0) {
        result.emplace_back(0, m);
        return result;
    }

    // Every subspace has a unique RREF basis: pick pivot columns
    // c_0 < ... < c_{d-1}, then fill the free entries (row i, column j) with
    // j > c_i and j not a pivot column.
    std::vector<unsigned> pivots(d);
    for (unsigned i = 0; i < d; ++i) pivots[i] = i;

    auto emit_for_pivots = [&](const std::vector<unsigned>& piv) {
        std::vector<bool> is_pivot(m, false);
        for (unsigned c : piv) is_pivot[c] = true;
        std::vector<std::pair<unsigned, unsigned>> free_pos;
        for (unsigned i = 0; i < d; ++i)
            for (unsigned j = piv[i] + 1; j < m; ++j)
                if (!is_pivot[j]) free_pos.emplace_back(i, j);

        const std::size_t combos = std::size_t{1} << free_pos.size();
        for (std::size_t mask = 0; mask < combos; ++mask) {
            Gf2Matrix basis(d, m);
            for (unsigned i = 0; i < d; ++i) basis.set(i, piv[i], true);
            for (std::size_t f = 0; f < free_pos.size(); ++f)
                if ((mask >> f) & 1u) basis.set(free_pos[f].first, free_pos[f].second, true);
            result.push_back(std::move(basis));
        }
    };

    // iterate d-combinations of {0..m-1}
    for (;;) {
        emit_for_pivots(pivots);
        int i = int(d) - 1;
        while (i >= 0 && pivots[i] == m - d + unsigned(i)) --i;
        if (i < 0) break;
        ++pivots[i];
        for (unsigned j = unsigned(i) + 1; j < d; ++j) pivots[j] = pivots[j - 1] + 1;
    }
    return result;
}

}  // namespace camellia
