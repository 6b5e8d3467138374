#include "camellia/rm.hpp"

#include <bit>

namespace camellia {

namespace {

// All degree-exactly-deg variable masks over m variables, lexicographic by
// the sorted variable index sequence.
void append_masks_of_degree(unsigned m, unsigned deg, std::vector<std::uint32_t>& out) {
    if (deg == 0) {
        out.push_back(0);
        return;
    }
    std::vector<unsigned> vars(deg);
    for (unsigned i = 0; i < deg; ++i) vars[i] = i;
    for (;;) {
        std::uint32_t mask = 0;
        for (unsigned v : vars) mask |= std::uint32_t{1} << v;
        out.push_back(mask);
        int i = int(deg) - 1;
        while (i >= 0 && vars[i] == m - deg + unsigned(i)) --i;
        if (i < 0) break;
        ++vars[i];
        for (unsigned j = unsigned(i) + 1; j < deg; ++j) vars[j] = vars[j - 1] + 1;
    }
}

}  // namespace

RmCode RmCode::build(unsigned m, unsigned r) {
    if (r > m) throw ConfigError("RmCode: require r <= m");
    if (m > kMaxAmbientDim) throw ConfigError("RmCode: m out of supported range");

    RmCode code;
    code.m_ = m;
    code.r_ = r;
    for (unsigned deg = 0; deg <= r; ++deg) append_masks_of_degree(m, deg, code.monomial_masks_);

    const std::size_t n = std::size_t{1} << m;
    Gf2Matrix gen(code.monomial_masks_.size(), n);
    for (std::size_t row = 0; row < code.monomial_masks_.size(); ++row) {
        const std::uint32_t mask = code.monomial_masks_[row];
        for (std::size_t k = 0; k < n; ++k)
            if ((k & mask) == mask) gen.set(row, k, true);
    }
    code.generator_ = std::move(gen);

    if (code.generator_.rows() <= 64) {
        code.columns_.assign(n, 0);
        for (std::size_t row = 0; row < code.generator_.rows(); ++row)
            for (std::size_t k = 0; k < n; ++k)
                if (code.generator_.get(row, k)) code.columns_[k] |= std::uint64_t{1} << row;
    }
    return code;
}

BitVector RmCode::encode(const BitVector& message) const {
    return generator_.row_combine(message);
}

std::uint64_t RmCode::generator_column(std::uint32_t c) const {
    if (columns_.empty()) throw ConfigError("generator_column: dimension exceeds 64");
    return columns_[c];
}

std::vector<std::uint32_t> affine_permutation(const Gf2Matrix& A, const BitVector& b) {
    const std::size_t m = A.rows();
    if (A.cols() != m || b.size() != m) throw ConfigError("affine_permutation: dimension mismatch");
    if (!A.is_invertible()) throw ConfigError("affine_permutation: A is singular");

    // image[k] = index(A . point(k) + b), built incrementally: flipping bit j of
    // k XORs column j of A into the image point.
    std::vector<std::uint64_t> col_index(m);
    for (std::size_t j = 0; j < m; ++j) {
        BitVector e(m);
        e.set(j, true);
        col_index[j] = A.apply(e).to_index();
    }
    const std::size_t n = std::size_t{1} << m;
    std::vector<std::uint32_t> perm(n);
    std::uint64_t base = b.to_index();
    perm[0] = std::uint32_t(base);
    for (std::size_t k = 1; k < n; ++k) {
        // reuse the value at k with lowest set bit cleared
        const std::size_t prev = k & (k - 1);
        perm[k] = std::uint32_t(perm[prev] ^ col_index[std::countr_zero(k)]);
    }
    return perm;
}

Gf2Matrix restrict_columns(const Gf2Matrix& gen, std::span<const std::uint32_t> columns) {
    Gf2Matrix sel(gen.rows(), columns.size());
    for (std::size_t r = 0; r < gen.rows(); ++r)
        for (std::size_t t = 0; t < columns.size(); ++t) {
            if (columns[t] >= gen.cols()) throw ConfigError("restrict_columns: column out of range");
            if (gen.get(r, columns[t])) sel.set(r, t, true);
        }
    return sel.rref();
}

std::vector<BitVector> all_codewords(const Gf2Matrix& gen) {
    std::vector<BitVector> out;
    out.reserve(std::size_t{1} << gen.rows());
    for_each_codeword(gen, [&](const BitVector& c) { out.push_back(c); });
    return out;
}

}  // namespace camellia
