#include "camellia/petals.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <nlohmann/json.hpp>

namespace camellia {

double Rational::to_double() const { return num.convert_to<double>() / den.convert_to<double>(); }

Rational make_rational(BigInt num, BigInt den) {
    if (den == 0) throw ConfigError("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const BigInt g = boost::multiprecision::gcd(num < 0 ? BigInt(-num) : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return Rational{std::move(num), std::move(den)};
}

bool rational_leq(const Rational& a, const Rational& b) { return a.num * b.den <= b.num * a.den; }

bool rational_leq_pow2(const Rational& a, int log2) {
    if (log2 >= 0) return a.num <= a.den << unsigned(log2);
    return a.num << unsigned(-log2) <= a.den;
}

AffineCoset::AffineCoset(Gf2Matrix basis, BitVector shift)
    : basis_(std::move(basis)), shift_(std::move(shift)) {
    const unsigned d = unsigned(basis_.rows());
    const unsigned m = unsigned(basis_.cols());
    if (d == 0 || d > m) throw ConfigError("AffineCoset: need 1 <= dim <= ambient");
    if (m > kMaxAmbientDim) throw ConfigError("AffineCoset: ambient dimension out of range");
    if (shift_.size() != m) throw ConfigError("AffineCoset: shift length mismatch");
    if (basis_.rank() != d) throw ConfigError("AffineCoset: basis not full rank");

    // members[t] = index(shift + t . basis); built over the lowest set bit of t
    std::vector<std::uint64_t> row_index(d);
    for (unsigned j = 0; j < d; ++j) row_index[j] = basis_.row(j).to_index();
    members_.resize(std::size_t{1} << d);
    members_[0] = std::uint32_t(shift_.to_index());
    for (std::size_t t = 1; t < members_.size(); ++t)
        members_[t] = members_[t & (t - 1)] ^ std::uint32_t(row_index[std::countr_zero(t)]);
}

bool AffineCoset::contains(std::uint32_t coord) const {
    return std::find(members_.begin(), members_.end(), coord) != members_.end();
}

std::size_t AffineCoset::position_of(std::uint32_t coord) const {
    const auto it = std::find(members_.begin(), members_.end(), coord);
    if (it == members_.end()) throw ConfigError("AffineCoset: coordinate not in petal");
    return std::size_t(it - members_.begin());
}

std::string AffineCoset::canonical_key() const {
    const Gf2Matrix canon = basis_.rref();
    BitVector rep = shift_;
    for (std::size_t r = 0; r < canon.rows(); ++r) {
        std::size_t lead = 0;
        while (!canon.get(r, lead)) ++lead;
        if (rep.get(lead)) rep ^= canon.row(r);
    }
    return canon.to_text() + "|" + rep.to_string();
}

nlohmann::json AffineCoset::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < basis_.rows(); ++r) rows.push_back(basis_.row(r).to_string());
    return {{"basis", rows}, {"shift", shift_.to_string()}};
}

AffineCoset AffineCoset::from_json(const nlohmann::json& j) {
    try {
        std::vector<std::string> rows = j.at("basis").get<std::vector<std::string>>();
        return AffineCoset(Gf2Matrix::from_strings(rows),
                           BitVector::from_string(j.at("shift").get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("petal descriptor: ") + e.what());
    }
}

CamelliaSpec camellia_spec(unsigned m, unsigned d) {
    if (d == 0 || d > m) throw ConfigError("camellia_spec: need 1 <= d <= m");
    return CamelliaSpec{m, d, correlation_rho(m, d)};
}

nlohmann::json CamelliaSpec::to_json() const {
    return {{"m", m},
            {"d", d},
            {"rho", rho.to_double()},
            {"rho_rational", rho.num.str() + "/" + rho.den.str()}};
}

unsigned petal_dimension(unsigned m) {
    if (m < 5) throw ConfigError("petal_dimension: requires m >= 5");
    const double deficiency = 2.0 * std::sqrt(double(m)) / std::log2(double(m));
    unsigned def = unsigned(std::ceil(deficiency - 1e-9));
    if (def >= m) def = m - 1;
    if (def < 1) def = 1;
    return m - def;
}

double rho_asymptotic_bound(unsigned m) {
    return std::ldexp(1.0, -int(m - petal_dimension(m)));
}

Rational correlation_rho(unsigned m, unsigned d) {
    if (d == 0 || d > m) throw ConfigError("correlation_rho: need 1 <= d <= m");
    return make_rational((BigInt(1) << d) - 1, (BigInt(1) << m) - 1);
}

AffineCoset sample_petal_containing(unsigned m, unsigned d, std::uint32_t coord,
                                    std::mt19937_64& rng) {
    if (d == 0 || d > m) throw ConfigError("sample_petal_containing: need 1 <= d <= m");
    if (m < 64 && (std::uint64_t(coord) >> m) != 0)
        throw ConfigError("sample_petal_containing: coordinate out of range");
    return AffineCoset(random_subspace(m, d, rng), point_of_index(coord, m));
}

std::vector<AffineCoset> enumerate_cosets(unsigned m, unsigned d) {
    if (d == 0 || d > m) throw ConfigError("enumerate_cosets: need 1 <= d <= m");
    const BigInt total = gaussian_binomial(m, d) * (BigInt(1) << (m - d));
    if (total > 1000000) throw BudgetError("enumerate_cosets: too many cosets");

    std::vector<AffineCoset> result;
    result.reserve(total.convert_to<std::size_t>());
    for (const Gf2Matrix& basis : enumerate_subspaces(m, d)) {
        // canonical coset representatives: zero at the pivot columns
        std::vector<unsigned> non_pivot;
        std::vector<bool> is_pivot(m, false);
        for (std::size_t r = 0; r < basis.rows(); ++r) {
            std::size_t lead = 0;
            while (!basis.get(r, lead)) ++lead;
            is_pivot[lead] = true;
        }
        for (unsigned c = 0; c < m; ++c)
            if (!is_pivot[c]) non_pivot.push_back(c);
        for (std::size_t mask = 0; mask < (std::size_t{1} << non_pivot.size()); ++mask) {
            BitVector shift(m);
            for (std::size_t b = 0; b < non_pivot.size(); ++b)
                if ((mask >> b) & 1u) shift.set(non_pivot[b], true);
            result.emplace_back(basis, shift);
        }
    }
    return result;
}

Gf2Matrix restrict_code(const RmCode& code, const AffineCoset& coset) {
    if (coset.ambient() != code.m()) throw ConfigError("restrict_code: dimension mismatch");
    return restrict_columns(code.generator(), coset.members());
}

bool is_affine_coset(std::span<const std::uint32_t> coords, unsigned m, unsigned d) {
    if (coords.size() != (std::size_t{1} << d)) return false;
    std::vector<std::uint32_t> sorted(coords.begin(), coords.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
    Gf2Matrix diffs(coords.size() - 1, m);
    for (std::size_t t = 1; t < coords.size(); ++t)
        diffs.row(t - 1) = point_of_index(coords[t] ^ coords[0], m);
    // 2^d - 1 distinct nonzero vectors spanning a dim-d space are exactly
    // that space's nonzero vectors
    return diffs.rank() == d;
}

CamelliaReport verify_camellia(const RmCode& code, unsigned d, double rate_margin,
                               const VerifyOptions& opts) {
    const unsigned m = code.m();
    if (d == 0 || d > m) throw ConfigError("verify_camellia: need 1 <= d <= m");

    CamelliaReport report;
    report.m = m;
    report.d = d;
    report.rate_margin = rate_margin;
    report.rho_threshold = opts.rho_threshold;
    report.rho_exact = correlation_rho(m, d);
    report.rho_bound = std::ldexp(1.0, int(d) - int(m));
    report.p_contain = report.rho_bound;

    const std::vector<AffineCoset> petals = enumerate_cosets(m, d);
    report.petal_count = petals.size();
    const std::size_t n = code.block_length();
    if (petals.size() * (std::size_t{1} << (2 * d)) > (std::size_t{1} << 26) ||
        n * n > (std::size_t{1} << 22))
        throw BudgetError("verify_camellia: pair-count budget exceeded");

    // (ii) restricted rates
    double max_rate = 0.0;
    for (const auto& petal : petals) {
        const double rate = double(restrict_code(code, petal).rows()) / double(petal.members().size());
        max_rate = std::max(max_rate, rate);
    }
    report.max_restricted_rate = max_rate;
    report.delta = max_rate - code.rate();

    // (iii) exact containment counts over the whole collection
    std::vector<std::uint64_t> count(n, 0);
    std::vector<std::uint64_t> count_pair(n * n, 0);
    for (const auto& petal : petals)
        for (std::uint32_t a : petal.members()) {
            ++count[a];
            for (std::uint32_t b : petal.members())
                if (b != a) ++count_pair[std::size_t(a) * n + b];
        }
    bool rho_ok = true;
    const std::uint64_t per_point = (gaussian_binomial(m, d)).convert_to<std::uint64_t>();
    for (std::size_t i = 0; i < n && rho_ok; ++i) {
        if (count[i] != per_point) rho_ok = false;
        for (std::size_t j = 0; j < n && rho_ok; ++j) {
            if (i == j) continue;
            if (!(make_rational(count_pair[i * n + j], count[i]) == report.rho_exact))
                rho_ok = false;
        }
    }
    report.rho_matches_enumeration = rho_ok;

    // (i) invariance of the collection under sampled affine symmetries
    std::mt19937_64 rng(opts.seed);
    bool invariant = true;
    for (unsigned s = 0; s < opts.affine_samples && invariant; ++s) {
        const Gf2Matrix A = random_subspace(m, m, rng);  // uniform invertible matrix
        BitVector b(m);
        for (unsigned j = 0; j < m; ++j) b.set(j, rng() & 1u);
        const auto perm = affine_permutation(A, b);
        std::vector<std::uint32_t> image;
        for (const auto& petal : petals) {
            image.clear();
            for (std::uint32_t c : petal.members()) image.push_back(perm[c]);
            if (!is_affine_coset(image, m, d)) {
                invariant = false;
                break;
            }
        }
    }
    report.invariant = invariant;

    report.pass = invariant && rho_ok && report.delta <= rate_margin &&
                  report.rho_exact.to_double() <= opts.rho_threshold;
    return report;
}

nlohmann::json CamelliaReport::to_json() const {
    return {{"m", m},
            {"d", d},
            {"invariant", invariant},
            {"max_restricted_rate", max_restricted_rate},
            {"delta", delta},
            {"rho_exact", rho_exact.to_double()},
            {"rho_exact_rational", rho_exact.num.str() + "/" + rho_exact.den.str()},
            {"rho_matches_enumeration", rho_matches_enumeration},
            {"rho_bound", rho_bound},
            {"p_contain", p_contain},
            {"rate_margin", rate_margin},
            {"rho_threshold", rho_threshold},
            {"petal_count", petal_count},
            {"pass", pass}};
}

}  // namespace camellia
