#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "camellia/gf2.hpp"
#include "camellia/rm.hpp"

namespace camellia {

/// Exact rational, reduced, positive denominator.
struct Rational {
    BigInt num;
    BigInt den;
    double to_double() const;
    bool operator==(const Rational& other) const { return num == other.num && den == other.den; }
};
Rational make_rational(BigInt num, BigInt den);
bool rational_leq(const Rational& a, const Rational& b);
bool rational_leq_pow2(const Rational& a, int log2);  // a <= 2^log2, exactly

/// A petal: coset shift + V of a d-dimensional subspace V of F2^m.
/// Members are the 2^d coordinate indices in parameter order:
/// members[t] = index(shift + t . basis) for t in F2^d (little-endian t).
class AffineCoset {
public:
    AffineCoset(Gf2Matrix basis, BitVector shift);

    unsigned dim() const { return unsigned(basis_.rows()); }
    unsigned ambient() const { return unsigned(basis_.cols()); }
    const Gf2Matrix& basis() const { return basis_; }
    const BitVector& shift() const { return shift_; }
    std::span<const std::uint32_t> members() const { return members_; }

    bool contains(std::uint32_t coord) const;
    /// Parameter-order position of coord among members(); throws if absent.
    std::size_t position_of(std::uint32_t coord) const;

    /// Identical for two cosets iff they are the same point set.
    std::string canonical_key() const;

    nlohmann::json to_json() const;
    static AffineCoset from_json(const nlohmann::json& j);

private:
    Gf2Matrix basis_;
    BitVector shift_;
    std::vector<std::uint32_t> members_;
};

struct CamelliaSpec {
    unsigned m;
    unsigned d;
    Rational rho;  // (2^d - 1) / (2^m - 1)
    nlohmann::json to_json() const;
};
CamelliaSpec camellia_spec(unsigned m, unsigned d);

/// Petal dimension used in the asymptotic construction:
/// d = m - ceil(2 sqrt(m) / log2(m)), clamped to [1, m-1]. Requires m >= 5.
unsigned petal_dimension(unsigned m);

/// 2^{-(m - petal_dimension(m))}; upper-bounds correlation_rho(m, petal_dimension(m)).
double rho_asymptotic_bound(unsigned m);

/// Exact P(j in P | i in P) for i != j under the uniform coset petal
/// distribution: (2^d - 1) / (2^m - 1).
Rational correlation_rho(unsigned m, unsigned d);

/// Uniform over the petals containing `coord` (one petal per subspace V:
/// the coset point(coord) + V). members()[0] == coord.
AffineCoset sample_petal_containing(unsigned m, unsigned d, std::uint32_t coord,
                                    std::mt19937_64& rng);

/// Every dim-d coset of F2^m: gaussian_binomial(m,d) * 2^{m-d} petals.
/// Intended for small m; throws BudgetError beyond ~1e6 cosets.
std::vector<AffineCoset> enumerate_cosets(unsigned m, unsigned d);

/// Generator of the code restricted to the petal's coordinates in parameter
/// order (row-reduced, full row rank). When r <= d the row space equals that
/// of an RM(d, r) generator.
Gf2Matrix restrict_code(const RmCode& code, const AffineCoset& coset);

/// True iff the coordinate set (any order, no duplicates) is a dim-d affine coset.
bool is_affine_coset(std::span<const std::uint32_t> coords, unsigned m, unsigned d);

struct VerifyOptions {
    unsigned affine_samples = 8;
    double rho_threshold = 1.0;  // pass additionally requires rho_exact <= threshold
    std::uint64_t seed = 0x5eedULL;
};

struct CamelliaReport {
    unsigned m = 0, d = 0;
    bool invariant = false;            // sampled affine maps send petals to petals
    double max_restricted_rate = 0.0;  // over all petals
    double delta = 0.0;                // max_restricted_rate - code rate
    Rational rho_exact;                // closed form (2^d-1)/(2^m-1)
    bool rho_matches_enumeration = false;  // brute-force conditional frequency agrees
    double rho_bound = 0.0;            // 2^{d-m}
    double p_contain = 0.0;            // unconditional P(i in P) = 2^{d-m}
    double rate_margin = 0.0;
    double rho_threshold = 1.0;
    std::size_t petal_count = 0;
    bool pass = false;
    nlohmann::json to_json() const;
};

/// Exhaustive validation of the coset petal collection for a code:
/// (i) invariance of the collection under sampled affine symmetries,
/// (ii) max restricted rate and its excess over the code rate,
/// (iii) exact conditional containment frequencies vs the closed form.
CamelliaReport verify_camellia(const RmCode& code, unsigned d, double rate_margin,
                               const VerifyOptions& opts = {});

}  // namespace camellia
