#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "camellia/channel.hpp"
#include "camellia/decoder.hpp"
#include "camellia/petals.hpp"
#include "camellia/rm.hpp"

namespace camellia {

/// A real function of finitely many independent discrete coordinates,
/// tabulated over every joint state. Coordinate c takes state s with
/// probability state_probs[c][s]; values are indexed in mixed radix with
/// coordinate 0 fastest.
struct TabulatedFunction {
    std::vector<std::vector<double>> state_probs;
    std::vector<double> values;

    std::size_t coords() const { return state_probs.size(); }
    std::size_t radix(std::size_t c) const { return state_probs[c].size(); }
    std::size_t table_size() const;
    /// Product-measure mass of the joint state at this flat index.
    double probability(std::size_t flat) const;
    double mean() const;
    void validate() const;  // throws ConfigError on shape mismatch
};

/// Tabulation budget for the contribution machinery (exhaustive subsets).
constexpr std::size_t kContributionMaxCoords = 4;
constexpr std::size_t kContributionMaxStates = 4;

/// The petal-correctness variable for coordinate i as a function of the noise
/// on the petal's other members: coordinate order is the petal's parameter
/// order with the target slot removed, alphabet = channel noise states.
TabulatedFunction tabulate_e_variable(const RmCode& code, const SymmetricChannel& ch,
                                      const AffineCoset& petal, std::uint32_t i);

/// The component of f depending on exactly the coordinate subset S (bit c of
/// subset_mask = coordinate c):
///   Q_S(z) = sum_{S' subset of S} (-1)^{|S|-|S'|} E[f | Z_{S'} = z_{S'}].
/// Components are pairwise orthogonal and sum to f.
TabulatedFunction contribution(const TabulatedFunction& f, std::uint32_t subset_mask);

struct ContributionTable {
    std::vector<std::uint32_t> subsets;    // all masks 0..2^coords-1, ascending
    std::vector<TabulatedFunction> parts;  // aligned with subsets
    std::vector<double> energies;          // E[Q_S^2], aligned
};
ContributionTable decompose(const TabulatedFunction& f);

struct ParsevalReport {
    double total_energy = 0.0;                   // E[f^2]
    double energy_sum = 0.0;                     // sum over S of E[Q_S^2]
    double parseval_violation = 0.0;             // |total_energy - energy_sum|
    double max_orthogonality_violation = 0.0;    // max over S != S' of |E[Q_S Q_S']|
    double max_reconstruction_violation = 0.0;   // max over z of |sum_S Q_S(z) - f(z)|
    bool pass(double tol = 1e-9) const;
    nlohmann::json to_json() const;
};
ParsevalReport parseval_check(const TabulatedFunction& f);

/// Exact average over ordered petal pairs (P, P') containing i — the uniform
/// coset petals of dimension d, diagonal pairs included — of the covariance
/// of the two correctness variables under shared noise:
///   E_{P,P'} [ E_Z[Q_P Q_P'] - E_Z[Q_P] E_Z[Q_P'] ].
double exact_expected_covariance(const RmCode& code, const SymmetricChannel& ch,
                                 std::uint32_t i, unsigned d);

/// min(1, avg_cov / mean^2), clamped below at 0. Chebyshev bound on the
/// probability that a sum of votes with positive mean fails to be positive
/// (ties included). avg_cov is the pair-averaged covariance including the
/// diagonal variance terms. Throws ConfigError when mean <= 0.
double chebyshev_majority_bound(double mean, double avg_cov);

struct EntropyAudit {
    std::size_t n = 0;
    double h_joint = 0.0;             // H(Y) in bits, uniform message
    std::vector<double> chain;        // H(Y_j | Y_<j)
    std::vector<double> marginals;    // H(Y_j)
    double h_single = 0.0;            // max_j H(Y_j) (a balanced coordinate when one exists)
    double capacity = 0.0;
    double rate = 0.0;                // rank / n
    double chain_violation = 0.0;     // |sum_j chain[j] - h_joint|
    bool has_balanced_coordinate = false;
    // H(Y) <= n (h_single - (capacity - rate)) + 1e-9. Only meaningful when a
    // balanced coordinate exists (for the zero code the right side collapses
    // while H(Y) need not); reported true vacuously otherwise.
    bool entropy_inequality_holds = true;
    double entropy_slack = 0.0;       // n (h_single - (C - R)) - h_joint
    std::vector<double> p_loc;        // exact per-coordinate error of decoding
                                      // bit j from the other outputs; ties count
                                      // as errors
    nlohmann::json to_json() const;
};

/// Exact information-theoretic audit of a (possibly degenerate) linear code
/// on a symmetric channel. Budgets: generator rows <= 12, full output-law
/// and noise enumerations within 2^24 states.
EntropyAudit entropy_audit(const Gf2Matrix& gen, const SymmetricChannel& ch);
EntropyAudit entropy_audit(const RmCode& code, const SymmetricChannel& ch);

}  // namespace camellia
