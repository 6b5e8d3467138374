#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "camellia/channel.hpp"
#include "camellia/rm.hpp"

namespace camellia {

struct DecoderSpec {
    enum class Kind { Exact, Boosted };
    Kind kind = Kind::Exact;
    unsigned petals = 64;         // K, boosted only
    std::optional<unsigned> dim;  // petal dimension override; default petal_dimension(m)
};

enum class Target { PBit, PLoc, PGlo, EMean, Covariance };

/// One Monte-Carlo experiment. JSON schema:
/// {
///   "code": {"family":"rm","m":M,"r":R},
///   "channel": {"kind":"bsc","eps":E} | {"kind":"bec","p":P}
///            | {"kind":"mixture","components":[[w,eps],...]},
///   "decoder": {"kind":"exact"} | {"kind":"boosted","petals":K,"dim":D},
///   "target": "p_bit"|"p_loc"|"p_glo"|"e_mean"|"covariance",
///   "trials": T, "seed": S,
///   "coordinates": "all" | [i,...],
///   "random_codeword": false, "workers": 0
/// }
/// decoder defaults to exact, seed to 1, coordinates to "all", workers to 0
/// (auto). Identical config => byte-identical serialized output, independent
/// of the worker count.
struct ExperimentConfig {
    unsigned m = 0, r = 0;
    SymmetricChannel channel = SymmetricChannel::bsc(0.0);
    DecoderSpec decoder;
    Target target = Target::PBit;
    std::uint64_t trials = 1;
    std::uint64_t seed = 1;
    std::vector<std::uint32_t> coordinates;  // empty = all
    bool random_codeword = false;
    unsigned workers = 0;  // 0 = CAMELLIA_THREADS env or hardware default

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);

    unsigned resolved_dim() const;  // decoder dim, defaulting to petal_dimension(m)
};

struct Interval {
    double lo, hi;
};

/// 95% Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials);

struct CoordinateEstimate {
    std::string coord;   // decimal index, "all" (whole-block), or "max"
    std::string metric;  // p_bit | p_loc | p_glo | e_mean | covariance | sqrt_rho
    double estimate;
    double ci_lo;
    double ci_hi;
    std::uint64_t trials;
};

struct ErrorReport {
    std::vector<CoordinateEstimate> rows;
    std::uint64_t seed = 0;
    double wall_clock_seconds = 0.0;  // in-memory only; serializers omit it

    /// Schema: coord,metric,estimate,ci_lo,ci_hi,trials,seed.
    /// Floats with 12 significant digits.
    std::string to_csv() const;
    nlohmann::json to_json() const;
};

/// P_bit / P_loc / P_glo estimation; ties count as errors. Per-coordinate
/// rows plus a "max" aggregate row (or a single "all" row for P_glo).
ErrorReport estimate_bit_error(const ExperimentConfig& cfg);

/// Mean of the petal-correctness variable over (petal, noise) samples,
/// normal-approximation CI, one row per coordinate.
ErrorReport estimate_e_mean(const ExperimentConfig& cfg);

/// Covariance of the correctness variables of two independently drawn petals
/// sharing one noise realization: theta = E[E_P E_P'] - E[E_P]E[E_P'],
/// jackknife bias correction and CI, plus a sqrt_rho reference row.
ErrorReport estimate_covariance(const ExperimentConfig& cfg);

/// Dispatch on cfg.target. Fills wall_clock_seconds.
ErrorReport run_experiment(const ExperimentConfig& cfg);

/// Sampled Chebyshev bound on the error of the K-coset majority vote at one
/// coordinate: [Var(E)/K + (1-1/K) cov] / mean^2, where E is the per-coset
/// correctness variable and cov pairs two independent coset draws over a
/// shared noise realization. Each trial draws one noise realization and
/// `cosets_per_trial` cosets; within-trial pairing gives an unbiased pair
/// moment, jackknife over trials gives the CI.
struct MajorityBoundEstimate {
    double mean = 0.0;        // E[E]
    double variance = 0.0;    // Var(E), single draw
    double covariance = 0.0;  // E[E_P E_P'] - mean^2, independent draws P, P'
    double bound = 0.0;       // jackknife-corrected Chebyshev bound for K votes
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t trials = 0;
};
MajorityBoundEstimate estimate_majority_bound(const ExperimentConfig& cfg,
                                              unsigned cosets_per_trial);

}  // namespace camellia
