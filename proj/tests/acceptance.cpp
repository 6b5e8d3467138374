// End-to-end acceptance checks: ten independent criteria, one PASS/FAIL line
// each, nonzero exit when any fail. Unlike the unit tests these exercise the
// whole pipeline at its intended operating points, so a few of them run
// Monte Carlo estimates with six-figure sample counts.
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracles.hpp"

#include "camellia/analysis.hpp"
#include "camellia/estimators.hpp"
#include "camellia/petals.hpp"
#include "camellia/rng.hpp"

using namespace camellia;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
    if (!cond) throw Failure(what);
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. For every ordered coordinate pair (i, j), the fraction of dim-d cosets
//    through i that also contain j equals (2^d-1)/(2^m-1), exactly.
void criterion_pair_correlation() {
    for (unsigned m = 1; m <= 5; ++m) {
        const std::uint32_t n = 1u << m;
        for (unsigned d = 1; d <= m; ++d) {
            const std::vector<Gf2Matrix> subs = enumerate_subspaces(m, d);
            require(BigInt(subs.size()) == gaussian_binomial(m, d),
                    "subspace enumeration count is off");
            // membership count per nonzero difference vector
            std::vector<std::uint64_t> contain(n, 0);
            for (std::uint32_t x = 1; x < n; ++x)
                for (const Gf2Matrix& v : subs)
                    if (in_row_space(v, BitVector::from_index(x, m))) ++contain[x];

            const Rational rho = correlation_rho(m, d);
            require(rho == make_rational(BigInt((1u << d) - 1), BigInt(n - 1)),
                    "closed form is not (2^d-1)/(2^m-1) reduced");
            for (std::uint32_t i = 0; i < n; ++i)
                for (std::uint32_t j = 0; j < n; ++j) {
                    if (i == j) continue;
                    // j lies in the coset point(i)+V iff the difference lies in V
                    require(BigInt(contain[i ^ j]) * rho.den ==
                                BigInt(subs.size()) * rho.num,
                            "pair containment frequency mismatch at m=" +
                                std::to_string(m) + " d=" + std::to_string(d));
                }
        }
    }
}

// ---------------------------------------------------------------------------
// 2. Restricting RM(m, r) to any dim-d coset gives exactly the row space of
//    RM(d, min(r, d)) -- same dimension, same canonical form -- for every
//    coset, every order, m <= 5.
void criterion_restriction() {
    std::string canon[6][6];  // canonical rref text of RM(d, rr)
    for (unsigned d = 1; d <= 5; ++d)
        for (unsigned rr = 0; rr <= d; ++rr)
            canon[d][rr] = RmCode::build(d, rr).generator().rref().to_text();

    for (unsigned m = 1; m <= 5; ++m)
        for (unsigned r = 0; r <= m; ++r) {
            const RmCode code = RmCode::build(m, r);
            for (unsigned d = 1; d <= m; ++d) {
                const unsigned rr = std::min(r, d);
                std::uint64_t expect = 0;
                for (unsigned i = 0; i <= rr; ++i) expect += oracles::binom(d, i);
                for (const AffineCoset& coset : enumerate_cosets(m, d)) {
                    const Gf2Matrix g = restrict_code(code, coset);
                    require(g.rows() == expect, "restricted dimension is off at m=" +
                                                    std::to_string(m) + " r=" +
                                                    std::to_string(r) + " d=" +
                                                    std::to_string(d));
                    require(g.rref().to_text() == canon[d][rr],
                            "restricted row space is not the low-degree code");
                }
            }
        }
}

// ---------------------------------------------------------------------------
// 3. The per-subset energy decomposition of random tabulated functions is a
//    genuine orthogonal decomposition: energies sum to E[f^2], components are
//    pairwise orthogonal, and they reconstruct f pointwise (all to 1e-9).
void criterion_parseval() {
    auto rng = stream_rng(12345, 0);
    for (int rep = 0; rep < 20; ++rep) {
        TabulatedFunction f;
        const std::size_t coords = 1 + rng() % 4;
        std::size_t size = 1;
        for (std::size_t c = 0; c < coords; ++c) {
            const std::size_t radix = 2 + rng() % 3;
            std::vector<double> probs(radix);
            double total = 0.0;
            for (double& p : probs) {
                p = 0.05 + uniform01(rng);
                total += p;
            }
            for (double& p : probs) p /= total;
            f.state_probs.push_back(std::move(probs));
            size *= radix;
        }
        f.values.resize(size);
        for (double& v : f.values) v = 2.0 * uniform01(rng) - 1.0;
        f.validate();

        const ParsevalReport report = parseval_check(f);
        require(report.parseval_violation < 1e-9,
                "energy sum misses E[f^2] by " + num(report.parseval_violation));
        require(report.max_orthogonality_violation < 1e-9,
                "components are not orthogonal");
        require(report.max_reconstruction_violation < 1e-9,
                "components do not reconstruct f");
        require(report.pass(), "report disagrees with its own violations");
    }
}

// ---------------------------------------------------------------------------
// 4. The exact pair-averaged covariance of the coset correctness variables
//    never exceeds sqrt(rho) -- strict comparisons, no tolerance.
void criterion_covariance_cap() {
    const double c1 =
        exact_expected_covariance(RmCode::build(3, 1), SymmetricChannel::bsc(0.2), 0, 2);
    require(c1 <= std::sqrt(3.0 / 7.0),
            "RM(3,1)/BSC(0.2) d=2: covariance " + num(c1) + " above sqrt(3/7)");
    const double c2 =
        exact_expected_covariance(RmCode::build(4, 1), SymmetricChannel::bec(0.4), 0, 3);
    require(c2 <= std::sqrt(7.0 / 15.0),
            "RM(4,1)/BEC(0.4) d=3: covariance " + num(c2) + " above sqrt(7/15)");
    require(c1 >= -1.0 && c2 >= -1.0, "covariance outside [-1, 1]");
}

// ---------------------------------------------------------------------------
// 5. The Chebyshev majority bound computed from exact moments dominates the
//    simulated failure rate of the vote, on two contrived vote ensembles:
//    independent signs, and signs contaminated by a shared flip.
void criterion_chebyshev_dominates() {
    const int runs = 100000;
    const auto check = [&](const char* label, unsigned K, double mean, double avg_cov,
                           const std::function<int(std::mt19937_64&)>& vote,
                           std::uint64_t seed) {
        const double bound = chebyshev_majority_bound(mean, avg_cov);
        auto rng = stream_rng(seed, 0);
        int fails = 0;
        for (int t = 0; t < runs; ++t) {
            int sum = 0;
            for (unsigned k = 0; k < K; ++k) sum += vote(rng);
            if (sum <= 0) ++fails;
        }
        const double p_fail = double(fails) / runs;
        const double sigma = std::sqrt(p_fail * (1.0 - p_fail) / runs) + 1e-6;
        require(bound < 1.0, std::string(label) + ": bound is vacuous");
        require(p_fail > 0.0, std::string(label) + ": failure never happens");
        require(p_fail <= bound + 3.0 * sigma,
                std::string(label) + ": failure rate " + num(p_fail) +
                    " exceeds bound " + num(bound));
    };

    // independent +-1 votes with mean mu: zero pair covariance, so the
    // averaged covariance is the variance split across K votes
    const double mu = 0.3;
    const unsigned K1 = 15;
    check("independent", K1, mu, (1.0 - mu * mu) / K1,
          [&](std::mt19937_64& r) { return uniform01(r) < 0.5 * (1.0 + mu) ? 1 : -1; }, 501);

    // votes B*A_k: a shared sign B (P[B=+1]=q) seen through independent flips
    // (flip probability t). mean (2q-1)(1-2t), pair covariance (1-2t)^2 4q(1-q).
    const double q = 0.95, t = 0.1;
    const unsigned K2 = 9;
    const double mean = (2.0 * q - 1.0) * (1.0 - 2.0 * t);
    const double pair_cov = (1.0 - 2.0 * t) * (1.0 - 2.0 * t) * 4.0 * q * (1.0 - q);
    const double avg_cov = (1.0 - mean * mean) / K2 + (1.0 - 1.0 / K2) * pair_cov;
    int shared = 0;
    const auto vote = [&](std::mt19937_64& r) {
        return shared * (uniform01(r) < t ? -1 : 1);
    };
    auto outer = stream_rng(502, 0);
    const double bound = chebyshev_majority_bound(mean, avg_cov);
    int fails = 0;
    for (int run = 0; run < runs; ++run) {
        shared = uniform01(outer) < q ? 1 : -1;
        int sum = 0;
        for (unsigned k = 0; k < K2; ++k) sum += vote(outer);
        if (sum <= 0) ++fails;
    }
    const double p_fail = double(fails) / runs;
    const double sigma = std::sqrt(p_fail * (1.0 - p_fail) / runs) + 1e-6;
    require(bound < 1.0, "shared-sign: bound is vacuous");
    require(p_fail > 0.0, "shared-sign: failure never happens");
    require(p_fail <= bound + 3.0 * sigma, "shared-sign: failure rate " + num(p_fail) +
                                               " exceeds bound " + num(bound));
}

// ---------------------------------------------------------------------------
// 6. The exact entropy audit of RM(3,1) on BSC(0.05) balances its books: the
//    chain rule closes, the joint-entropy inequality holds, and at least one
//    coordinate is decodable from the others with error probability <= 0.49.
void criterion_entropy_audit() {
    const EntropyAudit audit = entropy_audit(RmCode::build(3, 1), SymmetricChannel::bsc(0.05));
    require(audit.chain_violation <= 1e-9,
            "chain rule off by " + num(audit.chain_violation));
    require(audit.has_balanced_coordinate, "no balanced coordinate found");
    require(audit.entropy_inequality_holds, "joint entropy exceeds its budget");
    require(audit.entropy_slack >= -1e-9, "negative entropy slack");
    bool decodable = false;
    for (double p : audit.p_loc)
        if (p <= 0.49) decodable = true;
    require(decodable, "no coordinate decodes from the rest below 0.49");
}

// ---------------------------------------------------------------------------
// 7. The Monte Carlo bit-error estimate of the exact decoder agrees with full
//    noise enumeration within three binomial sigmas.
void criterion_monte_carlo_matches_enumeration() {
    const RmCode code = RmCode::build(3, 1);
    const auto ch = SymmetricChannel::bsc(0.1);
    double exact = 0.0;
    oracles::each_noise_oracle(ch, 8, [&](double p, const std::vector<NoiseState>& st) {
        std::vector<ChannelUse> y(8);
        for (std::size_t c = 0; c < 8; ++c) y[c] = use_from_state(st[c], 0);
        if (exact_bit_map(code.generator(), 0, y) != BitGuess::Zero) exact += p;
    });

    ExperimentConfig cfg;
    cfg.m = 3;
    cfg.r = 1;
    cfg.channel = ch;
    cfg.target = Target::PBit;
    cfg.trials = 100000;
    cfg.seed = 21;
    cfg.coordinates = {0};
    double est = -1.0;
    for (const auto& row : run_experiment(cfg).rows)
        if (row.coord == "0") est = row.estimate;
    const double sigma = std::sqrt(exact * (1.0 - exact) / double(cfg.trials));
    require(std::abs(est - exact) <= 3.0 * sigma,
            "estimate " + num(est) + " vs exact " + num(exact));
}

// ---------------------------------------------------------------------------
// 8. The sampled Chebyshev bound on the 64-coset majority error falls
//    strictly, with separated confidence intervals, as the code grows
//    (RM(m,1) on BEC(0.4), m = 6, 8, 10).
void criterion_bound_trend() {
    std::vector<MajorityBoundEstimate> results;
    for (unsigned m : {6u, 8u, 10u}) {
        ExperimentConfig cfg;
        cfg.m = m;
        cfg.r = 1;
        cfg.channel = SymmetricChannel::bec(0.4);
        cfg.decoder.kind = DecoderSpec::Kind::Boosted;
        cfg.decoder.petals = 64;
        cfg.decoder.dim = 2;
        cfg.trials = 10000;
        cfg.seed = 3;
        cfg.coordinates = {0};
        results.push_back(estimate_majority_bound(cfg, 1024));
        require(results.back().bound > 0.0 && results.back().bound < 1.0,
                "bound at m=" + std::to_string(m) + " is degenerate");
    }
    for (std::size_t k = 0; k + 1 < results.size(); ++k) {
        require(results[k + 1].bound < results[k].bound,
                "bound does not fall: " + num(results[k].bound) + " -> " +
                    num(results[k + 1].bound));
        require(results[k + 1].ci_hi < results[k].ci_lo,
                "confidence intervals overlap between sizes");
    }
}

// ---------------------------------------------------------------------------
// 9. Majority voting over 64 cosets beats a single coset outright:
//    RM(8,1) on BEC(0.4), dim-2 cosets, separated confidence intervals.
void criterion_boost_beats_single() {
    const auto run = [](unsigned K) {
        ExperimentConfig cfg;
        cfg.m = 8;
        cfg.r = 1;
        cfg.channel = SymmetricChannel::bec(0.4);
        cfg.decoder.kind = DecoderSpec::Kind::Boosted;
        cfg.decoder.petals = K;
        cfg.decoder.dim = 2;
        cfg.trials = 10000;
        cfg.seed = 31;
        cfg.coordinates = {0};
        for (const auto& row : run_experiment(cfg).rows)
            if (row.coord == "0") return row;
        throw Failure("missing coordinate row");
    };
    const CoordinateEstimate one = run(1), many = run(64);
    require(many.estimate < one.estimate, "64 cosets (" + num(many.estimate) +
                                              ") not better than one (" +
                                              num(one.estimate) + ")");
    require(many.ci_hi < one.ci_lo, "confidence intervals overlap");
}

// ---------------------------------------------------------------------------
// 10. The same experiment run with 1 and 4 worker threads produces
//     byte-identical serialized reports.
void criterion_reproducible() {
    ExperimentConfig cfg;
    cfg.m = 5;
    cfg.r = 1;
    cfg.channel = SymmetricChannel::bsc(0.1);
    cfg.decoder.kind = DecoderSpec::Kind::Boosted;
    cfg.decoder.petals = 16;
    cfg.decoder.dim = 2;
    cfg.trials = 4000;
    cfg.seed = 5;
    cfg.coordinates = {0, 3};
    cfg.workers = 1;
    const std::string serial = run_experiment(cfg).to_csv();
    cfg.workers = 4;
    const std::string parallel = run_experiment(cfg).to_csv();
    require(!serial.empty(), "empty report");
    require(serial == parallel, "reports differ across worker counts");
}

}  // namespace

int main() {
    struct Entry {
        const char* label;
        void (*fn)();
    };
    const std::vector<Entry> criteria{
        {"coset pair correlation equals the closed form on every pair (m <= 5)",
         criterion_pair_correlation},
        {"every coset restriction is exactly the low-degree code (m <= 5)",
         criterion_restriction},
        {"subset energy decomposition is orthogonal, complete and tight (1e-9)",
         criterion_parseval},
        {"exact average coset covariance stays below sqrt(rho)", criterion_covariance_cap},
        {"Chebyshev majority bound dominates simulated failure rates",
         criterion_chebyshev_dominates},
        {"entropy audit balances and finds a locally decodable coordinate",
         criterion_entropy_audit},
        {"Monte Carlo bit error matches exhaustive enumeration within 3 sigma",
         criterion_monte_carlo_matches_enumeration},
        {"sampled majority-vote bound falls with block length, CIs separated",
         criterion_bound_trend},
        {"64-coset majority beats a single coset with separated CIs",
         criterion_boost_beats_single},
        {"reports are byte-identical across worker counts", criterion_reproducible},
    };

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        try {
            criteria[k].fn();
            std::printf("criterion %zu: PASS - %s\n", k + 1, criteria[k].label);
        } catch (const std::exception& e) {
            ++failed;
            std::printf("criterion %zu: FAIL - %s (%s)\n", k + 1, criteria[k].label, e.what());
        }
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
