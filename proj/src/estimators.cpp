#include "camellia/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "camellia/decoder.hpp"
#include "camellia/petals.hpp"
#include "camellia/rng.hpp"

namespace camellia {

namespace {

constexpr std::uint64_t kChunkTrials = 1024;
constexpr double kZ95 = 1.959963984540054;

std::string fmt12(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Compensated sum for the fixed-order reductions.
struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

unsigned resolve_workers(unsigned requested) {
    if (const char* env = std::getenv("CAMELLIA_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v >= 1) return unsigned(v);
    }
    if (requested >= 1) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw >= 1 ? hw : 1;
}

// Deterministic chunked trial loop: chunk c covers global trial indices
// [c*kChunkTrials, ...). Chunks may run on any thread; every chunk writes
// only its own slot, so the subsequent in-order reduction is byte-stable
// for any worker count.
template <typename ChunkFn>
void run_chunked(std::uint64_t trials, unsigned workers, ChunkFn&& chunk_fn) {
    const std::uint64_t chunks = (trials + kChunkTrials - 1) / kChunkTrials;
    const auto bounds = [&](std::uint64_t c) {
        const std::uint64_t lo = c * kChunkTrials;
        return std::pair<std::uint64_t, std::uint64_t>{lo, std::min(trials, lo + kChunkTrials)};
    };
    const unsigned n_threads =
        unsigned(std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, chunks)));
    if (n_threads == 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) {
            const auto [lo, hi] = bounds(c);
            chunk_fn(c, lo, hi);
        }
        return;
    }

    std::atomic<std::uint64_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto work = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                const auto [lo, hi] = bounds(c);
                chunk_fn(c, lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::uint64_t chunk_count(std::uint64_t trials) {
    return (trials + kChunkTrials - 1) / kChunkTrials;
}

struct Runner {
    const ExperimentConfig& cfg;
    RmCode code;
    std::size_t n;
    unsigned workers;

    explicit Runner(const ExperimentConfig& c)
        : cfg(c), code(RmCode::build(c.m, c.r)), n(code.block_length()),
          workers(resolve_workers(c.workers)) {
        if (cfg.trials < 1) throw ConfigError("experiment: trials must be >= 1");
    }

    std::vector<std::uint32_t> coordinate_list() const {
        if (!cfg.coordinates.empty()) {
            for (std::uint32_t c : cfg.coordinates)
                if (c >= n) throw ConfigError("experiment: coordinate out of range");
            return cfg.coordinates;
        }
        std::vector<std::uint32_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = std::uint32_t(i);
        return all;
    }

    // Draws the transmitted word and its channel output from the trial stream.
    BitVector transmit_trial(std::mt19937_64& rng, std::vector<ChannelUse>& y) const {
        BitVector x(n);
        if (cfg.random_codeword) {
            BitVector msg(code.dimension());
            for (std::size_t b = 0; b < msg.size(); ++b) msg.set(b, rng() & 1u);
            x = code.encode(msg);
        }
        y = transmit(cfg.channel, x, rng);
        return x;
    }
};

const char* target_name(Target t) {
    switch (t) {
        case Target::PBit: return "p_bit";
        case Target::PLoc: return "p_loc";
        case Target::PGlo: return "p_glo";
        case Target::EMean: return "e_mean";
        case Target::Covariance: return "covariance";
    }
    return "?";
}

}  // namespace

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) throw ConfigError("wilson_interval: zero trials");
    const double nn = double(trials);
    const double p = double(successes) / nn;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = kZ95 / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    Interval iv{std::max(0.0, center - half), std::min(1.0, center + half)};
    // at the corners the score bound is exactly the sample proportion; don't
    // let cancellation residue leak into the reports
    if (successes == 0) iv.lo = 0.0;
    if (successes == trials) iv.hi = 1.0;
    return iv;
}

unsigned ExperimentConfig::resolved_dim() const {
    if (decoder.dim) {
        if (*decoder.dim == 0 || *decoder.dim > m)
            throw ConfigError("decoder: petal dimension out of range");
        return *decoder.dim;
    }
    return petal_dimension(m);
}

ErrorReport estimate_bit_error(const ExperimentConfig& cfg) {
    if (cfg.target != Target::PBit && cfg.target != Target::PLoc && cfg.target != Target::PGlo)
        throw ConfigError("estimate_bit_error: target must be p_bit, p_loc or p_glo");
    Runner run(cfg);
    const Gf2Matrix& gen = run.code.generator();
    const bool boosted = cfg.decoder.kind == DecoderSpec::Kind::Boosted;
    const unsigned K = cfg.decoder.petals;
    const unsigned dim = boosted ? cfg.resolved_dim() : 0;
    if (boosted && K < 1) throw ConfigError("decoder: need at least one petal");

    ErrorReport report;
    report.seed = cfg.seed;
    const char* metric = target_name(cfg.target);

    if (cfg.target == Target::PGlo) {
        std::vector<std::uint64_t> errs(chunk_count(cfg.trials), 0);
        const std::uint64_t sid = run.n;  // distinct from every coordinate stream
        run_chunked(cfg.trials, run.workers, [&](std::uint64_t c, std::uint64_t lo, std::uint64_t hi) {
            std::vector<ChannelUse> y;
            for (std::uint64_t t = lo; t < hi; ++t) {
                auto rng = stream_rng(cfg.seed, sid, t);
                const BitVector x = run.transmit_trial(rng, y);
                bool err = false;
                if (!boosted) {
                    const BlockMapResult res = exact_block_map(gen, y);
                    err = res.tie || !(res.codeword == x);
                } else {
                    for (std::uint32_t i = 0; i < run.n; ++i) {
                        const BoostDecision bd = boost_decode_detail(run.code, i, y, K, dim, rng);
                        if (bd.tie || bd.guess != int(x.get(i))) {
                            err = true;
                            break;
                        }
                    }
                }
                if (err) ++errs[c];
            }
        });
        std::uint64_t total = 0;
        for (std::uint64_t e : errs) total += e;
        const Interval ci = wilson_interval(total, cfg.trials);
        report.rows.push_back({"all", metric, double(total) / double(cfg.trials), ci.lo, ci.hi,
                               cfg.trials});
        return report;
    }

    const auto coords = run.coordinate_list();
    std::size_t best = 0;
    for (std::size_t ci_idx = 0; ci_idx < coords.size(); ++ci_idx) {
        const std::uint32_t i = coords[ci_idx];
        std::vector<std::uint64_t> errs(chunk_count(cfg.trials), 0);
        run_chunked(cfg.trials, run.workers, [&](std::uint64_t c, std::uint64_t lo, std::uint64_t hi) {
            std::vector<ChannelUse> y;
            for (std::uint64_t t = lo; t < hi; ++t) {
                auto rng = stream_rng(cfg.seed, i, t);
                const BitVector x = run.transmit_trial(rng, y);
                const int sent = x.get(i) ? 1 : 0;
                bool err;
                if (boosted) {
                    // petal evidence never includes y[i], so p_loc == p_bit here
                    const BoostDecision bd = boost_decode_detail(run.code, i, y, K, dim, rng);
                    err = bd.tie || bd.guess != sent;
                } else {
                    const BitGuess g = cfg.target == Target::PLoc ? exact_local_map(gen, i, y)
                                                                  : exact_bit_map(gen, i, y);
                    err = int(g) != sent;
                }
                if (err) ++errs[c];
            }
        });
        std::uint64_t total = 0;
        for (std::uint64_t e : errs) total += e;
        const Interval ci = wilson_interval(total, cfg.trials);
        report.rows.push_back({std::to_string(i), metric, double(total) / double(cfg.trials),
                               ci.lo, ci.hi, cfg.trials});
        if (report.rows[ci_idx].estimate > report.rows[best].estimate) best = ci_idx;
    }
    CoordinateEstimate max_row = report.rows[best];
    max_row.coord = "max";
    report.rows.push_back(std::move(max_row));
    return report;
}

ErrorReport estimate_e_mean(const ExperimentConfig& cfg) {
    if (cfg.decoder.kind != DecoderSpec::Kind::Boosted)
        throw ConfigError("estimate_e_mean: requires the boosted decoder");
    Runner run(cfg);
    const unsigned dim = cfg.resolved_dim();

    ErrorReport report;
    report.seed = cfg.seed;
    for (std::uint32_t i : run.coordinate_list()) {
        const std::uint64_t chunks = chunk_count(cfg.trials);
        std::vector<long long> sums(chunks, 0);
        std::vector<std::uint64_t> nonzero(chunks, 0);
        run_chunked(cfg.trials, run.workers, [&](std::uint64_t c, std::uint64_t lo, std::uint64_t hi) {
            std::vector<ChannelUse> y;
            for (std::uint64_t t = lo; t < hi; ++t) {
                auto rng = stream_rng(cfg.seed, i, t);
                const BitVector x = run.transmit_trial(rng, y);
                const AffineCoset petal = sample_petal_containing(cfg.m, dim, i, rng);
                const PetalDecision dec = petal_bit_map_full(run.code, petal, i, y);
                if (dec.guess == BitGuess::Tie) continue;
                const int e = int(dec.guess) == (x.get(i) ? 1 : 0) ? 1 : -1;
                sums[c] += e;
                ++nonzero[c];
            }
        });
        long long total = 0;
        std::uint64_t nz = 0;
        for (std::uint64_t c = 0; c < chunks; ++c) {
            total += sums[c];
            nz += nonzero[c];
        }
        const double T = double(cfg.trials);
        const double mean = double(total) / T;
        // E^2 is the tie/non-tie indicator, so the sample variance needs only
        // the integer tallies.
        const double var =
            cfg.trials > 1 ? (double(nz) - T * mean * mean) / (T - 1.0) : 0.0;
        const double half = kZ95 * std::sqrt(std::max(0.0, var) / T);
        report.rows.push_back({std::to_string(i), "e_mean", mean,
                               std::max(-1.0, mean - half), std::min(1.0, mean + half),
                               cfg.trials});
    }
    return report;
}

ErrorReport estimate_covariance(const ExperimentConfig& cfg) {
    if (cfg.decoder.kind != DecoderSpec::Kind::Boosted)
        throw ConfigError("estimate_covariance: requires the boosted decoder");
    if (cfg.trials < 2) throw ConfigError("estimate_covariance: need at least two trials");
    Runner run(cfg);
    const unsigned dim = cfg.resolved_dim();

    ErrorReport report;
    report.seed = cfg.seed;
    for (std::uint32_t i : run.coordinate_list()) {
        std::vector<double> a(cfg.trials), b(cfg.trials);
        run_chunked(cfg.trials, run.workers, [&](std::uint64_t, std::uint64_t lo, std::uint64_t hi) {
            std::vector<ChannelUse> y;
            for (std::uint64_t t = lo; t < hi; ++t) {
                auto rng = stream_rng(cfg.seed, i, t);
                const BitVector x = run.transmit_trial(rng, y);
                const int sent = x.get(i) ? 1 : 0;
                int e[2];
                for (int s = 0; s < 2; ++s) {
                    const AffineCoset petal = sample_petal_containing(cfg.m, dim, i, rng);
                    const PetalDecision dec = petal_bit_map_full(run.code, petal, i, y);
                    e[s] = dec.guess == BitGuess::Tie ? 0 : (int(dec.guess) == sent ? 1 : -1);
                }
                a[t] = double(e[0] * e[1]);
                b[t] = 0.5 * double(e[0] + e[1]);
            }
        });

        // theta = E[E_P E_P'] - E[E_P]^2, jackknifed over trials
        Kahan sa, sb;
        for (std::uint64_t t = 0; t < cfg.trials; ++t) {
            sa.add(a[t]);
            sb.add(b[t]);
        }
        const double T = double(cfg.trials);
        const double theta_hat = sa.sum / T - (sb.sum / T) * (sb.sum / T);
        std::vector<double> loo(cfg.trials);
        Kahan jk;
        for (std::uint64_t t = 0; t < cfg.trials; ++t) {
            const double ma = (sa.sum - a[t]) / (T - 1.0);
            const double mb = (sb.sum - b[t]) / (T - 1.0);
            loo[t] = ma - mb * mb;
            jk.add(loo[t]);
        }
        const double jack_mean = jk.sum / T;
        const double theta = T * theta_hat - (T - 1.0) * jack_mean;
        Kahan sq;
        for (std::uint64_t t = 0; t < cfg.trials; ++t)
            sq.add((loo[t] - jack_mean) * (loo[t] - jack_mean));
        const double se = std::sqrt(std::max(0.0, (T - 1.0) / T * sq.sum));
        report.rows.push_back({std::to_string(i), "covariance", theta, theta - kZ95 * se,
                               theta + kZ95 * se, cfg.trials});
    }
    const double bound = std::sqrt(correlation_rho(cfg.m, dim).to_double());
    report.rows.push_back({"all", "sqrt_rho", bound, bound, bound, cfg.trials});
    return report;
}

MajorityBoundEstimate estimate_majority_bound(const ExperimentConfig& cfg,
                                              unsigned cosets_per_trial) {
    if (cfg.decoder.kind != DecoderSpec::Kind::Boosted)
        throw ConfigError("estimate_majority_bound: requires the boosted decoder");
    if (cosets_per_trial < 2)
        throw ConfigError("estimate_majority_bound: need at least two cosets per trial");
    if (cfg.trials < 2) throw ConfigError("estimate_majority_bound: need at least two trials");
    Runner run(cfg);
    const unsigned dim = cfg.resolved_dim();
    const unsigned K = cfg.decoder.petals;
    if (K < 1) throw ConfigError("decoder: need at least one petal");
    const std::uint32_t coord = cfg.coordinates.empty() ? 0 : cfg.coordinates.front();
    if (coord >= run.n) throw ConfigError("experiment: coordinate out of range");

    const double L = double(cosets_per_trial);
    // Per-trial statistics: mean vote, mean squared vote, and the unbiased
    // distinct-pair product (S^2 - sum E^2) / (L (L-1)).
    std::vector<double> m1(cfg.trials), sq(cfg.trials), pair(cfg.trials);
    run_chunked(cfg.trials, run.workers, [&](std::uint64_t, std::uint64_t lo, std::uint64_t hi) {
        std::vector<ChannelUse> y;
        for (std::uint64_t t = lo; t < hi; ++t) {
            auto rng = stream_rng(cfg.seed, coord, t);
            const BitVector x = run.transmit_trial(rng, y);
            const int sent = x.get(coord) ? 1 : 0;
            long long S = 0, SS = 0;
            for (unsigned l = 0; l < cosets_per_trial; ++l) {
                const AffineCoset petal = sample_petal_containing(cfg.m, dim, coord, rng);
                const PetalDecision dec = petal_bit_map_full(run.code, petal, coord, y);
                const int e =
                    dec.guess == BitGuess::Tie ? 0 : (int(dec.guess) == sent ? 1 : -1);
                S += e;
                SS += e * e;
            }
            m1[t] = double(S) / L;
            sq[t] = double(SS) / L;
            pair[t] = (double(S) * double(S) - double(SS)) / (L * (L - 1.0));
        }
    });

    Kahan k1, k2, k3;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        k1.add(m1[t]);
        k2.add(sq[t]);
        k3.add(pair[t]);
    }
    const double T = double(cfg.trials);
    const auto bound_of = [&](double mean, double e_sq, double e_pair) {
        if (mean <= 0.0)
            throw ConfigError("estimate_majority_bound: coset decisions are not positively biased");
        const double var = e_sq - mean * mean;
        const double cov = e_pair - mean * mean;
        return (var / double(K) + (1.0 - 1.0 / double(K)) * cov) / (mean * mean);
    };
    const double mean = k1.sum / T;
    const double e_sq = k2.sum / T;
    const double e_pair = k3.sum / T;
    const double theta_hat = bound_of(mean, e_sq, e_pair);

    std::vector<double> loo(cfg.trials);
    Kahan jk;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        loo[t] = bound_of((k1.sum - m1[t]) / (T - 1.0), (k2.sum - sq[t]) / (T - 1.0),
                          (k3.sum - pair[t]) / (T - 1.0));
        jk.add(loo[t]);
    }
    const double jack_mean = jk.sum / T;
    const double theta = T * theta_hat - (T - 1.0) * jack_mean;
    Kahan var_acc;
    for (std::uint64_t t = 0; t < cfg.trials; ++t)
        var_acc.add((loo[t] - jack_mean) * (loo[t] - jack_mean));
    const double se = std::sqrt(std::max(0.0, (T - 1.0) / T * var_acc.sum));

    MajorityBoundEstimate out;
    out.mean = mean;
    out.variance = e_sq - mean * mean;
    out.covariance = e_pair - mean * mean;
    out.bound = theta;
    out.ci_lo = std::max(0.0, theta - kZ95 * se);
    out.ci_hi = theta + kZ95 * se;
    out.trials = cfg.trials;
    return out;
}

ErrorReport run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    ErrorReport report;
    switch (cfg.target) {
        case Target::PBit:
        case Target::PLoc:
        case Target::PGlo:
            report = estimate_bit_error(cfg);
            break;
        case Target::EMean:
            report = estimate_e_mean(cfg);
            break;
        case Target::Covariance:
            report = estimate_covariance(cfg);
            break;
    }
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

std::string ErrorReport::to_csv() const {
    std::string out = "coord,metric,estimate,ci_lo,ci_hi,trials,seed\n";
    for (const auto& row : rows) {
        out += row.coord;
        out += ',';
        out += row.metric;
        out += ',';
        out += fmt12(row.estimate);
        out += ',';
        out += fmt12(row.ci_lo);
        out += ',';
        out += fmt12(row.ci_hi);
        out += ',';
        out += std::to_string(row.trials);
        out += ',';
        out += std::to_string(seed);
        out += '\n';
    }
    return out;
}

nlohmann::json ErrorReport::to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& row : rows)
        rows_json.push_back({{"coord", row.coord},
                             {"metric", row.metric},
                             {"estimate", row.estimate},
                             {"ci_lo", row.ci_lo},
                             {"ci_hi", row.ci_hi},
                             {"trials", row.trials}});
    return {{"seed", seed}, {"rows", rows_json}};
}

namespace {

Target target_from_string(const std::string& s) {
    if (s == "p_bit") return Target::PBit;
    if (s == "p_loc") return Target::PLoc;
    if (s == "p_glo") return Target::PGlo;
    if (s == "e_mean") return Target::EMean;
    if (s == "covariance") return Target::Covariance;
    throw ConfigError("config: unknown target '" + s + "'");
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["code"] = {{"family", "rm"}, {"m", m}, {"r", r}};
    j["channel"] = channel.to_json();
    if (decoder.kind == DecoderSpec::Kind::Exact) {
        j["decoder"] = {{"kind", "exact"}};
    } else {
        j["decoder"] = {{"kind", "boosted"}, {"petals", decoder.petals}};
        if (decoder.dim) j["decoder"]["dim"] = *decoder.dim;
    }
    j["target"] = target_name(target);
    j["trials"] = trials;
    j["seed"] = seed;
    if (coordinates.empty())
        j["coordinates"] = "all";
    else
        j["coordinates"] = coordinates;
    j["random_codeword"] = random_codeword;
    j["workers"] = workers;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    try {
        const auto& code = j.at("code");
        if (code.at("family").get<std::string>() != "rm")
            throw ConfigError("config: unknown code family");
        ExperimentConfig cfg;
        cfg.m = code.at("m").get<unsigned>();
        cfg.r = code.at("r").get<unsigned>();
        cfg.channel = SymmetricChannel::from_json(j.at("channel"));
        if (j.contains("decoder")) {
            const auto& dec = j.at("decoder");
            const std::string kind = dec.at("kind").get<std::string>();
            if (kind == "exact") {
                cfg.decoder.kind = DecoderSpec::Kind::Exact;
            } else if (kind == "boosted") {
                cfg.decoder.kind = DecoderSpec::Kind::Boosted;
                if (dec.contains("petals")) cfg.decoder.petals = dec.at("petals").get<unsigned>();
                if (dec.contains("dim")) cfg.decoder.dim = dec.at("dim").get<unsigned>();
            } else {
                throw ConfigError("config: unknown decoder kind '" + kind + "'");
            }
        }
        cfg.target = target_from_string(j.at("target").get<std::string>());
        cfg.trials = j.at("trials").get<std::uint64_t>();
        if (cfg.trials < 1) throw ConfigError("config: trials must be >= 1");
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("coordinates") && !j.at("coordinates").is_string())
            cfg.coordinates = j.at("coordinates").get<std::vector<std::uint32_t>>();
        else if (j.contains("coordinates") &&
                 j.at("coordinates").get<std::string>() != "all")
            throw ConfigError("config: coordinates must be \"all\" or an index list");
        if (j.contains("random_codeword")) cfg.random_codeword = j.at("random_codeword").get<bool>();
        if (j.contains("workers")) cfg.workers = j.at("workers").get<unsigned>();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

}  // namespace camellia
