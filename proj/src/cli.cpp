#include "camellia/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "camellia/analysis.hpp"
#include "camellia/channel.hpp"
#include "camellia/decoder.hpp"
#include "camellia/errors.hpp"
#include "camellia/estimators.hpp"
#include "camellia/petals.hpp"
#include "camellia/rm.hpp"
#include "camellia/rng.hpp"

namespace camellia {

namespace {

std::string fmt12(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

// Shared --bsc/--bec/--channel trio; exactly one is required.
struct ChannelOpts {
    double bsc_p = 0.0;
    double bec_p = 0.0;
    std::string file;
    CLI::Option* o_bsc = nullptr;
    CLI::Option* o_bec = nullptr;
    CLI::Option* o_file = nullptr;

    void attach(CLI::App* cmd) {
        o_bsc = cmd->add_option("--bsc", bsc_p, "binary symmetric channel, crossover probability");
        o_bec = cmd->add_option("--bec", bec_p, "binary erasure channel, erasure probability");
        o_file = cmd->add_option("--channel", file, "mixture channel description (JSON file)");
        o_bsc->excludes(o_bec)->excludes(o_file);
        o_bec->excludes(o_file);
    }

    SymmetricChannel build() const {
        if (o_bsc->count()) return SymmetricChannel::bsc(bsc_p);
        if (o_bec->count()) return SymmetricChannel::bec(bec_p);
        if (o_file->count()) return SymmetricChannel::from_json(read_json_file(file));
        throw ConfigError("specify a channel: --bsc, --bec or --channel");
    }
};

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"camellia: coset-based local decoding for Reed-Muller codes"};
    app.require_subcommand(1);

    // --- rate ---------------------------------------------------------------
    struct {
        unsigned m = 0, r = 0;
    } rate_o;
    auto* rate = app.add_subcommand("rate", "print the rate of RM(m, r)");
    rate->add_option("--m", rate_o.m, "number of variables")->required();
    rate->add_option("--r", rate_o.r, "maximum monomial degree")->required();
    rate->callback([&] {
        std::cout << fmt12(RmCode::build(rate_o.m, rate_o.r).rate()) << "\n";
    });

    // --- capacity -----------------------------------------------------------
    auto* capacity = app.add_subcommand("capacity", "print the channel capacity in bits/use");
    ChannelOpts cap_ch;
    cap_ch.attach(capacity);
    capacity->callback([&] { std::cout << fmt12(cap_ch.build().capacity()) << "\n"; });

    // --- petals -------------------------------------------------------------
    struct {
        unsigned m = 0, d = 0, r = 0, samples = 8;
        double margin = 0.0, rho_threshold = 1.0;
        std::uint64_t seed = 0x5eedULL;
        bool verify = false;
    } pet_o;
    auto* petals = app.add_subcommand("petals", "describe or verify the coset collection");
    petals->add_option("--m", pet_o.m, "ambient dimension")->required();
    auto* pet_d = petals->add_option("--d", pet_o.d, "coset dimension (default: asymptotic choice)");
    petals->add_flag("--verify", pet_o.verify, "run the full collection check for RM(m, r)");
    auto* pet_r = petals->add_option("--r", pet_o.r, "code order, required with --verify");
    petals->add_option("--rate-margin", pet_o.margin,
                       "allowed excess of the restricted rate over the code rate");
    petals->add_option("--rho-threshold", pet_o.rho_threshold,
                       "pass additionally requires rho <= this");
    petals->add_option("--samples", pet_o.samples, "affine symmetries sampled by --verify");
    petals->add_option("--seed", pet_o.seed, "seed for the sampled symmetries");
    petals->callback([&] {
        if (pet_o.verify) {
            if (!pet_d->count() || !pet_r->count())
                throw ConfigError("petals --verify needs --d and --r");
            const RmCode code = RmCode::build(pet_o.m, pet_o.r);
            const VerifyOptions opts{pet_o.samples, pet_o.rho_threshold, pet_o.seed};
            std::cout << verify_camellia(code, pet_o.d, pet_o.margin, opts).to_json().dump(2)
                      << "\n";
        } else {
            const unsigned d = pet_d->count() ? pet_o.d : petal_dimension(pet_o.m);
            std::cout << camellia_spec(pet_o.m, d).to_json().dump(2) << "\n";
        }
    });

    // --- simulate -----------------------------------------------------------
    struct {
        std::string config, out, format = "csv";
        std::uint64_t seed = 0;
        unsigned workers = 0;
    } sim_o;
    auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo experiment");
    simulate->add_option("--config", sim_o.config, "experiment description (JSON file)")
        ->required()
        ->check(CLI::ExistingFile);
    auto* sim_seed = simulate->add_option("--seed", sim_o.seed, "override the config seed");
    simulate->add_option("--out", sim_o.out, "write the report here instead of stdout");
    simulate->add_option("--format", sim_o.format, "report format")
        ->check(CLI::IsMember({"csv", "json"}));
    auto* sim_workers =
        simulate->add_option("--workers", sim_o.workers, "worker threads (results identical)");
    simulate->callback([&] {
        ExperimentConfig cfg = ExperimentConfig::from_json(read_json_file(sim_o.config));
        if (sim_seed->count()) cfg.seed = sim_o.seed;
        if (sim_workers->count()) cfg.workers = sim_o.workers;
        const ErrorReport report = run_experiment(cfg);
        write_text(sim_o.out, sim_o.format == "csv" ? report.to_csv()
                                                    : report.to_json().dump(2) + "\n");
    });

    // --- audit --------------------------------------------------------------
    auto* audit = app.add_subcommand("audit", "exact small-instance checks");
    audit->require_subcommand(1);

    struct {
        unsigned m = 0, r = 0;
    } ent_o;
    auto* entropy = audit->add_subcommand("entropy", "joint output entropy accounting");
    entropy->add_option("--m", ent_o.m)->required();
    entropy->add_option("--r", ent_o.r)->required();
    ChannelOpts ent_ch;
    ent_ch.attach(entropy);
    entropy->callback([&] {
        const RmCode code = RmCode::build(ent_o.m, ent_o.r);
        std::cout << entropy_audit(code, ent_ch.build()).to_json().dump(2) << "\n";
    });

    struct {
        unsigned m = 0, r = 0, d = 0;
        std::uint32_t coord = 0;
        std::uint64_t seed = 1;
    } par_o;
    auto* parseval = audit->add_subcommand(
        "parseval", "energy decomposition of one coset decision variable");
    parseval->add_option("--m", par_o.m)->required();
    parseval->add_option("--r", par_o.r)->required();
    parseval->add_option("--d", par_o.d, "coset dimension")->required();
    parseval->add_option("--coord", par_o.coord, "target coordinate");
    parseval->add_option("--seed", par_o.seed, "seed for the sampled coset");
    ChannelOpts par_ch;
    par_ch.attach(parseval);
    parseval->callback([&] {
        const RmCode code = RmCode::build(par_o.m, par_o.r);
        auto rng = stream_rng(par_o.seed, 0);
        const AffineCoset petal = sample_petal_containing(par_o.m, par_o.d, par_o.coord, rng);
        const TabulatedFunction tab = tabulate_e_variable(code, par_ch.build(), petal, par_o.coord);
        nlohmann::json out = parseval_check(tab).to_json();
        out["coord"] = par_o.coord;
        out["petal"] = petal.to_json();
        std::cout << out.dump(2) << "\n";
    });

    struct {
        unsigned m = 0, r = 0, d = 0;
        std::uint32_t coord = 0;
    } cov_o;
    auto* covariance = audit->add_subcommand(
        "covariance", "exact average covariance of the coset decision variables");
    covariance->add_option("--m", cov_o.m)->required();
    covariance->add_option("--r", cov_o.r)->required();
    covariance->add_option("--d", cov_o.d, "coset dimension")->required();
    covariance->add_option("--coord", cov_o.coord, "target coordinate");
    ChannelOpts cov_ch;
    cov_ch.attach(covariance);
    covariance->callback([&] {
        const RmCode code = RmCode::build(cov_o.m, cov_o.r);
        const double cov = exact_expected_covariance(code, cov_ch.build(), cov_o.coord, cov_o.d);
        const Rational rho = correlation_rho(cov_o.m, cov_o.d);
        nlohmann::json out{{"m", cov_o.m},
                           {"r", cov_o.r},
                           {"d", cov_o.d},
                           {"coord", cov_o.coord},
                           {"covariance", cov},
                           {"rho", rho.to_double()},
                           {"sqrt_rho", std::sqrt(rho.to_double())}};
        std::cout << out.dump(2) << "\n";
    });

    // --- trend --------------------------------------------------------------
    struct {
        std::vector<unsigned> ms;
        unsigned r = 1, petals = 64, dim = 0, samples = 1024;
        std::uint64_t trials = 10000, seed = 1;
        std::string out;
    } tr_o;
    auto* trend = app.add_subcommand(
        "trend",
        "Chebyshev bound on the K-coset majority bit error across block lengths (coordinate 0)");
    trend->add_option("--m-list", tr_o.ms, "ambient dimensions, comma separated")
        ->required()
        ->delimiter(',');
    trend->add_option("--r", tr_o.r, "code order");
    ChannelOpts tr_ch;
    tr_ch.attach(trend);
    trend->add_option("--petals", tr_o.petals, "majority size K the bound refers to");
    auto* tr_dim = trend->add_option("--dim", tr_o.dim, "coset dimension (default: r+1)");
    trend->add_option("--samples", tr_o.samples, "cosets sampled per noise realization");
    trend->add_option("--trials", tr_o.trials, "noise realizations per point");
    trend->add_option("--seed", tr_o.seed);
    trend->add_option("--out", tr_o.out, "write the CSV here instead of stdout");
    trend->callback([&] {
        const SymmetricChannel ch = tr_ch.build();
        std::string csv = "m,n,metric,estimate,ci_lo,ci_hi,trials,seed\n";
        for (unsigned m : tr_o.ms) {
            ExperimentConfig cfg;
            cfg.m = m;
            cfg.r = tr_o.r;
            cfg.channel = ch;
            cfg.decoder.kind = DecoderSpec::Kind::Boosted;
            cfg.decoder.petals = tr_o.petals;
            cfg.decoder.dim = tr_dim->count() ? tr_o.dim : tr_o.r + 1;
            cfg.trials = tr_o.trials;
            cfg.seed = tr_o.seed;
            cfg.coordinates = {0};  // every coordinate is equivalent under the affine group
            const MajorityBoundEstimate est = estimate_majority_bound(cfg, tr_o.samples);
            csv += std::to_string(m) + "," + std::to_string(std::size_t{1} << m) +
                   ",p_bit_bound," + fmt12(est.bound) + "," + fmt12(est.ci_lo) + "," +
                   fmt12(est.ci_hi) + "," + std::to_string(est.trials) + "," +
                   std::to_string(cfg.seed) + "\n";
        }
        write_text(tr_o.out, csv);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const BudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace camellia
