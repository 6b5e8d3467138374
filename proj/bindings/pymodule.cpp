#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "camellia/analysis.hpp"
#include "camellia/channel.hpp"
#include "camellia/decoder.hpp"
#include "camellia/errors.hpp"
#include "camellia/estimators.hpp"
#include "camellia/gf2.hpp"
#include "camellia/petals.hpp"
#include "camellia/rm.hpp"
#include "camellia/rng.hpp"

namespace py = pybind11;
using namespace camellia;

namespace {

py::object json_to_py(const nlohmann::json& j) {
    using value_t = nlohmann::json::value_t;
    switch (j.type()) {
        case value_t::null: return py::none();
        case value_t::boolean: return py::bool_(j.get<bool>());
        case value_t::number_integer: return py::int_(j.get<long long>());
        case value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
        case value_t::number_float: return py::float_(j.get<double>());
        case value_t::string: return py::str(j.get<std::string>());
        case value_t::array: {
            py::list out;
            for (const auto& item : j) out.append(json_to_py(item));
            return out;
        }
        case value_t::object: {
            py::dict out;
            for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
            return out;
        }
        default: return py::none();
    }
}

nlohmann::json py_to_json(py::handle h) {
    if (h.is_none()) return nullptr;
    if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
    if (py::isinstance<py::int_>(h)) return h.cast<long long>();
    if (py::isinstance<py::float_>(h)) return h.cast<double>();
    if (py::isinstance<py::str>(h)) return h.cast<std::string>();
    if (py::isinstance<py::list>(h) || py::isinstance<py::tuple>(h)) {
        nlohmann::json out = nlohmann::json::array();
        for (py::handle item : h) out.push_back(py_to_json(item));
        return out;
    }
    if (py::isinstance<py::dict>(h)) {
        nlohmann::json out = nlohmann::json::object();
        for (auto item : h.cast<py::dict>())
            out[item.first.cast<std::string>()] = py_to_json(item.second);
        return out;
    }
    throw ConfigError("unsupported value in config dict");
}

py::object big_to_py(const BigInt& v) {
    return py::module_::import("builtins").attr("int")(v.str());
}

py::object rational_to_py(const Rational& r) {
    return py::module_::import("fractions").attr("Fraction")(r.num.str() + "/" + r.den.str());
}

std::vector<ChannelUse> uses_from_pairs(const std::vector<std::pair<double, int>>& pairs) {
    std::vector<ChannelUse> uses;
    uses.reserve(pairs.size());
    for (const auto& [eps, out] : pairs) {
        if (out != 0 && out != 1) throw ConfigError("channel output must be 0 or 1");
        uses.push_back(ChannelUse{eps, 0, std::uint8_t(out)});
    }
    return uses;
}

py::object guess_to_py(BitGuess g) {
    if (g == BitGuess::Tie) return py::none();
    return py::int_(int(g));
}

}  // namespace

PYBIND11_MODULE(pycamellia, mod) {
    mod.doc() = "Reed-Muller coset decoding: codes, channels, exact checks, estimators";

    py::register_exception<BudgetError>(mod, "BudgetError");
    py::register_exception<ConfigError>(mod, "ConfigError");

    py::class_<RmCode>(mod, "RmCode")
        .def_static("build", &RmCode::build, py::arg("m"), py::arg("r"))
        .def_property_readonly("m", &RmCode::m)
        .def_property_readonly("r", &RmCode::r)
        .def_property_readonly("block_length", &RmCode::block_length)
        .def_property_readonly("dimension", &RmCode::dimension)
        .def("rate", &RmCode::rate)
        .def(
            "encode",
            [](const RmCode& code, const std::string& message) {
                return code.encode(BitVector::from_string(message)).to_string();
            },
            py::arg("message"), "Encode a message given as a 0/1 string, lowest index first.")
        .def("__repr__", [](const RmCode& code) {
            return "RmCode(m=" + std::to_string(code.m()) + ", r=" + std::to_string(code.r()) + ")";
        });

    py::class_<SymmetricChannel>(mod, "SymmetricChannel")
        .def_static("bsc", &SymmetricChannel::bsc, py::arg("eps"))
        .def_static("bec", &SymmetricChannel::bec, py::arg("p"))
        .def_static(
            "mixture",
            [](const std::vector<std::pair<double, double>>& parts) {
                std::vector<ChannelComponent> comps;
                for (const auto& [w, eps] : parts) comps.push_back({w, eps});
                return SymmetricChannel::mixture(std::move(comps));
            },
            py::arg("components"), "components: list of (weight, epsilon) pairs")
        .def("capacity", &SymmetricChannel::capacity)
        .def("to_dict", [](const SymmetricChannel& ch) { return json_to_py(ch.to_json()); })
        .def("__repr__", [](const SymmetricChannel& ch) { return ch.to_json().dump(); });

    mod.def("binary_entropy", &binary_entropy, py::arg("p"));
    mod.def(
        "gaussian_binomial",
        [](unsigned m, unsigned d) { return big_to_py(gaussian_binomial(m, d)); }, py::arg("m"),
        py::arg("d"), "Number of d-dimensional subspaces of F2^m.");
    mod.def("petal_dimension", &petal_dimension, py::arg("m"));
    mod.def("rho_asymptotic_bound", &rho_asymptotic_bound, py::arg("m"));
    mod.def(
        "correlation_rho",
        [](unsigned m, unsigned d) { return rational_to_py(correlation_rho(m, d)); }, py::arg("m"),
        py::arg("d"),
        "Exact P(j in P | i in P) for a uniform d-dim coset through i, as a Fraction.");
    mod.def(
        "verify_camellia",
        [](unsigned m, unsigned r, unsigned d, double rate_margin, double rho_threshold,
           unsigned samples, std::uint64_t seed) {
            VerifyOptions opts;
            opts.affine_samples = samples;
            opts.rho_threshold = rho_threshold;
            opts.seed = seed;
            return json_to_py(verify_camellia(RmCode::build(m, r), d, rate_margin, opts).to_json());
        },
        py::arg("m"), py::arg("r"), py::arg("d"), py::arg("rate_margin"),
        py::arg("rho_threshold") = 1.0, py::arg("samples") = 8, py::arg("seed") = 0x5eedULL);

    mod.def(
        "exact_bit_map",
        [](unsigned m, unsigned r, const std::vector<std::pair<double, int>>& uses,
           std::size_t target) {
            const RmCode code = RmCode::build(m, r);
            return guess_to_py(exact_bit_map(code.generator(), target, uses_from_pairs(uses)));
        },
        py::arg("m"), py::arg("r"), py::arg("uses"), py::arg("target"),
        "Bit-MAP decision for one coordinate; uses = [(epsilon, output), ...]; None on a tie.");
    mod.def(
        "exact_block_map",
        [](unsigned m, unsigned r, const std::vector<std::pair<double, int>>& uses) {
            const RmCode code = RmCode::build(m, r);
            const BlockMapResult res = exact_block_map(code.generator(), uses_from_pairs(uses));
            return py::make_tuple(res.codeword.to_string(), res.tie);
        },
        py::arg("m"), py::arg("r"), py::arg("uses"),
        "Most likely codeword and a tie flag; uses = [(epsilon, output), ...].");

    mod.def(
        "exact_expected_covariance",
        [](unsigned m, unsigned r, const SymmetricChannel& ch, std::uint32_t coord, unsigned d) {
            return exact_expected_covariance(RmCode::build(m, r), ch, coord, d);
        },
        py::arg("m"), py::arg("r"), py::arg("channel"), py::arg("coord"), py::arg("d"),
        "Exact average covariance of coset correctness variables over all d-dim cosets "
        "through coord.");
    mod.def("chebyshev_majority_bound", &chebyshev_majority_bound, py::arg("mean"),
            py::arg("avg_covariance"));
    mod.def(
        "entropy_audit",
        [](unsigned m, unsigned r, const SymmetricChannel& ch) {
            return json_to_py(entropy_audit(RmCode::build(m, r), ch).to_json());
        },
        py::arg("m"), py::arg("r"), py::arg("channel"));
    mod.def(
        "parseval_report",
        [](unsigned m, unsigned r, unsigned d, std::uint32_t coord, const SymmetricChannel& ch,
           std::uint64_t seed) {
            const RmCode code = RmCode::build(m, r);
            auto rng = stream_rng(seed, 0);
            const AffineCoset petal = sample_petal_containing(m, d, coord, rng);
            return json_to_py(parseval_check(tabulate_e_variable(code, ch, petal, coord)).to_json());
        },
        py::arg("m"), py::arg("r"), py::arg("d"), py::arg("coord"), py::arg("channel"),
        py::arg("seed") = 1,
        "Energy decomposition report for the correctness variable of one sampled coset.");

    mod.def(
        "run_experiment",
        [](py::dict config) {
            const ErrorReport report = run_experiment(ExperimentConfig::from_json(py_to_json(config)));
            py::dict out = json_to_py(report.to_json());
            out["wall_clock_seconds"] = report.wall_clock_seconds;
            return out;
        },
        py::arg("config"),
        "Run a Monte Carlo experiment from a config dict (same schema as the CLI JSON).");
    mod.def(
        "estimate_majority_bound",
        [](py::dict config, unsigned cosets_per_trial) {
            const MajorityBoundEstimate est =
                estimate_majority_bound(ExperimentConfig::from_json(py_to_json(config)),
                                        cosets_per_trial);
            py::dict out;
            out["mean"] = est.mean;
            out["variance"] = est.variance;
            out["covariance"] = est.covariance;
            out["bound"] = est.bound;
            out["ci_lo"] = est.ci_lo;
            out["ci_hi"] = est.ci_hi;
            out["trials"] = est.trials;
            return out;
        },
        py::arg("config"), py::arg("cosets_per_trial") = 1024,
        "Chebyshev bound on the K-coset majority error, sampled; config as for run_experiment.");
    mod.def(
        "wilson_interval",
        [](std::uint64_t successes, std::uint64_t trials) {
            const Interval iv = wilson_interval(successes, trials);
            return py::make_tuple(iv.lo, iv.hi);
        },
        py::arg("successes"), py::arg("trials"));
}
