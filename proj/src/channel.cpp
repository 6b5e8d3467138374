#include "camellia/channel.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "camellia/rng.hpp"

namespace camellia {

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

SymmetricChannel::SymmetricChannel(std::vector<ChannelComponent> components) {
    double total = 0.0;
    for (const auto& c : components) {
        if (c.weight < 0.0) throw ConfigError("channel: negative component weight");
        if (c.epsilon < 0.0 || c.epsilon > 0.5)
            throw ConfigError("channel: epsilon outside [0, 1/2]");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("channel: weights must sum to 1");

    // canonical form: drop zero weights, sort by epsilon, merge equal epsilons
    std::erase_if(components, [](const ChannelComponent& c) { return c.weight == 0.0; });
    std::sort(components.begin(), components.end(),
              [](const ChannelComponent& a, const ChannelComponent& b) {
                  return a.epsilon < b.epsilon;
              });
    for (const auto& c : components) {
        if (!components_.empty() && components_.back().epsilon == c.epsilon)
            components_.back().weight += c.weight;
        else
            components_.push_back(c);
    }
    if (components_.empty()) throw ConfigError("channel: no components with positive weight");

    erasure_only_ = std::all_of(components_.begin(), components_.end(), [](const ChannelComponent& c) {
        return c.epsilon == 0.0 || c.epsilon == 0.5;
    });

    double cdf = 0.0;
    for (int k = 0; k < int(components_.size()); ++k) {
        const auto& c = components_[k];
        cdf += c.weight;
        weight_cdf_.push_back(cdf);
        if (c.epsilon == 0.5) {
            alphabet_.push_back(NoiseState{k, c.epsilon, 0, true, c.weight});
        } else if (c.epsilon == 0.0) {
            alphabet_.push_back(NoiseState{k, c.epsilon, 0, false, c.weight});
        } else {
            alphabet_.push_back(NoiseState{k, c.epsilon, 0, false, c.weight * (1.0 - c.epsilon)});
            alphabet_.push_back(NoiseState{k, c.epsilon, 1, false, c.weight * c.epsilon});
        }
    }
    weight_cdf_.back() = 1.0;
}

SymmetricChannel SymmetricChannel::bsc(double eps) {
    if (eps < 0.0 || eps > 0.5) throw ConfigError("bsc: eps outside [0, 1/2]");
    return SymmetricChannel({{1.0, eps}});
}

SymmetricChannel SymmetricChannel::bec(double p) {
    if (p < 0.0 || p > 1.0) throw ConfigError("bec: p outside [0, 1]");
    return SymmetricChannel({{1.0 - p, 0.0}, {p, 0.5}});
}

SymmetricChannel SymmetricChannel::mixture(std::vector<ChannelComponent> components) {
    return SymmetricChannel(std::move(components));
}

double SymmetricChannel::capacity() const {
    double h = 0.0;
    for (const auto& c : components_) h += c.weight * binary_entropy(c.epsilon);
    return 1.0 - h;
}

std::vector<ChannelUse> transmit(const SymmetricChannel& ch, const BitVector& x,
                                 std::mt19937_64& rng) {
    std::vector<ChannelUse> uses;
    uses.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = uniform01(rng);
        std::size_t k = 0;
        while (k + 1 < ch.weight_cdf_.size() && u >= ch.weight_cdf_[k]) ++k;
        const double eps = ch.components_[k].epsilon;
        const std::uint8_t flip = uniform01(rng) < eps ? 1 : 0;
        uses.push_back(ChannelUse{eps, flip, std::uint8_t(x.get(i) ^ flip)});
    }
    return uses;
}

namespace detail {
void check_noise_budget(std::size_t alphabet, unsigned n_coords) {
    double states = 1.0;
    for (unsigned i = 0; i < n_coords; ++i) {
        states *= double(alphabet);
        if (states > double(1u << 26)) throw BudgetError("noise enumeration budget exceeded");
    }
}
}  // namespace detail

nlohmann::json SymmetricChannel::to_json() const {
    if (components_.size() == 1 && components_[0].epsilon <= 0.5 && components_[0].epsilon != 0.5)
        return {{"kind", "bsc"}, {"eps", components_[0].epsilon}};
    if (components_.size() == 2 && components_[0].epsilon == 0.0 && components_[1].epsilon == 0.5)
        return {{"kind", "bec"}, {"p", components_[1].weight}};
    if (components_.size() == 1 && components_[0].epsilon == 0.5) return {{"kind", "bec"}, {"p", 1.0}};
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : components_) comps.push_back({c.weight, c.epsilon});
    return {{"kind", "mixture"}, {"components", comps}};
}

SymmetricChannel SymmetricChannel::from_json(const nlohmann::json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "bsc") return bsc(j.at("eps").get<double>());
        if (kind == "bec") return bec(j.at("p").get<double>());
        if (kind == "mixture") {
            std::vector<ChannelComponent> comps;
            for (const auto& item : j.at("components"))
                comps.push_back({item.at(0).get<double>(), item.at(1).get<double>()});
            return mixture(std::move(comps));
        }
        throw ConfigError("channel: unknown kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("channel descriptor: ") + e.what());
    }
}

}  // namespace camellia
