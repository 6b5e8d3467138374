#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "camellia/gf2.hpp"

namespace camellia {

struct ChannelComponent {
    double weight;
    double epsilon;  // crossover in [0, 1/2]
};

/// One exact per-coordinate noise outcome. For epsilon == 1/2 the two flip
/// branches are merged (the flip carries no usable information), so `prob`
/// is the whole component weight and `flip` is fixed to 0.
struct NoiseState {
    int component;
    double epsilon;
    std::uint8_t flip;
    bool merged;
    double prob;
};

/// What the receiver sees for one coordinate: the revealed crossover and the
/// noisy bit. `flip` is simulator-side bookkeeping; decoders only read
/// `epsilon` and `output`.
struct ChannelUse {
    double epsilon;
    std::uint8_t flip;
    std::uint8_t output;
};

/// Memoryless symmetric channel as a finite mixture of BSCs. The per-use
/// crossover is revealed to the receiver. Components are canonicalized on
/// construction: zero-weight components dropped, equal crossovers merged,
/// sorted by crossover.
class SymmetricChannel {
public:
    static SymmetricChannel bsc(double eps);
    static SymmetricChannel bec(double p);
    static SymmetricChannel mixture(std::vector<ChannelComponent> components);

    const std::vector<ChannelComponent>& components() const { return components_; }

    /// 1 - sum_k w_k h2(eps_k) in bits. This is the channel capacity because
    /// the crossover is revealed and independent of the input.
    double capacity() const;

    /// Exact per-coordinate noise outcomes with their probabilities.
    const std::vector<NoiseState>& noise_alphabet() const { return alphabet_; }

    /// True when every component has epsilon in {0, 1/2}; such channels admit
    /// pure linear-algebra decoding.
    bool erasure_only() const { return erasure_only_; }

    nlohmann::json to_json() const;
    /// {"kind":"bsc","eps":E} | {"kind":"bec","p":P} |
    /// {"kind":"mixture","components":[[w,eps],...]}
    static SymmetricChannel from_json(const nlohmann::json& j);

private:
    explicit SymmetricChannel(std::vector<ChannelComponent> components);
    std::vector<ChannelComponent> components_;
    std::vector<NoiseState> alphabet_;
    std::vector<double> weight_cdf_;
    bool erasure_only_ = false;
    friend std::vector<ChannelUse> transmit(const SymmetricChannel&, const BitVector&,
                                            std::mt19937_64&);
};

/// h2 in bits; h2(0) = 0, h2(1/2) = 1.
double binary_entropy(double p);

/// Independent per-coordinate transmission of x.
std::vector<ChannelUse> transmit(const SymmetricChannel& ch, const BitVector& x,
                                 std::mt19937_64& rng);

/// P(output | input = hypothesis_bit, epsilon): (1-eps) on a match, eps otherwise.
inline double likelihood(const ChannelUse& use, int hypothesis_bit) {
    return use.output == hypothesis_bit ? 1.0 - use.epsilon : use.epsilon;
}

/// The coordinate's ChannelUse when `input_bit` is sent and the noise takes
/// this state.
inline ChannelUse use_from_state(const NoiseState& s, int input_bit) {
    return ChannelUse{s.epsilon, s.flip, std::uint8_t(input_bit ^ s.flip)};
}

namespace detail {
void check_noise_budget(std::size_t alphabet, unsigned n_coords);
}

/// Visit every joint noise realization over n_coords i.i.d. coordinates with
/// its exact probability; fn(double prob, std::span<const NoiseState>).
/// Probabilities sum to 1 (up to rounding). Budget: alphabet^n <= 2^26.
template <typename F>
void for_each_noise(const SymmetricChannel& ch, unsigned n_coords, F&& fn) {
    const auto& alpha = ch.noise_alphabet();
    detail::check_noise_budget(alpha.size(), n_coords);
    if (n_coords == 0) {
        fn(1.0, std::span<const NoiseState>());
        return;
    }
    std::vector<NoiseState> states(n_coords, alpha[0]);
    std::vector<std::size_t> digit(n_coords, 0);
    // suffix[k] = prod_{j >= k} states[j].prob; an odometer step at position c
    // only invalidates suffixes at k <= c.
    std::vector<double> suffix(n_coords + 1, 1.0);
    for (unsigned k = n_coords; k-- > 0;) suffix[k] = suffix[k + 1] * states[k].prob;
    for (;;) {
        fn(suffix[0], std::span<const NoiseState>(states));
        unsigned c = 0;  // coordinate 0 fastest
        while (c < n_coords) {
            if (++digit[c] < alpha.size()) break;
            digit[c] = 0;
            ++c;
        }
        if (c == n_coords) break;
        for (unsigned k = c + 1; k-- > 0;) {
            states[k] = alpha[digit[k]];
            suffix[k] = suffix[k + 1] * states[k].prob;
        }
    }
}

}  // namespace camellia
