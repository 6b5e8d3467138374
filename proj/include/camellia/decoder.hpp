#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "camellia/channel.hpp"
#include "camellia/gf2.hpp"
#include "camellia/petals.hpp"
#include "camellia/rm.hpp"

namespace camellia {

enum class BitGuess : int { Zero = 0, One = 1, Tie = 2 };

/// The two hypothesis sums count as tied when |S_0/S_1 - 1| falls below this.
constexpr double kTieTolerance = 1e-9;

struct BitMapResult {
    BitGuess guess;
    double posterior_ratio;  // S_1 / S_0; +inf when S_0 == 0
};

/// An erasure use: likelihood 1/2 for both hypotheses. Substituting it at a
/// coordinate scales both sums equally, i.e. removes that coordinate's
/// evidence without changing the decision.
inline ChannelUse erased_use() { return ChannelUse{0.5, 0, 0}; }

/// Bit-MAP decision for column `target` of `gen` given channel uses on all
/// columns (uses.size() == gen.cols()):
///   S_b = sum over codewords c with c_target = b of prod_j likelihood(uses[j], c_j).
/// Likelihood products run in log domain with streaming max-rescaled sums, so
/// petals with hundreds of coordinates cannot underflow. To decode from
/// partial evidence, overwrite the hidden coordinates with erased_use().
/// Throws EvidenceError if every codeword has zero likelihood.
BitMapResult bit_map_decision(const Gf2Matrix& gen, std::size_t target,
                              std::span<const ChannelUse> uses);

/// Same decision when every epsilon is 0 or 1/2 (erasure-like evidence):
/// each unerased coordinate j is the linear constraint u . cols[j] = output_j
/// over messages u, so the target bit is either forced, free (tie), or the
/// constraints are contradictory (EvidenceError). cols[j] packs generator
/// column j with row bit r at position r; requires rows <= 62.
BitMapResult erasure_bit_map(std::span<const std::uint64_t> cols, unsigned rows,
                             std::span<const ChannelUse> uses, std::size_t target);

struct PetalDecision {
    AffineCoset petal;
    std::uint32_t target;
    BitGuess guess;
    double posterior_ratio;
};

/// ML decision for bit i of the code from the petal's other coordinates.
/// `y` holds the uses on the petal members minus i, in the petal's parameter
/// order with i's slot removed (y.size() == 2^d - 1).
PetalDecision petal_bit_map(const RmCode& code, const AffineCoset& petal, std::uint32_t i,
                            std::span<const ChannelUse> y);

/// Same, gathering the petal's uses from a full-block output (y.size() == n).
/// y[i] itself is never used as evidence.
PetalDecision petal_bit_map_full(const RmCode& code, const AffineCoset& petal,
                                 std::uint32_t i, std::span<const ChannelUse> y);

/// Petal-decoding correctness under the zero codeword: +1 when the petal
/// guesses the transmitted 0, -1 when it guesses 1, 0 on a tie. `z` holds
/// noise states on the petal members minus i (slot removed), matching the
/// evidence layout of petal_bit_map.
int e_variable(const RmCode& code, const AffineCoset& petal, std::uint32_t i,
               std::span<const NoiseState> z);

struct BoostDecision {
    int guess;               // 0 or 1; an overall tie resolves to 0
    long long vote_sum;      // +1 per petal guessing one, -1 per zero, 0 per tie
    bool tie;                // vote_sum == 0
};

/// Majority vote over K petals drawn i.i.d. uniform among those containing i.
BoostDecision boost_decode_detail(const RmCode& code, std::uint32_t i,
                                  std::span<const ChannelUse> y, unsigned K, unsigned d,
                                  std::mt19937_64& rng);
int boost_decode_bit(const RmCode& code, std::uint32_t i, std::span<const ChannelUse> y,
                     unsigned K, unsigned d, std::mt19937_64& rng);

/// Bit-MAP for coordinate i from the whole output (y.size() == gen.cols()).
BitGuess exact_bit_map(const Gf2Matrix& gen, std::size_t i, std::span<const ChannelUse> y);

/// Bit-MAP for coordinate i from every output except y[i].
BitGuess exact_local_map(const Gf2Matrix& gen, std::size_t i, std::span<const ChannelUse> y);

struct BlockMapResult {
    BitVector codeword;  // a maximum-likelihood codeword (first found in a fixed order)
    bool tie;            // some other codeword ties its likelihood within tolerance
};

/// Whole-codeword ML decoding by enumeration.
BlockMapResult exact_block_map(const Gf2Matrix& gen, std::span<const ChannelUse> y);

}  // namespace camellia
