#include "camellia/decoder.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <vector>

namespace camellia {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kRhsBit = std::uint64_t{1} << 63;

bool erasure_like(std::span<const ChannelUse> uses) {
    return std::all_of(uses.begin(), uses.end(),
                       [](const ChannelUse& u) { return u.epsilon == 0.0 || u.epsilon == 0.5; });
}

// Streaming log-sum-exp accumulator: value = exp(max) * scaled.
struct LogSum {
    double max = -kInf;
    double scaled = 0.0;
    void add(double log_term) {
        if (log_term == -kInf) return;
        if (scaled == 0.0) {
            max = log_term;
            scaled = 1.0;
        } else if (log_term <= max) {
            scaled += std::exp(log_term - max);
        } else {
            scaled = scaled * std::exp(max - log_term) + 1.0;
            max = log_term;
        }
    }
    bool empty() const { return scaled == 0.0; }
};

BitMapResult finalize(const LogSum& s0, const LogSum& s1) {
    if (s0.empty() && s1.empty())
        throw EvidenceError("bit map: evidence contradicts every codeword");
    if (s0.empty()) return {BitGuess::One, kInf};
    if (s1.empty()) return {BitGuess::Zero, 0.0};
    const double ratio = std::exp(s1.max - s0.max) * (s1.scaled / s0.scaled);  // S_1/S_0
    const double inv = std::exp(s0.max - s1.max) * (s0.scaled / s1.scaled);    // S_0/S_1
    if (std::abs(inv - 1.0) <= kTieTolerance) return {BitGuess::Tie, ratio};
    return {ratio > 1.0 ? BitGuess::One : BitGuess::Zero, ratio};
}

// Incremental GF(2) elimination over augmented words: constraint vector in
// bits 0..61, right-hand side in bit 63. basis[p] holds the entry whose
// vector part has highest set bit p.
struct Eliminator {
    std::array<std::uint64_t, 62> basis{};

    std::uint64_t reduce(std::uint64_t aug) const {
        for (;;) {
            const std::uint64_t vec = aug & ~kRhsBit;
            if (vec == 0) return aug;
            const int p = 63 - std::countl_zero(vec);
            if (basis[p] == 0) return aug;
            aug ^= basis[p];
        }
    }

    // Returns false on a contradiction (0 = 1).
    bool insert(std::uint64_t aug) {
        aug = reduce(aug);
        const std::uint64_t vec = aug & ~kRhsBit;
        if (vec != 0) {
            basis[63 - std::countl_zero(vec)] = aug;
            return true;
        }
        return aug == 0;
    }
};

}  // namespace

BitMapResult erasure_bit_map(std::span<const std::uint64_t> cols, unsigned rows,
                             std::span<const ChannelUse> uses, std::size_t target) {
    if (rows > 62) throw BudgetError("erasure_bit_map: more than 62 generator rows");
    if (cols.size() != uses.size() || target >= cols.size())
        throw ConfigError("erasure_bit_map: size mismatch");

    Eliminator elim;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const ChannelUse& u = uses[j];
        if (u.epsilon == 0.5) continue;  // no evidence
        if (u.epsilon != 0.0) throw ConfigError("erasure_bit_map: epsilon not in {0, 1/2}");
        const std::uint64_t aug = cols[j] | (u.output ? kRhsBit : 0);
        if (!elim.insert(aug))
            throw EvidenceError("erasure_bit_map: evidence contradicts every codeword");
    }

    const std::uint64_t reduced = elim.reduce(cols[target]);
    if ((reduced & ~kRhsBit) != 0) return {BitGuess::Tie, 1.0};  // bit free: exact 50/50 split
    const bool forced_one = (reduced & kRhsBit) != 0;
    return forced_one ? BitMapResult{BitGuess::One, kInf} : BitMapResult{BitGuess::Zero, 0.0};
}

BitMapResult bit_map_decision(const Gf2Matrix& gen, std::size_t target,
                              std::span<const ChannelUse> uses) {
    if (uses.size() != gen.cols()) throw ConfigError("bit_map_decision: uses/columns mismatch");
    if (target >= gen.cols()) throw ConfigError("bit_map_decision: target out of range");

    if (gen.rows() <= 62 && erasure_like(uses)) {
        std::vector<std::uint64_t> cols(gen.cols(), 0);
        for (std::size_t r = 0; r < gen.rows(); ++r)
            for (std::size_t c = 0; c < gen.cols(); ++c)
                if (gen.get(r, c)) cols[c] |= std::uint64_t{1} << r;
        return erasure_bit_map(cols, unsigned(gen.rows()), uses, target);
    }

    std::vector<double> ll0(uses.size()), ll1(uses.size());
    for (std::size_t j = 0; j < uses.size(); ++j) {
        ll0[j] = std::log(likelihood(uses[j], 0));
        ll1[j] = std::log(likelihood(uses[j], 1));
    }

    LogSum s0, s1;
    for_each_codeword(gen, [&](const BitVector& c) {
        double L = 0.0;
        for (std::size_t j = 0; j < uses.size(); ++j) L += c.get(j) ? ll1[j] : ll0[j];
        (c.get(target) ? s1 : s0).add(L);
    });
    return finalize(s0, s1);
}

namespace {

// Decision given uses in the petal's parameter order; the caller has already
// erased the target's slot when its evidence must be excluded.
BitMapResult decide_on_petal(const RmCode& code, const AffineCoset& petal,
                             std::span<const ChannelUse> uses, std::size_t target_pos) {
    if (code.dimension() <= 62 && erasure_like(uses)) {
        const auto members = petal.members();
        std::vector<std::uint64_t> cols(members.size());
        for (std::size_t t = 0; t < members.size(); ++t)
            cols[t] = code.generator_column(members[t]);
        return erasure_bit_map(cols, unsigned(code.dimension()), uses, target_pos);
    }
    const Gf2Matrix restricted = restrict_columns(code.generator(), petal.members());
    return bit_map_decision(restricted, target_pos, uses);
}

std::vector<ChannelUse> petal_uses_from_reduced(const AffineCoset& petal, std::size_t target_pos,
                                                std::span<const ChannelUse> y) {
    if (y.size() + 1 != petal.members().size())
        throw ConfigError("petal_bit_map: expected one use per petal member except the target");
    std::vector<ChannelUse> uses(petal.members().size());
    for (std::size_t t = 0, k = 0; t < uses.size(); ++t)
        uses[t] = (t == target_pos) ? erased_use() : y[k++];
    return uses;
}

}  // namespace

PetalDecision petal_bit_map(const RmCode& code, const AffineCoset& petal, std::uint32_t i,
                            std::span<const ChannelUse> y) {
    if (petal.ambient() != code.m()) throw ConfigError("petal_bit_map: ambient mismatch");
    const std::size_t pos = petal.position_of(i);
    const auto uses = petal_uses_from_reduced(petal, pos, y);
    const BitMapResult r = decide_on_petal(code, petal, uses, pos);
    return PetalDecision{petal, i, r.guess, r.posterior_ratio};
}

PetalDecision petal_bit_map_full(const RmCode& code, const AffineCoset& petal, std::uint32_t i,
                                 std::span<const ChannelUse> y) {
    if (petal.ambient() != code.m()) throw ConfigError("petal_bit_map: ambient mismatch");
    if (y.size() != code.block_length())
        throw ConfigError("petal_bit_map: expected one use per code coordinate");
    const std::size_t pos = petal.position_of(i);
    const auto members = petal.members();
    std::vector<ChannelUse> uses(members.size());
    for (std::size_t t = 0; t < members.size(); ++t)
        uses[t] = (t == pos) ? erased_use() : y[members[t]];
    const BitMapResult r = decide_on_petal(code, petal, uses, pos);
    return PetalDecision{petal, i, r.guess, r.posterior_ratio};
}

int e_variable(const RmCode& code, const AffineCoset& petal, std::uint32_t i,
               std::span<const NoiseState> z) {
    if (petal.ambient() != code.m()) throw ConfigError("e_variable: ambient mismatch");
    const std::size_t pos = petal.position_of(i);
    if (z.size() + 1 != petal.members().size())
        throw ConfigError("e_variable: expected one noise state per petal member except the target");
    std::vector<ChannelUse> uses(petal.members().size());
    for (std::size_t t = 0, k = 0; t < uses.size(); ++t)
        uses[t] = (t == pos) ? erased_use() : use_from_state(z[k++], 0);
    switch (decide_on_petal(code, petal, uses, pos).guess) {
        case BitGuess::Zero: return +1;  // transmitted codeword is 0
        case BitGuess::One: return -1;
        default: return 0;
    }
}

BoostDecision boost_decode_detail(const RmCode& code, std::uint32_t i,
                                  std::span<const ChannelUse> y, unsigned K, unsigned d,
                                  std::mt19937_64& rng) {
    if (K == 0) throw ConfigError("boost_decode: need K >= 1");
    if (y.size() != code.block_length())
        throw ConfigError("boost_decode: expected one use per code coordinate");

    const bool fast = code.dimension() <= 62 && erasure_like(y);
    std::vector<ChannelUse> uses;
    std::vector<std::uint64_t> cols;
    long long votes = 0;
    for (unsigned k = 0; k < K; ++k) {
        const AffineCoset petal = sample_petal_containing(code.m(), d, i, rng);
        const auto members = petal.members();  // members[0] == i
        uses.resize(members.size());
        uses[0] = erased_use();
        for (std::size_t t = 1; t < members.size(); ++t) uses[t] = y[members[t]];

        BitMapResult r{BitGuess::Tie, 1.0};
        if (fast) {
            cols.resize(members.size());
            for (std::size_t t = 0; t < members.size(); ++t)
                cols[t] = code.generator_column(members[t]);
            r = erasure_bit_map(cols, unsigned(code.dimension()), uses, 0);
        } else {
            const Gf2Matrix restricted = restrict_columns(code.generator(), members);
            r = bit_map_decision(restricted, 0, uses);
        }
        if (r.guess == BitGuess::One)
            ++votes;
        else if (r.guess == BitGuess::Zero)
            --votes;
    }
    return BoostDecision{votes > 0 ? 1 : 0, votes, votes == 0};
}

int boost_decode_bit(const RmCode& code, std::uint32_t i, std::span<const ChannelUse> y,
                     unsigned K, unsigned d, std::mt19937_64& rng) {
    return boost_decode_detail(code, i, y, K, d, rng).guess;
}

BitGuess exact_bit_map(const Gf2Matrix& gen, std::size_t i, std::span<const ChannelUse> y) {
    return bit_map_decision(gen, i, y).guess;
}

BitGuess exact_local_map(const Gf2Matrix& gen, std::size_t i, std::span<const ChannelUse> y) {
    if (i >= y.size()) throw ConfigError("exact_local_map: coordinate out of range");
    std::vector<ChannelUse> masked(y.begin(), y.end());
    masked[i] = erased_use();
    return bit_map_decision(gen, i, masked).guess;
}

BlockMapResult exact_block_map(const Gf2Matrix& gen, std::span<const ChannelUse> y) {
    if (y.size() != gen.cols()) throw ConfigError("exact_block_map: uses/columns mismatch");
    std::vector<double> ll0(y.size()), ll1(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
        ll0[j] = std::log(likelihood(y[j], 0));
        ll1[j] = std::log(likelihood(y[j], 1));
    }

    BitVector best;
    double best_log = -kInf;
    bool tie = false;
    for_each_codeword(gen, [&](const BitVector& c) {
        double L = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) L += c.get(j) ? ll1[j] : ll0[j];
        if (L == -kInf) return;
        if (L > best_log + kTieTolerance) {
            best = c;
            best_log = L;
            tie = false;
        } else if (L >= best_log - kTieTolerance) {
            tie = true;
        }
    });
    if (best_log == -kInf)
        throw EvidenceError("exact_block_map: evidence contradicts every codeword");
    return BlockMapResult{std::move(best), tie};
}

}  // namespace camellia
