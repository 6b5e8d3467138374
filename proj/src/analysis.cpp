#include "camellia/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

namespace camellia {

namespace {

// Compensated accumulator; keeps exact-oracle sums reproducible and tight.
struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

std::vector<std::size_t> decode_digits(const TabulatedFunction& f, std::size_t flat) {
    std::vector<std::size_t> digits(f.coords());
    for (std::size_t c = 0; c < f.coords(); ++c) {
        digits[c] = flat % f.radix(c);
        flat /= f.radix(c);
    }
    return digits;
}

// Mixed-radix index of the digits at the coordinates in mask, ascending
// coordinate order, lowest coordinate fastest.
std::size_t project_index(const TabulatedFunction& f, const std::vector<std::size_t>& digits,
                          std::uint32_t mask) {
    std::size_t sub = 0, stride = 1;
    for (std::size_t c = 0; c < f.coords(); ++c) {
        if ((mask >> c) & 1u) {
            sub += digits[c] * stride;
            stride *= f.radix(c);
        }
    }
    return sub;
}

std::size_t subtable_size(const TabulatedFunction& f, std::uint32_t mask) {
    std::size_t size = 1;
    for (std::size_t c = 0; c < f.coords(); ++c)
        if ((mask >> c) & 1u) size *= f.radix(c);
    return size;
}

// E[f | Z_S = z_S] tabulated over the S-subindex space.
std::vector<double> conditional_table(const TabulatedFunction& f, std::uint32_t mask) {
    std::vector<double> cond(subtable_size(f, mask), 0.0);
    for (std::size_t flat = 0; flat < f.values.size(); ++flat) {
        const auto digits = decode_digits(f, flat);
        double off_mass = 1.0;
        for (std::size_t c = 0; c < f.coords(); ++c)
            if (!((mask >> c) & 1u)) off_mass *= f.state_probs[c][digits[c]];
        cond[project_index(f, digits, mask)] += off_mass * f.values[flat];
    }
    return cond;
}

void check_contribution_budget(const TabulatedFunction& f) {
    if (f.coords() > kContributionMaxCoords)
        throw BudgetError("contribution: too many coordinates for exhaustive subsets");
    for (std::size_t c = 0; c < f.coords(); ++c)
        if (f.radix(c) > kContributionMaxStates)
            throw BudgetError("contribution: state alphabet too large");
}

}  // namespace

std::size_t TabulatedFunction::table_size() const {
    std::size_t size = 1;
    for (const auto& probs : state_probs) size *= probs.size();
    return size;
}

double TabulatedFunction::probability(std::size_t flat) const {
    double p = 1.0;
    for (const auto& probs : state_probs) {
        p *= probs[flat % probs.size()];
        flat /= probs.size();
    }
    return p;
}

double TabulatedFunction::mean() const {
    Kahan acc;
    for (std::size_t flat = 0; flat < values.size(); ++flat) acc.add(probability(flat) * values[flat]);
    return acc.sum;
}

void TabulatedFunction::validate() const {
    for (const auto& probs : state_probs)
        if (probs.empty()) throw ConfigError("TabulatedFunction: empty state alphabet");
    if (values.size() != table_size())
        throw ConfigError("TabulatedFunction: value table does not match the state space");
}

TabulatedFunction tabulate_e_variable(const RmCode& code, const SymmetricChannel& ch,
                                      const AffineCoset& petal, std::uint32_t i) {
    const std::size_t n_coords = petal.members().size() - 1;
    std::vector<double> probs;
    for (const NoiseState& s : ch.noise_alphabet()) probs.push_back(s.prob);

    TabulatedFunction f;
    f.state_probs.assign(n_coords, probs);
    f.values.reserve(f.table_size());
    // for_each_noise steps coordinate 0 fastest, matching the flat index order.
    for_each_noise(ch, unsigned(n_coords), [&](double, std::span<const NoiseState> z) {
        f.values.push_back(double(e_variable(code, petal, i, z)));
    });
    return f;
}

TabulatedFunction contribution(const TabulatedFunction& f, std::uint32_t subset_mask) {
    f.validate();
    check_contribution_budget(f);
    if (f.coords() < 32 && (subset_mask >> f.coords()) != 0)
        throw ConfigError("contribution: subset outside the coordinate range");

    // conditional expectation tables for every subset of subset_mask
    std::vector<std::vector<double>> cond(std::size_t{1} << f.coords());
    std::vector<std::uint32_t> submasks;
    for (std::uint32_t sub = subset_mask;; sub = (sub - 1) & subset_mask) {
        cond[sub] = conditional_table(f, sub);
        submasks.push_back(sub);
        if (sub == 0) break;
    }

    const int total_bits = std::popcount(subset_mask);
    TabulatedFunction q;
    q.state_probs = f.state_probs;
    q.values.assign(f.values.size(), 0.0);
    for (std::size_t flat = 0; flat < f.values.size(); ++flat) {
        const auto digits = decode_digits(f, flat);
        double acc = 0.0;
        for (std::uint32_t sub : submasks) {
            const double term = cond[sub][project_index(f, digits, sub)];
            acc += ((total_bits - std::popcount(sub)) % 2 == 0) ? term : -term;
        }
        q.values[flat] = acc;
    }
    return q;
}

ContributionTable decompose(const TabulatedFunction& f) {
    f.validate();
    check_contribution_budget(f);
    ContributionTable table;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << f.coords()); ++mask) {
        TabulatedFunction q = contribution(f, mask);
        Kahan energy;
        for (std::size_t flat = 0; flat < q.values.size(); ++flat)
            energy.add(q.probability(flat) * q.values[flat] * q.values[flat]);
        table.subsets.push_back(mask);
        table.energies.push_back(energy.sum);
        table.parts.push_back(std::move(q));
    }
    return table;
}

ParsevalReport parseval_check(const TabulatedFunction& f) {
    const ContributionTable table = decompose(f);
    ParsevalReport report;

    Kahan total;
    for (std::size_t flat = 0; flat < f.values.size(); ++flat)
        total.add(f.probability(flat) * f.values[flat] * f.values[flat]);
    report.total_energy = total.sum;

    Kahan energy_sum;
    for (double e : table.energies) energy_sum.add(e);
    report.energy_sum = energy_sum.sum;
    report.parseval_violation = std::abs(report.total_energy - report.energy_sum);

    for (std::size_t a = 0; a < table.parts.size(); ++a)
        for (std::size_t b = a + 1; b < table.parts.size(); ++b) {
            Kahan inner;
            for (std::size_t flat = 0; flat < f.values.size(); ++flat)
                inner.add(f.probability(flat) * table.parts[a].values[flat] *
                          table.parts[b].values[flat]);
            report.max_orthogonality_violation =
                std::max(report.max_orthogonality_violation, std::abs(inner.sum));
        }

    for (std::size_t flat = 0; flat < f.values.size(); ++flat) {
        Kahan recon;
        for (const auto& part : table.parts) recon.add(part.values[flat]);
        report.max_reconstruction_violation =
            std::max(report.max_reconstruction_violation, std::abs(recon.sum - f.values[flat]));
    }
    return report;
}

bool ParsevalReport::pass(double tol) const {
    return parseval_violation <= tol && max_orthogonality_violation <= tol &&
           max_reconstruction_violation <= tol;
}

nlohmann::json ParsevalReport::to_json() const {
    return {{"total_energy", total_energy},
            {"energy_sum", energy_sum},
            {"parseval_violation", parseval_violation},
            {"max_orthogonality_violation", max_orthogonality_violation},
            {"max_reconstruction_violation", max_reconstruction_violation},
            {"pass", pass()}};
}

double exact_expected_covariance(const RmCode& code, const SymmetricChannel& ch,
                                 std::uint32_t i, unsigned d) {
    const unsigned m = code.m();
    if (d == 0 || d > m) throw ConfigError("exact_expected_covariance: need 1 <= d <= m");
    if (i >= code.block_length())
        throw ConfigError("exact_expected_covariance: coordinate out of range");

    // The petals containing i are in bijection with the dim-d subspaces.
    const std::vector<Gf2Matrix> subspaces = enumerate_subspaces(m, d);
    const std::size_t N = subspaces.size();
    if (N > 4096) throw BudgetError("exact_expected_covariance: too many petals");

    const std::size_t A = ch.noise_alphabet().size();
    std::vector<AffineCoset> petals;
    std::vector<std::vector<double>> tabs;
    std::vector<double> means;
    petals.reserve(N);
    for (const Gf2Matrix& basis : subspaces) {
        petals.emplace_back(basis, point_of_index(i, m));
        TabulatedFunction f = tabulate_e_variable(code, ch, petals.back(), i);
        means.push_back(f.mean());
        tabs.push_back(std::move(f.values));
    }

    std::vector<double> state_probs;
    for (const NoiseState& s : ch.noise_alphabet()) state_probs.push_back(s.prob);
    std::vector<std::size_t> apow(64, 1);
    for (std::size_t k = 1; k < apow.size(); ++k) apow[k] = apow[k - 1] * A;

    Kahan total;
    std::vector<std::uint32_t> uni;
    std::vector<std::size_t> da, db, digit;
    std::vector<double> suffix;
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b) {
            // union of the two petals' evidence coordinates
            uni.assign(petals[a].members().begin(), petals[a].members().end());
            uni.insert(uni.end(), petals[b].members().begin(), petals[b].members().end());
            std::sort(uni.begin(), uni.end());
            uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
            uni.erase(std::remove(uni.begin(), uni.end(), i), uni.end());
            const std::size_t U = uni.size();
            detail::check_noise_budget(A, unsigned(U));

            // da[u] = stride of union position u inside petal a's table (0 if absent)
            da.assign(U, 0);
            db.assign(U, 0);
            const std::size_t pos_a = petals[a].position_of(i), pos_b = petals[b].position_of(i);
            for (std::size_t t = 0, k = 0; t < petals[a].members().size(); ++t) {
                if (t == pos_a) continue;
                const auto it = std::lower_bound(uni.begin(), uni.end(), petals[a].members()[t]);
                da[std::size_t(it - uni.begin())] = apow[k++];
            }
            for (std::size_t t = 0, k = 0; t < petals[b].members().size(); ++t) {
                if (t == pos_b) continue;
                const auto it = std::lower_bound(uni.begin(), uni.end(), petals[b].members()[t]);
                db[std::size_t(it - uni.begin())] = apow[k++];
            }

            digit.assign(U, 0);
            suffix.assign(U + 1, 1.0);
            for (std::size_t k = U; k-- > 0;) suffix[k] = suffix[k + 1] * state_probs[0];
            std::size_t ia = 0, ib = 0;
            Kahan joint;
            for (;;) {
                joint.add(suffix[0] * tabs[a][ia] * tabs[b][ib]);
                std::size_t c = 0;
                while (c < U) {
                    if (++digit[c] < A) {
                        ia += da[c];
                        ib += db[c];
                        break;
                    }
                    digit[c] = 0;
                    ia -= (A - 1) * da[c];
                    ib -= (A - 1) * db[c];
                    ++c;
                }
                if (c == U) break;
                for (std::size_t k = c + 1; k-- > 0;) suffix[k] = suffix[k + 1] * state_probs[digit[k]];
            }
            total.add(joint.sum - means[a] * means[b]);
        }
    return total.sum / double(N * N);
}

double chebyshev_majority_bound(double mean, double avg_cov) {
    if (mean <= 0.0) throw ConfigError("chebyshev_majority_bound: requires positive mean");
    return std::min(1.0, std::max(0.0, avg_cov / (mean * mean)));
}

namespace {

double entropy_bits(const std::vector<double>& dist) {
    Kahan h;
    for (double p : dist)
        if (p > 0.0) h.add(-p * std::log2(p));
    return h.sum;
}

}  // namespace

EntropyAudit entropy_audit(const Gf2Matrix& gen, const SymmetricChannel& ch) {
    const std::size_t n = gen.cols();
    const std::size_t rows = gen.rows();
    if (rows > 12) throw BudgetError("entropy_audit: generator exceeds the message budget");
    const std::size_t R = 2 * ch.components().size();  // symbol = (component, output bit)
    double states = 1.0;
    for (std::size_t j = 0; j < n; ++j) states *= double(R);
    if (states * double(std::size_t{1} << rows) > double(std::size_t{1} << 26))
        throw BudgetError("entropy_audit: output-law enumeration exceeds budget");

    // per-input-bit law of the output symbol at one coordinate
    std::vector<std::vector<double>> sym(2, std::vector<double>(R, 0.0));
    for (std::size_t k = 0; k < ch.components().size(); ++k) {
        const auto& comp = ch.components()[k];
        for (int b = 0; b < 2; ++b)
            for (int o = 0; o < 2; ++o)
                sym[b][2 * k + o] = comp.weight * (o == b ? 1.0 - comp.epsilon : comp.epsilon);
    }

    // joint law of Y under a uniform message
    const std::size_t table_size = std::size_t(states);
    std::vector<double> joint(table_size, 0.0);
    const double w_cw = 1.0 / double(std::size_t{1} << rows);
    std::vector<std::size_t> digit(n, 0);
    std::vector<double> suffix(n + 1, 1.0);
    for_each_codeword(gen, [&](const BitVector& c) {
        std::fill(digit.begin(), digit.end(), 0);
        for (std::size_t k = n; k-- > 0;) suffix[k] = suffix[k + 1] * sym[c.get(k)][0];
        std::size_t flat = 0;  // coordinate 0 fastest -> flat simply counts up
        for (;;) {
            joint[flat] += w_cw * suffix[0];
            std::size_t j = 0;
            while (j < n) {
                if (++digit[j] < R) break;
                digit[j] = 0;
                ++j;
            }
            if (j == n) break;
            ++flat;
            for (std::size_t k = j + 1; k-- > 0;) suffix[k] = suffix[k + 1] * sym[c.get(k)][digit[k]];
        }
    });

    EntropyAudit audit;
    audit.n = n;
    audit.capacity = ch.capacity();
    audit.rate = n == 0 ? 0.0 : double(gen.rank()) / double(n);
    audit.h_joint = entropy_bits(joint);

    // chain terms from progressively marginalized prefixes
    std::vector<double> prefix_entropy(n + 1, 0.0);
    prefix_entropy[n] = audit.h_joint;
    {
        std::vector<double> table = joint;
        for (std::size_t t = n; t-- > 0;) {
            std::vector<double> reduced(table.size() / R, 0.0);
            for (std::size_t idx = 0; idx < reduced.size(); ++idx) {
                Kahan acc;
                for (std::size_t s = 0; s < R; ++s) acc.add(table[idx + s * reduced.size()]);
                reduced[idx] = acc.sum;
            }
            table = std::move(reduced);
            prefix_entropy[t] = entropy_bits(table);
        }
    }
    audit.chain.resize(n);
    Kahan chain_sum;
    for (std::size_t j = 0; j < n; ++j) {
        audit.chain[j] = prefix_entropy[j + 1] - prefix_entropy[j];
        chain_sum.add(audit.chain[j]);
    }
    audit.chain_violation = std::abs(chain_sum.sum - audit.h_joint);

    // single-coordinate marginals
    audit.marginals.resize(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> marg(R, 0.0);
        std::size_t low = 1;
        for (std::size_t c = 0; c < j; ++c) low *= R;
        for (std::size_t flat = 0; flat < table_size; ++flat) marg[(flat / low) % R] += joint[flat];
        audit.marginals[j] = entropy_bits(marg);
        audit.h_single = std::max(audit.h_single, audit.marginals[j]);
    }

    for (std::size_t j = 0; j < n && !audit.has_balanced_coordinate; ++j)
        for (std::size_t r = 0; r < rows; ++r)
            if (gen.get(r, j)) {
                audit.has_balanced_coordinate = true;
                break;
            }
    audit.entropy_slack =
        double(n) * (audit.h_single - (audit.capacity - audit.rate)) - audit.h_joint;
    if (audit.has_balanced_coordinate) audit.entropy_inequality_holds = audit.entropy_slack >= -1e-9;

    // exact local-decoding error per coordinate, zero codeword, ties as errors
    detail::check_noise_budget(ch.noise_alphabet().size(), unsigned(n));
    if (double(std::size_t{1} << rows) *
            std::pow(double(ch.noise_alphabet().size()), double(n)) >
        double(std::size_t{1} << 24))
        throw BudgetError("entropy_audit: local-decoding enumeration exceeds budget");
    std::vector<Kahan> loc(n);
    std::vector<ChannelUse> uses(n);
    for_each_noise(ch, unsigned(n), [&](double p, std::span<const NoiseState> z) {
        for (std::size_t j = 0; j < n; ++j) uses[j] = use_from_state(z[j], 0);
        for (std::size_t j = 0; j < n; ++j)
            if (exact_local_map(gen, j, uses) != BitGuess::Zero) loc[j].add(p);
    });
    audit.p_loc.resize(n);
    for (std::size_t j = 0; j < n; ++j) audit.p_loc[j] = loc[j].sum;
    return audit;
}

EntropyAudit entropy_audit(const RmCode& code, const SymmetricChannel& ch) {
    return entropy_audit(code.generator(), ch);
}

nlohmann::json EntropyAudit::to_json() const {
    return {{"n", n},
            {"h_joint", h_joint},
            {"chain", chain},
            {"marginals", marginals},
            {"h_single", h_single},
            {"capacity", capacity},
            {"rate", rate},
            {"chain_violation", chain_violation},
            {"has_balanced_coordinate", has_balanced_coordinate},
            {"entropy_inequality_holds", entropy_inequality_holds},
            {"entropy_slack", entropy_slack},
            {"p_loc", p_loc}};
}

}  // namespace camellia
