#include "nonlinfo/coding.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "nonlinfo/rng.hpp"

namespace nonlinfo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t factorial_u64(int n) {
    static const auto table = [] {
        std::array<std::uint64_t, 21> t{};
        t[0] = 1;
        for (int i = 1; i <= 20; ++i) t[i] = t[i - 1] * static_cast<std::uint64_t>(i);
        return t;
    }();
    return table.at(static_cast<std::size_t>(n));
}

std::uint64_t multinomial_u64(int n, const std::vector<int>& counts) {
    std::uint64_t v = factorial_u64(n);
    for (int k : counts) v /= factorial_u64(k);
    return v;
}

// All compositions of n into m nonnegative parts, lexicographic order.
void for_each_type(int n, int m, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> counts(static_cast<std::size_t>(m), 0);
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == m - 1) {
            counts[static_cast<std::size_t>(pos)] = remaining;
            fn(counts);
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            counts[static_cast<std::size_t>(pos)] = k;
            rec(pos + 1, remaining - k);
        }
    };
    rec(0, n);
}

std::vector<double> singleton_upper_capacities(const DistributionFamily& family) {
    const std::size_t m = family.alphabet().size();
    std::vector<double> v(m);
    for (std::size_t x = 0; x < m; ++x) v[x] = capacity(family, {x}).upper;
    return v;
}

std::vector<double> log_loss_vector(const std::vector<double>& v) {
    std::vector<double> y(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) y[i] = v[i] > 0.0 ? -std::log2(v[i]) : 0.0;
    return y;
}

}  // namespace

double source_cluster_rate(const DistributionFamily& family) {
    auto v = singleton_upper_capacities(family);
    // V({x}) = 0 forces p(x) = 0 for every member, so the 0 log(1/0) = 0
    // convention removes the term.
    return conjugate_expectation(family, log_loss_vector(v));
}

SourceCode::SourceCode(std::size_t alphabet_size, int n, std::vector<std::vector<int>> coded_types)
    : m_(alphabet_size), n_(n), types_(std::move(coded_types)) {
    if (m_ == 0 || n_ < 1 || n_ > 20) throw std::invalid_argument("source code: bad dimensions");
    std::sort(types_.begin(), types_.end());
    type_sizes_.reserve(types_.size());
    for (const auto& t : types_) {
        if (t.size() != m_ || std::accumulate(t.begin(), t.end(), 0) != n_)
            throw std::invalid_argument("source code: malformed type");
        type_sizes_.push_back(multinomial_u64(n_, t));
    }
    type_offsets_.resize(types_.size());
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < types_.size(); ++i) {
        type_offsets_[i] = acc;
        acc += type_sizes_[i];
    }
    size_ = acc;
}

double SourceCode::rate_bits() const {
    return size_ > 0 ? std::log2(static_cast<double>(size_)) / n_ : 0.0;
}

std::vector<int> SourceCode::type_of(const std::vector<std::uint8_t>& seq) const {
    std::vector<int> counts(m_, 0);
    for (std::uint8_t s : seq) counts.at(s)++;
    return counts;
}

bool SourceCode::contains(const std::vector<std::uint8_t>& seq) const {
    if (seq.size() != static_cast<std::size_t>(n_)) return false;
    return std::binary_search(types_.begin(), types_.end(), type_of(seq));
}

std::uint64_t SourceCode::completions(const std::vector<int>& used) const {
    // Sequences in the coded set extending a prefix with per-symbol usage
    // `used`: sum over coded types dominating the prefix.
    int placed = std::accumulate(used.begin(), used.end(), 0);
    int remaining = n_ - placed;
    std::uint64_t total = 0;
    std::vector<int> need(m_);
    for (std::size_t t = 0; t < types_.size(); ++t) {
        bool ok = true;
        for (std::size_t s = 0; s < m_; ++s) {
            need[s] = types_[t][s] - used[s];
            if (need[s] < 0) {
                ok = false;
                break;
            }
        }
        if (ok) total += multinomial_u64(remaining, need);
    }
    return total;
}

std::uint64_t SourceCode::encode(const std::vector<std::uint8_t>& seq) const {
    if (!contains(seq)) return 0;
    std::vector<int> used(m_, 0);
    std::uint64_t rank = 0;
    for (int i = 0; i < n_; ++i) {
        std::uint8_t sym = seq[static_cast<std::size_t>(i)];
        for (std::uint8_t s = 0; s < sym; ++s) {
            used[s]++;
            rank += completions(used);
            used[s]--;
        }
        used[sym]++;
    }
    return rank;
}

std::vector<std::uint8_t> SourceCode::decode(std::uint64_t index) const {
    if (index >= size_) throw std::out_of_range("source code: index outside the coded set");
    std::vector<std::uint8_t> seq(static_cast<std::size_t>(n_), 0);
    std::vector<int> used(m_, 0);
    for (int i = 0; i < n_; ++i) {
        for (std::uint8_t s = 0;; ++s) {
            if (s >= m_) throw std::logic_error("source code: decode ran out of symbols");
            used[s]++;
            std::uint64_t cnt = completions(used);
            if (index < cnt) {
                seq[static_cast<std::size_t>(i)] = s;
                break;
            }
            index -= cnt;
            used[s]--;
        }
    }
    return seq;
}

namespace {

struct TypicalSets {
    std::vector<std::vector<int>> coded_types;
    std::uint64_t set_size = 0;
    double capacity_weight = 0.0;           // sum over the set of prod_i V({x_i})
    std::vector<double> member_set_prob;    // per theta-grid member P(set)
    double mu = 0.0;
};

TypicalSets build_typical_sets(const DistributionFamily& family, const SourceCodingParams& params,
                               const OptimizerConfig& config) {
    const std::size_t m = family.alphabet().size();
    const int n = params.n;
    if (n < 1 || n > 20) throw std::invalid_argument("source coding: n must be in [1, 20]");
    if (!(params.eps > 0.0)) throw std::invalid_argument("source coding: eps must be positive");
    if (std::pow(static_cast<double>(m), n) > 1e7)
        throw std::invalid_argument("source coding: enumeration too large");

    auto v_cap = singleton_upper_capacities(family);
    std::vector<double> log_v(m), y(m);
    for (std::size_t x = 0; x < m; ++x) {
        log_v[x] = v_cap[x] > 0.0 ? std::log2(v_cap[x]) : -kInf;
        y[x] = v_cap[x] > 0.0 ? -std::log2(v_cap[x]) : 0.0;
    }

    auto members = family.materialize(config.theta_grid);
    std::vector<std::vector<double>> log_p(members.size(), std::vector<double>(m));
    std::vector<double> member_entropy(members.size());
    for (std::size_t j = 0; j < members.size(); ++j) {
        for (std::size_t x = 0; x < m; ++x)
            log_p[j][x] = members[j].probs[x] > 0.0 ? std::log2(members[j].probs[x]) : -kInf;
        member_entropy[j] = members[j].entropy_bits();
    }

    TypicalSets out;
    out.member_set_prob.assign(members.size(), 0.0);
    out.mu = params.mu.value_or(conjugate_expectation(family, y));
    const double slack = 1e-12;

    for_each_type(n, static_cast<int>(m), [&](const std::vector<int>& counts) {
        bool in_set = false;
        double log_v_seq = 0.0;
        for (std::size_t x = 0; x < m; ++x)
            if (counts[x] > 0) log_v_seq += counts[x] * log_v[x];

        if (params.criterion == SourceCodingCriterion::Min) {
            if (std::isfinite(log_v_seq))
                in_set = std::abs(-log_v_seq / n - out.mu) <= params.eps + slack;
        } else {
            for (std::size_t j = 0; j < members.size() && !in_set; ++j) {
                double lp = 0.0;
                for (std::size_t x = 0; x < m; ++x)
                    if (counts[x] > 0) lp += counts[x] * log_p[j][x];
                if (std::isfinite(lp))
                    in_set = std::abs(-lp / n - member_entropy[j]) < params.eps + slack;
            }
        }
        if (!in_set) return;

        std::uint64_t mult = multinomial_u64(n, counts);
        out.coded_types.push_back(counts);
        out.set_size += mult;
        out.capacity_weight += static_cast<double>(mult) * std::exp2(log_v_seq);
        for (std::size_t j = 0; j < members.size(); ++j) {
            double lp = 0.0;
            for (std::size_t x = 0; x < m; ++x)
                if (counts[x] > 0) lp += counts[x] * log_p[j][x];
            out.member_set_prob[j] += static_cast<double>(mult) * std::exp2(lp);
        }
    });
    return out;
}

}  // namespace

CodingReport simulate_source_coding(const DistributionFamily& family,
                                    const SourceCodingParams& params,
                                    const OptimizerConfig& config) {
    config.validate();
    auto sets = build_typical_sets(family, params, config);

    CodingReport report;
    report.n = params.n;
    report.method = "enumeration";
    report.seed = params.seed;
    report.set_size = sets.set_size;
    report.mu = sets.mu;

    if (sets.set_size == 0) {
        report.empty_set = true;
        report.rate_bits = 0.0;
        report.min_error = report.max_error = 1.0;
        report.grid_min_error = report.grid_max_error = 1.0;
        return report;
    }

    report.rate_bits = std::log2(static_cast<double>(sets.set_size)) / params.n;
    double p_lo = 1.0, p_hi = 0.0;
    for (double p : sets.member_set_prob) {
        p_lo = std::min(p_lo, p);
        p_hi = std::max(p_hi, p);
    }
    report.grid_min_error = std::max(0.0, 1.0 - p_hi);
    report.grid_max_error = std::min(1.0, 1.0 - p_lo);
    if (params.criterion == SourceCodingCriterion::Min) {
        // Upper-capacity weight of the set (product factorization summed over
        // the set, clipped at 1): coincides with the set probability for
        // deterministic families and bounds every member's from above.
        report.min_error = std::max(0.0, 1.0 - std::min(1.0, sets.capacity_weight));
        report.max_error = report.grid_max_error;
    } else {
        report.min_error = report.grid_min_error;
        report.max_error = report.grid_max_error;
    }
    return report;
}

SourceCode build_source_code(const DistributionFamily& family, const SourceCodingParams& params,
                             const OptimizerConfig& config) {
    config.validate();
    auto sets = build_typical_sets(family, params, config);
    return SourceCode(family.alphabet().size(), params.n, std::move(sets.coded_types));
}

MeasureResult channel_rate_bound(const ChannelFamily& channel, const OptimizerConfig& config) {
    config.validate();
    auto sup = sup_over_channel(
        channel, [&](const Matrix& w) { return blahut_arimoto(w, config).capacity_bits; }, config,
        /*unimodal_hint=*/true);
    Matrix w = channel.kind() == ChannelKind::Enumerated ? channel.member(sup.member_index)
                                                         : channel.at_param(sup.param);
    auto ba = blahut_arimoto(w, config);
    MeasureResult result;
    result.value_bits = sup.value;
    if (channel.kind() == ChannelKind::Enumerated)
        result.witness["lambda_index"] = sup.member_index;
    else
        result.witness["lambda"] = sup.param;
    result.witness["input"] = ba.input;
    result.witness["ba_bracket"] = ba.bracket;
    result.witness["ba_converged"] = ba.converged;
    return result;
}

namespace {

struct DensityModel {
    // score[l][x][y] = log2(w_l(y|x) / q_l(y)) with q_l the output law of the
    // codebook input distribution; -inf where w is 0.
    std::vector<Matrix> score;
    // Fast path for binary symmetric members under a uniform input: the
    // density of a pair depends only on the match count.
    bool symmetric_binary = false;
    std::vector<double> by_matches;  // indexed by match count, 0..n

    double pair_density(const std::vector<std::uint8_t>& x, const std::vector<std::uint8_t>& y) const {
        if (symmetric_binary) {
            int mc = 0;
            for (std::size_t i = 0; i < x.size(); ++i) mc += (x[i] == y[i]);
            return by_matches[static_cast<std::size_t>(mc)];
        }
        double best = -kInf;
        for (const auto& s : score) {
            double acc = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                acc += s[x[i]][y[i]];
                if (!std::isfinite(acc)) break;
            }
            best = std::max(best, acc);
        }
        return best;
    }
};

DensityModel build_density_model(const std::vector<Matrix>& lambdas,
                                 const std::vector<double>& input, int n) {
    DensityModel model;
    const std::size_t nx = input.size();
    const std::size_t ny = lambdas.at(0)[0].size();
    model.score.reserve(lambdas.size());
    for (const auto& w : lambdas) {
        std::vector<double> q(ny, 0.0);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) q[y] += input[x] * w[x][y];
        Matrix s(nx, std::vector<double>(ny, -kInf));
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y)
                if (w[x][y] > 0.0 && q[y] > 0.0) s[x][y] = std::log2(w[x][y] / q[y]);
        model.score.push_back(std::move(s));
    }

    bool sym = nx == 2 && ny == 2 && std::abs(input[0] - 0.5) < 1e-9;
    for (const auto& w : lambdas)
        sym = sym && std::abs(w[0][0] - w[1][1]) < 1e-12 && std::abs(w[0][1] - w[1][0]) < 1e-12;
    model.symmetric_binary = sym;
    if (sym) {
        model.by_matches.assign(static_cast<std::size_t>(n) + 1, -kInf);
        for (int mc = 0; mc <= n; ++mc) {
            double best = -kInf;
            for (const auto& s : model.score) {
                double acc = mc * s[0][0] + (n - mc) * s[0][1];
                best = std::max(best, acc);
            }
            model.by_matches[static_cast<std::size_t>(mc)] = best;
        }
    }
    return model;
}

struct DecodeCounts {
    std::uint64_t wrong = 0;
    std::uint64_t miss = 0;
};

// Classify one received block against the codebook. Returns (error, miss).
std::pair<bool, bool> classify(const ChannelCode& code, const DensityModel& model,
                               const std::vector<std::uint8_t>& y, std::size_t sent,
                               EmptyDecodeRule on_empty) {
    std::size_t hit = code.message_count;
    int hits = 0;
    for (std::size_t j = 0; j < code.message_count && hits < 2; ++j) {
        if (model.pair_density(code.codebook[j], y) > code.threshold_bits) {
            hit = j;
            ++hits;
        }
    }
    if (hits >= 2) return {true, false};
    if (hits == 1) return {hit != sent, false};
    switch (on_empty) {
        case EmptyDecodeRule::Erasure:
            return {false, true};
        case EmptyDecodeRule::Error:
            return {true, true};
        case EmptyDecodeRule::FirstMessage:
            return {sent != 0, true};
    }
    return {true, true};
}

}  // namespace

CodingReport simulate_channel_coding(const ChannelFamily& channel,
                                     const ChannelCodingParams& params,
                                     const OptimizerConfig& config) {
    config.validate();
    const int n = params.n;
    const std::size_t M = params.message_count;
    if (M < 1) throw std::invalid_argument("channel coding: need at least one message");
    if (n < 1 || n > 16) throw std::invalid_argument("channel coding: n must be in [1, 16]");

    auto lambdas = channel.materialize(config.lambda_grid);
    auto bound = channel_rate_bound(channel, config);
    std::vector<double> input = bound.witness.at("input").get<std::vector<double>>();
    const std::size_t nx = channel.input().size();
    const std::size_t ny = channel.output().size();

    double space = std::pow(static_cast<double>(nx), n);
    if (static_cast<double>(M) > space)
        throw std::invalid_argument("channel coding: more messages than input sequences");

    ChannelCode code;
    code.message_count = M;
    code.block_length = n;
    code.threshold_bits = params.r_prime * n;
    CounterRng cb_rng(params.seed, 7);
    while (code.codebook.size() < M) {
        std::vector<std::uint8_t> word(static_cast<std::size_t>(n));
        for (auto& s : word)
            s = static_cast<std::uint8_t>(sample_index(input, cb_rng.next_double()));
        if (std::find(code.codebook.begin(), code.codebook.end(), word) == code.codebook.end())
            code.codebook.push_back(std::move(word));
    }

    auto model = build_density_model(lambdas, input, n);

    CodingReport report;
    report.rate_bits = std::log2(static_cast<double>(M)) / n;
    report.n = n;
    report.seed = params.seed;
    report.shards = config.shards;
    report.degenerate_threshold = params.r_prime >= bound.value_bits;

    bool enumerate = params.method == "enumeration" ||
                     (params.method == "auto" && std::pow(static_cast<double>(ny), n) <= 65536.0);
    const std::size_t L = lambdas.size();

    std::vector<double> err(L, 0.0), miss(L, 0.0);
    if (enumerate) {
        report.method = "enumeration";
        std::vector<std::uint8_t> y(static_cast<std::size_t>(n), 0);
        // Odometer over the output space; probabilities accumulated per
        // member and per transmitted message.
        while (true) {
            for (std::size_t s = 0; s < M; ++s) {
                auto [is_err, is_miss] = classify(code, model, y, s, params.on_empty);
                if (is_err || is_miss) {
                    for (std::size_t l = 0; l < L; ++l) {
                        double pr = 1.0;
                        for (int i = 0; i < n && pr > 0.0; ++i)
                            pr *= lambdas[l][code.codebook[s][static_cast<std::size_t>(i)]]
                                         [y[static_cast<std::size_t>(i)]];
                        if (pr <= 0.0) continue;
                        double w = pr / static_cast<double>(M);
                        if (is_err) err[l] += w;
                        if (is_miss) miss[l] += w;
                    }
                }
            }
            int pos = n - 1;
            while (pos >= 0 && y[static_cast<std::size_t>(pos)] == ny - 1)
                y[static_cast<std::size_t>(pos--)] = 0;
            if (pos < 0) break;
            y[static_cast<std::size_t>(pos)]++;
        }
    } else {
        report.method = "monte-carlo";
        if (params.trials < 100)
            throw std::invalid_argument("channel coding: fewer than 100 trials rejected");
        report.trials = params.trials;
        std::vector<std::uint64_t> err_n(L, 0), miss_n(L, 0);
        std::vector<double> u(static_cast<std::size_t>(n));
        std::vector<std::uint8_t> y(static_cast<std::size_t>(n));
        for (std::uint64_t t = 0; t < params.trials; ++t) {
            CounterRng rng(params.seed, 1000 + t);
            std::size_t s = static_cast<std::size_t>(rng.next_below(M));
            for (auto& ui : u) ui = rng.next_double();
            // Common random numbers across the member grid.
            for (std::size_t l = 0; l < L; ++l) {
                for (int i = 0; i < n; ++i)
                    y[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(sample_index(
                        lambdas[l][code.codebook[s][static_cast<std::size_t>(i)]],
                        u[static_cast<std::size_t>(i)]));
                auto [is_err, is_miss] = classify(code, model, y, s, params.on_empty);
                err_n[l] += is_err;
                miss_n[l] += is_miss;
            }
        }
        for (std::size_t l = 0; l < L; ++l) {
            err[l] = static_cast<double>(err_n[l]) / static_cast<double>(params.trials);
            miss[l] = static_cast<double>(miss_n[l]) / static_cast<double>(params.trials);
        }
    }

    report.min_error = *std::min_element(err.begin(), err.end());
    report.max_error = *std::max_element(err.begin(), err.end());
    report.miss_min = *std::min_element(miss.begin(), miss.end());
    report.miss_max = *std::max_element(miss.begin(), miss.end());
    if (report.method == "monte-carlo") {
        double p = report.min_error;
        report.mc_standard_error =
            std::sqrt(std::max(p * (1.0 - p), 1e-12) / static_cast<double>(params.trials));
    }
    return report;
}

std::vector<RdCurvePoint> rate_distortion_curve(const DistributionFamily& source,
                                                const Matrix& distortion,
                                                const std::vector<double>& d_grid,
                                                const OptimizerConfig& config) {
    config.validate();
    if (!std::is_sorted(d_grid.begin(), d_grid.end()))
        throw std::invalid_argument("rate_distortion_curve: D grid must be sorted ascending");
    std::vector<RdCurvePoint> out;
    out.reserve(d_grid.size());
    for (double d : d_grid) {
        auto mm = minimax_over_q(source, distortion, d, config);
        RdCurvePoint pt;
        pt.D = d;
        pt.feasible = mm.feasible;
        pt.min_achievable_distortion = mm.min_achievable_distortion;
        pt.value_bits = mm.feasible ? mm.value_bits : std::numeric_limits<double>::quiet_NaN();
        pt.mismatch_flagged = mm.mismatch_flagged;
        out.push_back(pt);
    }
    return out;
}

CodingReport simulate_rate_distortion(const DistributionFamily& source, const Matrix& distortion,
                                      const RateDistortionSimParams& params,
                                      const OptimizerConfig& config) {
    config.validate();
    const std::size_t m = source.alphabet().size();
    const int n = params.n;
    if (n < 1 || n > 14) throw std::invalid_argument("rate distortion sim: n must be in [1, 14]");
    double space = std::pow(static_cast<double>(m), n);
    if (space > 262144.0)
        throw std::invalid_argument("rate distortion sim: enumeration too large");

    auto mm = minimax_over_q(source, distortion, params.D, config);
    if (!mm.feasible)
        throw std::invalid_argument("rate distortion sim: infeasible D (minimum achievable " +
                                    std::to_string(mm.min_achievable_distortion) + ")");
    if (!(params.rate_bits > mm.value_bits))
        throw std::invalid_argument("rate distortion sim: rate must exceed the minimax value " +
                                    std::to_string(mm.value_bits));
    const Matrix& q_star = mm.q_star;
    const std::size_t nm = q_star[0].size();
    double r_prime = params.r_prime.value_or(0.5 * (mm.value_bits + params.rate_bits));

    auto members = source.materialize(config.theta_grid);
    // Reference expected distortion: worst case over the family under Q*.
    double d_ref = 0.0;
    std::size_t witness = 0;
    double witness_mi = -1.0;
    for (std::size_t j = 0; j < members.size(); ++j) {
        double ed = 0.0;
        for (std::size_t x = 0; x < m; ++x)
            for (std::size_t w = 0; w < nm; ++w)
                ed += members[j].probs[x] * q_star[x][w] * distortion[x][w];
        d_ref = std::max(d_ref, ed);
        double mi = mutual_information_bits(members[j].probs, q_star);
        if (mi > witness_mi) {
            witness_mi = mi;
            witness = j;
        }
    }
    // Output marginal of Q* under the witness member.
    std::vector<double> marginal(nm, 0.0);
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t w = 0; w < nm; ++w) marginal[w] += members[witness].probs[x] * q_star[x][w];

    std::uint64_t words = static_cast<std::uint64_t>(
        std::llround(std::max(1.0, std::exp2(params.rate_bits * n))));
    if (words > (1u << 20)) throw std::invalid_argument("rate distortion sim: codebook too large");
    CounterRng rng(params.seed, 11);
    std::vector<std::vector<std::uint8_t>> codebook(words);
    for (auto& w : codebook) {
        w.resize(static_cast<std::size_t>(n));
        for (auto& s : w) s = static_cast<std::uint8_t>(sample_index(marginal, rng.next_double()));
    }

    // inf over the member grid of the pair information density splits into a
    // per-pair term and a per-codeword term: sum_i log2 q*(w_i|x_i) minus
    // max_j sum_i log2 marg_j(w_i).
    std::vector<std::vector<double>> log_marg(members.size(), std::vector<double>(nm));
    for (std::size_t j = 0; j < members.size(); ++j) {
        std::vector<double> mj(nm, 0.0);
        for (std::size_t x = 0; x < m; ++x)
            for (std::size_t w = 0; w < nm; ++w) mj[w] += members[j].probs[x] * q_star[x][w];
        for (std::size_t w = 0; w < nm; ++w)
            log_marg[j][w] = mj[w] > 0.0 ? std::log2(mj[w]) : -kInf;
    }
    std::vector<double> word_marg_max(words);
    for (std::uint64_t w = 0; w < words; ++w) {
        double best = -kInf;
        for (std::size_t j = 0; j < members.size(); ++j) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += log_marg[j][codebook[w][static_cast<std::size_t>(i)]];
            best = std::max(best, acc);
        }
        word_marg_max[w] = best;
    }

    Matrix log_q(m, std::vector<double>(nm));
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t w = 0; w < nm; ++w)
            log_q[x][w] = q_star[x][w] > 0.0 ? std::log2(q_star[x][w]) : -kInf;

    auto v_cap = singleton_upper_capacities(source);
    std::vector<double> y_loss = log_loss_vector(v_cap);
    double mu = conjugate_expectation(source, y_loss);

    // Walk the whole source space; record each word's achieved distortion and
    // whether it fell back to index 0.
    const std::uint64_t total = static_cast<std::uint64_t>(space);
    std::vector<double> ed(members.size(), 0.0), fallback_weight(members.size(), 0.0);
    std::vector<std::uint8_t> x(static_cast<std::size_t>(n), 0);
    const double threshold = r_prime * n;
    for (std::uint64_t it = 0;; ++it) {
        double loss = 0.0;
        for (int i = 0; i < n; ++i) loss += y_loss[x[static_cast<std::size_t>(i)]];
        bool typical = std::abs(loss / n - mu) <= params.typicality_eps + 1e-12;

        std::int64_t chosen = -1;
        double chosen_dist = std::numeric_limits<double>::infinity();
        if (typical) {
            for (std::uint64_t w = 0; w < words; ++w) {
                double dist = 0.0, lq = 0.0;
                for (int i = 0; i < n; ++i) {
                    std::size_t xi = x[static_cast<std::size_t>(i)];
                    std::size_t wi = codebook[w][static_cast<std::size_t>(i)];
                    dist += distortion[xi][wi];
                    lq += log_q[xi][wi];
                }
                dist /= n;
                if (std::abs(dist - d_ref) >= params.distortion_band) continue;
                double density = lq - word_marg_max[w];  // inf over the member grid
                if (density >= threshold) continue;
                if (params.selection == RdSelection::SmallestIndex) {
                    chosen = static_cast<std::int64_t>(w);
                    break;
                }
                if (dist < chosen_dist) {
                    chosen_dist = dist;
                    chosen = static_cast<std::int64_t>(w);
                }
            }
        }
        bool fell_back = chosen < 0;
        if (fell_back) chosen = 0;
        double dist = 0.0;
        for (int i = 0; i < n; ++i)
            dist += distortion[x[static_cast<std::size_t>(i)]]
                              [codebook[static_cast<std::size_t>(chosen)][static_cast<std::size_t>(i)]];
        dist /= n;

        for (std::size_t j = 0; j < members.size(); ++j) {
            double pr = 1.0;
            for (int i = 0; i < n && pr > 0.0; ++i)
                pr *= members[j].probs[x[static_cast<std::size_t>(i)]];
            if (pr <= 0.0) continue;
            ed[j] += pr * dist;
            if (fell_back) fallback_weight[j] += pr;
        }

        if (it + 1 == total) break;
        int pos = n - 1;
        while (pos >= 0 && x[static_cast<std::size_t>(pos)] == m - 1)
            x[static_cast<std::size_t>(pos--)] = 0;
        x[static_cast<std::size_t>(pos)]++;
    }

    CodingReport report;
    report.rate_bits = std::log2(static_cast<double>(words)) / n;
    report.n = n;
    report.seed = params.seed;
    report.method = "enumeration";
    report.mu = mu;
    report.distortion_min = *std::min_element(ed.begin(), ed.end());
    report.distortion_max = *std::max_element(ed.begin(), ed.end());
    report.min_error = *std::min_element(fallback_weight.begin(), fallback_weight.end());
    report.max_error = *std::max_element(fallback_weight.begin(), fallback_weight.end());
    return report;
}

}  // namespace nonlinfo
