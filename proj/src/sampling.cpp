#include "nonlinfo/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nonlinfo/rng.hpp"

namespace nonlinfo {

SelectionPolicy SelectionPolicy::per_symbol_uniform() {
    SelectionPolicy p;
    p.kind = PolicyKind::PerSymbolUniform;
    return p;
}

SelectionPolicy SelectionPolicy::per_block_extremes(std::size_t block_len) {
    if (block_len < 1) throw std::invalid_argument("policy: block_len must be >= 1");
    SelectionPolicy p;
    p.kind = PolicyKind::PerBlockExtremes;
    p.block_len = block_len;
    return p;
}

SelectionPolicy SelectionPolicy::per_block_uniform(std::size_t block_len) {
    if (block_len < 1) throw std::invalid_argument("policy: block_len must be >= 1");
    SelectionPolicy p;
    p.kind = PolicyKind::PerBlockUniform;
    p.block_len = block_len;
    return p;
}

SelectionPolicy SelectionPolicy::drift(double period) {
    if (!(period > 0.0)) throw std::invalid_argument("policy: period must be positive");
    SelectionPolicy p;
    p.kind = PolicyKind::Drift;
    p.period = period;
    return p;
}

SelectionPolicy SelectionPolicy::fixed(double theta) {
    SelectionPolicy p;
    p.kind = PolicyKind::Fixed;
    p.fixed_theta = theta;
    return p;
}

namespace {

struct ParamSpace {
    bool continuous = false;
    double lo = 0.0, hi = 0.0;          // continuous parameter range
    std::size_t members = 0;            // enumerated member count

    double clamp_check(double theta) const {
        if (continuous) {
            if (theta < lo - 1e-12 || theta > hi + 1e-12)
                throw std::invalid_argument("policy: fixed theta outside the family");
            return std::clamp(theta, lo, hi);
        }
        auto idx = static_cast<std::size_t>(theta);
        if (theta < 0 || idx >= members)
            throw std::invalid_argument("policy: fixed member index outside the family");
        return static_cast<double>(idx);
    }
};

ParamSpace param_space(const DistributionFamily& family) {
    ParamSpace ps;
    if (family.kind() == FamilyKind::IntervalBernoulli) {
        ps.continuous = true;
        ps.lo = family.q_lo();
        ps.hi = family.q_hi();
    } else if (family.kind() == FamilyKind::Enumerated || family.kind() == FamilyKind::Grid) {
        ps.members = family.member_count();
    } else {
        throw std::invalid_argument("sampling: box credal sets have no sampling parameterization");
    }
    return ps;
}

double select_theta(const ParamSpace& ps, const SelectionPolicy& policy, std::size_t i,
                    CounterRng& rng) {
    auto uniform = [&](double u) {
        if (ps.continuous) return ps.lo + u * (ps.hi - ps.lo);
        return std::floor(u * static_cast<double>(ps.members));
    };
    switch (policy.kind) {
        case PolicyKind::PerSymbolUniform:
            return uniform(rng.next_double());
        case PolicyKind::PerBlockUniform: {
            // One choice per block: a dedicated counter stream keyed by the
            // block index keeps the draw independent of the symbol stream.
            std::size_t block = i / policy.block_len;
            CounterRng block_rng(rng.key, 0x5eed0000 + block);
            return uniform(block_rng.next_double());
        }
        case PolicyKind::PerBlockExtremes: {
            std::size_t block = i / policy.block_len;
            bool low = (block % 2) == 0;
            if (ps.continuous) return low ? ps.lo : ps.hi;
            return low ? 0.0 : static_cast<double>(ps.members - 1);
        }
        case PolicyKind::Drift: {
            double phase = std::sin(2.0 * M_PI * static_cast<double>(i) / policy.period);
            double u = 0.5 * (1.0 + phase);
            if (ps.continuous) return ps.lo + u * (ps.hi - ps.lo);
            return std::floor(std::min(u, 0.999999) * static_cast<double>(ps.members));
        }
        case PolicyKind::Fixed:
            return policy.fixed_theta;
    }
    return ps.lo;
}

std::vector<double> member_probs(const DistributionFamily& family, const ParamSpace& ps,
                                 double theta) {
    if (ps.continuous) return family.at_param(theta).probs;
    return family.member(static_cast<std::size_t>(theta)).probs;
}

}  // namespace

SamplePath sample_source(const DistributionFamily& family, const SelectionPolicy& policy,
                         std::size_t length, std::uint64_t seed) {
    if (length < 1) throw std::invalid_argument("sample_source: length must be >= 1");
    ParamSpace ps = param_space(family);
    if (policy.kind == PolicyKind::Fixed) ps.clamp_check(policy.fixed_theta);

    SamplePath path;
    path.symbols.reserve(length);
    path.thetas.reserve(length);
    CounterRng rng(seed, 1);
    for (std::size_t i = 0; i < length; ++i) {
        double theta = select_theta(ps, policy, i, rng);
        if (policy.kind == PolicyKind::Fixed) theta = ps.clamp_check(theta);
        auto probs = member_probs(family, ps, theta);
        path.thetas.push_back(theta);
        path.symbols.push_back(static_cast<std::uint8_t>(sample_index(probs, rng.next_double())));
    }
    return path;
}

std::pair<double, double> max_mean_estimate(const std::vector<double>& samples,
                                            std::size_t n_block, std::size_t m_blocks) {
    if (n_block < 1 || m_blocks < 1)
        throw std::invalid_argument("max_mean_estimate: block sizes must be >= 1");
    if (samples.size() < n_block * m_blocks)
        throw std::invalid_argument("max_mean_estimate: not enough samples");
    double upper = -std::numeric_limits<double>::infinity();
    double lower = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m_blocks; ++i) {
        double mean = std::accumulate(samples.begin() + static_cast<std::ptrdiff_t>(i * n_block),
                                      samples.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_block),
                                      0.0) /
                      static_cast<double>(n_block);
        upper = std::max(upper, mean);
        lower = std::min(lower, mean);
    }
    return {upper, lower};
}

std::vector<WindowStats> window_stats(const std::vector<double>& samples, std::size_t window,
                                      std::size_t sub, std::size_t count) {
    if (sub * count != window)
        throw std::invalid_argument("window_stats: window must equal sub * count");
    if (samples.size() < window) throw std::invalid_argument("window_stats: not enough samples");
    std::vector<double> prefix(samples.size() + 1, 0.0);
    for (std::size_t i = 0; i < samples.size(); ++i) prefix[i + 1] = prefix[i] + samples[i];

    std::vector<WindowStats> out;
    out.reserve(samples.size() - window + 1);
    for (std::size_t n = window; n <= samples.size(); ++n) {
        WindowStats ws;
        ws.n_index = n;
        ws.upper_mean = -std::numeric_limits<double>::infinity();
        ws.lower_mean = std::numeric_limits<double>::infinity();
        std::size_t start = n - window;
        for (std::size_t i = 0; i < count; ++i) {
            double mean = (prefix[start + (i + 1) * sub] - prefix[start + i * sub]) /
                          static_cast<double>(sub);
            ws.upper_mean = std::max(ws.upper_mean, mean);
            ws.lower_mean = std::min(ws.lower_mean, mean);
        }
        out.push_back(ws);
    }
    return out;
}

LlnReport lln_experiment(const DistributionFamily& family, const std::vector<double>& f, double b,
                         std::size_t n_max, std::uint64_t seed, std::size_t trajectory_points) {
    if (f.size() != family.alphabet().size())
        throw std::invalid_argument("lln_experiment: f does not match the alphabet");
    if (n_max < 1) throw std::invalid_argument("lln_experiment: n_max must be >= 1");

    LlnReport report;
    report.b = b;
    report.lower_mean = conjugate_expectation(family, f);
    report.upper_mean = sublinear_expectation(family, f);
    report.b_inside_interval =
        b >= report.lower_mean - 1e-12 && b <= report.upper_mean + 1e-12;

    // Steering candidates: interval endpoints or every enumerated member.
    std::vector<std::vector<double>> candidates;
    if (family.kind() == FamilyKind::IntervalBernoulli) {
        candidates.push_back(family.at_param(family.q_lo()).probs);
        if (family.q_hi() > family.q_lo()) candidates.push_back(family.at_param(family.q_hi()).probs);
    } else {
        for (const auto& m : family.materialize(2)) candidates.push_back(m.probs);
    }
    std::vector<double> expected(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c)
        expected[c] = std::inner_product(candidates[c].begin(), candidates[c].end(), f.begin(), 0.0);

    CounterRng rng(seed, 2);
    double sum = 0.0;
    report.min_abs_deviation = std::numeric_limits<double>::infinity();
    std::size_t stride = std::max<std::size_t>(1, n_max / std::max<std::size_t>(1, trajectory_points));
    for (std::size_t i = 0; i < n_max; ++i) {
        std::size_t best = 0;
        double best_dev = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            double dev = std::abs((sum + expected[c]) / static_cast<double>(i + 1) - b);
            if (dev < best_dev) {
                best_dev = dev;
                best = c;
            }
        }
        std::size_t sym = sample_index(candidates[best], rng.next_double());
        sum += f[sym];
        double mean = sum / static_cast<double>(i + 1);
        double dev = std::abs(mean - b);
        if (dev < report.min_abs_deviation) {
            report.min_abs_deviation = dev;
            report.argmin_n = i + 1;
        }
        if ((i + 1) % stride == 0 || i + 1 == n_max)
            report.trajectory.emplace_back(i + 1, mean);
        report.final_mean = mean;
    }
    return report;
}

double binomial_test_pvalue(std::size_t successes, std::size_t n, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("binomial test: p must be in (0, 1)");
    if (successes > n) throw std::invalid_argument("binomial test: successes exceed n");
    auto log_pmf = [&](std::size_t k) {
        double lk = std::lgamma(static_cast<double>(n) + 1.0) -
                    std::lgamma(static_cast<double>(k) + 1.0) -
                    std::lgamma(static_cast<double>(n - k) + 1.0) +
                    static_cast<double>(k) * std::log(p) +
                    static_cast<double>(n - k) * std::log1p(-p);
        return lk;
    };
    double observed = log_pmf(successes);
    double pvalue = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        double lk = log_pmf(k);
        if (lk <= observed + 1e-12) pvalue += std::exp(lk);
    }
    return std::min(pvalue, 1.0);
}

std::vector<std::pair<double, double>> bernoulli_fit_confidence(
    const std::vector<std::uint8_t>& samples, const std::vector<double>& p_grid) {
    if (samples.empty()) throw std::invalid_argument("fit confidence: empty sample");
    std::size_t successes = 0;
    for (std::uint8_t s : samples) {
        if (s > 1) throw std::invalid_argument("fit confidence: samples must be binary");
        successes += s;
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(p_grid.size());
    for (double p : p_grid) out.emplace_back(p, binomial_test_pvalue(successes, samples.size(), p));
    return out;
}

}  // namespace nonlinfo
