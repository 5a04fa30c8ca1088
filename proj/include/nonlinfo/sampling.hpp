#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nonlinfo/families.hpp"
#include "nonlinfo/optimize.hpp"

namespace nonlinfo {

enum class PolicyKind { PerSymbolUniform, PerBlockExtremes, PerBlockUniform, Drift, Fixed };

/// How the member generating each symbol is selected along a sample path.
/// Policies are admissible generators for a family-law source; none of them
/// is claimed to be canonical.
struct SelectionPolicy {
    PolicyKind kind = PolicyKind::PerBlockUniform;
    std::size_t block_len = 500;
    double period = 1000.0;
    double fixed_theta = 0.0;

    static SelectionPolicy per_symbol_uniform();
    static SelectionPolicy per_block_extremes(std::size_t block_len);
    static SelectionPolicy per_block_uniform(std::size_t block_len);
    static SelectionPolicy drift(double period);
    static SelectionPolicy fixed(double theta);
};

/// A generated path with its member-selection trace (interval kinds: the
/// parameter; enumerated kinds: the member index).
struct SamplePath {
    std::vector<std::uint8_t> symbols;
    std::vector<double> thetas;
};

SamplePath sample_source(const DistributionFamily& family, const SelectionPolicy& policy,
                         std::size_t length, std::uint64_t seed);

/// Block-wise max/min of block means over the first n_block * m_blocks
/// samples: (max_i mean(block i), min_i mean(block i)).
std::pair<double, double> max_mean_estimate(const std::vector<double>& samples,
                                            std::size_t n_block, std::size_t m_blocks);

struct WindowStats {
    std::size_t n_index = 0;   // 1-based end of the window
    double upper_mean = 0.0;
    double lower_mean = 0.0;
};

/// For every window end n in [window, len]: split the trailing `window`
/// samples into `count` sub-windows of `sub` samples; report the max and min
/// sub-window means.
std::vector<WindowStats> window_stats(const std::vector<double>& samples, std::size_t window = 5000,
                                      std::size_t sub = 500, std::size_t count = 10);

struct LlnReport {
    double b = 0.0;
    bool b_inside_interval = true;
    double lower_mean = 0.0;   // conjugate expectation of f
    double upper_mean = 0.0;   // sublinear expectation of f
    double min_abs_deviation = 0.0;
    std::size_t argmin_n = 0;
    double final_mean = 0.0;
    std::vector<std::pair<std::size_t, double>> trajectory;  // decimated (n, mean)
};

/// Greedy steering run: each step picks the candidate member (interval
/// endpoints, or every enumerated member) whose expected update moves the
/// running mean of f closest to the target b, then samples from it. Reports
/// the closest approach; for singleton families this is plain iid sampling.
LlnReport lln_experiment(const DistributionFamily& family, const std::vector<double>& f, double b,
                         std::size_t n_max, std::uint64_t seed, std::size_t trajectory_points = 200);

/// Two-sided exact binomial test p-value of the observed success count under
/// B(1, p): the total probability of outcomes no more likely than the one
/// observed.
double binomial_test_pvalue(std::size_t successes, std::size_t n, double p);

/// Fit confidence curve over a grid of Bernoulli parameters for binary
/// samples (success = symbol 1).
std::vector<std::pair<double, double>> bernoulli_fit_confidence(
    const std::vector<std::uint8_t>& samples, const std::vector<double>& p_grid);

}  // namespace nonlinfo
