#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nonlinfo/families.hpp"
#include "nonlinfo/measures.hpp"
#include "nonlinfo/optimize.hpp"

namespace nonlinfo {

/// Fixed-length typical-set source code: the coded set is a union of type
/// classes, indexed lexicographically. encode() maps a coded sequence to its
/// rank in [0, index_set_size); sequences outside the coded set map to 0.
/// decode(encode(x)) == x for every coded x.
class SourceCode {
  public:
    SourceCode(std::size_t alphabet_size, int n, std::vector<std::vector<int>> coded_types);

    int block_length() const { return n_; }
    std::uint64_t index_set_size() const { return size_; }
    double rate_bits() const;
    bool contains(const std::vector<std::uint8_t>& seq) const;
    std::uint64_t encode(const std::vector<std::uint8_t>& seq) const;
    std::vector<std::uint8_t> decode(std::uint64_t index) const;

  private:
    std::vector<int> type_of(const std::vector<std::uint8_t>& seq) const;
    // Number of sequences with per-symbol counts still available.
    std::uint64_t completions(const std::vector<int>& remaining) const;

    std::size_t m_ = 0;
    int n_ = 0;
    std::vector<std::vector<int>> types_;       // sorted lexicographically
    std::vector<std::uint64_t> type_sizes_;     // multinomial coefficients
    std::vector<std::uint64_t> type_offsets_;   // cumulative ranks
    std::uint64_t size_ = 0;
};

/// Random-codebook channel code with the threshold-set decoder.
struct ChannelCode {
    std::size_t message_count = 0;
    int block_length = 0;
    std::vector<std::vector<std::uint8_t>> codebook;
    double threshold_bits = 0.0;  // n * R'
};

/// Outcome record of a coding simulation. max_error/min_error are the
/// sup/inf over the evaluation grid of the run's error criterion; companion
/// fields carry the remaining diagnostics of each simulator.
struct CodingReport {
    double rate_bits = 0.0;
    double max_error = 1.0;
    double min_error = 1.0;
    int n = 0;
    std::string method;  // "enumeration" or "monte-carlo"
    std::uint64_t seed = 0;

    // Source-coding extras.
    std::uint64_t set_size = 0;
    bool empty_set = false;
    double mu = std::numeric_limits<double>::quiet_NaN();
    // Fixed-member (grid) evaluation of the miss probability, reported next
    // to the capacity-weight accounting that min_error uses under the min
    // criterion (see simulate_source_coding).
    double grid_min_error = std::numeric_limits<double>::quiet_NaN();
    double grid_max_error = std::numeric_limits<double>::quiet_NaN();

    // Channel-coding extras.
    std::uint64_t trials = 0;
    double mc_standard_error = 0.0;
    double miss_min = std::numeric_limits<double>::quiet_NaN();  // no-candidate rate
    double miss_max = std::numeric_limits<double>::quiet_NaN();
    bool degenerate_threshold = false;  // R' >= C-bar warning
    std::size_t shards = 1;

    // Rate-distortion extras: achieved expected distortion across the grid.
    double distortion_min = std::numeric_limits<double>::quiet_NaN();
    double distortion_max = std::numeric_limits<double>::quiet_NaN();
};

/// inf over the family of sum_x p(x) log2(1 / V({x})) with V the upper
/// capacity of the singleton event. Exact for enumerated and interval kinds
/// (the objective is linear in the member).
double source_cluster_rate(const DistributionFamily& family);

enum class SourceCodingCriterion { Min, Max };

struct SourceCodingParams {
    int n = 12;
    double eps = 0.05;
    SourceCodingCriterion criterion = SourceCodingCriterion::Min;
    /// Center of the typical band (min criterion). Defaults to the lower
    /// endpoint E[log2 1/V(X)] of the admissible interval, the
    /// rate-minimizing end; any value in the interval is accepted.
    std::optional<double> mu;
    std::uint64_t seed = 0;
};

/// Typical-set source-coding run by exact type-class enumeration.
///
/// criterion = Min: codes the band {x^n : |-log2 V(x^n)/n - mu| <= eps} with
/// V(x^n) = prod_i V({x_i}). min_error is 1 minus the capacity weight of the
/// set (sum of V(x^n) over the set, clipped at 1; exact probability for
/// singleton families). grid_min_error/grid_max_error report the fixed-member
/// evaluation inf/sup over the theta grid, and max_error mirrors
/// grid_max_error.
///
/// criterion = Max: codes the union over the theta grid of the per-member
/// entropy-typical sets; errors are the fixed-member sup/inf of the miss
/// probability.
CodingReport simulate_source_coding(const DistributionFamily& family,
                                    const SourceCodingParams& params,
                                    const OptimizerConfig& config = {});

/// The coded set built by simulate_source_coding, as an indexable code.
SourceCode build_source_code(const DistributionFamily& family, const SourceCodingParams& params,
                             const OptimizerConfig& config = {});

/// C-bar: sup over the channel family of the Blahut-Arimoto capacity.
/// Witness carries the achieving parameter/member and input distribution.
MeasureResult channel_rate_bound(const ChannelFamily& channel, const OptimizerConfig& config = {});

/// What the decoder reports when the candidate set is empty. Multiple
/// candidates are always an error. The decode-failure rate is reported
/// separately (miss_min/miss_max) so the two failure modes stay visible.
enum class EmptyDecodeRule { Erasure, Error, FirstMessage };

struct ChannelCodingParams {
    std::size_t message_count = 2;
    int n = 10;
    double r_prime = 0.3;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    EmptyDecodeRule on_empty = EmptyDecodeRule::Erasure;
    std::string method = "auto";  // auto | enumeration | monte-carlo
};

/// Random-codebook run with the threshold-set decoder: candidate set
/// {codeword : max over the channel grid of the information density vs the
/// codebook input marginal > n R'}; a unique candidate decodes, several are
/// an error. Error rates are evaluated under every channel-grid member and
/// reported as the sup/inf; max_error/min_error count wrong decodes (plus
/// decode failures under EmptyDecodeRule::Error).
CodingReport simulate_channel_coding(const ChannelFamily& channel,
                                     const ChannelCodingParams& params,
                                     const OptimizerConfig& config = {});

struct RdCurvePoint {
    double D = 0.0;
    double value_bits = 0.0;
    bool feasible = true;
    double min_achievable_distortion = 0.0;
    bool mismatch_flagged = false;
};

/// Pointwise minimax rate-distortion over a sorted D grid.
std::vector<RdCurvePoint> rate_distortion_curve(const DistributionFamily& source,
                                                const Matrix& distortion,
                                                const std::vector<double>& d_grid,
                                                const OptimizerConfig& config = {});

/// How the encoder picks among candidate reproduction words:
///   SmallestIndex  first qualifying codeword (the construction's rule)
///   MinDistortion  distortion-minimizing qualifying codeword (quantizer
///                  behavior; any selection within the candidate set yields a
///                  valid code, this one the best distortion at short blocks)
enum class RdSelection { SmallestIndex, MinDistortion };

struct RateDistortionSimParams {
    double D = 0.1;
    double rate_bits = 0.6;  // R_s, must exceed the minimax value at D
    int n = 12;
    std::uint64_t seed = 0;
    /// Half-width of the distortion acceptance band around the reference
    /// expected distortion.
    double distortion_band = 0.05;
    /// Typicality half-width for the input set.
    double typicality_eps = 0.25;
    /// Information-density threshold R'; defaults midway between the
    /// minimax value and rate_bits.
    std::optional<double> r_prime;
    RdSelection selection = RdSelection::SmallestIndex;
};

/// Random reproduction codebook drawn from the optimal test channel's output
/// marginal; each source word encodes to the smallest-index codeword passing
/// the density threshold, the distortion band, and input typicality, falling
/// back to index 0. Exact per-member expected distortion over the theta grid
/// is reported (distortion_min/distortion_max); max_error/min_error mirror
/// the fraction of source weight that hit the fallback.
CodingReport simulate_rate_distortion(const DistributionFamily& source, const Matrix& distortion,
                                      const RateDistortionSimParams& params,
                                      const OptimizerConfig& config = {});

}  // namespace nonlinfo
