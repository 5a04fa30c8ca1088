#pragma once

#include <cstdint>
#include <functional>
#include <limits>

#include "nonlinfo/families.hpp"

namespace nonlinfo {

struct OptimizerConfig {
    std::size_t grid_points = 2001;  // uniform grid for one-parameter sups
    double refine_tol = 1e-10;       // golden-section x tolerance
    double ba_tol = 1e-9;            // Blahut-Arimoto capacity bracket
    int ba_max_iter = 10000;
    std::uint64_t seed = 0;
    std::size_t theta_grid = 101;    // source-family grid in error estimates
    std::size_t lambda_grid = 101;   // channel-family grid in error estimates
    std::size_t shards = 8;          // Monte-Carlo shard layout (fixed, recorded)

    void validate() const;
};

/// Golden-section search for the maximum of a unimodal function on [a, b].
/// Returns (x*, f(x*)) with |x* - argmax| <= tol for unimodal f; for other f
/// it degrades to a local optimum.
std::pair<double, double> golden_section(const std::function<double(double)>& f, double a,
                                         double b, double tol);

struct FamilySupResult {
    double value = -std::numeric_limits<double>::infinity();
    double param = std::numeric_limits<double>::quiet_NaN();  // interval kinds
    std::size_t member_index = static_cast<std::size_t>(-1);  // enumerated kinds
    double grid_resolution = 0.0;  // parameter spacing when no refinement ran
    bool refined = false;
};

/// sup of `objective` over the family: exact max for enumerated kinds; grid
/// plus golden-section refinement around the best grid point for interval
/// kinds when `unimodal_hint` is set, best grid point otherwise.
FamilySupResult sup_over_family(const DistributionFamily& family,
                                const std::function<double(const FiniteDistribution&)>& objective,
                                const OptimizerConfig& config = {}, bool unimodal_hint = false);

/// Same search over a channel family's parameter/member set.
FamilySupResult sup_over_channel(const ChannelFamily& channel,
                                 const std::function<double(const Matrix&)>& objective,
                                 const OptimizerConfig& config = {}, bool unimodal_hint = false);

struct BlahutResult {
    double capacity_bits = 0.0;
    std::vector<double> input;  // achieving input distribution
    double bracket = 0.0;       // final upper - lower capacity bound
    int iterations = 0;
    bool converged = false;
};

/// Channel capacity of a fixed row-stochastic matrix by Blahut-Arimoto with
/// the standard certified bracket: at input p, I(p) <= C <= max_x D(W_x||q).
/// Stops when the bracket is <= config.ba_tol. A non-converged run (iteration
/// cap) is returned with converged = false and the last bracket.
BlahutResult blahut_arimoto(const Matrix& channel, const OptimizerConfig& config = {});

/// Classical rate-distortion function R(D) of a single source, in bits, via
/// the parametric Blahut algorithm with slope bisection. Also returns the
/// achieving test channel when q_out is non-null.
double classical_rate_distortion(const std::vector<double>& p, const Matrix& distortion, double D,
                                 Matrix* q_out = nullptr, const OptimizerConfig& config = {});

struct MinimaxResult {
    bool feasible = true;
    double min_achievable_distortion = 0.0;  // max-over-family expected distortion floor
    double value_bits = 0.0;
    Matrix q_star;
    double alternating_value = 0.0;  // fast-path solution
    double oracle_value = std::numeric_limits<double>::quiet_NaN();  // dense-grid check (2x2)
    bool oracle_used = false;
    bool mismatch_flagged = false;   // |alternating - oracle| > 1e-4
};

/// inf over row-stochastic Q with sup-over-family expected distortion <= D of
/// sup-over-family I(p_theta; Q).
///
/// Fast path: per-member classical R(D) solutions and an alternating
/// witness/update loop, polished by feasible pattern search. For binary
/// sources a dense Q-grid (step 1/400 per free parameter) plus the same
/// polish acts as the authoritative check; a gap above 1e-4 sets
/// mismatch_flagged.
MinimaxResult minimax_over_q(const DistributionFamily& source, const Matrix& distortion, double D,
                             const OptimizerConfig& config = {});

}  // namespace nonlinfo
