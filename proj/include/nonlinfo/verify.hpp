#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "nonlinfo/families.hpp"
#include "nonlinfo/optimize.hpp"
#include "nonlinfo/rng.hpp"

namespace nonlinfo {

struct SuiteResult {
    std::string name;
    int cases = 0;
    int violations = 0;
    double worst_violation = 0.0;              // most negative slack seen
    std::vector<nlohmann::json> failing_cases; // serialized inputs for replay

    bool passed() const { return violations == 0; }
};

/// Random enumerated families: alphabet sizes 2..5, member counts 1..4,
/// members drawn uniformly from the simplex.
DistributionFamily random_family(CounterRng& rng, std::size_t min_members = 1,
                                 std::size_t max_members = 4, std::size_t min_symbols = 2,
                                 std::size_t max_symbols = 5);
ChannelFamily random_channel(CounterRng& rng, const Alphabet& input, std::size_t output_size,
                             std::size_t min_members = 1, std::size_t max_members = 4);

// Inequality suites for the family-sup information measures, each checked on
// `cases` random enumerated constructions with exhaustive sup/inf evaluation.
SuiteResult verify_joint_entropy_bound(int cases, std::uint64_t seed, double tol = 1e-9);
SuiteResult verify_mutual_information_lower_bound(int cases, std::uint64_t seed, double tol = 1e-9);
SuiteResult verify_entropy_chain_rule(int cases, std::uint64_t seed, double tol = 1e-9);
SuiteResult verify_mutual_information_chain_rule(int cases, std::uint64_t seed, double tol = 1e-9);
SuiteResult verify_fano_inequality(int cases, std::uint64_t seed, double tol = 1e-9);
SuiteResult verify_data_processing(int cases, std::uint64_t seed, double tol = 1e-9);

/// All six theorem suites, `cases` each.
std::vector<SuiteResult> verify_theorems(int cases, std::uint64_t seed, double tol = 1e-9);

/// Singleton families reproduce the classical quantities: entropy, joint and
/// conditional entropy, mutual information, capacity bound, cluster rate.
SuiteResult verify_degeneration(int cases, std::uint64_t seed, double tol = 1e-9);

/// Ordering: cluster rate <= inf_theta H(p_theta) <= nonlinear entropy.
SuiteResult verify_coding_ordering(int cases, std::uint64_t seed, double tol = 1e-9);

nlohmann::json suite_to_json(const SuiteResult& r);

}  // namespace nonlinfo
