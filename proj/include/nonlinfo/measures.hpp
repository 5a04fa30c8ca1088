#pragma once

#include <json.hpp>

#include "nonlinfo/families.hpp"
#include "nonlinfo/optimize.hpp"

namespace nonlinfo {

/// Value of a family-sup information measure, in bits, with the parameter(s)
/// attaining it. Re-evaluating the objective at the witness reproduces the
/// value within `tolerance`.
struct MeasureResult {
    double value_bits = 0.0;
    nlohmann::json witness;
    double tolerance = 1e-9;
};

/// sup over the family of the Shannon entropy, in bits.
MeasureResult nonlinear_entropy(const DistributionFamily& family, const OptimizerConfig& config = {});

/// sup over (source member, channel member) of the classical joint entropy of
/// the pair (X, Y) with joint law p(x) w(y|x).
MeasureResult nonlinear_joint_entropy(const DistributionFamily& source,
                                      const ChannelFamily& channel,
                                      const OptimizerConfig& config = {});

/// sup_theta sum_x p_theta(x) * [sup_lambda H(w_lambda(.|x))]. The inner sup
/// is taken per input symbol, before the outer sup: the channel witness may
/// differ across x.
MeasureResult nonlinear_conditional_entropy(const DistributionFamily& source,
                                            const ChannelFamily& channel,
                                            const OptimizerConfig& config = {});

/// sup over (source member, channel member) of classical mutual information.
MeasureResult nonlinear_mutual_information(const DistributionFamily& source,
                                           const ChannelFamily& channel,
                                           const OptimizerConfig& config = {});

/// Conditional channel collection for I[X;Y|Z]: members[m][z] is the
/// |X| x |Y| row-stochastic matrix p_m(y | x, z).
struct ConditionalChannelFamily {
    Alphabet x_alphabet, z_alphabet, y_alphabet;
    std::vector<std::vector<Matrix>> members;

    ConditionalChannelFamily(Alphabet x, Alphabet z, Alphabet y,
                             std::vector<std::vector<Matrix>> m);
};

/// Per-z conditional mutual information: sup over members of the X|Z channel
/// and members of the Y|X,Z collection of the classical mutual information
/// between X and Y given Z = z.
MeasureResult nonlinear_conditional_mutual_information(const ChannelFamily& x_given_z,
                                                       const ConditionalChannelFamily& y_given_xz,
                                                       std::size_t z,
                                                       const OptimizerConfig& config = {});

/// A set of error probabilities, either listed or as an interval.
struct ErrorProbFamily {
    std::vector<double> values;  // used when !is_interval
    bool is_interval = false;
    double lo = 0.0, hi = 0.0;

    static ErrorProbFamily set(std::vector<double> v);
    static ErrorProbFamily interval(double lo, double hi);
    double sup() const;
    double sup_binary_entropy() const;
};

/// sup_{Pe} Hb(Pe) + sup_{Pe} Pe * log2(alphabet_size - 1), the two sups
/// taken independently.
double fano_bound(const ErrorProbFamily& errors, std::size_t alphabet_size);

/// How the derived reverse conditional entropy couples the output-marginal
/// member to the per-output posterior member:
///   PerMember   sup over (theta, lambda) of the classical H(X|Y) under that
///               member's joint law.
///   Independent output marginal and per-y posterior members chosen
///               independently (the literal reading of the conditional
///               entropy definition applied to the derived collections);
///               always >= the PerMember value.
enum class ReverseCoupling { PerMember, Independent };

/// Conditional entropy of the input given the output, computed from the
/// posteriors induced by each (source member, channel member) pair. The
/// forward model never defines this family; both readings are provided.
double reverse_conditional_entropy(const DistributionFamily& source, const ChannelFamily& channel,
                                   ReverseCoupling coupling, const OptimizerConfig& config = {});

}  // namespace nonlinfo
