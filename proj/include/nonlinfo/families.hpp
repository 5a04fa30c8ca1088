#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace nonlinfo {

using Matrix = std::vector<std::vector<double>>;

inline constexpr double kSimplexTol = 1e-12;

/// Finite ordered symbol set. Symbols are addressed by position everywhere in
/// the library; labels exist for I/O only.
class Alphabet {
  public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> symbols);

    static Alphabet binary();
    static Alphabet indexed(std::size_t n);

    std::size_t size() const { return symbols_.size(); }
    const std::string& label(std::size_t i) const { return symbols_.at(i); }
    const std::vector<std::string>& labels() const { return symbols_; }
    std::size_t index(const std::string& label) const;
    bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }
    bool operator!=(const Alphabet& other) const { return !(*this == other); }

  private:
    std::vector<std::string> symbols_;
};

/// A single probability vector over an alphabet. The simplex constraint is
/// checked to kSimplexTol on construction.
struct FiniteDistribution {
    Alphabet alphabet;
    std::vector<double> probs;

    FiniteDistribution(Alphabet a, std::vector<double> p);

    /// Shannon entropy in bits, with the 0 log(1/0) = 0 convention.
    double entropy_bits() const;
};

enum class FamilyKind { Enumerated, IntervalBernoulli, IntervalCategorical, Grid };

/// A set of distributions over a common alphabet: the object every sup/inf in
/// this library ranges over. Immutable after construction.
///
/// Kinds:
///   Enumerated          explicit list of members
///   IntervalBernoulli   binary, q = Pr(first symbol) ranging over
///                       [max(p-eps,0), min(p+eps,1)]
///   IntervalCategorical box credal set {p : lower <= p <= upper, sum p = 1}.
///                       This kind is an extrapolation beyond one-parameter
///                       intervals; see docs/DESIGN notes in README.
///   Grid                finite discretization of an IntervalBernoulli
class DistributionFamily {
  public:
    static DistributionFamily singleton(FiniteDistribution d);
    static DistributionFamily enumerated(Alphabet a, std::vector<std::vector<double>> members);
    static DistributionFamily interval_bernoulli(double p, double eps);
    static DistributionFamily interval_categorical(Alphabet a, std::vector<double> lower,
                                                   std::vector<double> upper);

    /// Discretize an interval kind into `points` members (Grid kind).
    DistributionFamily grid(std::size_t points) const;

    FamilyKind kind() const { return kind_; }
    const Alphabet& alphabet() const { return alphabet_; }
    bool is_singleton() const;
    bool is_interval() const { return kind_ == FamilyKind::IntervalBernoulli; }

    /// Number of explicit members (Enumerated/Grid). Interval kinds have a
    /// continuum; call materialize() with a grid size instead.
    std::size_t member_count() const;
    const FiniteDistribution& member(std::size_t i) const;

    /// Member for a continuous parameter value (interval kinds only).
    FiniteDistribution at_param(double q) const;

    double q_lo() const;
    double q_hi() const;
    const std::vector<double>& lower() const;
    const std::vector<double>& upper() const;

    /// Explicit member list: Enumerated/Grid members as stored; interval
    /// kinds discretized to `grid_points` (endpoints included).
    std::vector<FiniteDistribution> materialize(std::size_t grid_points) const;

  private:
    DistributionFamily() = default;

    FamilyKind kind_ = FamilyKind::Enumerated;
    Alphabet alphabet_;
    std::vector<FiniteDistribution> members_;
    double q_lo_ = 0.0, q_hi_ = 0.0;
    std::vector<double> lower_, upper_;
};

/// Upper/lower set functions (V, v) of an event under a family.
struct CapacityPair {
    double upper = 0.0;  // V(A)
    double lower = 0.0;  // v(A)
};

enum class ChannelKind { Enumerated, IntervalBSC };

/// A set of row-stochastic transition matrices over fixed input/output
/// alphabets, with memoryless product extension over blocks.
class ChannelFamily {
  public:
    static ChannelFamily singleton(Alphabet input, Alphabet output, Matrix m);
    static ChannelFamily enumerated(Alphabet input, Alphabet output, std::vector<Matrix> members);
    static ChannelFamily bsc(double p);
    static ChannelFamily interval_bsc(double p, double eps);

    ChannelKind kind() const { return kind_; }
    const Alphabet& input() const { return input_; }
    const Alphabet& output() const { return output_; }
    bool is_singleton() const;
    bool is_interval() const { return kind_ == ChannelKind::IntervalBSC; }

    std::size_t member_count() const;
    const Matrix& member(std::size_t i) const;
    Matrix at_param(double q) const;

    double q_lo() const;
    double q_hi() const;

    std::vector<Matrix> materialize(std::size_t grid_points) const;

  private:
    ChannelFamily() = default;

    ChannelKind kind_ = ChannelKind::Enumerated;
    Alphabet input_, output_;
    std::vector<Matrix> members_;
    double q_lo_ = 0.0, q_hi_ = 0.0;
};

/// sup over the family of sum_x p(x) f(x). Exact for enumerated kinds; exact
/// endpoint/vertex evaluation for interval kinds (the objective is linear in
/// the member).
double sublinear_expectation(const DistributionFamily& family, const std::vector<double>& f);

/// inf over the family; defined as -sublinear_expectation(family, -f) so the
/// conjugacy identity holds exactly.
double conjugate_expectation(const DistributionFamily& family, const std::vector<double>& f);

/// (V(A), v(A)) for an event given by symbol indices.
CapacityPair capacity(const DistributionFamily& family, const std::vector<std::size_t>& event);
CapacityPair capacity_by_label(const DistributionFamily& family,
                               const std::vector<std::string>& event);

/// Nested expectation of phi(X, Y) with Y evaluated innermost:
/// sup_outer sum_x p(x) [ sup_inner sum_y r(y) phi(x, y) ].
/// The argument order is semantically significant; swapping the roles of the
/// two families generally changes the value.
double sequential_expectation(const DistributionFamily& outer, const DistributionFamily& inner,
                              const Matrix& phi);

/// Exact sup/inf of a linear functional over the box credal set
/// {p : lower <= p <= upper, sum p = 1} (greedy vertex assignment).
std::vector<double> credal_box_argmax(const std::vector<double>& lower,
                                      const std::vector<double>& upper,
                                      const std::vector<double>& f);

/// Maximum-entropy member of a box credal set (water filling: p = clamp(nu)).
std::vector<double> credal_box_max_entropy(const std::vector<double>& lower,
                                           const std::vector<double>& upper);

/// Maximize a concave objective over the box credal set by Frank-Wolfe with
/// the exact vertex oracle. Returns the maximizing member.
std::vector<double> credal_box_max_concave(const std::vector<double>& lower,
                                           const std::vector<double>& upper,
                                           const std::function<double(const std::vector<double>&)>& objective,
                                           const std::function<std::vector<double>(const std::vector<double>&)>& gradient,
                                           int max_iter = 4000);

// JSON (de)serialization of family specifications; the schema is documented
// in the CLI and README.
DistributionFamily family_from_json(const nlohmann::json& spec);
nlohmann::json family_to_json(const DistributionFamily& family);
ChannelFamily channel_from_json(const nlohmann::json& spec);
nlohmann::json channel_to_json(const ChannelFamily& channel);

/// Binary entropy in bits.
double binary_entropy(double q);
/// x * log2(x/y) with the 0 log 0 = 0 convention.
double xlogx_ratio(double x, double y);
/// Shannon entropy in bits of an arbitrary nonnegative vector (normalized by
/// the caller).
double entropy_bits(const std::vector<double>& p);
/// Classical mutual information I(p; W) in bits.
double mutual_information_bits(const std::vector<double>& p, const Matrix& w);

}  // namespace nonlinfo
