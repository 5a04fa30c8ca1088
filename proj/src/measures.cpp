#include "nonlinfo/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nonlinfo {

namespace {

constexpr double kLn2 = 0.6931471805599453;

void require_compatible(const DistributionFamily& source, const ChannelFamily& channel) {
    if (source.alphabet() != channel.input())
        throw std::invalid_argument("measure: channel input alphabet does not match source");
}

double joint_entropy_bits(const std::vector<double>& p, const Matrix& w) {
    double h = entropy_bits(p);
    for (std::size_t x = 0; x < p.size(); ++x)
        if (p[x] > 0.0) h += p[x] * entropy_bits(w[x]);
    return h;
}

// sup over the source family of a concave objective, dispatching on kind.
FamilySupResult sup_concave_over_source(const DistributionFamily& source,
                                        const std::function<double(const std::vector<double>&)>& f,
                                        const std::function<std::vector<double>(const std::vector<double>&)>& grad,
                                        const OptimizerConfig& config) {
    if (source.kind() == FamilyKind::IntervalCategorical) {
        FamilySupResult r;
        auto p = credal_box_max_concave(source.lower(), source.upper(), f, grad);
        r.value = f(p);
        return r;
    }
    return sup_over_family(
        source, [&](const FiniteDistribution& d) { return f(d.probs); }, config,
        /*unimodal_hint=*/true);
}

std::vector<double> entropy_gradient(const std::vector<double>& p) {
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        g[i] = (p[i] > 0.0 ? -std::log2(p[i]) : 60.0) - 1.0 / kLn2;
    return g;
}

nlohmann::json source_witness(const DistributionFamily& source, const FamilySupResult& r) {
    nlohmann::json w;
    if (source.kind() == FamilyKind::Enumerated || source.kind() == FamilyKind::Grid) {
        if (r.member_index != static_cast<std::size_t>(-1)) w["theta_index"] = r.member_index;
    } else if (!std::isnan(r.param)) {
        w["theta"] = r.param;
    }
    return w;
}

Matrix winning_matrix(const ChannelFamily& channel, const FamilySupResult& r) {
    if (channel.kind() == ChannelKind::Enumerated) return channel.member(r.member_index);
    return channel.at_param(r.param);
}

}  // namespace

MeasureResult nonlinear_entropy(const DistributionFamily& family, const OptimizerConfig& config) {
    config.validate();
    MeasureResult result;
    switch (family.kind()) {
        case FamilyKind::Enumerated:
        case FamilyKind::Grid: {
            auto r = sup_over_family(
                family, [](const FiniteDistribution& d) { return d.entropy_bits(); }, config);
            result.value_bits = r.value;
            result.witness = source_witness(family, r);
            break;
        }
        case FamilyKind::IntervalBernoulli: {
            // Hb is concave with its maximum at 1/2, so the sup sits at the
            // parameter closest to 1/2.
            double q = std::clamp(0.5, family.q_lo(), family.q_hi());
            result.value_bits = binary_entropy(q);
            result.witness["theta"] = q;
            break;
        }
        case FamilyKind::IntervalCategorical: {
            auto p = credal_box_max_entropy(family.lower(), family.upper());
            result.value_bits = entropy_bits(p);
            result.witness["theta_member"] = p;
            break;
        }
    }
    return result;
}

MeasureResult nonlinear_joint_entropy(const DistributionFamily& source,
                                      const ChannelFamily& channel,
                                      const OptimizerConfig& config) {
    config.validate();
    require_compatible(source, channel);
    auto inner_sup = [&](const Matrix& w) {
        std::vector<double> row_entropy(w.size());
        for (std::size_t x = 0; x < w.size(); ++x) row_entropy[x] = entropy_bits(w[x]);
        return sup_concave_over_source(
            source, [&](const std::vector<double>& p) { return joint_entropy_bits(p, w); },
            [&](const std::vector<double>& p) {
                auto g = entropy_gradient(p);
                for (std::size_t x = 0; x < p.size(); ++x) g[x] += row_entropy[x];
                return g;
            },
            config);
    };
    auto outer = sup_over_channel(
        channel, [&](const Matrix& w) { return inner_sup(w).value; }, config,
        /*unimodal_hint=*/true);
    MeasureResult result;
    result.value_bits = outer.value;
    result.witness = source_witness(source, inner_sup(winning_matrix(channel, outer)));
    if (channel.kind() == ChannelKind::Enumerated)
        result.witness["lambda_index"] = outer.member_index;
    else
        result.witness["lambda"] = outer.param;
    return result;
}

MeasureResult nonlinear_conditional_entropy(const DistributionFamily& source,
                                            const ChannelFamily& channel,
                                            const OptimizerConfig& config) {
    config.validate();
    require_compatible(source, channel);
    const std::size_t nx = source.alphabet().size();

    // Per-symbol inner sup over the channel family, taken before the outer
    // sup over the source.
    std::vector<double> h(nx);
    for (std::size_t x = 0; x < nx; ++x) {
        if (channel.kind() == ChannelKind::IntervalBSC) {
            double q = std::clamp(0.5, channel.q_lo(), channel.q_hi());
            h[x] = binary_entropy(q);
        } else {
            double best = 0.0;
            for (std::size_t j = 0; j < channel.member_count(); ++j)
                best = std::max(best, entropy_bits(channel.member(j)[x]));
            h[x] = best;
        }
    }
    MeasureResult result;
    result.value_bits = sublinear_expectation(source, h);
    result.witness["per_symbol_conditional_entropy"] = h;
    return result;
}

MeasureResult nonlinear_mutual_information(const DistributionFamily& source,
                                           const ChannelFamily& channel,
                                           const OptimizerConfig& config) {
    config.validate();
    require_compatible(source, channel);
    auto inner_sup = [&](const Matrix& w) {
        return sup_concave_over_source(
            source, [&](const std::vector<double>& p) { return mutual_information_bits(p, w); },
            [&](const std::vector<double>& p) {
                // d I / d p_x = D(w_x || q) - 1/ln2 (bits), q the output law.
                const std::size_t ny = w[0].size();
                std::vector<double> q(ny, 0.0);
                for (std::size_t x = 0; x < p.size(); ++x)
                    for (std::size_t y = 0; y < ny; ++y) q[y] += p[x] * w[x][y];
                std::vector<double> g(p.size(), -1.0 / kLn2);
                for (std::size_t x = 0; x < p.size(); ++x)
                    for (std::size_t y = 0; y < ny; ++y)
                        if (w[x][y] > 0.0 && q[y] > 0.0)
                            g[x] += w[x][y] * std::log2(w[x][y] / q[y]);
                return g;
            },
            config);
    };
    auto outer = sup_over_channel(
        channel, [&](const Matrix& w) { return inner_sup(w).value; }, config,
        /*unimodal_hint=*/true);
    MeasureResult result;
    result.value_bits = std::max(outer.value, 0.0);
    result.witness = source_witness(source, inner_sup(winning_matrix(channel, outer)));
    if (channel.kind() == ChannelKind::Enumerated)
        result.witness["lambda_index"] = outer.member_index;
    else
        result.witness["lambda"] = outer.param;
    return result;
}

ConditionalChannelFamily::ConditionalChannelFamily(Alphabet x, Alphabet z, Alphabet y,
                                                   std::vector<std::vector<Matrix>> m)
    : x_alphabet(std::move(x)), z_alphabet(std::move(z)), y_alphabet(std::move(y)),
      members(std::move(m)) {
    if (members.empty())
        throw std::invalid_argument("conditional channel: needs at least one member");
    for (const auto& per_z : members) {
        if (per_z.size() != z_alphabet.size())
            throw std::invalid_argument("conditional channel: wrong z count");
        for (const auto& mat : per_z) {
            if (mat.size() != x_alphabet.size())
                throw std::invalid_argument("conditional channel: wrong x count");
            for (const auto& row : mat) {
                if (row.size() != y_alphabet.size())
                    throw std::invalid_argument("conditional channel: wrong y count");
                double s = std::accumulate(row.begin(), row.end(), 0.0);
                if (std::abs(s - 1.0) > 1e-9)
                    throw std::invalid_argument("conditional channel: rows must sum to 1");
            }
        }
    }
}

MeasureResult nonlinear_conditional_mutual_information(const ChannelFamily& x_given_z,
                                                       const ConditionalChannelFamily& y_given_xz,
                                                       std::size_t z,
                                                       const OptimizerConfig& config) {
    config.validate();
    if (x_given_z.output() != y_given_xz.x_alphabet)
        throw std::invalid_argument("conditional mi: X alphabets do not match");
    if (z >= y_given_xz.z_alphabet.size())
        throw std::invalid_argument("conditional mi: unknown z symbol");

    MeasureResult result;
    auto rows = x_given_z.materialize(config.lambda_grid);
    double best = 0.0;
    std::size_t best_l1 = 0, best_l2 = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::vector<double>& px = rows[i][z];
        for (std::size_t j = 0; j < y_given_xz.members.size(); ++j) {
            double v = mutual_information_bits(px, y_given_xz.members[j][z]);
            if (v > best) {
                best = v;
                best_l1 = i;
                best_l2 = j;
            }
        }
    }
    result.value_bits = best;
    result.witness["lambda1_index"] = best_l1;
    result.witness["lambda2_index"] = best_l2;
    result.witness["z"] = z;
    return result;
}

ErrorProbFamily ErrorProbFamily::set(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("error family: empty set");
    for (double x : v)
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("error family: values must lie in [0, 1]");
    ErrorProbFamily f;
    f.values = std::move(v);
    return f;
}

ErrorProbFamily ErrorProbFamily::interval(double lo, double hi) {
    if (!(0.0 <= lo && lo <= hi && hi <= 1.0))
        throw std::invalid_argument("error family: bad interval");
    ErrorProbFamily f;
    f.is_interval = true;
    f.lo = lo;
    f.hi = hi;
    return f;
}

double ErrorProbFamily::sup() const {
    if (is_interval) return hi;
    return *std::max_element(values.begin(), values.end());
}

double ErrorProbFamily::sup_binary_entropy() const {
    if (is_interval) return binary_entropy(std::clamp(0.5, lo, hi));
    double best = 0.0;
    for (double v : values) best = std::max(best, binary_entropy(v));
    return best;
}

double fano_bound(const ErrorProbFamily& errors, std::size_t alphabet_size) {
    if (alphabet_size < 2) throw std::invalid_argument("fano_bound: alphabet size must be >= 2");
    return errors.sup_binary_entropy() +
           errors.sup() * std::log2(static_cast<double>(alphabet_size - 1));
}

double reverse_conditional_entropy(const DistributionFamily& source, const ChannelFamily& channel,
                                   ReverseCoupling coupling, const OptimizerConfig& config) {
    config.validate();
    require_compatible(source, channel);
    const std::size_t nx = source.alphabet().size();
    const std::size_t ny = channel.output().size();

    struct Derived {
        std::vector<double> y_marginal;
        Matrix posterior;  // rows indexed by y
    };
    std::vector<Derived> joints;
    for (const auto& member : source.materialize(config.theta_grid)) {
        const auto& p = member.probs;
        for (const auto& w : channel.materialize(config.lambda_grid)) {
            Derived d;
            d.y_marginal.assign(ny, 0.0);
            d.posterior.assign(ny, std::vector<double>(nx, 0.0));
            for (std::size_t x = 0; x < nx; ++x)
                for (std::size_t y = 0; y < ny; ++y) d.y_marginal[y] += p[x] * w[x][y];
            for (std::size_t y = 0; y < ny; ++y) {
                if (d.y_marginal[y] <= 0.0) continue;  // unreachable output: zero weight
                for (std::size_t x = 0; x < nx; ++x)
                    d.posterior[y][x] = p[x] * w[x][y] / d.y_marginal[y];
            }
            joints.push_back(std::move(d));
        }
    }

    if (coupling == ReverseCoupling::PerMember) {
        double best = 0.0;
        for (const auto& d : joints) {
            double h = 0.0;
            for (std::size_t y = 0; y < ny; ++y)
                if (d.y_marginal[y] > 0.0) h += d.y_marginal[y] * entropy_bits(d.posterior[y]);
            best = std::max(best, h);
        }
        return best;
    }

    // Independent coupling: per-output posterior sup across the whole
    // collection, then sup over marginals.
    std::vector<double> h_y(ny, 0.0);
    for (std::size_t y = 0; y < ny; ++y)
        for (const auto& d : joints)
            if (d.y_marginal[y] > 0.0) h_y[y] = std::max(h_y[y], entropy_bits(d.posterior[y]));
    double best = 0.0;
    for (const auto& d : joints) {
        double h = std::inner_product(d.y_marginal.begin(), d.y_marginal.end(), h_y.begin(), 0.0);
        best = std::max(best, h);
    }
    return best;
}

}  // namespace nonlinfo
