#include "nonlinfo/families.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

namespace nonlinfo {

namespace {

void check_simplex(const std::vector<double>& p, const char* what) {
    if (p.empty()) throw std::invalid_argument(std::string(what) + ": empty probability vector");
    double total = 0.0;
    for (double x : p) {
        if (!(x >= 0.0) || x > 1.0 + kSimplexTol)
            throw std::invalid_argument(std::string(what) + ": probability outside [0, 1]");
        total += x;
    }
    if (std::abs(total - 1.0) > kSimplexTol)
        throw std::invalid_argument(std::string(what) + ": probabilities do not sum to 1");
}

void check_row_stochastic(const Matrix& m, std::size_t rows, std::size_t cols) {
    if (m.size() != rows) throw std::invalid_argument("channel matrix: wrong row count");
    for (const auto& row : m) {
        if (row.size() != cols) throw std::invalid_argument("channel matrix: wrong column count");
        check_simplex(row, "channel row");
    }
}

}  // namespace

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw std::invalid_argument("alphabet: needs at least one symbol");
    std::unordered_set<std::string> seen;
    for (const auto& s : symbols_)
        if (!seen.insert(s).second)
            throw std::invalid_argument("alphabet: duplicate symbol '" + s + "'");
}

Alphabet Alphabet::binary() { return Alphabet({"0", "1"}); }

Alphabet Alphabet::indexed(std::size_t n) {
    std::vector<std::string> syms;
    syms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) syms.push_back(std::to_string(i));
    return Alphabet(std::move(syms));
}

std::size_t Alphabet::index(const std::string& label) const {
    auto it = std::find(symbols_.begin(), symbols_.end(), label);
    if (it == symbols_.end()) throw std::invalid_argument("alphabet: unknown symbol '" + label + "'");
    return static_cast<std::size_t>(it - symbols_.begin());
}

FiniteDistribution::FiniteDistribution(Alphabet a, std::vector<double> p)
    : alphabet(std::move(a)), probs(std::move(p)) {
    if (probs.size() != alphabet.size())
        throw std::invalid_argument("distribution: size does not match alphabet");
    check_simplex(probs, "distribution");
}

double FiniteDistribution::entropy_bits() const { return nonlinfo::entropy_bits(probs); }

double binary_entropy(double q) {
    if (q <= 0.0 || q >= 1.0) return 0.0;
    return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

double xlogx_ratio(double x, double y) {
    if (x <= 0.0) return 0.0;
    return x * std::log2(x / y);
}

double entropy_bits(const std::vector<double>& p) {
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log2(x);
    return h;
}

double mutual_information_bits(const std::vector<double>& p, const Matrix& w) {
    const std::size_t nx = p.size(), ny = w.at(0).size();
    std::vector<double> q(ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) q[y] += p[x] * w[x][y];
    double mi = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
        if (p[x] <= 0.0) continue;
        for (std::size_t y = 0; y < ny; ++y)
            if (w[x][y] > 0.0) mi += p[x] * w[x][y] * std::log2(w[x][y] / q[y]);
    }
    return mi;
}

DistributionFamily DistributionFamily::singleton(FiniteDistribution d) {
    DistributionFamily fam;
    fam.kind_ = FamilyKind::Enumerated;
    fam.alphabet_ = d.alphabet;
    fam.members_.push_back(std::move(d));
    return fam;
}

DistributionFamily DistributionFamily::enumerated(Alphabet a,
                                                  std::vector<std::vector<double>> members) {
    if (members.empty()) throw std::invalid_argument("family: needs at least one member");
    DistributionFamily fam;
    fam.kind_ = FamilyKind::Enumerated;
    fam.alphabet_ = a;
    fam.members_.reserve(members.size());
    for (auto& m : members) fam.members_.emplace_back(a, std::move(m));
    return fam;
}

DistributionFamily DistributionFamily::interval_bernoulli(double p, double eps) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("interval_bernoulli: p outside [0, 1]");
    if (!(eps >= 0.0)) throw std::invalid_argument("interval_bernoulli: eps must be >= 0");
    DistributionFamily fam;
    fam.kind_ = FamilyKind::IntervalBernoulli;
    fam.alphabet_ = Alphabet::binary();
    fam.q_lo_ = std::max(p - eps, 0.0);
    fam.q_hi_ = std::min(p + eps, 1.0);
    return fam;
}

DistributionFamily DistributionFamily::interval_categorical(Alphabet a, std::vector<double> lower,
                                                            std::vector<double> upper) {
    const std::size_t n = a.size();
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("interval_categorical: bound size does not match alphabet");
    double lo_sum = 0.0, hi_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(0.0 <= lower[i] && lower[i] <= upper[i] && upper[i] <= 1.0))
            throw std::invalid_argument("interval_categorical: need 0 <= lower <= upper <= 1");
        lo_sum += lower[i];
        hi_sum += upper[i];
    }
    if (lo_sum > 1.0 + kSimplexTol || hi_sum < 1.0 - kSimplexTol)
        throw std::invalid_argument("interval_categorical: empty credal set");
    DistributionFamily fam;
    fam.kind_ = FamilyKind::IntervalCategorical;
    fam.alphabet_ = std::move(a);
    fam.lower_ = std::move(lower);
    fam.upper_ = std::move(upper);
    return fam;
}

DistributionFamily DistributionFamily::grid(std::size_t points) const {
    if (kind_ != FamilyKind::IntervalBernoulli)
        throw std::invalid_argument("grid: only interval kinds can be discretized");
    if (points < 2) throw std::invalid_argument("grid: needs at least 2 points");
    DistributionFamily fam;
    fam.kind_ = FamilyKind::Grid;
    fam.alphabet_ = alphabet_;
    fam.q_lo_ = q_lo_;
    fam.q_hi_ = q_hi_;
    fam.members_ = materialize(points);
    return fam;
}

bool DistributionFamily::is_singleton() const {
    switch (kind_) {
        case FamilyKind::Enumerated:
        case FamilyKind::Grid:
            return members_.size() == 1;
        case FamilyKind::IntervalBernoulli:
            return q_hi_ - q_lo_ <= 0.0;
        case FamilyKind::IntervalCategorical: {
            for (std::size_t i = 0; i < lower_.size(); ++i)
                if (upper_[i] - lower_[i] > 0.0) return false;
            return true;
        }
    }
    return false;
}

std::size_t DistributionFamily::member_count() const {
    if (kind_ == FamilyKind::Enumerated || kind_ == FamilyKind::Grid) return members_.size();
    throw std::logic_error("member_count: interval family has no explicit member list");
}

const FiniteDistribution& DistributionFamily::member(std::size_t i) const {
    if (kind_ == FamilyKind::Enumerated || kind_ == FamilyKind::Grid) return members_.at(i);
    throw std::logic_error("member: interval family has no explicit member list");
}

FiniteDistribution DistributionFamily::at_param(double q) const {
    if (kind_ != FamilyKind::IntervalBernoulli && kind_ != FamilyKind::Grid)
        throw std::logic_error("at_param: not a one-parameter family");
    if (q < q_lo_ - kSimplexTol || q > q_hi_ + kSimplexTol)
        throw std::invalid_argument("at_param: parameter outside the family interval");
    q = std::clamp(q, 0.0, 1.0);
    return FiniteDistribution(alphabet_, {q, 1.0 - q});
}

double DistributionFamily::q_lo() const {
    if (kind_ != FamilyKind::IntervalBernoulli && kind_ != FamilyKind::Grid)
        throw std::logic_error("q_lo: not a one-parameter family");
    return q_lo_;
}

double DistributionFamily::q_hi() const {
    if (kind_ != FamilyKind::IntervalBernoulli && kind_ != FamilyKind::Grid)
        throw std::logic_error("q_hi: not a one-parameter family");
    return q_hi_;
}

const std::vector<double>& DistributionFamily::lower() const {
    if (kind_ != FamilyKind::IntervalCategorical)
        throw std::logic_error("lower: not a categorical interval family");
    return lower_;
}

const std::vector<double>& DistributionFamily::upper() const {
    if (kind_ != FamilyKind::IntervalCategorical)
        throw std::logic_error("upper: not a categorical interval family");
    return upper_;
}

std::vector<FiniteDistribution> DistributionFamily::materialize(std::size_t grid_points) const {
    switch (kind_) {
        case FamilyKind::Enumerated:
        case FamilyKind::Grid:
            return members_;
        case FamilyKind::IntervalBernoulli: {
            if (q_hi_ - q_lo_ <= 0.0) return {FiniteDistribution(alphabet_, {q_lo_, 1.0 - q_lo_})};
            if (grid_points < 2) grid_points = 2;
            std::vector<FiniteDistribution> out;
            out.reserve(grid_points);
            for (std::size_t i = 0; i < grid_points; ++i) {
                double q = q_lo_ + (q_hi_ - q_lo_) * static_cast<double>(i) /
                                       static_cast<double>(grid_points - 1);
                out.emplace_back(alphabet_, std::vector<double>{q, 1.0 - q});
            }
            return out;
        }
        case FamilyKind::IntervalCategorical:
            throw std::logic_error("materialize: box credal sets are not grid-discretized");
    }
    return {};
}

ChannelFamily ChannelFamily::singleton(Alphabet input, Alphabet output, Matrix m) {
    return enumerated(std::move(input), std::move(output), {std::move(m)});
}

ChannelFamily ChannelFamily::enumerated(Alphabet input, Alphabet output,
                                        std::vector<Matrix> members) {
    if (members.empty()) throw std::invalid_argument("channel family: needs at least one member");
    for (const auto& m : members) check_row_stochastic(m, input.size(), output.size());
    ChannelFamily fam;
    fam.kind_ = ChannelKind::Enumerated;
    fam.input_ = std::move(input);
    fam.output_ = std::move(output);
    fam.members_ = std::move(members);
    return fam;
}

ChannelFamily ChannelFamily::bsc(double p) { return interval_bsc(p, 0.0); }

ChannelFamily ChannelFamily::interval_bsc(double p, double eps) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("interval_bsc: p outside [0, 1]");
    if (!(eps >= 0.0)) throw std::invalid_argument("interval_bsc: eps must be >= 0");
    ChannelFamily fam;
    fam.kind_ = ChannelKind::IntervalBSC;
    fam.input_ = Alphabet::binary();
    fam.output_ = Alphabet::binary();
    fam.q_lo_ = std::max(p - eps, 0.0);
    fam.q_hi_ = std::min(p + eps, 1.0);
    return fam;
}

bool ChannelFamily::is_singleton() const {
    if (kind_ == ChannelKind::Enumerated) return members_.size() == 1;
    return q_hi_ - q_lo_ <= 0.0;
}

std::size_t ChannelFamily::member_count() const {
    if (kind_ != ChannelKind::Enumerated)
        throw std::logic_error("member_count: interval channel has no explicit member list");
    return members_.size();
}

const Matrix& ChannelFamily::member(std::size_t i) const {
    if (kind_ != ChannelKind::Enumerated)
        throw std::logic_error("member: interval channel has no explicit member list");
    return members_.at(i);
}

Matrix ChannelFamily::at_param(double q) const {
    if (kind_ != ChannelKind::IntervalBSC) throw std::logic_error("at_param: not a BSC interval");
    if (q < q_lo_ - kSimplexTol || q > q_hi_ + kSimplexTol)
        throw std::invalid_argument("at_param: parameter outside the family interval");
    q = std::clamp(q, 0.0, 1.0);
    return Matrix{{1.0 - q, q}, {q, 1.0 - q}};
}

double ChannelFamily::q_lo() const {
    if (kind_ != ChannelKind::IntervalBSC) throw std::logic_error("q_lo: not a BSC interval");
    return q_lo_;
}

double ChannelFamily::q_hi() const {
    if (kind_ != ChannelKind::IntervalBSC) throw std::logic_error("q_hi: not a BSC interval");
    return q_hi_;
}

std::vector<Matrix> ChannelFamily::materialize(std::size_t grid_points) const {
    if (kind_ == ChannelKind::Enumerated) return members_;
    if (q_hi_ - q_lo_ <= 0.0) return {at_param(q_lo_)};
    if (grid_points < 2) grid_points = 2;
    std::vector<Matrix> out;
    out.reserve(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i) {
        double q = q_lo_ + (q_hi_ - q_lo_) * static_cast<double>(i) /
                               static_cast<double>(grid_points - 1);
        out.push_back(at_param(q));
    }
    return out;
}

std::vector<double> credal_box_argmax(const std::vector<double>& lower,
                                      const std::vector<double>& upper,
                                      const std::vector<double>& f) {
    const std::size_t n = f.size();
    std::vector<double> p = lower;
    double budget = 1.0 - std::accumulate(lower.begin(), lower.end(), 0.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
    for (std::size_t i : order) {
        if (budget <= 0.0) break;
        double add = std::min(upper[i] - lower[i], budget);
        p[i] += add;
        budget -= add;
    }
    return p;
}

std::vector<double> credal_box_max_entropy(const std::vector<double>& lower,
                                           const std::vector<double>& upper) {
    // p(x) = clamp(nu, lower, upper) with nu chosen so the result sums to 1.
    auto mass = [&](double nu) {
        double s = 0.0;
        for (std::size_t i = 0; i < lower.size(); ++i) s += std::clamp(nu, lower[i], upper[i]);
        return s;
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (mass(mid) < 1.0 ? lo : hi) = mid;
    }
    double nu = 0.5 * (lo + hi);
    std::vector<double> p(lower.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) total += (p[i] = std::clamp(nu, lower[i], upper[i]));
    for (auto& x : p) x /= total;
    return p;
}

std::vector<double> credal_box_max_concave(
    const std::vector<double>& lower, const std::vector<double>& upper,
    const std::function<double(const std::vector<double>&)>& objective,
    const std::function<std::vector<double>(const std::vector<double>&)>& gradient, int max_iter) {
    std::vector<double> p = credal_box_max_entropy(lower, upper);
    for (int k = 1; k <= max_iter; ++k) {
        std::vector<double> g = gradient(p);
        std::vector<double> vertex = credal_box_argmax(lower, upper, g);
        double step = 2.0 / (k + 2.0);
        double gap = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) gap += g[i] * (vertex[i] - p[i]);
        if (gap < 1e-12) break;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] += step * (vertex[i] - p[i]);
    }
    (void)objective;
    return p;
}

double sublinear_expectation(const DistributionFamily& family, const std::vector<double>& f) {
    if (f.size() != family.alphabet().size())
        throw std::invalid_argument("sublinear_expectation: f does not match the alphabet");
    switch (family.kind()) {
        case FamilyKind::Enumerated:
        case FamilyKind::Grid: {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < family.member_count(); ++i) {
                const auto& p = family.member(i).probs;
                double v = std::inner_product(p.begin(), p.end(), f.begin(), 0.0);
                best = std::max(best, v);
            }
            return best;
        }
        case FamilyKind::IntervalBernoulli: {
            // Linear in q: extreme at an endpoint.
            auto eval = [&](double q) { return q * f[0] + (1.0 - q) * f[1]; };
            return std::max(eval(family.q_lo()), eval(family.q_hi()));
        }
        case FamilyKind::IntervalCategorical: {
            auto p = credal_box_argmax(family.lower(), family.upper(), f);
            return std::inner_product(p.begin(), p.end(), f.begin(), 0.0);
        }
    }
    throw std::logic_error("sublinear_expectation: unknown family kind");
}

double conjugate_expectation(const DistributionFamily& family, const std::vector<double>& f) {
    std::vector<double> neg(f.size());
    std::transform(f.begin(), f.end(), neg.begin(), std::negate<>());
    return -sublinear_expectation(family, neg);
}

CapacityPair capacity(const DistributionFamily& family, const std::vector<std::size_t>& event) {
    std::vector<double> indicator(family.alphabet().size(), 0.0);
    for (std::size_t i : event) {
        if (i >= indicator.size()) throw std::invalid_argument("capacity: symbol index out of range");
        indicator[i] = 1.0;
    }
    return {sublinear_expectation(family, indicator), conjugate_expectation(family, indicator)};
}

CapacityPair capacity_by_label(const DistributionFamily& family,
                               const std::vector<std::string>& event) {
    std::vector<std::size_t> idx;
    idx.reserve(event.size());
    for (const auto& s : event) idx.push_back(family.alphabet().index(s));
    return capacity(family, idx);
}

double sequential_expectation(const DistributionFamily& outer, const DistributionFamily& inner,
                              const Matrix& phi) {
    const std::size_t nx = outer.alphabet().size();
    if (phi.size() != nx)
        throw std::invalid_argument("sequential_expectation: phi rows do not match outer alphabet");
    std::vector<double> g(nx);
    for (std::size_t x = 0; x < nx; ++x) {
        if (phi[x].size() != inner.alphabet().size())
            throw std::invalid_argument("sequential_expectation: phi cols do not match inner alphabet");
        g[x] = sublinear_expectation(inner, phi[x]);
    }
    return sublinear_expectation(outer, g);
}

namespace {

std::vector<double> parse_prob_vector(const nlohmann::json& j, const char* what) {
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + ": expected an array");
    std::vector<double> out;
    for (const auto& x : j) out.push_back(x.get<double>());
    return out;
}

Alphabet alphabet_from_json(const nlohmann::json& spec, std::size_t fallback_size) {
    if (spec.contains("symbols")) {
        std::vector<std::string> syms;
        for (const auto& s : spec.at("symbols")) syms.push_back(s.get<std::string>());
        return Alphabet(std::move(syms));
    }
    return Alphabet::indexed(fallback_size);
}

}  // namespace

DistributionFamily family_from_json(const nlohmann::json& spec) {
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "singleton") {
        auto probs = parse_prob_vector(spec.at("probs"), "singleton.probs");
        return DistributionFamily::singleton(
            FiniteDistribution(alphabet_from_json(spec, probs.size()), probs));
    }
    if (kind == "enumerated") {
        std::vector<std::vector<double>> members;
        for (const auto& m : spec.at("members"))
            members.push_back(parse_prob_vector(m, "enumerated.members"));
        if (members.empty()) throw std::invalid_argument("enumerated: no members");
        return DistributionFamily::enumerated(alphabet_from_json(spec, members[0].size()),
                                              std::move(members));
    }
    if (kind == "interval_bernoulli") {
        return DistributionFamily::interval_bernoulli(spec.at("p").get<double>(),
                                                      spec.at("eps").get<double>());
    }
    if (kind == "interval_categorical") {
        auto lower = parse_prob_vector(spec.at("lower"), "interval_categorical.lower");
        auto upper = parse_prob_vector(spec.at("upper"), "interval_categorical.upper");
        return DistributionFamily::interval_categorical(alphabet_from_json(spec, lower.size()),
                                                        std::move(lower), std::move(upper));
    }
    if (kind == "grid") {
        auto base = family_from_json(spec.at("base"));
        return base.grid(spec.at("points").get<std::size_t>());
    }
    throw std::invalid_argument("family: unknown kind '" + kind + "'");
}

nlohmann::json family_to_json(const DistributionFamily& family) {
    nlohmann::json j;
    switch (family.kind()) {
        case FamilyKind::Enumerated: {
            if (family.member_count() == 1) {
                j["kind"] = "singleton";
                j["probs"] = family.member(0).probs;
            } else {
                j["kind"] = "enumerated";
                auto members = nlohmann::json::array();
                for (std::size_t i = 0; i < family.member_count(); ++i)
                    members.push_back(family.member(i).probs);
                j["members"] = members;
            }
            j["symbols"] = family.alphabet().labels();
            break;
        }
        case FamilyKind::Grid: {
            j["kind"] = "grid";
            j["points"] = family.member_count();
            nlohmann::json base;
            base["kind"] = "interval_bernoulli";
            base["p"] = 0.5 * (family.q_lo() + family.q_hi());
            base["eps"] = 0.5 * (family.q_hi() - family.q_lo());
            j["base"] = base;
            break;
        }
        case FamilyKind::IntervalBernoulli: {
            j["kind"] = "interval_bernoulli";
            j["p"] = 0.5 * (family.q_lo() + family.q_hi());
            j["eps"] = 0.5 * (family.q_hi() - family.q_lo());
            break;
        }
        case FamilyKind::IntervalCategorical: {
            j["kind"] = "interval_categorical";
            j["lower"] = family.lower();
            j["upper"] = family.upper();
            j["symbols"] = family.alphabet().labels();
            break;
        }
    }
    return j;
}

ChannelFamily channel_from_json(const nlohmann::json& spec) {
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "bsc") {
        double eps = spec.contains("eps") ? spec.at("eps").get<double>() : 0.0;
        return ChannelFamily::interval_bsc(spec.at("p").get<double>(), eps);
    }
    if (kind == "enumerated" || kind == "singleton") {
        std::vector<Matrix> members;
        if (kind == "singleton") {
            Matrix m;
            for (const auto& row : spec.at("matrix"))
                m.push_back(parse_prob_vector(row, "channel.matrix"));
            members.push_back(std::move(m));
        } else {
            for (const auto& mj : spec.at("matrices")) {
                Matrix m;
                for (const auto& row : mj) m.push_back(parse_prob_vector(row, "channel.matrices"));
                members.push_back(std::move(m));
            }
        }
        if (members.empty() || members[0].empty())
            throw std::invalid_argument("channel: empty matrix list");
        Alphabet in = spec.contains("input_symbols")
                          ? Alphabet([&] {
                                std::vector<std::string> s;
                                for (const auto& x : spec.at("input_symbols"))
                                    s.push_back(x.get<std::string>());
                                return s;
                            }())
                          : Alphabet::indexed(members[0].size());
        Alphabet out = spec.contains("output_symbols")
                           ? Alphabet([&] {
                                 std::vector<std::string> s;
                                 for (const auto& x : spec.at("output_symbols"))
                                     s.push_back(x.get<std::string>());
                                 return s;
                             }())
                           : Alphabet::indexed(members[0][0].size());
        return ChannelFamily::enumerated(std::move(in), std::move(out), std::move(members));
    }
    throw std::invalid_argument("channel: unknown kind '" + kind + "'");
}

nlohmann::json channel_to_json(const ChannelFamily& channel) {
    nlohmann::json j;
    if (channel.kind() == ChannelKind::IntervalBSC) {
        j["kind"] = "bsc";
        j["p"] = 0.5 * (channel.q_lo() + channel.q_hi());
        j["eps"] = 0.5 * (channel.q_hi() - channel.q_lo());
    } else {
        j["kind"] = "enumerated";
        auto matrices = nlohmann::json::array();
        for (std::size_t i = 0; i < channel.member_count(); ++i)
            matrices.push_back(channel.member(i));
        j["matrices"] = matrices;
        j["input_symbols"] = channel.input().labels();
        j["output_symbols"] = channel.output().labels();
    }
    return j;
}

}  // namespace nonlinfo
