#include "nonlinfo/verify.hpp"

#include <algorithm>
#include <cmath>

#include "nonlinfo/coding.hpp"
#include "nonlinfo/measures.hpp"
#include "nonlinfo/rng.hpp"

namespace nonlinfo {

namespace {

void record(SuiteResult& suite, double slack, double tol, const nlohmann::json& inputs) {
    suite.cases++;
    if (slack < -tol) {
        suite.violations++;
        suite.worst_violation = std::min(suite.worst_violation, slack);
        if (suite.failing_cases.size() < 10) suite.failing_cases.push_back(inputs);
    }
}

double classical_joint_entropy(const std::vector<double>& p, const Matrix& w) {
    double h = entropy_bits(p);
    for (std::size_t x = 0; x < p.size(); ++x)
        if (p[x] > 0.0) h += p[x] * entropy_bits(w[x]);
    return h;
}

Matrix compose(const Matrix& a, const Matrix& b) {
    const std::size_t nx = a.size(), ny = b.size(), nz = b[0].size();
    Matrix c(nx, std::vector<double>(nz, 0.0));
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y)
            for (std::size_t z = 0; z < nz; ++z) c[x][z] += a[x][y] * b[y][z];
    return c;
}

nlohmann::json case_json(std::initializer_list<std::pair<const char*, nlohmann::json>> kv) {
    nlohmann::json j;
    for (const auto& [k, v] : kv) j[k] = v;
    return j;
}

}  // namespace

DistributionFamily random_family(CounterRng& rng, std::size_t min_members, std::size_t max_members,
                                 std::size_t min_symbols, std::size_t max_symbols) {
    std::size_t m = min_symbols + rng.next_below(max_symbols - min_symbols + 1);
    std::size_t k = min_members + rng.next_below(max_members - min_members + 1);
    std::vector<std::vector<double>> members;
    for (std::size_t i = 0; i < k; ++i) members.push_back(sample_simplex(rng, m));
    return DistributionFamily::enumerated(Alphabet::indexed(m), std::move(members));
}

ChannelFamily random_channel(CounterRng& rng, const Alphabet& input, std::size_t output_size,
                             std::size_t min_members, std::size_t max_members) {
    std::size_t k = min_members + rng.next_below(max_members - min_members + 1);
    std::vector<Matrix> members;
    for (std::size_t i = 0; i < k; ++i) {
        Matrix w;
        for (std::size_t x = 0; x < input.size(); ++x) w.push_back(sample_simplex(rng, output_size));
        members.push_back(std::move(w));
    }
    return ChannelFamily::enumerated(input, Alphabet::indexed(output_size), std::move(members));
}

SuiteResult verify_joint_entropy_bound(int cases, std::uint64_t seed, double tol) {
    SuiteResult suite;
    suite.name = "joint_entropy_bound";
    CounterRng rng(seed, 41);
    for (int c = 0; c < cases; ++c) {
        auto source = random_family(rng);
        auto channel = random_channel(rng, source.alphabet(), 2 + rng.next_below(4));
        double joint = nonlinear_joint_entropy(source, channel).value_bits;
        double rhs = nonlinear_entropy(source).value_bits +
                     nonlinear_conditional_entropy(source, channel).value_bits;
        double slack = rhs - joint;
        nlohmann::json info = case_json(
            {{"source", family_to_json(source)}, {"channel", channel_to_json(channel)}});
        // Equality must hold for singleton pairs.
        if (source.is_singleton() && channel.is_singleton()) slack = -std::abs(slack);
        record(suite, slack, tol, info);
    }
    return suite;
}

SuiteResult verify_mutual_information_lower_bound(int cases, std::uint64_t seed, double tol) {
    SuiteResult suite;
    suite.name = "mutual_information_lower_bound";
    CounterRng rng(seed, 42);
    for (int c = 0; c < cases; ++c) {
        auto source = random_family(rng);
        auto channel = random_channel(rng, source.alphabet(), 2 + rng.next_below(4));
        double mi = nonlinear_mutual_information(source, channel).value_bits;
        double hx = nonlinear_entropy(source).value_bits;
        double hxy = reverse_conditional_entropy(source, channel, ReverseCoupling::Independent);
        double slack = mi - (hx - hxy);
        if (source.is_singleton() && channel.is_singleton()) slack = -std::abs(slack);
        record(suite, slack, tol,
               case_json({{"source", family_to_json(source)}, {"channel", channel_to_json(channel)}}));
    }
    return suite;
}

SuiteResult verify_entropy_chain_rule(int cases, std::uint64_t seed, double tol) {
    SuiteResult suite;
    suite.name = "entropy_chain_rule";
    CounterRng rng(seed, 43);
    for (int c = 0; c < cases; ++c) {
        auto f1 = random_family(rng, 1, 3, 2, 3);
        const std::size_t n1 = f1.alphabet().size();
        const std::size_t n2 = 2 + rng.next_below(2);
        const std::size_t n3 = 2 + rng.next_below(2);
        auto c2 = random_channel(rng, f1.alphabet(), n2, 1, 3);
        auto pair_alphabet = Alphabet::indexed(n1 * n2);
        auto c3 = random_channel(rng, pair_alphabet, n3, 1, 3);

        // Exhaustive sups over every index combination.
        double joint = 0.0;
        for (std::size_t a = 0; a < f1.member_count(); ++a)
            for (std::size_t b = 0; b < c2.member_count(); ++b)
                for (std::size_t d = 0; d < c3.member_count(); ++d) {
                    std::vector<double> pj;
                    pj.reserve(n1 * n2 * n3);
                    for (std::size_t x1 = 0; x1 < n1; ++x1)
                        for (std::size_t x2 = 0; x2 < n2; ++x2)
                            for (std::size_t x3 = 0; x3 < n3; ++x3)
                                pj.push_back(f1.member(a).probs[x1] * c2.member(b)[x1][x2] *
                                             c3.member(d)[x1 * n2 + x2][x3]);
                    joint = std::max(joint, entropy_bits(pj));
                }

        double h1 = nonlinear_entropy(f1).value_bits;
        double h2g1 = nonlinear_conditional_entropy(f1, c2).value_bits;

        // H(X3 | X1, X2): outer sup over the induced pair family.
        std::vector<double> h3_rows(n1 * n2, 0.0);
        for (std::size_t xz = 0; xz < n1 * n2; ++xz)
            for (std::size_t d = 0; d < c3.member_count(); ++d)
                h3_rows[xz] = std::max(h3_rows[xz], entropy_bits(c3.member(d)[xz]));
        double h3g12 = 0.0;
        for (std::size_t a = 0; a < f1.member_count(); ++a)
            for (std::size_t b = 0; b < c2.member_count(); ++b) {
                double v = 0.0;
                for (std::size_t x1 = 0; x1 < n1; ++x1)
                    for (std::size_t x2 = 0; x2 < n2; ++x2)
                        v += f1.member(a).probs[x1] * c2.member(b)[x1][x2] * h3_rows[x1 * n2 + x2];
                h3g12 = std::max(h3g12, v);
            }

        record(suite, h1 + h2g1 + h3g12 - joint, tol,
               case_json({{"source", family_to_json(f1)},
                          {"stage2", channel_to_json(c2)},
                          {"stage3", channel_to_json(c3)}}));
    }
    return suite;
}

SuiteResult verify_mutual_information_chain_rule(int cases, std::uint64_t seed, double tol) {
    SuiteResult suite;
    suite.name = "mutual_information_chain_rule";
    CounterRng rng(seed, 44);
    for (int c = 0; c < cases; ++c) {
        auto f1 = random_family(rng, 1, 3, 2, 3);
        const std::size_t n1 = f1.alphabet().size();
        const std::size_t n2 = 2 + rng.next_below(2);
        const std::size_t ny = 2 + rng.next_below(3);
        auto c2 = random_channel(rng, f1.alphabet(), n2, 1, 3);
        auto c3 = random_channel(rng, Alphabet::indexed(n1 * n2), ny, 1, 3);

        // I(X1, X2; Y): source family over pairs, channel c3.
        double lhs = 0.0;
        for (std::size_t a = 0; a < f1.member_count(); ++a)
            for (std::size_t b = 0; b < c2.member_count(); ++b) {
                std::vector<double> pab(n1 * n2, 0.0);
                for (std::size_t x1 = 0; x1 < n1; ++x1)
                    for (std::size_t x2 = 0; x2 < n2; ++x2)
                        pab[x1 * n2 + x2] = f1.member(a).probs[x1] * c2.member(b)[x1][x2];
                for (std::size_t d = 0; d < c3.member_count(); ++d)
                    lhs = std::max(lhs, mutual_information_bits(pab, c3.member(d)));
            }

        // I(X1; Y): marginalized channels indexed by (b, d).
        double i1 = 0.0;
        for (std::size_t b = 0; b < c2.member_count(); ++b)
            for (std::size_t d = 0; d < c3.member_count(); ++d) {
                Matrix w(n1, std::vector<double>(ny, 0.0));
                for (std::size_t x1 = 0; x1 < n1; ++x1)
                    for (std::size_t x2 = 0; x2 < n2; ++x2)
                        for (std::size_t y = 0; y < ny; ++y)
                            w[x1][y] += c2.member(b)[x1][x2] * c3.member(d)[x1 * n2 + x2][y];
                for (std::size_t a = 0; a < f1.member_count(); ++a)
                    i1 = std::max(i1, mutual_information_bits(f1.member(a).probs, w));
            }

        // I(X2; Y | X1): per-z conditional values weighted by the X1 family.
        std::vector<std::vector<Matrix>> slices(c3.member_count(),
                                                std::vector<Matrix>(n1));
        for (std::size_t d = 0; d < c3.member_count(); ++d)
            for (std::size_t z = 0; z < n1; ++z) {
                Matrix s(n2);
                for (std::size_t x2 = 0; x2 < n2; ++x2) s[x2] = c3.member(d)[z * n2 + x2];
                slices[d][z] = std::move(s);
            }
        ConditionalChannelFamily y_given_x2x1(Alphabet::indexed(n2), f1.alphabet(),
                                              Alphabet::indexed(ny), slices);
        std::vector<double> cmi(n1, 0.0);
        for (std::size_t z = 0; z < n1; ++z)
            cmi[z] = nonlinear_conditional_mutual_information(c2, y_given_x2x1, z).value_bits;
        double i2g1 = sublinear_expectation(f1, cmi);

        record(suite, i1 + i2g1 - lhs, tol,
               case_json({{"source", family_to_json(f1)},
                          {"stage2", channel_to_json(c2)},
                          {"stage3", channel_to_json(c3)}}));
    }
    return suite;
}

SuiteResult verify_fano_inequality(int cases, std::uint64_t seed, double tol) {
    SuiteResult suite;
    suite.name = "fano_inequality";
    CounterRng rng(seed, 45);
    for (int c = 0; c < cases; ++c) {
        auto source = random_family(rng);
        const std::size_t m = source.alphabet().size();
        auto channel = random_channel(rng, source.alphabet(), m);

        std::vector<double> pe;
        for (std::size_t i = 0; i < source.member_count(); ++i)
            for (std::size_t j = 0; j < channel.member_count(); ++j) {
                double e = 0.0;
                for (std::size_t x = 0; x < m; ++x)
                    e += source.member(i).probs[x] * (1.0 - channel.member(j)[x][x]);
                pe.push_back(std::clamp(e, 0.0, 1.0));
            }
        double bound = fano_bound(ErrorProbFamily::set(pe), m);
        double h = reverse_conditional_entropy(source, channel, ReverseCoupling::PerMember);
        record(suite, bound - h, tol,
               case_json({{"source", family_to_json(source)}, {"channel", channel_to_json(channel)}}));
    }
    return suite;
}

SuiteResult verify_data_processing(int cases, std::uint64_t seed, double tol) {
    SuiteResult suite;
    suite.name = "data_processing";
    CounterRng rng(seed, 46);
    for (int c = 0; c < cases; ++c) {
        auto source = random_family(rng, 1, 3, 2, 4);
        std::size_t ny = 2 + rng.next_below(3);
        std::size_t nz = 2 + rng.next_below(3);
        auto c1 = random_channel(rng, source.alphabet(), ny, 1, 3);
        auto c2 = random_channel(rng, Alphabet::indexed(ny), nz, 1, 3);

        std::vector<Matrix> composed;
        for (std::size_t j = 0; j < c1.member_count(); ++j)
            for (std::size_t k = 0; k < c2.member_count(); ++k)
                composed.push_back(compose(c1.member(j), c2.member(k)));
        auto cxz = ChannelFamily::enumerated(source.alphabet(), Alphabet::indexed(nz), composed);

        double ixz = nonlinear_mutual_information(source, cxz).value_bits;
        double ixy = nonlinear_mutual_information(source, c1).value_bits;

        std::vector<std::vector<double>> y_members;
        for (std::size_t i = 0; i < source.member_count(); ++i)
            for (std::size_t j = 0; j < c1.member_count(); ++j) {
                std::vector<double> py(ny, 0.0);
                for (std::size_t x = 0; x < source.alphabet().size(); ++x)
                    for (std::size_t y = 0; y < ny; ++y)
                        py[y] += source.member(i).probs[x] * c1.member(j)[x][y];
                y_members.push_back(std::move(py));
            }
        auto y_family = DistributionFamily::enumerated(Alphabet::indexed(ny), y_members);
        double iyz = nonlinear_mutual_information(y_family, c2).value_bits;

        record(suite, std::min(ixy, iyz) - ixz, tol,
               case_json({{"source", family_to_json(source)},
                          {"first", channel_to_json(c1)},
                          {"second", channel_to_json(c2)}}));
    }
    return suite;
}

std::vector<SuiteResult> verify_theorems(int cases, std::uint64_t seed, double tol) {
    return {verify_joint_entropy_bound(cases, seed, tol),
            verify_mutual_information_lower_bound(cases, seed, tol),
            verify_entropy_chain_rule(cases, seed, tol),
            verify_mutual_information_chain_rule(cases, seed, tol),
            verify_fano_inequality(cases, seed, tol),
            verify_data_processing(cases, seed, tol)};
}

SuiteResult verify_degeneration(int cases, std::uint64_t seed, double tol) {
    SuiteResult suite;
    suite.name = "degeneration";
    CounterRng rng(seed, 47);
    OptimizerConfig config;
    for (int c = 0; c < cases; ++c) {
        auto source = random_family(rng, 1, 1);
        const auto& p = source.member(0).probs;
        auto channel = random_channel(rng, source.alphabet(), 2 + rng.next_below(3), 1, 1);
        const auto& w = channel.member(0);

        double worst = 0.0;
        worst = std::max(worst, std::abs(nonlinear_entropy(source).value_bits - entropy_bits(p)));
        worst = std::max(worst, std::abs(nonlinear_joint_entropy(source, channel).value_bits -
                                         classical_joint_entropy(p, w)));
        double cond = 0.0;
        for (std::size_t x = 0; x < p.size(); ++x) cond += p[x] * entropy_bits(w[x]);
        worst = std::max(worst, std::abs(nonlinear_conditional_entropy(source, channel).value_bits -
                                         cond));
        worst = std::max(worst, std::abs(nonlinear_mutual_information(source, channel).value_bits -
                                         mutual_information_bits(p, w)));
        worst = std::max(worst, std::abs(source_cluster_rate(source) - entropy_bits(p)));

        // Capacity bound against an independent concave line search.
        double ba = channel_rate_bound(channel, config).value_bits;
        if (p.size() == 2) {
            auto [q, cap] = golden_section(
                [&](double t) { return mutual_information_bits({t, 1.0 - t}, w); }, 0.0, 1.0,
                1e-12);
            (void)q;
            worst = std::max(worst, std::abs(ba - cap) / 10.0);  // both 1e-8-accurate paths
        }
        record(suite, -worst, tol,
               case_json({{"source", family_to_json(source)}, {"channel", channel_to_json(channel)}}));
    }
    return suite;
}

SuiteResult verify_coding_ordering(int cases, std::uint64_t seed, double tol) {
    SuiteResult suite;
    suite.name = "coding_ordering";
    CounterRng rng(seed, 48);
    for (int c = 0; c < cases; ++c) {
        auto source = random_family(rng);
        double cluster = source_cluster_rate(source);
        double min_h = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < source.member_count(); ++i)
            min_h = std::min(min_h, source.member(i).entropy_bits());
        double hat = nonlinear_entropy(source).value_bits;
        double slack = std::min(min_h - cluster, hat - min_h);
        record(suite, slack, tol, case_json({{"source", family_to_json(source)}}));
    }
    return suite;
}

nlohmann::json suite_to_json(const SuiteResult& r) {
    nlohmann::json j;
    j["name"] = r.name;
    j["cases"] = r.cases;
    j["violations"] = r.violations;
    j["worst_violation"] = r.worst_violation;
    if (!r.failing_cases.empty()) j["failing_cases"] = r.failing_cases;
    return j;
}

}  // namespace nonlinfo
