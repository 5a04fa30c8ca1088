#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nonlinfo/coding.hpp"
#include "nonlinfo/families.hpp"
#include "nonlinfo/measures.hpp"
#include "nonlinfo/optimize.hpp"
#include "nonlinfo/report.hpp"
#include "nonlinfo/sampling.hpp"
#include "nonlinfo/verify.hpp"

namespace py = pybind11;
using namespace nonlinfo;

namespace {

// Specs cross the boundary as JSON strings; results as plain dicts.
DistributionFamily family_of(const std::string& spec) {
    return family_from_json(nlohmann::json::parse(spec));
}

ChannelFamily channel_of(const std::string& spec) {
    return channel_from_json(nlohmann::json::parse(spec));
}

py::object json_to_py(const nlohmann::json& j) {
    py::object loads = py::module_::import("json").attr("loads");
    return loads(j.dump());
}

py::dict measure_dict(const MeasureResult& m) {
    py::dict d;
    d["value_bits"] = m.value_bits;
    d["witness"] = json_to_py(m.witness);
    d["tolerance"] = m.tolerance;
    return d;
}

py::dict coding_dict(const CodingReport& r) {
    return py::cast<py::dict>(json_to_py(nlohmann::json(to_json(r))));
}

OptimizerConfig config_of(std::size_t grid_points, std::size_t theta_grid,
                          std::size_t lambda_grid, double ba_tol) {
    OptimizerConfig c;
    c.grid_points = grid_points;
    c.theta_grid = theta_grid;
    c.lambda_grid = lambda_grid;
    c.ba_tol = ba_tol;
    return c;
}

}  // namespace

PYBIND11_MODULE(_nonlinfo, m) {
    m.doc() = "information measures and coding experiments for finite distribution families";

    m.def(
        "sublinear_expectation",
        [](const std::string& spec, const std::vector<double>& f) {
            return sublinear_expectation(family_of(spec), f);
        },
        py::arg("family"), py::arg("f"),
        "sup over the family of the linear expectation of f");
    m.def(
        "conjugate_expectation",
        [](const std::string& spec, const std::vector<double>& f) {
            return conjugate_expectation(family_of(spec), f);
        },
        py::arg("family"), py::arg("f"));
    m.def(
        "capacity",
        [](const std::string& spec, const std::vector<std::size_t>& event) {
            auto c = capacity(family_of(spec), event);
            return py::make_tuple(c.upper, c.lower);
        },
        py::arg("family"), py::arg("event"), "upper/lower capacity (V(A), v(A)) of an event");
    m.def(
        "sequential_expectation",
        [](const std::string& outer, const std::string& inner, const Matrix& phi) {
            return sequential_expectation(family_of(outer), family_of(inner), phi);
        },
        py::arg("outer"), py::arg("inner"), py::arg("phi"),
        "nested expectation with the inner family evaluated per outer symbol");

    m.def(
        "nonlinear_entropy",
        [](const std::string& spec) { return measure_dict(nonlinear_entropy(family_of(spec))); },
        py::arg("family"));
    m.def(
        "nonlinear_joint_entropy",
        [](const std::string& fam, const std::string& ch) {
            return measure_dict(nonlinear_joint_entropy(family_of(fam), channel_of(ch)));
        },
        py::arg("family"), py::arg("channel"));
    m.def(
        "nonlinear_conditional_entropy",
        [](const std::string& fam, const std::string& ch) {
            return measure_dict(nonlinear_conditional_entropy(family_of(fam), channel_of(ch)));
        },
        py::arg("family"), py::arg("channel"));
    m.def(
        "nonlinear_mutual_information",
        [](const std::string& fam, const std::string& ch) {
            return measure_dict(nonlinear_mutual_information(family_of(fam), channel_of(ch)));
        },
        py::arg("family"), py::arg("channel"));
    m.def(
        "fano_bound",
        [](const std::vector<double>& pe, std::size_t alphabet_size) {
            return fano_bound(ErrorProbFamily::set(pe), alphabet_size);
        },
        py::arg("pe_values"), py::arg("alphabet_size"));

    m.def(
        "blahut_arimoto",
        [](const Matrix& channel, double ba_tol) {
            auto r = blahut_arimoto(channel, config_of(2001, 101, 101, ba_tol));
            py::dict d;
            d["capacity_bits"] = r.capacity_bits;
            d["input"] = r.input;
            d["bracket"] = r.bracket;
            d["iterations"] = r.iterations;
            d["converged"] = r.converged;
            return d;
        },
        py::arg("channel"), py::arg("ba_tol") = 1e-9);
    m.def(
        "classical_rate_distortion",
        [](const std::vector<double>& p, const Matrix& d, double D) {
            return classical_rate_distortion(p, d, D);
        },
        py::arg("p"), py::arg("distortion"), py::arg("D"));
    m.def(
        "minimax_rate_distortion",
        [](const std::string& fam, const Matrix& d, double D) {
            auto r = minimax_over_q(family_of(fam), d, D);
            py::dict out;
            out["feasible"] = r.feasible;
            out["value_bits"] = r.value_bits;
            out["q_star"] = r.q_star;
            out["alternating_value"] = r.alternating_value;
            out["oracle_value"] = r.oracle_value;
            out["oracle_used"] = r.oracle_used;
            out["mismatch_flagged"] = r.mismatch_flagged;
            out["min_achievable_distortion"] = r.min_achievable_distortion;
            return out;
        },
        py::arg("family"), py::arg("distortion"), py::arg("D"));
    m.def(
        "golden_section",
        [](const std::function<double(double)>& f, double a, double b, double tol) {
            return golden_section(f, a, b, tol);
        },
        py::arg("f"), py::arg("a"), py::arg("b"), py::arg("tol") = 1e-10,
        "maximize a unimodal function; returns (x, f(x))");

    m.def(
        "source_cluster_rate",
        [](const std::string& spec) { return source_cluster_rate(family_of(spec)); },
        py::arg("family"));
    m.def(
        "channel_rate_bound",
        [](const std::string& ch) { return measure_dict(channel_rate_bound(channel_of(ch))); },
        py::arg("channel"));
    m.def(
        "simulate_source_coding",
        [](const std::string& fam, int n, double eps, const std::string& criterion,
           std::optional<double> mu, std::uint64_t seed) {
            SourceCodingParams params;
            params.n = n;
            params.eps = eps;
            params.criterion =
                criterion == "max" ? SourceCodingCriterion::Max : SourceCodingCriterion::Min;
            params.mu = mu;
            params.seed = seed;
            return coding_dict(simulate_source_coding(family_of(fam), params));
        },
        py::arg("family"), py::arg("n"), py::arg("eps"), py::arg("criterion") = "min",
        py::arg("mu") = std::nullopt, py::arg("seed") = 0);
    m.def(
        "simulate_channel_coding",
        [](const std::string& ch, std::size_t messages, int n, double r_prime,
           std::uint64_t trials, std::uint64_t seed, const std::string& method,
           const std::string& on_empty) {
            ChannelCodingParams params;
            params.message_count = messages;
            params.n = n;
            params.r_prime = r_prime;
            params.trials = trials;
            params.seed = seed;
            params.method = method;
            params.on_empty = on_empty == "error"   ? EmptyDecodeRule::Error
                              : on_empty == "first" ? EmptyDecodeRule::FirstMessage
                                                    : EmptyDecodeRule::Erasure;
            return coding_dict(simulate_channel_coding(channel_of(ch), params));
        },
        py::arg("channel"), py::arg("messages"), py::arg("n"), py::arg("r_prime"),
        py::arg("trials") = 100000, py::arg("seed") = 0, py::arg("method") = "auto",
        py::arg("on_empty") = "erasure");
    m.def(
        "rate_distortion_curve",
        [](const std::string& fam, const Matrix& d, const std::vector<double>& grid) {
            auto curve = rate_distortion_curve(family_of(fam), d, grid);
            py::list out;
            for (const auto& pt : curve) out.append(json_to_py(nlohmann::json(to_json(pt))));
            return out;
        },
        py::arg("family"), py::arg("distortion"), py::arg("d_grid"));
    m.def(
        "simulate_rate_distortion",
        [](const std::string& fam, const Matrix& d, double D, double rate, int n,
           std::uint64_t seed, double band, double typ_eps, std::optional<double> r_prime,
           const std::string& select) {
            RateDistortionSimParams params;
            params.D = D;
            params.rate_bits = rate;
            params.n = n;
            params.seed = seed;
            params.distortion_band = band;
            params.typicality_eps = typ_eps;
            params.r_prime = r_prime;
            params.selection = select == "min-distortion" ? RdSelection::MinDistortion
                                                          : RdSelection::SmallestIndex;
            return coding_dict(simulate_rate_distortion(family_of(fam), d, params));
        },
        py::arg("family"), py::arg("distortion"), py::arg("D"), py::arg("rate"), py::arg("n"),
        py::arg("seed") = 0, py::arg("band") = 0.05, py::arg("typ_eps") = 0.25,
        py::arg("r_prime") = std::nullopt, py::arg("select") = "smallest-index");

    m.def(
        "sample_source",
        [](const std::string& fam, const std::string& policy, std::size_t block_len,
           double period, double theta, std::size_t length, std::uint64_t seed) {
            SelectionPolicy p;
            if (policy == "per-symbol-uniform") p = SelectionPolicy::per_symbol_uniform();
            else if (policy == "per-block-uniform") p = SelectionPolicy::per_block_uniform(block_len);
            else if (policy == "per-block-extremes") p = SelectionPolicy::per_block_extremes(block_len);
            else if (policy == "drift") p = SelectionPolicy::drift(period);
            else if (policy == "fixed") p = SelectionPolicy::fixed(theta);
            else throw std::invalid_argument("unknown policy '" + policy + "'");
            auto path = sample_source(family_of(fam), p, length, seed);
            py::dict d;
            d["symbols"] = path.symbols;
            d["thetas"] = path.thetas;
            return d;
        },
        py::arg("family"), py::arg("policy") = "per-block-uniform", py::arg("block_len") = 500,
        py::arg("period") = 1000.0, py::arg("theta") = 0.0, py::arg("length") = 10000,
        py::arg("seed") = 0);
    m.def("max_mean_estimate", &max_mean_estimate, py::arg("samples"), py::arg("n_block"),
          py::arg("m_blocks"));
    m.def(
        "window_stats",
        [](const std::vector<double>& samples, std::size_t window, std::size_t sub,
           std::size_t count) {
            py::list out;
            for (const auto& ws : window_stats(samples, window, sub, count))
                out.append(py::make_tuple(ws.n_index, ws.upper_mean, ws.lower_mean));
            return out;
        },
        py::arg("samples"), py::arg("window") = 5000, py::arg("sub") = 500, py::arg("count") = 10);
    m.def(
        "lln_experiment",
        [](const std::string& fam, const std::vector<double>& f, double b, std::size_t n_max,
           std::uint64_t seed) {
            return py::cast<py::dict>(
                json_to_py(nlohmann::json(to_json(lln_experiment(family_of(fam), f, b, n_max, seed)))));
        },
        py::arg("family"), py::arg("f"), py::arg("b"), py::arg("n_max") = 100000,
        py::arg("seed") = 0);
    m.def("binomial_test_pvalue", &binomial_test_pvalue, py::arg("successes"), py::arg("n"),
          py::arg("p"));
    m.def(
        "bernoulli_fit_confidence",
        [](const std::vector<std::uint8_t>& samples, const std::vector<double>& grid) {
            return bernoulli_fit_confidence(samples, grid);
        },
        py::arg("samples"), py::arg("p_grid"));

    m.def(
        "verify_theorems",
        [](int cases, std::uint64_t seed) {
            py::list out;
            for (const auto& s : verify_theorems(cases, seed))
                out.append(json_to_py(suite_to_json(s)));
            return out;
        },
        py::arg("cases") = 200, py::arg("seed") = 7);

    m.attr("__version__") = "0.1.0";
}
