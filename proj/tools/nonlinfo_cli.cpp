// nonlinfo: measures, coding bounds, and sampling experiments for finite
// distribution families.
//
// Family spec (JSON, also behind the --family sugar):
//   {"kind": "interval_bernoulli", "p": 0.4, "eps": 0.05}
//   {"kind": "singleton", "probs": [0.5, 0.5]}
//   {"kind": "enumerated", "members": [[0.2, 0.8], [0.6, 0.4]]}
//   {"kind": "interval_categorical", "lower": [...], "upper": [...]}
//   {"kind": "grid", "base": {...interval spec...}, "points": 101}
// Channel spec:
//   {"kind": "bsc", "p": 0.1, "eps": 0.02}
//   {"kind": "enumerated", "matrices": [[[...], ...], ...]}
//
// Every command prints a JSON report {tool, version, command, config, result}
// to stdout; the echoed config is a complete rerun recipe (see --config).
// Exit codes: 0 success, 1 property violation, 2 usage/config error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nonlinfo/coding.hpp"
#include "nonlinfo/families.hpp"
#include "nonlinfo/measures.hpp"
#include "nonlinfo/optimize.hpp"
#include "nonlinfo/report.hpp"
#include "nonlinfo/rng.hpp"
#include "nonlinfo/sampling.hpp"
#include "nonlinfo/verify.hpp"

namespace {

using nonlinfo::OrderedJson;
using json = nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw UsageError("expected a comma-separated list of numbers");
    return out;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("NONLINFO_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

// Strict merge: every key of `incoming` must already exist in `base`.
void merge_config(json& base, const json& incoming, const std::string& where) {
    for (const auto& [key, value] : incoming.items()) {
        if (!base.contains(key))
            throw UsageError("unknown config field '" + key + "' in " + where);
        if (base[key].is_object() && value.is_object() && key == "optimizer")
            merge_config(base[key], value, where + "/optimizer");
        else
            base[key] = value;
    }
}

json load_config_file(const std::string& path, const std::string& command) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    json doc = json::parse(in);
    // Accept either a bare config object or a full report for this command.
    if (doc.contains("config")) {
        if (doc.contains("command") && doc.at("command").get<std::string>() != command)
            throw UsageError("config file was produced by command '" +
                             doc.at("command").get<std::string>() + "', not '" + command + "'");
        return doc.at("config");
    }
    return doc;
}

nonlinfo::OptimizerConfig optimizer_of(const json& cfg) {
    auto opt = nonlinfo::optimizer_from_json(cfg.at("optimizer"));
    if (cfg.contains("seed")) opt.seed = cfg.at("seed").get<std::uint64_t>();
    return opt;
}

void emit_report(const std::string& command, const json& cfg, const OrderedJson& result) {
    OrderedJson report;
    report["tool"] = "nonlinfo";
    report["version"] = "0.1.0";
    report["command"] = command;
    report["config"] = OrderedJson(cfg);
    report["result"] = result;
    std::cout << report.dump(2) << "\n";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write output file '" + path + "'");
    out << content;
}

// Shared option plumbing -----------------------------------------------------

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> grid_points, theta_grid, lambda_grid, shards;
    std::optional<double> refine_tol, ba_tol;
    std::optional<int> ba_max_iter;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "JSON config file (or a prior report)");
        auto add_u64 = [&](const char* name, auto& slot, const char* help) {
            app->add_option_function<std::uint64_t>(
                name, [&slot](std::uint64_t v) { slot = v; }, help);
        };
        add_u64("--seed", seed, "RNG seed (default: NONLINFO_SEED or 0)");
        app->add_option_function<std::size_t>(
            "--grid-points", [this](std::size_t v) { grid_points = v; },
            "interval-parameter grid size");
        app->add_option_function<std::size_t>(
            "--theta-grid", [this](std::size_t v) { theta_grid = v; }, "source family grid");
        app->add_option_function<std::size_t>(
            "--lambda-grid", [this](std::size_t v) { lambda_grid = v; }, "channel family grid");
        app->add_option_function<std::size_t>(
            "--shards", [this](std::size_t v) { shards = v; }, "Monte-Carlo shard layout");
        app->add_option_function<double>(
            "--refine-tol", [this](double v) { refine_tol = v; }, "golden-section tolerance");
        app->add_option_function<double>(
            "--ba-tol", [this](double v) { ba_tol = v; }, "Blahut-Arimoto bracket tolerance");
        app->add_option_function<int>(
            "--ba-max-iter", [this](int v) { ba_max_iter = v; }, "Blahut-Arimoto iteration cap");
    }

    void apply(json& cfg) const {
        if (seed) cfg["seed"] = *seed;
        auto& opt = cfg["optimizer"];
        if (grid_points) opt["grid_points"] = *grid_points;
        if (theta_grid) opt["theta_grid"] = *theta_grid;
        if (lambda_grid) opt["lambda_grid"] = *lambda_grid;
        if (shards) opt["shards"] = *shards;
        if (refine_tol) opt["refine_tol"] = *refine_tol;
        if (ba_tol) opt["ba_tol"] = *ba_tol;
        if (ba_max_iter) opt["ba_max_iter"] = *ba_max_iter;
    }
};

json default_optimizer_json() {
    return json(nonlinfo::to_json(nonlinfo::OptimizerConfig{}));
}

struct FamilyOpts {
    std::string kind, probs, members_json, family_json;
    std::optional<double> p, eps;

    void attach(CLI::App* app, bool short_eps = true) {
        app->add_option("--family", kind,
                        "family kind: interval-bernoulli | singleton | enumerated");
        app->add_option("--p,--family-p", p,
                        "interval center (family, or channel when unused by family)");
        app->add_option(short_eps ? "--eps,--family-eps" : "--family-eps", eps,
                        "family interval radius");
        app->add_option("--probs", probs, "singleton probabilities, comma separated");
        app->add_option("--members", members_json, "enumerated members as a JSON array");
        app->add_option("--family-json", family_json, "full family spec as JSON");
    }

    // Returns the family spec and whether --p/--eps were consumed by it.
    std::pair<json, bool> build() const {
        if (!family_json.empty()) return {json::parse(family_json), false};
        if (kind.empty()) return {json(), false};
        json spec;
        if (kind == "interval-bernoulli") {
            if (!p) throw UsageError("interval-bernoulli family needs --p");
            spec["kind"] = "interval_bernoulli";
            spec["p"] = *p;
            spec["eps"] = eps.value_or(0.0);
            return {spec, true};
        }
        if (kind == "singleton") {
            if (probs.empty()) throw UsageError("singleton family needs --probs");
            spec["kind"] = "singleton";
            spec["probs"] = parse_double_list(probs);
            return {spec, false};
        }
        if (kind == "enumerated") {
            if (members_json.empty()) throw UsageError("enumerated family needs --members");
            spec["kind"] = "enumerated";
            spec["members"] = json::parse(members_json);
            return {spec, false};
        }
        throw UsageError("unknown family kind '" + kind + "'");
    }
};

struct ChannelOpts {
    std::string kind, channel_json;
    std::optional<double> p, eps;

    void attach(CLI::App* app) {
        app->add_option("--channel", kind, "channel kind: bsc");
        app->add_option("--channel-p", p, "BSC flip-probability center");
        app->add_option("--channel-eps", eps, "BSC flip-probability radius");
        app->add_option("--channel-json", channel_json, "full channel spec as JSON");
    }

    json build(const FamilyOpts& fam, bool family_used_p) const {
        if (!channel_json.empty()) return json::parse(channel_json);
        if (kind.empty()) return json();
        if (kind != "bsc") throw UsageError("unknown channel kind '" + kind + "'");
        json spec;
        spec["kind"] = "bsc";
        // --p/--eps bind to the channel when the family did not take them.
        if (p)
            spec["p"] = *p;
        else if (!family_used_p && fam.p)
            spec["p"] = *fam.p;
        else
            throw UsageError("bsc channel needs --channel-p (or free --p)");
        if (eps)
            spec["eps"] = *eps;
        else if (!family_used_p && fam.eps)
            spec["eps"] = *fam.eps;
        else
            spec["eps"] = 0.0;
        return spec;
    }
};

nonlinfo::Matrix distortion_from_config(const json& cfg, std::size_t nx) {
    const auto& d = cfg.at("distortion");
    if (d.is_string()) {
        if (d.get<std::string>() != "hamming")
            throw UsageError("unknown distortion '" + d.get<std::string>() + "'");
        nonlinfo::Matrix m(nx, std::vector<double>(nx, 1.0));
        for (std::size_t i = 0; i < nx; ++i) m[i][i] = 0.0;
        return m;
    }
    nonlinfo::Matrix m;
    for (const auto& row : d) m.push_back(row.get<std::vector<double>>());
    return m;
}

nonlinfo::SelectionPolicy policy_from_config(const json& cfg) {
    const std::string kind = cfg.at("policy").get<std::string>();
    const std::size_t block = cfg.at("block_len").get<std::size_t>();
    if (kind == "per-symbol-uniform") return nonlinfo::SelectionPolicy::per_symbol_uniform();
    if (kind == "per-block-uniform") return nonlinfo::SelectionPolicy::per_block_uniform(block);
    if (kind == "per-block-extremes") return nonlinfo::SelectionPolicy::per_block_extremes(block);
    if (kind == "drift") return nonlinfo::SelectionPolicy::drift(cfg.at("period").get<double>());
    if (kind == "fixed") return nonlinfo::SelectionPolicy::fixed(cfg.at("theta").get<double>());
    throw UsageError("unknown policy '" + kind + "'");
}

// Figure emitters ------------------------------------------------------------

std::string emit_figure(int which, const json& cfg, const nonlinfo::OptimizerConfig& opt,
                        OrderedJson& summary) {
    using namespace nonlinfo;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();

    auto size_or = [&](const char* key, std::size_t dflt) {
        return cfg.at(key).is_null() ? dflt : cfg.at(key).get<std::size_t>();
    };

    auto p_grid = [&] {
        std::vector<double> g;
        double step = cfg.at("p_step").get<double>();
        for (double p = 0.0; p <= 1.0 + 1e-12; p += step) g.push_back(std::min(p, 1.0));
        return g;
    };

    switch (which) {
        case 2: {
            auto eps_list = cfg.at("eps_list").get<std::vector<double>>();
            header = {"p"};
            for (double e : eps_list) header.push_back("H_eps_" + csv_field(e));
            for (double p : p_grid()) {
                std::vector<std::string> row{csv_field(p)};
                for (double e : eps_list) {
                    auto fam = DistributionFamily::interval_bernoulli(p, e);
                    row.push_back(csv_field(nonlinear_entropy(fam, opt).value_bits));
                }
                rows.push_back(row);
            }
            break;
        }
        case 3: {
            json fam_spec = cfg.at("family");
            if (fam_spec.is_null())
                fam_spec = json({{"kind", "interval_bernoulli"}, {"p", 5.0 / 12.0}, {"eps", 1.0 / 12.0}});
            auto fam = family_from_json(fam_spec);
            auto n = size_or("samples", 1024);
            auto path =
                sample_source(fam, SelectionPolicy::per_block_uniform(size_or("block_len", 128)),
                              n, seed);
            std::vector<double> grid;
            for (double p = 0.01; p < 0.995; p += 0.005) grid.push_back(p);
            auto conf = bernoulli_fit_confidence(path.symbols, grid);
            header = {"p", "confidence"};
            double best = 0.0;
            for (auto& [p, c] : conf) {
                rows.push_back({csv_field(p), csv_field(c)});
                best = std::max(best, c);
            }
            summary["max_confidence"] = best;
            break;
        }
        case 4: {
            auto eps_list = cfg.at("eps_list").get<std::vector<double>>();
            header = {"p", "shannon"};
            for (double e : eps_list) header.push_back("cluster_eps_" + csv_field(e));
            for (double e : eps_list) header.push_back("entropy_eps_" + csv_field(e));
            for (double p : p_grid()) {
                std::vector<std::string> row{csv_field(p), csv_field(binary_entropy(p))};
                for (double e : eps_list)
                    row.push_back(csv_field(
                        source_cluster_rate(DistributionFamily::interval_bernoulli(p, e))));
                for (double e : eps_list)
                    row.push_back(csv_field(
                        nonlinear_entropy(DistributionFamily::interval_bernoulli(p, e), opt)
                            .value_bits));
                rows.push_back(row);
            }
            break;
        }
        case 6: {
            auto eps_list = cfg.at("eps_list").get<std::vector<double>>();
            header = {"p", "shannon_capacity"};
            for (double e : eps_list) header.push_back("cbar_eps_" + csv_field(e));
            for (double p : p_grid()) {
                std::vector<std::string> row{csv_field(p), csv_field(1.0 - binary_entropy(p))};
                for (double e : eps_list)
                    row.push_back(csv_field(
                        channel_rate_bound(ChannelFamily::interval_bsc(p, e), opt).value_bits));
                rows.push_back(row);
            }
            break;
        }
        case 7:
        case 8: {
            // Figure 7 contrasts an uncertain source with figure 8's fixed
            // Bernoulli reference; the policy is immaterial for a singleton.
            json fam_spec = cfg.at("family");
            if (fam_spec.is_null())
                fam_spec = which == 7
                               ? json({{"kind", "interval_bernoulli"}, {"p", 5.0 / 12.0}, {"eps", 1.0 / 12.0}})
                               : json({{"kind", "singleton"}, {"probs", {0.42, 0.58}}});
            auto fam = family_from_json(fam_spec);
            auto n = size_or("samples", 10000);
            SamplePath path = sample_source(
                fam, SelectionPolicy::per_block_uniform(size_or("block_len", 500)), n, seed);
            std::vector<double> values(path.symbols.begin(), path.symbols.end());
            auto stats = window_stats(values, cfg.at("window").get<std::size_t>(),
                                      cfg.at("sub").get<std::size_t>(),
                                      cfg.at("count").get<std::size_t>());
            header = {"n", "upper_mean", "lower_mean"};
            double gap = 0.0;
            for (const auto& ws : stats) {
                rows.push_back({std::to_string(ws.n_index), csv_field(ws.upper_mean),
                                csv_field(ws.lower_mean)});
                gap += ws.upper_mean - ws.lower_mean;
            }
            summary["mean_gap"] = gap / static_cast<double>(stats.size());
            break;
        }
        default:
            throw UsageError("figure must be one of 2, 3, 4, 6, 7, 8");
    }
    summary["rows"] = rows.size();
    return to_csv(header, rows);
}

// Command runners ------------------------------------------------------------

int run_from_config(const std::string& command, json& cfg) {
    using namespace nonlinfo;
    auto opt = optimizer_of(cfg);

    if (command == "measure") {
        const std::string kind = cfg.at("kind").get<std::string>();
        OrderedJson result;
        if (kind == "fano") {
            ErrorProbFamily errors =
                cfg.contains("pe_values") && !cfg.at("pe_values").is_null()
                    ? ErrorProbFamily::set(cfg.at("pe_values").get<std::vector<double>>())
                    : ErrorProbFamily::interval(cfg.at("pe_lo").get<double>(),
                                                cfg.at("pe_hi").get<double>());
            result["value_bits"] = fano_bound(errors, cfg.at("alphabet_size").get<std::size_t>());
        } else if (kind == "entropy") {
            auto fam = family_from_json(cfg.at("family"));
            result = to_json(nonlinear_entropy(fam, opt));
        } else {
            auto fam = family_from_json(cfg.at("family"));
            auto ch = channel_from_json(cfg.at("channel"));
            MeasureResult m;
            if (kind == "joint") m = nonlinear_joint_entropy(fam, ch, opt);
            else if (kind == "conditional") m = nonlinear_conditional_entropy(fam, ch, opt);
            else if (kind == "mutual") m = nonlinear_mutual_information(fam, ch, opt);
            else throw UsageError("unknown measure '" + kind + "'");
            result = to_json(m);
        }
        emit_report(command, cfg, result);
        return 0;
    }

    if (command == "bound") {
        const std::string kind = cfg.at("kind").get<std::string>();
        OrderedJson result;
        if (kind == "source-rate") {
            result["value_bits"] = source_cluster_rate(family_from_json(cfg.at("family")));
        } else if (kind == "channel-rate") {
            result = to_json(channel_rate_bound(channel_from_json(cfg.at("channel")), opt));
        } else {
            throw UsageError("bound kind must be source-rate or channel-rate");
        }
        emit_report(command, cfg, result);
        return 0;
    }

    if (command == "rd-curve") {
        auto fam = family_from_json(cfg.at("family"));
        auto dmat = distortion_from_config(cfg, fam.alphabet().size());
        auto curve =
            rate_distortion_curve(fam, dmat, cfg.at("d_grid").get<std::vector<double>>(), opt);
        OrderedJson result = OrderedJson::array();
        for (const auto& pt : curve) result.push_back(to_json(pt));
        if (cfg.contains("out") && !cfg.at("out").is_null()) {
            std::vector<std::vector<std::string>> rows;
            for (const auto& pt : curve)
                rows.push_back({csv_field(pt.D), csv_field(pt.value_bits),
                                pt.feasible ? "true" : "false"});
            write_file(cfg.at("out").get<std::string>(),
                       to_csv({"D", "value_bits", "feasible"}, rows));
        }
        emit_report(command, cfg, result);
        return 0;
    }

    if (command == "simulate") {
        const std::string kind = cfg.at("kind").get<std::string>();
        CodingReport report;
        if (kind == "source-coding") {
            SourceCodingParams params;
            params.n = cfg.at("n").get<int>();
            params.eps = cfg.at("eps").get<double>();
            params.criterion = cfg.at("criterion").get<std::string>() == "max"
                                   ? SourceCodingCriterion::Max
                                   : SourceCodingCriterion::Min;
            if (cfg.contains("mu") && !cfg.at("mu").is_null())
                params.mu = cfg.at("mu").get<double>();
            params.seed = cfg.at("seed").get<std::uint64_t>();
            report = simulate_source_coding(family_from_json(cfg.at("family")), params, opt);
        } else if (kind == "channel") {
            ChannelCodingParams params;
            params.message_count = cfg.at("messages").get<std::size_t>();
            params.n = cfg.at("n").get<int>();
            params.r_prime = cfg.at("r_prime").get<double>();
            params.trials = cfg.at("trials").get<std::uint64_t>();
            params.seed = cfg.at("seed").get<std::uint64_t>();
            params.method = cfg.at("method").get<std::string>();
            const std::string rule = cfg.at("on_empty").get<std::string>();
            params.on_empty = rule == "error"   ? EmptyDecodeRule::Error
                              : rule == "first" ? EmptyDecodeRule::FirstMessage
                                                : EmptyDecodeRule::Erasure;
            report = simulate_channel_coding(channel_from_json(cfg.at("channel")), params, opt);
            if (report.degenerate_threshold)
                std::cerr << "warning: R' is at or above the channel rate bound; "
                             "the candidate set is degenerate\n";
        } else if (kind == "rate-distortion") {
            RateDistortionSimParams params;
            params.D = cfg.at("d").get<double>();
            params.rate_bits = cfg.at("rate").get<double>();
            params.n = cfg.at("n").get<int>();
            params.seed = cfg.at("seed").get<std::uint64_t>();
            params.distortion_band = cfg.at("band").get<double>();
            params.typicality_eps = cfg.at("typ_eps").get<double>();
            params.selection = cfg.at("select").get<std::string>() == "min-distortion"
                                   ? RdSelection::MinDistortion
                                   : RdSelection::SmallestIndex;
            if (cfg.contains("r_prime") && !cfg.at("r_prime").is_null())
                params.r_prime = cfg.at("r_prime").get<double>();
            auto fam = family_from_json(cfg.at("family"));
            report = simulate_rate_distortion(fam, distortion_from_config(cfg, fam.alphabet().size()),
                                              params, opt);
        } else {
            throw UsageError("simulate kind must be source-coding, channel, or rate-distortion");
        }
        emit_report(command, cfg, to_json(report));
        return 0;
    }

    if (command == "sample") {
        auto fam = family_from_json(cfg.at("family"));
        auto path = sample_source(fam, policy_from_config(cfg), cfg.at("length").get<std::size_t>(),
                                  cfg.at("seed").get<std::uint64_t>());
        const std::string format = cfg.at("format").get<std::string>();
        if (cfg.contains("out") && !cfg.at("out").is_null()) {
            if (format == "u8") {
                write_file(cfg.at("out").get<std::string>(),
                           std::string(path.symbols.begin(), path.symbols.end()));
            } else {
                std::string text;
                for (auto s : path.symbols) {
                    text += fam.alphabet().label(s);
                    text += '\n';
                }
                write_file(cfg.at("out").get<std::string>(), text);
            }
        }
        OrderedJson result;
        double mean = 0.0;
        for (auto s : path.symbols) mean += s;
        result["length"] = path.symbols.size();
        result["mean_symbol_index"] = mean / static_cast<double>(path.symbols.size());
        emit_report(command, cfg, result);
        return 0;
    }

    if (command == "estimate") {
        std::ifstream in(cfg.at("in").get<std::string>());
        if (!in) throw UsageError("cannot open sample file");
        std::vector<double> samples;
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) samples.push_back(std::stod(line));
        auto [upper, lower] = max_mean_estimate(samples, cfg.at("n_block").get<std::size_t>(),
                                                cfg.at("m_blocks").get<std::size_t>());
        OrderedJson result;
        result["upper"] = upper;
        result["lower"] = lower;
        result["samples"] = samples.size();
        emit_report(command, cfg, result);
        return 0;
    }

    if (command == "lln") {
        auto fam = family_from_json(cfg.at("family"));
        std::vector<double> f;
        if (cfg.at("f_kind").get<std::string>() == "logloss") {
            // f(x) = log2(1 / p_q(x)) for the reference member q.
            double q = cfg.at("q").get<double>();
            if (!(q > 0.0 && q < 1.0)) throw UsageError("lln: q must lie in (0, 1)");
            f = {-std::log2(q), -std::log2(1.0 - q)};
        } else {
            f = cfg.at("f_values").get<std::vector<double>>();
        }
        auto report = lln_experiment(fam, f, cfg.at("b").get<double>(),
                                     cfg.at("n_max").get<std::size_t>(),
                                     cfg.at("seed").get<std::uint64_t>());
        if (!report.b_inside_interval)
            std::cerr << "warning: target b lies outside the mean interval ["
                      << report.lower_mean << ", " << report.upper_mean << "]\n";
        emit_report(command, cfg, to_json(report));
        return 0;
    }

    if (command == "fig") {
        OrderedJson summary;
        std::string csv = emit_figure(cfg.at("which").get<int>(), cfg, opt, summary);
        if (cfg.contains("out") && !cfg.at("out").is_null())
            write_file(cfg.at("out").get<std::string>(), csv);
        else
            std::cout << csv;
        emit_report(command, cfg, summary);
        return 0;
    }

    if (command == "verify") {
        const std::string which = cfg.at("which").get<std::string>();
        int cases = cfg.at("cases").get<int>();
        std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
        std::vector<SuiteResult> suites;
        if (which == "theorems") {
            suites = verify_theorems(cases, seed);
        } else if (which == "degeneration") {
            suites = {verify_degeneration(cases, seed)};
        } else if (which == "coding") {
            suites = {verify_coding_ordering(cases, seed)};
        } else {
            throw UsageError("verify suite must be theorems, degeneration, or coding");
        }
        OrderedJson result = OrderedJson::array();
        bool ok = true;
        for (const auto& s : suites) {
            result.push_back(OrderedJson(suite_to_json(s)));
            ok = ok && s.passed();
        }
        emit_report(command, cfg, result);
        return ok ? 0 : 1;
    }

    throw UsageError("unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"information measures and coding experiments for distribution families"};
    app.require_subcommand(1);

    // Per-command state.
    CommonOpts common;
    FamilyOpts family;
    ChannelOpts channel;
    std::string positional_kind, positional_sub;
    json overrides;

    auto add_family = [&](CLI::App* cmd, bool short_eps = true) { family.attach(cmd, short_eps); };
    auto add_channel = [&](CLI::App* cmd) { channel.attach(cmd); };

    auto* measure = app.add_subcommand("measure", "entropy | joint | conditional | mutual | fano");
    measure->add_option("kind", positional_kind)->required();
    add_family(measure);
    add_channel(measure);
    std::string pe_values;
    std::optional<double> pe_lo, pe_hi;
    std::optional<std::size_t> alphabet_size;
    measure->add_option("--pe-values", pe_values, "error probabilities, comma separated");
    measure->add_option("--pe-lo", pe_lo);
    measure->add_option("--pe-hi", pe_hi);
    measure->add_option("--alphabet-size", alphabet_size);
    common.attach(measure);

    auto* bound = app.add_subcommand("bound", "source-rate | channel-rate");
    bound->add_option("kind", positional_kind)->required();
    add_family(bound);
    add_channel(bound);
    common.attach(bound);

    auto* rd = app.add_subcommand("rd-curve", "minimax rate-distortion curve");
    add_family(rd);
    std::string d_grid_str = "0,0.05,0.1,0.15,0.2,0.25,0.3";
    std::string distortion_str = "hamming";
    std::string out_path;
    rd->add_option("--d-grid", d_grid_str, "distortion grid, comma separated");
    rd->add_option("--distortion", distortion_str, "hamming or a JSON matrix");
    rd->add_option("--out", out_path, "CSV output path");
    common.attach(rd);

    auto* simulate = app.add_subcommand("simulate", "source-coding | channel | rate-distortion");
    simulate->add_option("kind", positional_kind)->required();
    add_family(simulate, /*short_eps=*/false);
    add_channel(simulate);
    std::optional<int> sim_n;
    std::optional<double> sim_eps, r_prime, sim_d, sim_rate, band, typ_eps, mu;
    std::optional<std::size_t> messages;
    std::optional<std::uint64_t> trials;
    std::string criterion = "min", on_empty = "erasure", method = "auto";
    simulate->add_option("--n", sim_n, "block length");
    simulate->add_option("--eps", sim_eps, "typicality half-width");
    // family radius on simulate: --family-eps (typicality owns --eps here)
    simulate->add_option("--mu", mu, "typical band center (min criterion)");
    simulate->add_option("--criterion", criterion, "min | max");
    simulate->add_option("--messages,--m", messages, "channel message count");
    simulate->add_option("--r-prime", r_prime, "density threshold rate");
    simulate->add_option("--trials", trials, "Monte-Carlo trials");
    simulate->add_option("--on-empty", on_empty, "erasure | error | first");
    simulate->add_option("--method", method, "auto | enumeration | monte-carlo");
    simulate->add_option("--d", sim_d, "distortion target D");
    simulate->add_option("--rate", sim_rate, "source coding rate R_s");
    simulate->add_option("--band", band, "distortion acceptance half-width");
    simulate->add_option("--typ-eps", typ_eps, "input typicality half-width");
    simulate->add_option("--distortion", distortion_str, "hamming or a JSON matrix");
    std::string rd_select = "smallest-index";
    simulate->add_option("--select", rd_select, "smallest-index | min-distortion");
    common.attach(simulate);

    auto* sample = app.add_subcommand("sample", "draw a sample path");
    add_family(sample);
    std::string policy = "per-block-uniform", sample_format = "text";
    std::optional<std::size_t> length, block_len;
    std::optional<double> period, fixed_theta;
    sample->add_option("--policy", policy,
                       "per-symbol-uniform | per-block-uniform | per-block-extremes | drift | fixed");
    sample->add_option("--length", length);
    sample->add_option("--block-len", block_len);
    sample->add_option("--period", period);
    sample->add_option("--theta", fixed_theta);
    sample->add_option("--out", out_path, "sample output path");
    sample->add_option("--format", sample_format, "text | u8");
    common.attach(sample);

    auto* estimate = app.add_subcommand("estimate", "max-mean");
    estimate->add_option("kind", positional_kind)->required();
    std::string in_path;
    std::optional<std::size_t> n_block, m_blocks;
    estimate->add_option("--in", in_path, "sample file, one value per line");
    estimate->add_option("--n-block", n_block);
    estimate->add_option("--m-blocks", m_blocks);
    common.attach(estimate);

    auto* lln = app.add_subcommand("lln", "cluster-point steering experiment");
    add_family(lln);
    std::string f_kind = "logloss", f_values;
    std::optional<double> lln_b, lln_q;
    std::optional<std::size_t> n_max;
    lln->add_option("--f-kind", f_kind, "logloss | values");
    lln->add_option("--f-values", f_values, "f per symbol, comma separated");
    lln->add_option("--q", lln_q, "reference member for the logloss objective");
    lln->add_option("--b", lln_b, "target cluster point");
    lln->add_option("--n-max", n_max);
    common.attach(lln);

    auto* fig = app.add_subcommand("fig", "figure data emitters (2, 3, 4, 6, 7, 8)");
    std::optional<int> which_fig;
    std::string eps_list_str;
    std::optional<double> p_step;
    std::optional<std::size_t> fig_samples, fig_block, fig_window, fig_sub, fig_count;
    fig->add_option("--which", which_fig)->required(false);
    fig->add_option("--eps-list", eps_list_str, "comma-separated epsilon list");
    fig->add_option("--p-step", p_step);
    fig->add_option("--samples", fig_samples);
    fig->add_option("--block-len", fig_block);
    fig->add_option("--window", fig_window);
    fig->add_option("--sub", fig_sub);
    fig->add_option("--count", fig_count);
    fig->add_option("--out", out_path, "CSV output path");
    add_family(fig);
    common.attach(fig);

    auto* verify = app.add_subcommand("verify", "theorems | degeneration | coding");
    verify->add_option("which", positional_kind)->required();
    std::optional<int> cases;
    std::string suite_alias;
    verify->add_option("--cases", cases);
    verify->add_option("--suite", suite_alias, "suite alias (coding: ordering)");
    common.attach(verify);

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* sub = app.get_subcommands().front();
        const std::string command = sub->get_name();

        // Build the default config for the command, overlay --config, then
        // the explicit flags.
        json cfg;
        cfg["seed"] = default_seed();
        cfg["optimizer"] = default_optimizer_json();

        auto [family_spec, family_used_p] = family.build();

        if (command == "measure") {
            cfg["kind"] = positional_kind;
            cfg["family"] = json();
            cfg["channel"] = json();
            cfg["pe_values"] = json();
            cfg["pe_lo"] = json();
            cfg["pe_hi"] = json();
            cfg["alphabet_size"] = json();
        } else if (command == "bound") {
            cfg["kind"] = positional_kind;
            cfg["family"] = json();
            cfg["channel"] = json();
        } else if (command == "rd-curve") {
            cfg["family"] = json();
            cfg["distortion"] = "hamming";
            cfg["d_grid"] = json::array();
            cfg["out"] = json();
        } else if (command == "simulate") {
            cfg["kind"] = positional_kind;
            cfg["family"] = json();
            cfg["channel"] = json();
            cfg["distortion"] = "hamming";
            cfg["n"] = 12;
            cfg["eps"] = 0.05;
            cfg["mu"] = json();
            cfg["criterion"] = "min";
            cfg["messages"] = 2;
            cfg["r_prime"] = json();
            cfg["trials"] = 100000;
            cfg["on_empty"] = "erasure";
            cfg["method"] = "auto";
            cfg["d"] = 0.1;
            cfg["rate"] = 0.6;
            cfg["band"] = 0.05;
            cfg["typ_eps"] = 0.25;
            cfg["select"] = "smallest-index";
        } else if (command == "sample") {
            cfg["family"] = json();
            cfg["policy"] = "per-block-uniform";
            cfg["length"] = 10000;
            cfg["block_len"] = 500;
            cfg["period"] = 1000.0;
            cfg["theta"] = 0.0;
            cfg["out"] = json();
            cfg["format"] = "text";
        } else if (command == "estimate") {
            if (positional_kind != "max-mean") throw UsageError("estimate supports: max-mean");
            cfg["in"] = json();
            cfg["n_block"] = 500;
            cfg["m_blocks"] = 10;
        } else if (command == "lln") {
            cfg["family"] = json();
            cfg["f_kind"] = "logloss";
            cfg["f_values"] = json();
            cfg["q"] = 1.0 / 3.0;
            cfg["b"] = 0.0;
            cfg["n_max"] = 100000;
        } else if (command == "fig") {
            cfg["which"] = 2;
            cfg["eps_list"] = json::array({0.0, 0.05, 0.1});
            cfg["p_step"] = 0.01;
            cfg["family"] = json();  // per-figure defaults resolved at run time
            cfg["samples"] = json();
            cfg["block_len"] = json();
            cfg["window"] = 5000;
            cfg["sub"] = 500;
            cfg["count"] = 10;
            cfg["out"] = json();
        } else if (command == "verify") {
            cfg["which"] = positional_kind;
            cfg["cases"] = 1000;
        }

        if (!common.config_path.empty())
            merge_config(cfg, load_config_file(common.config_path, command), common.config_path);

        // Explicit flag overrides.
        if (!family_spec.is_null() && cfg.contains("family")) cfg["family"] = family_spec;
        json channel_spec = channel.build(family, family_used_p ||
                                                      (!family_spec.is_null() &&
                                                       family_spec.value("kind", "") ==
                                                           "interval_bernoulli"));
        if (!channel_spec.is_null() && cfg.contains("channel")) cfg["channel"] = channel_spec;
        common.apply(cfg);

        if (command == "measure") {
            if (!pe_values.empty()) cfg["pe_values"] = parse_double_list(pe_values);
            if (pe_lo) cfg["pe_lo"] = *pe_lo;
            if (pe_hi) cfg["pe_hi"] = *pe_hi;
            if (alphabet_size) cfg["alphabet_size"] = *alphabet_size;
        } else if (command == "rd-curve") {
            if (rd->count("--d-grid") || cfg.at("d_grid").empty())
                cfg["d_grid"] = parse_double_list(d_grid_str);
            if (rd->count("--distortion")) cfg["distortion"] = distortion_str == "hamming"
                                                                   ? json("hamming")
                                                                   : json::parse(distortion_str);
            if (!out_path.empty()) cfg["out"] = out_path;
        } else if (command == "simulate") {
            if (sim_n) cfg["n"] = *sim_n;
            if (sim_eps) cfg["eps"] = *sim_eps;
            if (mu) cfg["mu"] = *mu;
            if (simulate->count("--criterion")) cfg["criterion"] = criterion;
            if (messages) cfg["messages"] = *messages;
            if (r_prime) cfg["r_prime"] = *r_prime;
            if (trials) cfg["trials"] = *trials;
            if (simulate->count("--on-empty")) cfg["on_empty"] = on_empty;
            if (simulate->count("--method")) cfg["method"] = method;
            if (sim_d) cfg["d"] = *sim_d;
            if (sim_rate) cfg["rate"] = *sim_rate;
            if (band) cfg["band"] = *band;
            if (typ_eps) cfg["typ_eps"] = *typ_eps;
            if (simulate->count("--select")) cfg["select"] = rd_select;
            if (simulate->count("--distortion"))
                cfg["distortion"] =
                    distortion_str == "hamming" ? json("hamming") : json::parse(distortion_str);
        } else if (command == "sample") {
            if (sample->count("--policy")) cfg["policy"] = policy;
            if (length) cfg["length"] = *length;
            if (block_len) cfg["block_len"] = *block_len;
            if (period) cfg["period"] = *period;
            if (fixed_theta) cfg["theta"] = *fixed_theta;
            if (!out_path.empty()) cfg["out"] = out_path;
            if (sample->count("--format")) cfg["format"] = sample_format;
        } else if (command == "estimate") {
            if (!in_path.empty()) cfg["in"] = in_path;
            if (n_block) cfg["n_block"] = *n_block;
            if (m_blocks) cfg["m_blocks"] = *m_blocks;
        } else if (command == "lln") {
            if (lln->count("--f-kind")) cfg["f_kind"] = f_kind;
            if (!f_values.empty()) cfg["f_values"] = parse_double_list(f_values);
            if (lln_q) cfg["q"] = *lln_q;
            if (lln_b) cfg["b"] = *lln_b;
            if (n_max) cfg["n_max"] = *n_max;
        } else if (command == "fig") {
            if (which_fig) cfg["which"] = *which_fig;
            if (!eps_list_str.empty()) cfg["eps_list"] = parse_double_list(eps_list_str);
            if (p_step) cfg["p_step"] = *p_step;
            if (fig_samples) cfg["samples"] = *fig_samples;
            if (fig_block) cfg["block_len"] = *fig_block;
            if (fig_window) cfg["window"] = *fig_window;
            if (fig_sub) cfg["sub"] = *fig_sub;
            if (fig_count) cfg["count"] = *fig_count;
            if (!out_path.empty()) cfg["out"] = out_path;
        } else if (command == "verify") {
            if (cases) cfg["cases"] = *cases;
        }

        return run_from_config(command, cfg);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
