#include "nonlinfo/report.hpp"

#include <cmath>
#include <sstream>

namespace nonlinfo {

namespace {

// NaN is not representable in JSON; reports carry null instead.
OrderedJson num_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

}  // namespace

OrderedJson to_json(const MeasureResult& r) {
    OrderedJson j;
    j["value_bits"] = r.value_bits;
    j["witness"] = r.witness;
    j["tolerance"] = r.tolerance;
    return j;
}

OrderedJson to_json(const CodingReport& r) {
    OrderedJson j;
    j["rate_bits"] = r.rate_bits;
    j["max_error"] = r.max_error;
    j["min_error"] = r.min_error;
    j["n"] = r.n;
    j["method"] = r.method;
    j["seed"] = r.seed;
    j["set_size"] = r.set_size;
    j["empty_set"] = r.empty_set;
    j["mu"] = num_or_null(r.mu);
    j["grid_min_error"] = num_or_null(r.grid_min_error);
    j["grid_max_error"] = num_or_null(r.grid_max_error);
    j["trials"] = r.trials;
    j["mc_standard_error"] = r.mc_standard_error;
    j["miss_min"] = num_or_null(r.miss_min);
    j["miss_max"] = num_or_null(r.miss_max);
    j["degenerate_threshold"] = r.degenerate_threshold;
    j["shards"] = r.shards;
    j["distortion_min"] = num_or_null(r.distortion_min);
    j["distortion_max"] = num_or_null(r.distortion_max);
    return j;
}

OrderedJson to_json(const RdCurvePoint& p) {
    OrderedJson j;
    j["D"] = p.D;
    j["value_bits"] = p.feasible ? OrderedJson(p.value_bits) : OrderedJson(nullptr);
    j["feasible"] = p.feasible;
    j["min_achievable_distortion"] = p.min_achievable_distortion;
    j["mismatch_flagged"] = p.mismatch_flagged;
    return j;
}

OrderedJson to_json(const LlnReport& r) {
    OrderedJson j;
    j["b"] = r.b;
    j["b_inside_interval"] = r.b_inside_interval;
    j["lower_mean"] = r.lower_mean;
    j["upper_mean"] = r.upper_mean;
    j["min_abs_deviation"] = r.min_abs_deviation;
    j["argmin_n"] = r.argmin_n;
    j["final_mean"] = r.final_mean;
    auto traj = OrderedJson::array();
    for (const auto& [n, mean] : r.trajectory) traj.push_back(OrderedJson::array({n, mean}));
    j["trajectory"] = traj;
    return j;
}

OrderedJson to_json(const OptimizerConfig& c) {
    OrderedJson j;
    j["grid_points"] = c.grid_points;
    j["refine_tol"] = c.refine_tol;
    j["ba_tol"] = c.ba_tol;
    j["ba_max_iter"] = c.ba_max_iter;
    j["seed"] = c.seed;
    j["theta_grid"] = c.theta_grid;
    j["lambda_grid"] = c.lambda_grid;
    j["shards"] = c.shards;
    return j;
}

OptimizerConfig optimizer_from_json(const nlohmann::json& j) {
    OptimizerConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "grid_points") c.grid_points = value.get<std::size_t>();
        else if (key == "refine_tol") c.refine_tol = value.get<double>();
        else if (key == "ba_tol") c.ba_tol = value.get<double>();
        else if (key == "ba_max_iter") c.ba_max_iter = value.get<int>();
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else if (key == "theta_grid") c.theta_grid = value.get<std::size_t>();
        else if (key == "lambda_grid") c.lambda_grid = value.get<std::size_t>();
        else if (key == "shards") c.shards = value.get<std::size_t>();
        else throw std::invalid_argument("optimizer config: unknown field '" + key + "'");
    }
    c.validate();
    return c;
}

std::string csv_field(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

namespace {

std::string csv_escape(const std::string& s) {
    bool needs_quote = s.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quote) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(header[i]);
    }
    out += "\r\n";
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("csv: row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_escape(row[i]);
        }
        out += "\r\n";
    }
    return out;
}

namespace {

bool type_matches(const nlohmann::json& doc, const std::string& type) {
    if (type == "object") return doc.is_object();
    if (type == "array") return doc.is_array();
    if (type == "string") return doc.is_string();
    if (type == "number") return doc.is_number() || doc.is_null();  // null encodes NaN
    if (type == "integer") return doc.is_number_integer() || doc.is_number_unsigned();
    if (type == "boolean") return doc.is_boolean();
    if (type == "null") return doc.is_null();
    return false;
}

std::string validate_at(const nlohmann::json& doc, const nlohmann::json& schema,
                        const std::string& path) {
    if (schema.contains("type")) {
        const auto& t = schema.at("type");
        bool ok = false;
        if (t.is_array()) {
            for (const auto& one : t) ok = ok || type_matches(doc, one.get<std::string>());
        } else {
            ok = type_matches(doc, t.get<std::string>());
        }
        if (!ok) return path + ": type mismatch";
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& v : schema.at("enum")) ok = ok || v == doc;
        if (!ok) return path + ": value not in enum";
    }
    if (doc.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema.at("required"))
                if (!doc.contains(key.get<std::string>()))
                    return path + ": missing required field '" + key.get<std::string>() + "'";
        if (schema.contains("properties"))
            for (const auto& [key, sub] : schema.at("properties").items())
                if (doc.contains(key)) {
                    auto err = validate_at(doc.at(key), sub, path + "/" + key);
                    if (!err.empty()) return err;
                }
    }
    if (doc.is_array() && schema.contains("items")) {
        std::size_t i = 0;
        for (const auto& item : doc) {
            auto err = validate_at(item, schema.at("items"), path + "/" + std::to_string(i++));
            if (!err.empty()) return err;
        }
    }
    return "";
}

}  // namespace

std::string validate_schema(const nlohmann::json& doc, const nlohmann::json& schema) {
    return validate_at(doc, schema, "$");
}

}  // namespace nonlinfo
