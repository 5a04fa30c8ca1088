#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nonlinfo/coding.hpp"
#include "nonlinfo/measures.hpp"
#include "nonlinfo/optimize.hpp"
#include "nonlinfo/sampling.hpp"

namespace nonlinfo {

// Deterministic JSON views of the result types. Reports are ordered_json so
// reruns are byte-identical.
using OrderedJson = nlohmann::ordered_json;

OrderedJson to_json(const MeasureResult& r);
OrderedJson to_json(const CodingReport& r);
OrderedJson to_json(const RdCurvePoint& p);
OrderedJson to_json(const LlnReport& r);
OrderedJson to_json(const OptimizerConfig& c);
OptimizerConfig optimizer_from_json(const nlohmann::json& j);

/// RFC 4180 CSV: header row, CRLF line endings, quoting where required.
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);
std::string csv_field(double v);

/// Minimal JSON-schema subset checker (type/properties/required/items/enum);
/// enough to validate the report documents against docs/report.schema.json.
/// Returns an empty string when the document conforms, else a diagnostic.
std::string validate_schema(const nlohmann::json& doc, const nlohmann::json& schema);

}  // namespace nonlinfo
