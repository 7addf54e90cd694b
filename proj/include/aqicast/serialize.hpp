#pragma once

#include "aqicast/evaluate.hpp"
#include "aqicast/feature_select.hpp"
#include "aqicast/svm.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace aqicast {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const SvmModel& model);
/// Throws Error(config) on a malformed or wrong-version document.
SvmModel svm_model_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const FeatureRanking& ranking, const SelectConfig& config);
FeatureRanking ranking_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const EvalReport& report);

/// Header: n,accuracy_pct,error_pct,forecast_time_ms,per_sample_ms
void write_report_csv_header(std::ostream& out);
void write_report_csv_row(std::ostream& out, const EvalReport& report);

/// Two-space indented dump with a trailing newline. Object keys are sorted,
/// so equal documents serialize to identical bytes.
std::string dump(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace aqicast
