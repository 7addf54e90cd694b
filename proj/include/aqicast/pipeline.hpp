#pragma once

#include "aqicast/aqi.hpp"
#include "aqicast/denoise.hpp"
#include "aqicast/evaluate.hpp"
#include "aqicast/feature_select.hpp"
#include "aqicast/ingest.hpp"
#include "aqicast/svm.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace aqicast {

struct SyntheticSpec {
  Eigen::Index rows = 2000;
  std::vector<std::string> cities = {"Synthetic"};
  std::int64_t step_seconds = 3600;
  std::map<std::string, PollutantWave> waves;  ///< resolved to all pollutants
};

enum class SplitMode { chronological, random };

std::string_view to_string(SplitMode mode) noexcept;
SplitMode parse_split_mode(std::string_view name);

struct PipelineConfig {
  std::optional<std::string> input;
  std::optional<SyntheticSpec> synthetic;
  std::vector<std::string> cities;  ///< empty keeps every city
  ImputePolicy impute;
  DenoiseConfig denoise;
  SelectConfig select;
  AqiConfig aqi;
  SvmHyper svm;  ///< svm.seed is taken from `seed`
  Eigen::Index window_size = 24;
  Eigen::Index horizon = 1;
  double split = 0.8;
  SplitMode split_mode = SplitMode::chronological;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  bool measure_timing = true;
  int curve_points = 10;

  /// Throws Error(config) or Error(argument).
  void validate() const;
};

/// Unknown keys are rejected so that typos surface as errors.
PipelineConfig config_from_json(const nlohmann::json& doc);
/// Every field, defaults included; the synthetic waves are fully expanded.
nlohmann::json to_json(const PipelineConfig& config);

struct SplitIndices {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};

/// floor(fraction * n) training indices. Chronological keeps the earliest
/// ones; random draws them with mt19937_64(seed). Both lists ascend.
SplitIndices split_indices(Eigen::Index n, double fraction, SplitMode mode, std::uint64_t seed);

/// Names of a flattened window: "<feature>@t-<lag>", oldest row first.
std::vector<std::string> window_feature_names(const std::vector<std::string>& features,
                                              Eigen::Index window_size);

/// Artifact file names inside the output directory.
namespace artifact {
inline constexpr const char* resolved_config = "resolved-config.json";
inline constexpr const char* ingested = "ingested.csv";
inline constexpr const char* ingest_stats = "ingest_stats.json";
inline constexpr const char* preprocessed = "preprocessed.csv";
inline constexpr const char* ranking = "ranking.json";
inline constexpr const char* model = "model.json";
inline constexpr const char* split = "split.json";
inline constexpr const char* test_rows = "test_rows.csv";
inline constexpr const char* truth = "truth.csv";
inline constexpr const char* predictions = "predictions.csv";
inline constexpr const char* eval_json = "eval_report.json";
inline constexpr const char* eval_csv = "eval_report.csv";
inline constexpr const char* curves = "curves.csv";
}  // namespace artifact

/// Labelled feature rows as stored in test_rows.csv / truth.csv.
struct LabelledRows {
  std::vector<long long> row_ids;
  std::vector<std::string> cities;
  std::vector<std::string> timestamps;
  std::vector<std::string> feature_names;
  Eigen::MatrixXd features;
};

LabelledRows read_rows_csv(const std::filesystem::path& path);
/// Selects the model's feature columns by name.
Eigen::MatrixXd rows_for_model(const LabelledRows& rows, const SvmModel& model);

struct BucketColumn {
  std::vector<long long> row_ids;
  std::vector<BucketLabel> labels;
};

/// Reads the row_id and bucket columns of a truth or predictions file.
BucketColumn read_bucket_csv(const std::filesystem::path& path);

/// Each stage reads the previous stage's artifacts from config.out and
/// writes its own; errors leave the stage name on the Error and remove any
/// file the stage had written.
void run_ingest(const PipelineConfig& config);
void run_preprocess(const PipelineConfig& config);
void run_select(const PipelineConfig& config);
void run_train(const PipelineConfig& config);
void run_predict(const PipelineConfig& config);
EvalReport run_evaluate(const PipelineConfig& config);

/// Writes resolved-config.json and runs every stage in order. On failure all
/// files written by this run are removed.
EvalReport run_pipeline(const PipelineConfig& config);

void write_resolved_config(const PipelineConfig& config);

/// Row-wise predictions of `rows` as CSV: row_id, bucket, score_<label>...
void write_predictions(std::ostream& out, const SvmModel& model, const LabelledRows& rows);

/// Evaluation over (predictions, truth) joined on row_id. When a model and
/// its rows are given and `measure` is set, per-sample time is measured.
struct EvalOutputs {
  EvalReport report;
  /// (n, accuracy_pct, error_pct, time_ms) over leading prefixes
  std::vector<std::array<double, 4>> curve;
};

EvalOutputs evaluate_files(const std::filesystem::path& predictions,
                           const std::filesystem::path& truth,
                           const std::optional<std::filesystem::path>& model,
                           const std::optional<std::filesystem::path>& rows, bool measure,
                           int curve_points);

void write_eval_outputs(const EvalOutputs& outputs, const std::filesystem::path& dir);

}  // namespace aqicast
