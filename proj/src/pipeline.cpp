#include "aqicast/pipeline.hpp"

#include "aqicast/csv.hpp"
#include "aqicast/error.hpp"
#include "aqicast/log.hpp"
#include "aqicast/serialize.hpp"
#include "aqicast/windows.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace aqicast {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(SplitMode mode) noexcept {
  return mode == SplitMode::random ? "random" : "chronological";
}

SplitMode parse_split_mode(std::string_view name) {
  if (name == "chronological") return SplitMode::chronological;
  if (name == "random") return SplitMode::random;
  throw Error(ErrorKind::config, "unknown split mode '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Config

void PipelineConfig::validate() const {
  if (!seed) {
    throw Error(ErrorKind::config, "seed must be given explicitly (config \"seed\" or --seed)");
  }
  if (input && synthetic) {
    throw Error(ErrorKind::config, "config has both \"input\" and \"synthetic\"; pick one");
  }
  if (!input && !synthetic) {
    throw Error(ErrorKind::config, "config needs an \"input\" path or a \"synthetic\" spec");
  }
  if (synthetic) {
    if (synthetic->rows < 2) throw Error(ErrorKind::config, "synthetic rows must be >= 2");
    if (synthetic->step_seconds < 1) throw Error(ErrorKind::config, "synthetic step_seconds must be >= 1");
    if (synthetic->cities.empty()) throw Error(ErrorKind::config, "synthetic cities must not be empty");
    std::set<std::string> unique(synthetic->cities.begin(), synthetic->cities.end());
    if (unique.size() != synthetic->cities.size() || unique.count("")) {
      throw Error(ErrorKind::config, "synthetic city names must be unique and non-empty");
    }
  }
  if (!(split > 0.0 && split < 1.0)) {
    throw Error(ErrorKind::config, "split fraction must be in (0, 1), got " + std::to_string(split));
  }
  if (window_size < 1) throw Error(ErrorKind::config, "window_size must be >= 1");
  if (horizon < 1) throw Error(ErrorKind::config, "horizon must be >= 1");
  if (curve_points < 1) throw Error(ErrorKind::config, "curve_points must be >= 1");
  if (denoise.levels < 1) throw Error(ErrorKind::config, "denoise levels must be >= 1");
  if (out.empty()) throw Error(ErrorKind::config, "output directory must not be empty");
  select.validate();
  aqi.validate();
  svm.validate();
}

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                std::string_view where) {
  if (!obj.is_object()) throw Error(ErrorKind::config, std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorKind::config, "unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& dst) {
  if (obj.contains(key)) dst = obj.at(key).get<T>();
}

PollutantWave wave_from_json(const json& doc, PollutantWave wave) {
  check_keys(doc, {"offset", "amplitude", "period", "sigma"}, "synthetic wave");
  read(doc, "offset", wave.offset);
  read(doc, "amplitude", wave.amplitude);
  read(doc, "period", wave.period);
  read(doc, "sigma", wave.sigma);
  return wave;
}

}  // namespace

PipelineConfig config_from_json(const json& doc) {
  PipelineConfig c;
  try {
    check_keys(doc, {"input", "synthetic", "cities", "impute", "denoise", "select", "aqi", "svm",
                     "window_size", "horizon", "split", "seed", "out", "measure_timing",
                     "curve_points"},
               "config");
    if (doc.contains("input") && !doc.at("input").is_null()) c.input = doc.at("input").get<std::string>();
    if (doc.contains("synthetic") && !doc.at("synthetic").is_null()) {
      const auto& s = doc.at("synthetic");
      check_keys(s, {"rows", "cities", "step_seconds", "waves"}, "synthetic");
      SyntheticSpec spec;
      read(s, "rows", spec.rows);
      read(s, "cities", spec.cities);
      read(s, "step_seconds", spec.step_seconds);
      for (auto p : kPollutants) spec.waves[std::string(p)] = default_wave(p);
      if (s.contains("waves")) {
        const auto& waves = s.at("waves");
        if (!waves.is_object()) throw Error(ErrorKind::config, "synthetic waves must be a JSON object");
        for (const auto& [name, wave] : waves.items()) {
          if (!is_pollutant(name)) {
            throw Error(ErrorKind::config, "synthetic wave for unknown pollutant '" + name + "'");
          }
          spec.waves[name] = wave_from_json(wave, default_wave(name));
        }
      }
      c.synthetic = std::move(spec);
    }
    read(doc, "cities", c.cities);
    if (doc.contains("impute")) {
      const auto& s = doc.at("impute");
      check_keys(s, {"mode", "max_gap"}, "impute");
      if (s.contains("mode")) c.impute.mode = parse_impute_mode(s.at("mode").get<std::string>());
      read(s, "max_gap", c.impute.max_gap);
    }
    if (doc.contains("denoise")) {
      const auto& s = doc.at("denoise");
      check_keys(s, {"filter", "levels", "threshold"}, "denoise");
      if (s.contains("filter")) c.denoise.filter = parse_wavelet_filter(s.at("filter").get<std::string>());
      read(s, "levels", c.denoise.levels);
      if (s.contains("threshold")) {
        c.denoise.threshold_rule = parse_threshold_rule(s.at("threshold").get<std::string>());
      }
    }
    if (doc.contains("select")) {
      const auto& s = doc.at("select");
      check_keys(s, {"k", "learning_rate", "max_iters", "tol", "redundancy_cutoff", "weight_regression"},
                 "select");
      read(s, "k", c.select.k);
      read(s, "learning_rate", c.select.learning_rate);
      read(s, "max_iters", c.select.max_iters);
      read(s, "tol", c.select.tol);
      read(s, "redundancy_cutoff", c.select.redundancy_cutoff);
      read(s, "weight_regression", c.select.weight_regression);
    }
    if (doc.contains("aqi")) {
      const auto& s = doc.at("aqi");
      check_keys(s, {"normalizer", "bounds"}, "aqi");
      read(s, "normalizer", c.aqi.normalizer);
      read(s, "bounds", c.aqi.bounds);
    }
    if (doc.contains("svm")) {
      const auto& s = doc.at("svm");
      check_keys(s, {"lambda", "epochs", "learning_rate", "batch_size"}, "svm");
      read(s, "lambda", c.svm.lambda);
      read(s, "epochs", c.svm.epochs);
      read(s, "learning_rate", c.svm.learning_rate);
      read(s, "batch_size", c.svm.batch_size);
    }
    read(doc, "window_size", c.window_size);
    read(doc, "horizon", c.horizon);
    if (doc.contains("split")) {
      const auto& s = doc.at("split");
      if (s.is_number()) {
        c.split = s.get<double>();
      } else {
        check_keys(s, {"fraction", "mode"}, "split");
        read(s, "fraction", c.split);
        if (s.contains("mode")) c.split_mode = parse_split_mode(s.at("mode").get<std::string>());
      }
    }
    if (doc.contains("seed") && !doc.at("seed").is_null()) c.seed = doc.at("seed").get<std::uint64_t>();
    read(doc, "out", c.out);
    read(doc, "measure_timing", c.measure_timing);
    read(doc, "curve_points", c.curve_points);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("bad config value: ") + e.what());
  }
  return c;
}

json to_json(const PipelineConfig& c) {
  json doc;
  doc["input"] = c.input ? json(*c.input) : json(nullptr);
  if (c.synthetic) {
    json waves = json::object();
    for (auto p : kPollutants) {
      const std::string name(p);
      auto it = c.synthetic->waves.find(name);
      const PollutantWave w = it != c.synthetic->waves.end() ? it->second : default_wave(p);
      waves[name] = {{"offset", w.offset}, {"amplitude", w.amplitude}, {"period", w.period}, {"sigma", w.sigma}};
    }
    doc["synthetic"] = {{"rows", c.synthetic->rows},
                        {"cities", c.synthetic->cities},
                        {"step_seconds", c.synthetic->step_seconds},
                        {"waves", std::move(waves)}};
  } else {
    doc["synthetic"] = nullptr;
  }
  doc["cities"] = c.cities;
  doc["impute"] = {{"mode", std::string(to_string(c.impute.mode))}, {"max_gap", c.impute.max_gap}};
  doc["denoise"] = {{"filter", std::string(to_string(c.denoise.filter))},
                    {"levels", c.denoise.levels},
                    {"threshold", std::string(to_string(c.denoise.threshold_rule))}};
  doc["select"] = {{"k", c.select.k},
                   {"learning_rate", c.select.learning_rate},
                   {"max_iters", c.select.max_iters},
                   {"tol", c.select.tol},
                   {"redundancy_cutoff", c.select.redundancy_cutoff},
                   {"weight_regression", c.select.weight_regression}};
  doc["aqi"] = {{"normalizer", c.aqi.normalizer}, {"bounds", c.aqi.bounds}};
  doc["svm"] = {{"lambda", c.svm.lambda},
                {"epochs", c.svm.epochs},
                {"learning_rate", c.svm.learning_rate},
                {"batch_size", c.svm.batch_size}};
  doc["window_size"] = c.window_size;
  doc["horizon"] = c.horizon;
  doc["split"] = {{"fraction", c.split}, {"mode", std::string(to_string(c.split_mode))}};
  doc["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  doc["out"] = c.out;
  doc["measure_timing"] = c.measure_timing;
  doc["curve_points"] = c.curve_points;
  return doc;
}

// ---------------------------------------------------------------------------
// Splits and windows

SplitIndices split_indices(Eigen::Index n, double fraction, SplitMode mode, std::uint64_t seed) {
  if (n < 0) throw Error(ErrorKind::argument, "split of a negative count");
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorKind::argument, "split fraction must be in (0, 1)");
  }
  const auto n_train = static_cast<Eigen::Index>(std::floor(fraction * static_cast<double>(n)));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (mode == SplitMode::random) {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + n_train);
  out.test.assign(order.begin() + n_train, order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<std::string> window_feature_names(const std::vector<std::string>& features,
                                              Eigen::Index window_size) {
  std::vector<std::string> names;
  names.reserve(features.size() * static_cast<std::size_t>(window_size));
  for (Eigen::Index w = 0; w < window_size; ++w) {
    for (const auto& f : features) names.push_back(f + "@t-" + std::to_string(window_size - 1 - w));
  }
  return names;
}

// ---------------------------------------------------------------------------
// Artifact I/O

namespace {

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  const fs::path& dir() const noexcept { return dir_; }
  fs::path path(const char* name) const { return dir_ / name; }

  void write(const char* name, const std::string& content) {
    fs::create_directories(dir_);
    const fs::path target = path(name);
    const fs::path tmp = target.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorKind::io, "cannot write '" + tmp.string() + "'");
      out << content;
      if (!out) throw Error(ErrorKind::io, "write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, target);
    written_.push_back(target);
  }

  void remove_all() noexcept {
    for (const auto& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    written_.clear();
  }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

template <typename F>
auto guarded(const char* stage, Outputs& outputs, F&& body) {
  try {
    log::info(std::string("stage ") + stage);
    return body();
  } catch (Error& e) {
    outputs.remove_all();
    if (e.stage().empty()) e.set_stage(stage);
    throw;
  } catch (const fs::filesystem_error& e) {
    outputs.remove_all();
    Error err(ErrorKind::io, e.what());
    err.set_stage(stage);
    throw err;
  } catch (...) {
    outputs.remove_all();
    throw;
  }
}

std::ifstream open_artifact(const fs::path& path, const char* producer) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::io, "missing artifact '" + path.string() + "'; run the '" +
                                   producer + "' stage first");
  }
  return in;
}

std::vector<SeriesFrame> read_frames(const fs::path& path, const char* producer, bool clamp) {
  auto in = open_artifact(path, producer);
  return parse_csv(in, default_schema(), clamp).frames;
}

std::string frames_csv(const std::vector<SeriesFrame>& frames) {
  std::ostringstream out;
  write_csv(out, frames);
  return out.str();
}

double parse_double(std::string_view cell, const fs::path& path, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
    throw Error(ErrorKind::numeric_input, "'" + path.string() + "' line " + std::to_string(line) +
                                              ": '" + std::string(cell) + "' is not a number");
  }
  return v;
}

long long parse_row_id(std::string_view cell, const fs::path& path, std::size_t line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
    throw Error(ErrorKind::numeric_input, "'" + path.string() + "' line " + std::to_string(line) +
                                              ": bad row_id '" + std::string(cell) + "'");
  }
  return v;
}

std::size_t require_column(const csv::Record& header, std::string_view name, const fs::path& path) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw Error(ErrorKind::schema, "'" + path.string() + "' has no '" + std::string(name) + "' column");
  }
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

LabelledRows read_rows_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) throw Error(ErrorKind::schema, "'" + path.string() + "' is empty");
  const std::size_t id_col = require_column(*header, "row_id", path);
  std::optional<std::size_t> city_col, ts_col;
  std::vector<std::size_t> feature_cols;
  LabelledRows rows;
  for (std::size_t i = 0; i < header->size(); ++i) {
    const auto& name = (*header)[i];
    if (i == id_col) continue;
    if (name == "city") {
      city_col = i;
    } else if (name == "timestamp") {
      ts_col = i;
    } else {
      feature_cols.push_back(i);
      rows.feature_names.push_back(name);
    }
  }
  std::vector<double> values;
  while (auto record = reader.next()) {
    if (record->size() != header->size()) {
      throw Error(ErrorKind::schema, "'" + path.string() + "' line " + std::to_string(reader.line()) +
                                         " has " + std::to_string(record->size()) + " fields, expected " +
                                         std::to_string(header->size()));
    }
    rows.row_ids.push_back(parse_row_id((*record)[id_col], path, reader.line()));
    rows.cities.push_back(city_col ? (*record)[*city_col] : std::string());
    rows.timestamps.push_back(ts_col ? (*record)[*ts_col] : std::string());
    for (auto j : feature_cols) values.push_back(parse_double((*record)[j], path, reader.line()));
  }
  const auto n = static_cast<Eigen::Index>(rows.row_ids.size());
  const auto d = static_cast<Eigen::Index>(feature_cols.size());
  rows.features = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, d);
  return rows;
}

Eigen::MatrixXd rows_for_model(const LabelledRows& rows, const SvmModel& model) {
  Eigen::MatrixXd X(rows.features.rows(), model.dimension());
  for (Eigen::Index j = 0; j < model.dimension(); ++j) {
    const auto& name = model.feature_names[static_cast<std::size_t>(j)];
    auto it = std::find(rows.feature_names.begin(), rows.feature_names.end(), name);
    if (it == rows.feature_names.end()) {
      throw Error(ErrorKind::name, "input rows lack model feature '" + name + "'");
    }
    X.col(j) = rows.features.col(it - rows.feature_names.begin());
  }
  return X;
}

BucketColumn read_bucket_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) throw Error(ErrorKind::schema, "'" + path.string() + "' is empty");
  const std::size_t id_col = require_column(*header, "row_id", path);
  const std::size_t bucket_col = require_column(*header, "bucket", path);
  BucketColumn out;
  while (auto record = reader.next()) {
    if (record->size() != header->size()) {
      throw Error(ErrorKind::schema, "'" + path.string() + "' line " + std::to_string(reader.line()) +
                                         " has the wrong number of fields");
    }
    out.row_ids.push_back(parse_row_id((*record)[id_col], path, reader.line()));
    out.labels.push_back(parse_bucket((*record)[bucket_col]));
  }
  return out;
}

void write_predictions(std::ostream& out, const SvmModel& model, const LabelledRows& rows) {
  const Eigen::MatrixXd X = rows_for_model(rows, model);
  csv::Record header{"row_id", "bucket"};
  for (auto c : model.classes) header.push_back("score_" + std::string(to_string(c)));
  csv::write_record(out, header);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Prediction p = predict(model, X.row(i).transpose());
    csv::Record record{std::to_string(rows.row_ids[static_cast<std::size_t>(i)]),
                       std::string(to_string(p.label))};
    for (Eigen::Index c = 0; c < p.scores.size(); ++c) record.push_back(csv::format_number(p.scores[c]));
    csv::write_record(out, record);
  }
}

EvalOutputs evaluate_files(const fs::path& predictions, const fs::path& truth,
                           const std::optional<fs::path>& model,
                           const std::optional<fs::path>& rows, bool measure, int curve_points) {
  if (curve_points < 1) throw Error(ErrorKind::argument, "curve_points must be >= 1");
  const BucketColumn pred = read_bucket_csv(predictions);
  const BucketColumn gold = read_bucket_csv(truth);
  if (pred.row_ids.size() != gold.row_ids.size()) {
    throw Error(ErrorKind::shape, std::to_string(pred.row_ids.size()) + " predictions but " +
                                      std::to_string(gold.row_ids.size()) + " truth rows");
  }
  std::map<long long, BucketLabel> by_id;
  for (std::size_t i = 0; i < gold.row_ids.size(); ++i) {
    if (!by_id.emplace(gold.row_ids[i], gold.labels[i]).second) {
      throw Error(ErrorKind::duplicate_key, "truth row_id " + std::to_string(gold.row_ids[i]) + " repeated");
    }
  }
  std::vector<BucketLabel> truth_aligned;
  truth_aligned.reserve(pred.row_ids.size());
  std::set<long long> seen;
  for (auto id : pred.row_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw Error(ErrorKind::shape, "prediction row_id " + std::to_string(id) + " has no truth row");
    }
    if (!seen.insert(id).second) {
      throw Error(ErrorKind::duplicate_key, "prediction row_id " + std::to_string(id) + " repeated");
    }
    truth_aligned.push_back(it->second);
  }

  double per_sample_ms = 0.0;
  if (measure && model && rows) {
    const SvmModel m = svm_model_from_json(read_json_file(*model));
    const LabelledRows r = read_rows_csv(*rows);
    per_sample_ms = measure_per_sample_ms(m, rows_for_model(r, m));
  }

  EvalOutputs out;
  out.report = make_report(pred.labels, truth_aligned, per_sample_ms);
  const auto n = static_cast<long long>(pred.labels.size());
  long long previous = 0;
  for (int k = 1; k <= curve_points; ++k) {
    const long long size = (n * k + curve_points - 1) / curve_points;
    if (size == previous || size == 0) continue;
    previous = size;
    const std::span<const BucketLabel> p(pred.labels.data(), static_cast<std::size_t>(size));
    const std::span<const BucketLabel> t(truth_aligned.data(), static_cast<std::size_t>(size));
    out.curve.push_back({static_cast<double>(size), accuracy(p, t), error_rate(p, t),
                         forecast_time(size, per_sample_ms)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stages

namespace {

void stage_ingest(const PipelineConfig& config, Outputs& outputs) {
  std::vector<SeriesFrame> frames;
  json stats_doc;
  if (config.input) {
    std::ifstream in(*config.input, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open input '" + *config.input + "'");
    ParseResult parsed = parse_csv(in);
    frames = std::move(parsed.frames);
    const auto& s = parsed.stats;
    stats_doc["parse"] = {{"data_rows", s.data_rows},
                          {"rejected_rows", s.rejected_rows},
                          {"extra_columns", s.extra_columns},
                          {"missing_schema_columns", s.missing_schema_columns},
                          {"unparseable_cells", s.unparseable_cells},
                          {"clamped_negatives", s.clamped_negatives}};
  } else {
    const auto& spec = *config.synthetic;
    std::vector<std::string> names = spec.cities;
    std::sort(names.begin(), names.end());
    for (const auto& city : names) {
      const auto index = static_cast<std::uint64_t>(
          std::find(spec.cities.begin(), spec.cities.end(), city) - spec.cities.begin());
      SyntheticParams params;
      params.city = city;
      params.step_seconds = spec.step_seconds;
      params.waves = spec.waves;
      frames.push_back(generate_synthetic(*config.seed + index, spec.rows, params));
    }
    stats_doc["parse"] = nullptr;
  }

  if (!config.cities.empty()) {
    std::vector<SeriesFrame> kept;
    for (const auto& city : config.cities) {
      auto it = std::find_if(frames.begin(), frames.end(),
                             [&](const SeriesFrame& f) { return f.city() == city; });
      if (it == frames.end()) throw Error(ErrorKind::config, "city '" + city + "' not in input");
      kept.push_back(*it);
    }
    std::sort(kept.begin(), kept.end(),
              [](const SeriesFrame& a, const SeriesFrame& b) { return a.city() < b.city(); });
    kept.erase(std::unique(kept.begin(), kept.end(),
                           [](const SeriesFrame& a, const SeriesFrame& b) { return a.city() == b.city(); }),
               kept.end());
    frames = std::move(kept);
  }

  std::vector<SeriesFrame> imputed;
  json cities = json::object();
  for (const auto& frame : frames) {
    SeriesFrame out = impute(frame, config.impute);
    cities[frame.city()] = {{"rows_in", frame.rows()},
                            {"rows_out", out.rows()},
                            {"missing_cells", frame.missing_count()}};
    if (out.rows() == 0) {
      log::warn("city '" + frame.city() + "' has no rows left after imputation; dropped");
      continue;
    }
    imputed.push_back(std::move(out));
  }
  if (imputed.empty()) throw Error(ErrorKind::insufficient_data, "no rows left after imputation");
  stats_doc["cities"] = std::move(cities);
  stats_doc["impute"] = {{"mode", std::string(to_string(config.impute.mode))},
                         {"max_gap", config.impute.max_gap}};

  outputs.write(artifact::ingested, frames_csv(imputed));
  outputs.write(artifact::ingest_stats, dump(stats_doc));
}

void stage_preprocess(const PipelineConfig& config, Outputs& outputs) {
  const auto frames = read_frames(outputs.path(artifact::ingested), "ingest", true);
  std::vector<SeriesFrame> denoised;
  denoised.reserve(frames.size());
  for (const auto& frame : frames) denoised.push_back(preprocess_frame(frame, config.denoise));
  outputs.write(artifact::preprocessed, frames_csv(denoised));
}

struct Prepared {
  std::vector<SeriesFrame> raw;
  std::vector<SeriesFrame> denoised;
};

Prepared read_prepared(const Outputs& outputs) {
  Prepared p;
  p.raw = read_frames(outputs.path(artifact::ingested), "ingest", true);
  p.denoised = read_frames(outputs.path(artifact::preprocessed), "preprocess", false);
  if (p.raw.size() != p.denoised.size()) {
    throw Error(ErrorKind::shape, "ingested and preprocessed artifacts list different cities");
  }
  for (std::size_t i = 0; i < p.raw.size(); ++i) {
    if (p.raw[i].city() != p.denoised[i].city() || p.raw[i].rows() != p.denoised[i].rows()) {
      throw Error(ErrorKind::shape, "ingested and preprocessed artifacts disagree for city '" +
                                        p.raw[i].city() + "'");
    }
  }
  return p;
}

void stage_select(const PipelineConfig& config, Outputs& outputs) {
  const Prepared p = read_prepared(outputs);
  Eigen::Index total = 0;
  for (const auto& f : p.denoised) total += f.rows();
  const auto& columns = p.denoised.front().columns();
  Eigen::MatrixXd X(total, static_cast<Eigen::Index>(columns.size()));
  Eigen::VectorXd y(total);
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < p.raw.size(); ++i) {
    const auto n = p.raw[i].rows();
    X.middleRows(at, n) = p.denoised[i].data();
    y.segment(at, n) = compute_aqi(p.raw[i]);
    at += n;
  }
  const FeatureRanking ranking = select_features(X, y, columns, "AQI", config.select);
  log::info("selected " + std::to_string(ranking.selected.size()) + " features");
  outputs.write(artifact::ranking, dump(to_json(ranking, config.select)));
}

void stage_train(const PipelineConfig& config, Outputs& outputs) {
  const Prepared p = read_prepared(outputs);
  open_artifact(outputs.path(artifact::ranking), "select").close();
  const FeatureRanking ranking = ranking_from_json(read_json_file(outputs.path(artifact::ranking)));
  if (ranking.selected.empty()) throw Error(ErrorKind::insufficient_data, "ranking selected no features");

  const auto names = window_feature_names(ranking.selected, config.window_size);
  std::vector<Eigen::RowVectorXd> train_rows, test_rows;
  std::vector<BucketLabel> train_labels, test_labels;
  std::vector<std::string> test_city, test_time;
  json split_doc = json::object();

  for (std::size_t c = 0; c < p.raw.size(); ++c) {
    const SeriesFrame& raw = p.raw[c];
    const Eigen::MatrixXd feats = p.denoised[c].select_columns(ranking.selected).data();
    const Eigen::VectorXd target = compute_aqi(raw);
    const WindowSet windows = make_windows(feats, target, config.window_size, config.horizon);
    const SplitIndices split =
        split_indices(windows.size(), config.split, config.split_mode, *config.seed + c);
    split_doc[raw.city()] = {{"windows", windows.size()},
                             {"train", split.train.size()},
                             {"test", split.test.size()}};
    auto label = [&](Eigen::Index i) {
      return bucket_of_score(normalize_aqi(windows.targets[i], config.aqi), config.aqi);
    };
    for (auto i : split.train) {
      train_rows.push_back(windows.samples.row(i));
      train_labels.push_back(label(i));
    }
    for (auto i : split.test) {
      test_rows.push_back(windows.samples.row(i));
      test_labels.push_back(label(i));
      test_city.push_back(raw.city());
      test_time.push_back(
          raw.timestamps()[static_cast<std::size_t>(i + config.window_size + config.horizon - 1)].to_string());
    }
  }
  if (train_rows.size() < 2) throw Error(ErrorKind::insufficient_data, "fewer than 2 training windows");
  if (test_rows.empty()) throw Error(ErrorKind::insufficient_data, "no test windows");

  const auto d = static_cast<Eigen::Index>(names.size());
  Eigen::MatrixXd X(static_cast<Eigen::Index>(train_rows.size()), d);
  for (std::size_t i = 0; i < train_rows.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = train_rows[i];
  SvmHyper hyper = config.svm;
  hyper.seed = *config.seed;
  const SvmModel model = train_svm(X, train_labels, hyper, names);

  std::ostringstream rows_csv, truth_csv;
  csv::Record header{"row_id", "city", "timestamp"};
  header.insert(header.end(), names.begin(), names.end());
  csv::write_record(rows_csv, header);
  csv::write_record(truth_csv, {"row_id", "bucket"});
  for (std::size_t i = 0; i < test_rows.size(); ++i) {
    csv::Record record{std::to_string(i), test_city[i], test_time[i]};
    for (Eigen::Index j = 0; j < d; ++j) record.push_back(csv::format_number(test_rows[i][j]));
    csv::write_record(rows_csv, record);
    csv::write_record(truth_csv, {std::to_string(i), std::string(to_string(test_labels[i]))});
  }

  json split_summary = {{"cities", std::move(split_doc)},
                        {"train", train_rows.size()},
                        {"test", test_rows.size()},
                        {"fraction", config.split},
                        {"mode", std::string(to_string(config.split_mode))}};
  outputs.write(artifact::model, dump(to_json(model)));
  outputs.write(artifact::split, dump(split_summary));
  outputs.write(artifact::test_rows, rows_csv.str());
  outputs.write(artifact::truth, truth_csv.str());
}

void stage_predict(const PipelineConfig&, Outputs& outputs) {
  open_artifact(outputs.path(artifact::model), "train").close();
  const SvmModel model = svm_model_from_json(read_json_file(outputs.path(artifact::model)));
  open_artifact(outputs.path(artifact::test_rows), "train").close();
  const LabelledRows rows = read_rows_csv(outputs.path(artifact::test_rows));
  std::ostringstream out;
  write_predictions(out, model, rows);
  outputs.write(artifact::predictions, out.str());
}

void write_eval(Outputs& outputs, const EvalOutputs& result) {
  outputs.write(artifact::eval_json, dump(to_json(result.report)));
  std::ostringstream row;
  write_report_csv_header(row);
  write_report_csv_row(row, result.report);
  outputs.write(artifact::eval_csv, row.str());
  std::ostringstream curve;
  csv::write_record(curve, {"n", "accuracy_pct", "error_pct", "time_ms"});
  for (const auto& point : result.curve) {
    csv::write_record(curve, {std::to_string(static_cast<long long>(point[0])),
                              csv::format_number(point[1]), csv::format_number(point[2]),
                              csv::format_number(point[3])});
  }
  outputs.write(artifact::curves, curve.str());
}

EvalReport stage_evaluate(const PipelineConfig& config, Outputs& outputs) {
  open_artifact(outputs.path(artifact::predictions), "predict").close();
  open_artifact(outputs.path(artifact::truth), "train").close();
  const EvalOutputs result =
      evaluate_files(outputs.path(artifact::predictions), outputs.path(artifact::truth),
                     outputs.path(artifact::model), outputs.path(artifact::test_rows),
                     config.measure_timing, config.curve_points);
  write_eval(outputs, result);
  return result.report;
}

template <typename Stage>
auto run_stage(const char* name, const PipelineConfig& config, Stage stage) {
  config.validate();
  Outputs outputs(config.out);
  return guarded(name, outputs, [&] { return stage(config, outputs); });
}

}  // namespace

void write_eval_outputs(const EvalOutputs& outputs, const fs::path& dir) {
  Outputs files(dir);
  try {
    write_eval(files, outputs);
  } catch (...) {
    files.remove_all();
    throw;
  }
}

void write_resolved_config(const PipelineConfig& config) {
  Outputs outputs(config.out);
  outputs.write(artifact::resolved_config, dump(to_json(config)));
}

void run_ingest(const PipelineConfig& config) { run_stage("ingest", config, stage_ingest); }
void run_preprocess(const PipelineConfig& config) { run_stage("preprocess", config, stage_preprocess); }
void run_select(const PipelineConfig& config) { run_stage("select", config, stage_select); }
void run_train(const PipelineConfig& config) { run_stage("train", config, stage_train); }
void run_predict(const PipelineConfig& config) { run_stage("predict", config, stage_predict); }
EvalReport run_evaluate(const PipelineConfig& config) {
  return run_stage("evaluate", config, stage_evaluate);
}

EvalReport run_pipeline(const PipelineConfig& config) {
  config.validate();
  Outputs outputs(config.out);
  guarded("config", outputs, [&] { outputs.write(artifact::resolved_config, dump(to_json(config))); });
  guarded("ingest", outputs, [&] { stage_ingest(config, outputs); });
  guarded("preprocess", outputs, [&] { stage_preprocess(config, outputs); });
  guarded("select", outputs, [&] { stage_select(config, outputs); });
  guarded("train", outputs, [&] { stage_train(config, outputs); });
  guarded("predict", outputs, [&] { stage_predict(config, outputs); });
  return guarded("evaluate", outputs, [&] { return stage_evaluate(config, outputs); });
}

}  // namespace aqicast
