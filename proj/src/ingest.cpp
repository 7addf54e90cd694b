#include "aqicast/ingest.hpp"

#include "aqicast/csv.hpp"
#include "aqicast/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <set>

namespace aqicast {
namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) ==
           std::tolower(static_cast<unsigned char>(y));
  });
}

template <typename Int>
bool parse_fixed(std::string_view text, Int& out) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

std::vector<std::string> default_schema() {
  return {kPollutants.begin(), kPollutants.end()};
}

bool is_pollutant(std::string_view name) noexcept {
  return std::find(kPollutants.begin(), kPollutants.end(), name) != kPollutants.end();
}

// ---------------------------------------------------------------------------
// Timestamp

std::optional<Timestamp> Timestamp::parse(std::string_view text) {
  using namespace std::chrono;
  text = trim(text);
  if (text.size() != 10 && text.size() != 19) return std::nullopt;
  if (text[4] != '-' || text[7] != '-') return std::nullopt;

  int y = 0;
  unsigned mo = 0, d = 0;
  if (!parse_fixed(text.substr(0, 4), y) || !parse_fixed(text.substr(5, 2), mo) ||
      !parse_fixed(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok()) return std::nullopt;

  Timestamp ts;
  ts.seconds = sys_seconds{sys_days{ymd}}.time_since_epoch().count();
  if (text.size() == 19) {
    if (text[10] != ' ' || text[13] != ':' || text[16] != ':') return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (!parse_fixed(text.substr(11, 2), hh) || !parse_fixed(text.substr(14, 2), mm) ||
        !parse_fixed(text.substr(17, 2), ss)) {
      return std::nullopt;
    }
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    ts.seconds += hh * 3600 + mm * 60 + ss;
    ts.has_time = true;
  }
  return ts;
}

std::string Timestamp::to_string() const {
  using namespace std::chrono;
  const sys_seconds tp{std::chrono::seconds{seconds}};
  const auto day_point = floor<days>(tp);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{tp - day_point};
  char buf[32];
  if (has_time) {
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u %02d:%02d:%02d",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(hms.hours().count()),
                  static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
  } else {
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  }
  return buf;
}

// ---------------------------------------------------------------------------
// SeriesFrame

SeriesFrame::SeriesFrame(std::string city, std::vector<Timestamp> timestamps,
                         std::vector<std::string> columns, Eigen::MatrixXd data)
    : city_(std::move(city)),
      timestamps_(std::move(timestamps)),
      columns_(std::move(columns)),
      data_(std::move(data)) {
  if (data_.rows() != static_cast<Eigen::Index>(timestamps_.size()) ||
      data_.cols() != static_cast<Eigen::Index>(columns_.size())) {
    throw Error(ErrorKind::schema, "frame '" + city_ + "': matrix is " +
                                       std::to_string(data_.rows()) + "x" +
                                       std::to_string(data_.cols()) + ", expected " +
                                       std::to_string(timestamps_.size()) + "x" +
                                       std::to_string(columns_.size()));
  }
  for (std::size_t i = 1; i < timestamps_.size(); ++i) {
    if (!(timestamps_[i - 1] < timestamps_[i])) {
      throw Error(ErrorKind::schema, "frame '" + city_ +
                                         "': timestamps not strictly increasing at " +
                                         timestamps_[i].to_string());
    }
  }
}

std::optional<Eigen::Index> SeriesFrame::column_index(std::string_view name) const {
  auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - columns_.begin());
}

Eigen::VectorXd SeriesFrame::column(std::string_view name) const {
  auto idx = column_index(name);
  if (!idx) throw Error(ErrorKind::name, "no column '" + std::string(name) + "'");
  return data_.col(*idx);
}

Eigen::Index SeriesFrame::missing_count() const { return data_.array().isNaN().count(); }

SeriesFrame SeriesFrame::with_column(std::string name, const Eigen::VectorXd& values) const {
  if (values.size() != rows()) {
    throw Error(ErrorKind::shape, "column '" + name + "' has " +
                                      std::to_string(values.size()) + " values, frame has " +
                                      std::to_string(rows()) + " rows");
  }
  Eigen::MatrixXd data(rows(), cols() + 1);
  data.leftCols(cols()) = data_;
  data.col(cols()) = values;
  auto columns = columns_;
  columns.push_back(std::move(name));
  return SeriesFrame(city_, timestamps_, std::move(columns), std::move(data));
}

SeriesFrame SeriesFrame::with_data(Eigen::MatrixXd data) const {
  return SeriesFrame(city_, timestamps_, columns_, std::move(data));
}

SeriesFrame SeriesFrame::select_columns(const std::vector<std::string>& names) const {
  Eigen::MatrixXd data(rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    data.col(static_cast<Eigen::Index>(j)) = column(names[j]);
  }
  return SeriesFrame(city_, timestamps_, names, std::move(data));
}

// ---------------------------------------------------------------------------
// CSV

bool is_missing_sentinel(std::string_view cell) noexcept {
  cell = trim(cell);
  return cell.empty() || iequals(cell, "NA") || iequals(cell, "NaN");
}

ParseResult parse_csv(std::istream& source, const std::vector<std::string>& schema,
                      bool clamp_negatives) {
  std::set<std::string> seen_schema;
  for (const auto& name : schema) {
    if (!is_pollutant(name)) {
      throw Error(ErrorKind::argument, "schema column '" + name + "' is not a known pollutant");
    }
    if (!seen_schema.insert(name).second) {
      throw Error(ErrorKind::argument, "schema column '" + name + "' listed twice");
    }
  }

  csv::Reader reader(source);
  auto header = reader.next();
  if (!header) throw Error(ErrorKind::schema, "input is empty; header row required");

  std::optional<std::size_t> city_col, date_col;
  std::vector<std::optional<std::size_t>> schema_cols(schema.size());
  ParseStats stats;
  for (std::size_t i = 0; i < header->size(); ++i) {
    const auto name = trim((*header)[i]);
    if (name == "City" && !city_col) {
      city_col = i;
    } else if ((name == "Date" || name == "Datetime") && !date_col) {
      date_col = i;
    } else {
      auto it = std::find(schema.begin(), schema.end(), name);
      const auto pos = static_cast<std::size_t>(it - schema.begin());
      if (it != schema.end() && !schema_cols[pos]) {
        schema_cols[pos] = i;
      } else {
        ++stats.extra_columns;
      }
    }
  }
  if (!city_col) throw Error(ErrorKind::schema, "header has no 'City' column");
  if (!date_col) throw Error(ErrorKind::schema, "header has no 'Date' column");

  std::vector<std::string> columns;
  std::vector<std::size_t> source_index;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (schema_cols[j]) {
      columns.push_back(schema[j]);
      source_index.push_back(*schema_cols[j]);
    } else {
      ++stats.missing_schema_columns;
    }
  }

  struct Row {
    Timestamp ts;
    std::vector<double> values;
  };
  std::map<std::string, std::vector<Row>> by_city;

  while (auto record = reader.next()) {
    ++stats.data_rows;
    if (record->size() != header->size()) {
      ++stats.rejected_rows;
      continue;
    }
    const std::string city(trim((*record)[*city_col]));
    auto ts = Timestamp::parse((*record)[*date_col]);
    if (city.empty() || !ts) {
      ++stats.rejected_rows;
      continue;
    }
    Row row{*ts, std::vector<double>(columns.size(), kMissing)};
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const auto cell = trim((*record)[source_index[j]]);
      if (is_missing_sentinel(cell)) continue;
      double v = 0.0;
      const char* first = cell.data();
      if (!cell.empty() && cell.front() == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        ++stats.unparseable_cells;
        continue;
      }
      if (v < 0.0 && clamp_negatives) {
        ++stats.clamped_negatives;
        v = 0.0;
      }
      row.values[j] = v;
    }
    by_city[city].push_back(std::move(row));
  }

  ParseResult result;
  result.stats = stats;
  for (auto& [city, rows] : by_city) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.ts < b.ts; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i - 1].ts == rows[i].ts) {
        throw Error(ErrorKind::duplicate_key,
                    "duplicate (city, timestamp) pair (" + city + ", " +
                        rows[i].ts.to_string() + ")");
      }
    }
    std::vector<Timestamp> stamps;
    stamps.reserve(rows.size());
    Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(columns.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      stamps.push_back(rows[i].ts);
      for (std::size_t j = 0; j < columns.size(); ++j) {
        data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].values[j];
      }
    }
    result.frames.emplace_back(city, std::move(stamps), columns, std::move(data));
  }
  return result;
}

void write_csv(std::ostream& out, const std::vector<SeriesFrame>& frames) {
  std::vector<std::string> columns;
  if (!frames.empty()) columns = frames.front().columns();
  csv::Record header{"City", "Date"};
  header.insert(header.end(), columns.begin(), columns.end());
  csv::write_record(out, header);
  for (const auto& frame : frames) {
    if (frame.columns() != columns) {
      throw Error(ErrorKind::schema, "frame '" + frame.city() + "' has a different column set");
    }
    for (Eigen::Index i = 0; i < frame.rows(); ++i) {
      csv::Record record{frame.city(),
                         frame.timestamps()[static_cast<std::size_t>(i)].to_string()};
      for (Eigen::Index j = 0; j < frame.cols(); ++j) {
        record.push_back(csv::format_number(frame.data()(i, j)));
      }
      csv::write_record(out, record);
    }
  }
}

// ---------------------------------------------------------------------------
// Imputation

std::string_view to_string(ImputeMode mode) noexcept {
  switch (mode) {
    case ImputeMode::forward_fill: return "forward_fill";
    case ImputeMode::drop_row: return "drop_row";
    case ImputeMode::column_mean: return "column_mean";
  }
  return "unknown";
}

ImputeMode parse_impute_mode(std::string_view name) {
  if (name == "forward_fill") return ImputeMode::forward_fill;
  if (name == "drop_row") return ImputeMode::drop_row;
  if (name == "column_mean") return ImputeMode::column_mean;
  throw Error(ErrorKind::config, "unknown impute policy '" + std::string(name) + "'");
}

namespace {

SeriesFrame keep_rows(const SeriesFrame& frame, const Eigen::MatrixXd& data,
                      const std::vector<bool>& keep) {
  std::vector<Timestamp> stamps;
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < frame.rows(); ++i) {
    if (keep[static_cast<std::size_t>(i)]) {
      idx.push_back(i);
      stamps.push_back(frame.timestamps()[static_cast<std::size_t>(i)]);
    }
  }
  Eigen::MatrixXd out = data(idx, Eigen::all);
  return SeriesFrame(frame.city(), std::move(stamps), frame.columns(), std::move(out));
}

void require_some_value(const SeriesFrame& frame) {
  for (Eigen::Index j = 0; j < frame.cols(); ++j) {
    if (frame.rows() > 0 && frame.data().col(j).array().isNaN().all()) {
      throw Error(ErrorKind::unimputable_column,
                  "column '" + frame.columns()[static_cast<std::size_t>(j)] + "' of '" +
                      frame.city() + "' has no values");
    }
  }
}

}  // namespace

SeriesFrame impute(const SeriesFrame& frame, const ImputePolicy& policy) {
  const Eigen::MatrixXd& src = frame.data();
  switch (policy.mode) {
    case ImputeMode::drop_row: {
      std::vector<bool> keep(static_cast<std::size_t>(frame.rows()));
      for (Eigen::Index i = 0; i < frame.rows(); ++i) {
        keep[static_cast<std::size_t>(i)] = !src.row(i).array().isNaN().any();
      }
      return keep_rows(frame, src, keep);
    }
    case ImputeMode::column_mean: {
      require_some_value(frame);
      Eigen::MatrixXd data = src;
      for (Eigen::Index j = 0; j < data.cols(); ++j) {
        const auto present = (!src.col(j).array().isNaN()).cast<double>();
        const double mean =
            src.col(j).array().isNaN().select(0.0, src.col(j).array()).sum() / present.sum();
        data.col(j) = src.col(j).array().isNaN().select(mean, src.col(j).array());
      }
      return frame.with_data(std::move(data));
    }
    case ImputeMode::forward_fill: {
      require_some_value(frame);
      Eigen::MatrixXd data = src;
      std::vector<bool> keep(static_cast<std::size_t>(frame.rows()), true);
      for (Eigen::Index j = 0; j < data.cols(); ++j) {
        Eigen::Index i = 0;
        while (i < data.rows()) {
          if (!std::isnan(src(i, j))) {
            ++i;
            continue;
          }
          Eigen::Index run_end = i;
          while (run_end < data.rows() && std::isnan(src(run_end, j))) ++run_end;
          const auto run = static_cast<std::size_t>(run_end - i);
          const bool fillable = i > 0 && run <= policy.max_gap;
          for (Eigen::Index r = i; r < run_end; ++r) {
            if (fillable) {
              data(r, j) = src(i - 1, j);
            } else {
              keep[static_cast<std::size_t>(r)] = false;
            }
          }
          i = run_end;
        }
      }
      return keep_rows(frame, data, keep);
    }
  }
  throw Error(ErrorKind::argument, "unknown impute mode");
}

// ---------------------------------------------------------------------------
// Synthetic data

PollutantWave default_wave(std::string_view pollutant) {
  // Distinct periods keep the default columns mutually uncorrelated over a
  // few hundred rows; offsets put the AQI of generated rows across several
  // buckets.
  if (pollutant == "PM2.5") return {150.0, 140.0, 168.0, 8.0};
  if (pollutant == "PM10") return {300.0, 280.0, 132.0, 15.0};
  if (pollutant == "NO") return {18.0, 12.0, 20.0, 2.0};
  if (pollutant == "NO2") return {30.0, 20.0, 36.0, 3.0};
  if (pollutant == "NOx") return {45.0, 35.0, 28.0, 4.0};
  if (pollutant == "NH3") return {25.0, 18.0, 72.0, 2.0};
  if (pollutant == "CO") return {2.0, 1.5, 24.0, 0.2};
  if (pollutant == "SO2") return {15.0, 10.0, 48.0, 1.5};
  if (pollutant == "O3") return {45.0, 35.0, 30.0, 4.0};
  if (pollutant == "Benzene") return {3.0, 2.5, 54.0, 0.4};
  if (pollutant == "Toluene") return {8.0, 6.0, 42.0, 1.0};
  if (pollutant == "Xylene") return {2.0, 1.5, 60.0, 0.3};
  throw Error(ErrorKind::argument, "no default wave for '" + std::string(pollutant) + "'");
}

SeriesFrame generate_synthetic(std::uint64_t seed, Eigen::Index n_rows,
                               const SyntheticParams& params) {
  if (n_rows < 1) {
    throw Error(ErrorKind::argument, "synthetic frame needs n_rows >= 1, got " +
                                         std::to_string(n_rows));
  }
  std::vector<PollutantWave> waves;
  for (auto name : kPollutants) {
    auto it = params.waves.find(std::string(name));
    waves.push_back(it != params.waves.end() ? it->second : default_wave(name));
  }
  for (const auto& [name, wave] : params.waves) {
    if (!is_pollutant(name)) {
      throw Error(ErrorKind::argument, "synthetic wave for unknown pollutant '" + name + "'");
    }
    if (!(wave.sigma >= 0.0) || !(wave.period > 0.0) || !std::isfinite(wave.offset) ||
        !std::isfinite(wave.amplitude)) {
      throw Error(ErrorKind::argument, "synthetic wave for '" + name +
                                           "' needs sigma >= 0, period > 0 and finite terms");
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd data(n_rows, static_cast<Eigen::Index>(waves.size()));
  std::vector<Timestamp> stamps;
  stamps.reserve(static_cast<std::size_t>(n_rows));
  for (Eigen::Index t = 0; t < n_rows; ++t) {
    stamps.push_back({params.start.seconds + t * params.step_seconds, params.start.has_time});
    for (std::size_t j = 0; j < waves.size(); ++j) {
      const auto& w = waves[j];
      const double z = normal(rng);
      const double clean =
          w.offset + w.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / w.period);
      data(t, static_cast<Eigen::Index>(j)) = std::max(0.0, clean + w.sigma * z);
    }
  }
  return SeriesFrame(params.city, std::move(stamps), default_schema(), std::move(data));
}

}  // namespace aqicast
