#pragma once

#include <Eigen/Dense>

#include <array>
#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aqicast {

/// Pollutant columns of the India air-quality export, in schema order.
inline constexpr std::array<std::string_view, 12> kPollutants = {
    "PM2.5", "PM10", "NO",  "NO2", "NOx",     "NH3",
    "CO",    "SO2",  "O3",  "Benzene", "Toluene", "Xylene"};

std::vector<std::string> default_schema();
bool is_pollutant(std::string_view name) noexcept;

/// Calendar date or date-hour, stored as seconds since the Unix epoch (UTC).
struct Timestamp {
  std::int64_t seconds = 0;
  bool has_time = false;

  /// Accepts "YYYY-MM-DD" or "YYYY-MM-DD HH:MM:SS".
  static std::optional<Timestamp> parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const Timestamp& a, const Timestamp& b) {
    return a.seconds == b.seconds;
  }
  friend auto operator<=>(const Timestamp& a, const Timestamp& b) {
    return a.seconds <=> b.seconds;
  }
};

/// Per-city aligned pollutant series. Rows are timestamps, columns features;
/// a missing cell is stored as NaN. Immutable once built.
class SeriesFrame {
 public:
  SeriesFrame() = default;
  /// Throws Error(schema) if dimensions disagree or timestamps are not
  /// strictly increasing.
  SeriesFrame(std::string city, std::vector<Timestamp> timestamps,
              std::vector<std::string> columns, Eigen::MatrixXd data);

  const std::string& city() const noexcept { return city_; }
  const std::vector<Timestamp>& timestamps() const noexcept { return timestamps_; }
  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const Eigen::MatrixXd& data() const noexcept { return data_; }

  Eigen::Index rows() const noexcept { return data_.rows(); }
  Eigen::Index cols() const noexcept { return data_.cols(); }

  std::optional<Eigen::Index> column_index(std::string_view name) const;
  /// Throws Error(name) when absent.
  Eigen::VectorXd column(std::string_view name) const;
  Eigen::Index missing_count() const;

  /// Same rows and timestamps, one extra column appended.
  SeriesFrame with_column(std::string name, const Eigen::VectorXd& values) const;
  /// Same rows, replaced numeric matrix (columns unchanged).
  SeriesFrame with_data(Eigen::MatrixXd data) const;
  /// Keeps only the named columns, in the given order.
  SeriesFrame select_columns(const std::vector<std::string>& names) const;

 private:
  std::string city_;
  std::vector<Timestamp> timestamps_;
  std::vector<std::string> columns_;
  Eigen::MatrixXd data_;
};

struct ParseStats {
  std::size_t data_rows = 0;        ///< records after the header
  std::size_t rejected_rows = 0;    ///< bad date, empty city, wrong arity
  std::size_t extra_columns = 0;    ///< header columns outside the schema
  std::size_t missing_schema_columns = 0;
  std::size_t unparseable_cells = 0;
  std::size_t clamped_negatives = 0;
};

struct ParseResult {
  std::vector<SeriesFrame> frames;  ///< sorted by city name
  ParseStats stats;
};

/// Missing-value sentinels: empty cell, "NA", "NaN" (case-insensitive).
bool is_missing_sentinel(std::string_view cell) noexcept;

/// Negative readings are clamped to 0 unless `clamp_negatives` is false
/// (used when re-reading denoised intermediate files).
ParseResult parse_csv(std::istream& source,
                      const std::vector<std::string>& schema = default_schema(),
                      bool clamp_negatives = true);

/// Writes frames back in the dataset layout (City, Date, features...).
void write_csv(std::ostream& out, const std::vector<SeriesFrame>& frames);

enum class ImputeMode { forward_fill, drop_row, column_mean };

struct ImputePolicy {
  ImputeMode mode = ImputeMode::drop_row;
  std::size_t max_gap = 3;  ///< forward_fill only
};

std::string_view to_string(ImputeMode mode) noexcept;
/// Throws Error(config) on an unknown name.
ImputeMode parse_impute_mode(std::string_view name);

SeriesFrame impute(const SeriesFrame& frame, const ImputePolicy& policy);

struct PollutantWave {
  double offset = 0.0;
  double amplitude = 0.0;
  double period = 24.0;  ///< in rows
  double sigma = 0.0;
};

struct SyntheticParams {
  std::string city = "Synthetic";
  Timestamp start{1420070400, true};  ///< 2015-01-01 00:00:00
  std::int64_t step_seconds = 3600;
  std::map<std::string, PollutantWave> waves;  ///< pollutant -> wave; absent keys use defaults
};

PollutantWave default_wave(std::string_view pollutant);

/// value(t) = max(0, offset + amplitude * sin(2*pi*t/period) + sigma * z),
/// z standard normal, drawn row by row in schema column order.
SeriesFrame generate_synthetic(std::uint64_t seed, Eigen::Index n_rows,
                               const SyntheticParams& params = {});

}  // namespace aqicast
