#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aqicast {

enum class ErrorKind {
  schema,
  duplicate_key,
  unimputable_column,
  argument,
  numeric_input,
  level_depth,
  estimation,
  pyramid_shape,
  column_too_short,
  insufficient_data,
  shape,
  name,
  missing_pollutant,
  domain,
  degenerate_labels,
  empty_input,
  io,
  config,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure in the library is reported as an Error carrying a kind, so
/// callers (and the CLI's JSON error output) can dispatch without parsing
/// message text. `stage` is filled in by the pipeline when an error crosses
/// a stage boundary.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }
  void set_stage(std::string stage) { stage_ = std::move(stage); }

 private:
  ErrorKind kind_;
  std::string stage_;
};

}  // namespace aqicast
