#include "aqicast/error.hpp"

namespace aqicast {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::schema: return "schema";
    case ErrorKind::duplicate_key: return "duplicate_key";
    case ErrorKind::unimputable_column: return "unimputable_column";
    case ErrorKind::argument: return "argument";
    case ErrorKind::numeric_input: return "numeric_input";
    case ErrorKind::level_depth: return "level_depth";
    case ErrorKind::estimation: return "estimation";
    case ErrorKind::pyramid_shape: return "pyramid_shape";
    case ErrorKind::column_too_short: return "column_too_short";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::shape: return "shape";
    case ErrorKind::name: return "name";
    case ErrorKind::missing_pollutant: return "missing_pollutant";
    case ErrorKind::domain: return "domain";
    case ErrorKind::degenerate_labels: return "degenerate_labels";
    case ErrorKind::empty_input: return "empty_input";
    case ErrorKind::io: return "io";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

}  // namespace aqicast
