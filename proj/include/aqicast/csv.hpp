#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace aqicast::csv {

using Record = std::vector<std::string>;

/// Incremental RFC 4180 reader: quoted fields may contain commas, CRLF and
/// doubled quotes. Accepts LF or CRLF line endings and a leading UTF-8 BOM.
class Reader {
 public:
  explicit Reader(std::istream& in);

  /// Next record, or nullopt at end of input. A blank line yields no record.
  std::optional<Record> next();

  /// 1-based physical line on which the last returned record started.
  std::size_t line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
  bool first_ = true;
};

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_record(std::ostream& out, const Record& fields);

/// Shortest decimal form that parses back to the identical double.
std::string format_number(double value);

}  // namespace aqicast::csv
