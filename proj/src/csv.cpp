#include "aqicast/csv.hpp"

#include <charconv>
#include <cmath>

namespace aqicast::csv {

Reader::Reader(std::istream& in) : in_(in) {}

std::optional<Record> Reader::next() {
  if (first_) {
    first_ = false;
    // UTF-8 byte order mark
    if (in_.peek() == 0xEF) {
      char bom[3];
      in_.read(bom, 3);
      if (!(in_.gcount() == 3 && static_cast<unsigned char>(bom[1]) == 0xBB &&
            static_cast<unsigned char>(bom[2]) == 0xBF)) {
        in_.clear();
        in_.seekg(0);
      }
    }
  }

  while (true) {
    if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;

    Record record;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    record_line_ = line_;

    while (true) {
      int c = in_.get();
      if (c == std::char_traits<char>::eof()) {
        record.push_back(std::move(field));
        break;
      }
      char ch = static_cast<char>(c);
      if (quoted) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
        continue;
      }
      if (ch == '"' && !field_started) {
        quoted = true;
        field_started = true;
      } else if (ch == ',') {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
      } else if (ch == '\r' && in_.peek() == '\n') {
        // handled by the '\n' branch on the next iteration
      } else if (ch == '\n') {
        ++line_;
        record.push_back(std::move(field));
        break;
      } else {
        field.push_back(ch);
        field_started = true;
      }
    }

    if (record.size() == 1 && record.front().empty()) continue;
    return record;
  }
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void write_record(std::ostream& out, const Record& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i != 0) out << ',';
    out << escape(fields[i]);
  }
  out << "\r\n";
}

std::string format_number(double value) {
  if (std::isnan(value)) return "";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, end);
}

}  // namespace aqicast::csv
