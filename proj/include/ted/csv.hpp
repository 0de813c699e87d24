#pragma once

// Minimal RFC 4180 CSV reading and writing.

#include "ted/types.hpp"

#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ted::csv {

class Reader {
public:
  explicit Reader(std::istream& in) : in_(&in) {}

  /// Reads the next record into `row`. Quoted fields may span lines.
  /// Returns false at end of input. Throws on an unterminated quote.
  bool next(std::vector<std::string>& row) {
    row.clear();
    int c = in_->get();
    if (c == EOF) return false;
    ++line_;
    record_start_line_ = line_;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    while (true) {
      if (quoted) {
        if (c == EOF) throw Error("malformed_csv", "unterminated quoted field starting on line " +
                                                       std::to_string(record_start_line_));
        if (c == '"') {
          if (in_->peek() == '"') {
            field.push_back('"');
            in_->get();
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(static_cast<char>(c));
        }
      } else if (c == '"' && field.empty() && !was_quoted) {
        quoted = true;
        was_quoted = true;
      } else if (c == ',') {
        row.push_back(std::move(field));
        field.clear();
        was_quoted = false;
      } else if (c == '\n' || c == EOF) {
        if (!field.empty() && field.back() == '\r' && !was_quoted) field.pop_back();
        row.push_back(std::move(field));
        return true;
      } else if (c == '\r' && was_quoted) {
        // trailing CR after a closing quote
      } else {
        field.push_back(static_cast<char>(c));
      }
      c = in_->get();
    }
  }

  /// First physical line of the most recent record (1-based).
  std::size_t line() const noexcept { return record_start_line_; }

private:
  std::istream* in_;
  std::size_t line_ = 0;
  std::size_t record_start_line_ = 0;
};

inline bool needs_quoting(std::string_view s) {
  return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline void write_field(std::ostream& out, std::string_view s) {
  if (!needs_quoting(s)) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    write_field(out, fields[i]);
  }
  out << '\n';
}

/// Shortest decimal representation that round-trips.
inline std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_real(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string{};
}

inline std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

/// Header-indexed table held in memory.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  }
};

inline Table read_table(std::istream& in) {
  Reader reader(in);
  Table t;
  std::vector<std::string> row;
  if (!reader.next(row)) return t;
  t.header = row;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != t.header.size()) {
      throw Error("malformed_csv", "line " + std::to_string(reader.line()) + ": expected " +
                                       std::to_string(t.header.size()) + " fields, got " +
                                       std::to_string(row.size()));
    }
    t.rows.push_back(row);
  }
  return t;
}

} // namespace ted::csv
