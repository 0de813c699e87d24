#pragma once

// Group keys over tweet records: any combination of speaker, country, city,
// year and month.

#include "ted/records.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ted {

enum class KeyField { speaker, country, city, year, month };

inline std::string_view key_field_name(KeyField f) {
  switch (f) {
  case KeyField::speaker:
    return "speaker";
  case KeyField::country:
    return "country";
  case KeyField::city:
    return "city";
  case KeyField::year:
    return "year";
  case KeyField::month:
    return "month";
  }
  return "";
}

inline std::optional<KeyField> parse_key_field(std::string_view s) {
  for (KeyField f : {KeyField::speaker, KeyField::country, KeyField::city, KeyField::year,
                     KeyField::month}) {
    if (s == key_field_name(f)) return f;
  }
  if (s == "user" || s == "speaker_id") return KeyField::speaker;
  return std::nullopt;
}

/// Value of one key field; empty when the record lacks it.
inline std::string key_value(const RawTweet& t, KeyField f) {
  switch (f) {
  case KeyField::speaker:
    return t.speaker_id;
  case KeyField::country:
    return t.country.value_or("");
  case KeyField::city:
    return t.city.value_or("");
  case KeyField::year:
    return std::to_string(utc_date(t.created_at).year);
  case KeyField::month: {
    const auto m = utc_date(t.created_at).month;
    return (m < 10 ? "0" : "") + std::to_string(m);
  }
  }
  return {};
}

/// Ordered list of key fields. An empty spec puts every record in one group.
struct KeySpec {
  std::vector<KeyField> fields;

  static KeySpec parse(std::string_view list) {
    KeySpec spec;
    std::size_t pos = 0;
    while (pos <= list.size()) {
      const auto comma = list.find(',', pos);
      const auto item = trim(list.substr(pos, comma == std::string_view::npos ? list.npos
                                                                              : comma - pos));
      if (!item.empty() && item != "all") {
        const auto f = parse_key_field(item);
        if (!f) throw Error("invalid_key", "unknown group key field '" + std::string(item) + "'");
        spec.fields.push_back(*f);
      }
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    return spec;
  }

  std::vector<std::string> values(const RawTweet& t) const {
    std::vector<std::string> out;
    out.reserve(fields.size());
    for (KeyField f : fields) out.push_back(key_value(t, f));
    return out;
  }

  std::vector<std::string> column_names() const {
    std::vector<std::string> out;
    for (KeyField f : fields) out.emplace_back(key_field_name(f));
    return out;
  }

  /// Values joined with '/'; "all" for the empty spec, "unknown" for
  /// missing fields.
  std::string joined(const RawTweet& t) const {
    if (fields.empty()) return "all";
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += '/';
      auto v = key_value(t, fields[i]);
      out += v.empty() ? "unknown" : v;
    }
    return out;
  }
};

} // namespace ted
