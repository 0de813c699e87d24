#pragma once

// Tweet records, RFC-3339 timestamps, and JSONL/CSV record parsing.

#include "ted/csv.hpp"
#include "ted/tokenizer.hpp"
#include "ted/types.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ted {

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

struct CivilDate {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  friend auto operator<=>(const CivilDate&, const CivilDate&) = default;

  std::string to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
    return buf;
  }
};

inline CivilDate utc_date(Timestamp t) {
  using namespace std::chrono;
  const sys_seconds tp{seconds{t}};
  const year_month_day ymd{floor<days>(tp)};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
          static_cast<unsigned>(ymd.day())};
}

namespace detail {

inline bool take_int(std::string_view& s, std::size_t width, int& out) {
  if (s.size() < width) return false;
  for (std::size_t i = 0; i < width; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  std::from_chars(s.data(), s.data() + width, out);
  s.remove_prefix(width);
  return true;
}

inline bool take_char(std::string_view& s, char c) {
  if (s.empty() || s.front() != c) return false;
  s.remove_prefix(1);
  return true;
}

} // namespace detail

/// Parses `YYYY-MM-DDTHH:MM:SS[.frac](Z|±HH:MM)`. A space may replace `T`;
/// fractional seconds are truncated. Returns UTC epoch seconds.
inline std::optional<Timestamp> parse_rfc3339(std::string_view s) {
  using namespace std::chrono;
  s = trim(s);
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!detail::take_int(s, 4, y) || !detail::take_char(s, '-') || !detail::take_int(s, 2, mo) ||
      !detail::take_char(s, '-') || !detail::take_int(s, 2, d)) {
    return std::nullopt;
  }
  if (!(detail::take_char(s, 'T') || detail::take_char(s, 't') || detail::take_char(s, ' '))) {
    return std::nullopt;
  }
  if (!detail::take_int(s, 2, h) || !detail::take_char(s, ':') || !detail::take_int(s, 2, mi) ||
      !detail::take_char(s, ':') || !detail::take_int(s, 2, sec)) {
    return std::nullopt;
  }
  if (detail::take_char(s, '.')) {
    std::size_t n = 0;
    while (n < s.size() && s[n] >= '0' && s[n] <= '9') ++n;
    if (n == 0) return std::nullopt;
    s.remove_prefix(n);
  }
  int offset = 0;
  if (detail::take_char(s, 'Z') || detail::take_char(s, 'z')) {
  } else if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    const int sign = s.front() == '-' ? -1 : 1;
    s.remove_prefix(1);
    int oh = 0, om = 0;
    if (!detail::take_int(s, 2, oh) || !detail::take_char(s, ':') ||
        !detail::take_int(s, 2, om) || oh > 23 || om > 59) {
      return std::nullopt;
    }
    offset = sign * (oh * 3600 + om * 60);
  } else {
    return std::nullopt;
  }
  if (!s.empty()) return std::nullopt;

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days_since_epoch) * 86400 + h * 3600 + mi * 60 + sec - offset;
}

/// A tweet-like record as supplied on input.
struct RawTweet {
  std::string tweet_id;
  std::string speaker_id;
  std::string created_at_text; ///< as given on input
  Timestamp created_at = 0;
  std::optional<std::string> country;
  std::optional<std::string> city;
  std::string language;
  bool is_retweet = false;
  std::optional<bool> has_url_or_media; ///< absent: detect from text
  std::string text;
};

/// A record that passed curation, with its tokens.
struct CuratedTweet {
  RawTweet raw;
  std::vector<std::string> tokens;

  std::size_t token_count() const noexcept { return tokens.size(); }
  CivilDate date() const { return utc_date(raw.created_at); }
};

enum class RecordFormat { jsonl, csv };

inline std::optional<RecordFormat> parse_record_format(std::string_view s) {
  if (s == "jsonl" || s == "json") return RecordFormat::jsonl;
  if (s == "csv") return RecordFormat::csv;
  return std::nullopt;
}

/// A record that could not be parsed. `record` is the 1-based record number.
struct RecordDiagnostic {
  std::size_t record = 0;
  std::string reason;
};

/// Parsed record plus, when the input carried them, pre-computed tokens.
struct ParsedRecord {
  RawTweet tweet;
  std::optional<std::vector<std::string>> tokens;
};

namespace detail {

inline std::optional<bool> parse_bool_text(std::string_view s) {
  s = trim(s);
  const std::string v = ascii_lower(s);
  if (v == "true" || v == "1" || v == "yes" || v == "t") return true;
  if (v == "false" || v == "0" || v == "no" || v == "f") return false;
  return std::nullopt;
}

inline std::optional<std::string> json_text(const nlohmann::json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  if (it->is_number_unsigned()) return std::to_string(it->get<std::uint64_t>());
  if (it->is_boolean()) return it->get<bool>() ? "true" : "false";
  return it->dump();
}

inline std::optional<bool> json_bool(const nlohmann::json& obj, const char* key, bool& bad) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_boolean()) return it->get<bool>();
  if (it->is_number_integer()) return it->get<std::int64_t>() != 0;
  if (it->is_string()) {
    if (it->get<std::string>().empty()) return std::nullopt;
    auto v = parse_bool_text(it->get<std::string>());
    if (!v) bad = true;
    return v;
  }
  bad = true;
  return std::nullopt;
}

struct FieldValues {
  std::optional<std::string> tweet_id, speaker_id, created_at, country, city, language, text;
  std::optional<bool> is_retweet, has_url_or_media;
  bool bad_bool = false;
};

inline std::string build_record(const FieldValues& v, RawTweet& t) {
  const auto missing = [](const std::optional<std::string>& s) { return !s || s->empty(); };
  if (missing(v.tweet_id)) return "missing_field:tweet_id";
  if (missing(v.speaker_id)) return "missing_field:speaker_id";
  if (missing(v.created_at)) return "missing_field:created_at";
  if (!v.text) return "missing_field:text";
  if (v.bad_bool) return "invalid_boolean";
  const auto ts = parse_rfc3339(*v.created_at);
  if (!ts) return "invalid_timestamp";
  t.tweet_id = *v.tweet_id;
  t.speaker_id = *v.speaker_id;
  t.created_at_text = *v.created_at;
  t.created_at = *ts;
  t.country = missing(v.country) ? std::nullopt : v.country;
  t.city = missing(v.city) ? std::nullopt : v.city;
  t.language = v.language.value_or("");
  t.is_retweet = v.is_retweet.value_or(false);
  t.has_url_or_media = v.has_url_or_media;
  t.text = *v.text;
  return {};
}

} // namespace detail

/// Parses one JSONL line. On failure returns the drop reason.
inline std::variant<ParsedRecord, std::string> parse_jsonl_record(std::string_view line) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    return std::string("malformed_json");
  }
  if (!obj.is_object()) return std::string("malformed_json");
  detail::FieldValues v;
  v.tweet_id = detail::json_text(obj, "tweet_id");
  v.speaker_id = detail::json_text(obj, "speaker_id");
  v.created_at = detail::json_text(obj, "created_at");
  v.country = detail::json_text(obj, "country");
  v.city = detail::json_text(obj, "city");
  v.language = detail::json_text(obj, "language");
  v.text = detail::json_text(obj, "text");
  v.is_retweet = detail::json_bool(obj, "is_retweet", v.bad_bool);
  v.has_url_or_media = detail::json_bool(obj, "has_url_or_media", v.bad_bool);

  ParsedRecord rec;
  if (auto err = detail::build_record(v, rec.tweet); !err.empty()) return err;
  if (const auto it = obj.find("tokens"); it != obj.end() && it->is_array()) {
    std::vector<std::string> toks;
    toks.reserve(it->size());
    for (const auto& tok : *it) {
      if (!tok.is_string()) return std::string("malformed_tokens");
      toks.push_back(tok.get<std::string>());
    }
    rec.tokens = std::move(toks);
  }
  return rec;
}

using RecordCallback = std::function<void(ParsedRecord&&)>;
using DiagnosticCallback = std::function<void(const RecordDiagnostic&)>;

/// Streams records in input order. Per-record problems go to `on_diag`;
/// only an unreadable stream or a CSV without a usable header throws.
/// Returns the number of records seen (parsed + dropped).
inline std::size_t parse_records(std::istream& in, RecordFormat format,
                                 const RecordCallback& on_record,
                                 const DiagnosticCallback& on_diag) {
  std::size_t seen = 0;
  if (format == RecordFormat::jsonl) {
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      ++seen;
      auto parsed = parse_jsonl_record(line);
      if (auto* rec = std::get_if<ParsedRecord>(&parsed)) {
        on_record(std::move(*rec));
      } else {
        on_diag({seen, std::get<std::string>(parsed)});
      }
    }
    if (in.bad()) throw Error("io_error", "failed reading input stream");
    return seen;
  }

  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) return 0;
  std::vector<std::string> header = row;
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
  const auto col = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    return std::nullopt;
  };
  const auto c_id = col("tweet_id"), c_speaker = col("speaker_id"), c_created = col("created_at"),
             c_country = col("country"), c_city = col("city"), c_lang = col("language"),
             c_rt = col("is_retweet"), c_url = col("has_url_or_media"), c_text = col("text");
  if (!c_id && !c_speaker && !c_text) {
    throw Error("malformed_csv", "CSV header must name the record columns");
  }
  while (true) {
    bool have = false;
    try {
      have = reader.next(row);
    } catch (const Error&) {
      ++seen;
      on_diag({seen, "malformed_csv"});
      break;
    }
    if (!have) break;
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    ++seen;
    if (row.size() != header.size()) {
      on_diag({seen, "malformed_csv"});
      continue;
    }
    const auto get = [&](const std::optional<std::size_t>& c) -> std::optional<std::string> {
      if (!c) return std::nullopt;
      return row[*c];
    };
    detail::FieldValues v;
    v.tweet_id = get(c_id);
    v.speaker_id = get(c_speaker);
    v.created_at = get(c_created);
    v.country = get(c_country);
    v.city = get(c_city);
    v.language = get(c_lang);
    v.text = get(c_text);
    for (auto [c, dst] : {std::pair{c_rt, &v.is_retweet}, std::pair{c_url, &v.has_url_or_media}}) {
      const auto s = get(c);
      if (s && !trim(*s).empty()) {
        *dst = detail::parse_bool_text(*s);
        if (!*dst) v.bad_bool = true;
      }
    }
    ParsedRecord rec;
    if (auto err = detail::build_record(v, rec.tweet); !err.empty()) {
      on_diag({seen, err});
      continue;
    }
    on_record(std::move(rec));
  }
  if (in.bad()) throw Error("io_error", "failed reading input stream");
  return seen;
}

/// Serializes a curated record as one JSONL object: the input fields plus
/// `tokens` and `day_key`. Field order is fixed.
inline std::string to_jsonl(const CuratedTweet& t) {
  nlohmann::ordered_json j;
  const RawTweet& r = t.raw;
  j["tweet_id"] = r.tweet_id;
  j["speaker_id"] = r.speaker_id;
  j["created_at"] = r.created_at_text;
  j["country"] = r.country ? nlohmann::ordered_json(*r.country) : nlohmann::ordered_json(nullptr);
  j["city"] = r.city ? nlohmann::ordered_json(*r.city) : nlohmann::ordered_json(nullptr);
  j["language"] = r.language;
  j["is_retweet"] = r.is_retweet;
  j["has_url_or_media"] = r.has_url_or_media.value_or(false);
  j["text"] = r.text;
  j["tokens"] = t.tokens;
  j["day_key"] = {{"speaker_id", r.speaker_id}, {"date", t.date().to_string()}};
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

/// Reads curated (or raw) records for downstream analysis. Records without
/// a `tokens` array are tokenized here.
inline std::vector<CuratedTweet> read_curated(std::istream& in, RecordFormat format,
                                              std::vector<RecordDiagnostic>* diags = nullptr) {
  std::vector<CuratedTweet> out;
  parse_records(
      in, format,
      [&](ParsedRecord&& rec) {
        CuratedTweet t;
        t.tokens = rec.tokens ? std::move(*rec.tokens) : tokenize(rec.tweet.text);
        t.raw = std::move(rec.tweet);
        out.push_back(std::move(t));
      },
      [&](const RecordDiagnostic& d) {
        if (diags) diags->push_back(d);
      });
  return out;
}

} // namespace ted
