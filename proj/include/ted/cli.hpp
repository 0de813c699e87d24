#pragma once

// Subcommand implementations behind the `ted` executable. Each command
// validates its configuration and inputs before creating any output file;
// outputs are written to a temporary sibling and renamed into place on
// success, so a failed run leaves nothing behind.

#include "ted/curation.hpp"
#include "ted/lexicon.hpp"
#include "ted/records.hpp"
#include "ted/scoring.hpp"
#include "ted/stats.hpp"
#include "ted/ued.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace ted::cli {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kFatal = 1, kValidation = 2 };

/// Data problems found after the configuration was accepted (unpaired
/// comparison keys, missing columns, ...). Maps to exit code 2.
class ValidationError : public Error {
public:
  using Error::Error;
};

struct RunConfig {
  std::string lexicon;
  /// Empty selects the built-in removal list; "none" disables removal.
  std::string removals;
  ThresholdConfig thresholds;
  std::size_t window = 20;
  std::size_t min_tweets = 100;
  stats::QuartileMethod quartiles = stats::QuartileMethod::linear;
  bool cross_boundaries = true;
  bool polar_states = false;
  bool polar_only = true;
  SdConvention sd = SdConvention::sample;
  RateOrigin rate_origin = RateOrigin::boundary;
  std::size_t workers = 1;

  std::string input;
  std::string output;
  RecordFormat format = RecordFormat::jsonl;
  std::string dimensions = "V,A,D";
  std::string manifest; ///< empty derives a path from the primary output

  // curate
  bool stats_only = false;
  std::string report;
  std::string drops;
  std::string corpus_stats;
  std::string group_by;
  std::string language = "en";
  std::size_t min_tokens = 3;

  // ued
  std::string speaker_key = "user";
  bool by_year = false;
  std::string dump_states;
  std::string skip_report;

  // compare
  std::string a;
  std::string b;
  std::string pair_key;
  std::string metric;
  std::vector<std::string> select_a;
  std::vector<std::string> select_b;
  double alpha = stats::kDefaultAlpha;

  // report
  std::string group_cols = "country,year,dimension";
  std::string metrics = "mean,variability,rise_rate,recovery_rate";
  double bin_width = 0.005;
};

// Config files ---------------------------------------------------------------

/// Parses `key = value` lines. Blank lines and lines starting with '#' are
/// ignored; keys are long option names without the leading dashes.
inline std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw Error("invalid_config", "config line " + std::to_string(n) + ": expected key=value");
    }
    std::string key(trim(t.substr(0, eq)));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    if (key.empty()) throw Error("invalid_config", "config line " + std::to_string(n) + ": empty key");
    out.emplace_back(std::move(key), std::string(trim(t.substr(eq + 1))));
  }
  return out;
}

inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io_error", "cannot open config file '" + path + "'");
  return parse_config(in);
}

// Helpers --------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::istream& in) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

inline void require_file(const std::string& path, std::string_view what) {
  if (path.empty()) throw Error("invalid_config", std::string(what) + " path is required");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error("io_error", std::string(what) + " '" + path + "' does not exist");
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io_error", "cannot open '" + path + "'");
  return in;
}

/// Output file written under a temporary name and renamed on commit().
class AtomicFile {
public:
  explicit AtomicFile(std::string path) : path_(std::move(path)), tmp_(path_ + ".tmp") {
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error("io_error", "cannot write '" + path_ + "'");
  }
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;
  ~AtomicFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

  std::ostream& stream() { return out_; }
  const std::string& path() const noexcept { return path_; }

  void commit() {
    out_.close();
    if (!out_) throw Error("io_error", "failed writing '" + path_ + "'");
    std::error_code ec;
    std::filesystem::rename(tmp_, path_, ec);
    if (ec) throw Error("io_error", "cannot rename into '" + path_ + "': " + ec.message());
    committed_ = true;
  }

private:
  std::string path_;
  std::string tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

inline void commit_all(std::vector<AtomicFile*> files) {
  for (auto* f : files) {
    if (f) f->commit();
  }
}

inline std::vector<Dimension> parse_dimensions(std::string_view list) {
  std::vector<Dimension> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const auto comma = list.find(',', pos);
    const auto item =
        trim(list.substr(pos, comma == std::string_view::npos ? list.npos : comma - pos));
    if (!item.empty()) {
      const auto d = parse_dimension(item);
      if (!d) throw Error("invalid_config", "unknown dimension '" + std::string(item) + "'");
      if (std::find(out.begin(), out.end(), *d) == out.end()) out.push_back(*d);
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw Error("invalid_config", "no dimensions selected");
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::string> split_list(std::string_view list) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const auto comma = list.find(',', pos);
    const auto item =
        trim(list.substr(pos, comma == std::string_view::npos ? list.npos : comma - pos));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline void validate_common(const RunConfig& c) {
  c.thresholds.validate();
  if (c.workers == 0 || c.workers > 256) {
    throw Error("invalid_config", "workers must be in [1, 256]");
  }
}

inline std::vector<std::string> removal_words(const RunConfig& c) {
  if (c.removals.empty()) return default_removal_list();
  if (c.removals == "none") return {};
  auto in = open_input(c.removals);
  return read_removal_list(in);
}

inline Lexicon load_lexicon(const RunConfig& c, std::ostream& err) {
  const auto removals = removal_words(c);
  auto in = open_input(c.lexicon);
  LexiconLoadReport report;
  Lexicon lex = Lexicon::load(in, removals, &report);
  if (report.rejected > 0) {
    err << "lexicon: " << report.rejected << " malformed line(s) skipped";
    if (!report.diagnostics.empty()) {
      err << " (first at line " << report.diagnostics.front().line << ": "
          << report.diagnostics.front().message << ")";
    }
    err << '\n';
  }
  return lex;
}

// Run manifest ---------------------------------------------------------------

inline nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["lexicon"] = c.lexicon;
  j["removals"] = c.removals.empty() ? "builtin" : c.removals;
  j["threshold_low"] = c.thresholds.low;
  j["threshold_high"] = c.thresholds.high;
  j["window"] = c.window;
  j["min_tweets"] = c.min_tweets;
  j["quartiles"] = c.quartiles == stats::QuartileMethod::linear ? "linear" : "tukey";
  j["cross_boundaries"] = c.cross_boundaries;
  j["polar_states"] = c.polar_states;
  j["polar_only"] = c.polar_only;
  j["sd"] = c.sd == SdConvention::sample ? "sample" : "population";
  j["rate_origin"] = c.rate_origin == RateOrigin::boundary ? "boundary" : "center";
  j["workers"] = c.workers;
  j["input"] = c.input;
  j["output"] = c.output;
  j["format"] = c.format == RecordFormat::jsonl ? "jsonl" : "csv";
  j["dimensions"] = c.dimensions;
  j["stats_only"] = c.stats_only;
  j["group_by"] = c.group_by;
  j["language"] = c.language;
  j["min_tokens"] = c.min_tokens;
  j["speaker_key"] = c.speaker_key;
  j["by_year"] = c.by_year;
  j["a"] = c.a;
  j["b"] = c.b;
  j["pair_key"] = c.pair_key;
  j["metric"] = c.metric;
  j["select_a"] = c.select_a;
  j["select_b"] = c.select_b;
  j["alpha"] = c.alpha;
  j["group_cols"] = c.group_cols;
  j["metrics"] = c.metrics;
  j["bins"] = c.bin_width;
  return j;
}

/// Writes `<base>.manifest.json` (or the configured manifest path) holding
/// the command, the effective configuration and checksums of every input.
inline void write_manifest(const RunConfig& c, std::string_view command, const std::string& base,
                           const std::vector<std::string>& inputs,
                           const std::vector<std::string>& outputs) {
  const std::string path = c.manifest.empty() ? base + ".manifest.json" : c.manifest;
  if (path == ".manifest.json") return;
  nlohmann::ordered_json j;
  j["tool"] = "ted";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = config_json(c);
  auto& arr = j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& p : inputs) {
    if (p.empty()) continue;
    auto in = open_input(p);
    const auto h = fnv1a64(in);
    arr.push_back({{"path", p},
                   {"bytes", std::filesystem::file_size(p)},
                   {"fnv1a64", hex64(h)}});
  }
  j["outputs"] = outputs;
  AtomicFile f(path);
  f.stream() << j.dump(2) << '\n';
  f.commit();
}

// curate ---------------------------------------------------------------------

inline void write_curation_report(std::ostream& out, const CurationStats& s) {
  csv::write_row(out, {"item", "count"});
  csv::write_row(out, {"input", std::to_string(s.input_count)});
  csv::write_row(out, {"output", std::to_string(s.output_count)});
  std::set<std::string> listed;
  for (std::string_view r :
       {rule::language, rule::retweet, rule::url_or_media, rule::min_tokens, rule::one_per_day}) {
    const auto it = s.dropped_per_rule.find(std::string(r));
    csv::write_row(out, {"drop:" + std::string(r),
                         std::to_string(it == s.dropped_per_rule.end() ? 0 : it->second)});
    listed.emplace(r);
  }
  for (const auto& [r, n] : s.dropped_per_rule) {
    if (!listed.contains(r)) csv::write_row(out, {"drop:" + r, std::to_string(n)});
  }
  csv::write_row(out, {"dropped_total", std::to_string(s.dropped_total())});
}

inline void write_corpus_stats(std::ostream& out,
                               const std::map<std::string, GroupCorpusStats>& stats) {
  csv::write_row(out, {"group", "tweets", "tweeters", "avg_tokens_per_tweet"});
  for (const auto& [g, s] : stats) {
    csv::write_row(out, {g, std::to_string(s.tweets), std::to_string(s.tweeters),
                         csv::format_real(s.avg_tokens_per_tweet)});
  }
}

inline int cmd_curate(const RunConfig& c, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
  validate_common(c);
  require_file(c.input, "input");
  if (!c.stats_only && c.output.empty()) {
    throw Error("invalid_config", "--output is required unless --stats-only is given");
  }
  const KeySpec group = KeySpec::parse(c.group_by.empty() ? "country" : c.group_by);

  CurationConfig cc;
  cc.language = c.language;
  cc.min_tokens = c.min_tokens;
  cc.workers = c.workers;
  auto in = open_input(c.input);
  const CurationResult res = curate_stream(in, c.format, cc);
  if (!res.stats.conserved()) throw Error("internal", "curation accounting is not conserved");

  std::optional<AtomicFile> curated, report, drops, corpus;
  if (!c.stats_only) {
    curated.emplace(c.output);
    for (const auto& t : res.tweets) curated->stream() << to_jsonl(t) << '\n';
  }
  if (!c.report.empty()) {
    report.emplace(c.report);
    write_curation_report(report->stream(), res.stats);
  } else {
    write_curation_report(out, res.stats);
  }
  if (!c.drops.empty()) {
    drops.emplace(c.drops);
    csv::write_row(drops->stream(), {"record", "tweet_id", "rule"});
    for (const auto& d : res.drops) {
      csv::write_row(drops->stream(), {std::to_string(d.record), d.tweet_id, d.rule});
    }
  }
  if (!c.corpus_stats.empty()) {
    corpus.emplace(c.corpus_stats);
    write_corpus_stats(corpus->stream(), corpus_stats(res.tweets, group));
  }
  commit_all({curated ? &*curated : nullptr, report ? &*report : nullptr,
              drops ? &*drops : nullptr, corpus ? &*corpus : nullptr});

  std::vector<std::string> outputs;
  for (const auto* f : {&curated, &report, &drops, &corpus}) {
    if (*f) outputs.push_back((*f)->path());
  }
  const std::string base = !c.output.empty() ? c.output : c.report;
  write_manifest(c, "curate", base, {c.input}, outputs);
  err << "curate: " << res.stats.input_count << " in, " << res.stats.output_count << " kept, "
      << res.stats.dropped_total() << " dropped\n";
  return kOk;
}

// score ----------------------------------------------------------------------

inline int cmd_score(const RunConfig& c, std::ostream& err = std::cerr) {
  validate_common(c);
  require_file(c.lexicon, "lexicon");
  require_file(c.input, "input");
  if (c.output.empty()) throw Error("invalid_config", "--output prefix is required");
  const auto dims = parse_dimensions(c.dimensions);
  const KeySpec group = KeySpec::parse(c.group_by.empty() ? "country,year" : c.group_by);
  if (!c.removals.empty() && c.removals != "none") require_file(c.removals, "removal list");

  const Lexicon lex = load_lexicon(c, err);
  ScoringConfig sc;
  sc.thresholds = c.thresholds;
  sc.polar_only = c.polar_only;

  AtomicFile scores(c.output + ".scores.csv");
  AtomicFile aggregates(c.output + ".aggregates.csv");
  AtomicFile monthly(c.output + ".monthly.csv");
  write_scores_header(scores.stream(), dims);

  ScoringPipeline pipeline(lex, sc, group, c.workers);
  pipeline.on_score([&](const TweetScore& s) { write_score_row(scores.stream(), s, dims); });
  std::size_t bad = 0;
  auto in = open_input(c.input);
  parse_records(
      in, c.format,
      [&](ParsedRecord&& rec) {
        CuratedTweet t;
        t.tokens = rec.tokens ? std::move(*rec.tokens) : tokenize(rec.tweet.text);
        t.raw = std::move(rec.tweet);
        pipeline.push(std::move(t));
      },
      [&](const RecordDiagnostic& d) {
        if (bad++ == 0) err << "score: record " << d.record << " skipped (" << d.reason << ")\n";
      });
  pipeline.flush();
  if (bad > 1) err << "score: " << bad << " records skipped in total\n";

  const auto g = pipeline.groups().finish();
  write_aggregates(aggregates.stream(), group, g, dims);
  const auto m = pipeline.monthly().finish();
  write_aggregates(monthly.stream(), pipeline.monthly().key_spec(), m, dims);
  commit_all({&scores, &aggregates, &monthly});
  write_manifest(c, "score", c.output, {c.input, c.lexicon, c.removals == "none" ? "" : c.removals},
                 {scores.path(), aggregates.path(), monthly.path()});
  err << "score: " << pipeline.scored() << " tweets, " << g.size() << " groups\n";
  return kOk;
}

// ued ------------------------------------------------------------------------

inline KeySpec speaker_key_spec(const RunConfig& c) {
  std::string spec;
  if (c.speaker_key == "user" || c.speaker_key == "speaker") {
    spec = "speaker";
  } else if (c.speaker_key == "city" || c.speaker_key == "country") {
    spec = c.speaker_key;
  } else {
    throw Error("invalid_config", "--speaker-key must be user, city or country");
  }
  if (c.by_year) spec += ",year";
  return KeySpec::parse(spec);
}

inline UedConfig ued_config(const RunConfig& c) {
  UedConfig u;
  u.window_size = c.window;
  u.min_tweets = c.min_tweets;
  u.cross_tweet_boundaries = c.cross_boundaries;
  u.polar_states = c.polar_states;
  u.thresholds = c.thresholds;
  u.sd = c.sd;
  u.rate_origin = c.rate_origin;
  u.workers = c.workers;
  return u;
}

inline int cmd_ued(const RunConfig& c, std::ostream& err = std::cerr) {
  validate_common(c);
  require_file(c.lexicon, "lexicon");
  require_file(c.input, "input");
  if (c.output.empty()) throw Error("invalid_config", "--output is required");
  if (c.window == 0 || c.window > 100000) {
    throw Error("invalid_config", "window must be in [1, 100000]");
  }
  if (!c.removals.empty() && c.removals != "none") require_file(c.removals, "removal list");
  const auto dims = parse_dimensions(c.dimensions);
  const KeySpec key = speaker_key_spec(c);
  const UedConfig ucfg = ued_config(c);
  ucfg.validate();

  const Lexicon lex = load_lexicon(c, err);
  std::vector<RecordDiagnostic> diags;
  auto in = open_input(c.input);
  const auto tweets = read_curated(in, c.format, &diags);
  if (!diags.empty()) err << "ued: " << diags.size() << " records skipped\n";

  const RekeyResult rk = speaker_rekey(tweets, key);
  if (rk.skipped_missing_key > 0) {
    err << "ued: " << rk.skipped_missing_key << " tweets lack the speaker key\n";
  }
  const auto outcomes = profile_all(rk.streams, lex, ucfg);

  AtomicFile profiles(c.output);
  AtomicFile skipped(c.skip_report.empty() ? c.output + ".skipped.csv" : c.skip_report);
  std::optional<AtomicFile> states;
  write_profiles_header(profiles.stream());
  csv::write_row(skipped.stream(), {"speaker", "n_tweets", "reason"});
  if (!c.dump_states.empty()) {
    states.emplace(c.dump_states);
    csv::write_row(states->stream(), {"speaker", "dimension", "window_index", "value"});
  }
  std::size_t n_profiles = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (const auto* p = std::get_if<UedProfile>(&outcomes[i])) {
      ++n_profiles;
      write_profile_rows(profiles.stream(), *p, dims);
      if (states) {
        for (Dimension d : dims) {
          write_state_series(states->stream(), p->speaker,
                             build_state_series(rk.streams[i], lex, d, ucfg));
        }
      }
    } else {
      const auto& s = std::get<SkippedSpeaker>(outcomes[i]);
      csv::write_row(skipped.stream(), {s.speaker, std::to_string(s.n_tweets), s.reason});
    }
  }
  commit_all({&profiles, &skipped, states ? &*states : nullptr});
  std::vector<std::string> outputs{profiles.path(), skipped.path()};
  if (states) outputs.push_back(states->path());
  write_manifest(c, "ued", c.output, {c.input, c.lexicon, c.removals == "none" ? "" : c.removals},
                 outputs);
  err << "ued: " << n_profiles << " profiles, " << outcomes.size() - n_profiles
      << " speakers skipped\n";
  return kOk;
}

// compare --------------------------------------------------------------------

namespace detail {

struct Selection {
  std::size_t column;
  std::string value;
};

inline std::vector<Selection> parse_selections(const csv::Table& t,
                                               const std::vector<std::string>& specs,
                                               const std::string& file) {
  std::vector<Selection> out;
  for (const auto& s : specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw Error("invalid_config", "selection '" + s + "' must be column=value");
    }
    const std::string col(trim(std::string_view(s).substr(0, eq)));
    const auto idx = t.column(col);
    if (!idx) throw ValidationError("missing_column", file + ": no column '" + col + "'");
    out.push_back({*idx, std::string(trim(std::string_view(s).substr(eq + 1)))});
  }
  return out;
}

inline std::size_t require_column(const csv::Table& t, const std::string& name,
                                  const std::string& file) {
  const auto idx = t.column(name);
  if (!idx) throw ValidationError("missing_column", file + ": no column '" + name + "'");
  return *idx;
}

/// Rows passing the selections, keyed by the pairing columns.
inline std::map<std::string, const std::vector<std::string>*>
keyed_rows(const csv::Table& t, const std::vector<std::size_t>& key_cols,
           const std::vector<Selection>& sel, const std::string& file) {
  std::map<std::string, const std::vector<std::string>*> out;
  std::vector<std::string> dups;
  for (const auto& row : t.rows) {
    bool keep = true;
    for (const auto& s : sel) keep = keep && row[s.column] == s.value;
    if (!keep) continue;
    std::string k;
    for (std::size_t i = 0; i < key_cols.size(); ++i) {
      if (i) k += '/';
      k += row[key_cols[i]];
    }
    if (!out.emplace(k, &row).second) dups.push_back(k);
  }
  if (!dups.empty()) {
    std::string msg = file + ": pairing key is not unique:";
    for (const auto& d : dups) msg += " " + d;
    throw ValidationError("duplicate_keys", msg);
  }
  return out;
}

inline csv::Table load_table(const std::string& path) {
  auto in = open_input(path);
  return csv::read_table(in);
}

} // namespace detail

inline int cmd_compare(const RunConfig& c, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  require_file(c.a, "--a");
  require_file(c.b, "--b");
  const auto pair_cols = split_list(c.pair_key);
  if (pair_cols.empty()) throw Error("invalid_config", "--pair-key is required");
  const auto metrics = split_list(c.metric);
  if (metrics.empty()) throw Error("invalid_config", "--metric is required");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw Error("invalid_config", "alpha must be in (0,1)");

  const csv::Table ta = detail::load_table(c.a);
  const csv::Table tb = detail::load_table(c.b);
  auto key_idx = [&](const csv::Table& t, const std::string& file) {
    std::vector<std::size_t> idx;
    for (const auto& k : pair_cols) idx.push_back(detail::require_column(t, k, file));
    return idx;
  };
  const auto rows_a = detail::keyed_rows(ta, key_idx(ta, c.a),
                                         detail::parse_selections(ta, c.select_a, c.a), c.a);
  const auto rows_b = detail::keyed_rows(tb, key_idx(tb, c.b),
                                         detail::parse_selections(tb, c.select_b, c.b), c.b);

  std::vector<std::string> only_a, only_b;
  for (const auto& [k, r] : rows_a) {
    if (!rows_b.contains(k)) only_a.push_back(k);
  }
  for (const auto& [k, r] : rows_b) {
    if (!rows_a.contains(k)) only_b.push_back(k);
  }
  if (!only_a.empty() || !only_b.empty()) {
    std::string msg = "unpaired rows;";
    if (!only_a.empty()) {
      msg += " only in a:";
      for (const auto& k : only_a) msg += " " + k;
      msg += ";";
    }
    if (!only_b.empty()) {
      msg += " only in b:";
      for (const auto& k : only_b) msg += " " + k;
    }
    throw ValidationError("unmatched_keys", msg);
  }

  std::vector<std::pair<std::string, stats::PairedTestResult>> results;
  for (const auto& m : metrics) {
    const auto ia = detail::require_column(ta, m, c.a);
    const auto ib = detail::require_column(tb, m, c.b);
    std::vector<double> va, vb;
    std::size_t missing = 0;
    for (const auto& [k, ra] : rows_a) {
      const auto* rb = rows_b.at(k);
      const auto x = csv::parse_real((*ra)[ia]);
      const auto y = csv::parse_real((*rb)[ib]);
      if ((*ra)[ia].empty() || (*rb)[ib].empty()) {
        ++missing;
        continue;
      }
      if (!x || !y) {
        throw ValidationError("malformed_value", "non-numeric " + m + " value for key " + k);
      }
      va.push_back(*x);
      vb.push_back(*y);
    }
    if (missing > 0) err << "compare: " << m << ": " << missing << " pair(s) with empty values left out\n";
    try {
      results.emplace_back(m, stats::paired_t_test(va, vb, c.alpha));
    } catch (const Error& e) {
      throw ValidationError(e.code(), m + ": " + e.what());
    }
  }

  std::optional<AtomicFile> file;
  std::ostream* o = &out;
  if (!c.output.empty()) {
    file.emplace(c.output);
    o = &file->stream();
  }
  stats::write_test_header(*o);
  for (const auto& [m, r] : results) stats::write_test_row(*o, m, r);
  if (file) {
    file->commit();
    write_manifest(c, "compare", c.output, {c.a, c.b}, {c.output});
  }
  return kOk;
}

// report ---------------------------------------------------------------------

inline int cmd_report(const RunConfig& c, std::ostream& err = std::cerr) {
  require_file(c.input, "input");
  if (c.output.empty()) throw Error("invalid_config", "--output prefix is required");
  stats::bin_count(c.bin_width);
  const auto group_cols = split_list(c.group_cols);
  const auto metrics = split_list(c.metrics);
  if (metrics.empty()) throw Error("invalid_config", "--metrics must name at least one column");

  const csv::Table t = detail::load_table(c.input);
  std::vector<std::size_t> gidx, midx;
  for (const auto& g : group_cols) gidx.push_back(detail::require_column(t, g, c.input));
  for (const auto& m : metrics) midx.push_back(detail::require_column(t, m, c.input));

  std::map<std::vector<std::string>, std::vector<std::vector<double>>> groups;
  std::size_t bad = 0;
  for (const auto& row : t.rows) {
    std::vector<std::string> key;
    for (auto i : gidx) key.push_back(row[i]);
    auto& cols = groups[key];
    cols.resize(metrics.size());
    for (std::size_t j = 0; j < midx.size(); ++j) {
      const auto& cell = row[midx[j]];
      if (cell.empty()) continue;
      const auto v = csv::parse_real(cell);
      if (!v) {
        ++bad;
        continue;
      }
      cols[j].push_back(*v);
    }
  }
  if (bad > 0) err << "report: " << bad << " non-numeric cells ignored\n";

  AtomicFile box(c.output + ".box.csv");
  AtomicFile hist(c.output + ".hist.csv");
  {
    auto h = group_cols;
    for (const char* s : {"metric", "n", "q1", "median", "q3", "whisker_low", "whisker_high",
                          "mean", "n_outliers", "outliers"}) {
      h.emplace_back(s);
    }
    csv::write_row(box.stream(), h);
    auto hh = group_cols;
    for (const char* s : {"metric", "bin", "bin_low", "bin_high", "count"}) hh.emplace_back(s);
    csv::write_row(hist.stream(), hh);
  }
  for (const auto& [key, cols] : groups) {
    for (std::size_t j = 0; j < metrics.size(); ++j) {
      const auto& vals = cols[j];
      if (vals.empty()) continue;
      const auto b = stats::box_stats(vals, c.quartiles);
      std::string outl;
      for (std::size_t k = 0; k < b.outliers.size(); ++k) {
        if (k) outl += ';';
        outl += csv::format_real(b.outliers[k]);
      }
      auto row = key;
      row.insert(row.end(),
                 {metrics[j], std::to_string(b.n), csv::format_real(b.q1),
                  csv::format_real(b.median), csv::format_real(b.q3),
                  csv::format_real(b.whisker_low), csv::format_real(b.whisker_high),
                  csv::format_real(b.mean), std::to_string(b.outliers.size()), outl});
      csv::write_row(box.stream(), row);

      const auto h = stats::histogram(vals, c.bin_width);
      for (std::size_t k = 0; k < h.counts.size(); ++k) {
        auto hr = key;
        hr.insert(hr.end(), {metrics[j], std::to_string(k), csv::format_real(h.bin_low(k)),
                             csv::format_real(h.bin_high(k)), std::to_string(h.counts[k])});
        csv::write_row(hist.stream(), hr);
      }
      auto over = key;
      over.insert(over.end(), {metrics[j], "out_of_range", "", "", std::to_string(h.out_of_range)});
      csv::write_row(hist.stream(), over);
    }
  }
  commit_all({&box, &hist});
  write_manifest(c, "report", c.output, {c.input}, {box.path(), hist.path()});
  return kOk;
}

/// Runs `fn`, mapping errors to exit codes and printing them to `err`.
template <typename Fn>
int guarded(std::string_view command, Fn&& fn, std::ostream& err = std::cerr) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    err << "ted " << command << ": " << e.what() << '\n';
    return kValidation;
  } catch (const Error& e) {
    err << "ted " << command << ": " << e.what() << '\n';
    return kFatal;
  } catch (const std::exception& e) {
    err << "ted " << command << ": " << e.what() << '\n';
    return kFatal;
  }
}

} // namespace ted::cli
