#pragma once

// Per-tweet lexicon scores and group aggregates.
//
// A tweet's score on a dimension is the mean of the scores of its tokens
// found in that dimension's polar view. Group means average the per-tweet
// means over tweets with at least one match; presence percentages use every
// tweet in the group as denominator.

#include "ted/csv.hpp"
#include "ted/grouping.hpp"
#include "ted/lexicon.hpp"
#include "ted/numeric.hpp"
#include "ted/parallel.hpp"
#include "ted/records.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace ted {

struct ScoringConfig {
  ThresholdConfig thresholds;
  /// Restrict per-tweet means to polar words (the default). When false the
  /// whole lexicon contributes; presence flags still use the thresholds.
  bool polar_only = true;
};

struct DimensionScore {
  std::optional<double> mean;
  std::size_t matched_count = 0;
  bool has_low = false;
  bool has_high = false;
};

struct TweetScore {
  std::string tweet_id;
  std::string speaker_id;
  std::string country;
  std::string city;
  int year = 0;
  unsigned month = 0;
  std::array<DimensionScore, 3> dims;

  const DimensionScore& operator[](Dimension d) const { return dims[index_of(d)]; }
  DimensionScore& operator[](Dimension d) { return dims[index_of(d)]; }
};

inline std::string key_value(const TweetScore& s, KeyField f) {
  switch (f) {
  case KeyField::speaker:
    return s.speaker_id;
  case KeyField::country:
    return s.country;
  case KeyField::city:
    return s.city;
  case KeyField::year:
    return std::to_string(s.year);
  case KeyField::month:
    return (s.month < 10 ? "0" : "") + std::to_string(s.month);
  }
  return {};
}

/// Scores a token list. Tokens are lowercased before lookup.
inline std::array<DimensionScore, 3> score_tokens(std::span<const std::string> tokens,
                                                  const Lexicon& lexicon,
                                                  const ScoringConfig& cfg = {}) {
  std::array<DimensionScore, 3> out{};
  std::array<double, 3> sums{};
  std::array<double, 3> lo{1.0, 1.0, 1.0};
  std::array<double, 3> hi{0.0, 0.0, 0.0};
  std::string lowered;
  for (const auto& tok : tokens) {
    lowered.assign(tok);
    for (char& c : lowered) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    const Vad* vad = lexicon.find(lowered);
    if (!vad) continue;
    for (Dimension d : kAllDimensions) {
      const double v = (*vad)[d];
      const PolarClass cls = classify(v, cfg.thresholds);
      if (cfg.polar_only && cls == PolarClass::neutral) continue;
      auto& ds = out[index_of(d)];
      const auto i = index_of(d);
      sums[i] += v;
      lo[i] = std::min(lo[i], v);
      hi[i] = std::max(hi[i], v);
      ++ds.matched_count;
      if (cls == PolarClass::low) ds.has_low = true;
      if (cls == PolarClass::high) ds.has_high = true;
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    auto& ds = out[i];
    if (ds.matched_count > 0) {
      ds.mean = std::clamp(sums[i] / static_cast<double>(ds.matched_count), lo[i], hi[i]);
    }
  }
  return out;
}

inline TweetScore score_tweet(const CuratedTweet& tweet, const Lexicon& lexicon,
                              const ScoringConfig& cfg = {}) {
  TweetScore s;
  s.tweet_id = tweet.raw.tweet_id;
  s.speaker_id = tweet.raw.speaker_id;
  s.country = tweet.raw.country.value_or("");
  s.city = tweet.raw.city.value_or("");
  const CivilDate date = tweet.date();
  s.year = date.year;
  s.month = date.month;
  s.dims = score_tokens(tweet.tokens, lexicon, cfg);
  return s;
}

struct DimensionAggregate {
  std::optional<double> mean;
  std::size_t n_scored = 0;
  double pct_at_least_one_low = 0.0;
  double pct_at_least_one_high = 0.0;
};

struct GroupAggregate {
  std::vector<std::string> key;
  std::size_t tweets = 0;
  std::array<DimensionAggregate, 3> dims;

  const DimensionAggregate& operator[](Dimension d) const { return dims[index_of(d)]; }
};

/// Mergeable per-group accumulator.
class ScoreAccumulator {
public:
  void add(const TweetScore& s) {
    ++tweets_;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& ds = s.dims[i];
      auto& a = dims_[i];
      if (ds.mean) {
        a.sum.add(*ds.mean);
        ++a.n_scored;
        a.min = std::min(a.min, *ds.mean);
        a.max = std::max(a.max, *ds.mean);
      }
      a.n_low += ds.has_low ? 1 : 0;
      a.n_high += ds.has_high ? 1 : 0;
    }
  }

  void merge(const ScoreAccumulator& o) {
    tweets_ += o.tweets_;
    for (std::size_t i = 0; i < 3; ++i) {
      auto& a = dims_[i];
      const auto& b = o.dims_[i];
      a.sum.merge(b.sum);
      a.n_scored += b.n_scored;
      a.n_low += b.n_low;
      a.n_high += b.n_high;
      a.min = std::min(a.min, b.min);
      a.max = std::max(a.max, b.max);
    }
  }

  GroupAggregate finish(std::vector<std::string> key) const {
    GroupAggregate g;
    g.key = std::move(key);
    g.tweets = tweets_;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& a = dims_[i];
      auto& out = g.dims[i];
      out.n_scored = a.n_scored;
      if (a.n_scored > 0) {
        out.mean = std::clamp(a.sum.value() / static_cast<double>(a.n_scored), a.min, a.max);
      }
      if (tweets_ > 0) {
        out.pct_at_least_one_low =
            100.0 * static_cast<double>(a.n_low) / static_cast<double>(tweets_);
        out.pct_at_least_one_high =
            100.0 * static_cast<double>(a.n_high) / static_cast<double>(tweets_);
      }
    }
    return g;
  }

private:
  struct Dim {
    CompensatedSum sum;
    std::size_t n_scored = 0;
    std::size_t n_low = 0;
    std::size_t n_high = 0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
  };
  std::size_t tweets_ = 0;
  std::array<Dim, 3> dims_{};
};

/// Single-pass grouped aggregation; memory grows with the number of groups
/// only.
class ScoreAggregator {
public:
  explicit ScoreAggregator(KeySpec key) : key_(std::move(key)) {}

  void add(const TweetScore& s) {
    std::vector<std::string> k;
    k.reserve(key_.fields.size());
    for (KeyField f : key_.fields) k.push_back(key_value(s, f));
    groups_[std::move(k)].add(s);
  }

  void merge(const ScoreAggregator& o) {
    for (const auto& [k, acc] : o.groups_) groups_[k].merge(acc);
  }

  /// Groups in ascending key order.
  std::vector<GroupAggregate> finish() const {
    std::vector<GroupAggregate> out;
    out.reserve(groups_.size());
    for (const auto& [k, acc] : groups_) out.push_back(acc.finish(k));
    return out;
  }

  const KeySpec& key_spec() const noexcept { return key_; }
  std::size_t group_count() const noexcept { return groups_.size(); }

private:
  KeySpec key_;
  std::map<std::vector<std::string>, ScoreAccumulator> groups_;
};

inline std::vector<GroupAggregate> aggregate_scores(std::span<const TweetScore> scores,
                                                    const KeySpec& key) {
  ScoreAggregator agg(key);
  for (const auto& s : scores) agg.add(s);
  return agg.finish();
}

/// The same statistics keyed additionally by calendar year and month.
/// Months without tweets produce no row.
inline KeySpec monthly_key(const KeySpec& key) {
  KeySpec k = key;
  std::erase_if(k.fields, [](KeyField f) { return f == KeyField::year || f == KeyField::month; });
  k.fields.push_back(KeyField::year);
  k.fields.push_back(KeyField::month);
  return k;
}

inline std::vector<GroupAggregate> monthly_rollup(std::span<const TweetScore> scores,
                                                  const KeySpec& key) {
  return aggregate_scores(scores, monthly_key(key));
}

/// Streaming scorer: tweets are buffered into batches, scored (in parallel
/// when `workers` > 1), then folded into the group and monthly aggregators
/// in arrival order. Memory is bounded by the batch size plus the number of
/// groups.
class ScoringPipeline {
public:
  using ScoreSink = std::function<void(const TweetScore&)>;

  ScoringPipeline(const Lexicon& lexicon, ScoringConfig cfg, KeySpec group_key,
                  std::size_t workers = 1, std::size_t batch_size = 4096)
      : lexicon_(&lexicon), cfg_(cfg), groups_(group_key), monthly_(monthly_key(group_key)),
        workers_(std::max<std::size_t>(1, workers)), batch_size_(std::max<std::size_t>(1, batch_size)) {
    cfg_.thresholds.validate();
    batch_.reserve(batch_size_);
  }

  void on_score(ScoreSink sink) { sink_ = std::move(sink); }

  void push(CuratedTweet tweet) {
    batch_.push_back(std::move(tweet));
    if (batch_.size() >= batch_size_) flush();
  }

  void flush() {
    if (batch_.empty()) return;
    const auto scores = parallel_map(
        std::span<const CuratedTweet>(batch_),
        [this](const CuratedTweet& t) { return score_tweet(t, *lexicon_, cfg_); }, workers_);
    for (const auto& s : scores) {
      if (sink_) sink_(s);
      groups_.add(s);
      monthly_.add(s);
    }
    count_ += scores.size();
    batch_.clear();
  }

  const ScoreAggregator& groups() const noexcept { return groups_; }
  const ScoreAggregator& monthly() const noexcept { return monthly_; }
  std::size_t scored() const noexcept { return count_; }

private:
  const Lexicon* lexicon_;
  ScoringConfig cfg_;
  ScoreAggregator groups_;
  ScoreAggregator monthly_;
  std::size_t workers_;
  std::size_t batch_size_;
  std::vector<CuratedTweet> batch_;
  ScoreSink sink_;
  std::size_t count_ = 0;
};

// CSV emission ---------------------------------------------------------------

inline std::vector<Dimension> all_dimensions() {
  return {kAllDimensions.begin(), kAllDimensions.end()};
}

inline void write_scores_header(std::ostream& out, std::span<const Dimension> dims) {
  std::vector<std::string> h{"tweet_id", "speaker_id", "country", "city", "year", "month"};
  for (Dimension d : dims) {
    const std::string c(1, dimension_code(d));
    for (const char* suffix : {"_mean", "_n", "_has_low", "_has_high"}) h.push_back(c + suffix);
  }
  csv::write_row(out, h);
}

inline void write_score_row(std::ostream& out, const TweetScore& s,
                            std::span<const Dimension> dims) {
  std::vector<std::string> row{s.tweet_id, s.speaker_id, s.country, s.city,
                               std::to_string(s.year), std::to_string(s.month)};
  for (Dimension d : dims) {
    const auto& ds = s[d];
    row.push_back(csv::format_real(ds.mean));
    row.push_back(std::to_string(ds.matched_count));
    row.push_back(ds.has_low ? "1" : "0");
    row.push_back(ds.has_high ? "1" : "0");
  }
  csv::write_row(out, row);
}

inline void write_aggregates(std::ostream& out, const KeySpec& key,
                             std::span<const GroupAggregate> groups,
                             std::span<const Dimension> dims) {
  std::vector<std::string> h = key.column_names();
  h.push_back("tweets");
  for (Dimension d : dims) {
    const std::string c(1, dimension_code(d));
    for (const char* suffix : {"_mean", "_n_scored", "_pct_low", "_pct_high"}) {
      h.push_back(c + suffix);
    }
  }
  csv::write_row(out, h);
  for (const auto& g : groups) {
    std::vector<std::string> row = g.key;
    row.push_back(std::to_string(g.tweets));
    for (Dimension d : dims) {
      const auto& a = g[d];
      row.push_back(csv::format_real(a.mean));
      row.push_back(std::to_string(a.n_scored));
      row.push_back(csv::format_real(a.pct_at_least_one_low));
      row.push_back(csv::format_real(a.pct_at_least_one_high));
    }
    csv::write_row(out, row);
  }
}

} // namespace ted
