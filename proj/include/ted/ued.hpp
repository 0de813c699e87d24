#pragma once

// Utterance emotion dynamics over tweet streams.
//
// A speaker's tweets are ordered in time and their tokens concatenated. A
// window of `window_size` tokens slides forward one token at a time; each
// window with at least one lexicon word yields an emotion state (the mean
// score of its matched words). From the state series per dimension:
//
//   mean         average of the states
//   variability  standard deviation of the states
//   home base    [mean - sd, mean + sd], closed
//   excursion    a run of states strictly outside the home base; its peak is
//                the extreme state of the run
//   rise rate    displacement from the crossed home boundary to the peak,
//                divided by (peak_index - exit_index + 1) window steps
//   recovery     the same displacement divided by (reentry_index - peak_index)
//
// Rates are averaged per direction (home->high, high->home, home->low,
// low->home) and pooled into overall rise and recovery rates.

#include "ted/csv.hpp"
#include "ted/grouping.hpp"
#include "ted/lexicon.hpp"
#include "ted/parallel.hpp"
#include "ted/records.hpp"
#include "ted/scoring.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ted {

enum class SdConvention { sample, population };
enum class RateOrigin { boundary, center };

struct UedConfig {
  std::size_t window_size = 20;
  std::size_t min_tweets = 100;
  bool cross_tweet_boundaries = true;
  /// Use only polar words for states (sensitivity analysis).
  bool polar_states = false;
  ThresholdConfig thresholds;
  SdConvention sd = SdConvention::sample;
  RateOrigin rate_origin = RateOrigin::boundary;
  std::size_t workers = 1;

  void validate() const {
    if (window_size == 0) throw Error("invalid_config", "window size must be positive");
    thresholds.validate();
  }
};

/// One speaker's time-ordered tweets as a single token sequence.
struct SpeakerStream {
  std::string speaker;
  std::vector<std::string> tokens;
  /// Start offset of each tweet's tokens in `tokens`.
  std::vector<std::size_t> tweet_offsets;
  std::vector<const CuratedTweet*> tweets;

  std::size_t tweet_count() const noexcept { return tweets.size(); }
};

/// Orders tweets by (created_at, tweet_id) and concatenates their tokens.
inline SpeakerStream build_speaker_stream(std::string speaker,
                                          std::vector<const CuratedTweet*> tweets) {
  if (tweets.empty()) throw Error("empty_stream", "speaker '" + speaker + "' has no tweets");
  std::sort(tweets.begin(), tweets.end(), [](const CuratedTweet* a, const CuratedTweet* b) {
    if (a->raw.created_at != b->raw.created_at) return a->raw.created_at < b->raw.created_at;
    return a->raw.tweet_id < b->raw.tweet_id;
  });
  SpeakerStream s;
  s.speaker = std::move(speaker);
  std::size_t total = 0;
  for (const auto* t : tweets) total += t->tokens.size();
  s.tokens.reserve(total);
  s.tweet_offsets.reserve(tweets.size());
  for (const auto* t : tweets) {
    s.tweet_offsets.push_back(s.tokens.size());
    s.tokens.insert(s.tokens.end(), t->tokens.begin(), t->tokens.end());
  }
  s.tweets = std::move(tweets);
  return s;
}

/// Builds the stream of a single speaker; all tweets must share speaker_id.
inline SpeakerStream build_speaker_stream(std::span<const CuratedTweet> tweets) {
  if (tweets.empty()) throw Error("empty_stream", "no tweets supplied");
  std::vector<const CuratedTweet*> ptrs;
  ptrs.reserve(tweets.size());
  for (const auto& t : tweets) {
    if (t.raw.speaker_id != tweets.front().raw.speaker_id) {
      throw Error("mixed_speakers", "tweets belong to more than one speaker");
    }
    ptrs.push_back(&t);
  }
  return build_speaker_stream(tweets.front().raw.speaker_id, std::move(ptrs));
}

struct EmotionState {
  std::size_t window_index = 0;
  double value = 0.0;
};

struct EmotionStateSeries {
  Dimension dimension = Dimension::valence;
  std::size_t window_size = 0;
  std::size_t n_windows = 0; ///< windows examined, including those without matches
  std::vector<EmotionState> states;

  double coverage() const noexcept {
    return n_windows == 0 ? 0.0
                          : static_cast<double>(states.size()) / static_cast<double>(n_windows);
  }
  bool empty() const noexcept { return states.empty(); }
};

namespace detail {

/// Per-token score on one dimension, or NaN when the token has no entry.
inline std::vector<double> token_scores(const SpeakerStream& stream, const Lexicon& lexicon,
                                        Dimension d, const UedConfig& cfg) {
  std::vector<double> out;
  out.reserve(stream.tokens.size());
  std::string lowered;
  for (const auto& tok : stream.tokens) {
    lowered = ascii_lower(tok);
    const Vad* v = lexicon.find(lowered);
    if (v && (!cfg.polar_states || is_polar((*v)[d], cfg.thresholds))) {
      out.push_back((*v)[d]);
    } else {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return out;
}

// Appends the states of windows lying inside [begin, end). A state is the
// exactly rounded sum of the window's scores divided by the number of hits,
// kept within the range of those scores, so windows holding the same words in
// a different order agree bit for bit.
inline void windows_over(std::span<const double> scores, std::size_t begin, std::size_t end,
                         std::size_t width, EmotionStateSeries& series) {
  if (end - begin < width) return;
  ExactSum sum;
  for (std::size_t start = begin; start + width <= end; ++start) {
    sum.clear();
    double lo = 1e300;
    double hi = -1e300;
    std::size_t hits = 0;
    for (std::size_t k = start; k < start + width; ++k) {
      const double v = scores[k];
      if (std::isnan(v)) continue;
      sum.add(v);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      ++hits;
    }
    const std::size_t index = series.n_windows++;
    if (hits > 0) {
      series.states.push_back({index, std::clamp(sum.value() / static_cast<double>(hits), lo, hi)});
    }
  }
}

} // namespace detail

/// Rolling-window emotion states for one dimension. Windows advance over all
/// tokens; windows without any lexicon word are skipped but counted.
inline EmotionStateSeries build_state_series(const SpeakerStream& stream, const Lexicon& lexicon,
                                             Dimension d, const UedConfig& cfg = {}) {
  cfg.validate();
  const std::size_t n = stream.tokens.size();
  if (n < cfg.window_size) {
    throw Error("insufficient_tokens", "stream has " + std::to_string(n) +
                                           " tokens, window needs " +
                                           std::to_string(cfg.window_size));
  }
  EmotionStateSeries series;
  series.dimension = d;
  series.window_size = cfg.window_size;
  const auto scores = detail::token_scores(stream, lexicon, d, cfg);
  if (cfg.cross_tweet_boundaries) {
    detail::windows_over(scores, 0, n, cfg.window_size, series);
  } else {
    for (std::size_t t = 0; t < stream.tweet_offsets.size(); ++t) {
      const std::size_t begin = stream.tweet_offsets[t];
      const std::size_t end = t + 1 < stream.tweet_offsets.size() ? stream.tweet_offsets[t + 1] : n;
      detail::windows_over(scores, begin, end, cfg.window_size, series);
    }
    if (series.n_windows == 0) {
      throw Error("insufficient_tokens",
                  "no tweet is as long as the window and boundary crossing is disabled");
    }
  }
  return series;
}

struct StateSummary {
  double mean = 0.0;
  double variability = 0.0;
};

inline StateSummary summarize(std::span<const EmotionState> states,
                              SdConvention sd = SdConvention::sample) {
  if (states.empty()) throw Error("empty_series", "cannot summarize an empty state series");
  double lo = states.front().value;
  double hi = lo;
  CompensatedSum sum;
  for (const auto& s : states) {
    sum.add(s.value);
    lo = std::min(lo, s.value);
    hi = std::max(hi, s.value);
  }
  if (lo == hi) return {lo, 0.0};
  const double n = static_cast<double>(states.size());
  const double mean = std::clamp(sum.value() / n, lo, hi);
  CompensatedSum sq;
  for (const auto& s : states) {
    const double dev = s.value - mean;
    sq.add(dev * dev);
  }
  const double denom = sd == SdConvention::sample ? n - 1.0 : n;
  return {mean, std::sqrt(sq.value() / denom)};
}

inline StateSummary summarize(const EmotionStateSeries& series,
                              SdConvention sd = SdConvention::sample) {
  return summarize(series.states, sd);
}

/// Closed interval within one standard deviation of the mean state.
///
/// Membership tests allow a relative slack of 1e-12: a series with only two
/// distinct values (population SD) puts every state exactly on a boundary,
/// and rounding in the mean and SD must not push such states outside.
struct HomeBase {
  static constexpr double kBoundarySlack = 1e-12;

  double center = 0.0;
  double half_width = 0.0;

  double low() const noexcept { return center - half_width; }
  double high() const noexcept { return center + half_width; }
  double slack() const noexcept {
    return kBoundarySlack * std::max(1.0, std::abs(center) + half_width);
  }
  bool above(double v) const noexcept { return v > high() + slack(); }
  bool below(double v) const noexcept { return v < low() - slack(); }
  bool contains(double v) const noexcept { return !above(v) && !below(v); }
};

inline HomeBase home_base(double mean, double variability) {
  if (!(variability >= 0.0)) throw Error("invalid_variability", "variability must be >= 0");
  return {mean, variability};
}

inline HomeBase home_base(const StateSummary& s) { return home_base(s.mean, s.variability); }

enum class ExcursionDirection { high, low };

struct Excursion {
  ExcursionDirection direction = ExcursionDirection::high;
  std::size_t exit_index = 0;
  std::size_t peak_index = 0;
  double peak_value = 0.0;
  std::optional<std::size_t> reentry_index;
  bool complete = false;
};

/// Scans states in order. An excursion opens at the first state strictly
/// outside the home base, tracks the extreme of the run, and closes at the
/// next state inside it. Jumping straight to the opposite side closes the
/// current excursion at the crossing state and opens a new one there. A run
/// still open at the end is incomplete.
inline std::vector<Excursion> find_excursions(std::span<const EmotionState> states,
                                              const HomeBase& home) {
  std::vector<Excursion> out;
  std::optional<Excursion> open;
  for (const auto& s : states) {
    std::optional<ExcursionDirection> side;
    if (home.above(s.value)) side = ExcursionDirection::high;
    if (home.below(s.value)) side = ExcursionDirection::low;

    if (open && (!side || *side != open->direction)) {
      open->reentry_index = s.window_index;
      open->complete = true;
      out.push_back(*open);
      open.reset();
    }
    if (!side) continue;
    if (!open) {
      open = Excursion{*side, s.window_index, s.window_index, s.value, std::nullopt, false};
    } else if ((*side == ExcursionDirection::high && s.value > open->peak_value) ||
               (*side == ExcursionDirection::low && s.value < open->peak_value)) {
      open->peak_index = s.window_index;
      open->peak_value = s.value;
    }
  }
  if (open) out.push_back(*open);
  return out;
}

inline std::vector<Excursion> find_excursions(const EmotionStateSeries& series,
                                              const HomeBase& home) {
  return find_excursions(series.states, home);
}

struct RateStats {
  std::optional<double> rise_rate;
  std::optional<double> recovery_rate;
  std::optional<double> rate_hm_hi;
  std::optional<double> rate_hi_hm;
  std::optional<double> rate_hm_lo;
  std::optional<double> rate_lo_hm;
};

/// Rise and recovery of a single excursion. Recovery is absent for
/// incomplete excursions.
struct ExcursionRates {
  double rise = 0.0;
  std::optional<double> recovery;
};

inline ExcursionRates excursion_rates(const Excursion& e, const HomeBase& home,
                                      RateOrigin origin = RateOrigin::boundary) {
  double displacement = 0.0;
  if (e.direction == ExcursionDirection::high) {
    displacement = e.peak_value - (origin == RateOrigin::boundary ? home.high() : home.center);
  } else {
    displacement = (origin == RateOrigin::boundary ? home.low() : home.center) - e.peak_value;
  }
  ExcursionRates r;
  r.rise = displacement / static_cast<double>(e.peak_index - e.exit_index + 1);
  if (e.complete && e.reentry_index) {
    r.recovery = displacement / static_cast<double>(*e.reentry_index - e.peak_index);
  }
  return r;
}

inline RateStats rates(std::span<const Excursion> excursions, const HomeBase& home,
                       RateOrigin origin = RateOrigin::boundary) {
  struct Mean {
    CompensatedSum sum;
    std::size_t n = 0;
    void add(double v) {
      sum.add(v);
      ++n;
    }
    std::optional<double> value() const {
      if (n == 0) return std::nullopt;
      return sum.value() / static_cast<double>(n);
    }
  };
  Mean rise, recovery, hm_hi, hi_hm, hm_lo, lo_hm;
  for (const auto& e : excursions) {
    const auto r = excursion_rates(e, home, origin);
    rise.add(r.rise);
    if (r.recovery) recovery.add(*r.recovery);
    if (e.direction == ExcursionDirection::high) {
      hm_hi.add(r.rise);
      if (r.recovery) hi_hm.add(*r.recovery);
    } else {
      hm_lo.add(r.rise);
      if (r.recovery) lo_hm.add(*r.recovery);
    }
  }
  return {rise.value(),  recovery.value(), hm_hi.value(),
          hi_hm.value(), hm_lo.value(),    lo_hm.value()};
}

struct DimensionProfile {
  Dimension dimension = Dimension::valence;
  std::size_t n_windows = 0;
  std::size_t n_states = 0;
  double coverage = 0.0;
  std::optional<StateSummary> summary; ///< absent when no window matched
  std::optional<HomeBase> home;
  std::size_t n_excursions = 0;
  RateStats rates;
};

struct UedProfile {
  std::string speaker;
  std::string country; ///< most frequent country among the speaker's tweets
  std::string year;    ///< set when every tweet falls in one calendar year
  std::size_t n_tweets = 0;
  std::size_t n_tokens = 0;
  std::array<DimensionProfile, 3> dims;

  const DimensionProfile& operator[](Dimension d) const { return dims[index_of(d)]; }
};

struct SkippedSpeaker {
  std::string speaker;
  std::size_t n_tweets = 0;
  std::string reason;
};

using ProfileOutcome = std::variant<UedProfile, SkippedSpeaker>;

inline DimensionProfile dimension_profile(const SpeakerStream& stream, const Lexicon& lexicon,
                                          Dimension d, const UedConfig& cfg) {
  const auto series = build_state_series(stream, lexicon, d, cfg);
  DimensionProfile p;
  p.dimension = d;
  p.n_windows = series.n_windows;
  p.n_states = series.states.size();
  p.coverage = series.coverage();
  if (series.empty()) return p;
  p.summary = summarize(series, cfg.sd);
  p.home = home_base(*p.summary);
  const auto excursions = find_excursions(series, *p.home);
  p.n_excursions = excursions.size();
  p.rates = rates(excursions, *p.home, cfg.rate_origin);
  return p;
}

namespace detail {

inline void describe_speaker(const SpeakerStream& stream, UedProfile& p) {
  std::map<std::string, std::size_t> countries;
  std::optional<int> year;
  bool one_year = true;
  for (const auto* t : stream.tweets) {
    if (t->raw.country) ++countries[*t->raw.country];
    const int y = t->date().year;
    if (!year) year = y;
    one_year = one_year && *year == y;
  }
  std::size_t best = 0;
  for (const auto& [c, n] : countries) {
    if (n > best) {
      best = n;
      p.country = c;
    }
  }
  if (year && one_year) p.year = std::to_string(*year);
}

} // namespace detail

/// Full profile of one speaker stream, or the reason it was skipped.
inline ProfileOutcome ued_profile(const SpeakerStream& stream, const Lexicon& lexicon,
                                  const UedConfig& cfg = {}) {
  cfg.validate();
  if (stream.tweet_count() < cfg.min_tweets) {
    return SkippedSpeaker{stream.speaker, stream.tweet_count(), "min_tweets"};
  }
  UedProfile p;
  p.speaker = stream.speaker;
  p.n_tweets = stream.tweet_count();
  p.n_tokens = stream.tokens.size();
  detail::describe_speaker(stream, p);
  try {
    for (Dimension d : kAllDimensions) p.dims[index_of(d)] = dimension_profile(stream, lexicon, d, cfg);
  } catch (const Error& e) {
    if (e.code() != "insufficient_tokens") throw;
    return SkippedSpeaker{stream.speaker, stream.tweet_count(), "insufficient_tokens"};
  }
  return p;
}

inline ProfileOutcome ued_profile(std::span<const CuratedTweet> tweets, const Lexicon& lexicon,
                                  const UedConfig& cfg = {}) {
  return ued_profile(build_speaker_stream(tweets), lexicon, cfg);
}

/// Groups curated tweets into speaker streams keyed by `key` (a user, a
/// city, a country, optionally combined with year). Records lacking a key
/// field are skipped and counted.
struct RekeyResult {
  std::vector<SpeakerStream> streams; ///< ascending key order
  std::size_t skipped_missing_key = 0;
};

inline RekeyResult speaker_rekey(std::span<const CuratedTweet> tweets, const KeySpec& key) {
  std::map<std::string, std::vector<const CuratedTweet*>> groups;
  RekeyResult r;
  for (const auto& t : tweets) {
    const auto parts = key.values(t.raw);
    if (std::any_of(parts.begin(), parts.end(), [](const std::string& s) { return s.empty(); })) {
      ++r.skipped_missing_key;
      continue;
    }
    groups[key.joined(t.raw)].push_back(&t);
  }
  r.streams.reserve(groups.size());
  for (auto& [k, v] : groups) r.streams.push_back(build_speaker_stream(k, std::move(v)));
  return r;
}

/// Profiles every stream; output order follows the input order for any
/// worker count.
inline std::vector<ProfileOutcome> profile_all(std::span<const SpeakerStream> streams,
                                               const Lexicon& lexicon, const UedConfig& cfg) {
  cfg.validate();
  return parallel_map(
      streams, [&](const SpeakerStream& s) { return ued_profile(s, lexicon, cfg); }, cfg.workers);
}

// CSV emission ---------------------------------------------------------------

inline const std::vector<std::string>& profile_metric_columns() {
  static const std::vector<std::string> cols{
      "mean",         "variability",   "home_low",   "home_high",  "n_states",
      "coverage",     "n_excursions",  "rise_rate",  "recovery_rate", "rate_hm_hi",
      "rate_hi_hm",   "rate_hm_lo",    "rate_lo_hm"};
  return cols;
}

inline void write_profiles_header(std::ostream& out) {
  std::vector<std::string> h{"speaker", "country", "year", "n_tweets", "dimension"};
  for (const auto& c : profile_metric_columns()) h.push_back(c);
  csv::write_row(out, h);
}

inline void write_profile_rows(std::ostream& out, const UedProfile& p,
                               std::span<const Dimension> dims) {
  for (Dimension d : dims) {
    const auto& dp = p[d];
    const auto opt = [](const std::optional<double>& v) { return csv::format_real(v); };
    std::optional<double> mean, var, lo, hi;
    if (dp.summary) {
      mean = dp.summary->mean;
      var = dp.summary->variability;
      lo = dp.home->low();
      hi = dp.home->high();
    }
    csv::write_row(out, {p.speaker, p.country, p.year, std::to_string(p.n_tweets),
                         std::string(dimension_name(d)), opt(mean), opt(var), opt(lo), opt(hi),
                         std::to_string(dp.n_states), csv::format_real(dp.coverage),
                         std::to_string(dp.n_excursions), opt(dp.rates.rise_rate),
                         opt(dp.rates.recovery_rate), opt(dp.rates.rate_hm_hi),
                         opt(dp.rates.rate_hi_hm), opt(dp.rates.rate_hm_lo),
                         opt(dp.rates.rate_lo_hm)});
  }
}

inline void write_state_series(std::ostream& out, const std::string& speaker,
                               const EmotionStateSeries& series) {
  for (const auto& s : series.states) {
    csv::write_row(out, {speaker, std::string(dimension_name(series.dimension)),
                         std::to_string(s.window_index), csv::format_real(s.value)});
  }
}

} // namespace ted
