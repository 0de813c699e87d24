#pragma once

// Corpus curation: language, retweet, URL/media and minimum-length filters,
// then one tweet per speaker per UTC calendar day. Every input record is
// accounted for exactly once, under the first rule it fails.

#include "ted/grouping.hpp"
#include "ted/parallel.hpp"
#include "ted/records.hpp"
#include "ted/tokenizer.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace ted {

namespace rule {
inline constexpr std::string_view language = "language";
inline constexpr std::string_view retweet = "retweet";
inline constexpr std::string_view url_or_media = "url_or_media";
inline constexpr std::string_view min_tokens = "min_tokens";
inline constexpr std::string_view one_per_day = "one_per_day";
} // namespace rule

struct CurationConfig {
  std::string language = "en";
  std::size_t min_tokens = 3;
  std::size_t workers = 1;
};

struct CurationStats {
  std::size_t input_count = 0;
  std::size_t output_count = 0;
  std::map<std::string, std::size_t> dropped_per_rule;

  std::size_t dropped_total() const {
    std::size_t n = 0;
    for (const auto& [r, c] : dropped_per_rule) n += c;
    return n;
  }
  bool conserved() const { return input_count == output_count + dropped_total(); }
};

/// Which rule removed a record; `record` is the 1-based input position.
struct CurationDrop {
  std::size_t record = 0;
  std::string tweet_id;
  std::string rule;
};

struct CurationResult {
  std::vector<CuratedTweet> tweets;
  CurationStats stats;
  std::vector<CurationDrop> drops;
};

/// Case-insensitive scan for `http://`, `https://` or `www.`.
inline bool text_contains_url(std::string_view text) {
  const std::string lower = ascii_lower(text);
  return lower.find("http://") != std::string::npos ||
         lower.find("https://") != std::string::npos || lower.find("www.") != std::string::npos;
}

/// First record-level rule the tweet fails before tokenization, if any.
inline std::optional<std::string_view> prefilter_rule(const RawTweet& t,
                                                      const CurationConfig& cfg) {
  if (t.language != cfg.language) return rule::language;
  if (t.is_retweet) return rule::retweet;
  const bool has_url = t.has_url_or_media ? *t.has_url_or_media : text_contains_url(t.text);
  if (has_url) return rule::url_or_media;
  return std::nullopt;
}

namespace detail {

struct CurationInput {
  RawTweet tweet;
  std::size_t record = 0; ///< 1-based input position
};

struct CurationVerdict {
  std::optional<std::string_view> failed;
  std::vector<std::string> tokens;
};

} // namespace detail

/// Applies the rule pipeline to already-parsed records. `input_count` and
/// `parse_drops` let callers fold parse failures into the same accounting.
inline CurationResult curate(std::vector<detail::CurationInput> inputs, const CurationConfig& cfg,
                             std::size_t input_count,
                             const std::vector<RecordDiagnostic>& parse_drops = {}) {
  CurationResult result;
  result.stats.input_count = input_count;
  for (const auto& d : parse_drops) {
    ++result.stats.dropped_per_rule[d.reason];
    result.drops.push_back({d.record, {}, d.reason});
  }

  const auto verdicts = parallel_map(
      std::span<const detail::CurationInput>(inputs),
      [&cfg](const detail::CurationInput& in) {
        detail::CurationVerdict v;
        v.failed = prefilter_rule(in.tweet, cfg);
        if (v.failed) return v;
        v.tokens = tokenize(in.tweet.text);
        if (v.tokens.size() < cfg.min_tokens) v.failed = rule::min_tokens;
        return v;
      },
      cfg.workers);

  // Earliest tweet per (speaker, UTC day); equal timestamps resolve by tweet id.
  using DayKey = std::pair<std::string, CivilDate>;
  std::map<DayKey, std::size_t> keeper;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (verdicts[i].failed) continue;
    const RawTweet& t = inputs[i].tweet;
    DayKey key{t.speaker_id, utc_date(t.created_at)};
    auto [it, inserted] = keeper.try_emplace(std::move(key), i);
    if (!inserted) {
      const RawTweet& cur = inputs[it->second].tweet;
      if (std::tie(t.created_at, t.tweet_id, i) <
          std::tie(cur.created_at, cur.tweet_id, it->second)) {
        it->second = i;
      }
    }
  }
  std::vector<bool> kept(inputs.size(), false);
  for (const auto& [key, idx] : keeper) kept[idx] = true;

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto& in = inputs[i];
    std::optional<std::string_view> failed = verdicts[i].failed;
    if (!failed && !kept[i]) failed = rule::one_per_day;
    if (failed) {
      ++result.stats.dropped_per_rule[std::string(*failed)];
      result.drops.push_back({in.record, in.tweet.tweet_id, std::string(*failed)});
      continue;
    }
    CuratedTweet out;
    out.raw = std::move(in.tweet);
    out.tokens = verdicts[i].tokens;
    result.tweets.push_back(std::move(out));
  }
  result.stats.output_count = result.tweets.size();
  std::sort(result.drops.begin(), result.drops.end(),
            [](const CurationDrop& a, const CurationDrop& b) { return a.record < b.record; });
  return result;
}

/// Convenience overload for in-memory records.
inline CurationResult curate(std::span<const RawTweet> tweets, const CurationConfig& cfg) {
  std::vector<detail::CurationInput> inputs;
  inputs.reserve(tweets.size());
  for (std::size_t i = 0; i < tweets.size(); ++i) inputs.push_back({tweets[i], i + 1});
  return curate(std::move(inputs), cfg, tweets.size());
}

/// Parses and curates a record stream.
inline CurationResult curate_stream(std::istream& in, RecordFormat format,
                                    const CurationConfig& cfg) {
  std::vector<detail::CurationInput> inputs;
  std::vector<RecordDiagnostic> parse_drops;
  std::size_t seen = 0;
  const std::size_t total = parse_records(
      in, format, [&](ParsedRecord&& rec) { inputs.push_back({std::move(rec.tweet), ++seen}); },
      [&](const RecordDiagnostic& d) {
        ++seen;
        parse_drops.push_back(d);
      });
  return curate(std::move(inputs), cfg, total, parse_drops);
}

/// Corpus size statistics for one group.
struct GroupCorpusStats {
  std::size_t tweets = 0;
  std::size_t tweeters = 0;
  double avg_tokens_per_tweet = 0.0;
};

/// Per-group tweet count, distinct speakers and mean tokens per tweet.
inline std::map<std::string, GroupCorpusStats> corpus_stats(std::span<const CuratedTweet> tweets,
                                                            const KeySpec& key) {
  struct Acc {
    std::size_t tweets = 0;
    std::size_t tokens = 0;
    std::set<std::string> speakers;
  };
  std::map<std::string, Acc> acc;
  for (const auto& t : tweets) {
    Acc& a = acc[key.joined(t.raw)];
    ++a.tweets;
    a.tokens += t.token_count();
    a.speakers.insert(t.raw.speaker_id);
  }
  std::map<std::string, GroupCorpusStats> out;
  for (const auto& [k, a] : acc) {
    out[k] = {a.tweets, a.speakers.size(),
              static_cast<double>(a.tokens) / static_cast<double>(a.tweets)};
  }
  return out;
}

} // namespace ted
