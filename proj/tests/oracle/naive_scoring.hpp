#pragma once

// Two-pass group scoring: first every tweet's per-dimension polar mean,
// then group means and presence percentages from those lists.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "naive_ued.hpp"

namespace oracle {

struct ScoredTweet {
  std::optional<double> mean[3];
  bool low[3] = {false, false, false};
  bool high[3] = {false, false, false};
};

struct GroupResult {
  std::size_t tweets = 0;
  std::optional<double> mean[3];
  std::size_t n_scored[3] = {0, 0, 0};
  double pct_low[3] = {0, 0, 0};
  double pct_high[3] = {0, 0, 0};
};

inline ScoredTweet score(const std::vector<std::string>& tokens, const Lex& lex, double lo,
                         double hi) {
  ScoredTweet s;
  for (int d = 0; d < 3; ++d) {
    std::vector<double> polar;
    for (const auto& t : tokens) {
      auto it = lex.find(lower(t));
      if (it == lex.end()) continue;
      double v = it->second[d];
      if (v <= lo) {
        polar.push_back(v);
        s.low[d] = true;
      } else if (v >= hi) {
        polar.push_back(v);
        s.high[d] = true;
      }
    }
    s.mean[d] = avg(polar);
  }
  return s;
}

/// `group_of` maps tweet index to its group label.
template <typename GroupOf>
std::map<std::string, GroupResult> group_scores(const std::vector<Tweet>& tweets, const Lex& lex,
                                                GroupOf group_of, double lo = 0.33,
                                                double hi = 0.67) {
  std::map<std::string, std::vector<ScoredTweet>> pass1;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    pass1[group_of(i)].push_back(score(tweets[i].tokens, lex, lo, hi));
  }
  std::map<std::string, GroupResult> out;
  for (auto& [g, list] : pass1) {
    GroupResult r;
    r.tweets = list.size();
    for (int d = 0; d < 3; ++d) {
      std::vector<double> means;
      std::size_t nl = 0, nh = 0;
      for (const auto& s : list) {
        if (s.mean[d]) means.push_back(*s.mean[d]);
        nl += s.low[d];
        nh += s.high[d];
      }
      r.mean[d] = avg(means);
      r.n_scored[d] = means.size();
      r.pct_low[d] = 100.0 * static_cast<double>(nl) / static_cast<double>(list.size());
      r.pct_high[d] = 100.0 * static_cast<double>(nh) / static_cast<double>(list.size());
    }
    out[g] = r;
  }
  return out;
}

} // namespace oracle
