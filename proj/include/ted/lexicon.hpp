#pragma once

#include "ted/types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ted {

/// One word of a valence/arousal/dominance lexicon. Scores are in [0,1].
struct LexiconEntry {
  std::string word;
  Vad scores;
};

enum class PolarClass : std::uint8_t { low, neutral, high };

constexpr std::string_view polar_class_name(PolarClass c) noexcept {
  switch (c) {
  case PolarClass::low:
    return "low";
  case PolarClass::neutral:
    return "neutral";
  case PolarClass::high:
    return "high";
  }
  return "";
}

/// Scores at or below `low` are low, at or above `high` are high, the rest
/// neutral. Both comparisons are inclusive.
struct ThresholdConfig {
  double low = 0.33;
  double high = 0.67;

  void validate() const {
    if (!(std::isfinite(low) && std::isfinite(high) && 0.0 <= low && low < high && high <= 1.0)) {
      throw Error("invalid_thresholds", "thresholds must satisfy 0 <= low < high <= 1");
    }
  }
};

constexpr PolarClass classify(double score, const ThresholdConfig& t) noexcept {
  if (score <= t.low) return PolarClass::low;
  if (score >= t.high) return PolarClass::high;
  return PolarClass::neutral;
}

constexpr PolarClass classify(const LexiconEntry& entry, Dimension d,
                              const ThresholdConfig& t) noexcept {
  return classify(entry.scores[d], t);
}

constexpr bool is_polar(double score, const ThresholdConfig& t) noexcept {
  return classify(score, t) != PolarClass::neutral;
}

/// The 23 ambiguous terms dropped from the lexicon before analysis.
/// Mirrors data/removed_terms.txt.
inline const std::vector<std::string>& default_removal_list() {
  static const std::vector<std::string> words{
      "have", "will", "one",   "high",   "may",   "way",  "kind",   "be",
      "thing", "things", "number", "seem", "do",  "look", "three", "third",
      "five", "senate", "say",  "talk",  "president", "trump", "like"};
  return words;
}

/// Reads a removal list: one word per line, `#` starts a comment, blank
/// lines ignored. Words are lowercased.
inline std::vector<std::string> read_removal_list(std::istream& in) {
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (!view.empty()) words.push_back(ascii_lower(view));
  }
  return words;
}

struct LexiconDiagnostic {
  std::size_t line = 0;
  std::string message;
};

/// Counts produced while loading a lexicon file.
struct LexiconLoadReport {
  std::size_t lines_read = 0;    ///< non-empty lines, excluding a detected header
  std::size_t loaded = 0;        ///< distinct words retained
  std::size_t removed = 0;       ///< lines dropped by the removal list
  std::size_t rejected = 0;      ///< malformed or out-of-range lines
  std::size_t duplicates = 0;    ///< lines that overwrote an earlier entry
  bool header_skipped = false;
  std::vector<LexiconDiagnostic> diagnostics;
};

namespace detail {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

using WordMap = std::unordered_map<std::string, Vad, StringHash, std::equal_to<>>;
using WordSet = std::unordered_set<std::string, StringHash, std::equal_to<>>;

inline std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

} // namespace detail

class LexiconView;

/// Word -> (V, A, D) map with the removal list applied. Immutable after
/// construction and safe for concurrent reads.
class Lexicon {
public:
  Lexicon() = default;

  /// Parses `word<TAB>valence<TAB>arousal<TAB>dominance` lines. A first line
  /// whose second field is not numeric is treated as a header. Bad lines are
  /// skipped and reported; a stream yielding no entries is an error.
  static Lexicon load(std::istream& source, std::span<const std::string> removals,
                      LexiconLoadReport* report = nullptr) {
    LexiconLoadReport local;
    LexiconLoadReport& r = report ? *report : local;
    r = LexiconLoadReport{};

    Lexicon lex;
    for (const auto& w : removals) lex.removed_.insert(ascii_lower(w));

    std::string line;
    std::size_t line_no = 0;
    bool first_content_line = true;
    while (std::getline(source, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty()) continue;

      const auto fields = detail::split(line, '\t');
      if (first_content_line) {
        first_content_line = false;
        if (fields.size() >= 2 && !detail::parse_real(fields[1])) {
          r.header_skipped = true;
          continue;
        }
      }
      ++r.lines_read;

      auto reject = [&](std::string msg) {
        ++r.rejected;
        r.diagnostics.push_back({line_no, std::move(msg)});
      };
      if (fields.size() != 4) {
        reject("expected 4 tab-separated fields, got " + std::to_string(fields.size()));
        continue;
      }
      const std::string word = ascii_lower(trim(fields[0]));
      if (word.empty()) {
        reject("empty word");
        continue;
      }
      Vad scores;
      bool ok = true;
      for (Dimension d : kAllDimensions) {
        const auto v = detail::parse_real(fields[1 + index_of(d)]);
        if (!v || !std::isfinite(*v)) {
          reject(std::string(dimension_name(d)) + " is not a number");
          ok = false;
          break;
        }
        if (*v < 0.0 || *v > 1.0) {
          reject(std::string(dimension_name(d)) + " outside [0,1]");
          ok = false;
          break;
        }
        scores[d] = *v;
      }
      if (!ok) continue;

      if (lex.removed_.contains(word)) {
        ++r.removed;
        continue;
      }
      auto [it, inserted] = lex.entries_.insert_or_assign(word, scores);
      if (!inserted) ++r.duplicates;
    }
    if (source.bad()) throw Error("io_error", "failed reading lexicon stream");
    r.loaded = lex.entries_.size();
    if (lex.entries_.empty()) throw Error("empty_lexicon", "lexicon stream contained no entries");
    return lex;
  }

  /// Builds a lexicon from in-memory entries; invalid scores throw.
  static Lexicon from_entries(std::span<const LexiconEntry> entries,
                              std::span<const std::string> removals = {}) {
    Lexicon lex;
    for (const auto& w : removals) lex.removed_.insert(ascii_lower(w));
    for (const auto& e : entries) {
      const std::string word = ascii_lower(e.word);
      if (word.empty() || word.find('\t') != std::string::npos) {
        throw Error("invalid_entry", "lexicon word must be non-empty and tab-free");
      }
      for (double v : e.scores.values) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
          throw Error("invalid_entry", "score for '" + word + "' outside [0,1]");
        }
      }
      if (!lex.removed_.contains(word)) lex.entries_.insert_or_assign(word, e.scores);
    }
    return lex;
  }

  /// Caller lowercases the token. Removed words are never present.
  std::optional<Vad> lookup(std::string_view token) const {
    const auto it = entries_.find(token);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  /// Pointer variant for hot loops; null when absent.
  const Vad* find(std::string_view token) const {
    const auto it = entries_.find(token);
    return it == entries_.end() ? nullptr : &it->second;
  }

  bool contains(std::string_view word) const { return entries_.find(word) != entries_.end(); }
  bool is_removed(std::string_view word) const { return removed_.find(word) != removed_.end(); }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const detail::WordSet& removed() const noexcept { return removed_; }

  /// Entries sorted by word.
  std::vector<LexiconEntry> entries() const {
    std::vector<LexiconEntry> out;
    out.reserve(entries_.size());
    for (const auto& [w, s] : entries_) out.push_back({w, s});
    std::sort(out.begin(), out.end(),
              [](const LexiconEntry& a, const LexiconEntry& b) { return a.word < b.word; });
    return out;
  }

  /// Writes entries in the tab-separated load format, sorted by word, with
  /// shortest round-trip decimal scores.
  void write(std::ostream& out) const {
    for (const auto& e : entries()) {
      out << e.word;
      for (double v : e.scores.values) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        out << '\t' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
      }
      out << '\n';
    }
  }

  LexiconView polar_view(Dimension d, const ThresholdConfig& t) const;

  /// Returns a copy with every score transformed by `f`; used for
  /// sensitivity analysis. `f` must keep scores finite.
  template <typename F>
  Lexicon transformed(F&& f) const {
    Lexicon out = *this;
    for (auto& [w, s] : out.entries_) {
      for (double& v : s.values) v = f(v);
    }
    return out;
  }

private:
  detail::WordMap entries_;
  detail::WordSet removed_;
};

/// Non-owning view of the entries polar on one dimension. The underlying
/// lexicon must outlive the view.
class LexiconView {
public:
  LexiconView(const Lexicon& lexicon, Dimension d, ThresholdConfig t)
      : lexicon_(&lexicon), dimension_(d), thresholds_(t) {}

  std::optional<Vad> lookup(std::string_view token) const {
    const Vad* v = find(token);
    if (!v) return std::nullopt;
    return *v;
  }

  const Vad* find(std::string_view token) const {
    const Vad* v = lexicon_->find(token);
    if (v && is_polar((*v)[dimension_], thresholds_)) return v;
    return nullptr;
  }

  bool contains(std::string_view word) const { return find(word) != nullptr; }

  Dimension dimension() const noexcept { return dimension_; }
  const ThresholdConfig& thresholds() const noexcept { return thresholds_; }

  /// Polar entries sorted by word.
  std::vector<LexiconEntry> entries() const {
    std::vector<LexiconEntry> out;
    for (auto& e : lexicon_->entries()) {
      if (is_polar(e.scores[dimension_], thresholds_)) out.push_back(std::move(e));
    }
    return out;
  }

  std::size_t size() const { return entries().size(); }

private:
  const Lexicon* lexicon_;
  Dimension dimension_;
  ThresholdConfig thresholds_;
};

inline LexiconView Lexicon::polar_view(Dimension d, const ThresholdConfig& t) const {
  t.validate();
  return LexiconView(*this, d, t);
}

} // namespace ted
