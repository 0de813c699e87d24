// ted: corpus curation, lexicon scoring, emotion dynamics profiles and
// comparisons from the command line.

#include <CLI11.hpp>

#include "ted/cli.hpp"

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

namespace {

using ted::cli::RunConfig;

struct EnumChoices {
  std::string format = "jsonl";
  std::string quartiles = "linear";
  std::string sd = "sample";
  std::string rate_origin = "boundary";
  bool no_cross = false;
  bool all_words = false;
};

void add_common(CLI::App* sub, RunConfig& c, std::string& config_path) {
  sub->add_option("--config", config_path, "key=value configuration file (flags override it)");
  sub->add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1, 256));
  sub->add_option("--manifest", c.manifest, "run manifest path (default: <output>.manifest.json)");
}

void add_lexicon(CLI::App* sub, RunConfig& c) {
  sub->add_option("--lexicon", c.lexicon, "word<TAB>V<TAB>A<TAB>D lexicon file");
  sub->add_option("--removals", c.removals,
                  "file of words to drop from the lexicon; 'none' keeps every word");
  sub->add_option("--low", c.thresholds.low, "low polarity threshold (inclusive)");
  sub->add_option("--high", c.thresholds.high, "high polarity threshold (inclusive)");
  sub->add_option("--dimensions", c.dimensions, "comma list of V,A,D");
}

void add_input(CLI::App* sub, RunConfig& c, EnumChoices& e) {
  sub->add_option("--input", c.input, "input records");
  sub->add_option("--format", e.format, "input format")->check(CLI::IsMember({"jsonl", "csv"}));
}

/// Splices `key=value` lines from --config in front of the subcommand's own
/// arguments so that explicit flags, parsed later, take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.empty()) return args;
  std::vector<std::string> injected;
  for (const auto& [k, v] : ted::cli::read_config_file(path)) injected.push_back("--" + k + "=" + v);
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lexicon-based emotion scoring and emotion dynamics for tweet corpora", "ted"};
  app.set_version_flag("--version", std::string(ted::cli::kVersion));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  RunConfig c;
  EnumChoices e;
  std::string config_path;

  auto* curate = app.add_subcommand("curate", "filter raw tweets into a curated corpus");
  add_common(curate, c, config_path);
  add_input(curate, c, e);
  curate->add_option("--output", c.output, "curated JSONL output");
  curate->add_flag("--stats-only", c.stats_only, "only report rule counts");
  curate->add_option("--report", c.report, "rule count CSV (default: standard output)");
  curate->add_option("--drops", c.drops, "per-record drop log CSV");
  curate->add_option("--corpus-stats", c.corpus_stats, "per-group tweet/tweeter/token counts");
  curate->add_option("--group-by", c.group_by, "grouping for --corpus-stats (default country)");
  curate->add_option("--language", c.language, "language code to keep");
  curate->add_option("--min-tokens", c.min_tokens, "minimum tokens per tweet");

  auto* score = app.add_subcommand("score", "per-tweet scores and group aggregates");
  add_common(score, c, config_path);
  add_input(score, c, e);
  add_lexicon(score, c);
  score->add_option("--output", c.output, "output prefix");
  score->add_option("--group-by", c.group_by, "group key fields (default country,year)");
  score->add_flag("--all-words", e.all_words, "average every matched word, not only polar ones");

  auto* ued = app.add_subcommand("ued", "emotion dynamics profiles per speaker");
  add_common(ued, c, config_path);
  add_input(ued, c, e);
  add_lexicon(ued, c);
  ued->add_option("--output", c.output, "profile CSV");
  ued->add_option("--skip-report", c.skip_report, "skipped speakers CSV");
  ued->add_option("--speaker-key", c.speaker_key, "speaker unit")
      ->check(CLI::IsMember({"user", "city", "country"}));
  ued->add_flag("--by-year", c.by_year, "one stream per speaker and year");
  ued->add_option("--window", c.window, "window size in tokens")->check(CLI::Range(1, 100000));
  ued->add_option("--min-tweets", c.min_tweets, "minimum tweets per speaker");
  ued->add_flag("--no-cross-boundaries", e.no_cross, "keep windows inside single tweets");
  ued->add_flag("--polar-states", c.polar_states, "states from polar words only");
  ued->add_option("--sd", e.sd, "standard deviation convention")
      ->check(CLI::IsMember({"sample", "population"}));
  ued->add_option("--rate-origin", e.rate_origin, "displacement origin for rates")
      ->check(CLI::IsMember({"boundary", "center"}));
  ued->add_option("--dump-states", c.dump_states, "write every emotion state to this CSV");

  auto* compare = app.add_subcommand("compare", "paired t-tests between two tables");
  add_common(compare, c, config_path);
  compare->add_option("--a", c.a, "first table");
  compare->add_option("--b", c.b, "second table");
  compare->add_option("--pair-key", c.pair_key, "columns identifying a pair, e.g. year,month");
  compare->add_option("--metric", c.metric, "numeric column(s) to test");
  compare->add_option("--select-a", c.select_a, "column=value filter on the first table")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  compare->add_option("--select-b", c.select_b, "column=value filter on the second table")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  compare->add_option("--alpha", c.alpha, "significance level");
  compare->add_option("--output", c.output, "result CSV (default: standard output)");

  auto* report = app.add_subcommand("report", "box statistics and histograms of a metric table");
  add_common(report, c, config_path);
  report->add_option("--input", c.input, "profile or aggregate CSV");
  report->add_option("--output", c.output, "output prefix");
  report->add_option("--group-cols", c.group_cols, "grouping columns");
  report->add_option("--metrics", c.metrics, "metric columns");
  report->add_option("--bins", c.bin_width, "histogram bin width");
  report->add_option("--quartiles", e.quartiles, "quartile convention")
      ->check(CLI::IsMember({"linear", "tukey"}));

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::exception& ex) {
    std::cerr << "ted: " << ex.what() << '\n';
    return ted::cli::kFatal;
  }
  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe);
    return code == 0 ? 0 : ted::cli::kFatal;
  }

  c.format = e.format == "csv" ? ted::RecordFormat::csv : ted::RecordFormat::jsonl;
  c.quartiles = e.quartiles == "tukey" ? ted::stats::QuartileMethod::tukey_hinges
                                       : ted::stats::QuartileMethod::linear;
  c.sd = e.sd == "population" ? ted::SdConvention::population : ted::SdConvention::sample;
  c.rate_origin = e.rate_origin == "center" ? ted::RateOrigin::center : ted::RateOrigin::boundary;
  c.cross_boundaries = !e.no_cross;
  c.polar_only = !e.all_words;

  using namespace ted::cli;
  if (curate->parsed()) return guarded("curate", [&] { return cmd_curate(c); });
  if (score->parsed()) return guarded("score", [&] { return cmd_score(c); });
  if (ued->parsed()) return guarded("ued", [&] { return cmd_ued(c); });
  if (compare->parsed()) return guarded("compare", [&] { return cmd_compare(c); });
  if (report->parsed()) return guarded("report", [&] { return cmd_report(c); });
  return kFatal;
}
