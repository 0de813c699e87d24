// Scores and aggregates a stream of synthetic curated tweets and reports
// wall time and peak resident memory.
//
//   ted_bench [--tweets N] [--speakers N] [--workers N] [--seed N]

#include <CLI11.hpp>

#include "ted/scoring.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

namespace {

long peak_rss_kb() {
  std::ifstream status("/proc/self/status");
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmHWM:", 0) == 0) return std::stol(line.substr(6));
  }
  return -1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic scoring benchmark", "ted_bench"};
  std::size_t n_tweets = 1'000'000;
  std::size_t n_speakers = 10'000;
  std::size_t workers = 1;
  std::uint64_t seed = 7;
  std::size_t lexicon_words = 5000;
  std::size_t vocabulary = 8000;
  app.add_option("--tweets", n_tweets);
  app.add_option("--speakers", n_speakers)->check(CLI::PositiveNumber);
  app.add_option("--workers", workers)->check(CLI::Range(1, 256));
  app.add_option("--seed", seed);
  CLI11_PARSE(app, argc, argv);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ted::LexiconEntry> entries;
  entries.reserve(lexicon_words);
  for (std::size_t i = 0; i < lexicon_words; ++i) {
    entries.push_back({"w" + std::to_string(i), {{unit(rng), unit(rng), unit(rng)}}});
  }
  const auto lex = ted::Lexicon::from_entries(entries);
  std::vector<std::string> vocab;
  for (std::size_t i = 0; i < vocabulary; ++i) vocab.push_back("w" + std::to_string(i));

  const std::array<const char*, 4> countries{"AU", "CA", "GB", "US"};
  std::uniform_int_distribution<std::size_t> pick_word(0, vocab.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_len(3, 30);
  std::uniform_int_distribution<std::size_t> pick_speaker(0, n_speakers - 1);
  std::uniform_int_distribution<ted::Timestamp> pick_time(1'262'304'000, 1'420'070'399);

  const auto start = std::chrono::steady_clock::now();
  ted::ScoringPipeline pipeline(lex, {}, ted::KeySpec::parse("country,year"), workers);
  for (std::size_t i = 0; i < n_tweets; ++i) {
    ted::CuratedTweet t;
    const std::size_t sp = pick_speaker(rng);
    t.raw.tweet_id = std::to_string(i);
    t.raw.speaker_id = "u" + std::to_string(sp);
    t.raw.country = countries[sp % countries.size()];
    t.raw.created_at = pick_time(rng);
    t.raw.language = "en";
    const std::size_t len = pick_len(rng);
    t.tokens.reserve(len);
    for (std::size_t k = 0; k < len; ++k) t.tokens.push_back(vocab[pick_word(rng)]);
    pipeline.push(std::move(t));
  }
  pipeline.flush();
  const auto groups = pipeline.groups().finish();
  const auto months = pipeline.monthly().finish();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::cout << "tweets=" << pipeline.scored() << " groups=" << groups.size()
            << " monthly_groups=" << months.size() << " seconds=" << seconds
            << " peak_rss_kb=" << peak_rss_kb() << '\n';
  return 0;
}
