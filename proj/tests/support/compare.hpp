#pragma once

#include "ted/ted.hpp"

#include "../oracle/naive_ued.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <string>

namespace support {

inline bool close(double a, double b, double tol) {
  return a == b || std::abs(a - b) <= tol;
}

inline bool close(const std::optional<double>& a, const std::optional<double>& b, double tol) {
  if (a.has_value() != b.has_value()) return false;
  return !a || close(*a, *b, tol);
}

/// Empty when the library outcome matches the brute-force profile on every
/// field; otherwise a description of the first mismatch.
inline std::string diff_profile(const ted::ProfileOutcome& got, const oracle::Profile& want,
                                double tol) {
  std::ostringstream why;
  if (const auto* s = std::get_if<ted::SkippedSpeaker>(&got)) {
    if (!want.skipped || s->reason != want.skip_reason || s->speaker != want.speaker) {
      why << want.speaker << ": library skipped (" << s->reason << "), oracle did not";
    }
    return why.str();
  }
  const auto& p = std::get<ted::UedProfile>(got);
  if (want.skipped) return want.speaker + ": oracle skipped (" + want.skip_reason + ")";
  if (p.speaker != want.speaker || p.n_tweets != want.n_tweets) {
    return want.speaker + ": speaker or tweet count differs";
  }
  for (ted::Dimension d : ted::kAllDimensions) {
    const auto& g = p[d];
    const auto& w = want.dims[ted::index_of(d)];
    const std::string tag = want.speaker + "/" + std::string(ted::dimension_name(d)) + ": ";
    if (g.n_windows != w.n_windows) return tag + "n_windows";
    if (g.n_states != w.states.size()) return tag + "n_states";
    if (!close(g.coverage,
               w.n_windows ? static_cast<double>(w.states.size()) / static_cast<double>(w.n_windows)
                           : 0.0,
               tol)) {
      return tag + "coverage";
    }
    std::optional<double> mean, sd, lo, hi;
    if (g.summary) {
      mean = g.summary->mean;
      sd = g.summary->variability;
      lo = g.home->low();
      hi = g.home->high();
    }
    if (!close(mean, w.mean, tol)) return tag + "mean";
    if (!close(sd, w.sd, tol)) return tag + "variability";
    if (!close(lo, w.home_low, tol) || !close(hi, w.home_high, tol)) return tag + "home base";
    if (g.n_excursions != w.excursions.size()) return tag + "n_excursions";
    const auto& r = g.rates;
    if (!close(r.rise_rate, w.rise, tol)) return tag + "rise_rate";
    if (!close(r.recovery_rate, w.recovery, tol)) return tag + "recovery_rate";
    if (!close(r.rate_hm_hi, w.hm_hi, tol)) return tag + "rate_hm_hi";
    if (!close(r.rate_hi_hm, w.hi_hm, tol)) return tag + "rate_hi_hm";
    if (!close(r.rate_hm_lo, w.hm_lo, tol)) return tag + "rate_hm_lo";
    if (!close(r.rate_lo_hm, w.lo_hm, tol)) return tag + "rate_lo_hm";
  }
  return {};
}

} // namespace support
