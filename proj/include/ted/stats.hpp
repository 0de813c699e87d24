#pragma once

// Paired t-tests, box-plot statistics and fixed-width histograms.

#include "ted/csv.hpp"
#include "ted/scoring.hpp"
#include "ted/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace ted::stats {

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 1000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

} // namespace detail

/// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0,1].
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw Error("domain_error", "incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * detail::beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// Two-sided tail probability P(|T| >= |t|) of Student's t with `df` degrees
/// of freedom.
inline double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw Error("domain_error", "degrees of freedom must be positive");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return std::clamp(regularized_incomplete_beta(0.5 * df, 0.5, x), 0.0, 1.0);
}

inline constexpr double kDefaultAlpha = 0.001;

struct PairedTestResult {
  std::size_t n_pairs = 0;
  double mean_difference = 0.0;
  double t_statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 1.0;
  bool significant = false;
};

/// Paired t-test on the differences a[i] - b[i].
inline PairedTestResult paired_t_test(std::span<const double> a, std::span<const double> b,
                                      double alpha = kDefaultAlpha) {
  if (a.size() != b.size()) {
    throw Error("unequal_lengths", "paired samples differ in length (" + std::to_string(a.size()) +
                                       " vs " + std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) throw Error("insufficient_pairs", "paired t-test needs at least 2 pairs");
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];

  PairedTestResult r;
  r.n_pairs = n;
  r.degrees_of_freedom = n - 1;
  const bool constant = std::all_of(diff.begin(), diff.end(),
                                    [&](double d) { return d == diff.front(); });
  CompensatedSum sum;
  for (double d : diff) sum.add(d);
  r.mean_difference = constant ? diff.front() : sum.value() / static_cast<double>(n);

  if (constant) {
    if (r.mean_difference != 0.0) {
      throw Error("degenerate_variance",
                  "differences have zero variance and a nonzero mean; t is undefined");
    }
    r.t_statistic = 0.0;
    r.p_value = 1.0;
    r.significant = 1.0 < alpha;
    return r;
  }
  CompensatedSum sq;
  for (double d : diff) {
    const double dev = d - r.mean_difference;
    sq.add(dev * dev);
  }
  const double sd = std::sqrt(sq.value() / static_cast<double>(n - 1));
  r.t_statistic = r.mean_difference / (sd / std::sqrt(static_cast<double>(n)));
  r.p_value = student_t_two_sided_p(r.t_statistic, static_cast<double>(r.degrees_of_freedom));
  r.significant = r.p_value < alpha;
  return r;
}

enum class QuartileMethod { linear, tukey_hinges };

struct BoxStats {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers; ///< ascending
  double mean = 0.0;
  std::size_t n = 0;

  double iqr() const noexcept { return q3 - q1; }
};

/// Quantile of sorted data by linear interpolation between order
/// statistics (h = (n-1)p).
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error("empty_input", "quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace detail {

inline double median_sorted(std::span<const double> s) {
  const std::size_t n = s.size();
  return n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

} // namespace detail

inline BoxStats box_stats(std::span<const double> values,
                          QuartileMethod method = QuartileMethod::linear) {
  if (values.empty()) throw Error("empty_input", "box statistics need at least one value");
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  BoxStats b;
  b.n = s.size();
  if (method == QuartileMethod::linear) {
    b.q1 = quantile_sorted(s, 0.25);
    b.median = quantile_sorted(s, 0.5);
    b.q3 = quantile_sorted(s, 0.75);
  } else {
    // Hinges: medians of the lower and upper halves, each including the
    // overall median when n is odd.
    const std::size_t half = (s.size() + 1) / 2;
    b.median = detail::median_sorted(s);
    b.q1 = detail::median_sorted(std::span<const double>(s).first(half));
    b.q3 = detail::median_sorted(std::span<const double>(s).last(half));
  }
  const double fence_low = b.q1 - 1.5 * b.iqr();
  const double fence_high = b.q3 + 1.5 * b.iqr();
  b.whisker_low = b.q1;
  b.whisker_high = b.q3;
  bool have_low = false;
  for (double v : s) {
    if (v < fence_low || v > fence_high) {
      b.outliers.push_back(v);
      continue;
    }
    if (!have_low) {
      b.whisker_low = v;
      have_low = true;
    }
    b.whisker_high = v;
  }
  CompensatedSum sum;
  for (double v : s) sum.add(v);
  b.mean = std::clamp(sum.value() / static_cast<double>(s.size()), s.front(), s.back());
  return b;
}

struct Histogram {
  double bin_width = 0.005;
  std::vector<std::size_t> counts;
  std::size_t out_of_range = 0; ///< values outside [0,1] (or NaN)

  double bin_low(std::size_t i) const {
    return static_cast<double>(i) / static_cast<double>(counts.size());
  }
  double bin_high(std::size_t i) const {
    return static_cast<double>(i + 1) / static_cast<double>(counts.size());
  }
  std::size_t total() const {
    std::size_t n = 0;
    for (auto c : counts) n += c;
    return n;
  }
};

/// Number of bins when `bin_width` divides 1; throws otherwise.
inline std::size_t bin_count(double bin_width) {
  if (!(bin_width > 0.0 && bin_width <= 1.0)) {
    throw Error("invalid_bin_width", "bin width must be in (0, 1]");
  }
  const double n = std::round(1.0 / bin_width);
  if (std::abs(n * bin_width - 1.0) > 1e-9) {
    throw Error("invalid_bin_width", "bin width must divide 1 evenly");
  }
  return static_cast<std::size_t>(n);
}

/// Bins over [0,1]: bin i covers [i/n, (i+1)/n), the last bin is closed.
inline Histogram histogram(std::span<const double> values, double bin_width = 0.005) {
  Histogram h;
  h.bin_width = bin_width;
  const std::size_t n = bin_count(bin_width);
  h.counts.assign(n, 0);
  const double nd = static_cast<double>(n);
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      ++h.out_of_range;
      continue;
    }
    auto i = static_cast<std::size_t>(std::floor(v * nd));
    if (i >= n) i = n - 1;
    if (i > 0 && static_cast<double>(i) / nd > v) --i;
    if (i + 1 < n && static_cast<double>(i + 1) / nd <= v) ++i;
    ++h.counts[i];
  }
  return h;
}

inline void write_test_header(std::ostream& out) {
  csv::write_row(out, {"comparison", "n", "mean_diff", "t", "df", "p", "significant"});
}

inline void write_test_row(std::ostream& out, const std::string& name,
                           const PairedTestResult& r) {
  csv::write_row(out, {name, std::to_string(r.n_pairs), csv::format_real(r.mean_difference),
                       csv::format_real(r.t_statistic), std::to_string(r.degrees_of_freedom),
                       csv::format_real(r.p_value), r.significant ? "true" : "false"});
}

} // namespace ted::stats
