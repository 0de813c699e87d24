#include <gtest/gtest.h>

#include "ted/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <random>

using namespace ted;
using namespace ted::stats;

namespace {

double reference_p(double t, double df) {
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

} // namespace

TEST(PairedT, ZeroMeanDifference) {
  const std::vector<double> a{1, 2, 3}, b{0, 2, 4};
  const auto r = paired_t_test(a, b);
  EXPECT_EQ(r.t_statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_FALSE(r.significant);
  EXPECT_EQ(r.degrees_of_freedom, 2u);
}

TEST(PairedT, IdenticalSamples) {
  const std::vector<double> a{0.3, 0.1, 0.7, 0.2};
  const auto r = paired_t_test(a, a);
  EXPECT_EQ(r.t_statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(PairedT, Errors) {
  const std::vector<double> a{1, 2, 3}, b{1, 2}, c{2, 3, 4};
  EXPECT_THROW(paired_t_test(a, b), Error);
  EXPECT_THROW(paired_t_test(std::vector<double>{1}, std::vector<double>{2}), Error);
  try {
    paired_t_test(a, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "degenerate_variance");
  }
}

TEST(PairedT, MatchesReferenceDistribution) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 60;
    const double shift = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = noise(rng);
      b[i] = a[i] + shift + 0.5 * noise(rng);
    }
    const auto r = paired_t_test(a, b);
    EXPECT_NEAR(r.p_value, reference_p(r.t_statistic, static_cast<double>(n - 1)), 1e-9);
    EXPECT_EQ(r.significant, r.p_value < kDefaultAlpha);
  }
}

TEST(PairedT, KnownValue) {
  // differences 1,2,3,4: mean 2.5, sd 1.29099, t = 3.87298, df 3
  const std::vector<double> a{2, 4, 6, 8}, b{1, 2, 3, 4};
  const auto r = paired_t_test(a, b);
  EXPECT_NEAR(r.t_statistic, 3.872983346207417, 1e-12);
  EXPECT_NEAR(r.p_value, 0.030466291662170977, 1e-9);
}

TEST(PairedT, AntisymmetryAndShift) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> pick(0, 1000);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + rng() % 20;
    std::vector<double> a(n), b(n), a2(n), b2(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = pick(rng) / 1024.0;
      b[i] = pick(rng) / 1024.0;
      a2[i] = a[i] + 3.0;
      b2[i] = b[i] + 3.0;
    }
    const auto ab = paired_t_test(a, b);
    const auto ba = paired_t_test(b, a);
    EXPECT_NEAR(ab.t_statistic, -ba.t_statistic, 1e-12);
    EXPECT_NEAR(ab.p_value, ba.p_value, 1e-12);
    const auto shifted = paired_t_test(a2, b2);
    EXPECT_NEAR(shifted.t_statistic, ab.t_statistic, 1e-12);
    EXPECT_NEAR(shifted.p_value, ab.p_value, 1e-12);
  }
}

TEST(IncompleteBeta, Endpoints) {
  EXPECT_EQ(regularized_incomplete_beta(2.0, 3.0, 0.0), 0.0);
  EXPECT_EQ(regularized_incomplete_beta(2.0, 3.0, 1.0), 1.0);
  // I_x(1,1) = x
  EXPECT_NEAR(regularized_incomplete_beta(1.0, 1.0, 0.37), 0.37, 1e-14);
}

TEST(BoxStats, LinearQuartiles) {
  const auto b = box_stats(std::vector<double>{4, 1, 3, 2});
  EXPECT_DOUBLE_EQ(b.q1, 1.75);
  EXPECT_DOUBLE_EQ(b.median, 2.5);
  EXPECT_DOUBLE_EQ(b.q3, 3.25);
  EXPECT_DOUBLE_EQ(b.mean, 2.5);
  EXPECT_TRUE(b.outliers.empty());
}

TEST(BoxStats, Constant) {
  const auto b = box_stats(std::vector<double>{5, 5, 5});
  EXPECT_EQ(b.q1, 5);
  EXPECT_EQ(b.median, 5);
  EXPECT_EQ(b.q3, 5);
  EXPECT_EQ(b.whisker_low, 5);
  EXPECT_EQ(b.whisker_high, 5);
  EXPECT_TRUE(b.outliers.empty());
}

TEST(BoxStats, Outlier) {
  const auto b = box_stats(std::vector<double>{1, 2, 3, 4, 100});
  ASSERT_EQ(b.outliers.size(), 1u);
  EXPECT_EQ(b.outliers[0], 100);
  EXPECT_EQ(b.whisker_high, 4);
  EXPECT_EQ(b.whisker_low, 1);
}

TEST(BoxStats, TukeyHinges) {
  const auto b = box_stats(std::vector<double>{1, 2, 3, 4, 5}, QuartileMethod::tukey_hinges);
  EXPECT_EQ(b.q1, 2);
  EXPECT_EQ(b.median, 3);
  EXPECT_EQ(b.q3, 4);
  const auto e = box_stats(std::vector<double>{1, 2, 3, 4}, QuartileMethod::tukey_hinges);
  EXPECT_EQ(e.q1, 1.5);
  EXPECT_EQ(e.q3, 3.5);
}

TEST(BoxStats, EmptyAndPermutation) {
  EXPECT_THROW(box_stats(std::vector<double>{}), Error);
  std::mt19937_64 rng(2);
  std::vector<double> v(101);
  for (auto& x : v) x = std::uniform_real_distribution<double>(0, 1)(rng);
  const auto a = box_stats(v);
  std::shuffle(v.begin(), v.end(), rng);
  const auto b = box_stats(v);
  EXPECT_EQ(a.q1, b.q1);
  EXPECT_EQ(a.median, b.median);
  EXPECT_EQ(a.q3, b.q3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.outliers, b.outliers);
}

TEST(Histogram, Boundaries) {
  const auto h = histogram(std::vector<double>{0.0, 0.0049, 0.005, 1.0, 0.995, -0.1, 1.2});
  ASSERT_EQ(h.counts.size(), 200u);
  EXPECT_EQ(h.counts[0], 2u);
  EXPECT_EQ(h.counts[1], 1u);
  EXPECT_EQ(h.counts[199], 2u);
  EXPECT_EQ(h.out_of_range, 2u);
  EXPECT_EQ(h.total(), 5u);
}

TEST(Histogram, EveryBinEdgeLandsInItsOwnBin) {
  const auto n = bin_count(0.005);
  for (std::size_t i = 0; i < n; ++i) {
    const auto h = histogram(std::vector<double>{static_cast<double>(i) / 200.0});
    EXPECT_EQ(h.counts[i], 1u) << i;
  }
}

TEST(Histogram, InvalidWidth) {
  EXPECT_THROW(histogram(std::vector<double>{0.5}, 0.003), Error);
  EXPECT_THROW(histogram(std::vector<double>{0.5}, 0.0), Error);
  EXPECT_THROW(histogram(std::vector<double>{0.5}, 2.0), Error);
  EXPECT_EQ(histogram(std::vector<double>{0.5}, 0.25).counts.size(), 4u);
}

TEST(Histogram, PermutationAndTotal) {
  std::mt19937_64 rng(4);
  std::vector<double> v(500);
  for (auto& x : v) x = std::uniform_real_distribution<double>(-0.1, 1.1)(rng);
  const auto a = histogram(v);
  std::shuffle(v.begin(), v.end(), rng);
  const auto b = histogram(v);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.total() + a.out_of_range, v.size());
}
