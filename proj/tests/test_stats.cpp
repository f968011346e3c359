#include "rdr/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rdr/rng.hpp"

using rdr::TailAlternative;

TEST(Midranks, NoTiesIsPermutationOfOneToN) {
  const std::vector<double> r = rdr::midranks({0.3, -1.0, 2.5, 0.7});
  EXPECT_EQ(r, (std::vector<double>{2.0, 1.0, 4.0, 3.0}));
}

TEST(Midranks, TiesShareAveragedRank) {
  const std::vector<double> r = rdr::midranks({5.0, 1.0, 5.0, 0.0});
  EXPECT_EQ(r, (std::vector<double>{3.5, 2.0, 3.5, 1.0}));
  const std::vector<double> all = rdr::midranks({2.0, 2.0, 2.0});
  EXPECT_EQ(all, (std::vector<double>{2.0, 2.0, 2.0}));
}

TEST(Spearman, MonotoneAgreementIsOne) {
  EXPECT_DOUBLE_EQ(rdr::spearman_correlation({1, 2, 3}, {10, 20, 30}), 1.0);
  EXPECT_DOUBLE_EQ(rdr::spearman_correlation({1, 2, 3}, {3, 2, 1}), -1.0);
}

TEST(Spearman, HandComputedFourPoint) {
  // Pearson on ranks (1,2,3,4) vs (2,1,4,3): covariance 3, variances 5 each.
  EXPECT_NEAR(rdr::spearman_correlation({1, 2, 3, 4}, {2, 1, 4, 3}), 0.6, 1e-15);
}

TEST(Spearman, ConstantInputDegenerates) {
  bool flag = false;
  EXPECT_EQ(rdr::spearman_correlation({1, 1, 1}, {1, 2, 3}, &flag), 0.0);
  EXPECT_TRUE(flag);
  flag = true;
  rdr::spearman_correlation({1, 2, 3}, {4, 5, 6}, &flag);
  EXPECT_FALSE(flag);
}

TEST(Spearman, InvariantUnderIncreasingTransformAndSymmetric) {
  const std::vector<double> u = {0.4, -1.2, 3.3, 0.9, 2.2, -0.5};
  const std::vector<double> v = {1.0, 0.3, -2.0, 5.5, 4.4, 0.8};
  std::vector<double> eu(u.size());
  std::transform(u.begin(), u.end(), eu.begin(), [](double x) { return std::exp(x); });
  EXPECT_DOUBLE_EQ(rdr::spearman_correlation(u, v), rdr::spearman_correlation(eu, v));
  EXPECT_DOUBLE_EQ(rdr::spearman_correlation(u, v), rdr::spearman_correlation(v, u));
}

TEST(Spearman, RejectsBadInput) {
  EXPECT_THROW(rdr::spearman_correlation({1, 2}, {1, 2}), std::invalid_argument);
  EXPECT_THROW(rdr::spearman_correlation({1, 2, 3}, {1, 2}), std::invalid_argument);
}

TEST(Wilcoxon, IdenticalSamplesGiveOne) {
  EXPECT_EQ(rdr::wilcoxon_rank_sum_pvalue({3, 3, 3}, {3, 3, 3}), 1.0);
  EXPECT_EQ(rdr::wilcoxon_rank_sum_pvalue({1, 2, 3}, {1, 2, 3}), 1.0);
}

TEST(Wilcoxon, ExtremeSeparationExactTail) {
  // All 20 splits enumerated; observed rank sum sits at the minimum.
  const std::vector<double> a = {1, 2, 3};
  const std::vector<double> b = {10, 11, 12};
  EXPECT_NEAR(rdr::wilcoxon_rank_sum_pvalue(a, b), 0.1, 1e-15);
  EXPECT_NEAR(rdr::wilcoxon_rank_sum_pvalue(a, b, TailAlternative::kLess), 0.05, 1e-15);
  EXPECT_NEAR(rdr::wilcoxon_rank_sum_pvalue(a, b, TailAlternative::kGreater), 1.0, 1e-15);
  // Swapping the groups mirrors the tails.
  EXPECT_NEAR(rdr::wilcoxon_rank_sum_pvalue(b, a, TailAlternative::kGreater), 0.05, 1e-15);
}

TEST(Wilcoxon, SmallInterleavedExact) {
  // Rank sums over C(4,2)=6 splits: 3,4,5,5,6,7; observed 4.
  EXPECT_NEAR(rdr::wilcoxon_rank_sum_pvalue({1, 3}, {2, 4}), 2.0 / 3.0, 1e-15);
}

TEST(Wilcoxon, TiedValuesExact) {
  // Pooled mid-ranks (2,2,2,5,5,5); observed sum 9 is the median split.
  EXPECT_NEAR(rdr::wilcoxon_rank_sum_pvalue({1, 1, 2}, {1, 2, 2}), 1.0, 1e-15);
}

TEST(Wilcoxon, InvariantUnderMonotoneTransform) {
  const std::vector<double> a = {0.1, 0.5, 1.7, 2.2, 0.9, 1.1, 1.4};
  const std::vector<double> b = {1.9, 2.5, 3.1, 0.2, 2.8, 3.3, 2.1};
  auto cube = [](const std::vector<double>& x) {
    std::vector<double> y(x.size());
    std::transform(x.begin(), x.end(), y.begin(), [](double v) { return v * v * v; });
    return y;
  };
  EXPECT_DOUBLE_EQ(rdr::wilcoxon_rank_sum_pvalue(a, b),
                   rdr::wilcoxon_rank_sum_pvalue(cube(a), cube(b)));
}

TEST(Wilcoxon, NormalApproxDetectsShift) {
  rdr::RngStream rng(2024);
  std::vector<double> a(40), b(40);
  for (double& x : a) x = rng.normal();
  for (double& x : b) x = rng.normal() + 3.0;
  EXPECT_LT(rdr::wilcoxon_rank_sum_pvalue(a, b), 1e-6);
  EXPECT_LT(rdr::wilcoxon_rank_sum_pvalue(a, b, TailAlternative::kLess), 1e-6);
  EXPECT_GT(rdr::wilcoxon_rank_sum_pvalue(a, b, TailAlternative::kGreater), 0.99);
}

TEST(Wilcoxon, NullCalibrationKolmogorovSmirnov) {
  // Under the null the p-values should look roughly uniform.
  rdr::RngStream rng(77);
  const int reps = 200;
  std::vector<double> pvals(reps);
  for (int r = 0; r < reps; ++r) {
    std::vector<double> a(50), b(50);
    for (double& x : a) x = rng.normal();
    for (double& x : b) x = rng.normal();
    pvals[r] = rdr::wilcoxon_rank_sum_pvalue(a, b);
  }
  std::sort(pvals.begin(), pvals.end());
  double ks = 0.0;
  for (int i = 0; i < reps; ++i) {
    const double hi = static_cast<double>(i + 1) / reps;
    const double lo = static_cast<double>(i) / reps;
    ks = std::max({ks, std::fabs(pvals[i] - hi), std::fabs(pvals[i] - lo)});
  }
  EXPECT_LE(ks, 0.2);
}

TEST(Wilcoxon, ResultAlwaysInUnitInterval) {
  rdr::RngStream rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n1 = 1 + rng.uniform_below(8);
    const std::size_t n2 = std::max<std::size_t>(1 + rng.uniform_below(8), 4 - std::min<std::size_t>(n1, 3));
    std::vector<double> a(n1), b(n2);
    for (double& x : a) x = std::round(rng.normal() * 2.0) / 2.0;
    for (double& x : b) x = std::round(rng.normal() * 2.0) / 2.0;
    for (auto alt : {TailAlternative::kTwoSided, TailAlternative::kGreater, TailAlternative::kLess}) {
      const double p = rdr::wilcoxon_rank_sum_pvalue(a, b, alt);
      EXPECT_GT(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  }
}

TEST(Wilcoxon, RejectsBadInput) {
  EXPECT_THROW(rdr::wilcoxon_rank_sum_pvalue({}, {1, 2, 3, 4}), std::invalid_argument);
  EXPECT_THROW(rdr::wilcoxon_rank_sum_pvalue({1}, {2, 3}), std::invalid_argument);
}
