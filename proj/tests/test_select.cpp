#include "rdr/select.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rdr/linalg.hpp"
#include "rdr/matrix.hpp"
#include "rdr/rng.hpp"
#include "rdr/rsvd.hpp"
#include "test_util.hpp"

using rdr::Matrix;
using rdr::RngStream;
using rdr::StabilityProfile;

namespace {

Matrix spectrum_matrix(std::size_t n, std::size_t p, const std::vector<double>& svals,
                       std::uint64_t seed) {
  const std::size_t r = svals.size();
  const Matrix u = rdr::qr_orthonormalize(test_util::random_matrix(n, r, seed));
  const Matrix v = rdr::qr_orthonormalize(test_util::random_matrix(p, r, seed + 1));
  Matrix us = u;
  for (std::size_t j = 0; j < r; ++j) {
    for (std::size_t i = 0; i < n; ++i) us(i, j) *= svals[j];
  }
  return rdr::matmul_nt(us, v);
}

StabilityProfile profile_from_scores(std::vector<double> scores) {
  StabilityProfile p;
  p.scores = std::move(scores);
  return p;
}

}  // namespace

TEST(StabilityScores, StrongGapSeparatesSignalFromNoise) {
  const Matrix x = spectrum_matrix(60, 40, {30.0, 24.0, 18.0}, 12);
  RngStream rng(2001);
  const StabilityProfile prof = rdr::stability_scores(x, 2, 8, 5, rng);
  ASSERT_EQ(prof.scores.size(), 8u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_GE(prof.scores[k], 0.9) << "k=" << k;
  for (std::size_t k = 3; k < 8; ++k) {
    EXPECT_LE(prof.scores[k], 0.6) << "k=" << k;
    EXPECT_GE(prof.scores[k], 0.0);
  }
}

TEST(StabilityScores, PureNoiseHasNoStableDirection) {
  // Wide aspect keeps the sample spectrum flat enough that no direction is
  // consistently recovered across projections at t = 1.
  RngStream data_rng(31337);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix x = rdr::gaussian_matrix(30, 90, data_rng);
    RngStream rng(900 + rep);
    const StabilityProfile prof = rdr::stability_scores(x, 1, 8, 5, rng);
    for (double s : prof.scores) EXPECT_LT(s, 0.9);
  }
}

TEST(StabilityScores, TwoProjectionsReduceToSinglePair) {
  const Matrix x = spectrum_matrix(25, 20, {5.0, 3.0, 1.0, 0.5}, 44);
  const std::size_t d_max = 6, t = 2;
  RngStream rng(71);
  const StabilityProfile prof = rdr::stability_scores(x, t, d_max, 2, rng);

  // Replay the two projections through the public pieces.
  RngStream replay(71);
  std::vector<Matrix> bases;
  for (int b = 0; b < 2; ++b) {
    const Matrix q = rdr::power_block_basis(x, d_max, t, replay);
    const Matrix y = rdr::matmul_tn(x, q);
    const rdr::SymmetricEig eig = rdr::symmetric_eig(rdr::matmul_tn(y, y));
    bases.push_back(rdr::matmul(q, eig.vectors));
  }
  for (std::size_t k = 0; k < d_max; ++k) {
    const double expect =
        std::fabs(rdr::spearman_correlation(bases[0].col_vector(k), bases[1].col_vector(k)));
    EXPECT_DOUBLE_EQ(prof.scores[k], expect) << "k=" << k;
  }
}

TEST(StabilityScores, RowPermutationLeavesScoresUnchanged) {
  const Matrix x = spectrum_matrix(24, 30, {8.0, 5.0, 2.0, 1.0}, 86);
  std::vector<std::size_t> perm(x.rows());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = (i * 7 + 3) % perm.size();
  const Matrix xp = x.rows_subset(perm);
  RngStream r1(52), r2(52);
  const StabilityProfile a = rdr::stability_scores(x, 2, 6, 4, r1);
  const StabilityProfile b = rdr::stability_scores(xp, 2, 6, 4, r2);
  // Row permutation permutes eigenvector entries the same way in every
  // projection; rank correlations are permutation-invariant, but the Gaussian
  // draw is consumed per entry, so replay the same draws by permuting back.
  // With identical streams the draws differ per row; only check invariance in
  // distributional terms: both runs agree on which directions are stable.
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(a.scores[k], b.scores[k], 0.35) << "k=" << k;
  }
}

TEST(ChangePoint, ThreeStableDirections) {
  StabilityProfile prof =
      profile_from_scores({0.99, 0.98, 0.97, 0.1, 0.12, 0.09, 0.11, 0.1});
  const std::size_t rank = rdr::change_point_rank(prof);
  EXPECT_EQ(rank, 3u);
  EXPECT_EQ(prof.d_hat, 3u);
  EXPECT_EQ(prof.pvalues.size(), 6u);
  const auto best = std::min_element(prof.pvalues.begin(), prof.pvalues.end());
  EXPECT_EQ(std::distance(prof.pvalues.begin(), best), 2);  // split at k = 4
  EXPECT_FALSE(prof.degenerate_scores);
}

TEST(ChangePoint, FlatScoresDegenerateToSmallestSplit) {
  StabilityProfile prof = profile_from_scores(std::vector<double>(8, 0.5));
  const std::size_t rank = rdr::change_point_rank(prof);
  EXPECT_EQ(rank, 1u);
  EXPECT_TRUE(prof.degenerate_scores);
  for (double p : prof.pvalues) EXPECT_EQ(p, 1.0);
}

TEST(ChangePoint, SingleStrongDirectionGivesRankOne) {
  // One dominant score, second-lowest right after it: every split past k=2
  // mixes a low score into the head, so the k=2 one-sided p (1/6) wins.
  StabilityProfile prof = profile_from_scores({0.95, 0.02, 0.12, 0.09, 0.11, 0.08});
  EXPECT_EQ(rdr::change_point_rank(prof), 1u);
}

TEST(ChangePoint, OutputAlwaysInRange) {
  RngStream rng(515);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> scores(4 + rng.uniform_below(10));
    for (double& s : scores) s = rng.uniform01();
    StabilityProfile prof = profile_from_scores(scores);
    const std::size_t rank = rdr::change_point_rank(prof);
    EXPECT_GE(rank, 1u);
    EXPECT_LE(rank, scores.size() - 1);
  }
}

TEST(ChangePoint, RejectsTooFewScores) {
  StabilityProfile prof = profile_from_scores({0.9, 0.1, 0.1});
  EXPECT_THROW(rdr::change_point_rank(prof), std::invalid_argument);
}

TEST(Bicv, RankOneHoldoutIsExact) {
  Matrix u(12, 1), v(10, 1);
  RngStream g(2);
  for (std::size_t i = 0; i < 12; ++i) u(i, 0) = g.normal();
  for (std::size_t i = 0; i < 10; ++i) v(i, 0) = 1.0 + g.uniform01();
  const Matrix x = rdr::matmul_nt(u, v);
  const double total = rdr::frobenius_norm(x);
  for (std::size_t t : {1u, 3u}) {
    RngStream rng(64 + t);
    const rdr::BicvReport rep = rdr::bicv_error(x, t, 4, 1, rng);
    for (double e : rep.block_errors) EXPECT_LE(e, 1e-16 * total * total);
    EXPECT_LE(rep.bicv_error, 1e-16 * total * total);
  }
}

TEST(Bicv, DeterministicGivenSeed) {
  const Matrix x = test_util::random_matrix(20, 16, 808);
  RngStream r1(5), r2(5);
  const rdr::BicvReport a = rdr::bicv_error(x, 2, 6, 2, r1);
  const rdr::BicvReport b = rdr::bicv_error(x, 2, 6, 2, r2);
  EXPECT_EQ(a.block_errors, b.block_errors);
  EXPECT_EQ(a.bicv_error, b.bicv_error);
  EXPECT_EQ(a.d_hat, b.d_hat);
}

TEST(Bicv, ErrorsNonnegativeAndRankPositive) {
  const Matrix x = test_util::random_matrix(18, 14, 9001);
  RngStream rng(13);
  const rdr::BicvReport rep = rdr::bicv_error(x, 1, 5, 2, rng);
  EXPECT_GE(rep.bicv_error, 0.0);
  EXPECT_GE(rep.d_hat, 1u);
  for (double e : rep.block_errors) EXPECT_GE(e, 0.0);
}

TEST(Bicv, MoreIterationsHelpOnClearGapData) {
  RngStream noise_rng(606);
  int improved = 0;
  const int reps = 8;
  for (int rep = 0; rep < reps; ++rep) {
    Matrix x = spectrum_matrix(40, 30, {50.0, 40.0, 30.0}, 7000 + rep);
    const Matrix e = rdr::gaussian_matrix(40, 30, noise_rng);
    x = rdr::add(x, rdr::scale(e, 0.2));
    RngStream r1(100 + rep), r4(100 + rep);
    const double e1 = rdr::bicv_error(x, 1, 8, 3, r1).bicv_error;
    const double e4 = rdr::bicv_error(x, 4, 8, 3, r4).bicv_error;
    if (e4 <= e1 * 1.05) ++improved;
  }
  EXPECT_GE(improved, reps - 2);
}

TEST(SelectTD, ReportsCoverSweepAndTieWindowContract) {
  const Matrix x = spectrum_matrix(24, 20, {10.0, 6.0, 3.0}, 3141);
  RngStream rng(2718);
  const rdr::Selection sel = rdr::select_t_d(x, 4, 6, 2, rng);
  ASSERT_EQ(sel.reports.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(sel.reports[i].t, i + 1);
  // Recompute the contract from the published reports: strict argmin first,
  // then the smallest t within one block-spread standard error of it.
  std::size_t best = 0;
  for (std::size_t i = 1; i < 4; ++i) {
    if (sel.reports[i].bicv_error < sel.reports[best].bicv_error) best = i;
  }
  const double min_err = sel.reports[best].bicv_error;
  double mean = 0.0, var = 0.0;
  for (double e : sel.reports[best].block_errors) mean += e / 4.0;
  for (double e : sel.reports[best].block_errors) var += (e - mean) * (e - mean) / 3.0;
  const double threshold =
      min_err + 0.5 * std::sqrt(var) + rdr::kBicvTieRelFloor * (1.0 + min_err);
  std::size_t expect_t = best + 1;
  for (std::size_t i = 0; i < best; ++i) {
    if (sel.reports[i].bicv_error <= threshold) {
      expect_t = i + 1;
      break;
    }
  }
  EXPECT_EQ(sel.t_star, expect_t);
  EXPECT_EQ(sel.d_star, sel.reports[sel.t_star - 1].d_hat);
  EXPECT_LE(sel.reports[sel.t_star - 1].bicv_error, threshold);
}

TEST(SelectTD, ExactRankDataTiesDownToSmallestT) {
  // Every holdout error of an exactly low-rank matrix sits at numerical-noise
  // level, so the whole sweep ties and the smallest t must win.
  const Matrix x = spectrum_matrix(26, 22, {9.0, 4.0}, 2222);
  for (std::uint64_t seed : {3u, 17u, 90001u}) {
    RngStream rng(seed);
    const rdr::Selection sel = rdr::select_t_d(x, 5, 7, 3, rng);
    EXPECT_EQ(sel.t_star, 1u) << "seed=" << seed;
  }
}

TEST(SelectTD, PartitionReuseIsVisibleInReports) {
  const Matrix x = test_util::random_matrix(20, 18, 42);
  RngStream r1(11);
  const rdr::Selection reused = rdr::select_t_d(x, 3, 5, 2, r1, true);
  EXPECT_EQ(reused.reports[0].partition_seed, reused.reports[1].partition_seed);
  EXPECT_EQ(reused.reports[1].partition_seed, reused.reports[2].partition_seed);
  RngStream r2(11);
  const rdr::Selection fresh = rdr::select_t_d(x, 3, 5, 2, r2, false);
  EXPECT_NE(fresh.reports[0].partition_seed, fresh.reports[1].partition_seed);
}

TEST(SelectTD, DeterministicGivenSeed) {
  const Matrix x = test_util::random_matrix(22, 19, 777);
  RngStream r1(31415), r2(31415);
  const rdr::Selection a = rdr::select_t_d(x, 3, 6, 2, r1);
  const rdr::Selection b = rdr::select_t_d(x, 3, 6, 2, r2);
  EXPECT_EQ(a.t_star, b.t_star);
  EXPECT_EQ(a.d_star, b.d_star);
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    EXPECT_EQ(a.reports[i].bicv_error, b.reports[i].bicv_error);
  }
}
