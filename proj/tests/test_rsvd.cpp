#include "rdr/rsvd.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rdr/linalg.hpp"
#include "rdr/matrix.hpp"
#include "rdr/rng.hpp"
#include "test_util.hpp"

using rdr::Matrix;
using rdr::RngStream;
using rdr::TruncatedSVD;

namespace {

// X with chosen singular values, via random orthonormal factors.
Matrix synthetic_spectrum(std::size_t n, std::size_t p, const std::vector<double>& svals,
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

Matrix reconstruct(const TruncatedSVD& f) {
  Matrix us = f.u;
  for (std::size_t j = 0; j < f.s.size(); ++j) {
    for (std::size_t i = 0; i < us.rows(); ++i) us(i, j) *= f.s[j];
  }
  return rdr::matmul_nt(us, f.v);
}

}  // namespace

TEST(PowerBlocks, IdentityPreservesInitialSpan) {
  const std::size_t n = 20, ell = 6;
  const Matrix x = Matrix::identity(n);
  RngStream draw(42);
  const Matrix omega = rdr::gaussian_matrix(n, ell, draw);
  RngStream rng(42);
  const rdr::PowerBlockSequence seq = rdr::power_blocks(x, ell, 3, rng);
  ASSERT_EQ(seq.blocks.size(), 3u);
  for (const Matrix& f : seq.blocks) {
    const std::vector<double> cos = rdr::principal_angle_cosines(f, omega);
    for (double c : cos) EXPECT_NEAR(c, 1.0, 1e-10);
  }
}

TEST(PowerBlocks, CapturesRangeOfExactLowRank) {
  const Matrix x = synthetic_spectrum(40, 30, {5.0, 4.0, 3.0, 2.0, 1.0}, 9);
  RngStream rng(7);
  const rdr::PowerBlockSequence seq = rdr::power_blocks(x, 8, 4, rng);
  for (std::size_t t = 2; t <= 4; ++t) {
    const Matrix& f = seq.blocks[t - 1];
    const Matrix resid = rdr::subtract(x, rdr::matmul(f, rdr::matmul_tn(f, x)));
    EXPECT_LE(rdr::frobenius_norm(resid), 1e-8) << "t=" << t;
  }
}

TEST(PowerBlocks, NormalizedBlocksAreOrthonormal) {
  const Matrix x = test_util::random_matrix(25, 18, 3);
  RngStream rng(11);
  const rdr::PowerBlockSequence seq = rdr::power_blocks(x, 6, 3, rng);
  EXPECT_TRUE(seq.normalized);
  EXPECT_EQ(seq.ell, 6u);
  for (const Matrix& f : seq.blocks) {
    EXPECT_LE(test_util::orthonormality_defect(f), 1e-12);
  }
}

TEST(PowerBlocks, NormalizedAndRawVariantsShareSpans) {
  // Mild spectrum keeps the raw variant well-scaled for small t.
  const Matrix x = synthetic_spectrum(30, 25, {2.0, 1.8, 1.5, 1.3, 1.1, 1.0, 0.9, 0.8}, 21);
  RngStream rng_a(5), rng_b(5);
  const rdr::PowerBlockSequence norm = rdr::power_blocks(x, 5, 3, rng_a, true);
  const rdr::PowerBlockSequence raw = rdr::power_blocks(x, 5, 3, rng_b, false);
  EXPECT_FALSE(raw.normalized);
  for (std::size_t t = 1; t <= 3; ++t) {
    const std::vector<double> cos =
        rdr::principal_angle_cosines(norm.blocks[t - 1], raw.blocks[t - 1]);
    for (double c : cos) EXPECT_GE(c, 1.0 - 1e-8) << "t=" << t;
  }
}

TEST(PowerBlocks, RejectsBadWidth) {
  const Matrix x = test_util::random_matrix(10, 8, 1);
  RngStream rng(1);
  EXPECT_THROW(rdr::power_blocks(x, 9, 2, rng), std::invalid_argument);
  EXPECT_THROW(rdr::power_blocks(x, 0, 2, rng), std::invalid_argument);
  EXPECT_THROW(rdr::power_blocks(x, 4, 0, rng), std::invalid_argument);
}

TEST(RandomizedSvdFixed, ExactRankThreeRecovered) {
  const Matrix x = synthetic_spectrum(25, 15, {9.0, 4.0, 1.0}, 33);
  RngStream rng(19);
  const TruncatedSVD f = rdr::randomized_svd_fixed(x, 3, 5, 3, rng);
  ASSERT_EQ(f.s.size(), 3u);
  EXPECT_NEAR(f.s[0], 9.0, 1e-8);
  EXPECT_NEAR(f.s[1], 4.0, 1e-8);
  EXPECT_NEAR(f.s[2], 1.0, 1e-8);
  EXPECT_LE(test_util::orthonormality_defect(f.u), 1e-10);
  EXPECT_LE(test_util::orthonormality_defect(f.v), 1e-10);
  EXPECT_LE(test_util::rel_fro_diff(x, reconstruct(f)), 1e-8);
  EXPECT_EQ(f.rank_est, 3u);
  EXPECT_EQ(f.power_iters, 3);
}

TEST(RandomizedSvdFixed, MatchesDenseAtNearFullWidth) {
  const Matrix x = test_util::random_matrix(60, 40, 91);
  const TruncatedSVD dense = rdr::dense_svd(x);
  RngStream rng(77);
  const std::size_t d = 30, delta = 10;  // d + delta spans the full min dimension
  const TruncatedSVD f = rdr::randomized_svd_fixed(x, d, delta, 12, rng);
  for (std::size_t i = 0; i < d; ++i) {
    EXPECT_NEAR(f.s[i], dense.s[i], 1e-6 * dense.s[0]) << "i=" << i;
  }
}

TEST(RandomizedSvdFixed, TallOrientationSwapsFactors) {
  const Matrix x = synthetic_spectrum(35, 20, {6.0, 3.0, 1.5}, 55);
  RngStream rng(8);
  const TruncatedSVD f = rdr::randomized_svd_fixed(x, 3, 4, 3, rng);
  EXPECT_EQ(f.u.rows(), 35u);
  EXPECT_EQ(f.v.rows(), 20u);
  EXPECT_LE(test_util::rel_fro_diff(x, reconstruct(f)), 1e-8);
  EXPECT_NEAR(f.s[0], 6.0, 1e-8);
}

TEST(RandomizedSvdFixed, ErrorNonincreasingInIterationCount) {
  // Same seed at every t pins the initial draw, isolating the t effect.
  const Matrix x = synthetic_spectrum(
      50, 40, {10.0, 8.0, 6.0, 4.5, 3.5, 3.0, 2.5, 2.0, 1.6, 1.3, 1.1, 1.0}, 70);
  double prev = -1.0;
  for (std::size_t t = 1; t <= 6; ++t) {
    RngStream rng(1001);
    const TruncatedSVD f = rdr::randomized_svd_fixed(x, 5, 6, t, rng);
    const double err = rdr::frobenius_norm(rdr::subtract(x, reconstruct(f)));
    if (prev >= 0.0) EXPECT_LE(err, prev + 1e-10) << "t=" << t;
    prev = err;
  }
}

TEST(RandomizedSvdFixed, NeverBeatsOptimalRankError) {
  const Matrix x = test_util::random_matrix(30, 22, 1717);
  const TruncatedSVD dense = rdr::dense_svd(x);
  for (std::size_t d : {2u, 5u, 9u}) {
    RngStream rng(d);
    const TruncatedSVD f = rdr::randomized_svd_fixed(x, d, 5, 2, rng);
    const double err = rdr::frobenius_norm(rdr::subtract(x, reconstruct(f)));
    EXPECT_GE(err, dense.s[d] - 1e-10) << "d=" << d;
  }
}

TEST(RandomizedSvdFixed, SubspaceAnglesShrinkWithT) {
  const Matrix x = synthetic_spectrum(45, 35, {8.0, 7.0, 6.0, 1.0, 0.9, 0.8, 0.7, 0.6}, 140);
  const TruncatedSVD dense = rdr::dense_svd(x);
  const Matrix top3 = dense.u.cols_range(0, 3);
  double prev_angle = 10.0;
  for (std::size_t t = 1; t <= 4; ++t) {
    RngStream rng(3030);
    const TruncatedSVD f = rdr::randomized_svd_fixed(x, 3, 4, t, rng);
    const double angle = rdr::max_principal_angle(f.u, top3);
    EXPECT_LE(angle, prev_angle + 1e-12) << "t=" << t;
    prev_angle = angle;
  }
  EXPECT_LE(prev_angle, 1e-3);
}

TEST(RandomizedSvdFixed, DeterministicGivenStream) {
  const Matrix x = test_util::random_matrix(28, 34, 12);
  RngStream r1(99), r2(99);
  const TruncatedSVD a = rdr::randomized_svd_fixed(x, 4, 6, 2, r1);
  const TruncatedSVD b = rdr::randomized_svd_fixed(x, 4, 6, 2, r2);
  EXPECT_EQ(a.s, b.s);
  EXPECT_EQ(a.u.data(), b.u.data());
  EXPECT_EQ(a.v.data(), b.v.data());
}

TEST(AdaptiveSvd, RecoversExactRank) {
  const Matrix x =
      synthetic_spectrum(50, 60, {9.0, 7.5, 6.0, 5.0, 4.0, 3.0, 2.0}, 2024);
  rdr::AdaptiveOptions opts;
  opts.t_max = 3;
  opts.d_max = 16;
  opts.delta = 6;
  RngStream rng(5150);
  const TruncatedSVD f = rdr::adaptive_randomized_svd(x, opts, rng);
  EXPECT_EQ(f.rank_est, 7u);
  ASSERT_EQ(f.s.size(), 7u);
  EXPECT_NEAR(f.s[0], 9.0, 1e-7);
  EXPECT_LE(test_util::rel_fro_diff(x, reconstruct(f)), 1e-7);
  EXPECT_GE(f.power_iters, 1);
  EXPECT_LE(f.power_iters, 3);
}

TEST(AdaptiveSvd, PinnedRankAndIterationsRespected) {
  const Matrix x = test_util::random_matrix(30, 40, 4096);
  rdr::AdaptiveOptions opts;
  opts.t_max = 4;
  opts.d_max = 12;
  opts.delta = 5;
  opts.fixed_t = 2;
  opts.fixed_d = 4;
  RngStream rng(31);
  const TruncatedSVD f = rdr::adaptive_randomized_svd(x, opts, rng);
  EXPECT_EQ(f.rank_est, 4u);
  EXPECT_EQ(f.power_iters, 2);
}

TEST(AdaptiveSvd, PinnedIterationStillSelectsRank) {
  const Matrix x = synthetic_spectrum(40, 55, {7.0, 5.0, 3.0}, 88);
  rdr::AdaptiveOptions opts;
  opts.d_max = 10;
  opts.delta = 5;
  opts.fixed_t = 2;
  RngStream rng(606);
  const TruncatedSVD f = rdr::adaptive_randomized_svd(x, opts, rng);
  EXPECT_EQ(f.power_iters, 2);
  EXPECT_EQ(f.rank_est, 3u);
}

TEST(AdaptiveSvd, PinnedRankStillSelectsIterations) {
  const Matrix x = synthetic_spectrum(40, 44, {6.0, 4.0, 2.0, 1.0}, 89);
  rdr::AdaptiveOptions opts;
  opts.t_max = 3;
  opts.d_max = 10;
  opts.delta = 4;
  opts.fixed_d = 4;
  RngStream rng(607);
  const TruncatedSVD f = rdr::adaptive_randomized_svd(x, opts, rng);
  EXPECT_EQ(f.rank_est, 4u);
  EXPECT_GE(f.power_iters, 1);
  EXPECT_LE(f.power_iters, 3);
}
