#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rdr/matrix.hpp"

namespace rdr {

// Experiment runners shared by the command line tool's `reproduce` command
// and the acceptance suite.  Each runner is a deterministic function of its
// settings and a master seed: replicates draw from streams derived by
// replicate index, so results are independent of execution order and thread
// count.  Desk scale shrinks (n, p, replicates) to a laptop budget; full
// scale matches the published setups.

// ---------------------------------------------------------------------------
// Singular-value accuracy against power-iteration count on planted low-rank
// data (fixed rank, oversampled randomized factorization).  Errors are
// relative to the exact singular values of the same realized matrix.

struct SvAccuracySettings {
  std::size_t n = 0, p = 0, d_star = 0;
  std::size_t replicates = 0;
  double kappa = 1.0;
  std::size_t delta = 10;
  std::vector<std::size_t> t_values;
};
SvAccuracySettings sv_accuracy_settings(bool full_scale);

struct SvAccuracyResult {
  SvAccuracySettings settings;
  std::vector<std::vector<double>> pct_error;  // [t index][replicate]
  std::vector<double> mean_pct_error;          // per t
  std::vector<double> se_pct_error;            // per t (standard error)
};
SvAccuracyResult run_sv_accuracy(const SvAccuracySettings& s, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Joint rank / iteration-count estimation on planted low-rank data with the
// true rank drawn uniformly per replicate.  The rank search is capped at
// d_true + d_cap_margin, mirroring the published protocol.

struct RankEstimationSettings {
  std::size_t n = 0, p = 0;
  std::size_t replicates = 0;
  std::size_t d_min = 0, d_max_true = 0;
  std::size_t d_cap_margin = 30;
  double kappa = 1.0;
};
RankEstimationSettings rank_estimation_settings(bool full_scale, double kappa);

struct RankEstimationResult {
  RankEstimationSettings settings;
  std::vector<std::size_t> d_true, d_hat, t_hat;  // per replicate
};
RankEstimationResult run_rank_estimation(const RankEstimationSettings& s, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Generalized-XOR classification: average k-nearest-neighbor accuracy of the
// projected data across a grid of neighbor counts, per noise level and
// method.  The neighbor grid spans [knn_lo_fraction, knn_hi_fraction] of the
// per-class sample count in steps of knn_step; the local smoother uses
// smoother_class_fraction of the smallest class.  The defaults translate a
// per-cluster rule (10%..30% of a nominal cluster of n/10 samples, smoothing
// at 20%) into the class-size basis, hence the factor 2/10.

struct XorSweepSettings {
  std::size_t n_train = 0, n_test = 0, p = 0, d_star = 0;
  std::size_t replicates = 0;
  double pi = 0.5;
  std::vector<double> sigmas;
  std::size_t r = 0;  // directions requested from each method
  double smoother_class_fraction = 0.04;
  double knn_lo_fraction = 0.02, knn_hi_fraction = 0.06;
  std::size_t knn_step = 2;
};
XorSweepSettings xor_sweep_settings(bool full_scale);

struct XorSweepResult {
  XorSweepSettings settings;
  std::vector<std::string> methods;
  std::vector<std::vector<std::vector<double>>> accuracy;  // [sigma][method][replicate]
  std::vector<std::vector<double>> mean_accuracy;          // [sigma][method]
};
XorSweepResult run_xor_sweep(const XorSweepSettings& s, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Latent-factor regression: direction agreement, held-out prediction error
// and R^2 for each reduction method, over replicate draws of the model.

struct LatentFactorSettings {
  std::size_t n = 0, p = 0;
  std::size_t replicates = 0;
  std::size_t num_slices = 10, smoother_k = 10, r = 1;
  double s2n_lo = 0.3, s2n_hi = 0.6;
};
// p_large selects the p > n shape; strong_signal selects the high
// signal-to-noise band [0.6, 0.9] (the default band is the weak [0.3, 0.6]).
LatentFactorSettings latent_factor_settings(bool full_scale, bool p_large,
                                            bool strong_signal);

struct LatentFactorResult {
  LatentFactorSettings settings;
  std::vector<std::string> methods;
  std::vector<std::vector<double>> aedr, mspe, r2;  // [method][replicate]
  std::vector<double> mean_aedr, se_aedr;
  std::vector<double> mean_mspe, se_mspe;
  std::vector<double> mean_r2, se_r2;
};
LatentFactorResult run_latent_factor(const LatentFactorSettings& s, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Shared helpers.

// Brute-force k-nearest-neighbor majority vote on projected coordinates.
// Distance ties break by training index; vote ties fall back to the single
// nearest neighbor's label.  Labels are class values compared exactly.
std::vector<double> knn_classify(const Matrix& z_train, const std::vector<double>& y_train,
                                 const Matrix& z_test, std::size_t k);

// Sample mean and standard error (sd / sqrt(count)) of one replicate series.
double mean_of(const std::vector<double>& values);
double standard_error_of(const std::vector<double>& values);

}  // namespace rdr
