#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "rdr/matrix.hpp"
#include "rdr/rng.hpp"

namespace rdr {

// Synthetic data generators for the three benchmark families (planted
// low-rank signal in noise, generalized-XOR classification, latent-factor
// regression) plus the evaluation metrics used to score estimates against
// the planted ground truth.

// ---------------------------------------------------------------------------
// Ground-truth bundles.  Each generator stores enough of the planted
// structure to recompute every evaluation metric without re-simulation.

// Planted factorization behind gen_lowrank_noise: the clean signal is
// u * diag(s) * v^T and the observation adds dense Gaussian noise.
struct LowRankTruth {
  Matrix u;               // n x d_star, orthonormal columns
  Matrix v;               // p x d_star, orthonormal columns
  std::vector<double> s;  // positive, decreasing
  std::size_t d_star = 0;
};

// Cluster structure behind gen_xor.  cluster[i] records which of the 2^d_star
// sign patterns sample i was drawn around: bit j is set when signal
// coordinate j is centered at -2 (clear means +2).  The label is the parity
// of that bit pattern.
struct XorTruth {
  std::size_t d_star = 0;  // signal coordinates are 0 .. d_star-1
  double sigma = 0.0;      // noise standard deviation
  double pi = 0.5;         // per-coordinate probability of the -2 center
  std::vector<std::uint64_t> cluster;  // per-sample center sign pattern
};

// Parameters behind gen_latent_factor.  Covariates are x_i = B S lambda_i +
// nu_i and the response is y_i = theta^T lambda_i + eps_i with lambda_i ~
// N(0, I), nu_i ~ N(0, psi2 I), eps_i ~ N(0, tau2).  The population
// regression direction is b_true = (B S^2 B^T + psi2 I)^{-1} B S theta.
struct LatentFactorTruth {
  Matrix basis;                // p x d_star orthonormal factor loadings (B)
  std::vector<double> s;       // signed factor scales, |s| decreasing
  std::vector<double> theta;   // response weights, |theta| decreasing
  std::vector<double> b_true;  // population regression direction, length p
  double psi2 = 0.0;           // covariate noise variance
  double tau2 = 0.0;           // response noise variance
  double s2n_x = 0.0;          // min(s^2) / (psi2 + min(s^2)), the sampled target
  double s2n_y = 0.0;          // theta^T theta / (tau2 + theta^T theta)
  std::size_t d_star = 0;
};

struct SimDataset {
  Matrix x;               // n x p observations
  std::vector<double> y;  // response; empty for the unsupervised family
  std::variant<LowRankTruth, XorTruth, LatentFactorTruth> truth;
  RngStream seed;  // copy of the generator's stream taken at entry, so the
                   // exact dataset can be re-simulated from this field alone
};

// ---------------------------------------------------------------------------
// Generators.  All are deterministic functions of the stream: the same seed
// reproduces the dataset bit for bit.

// Observation x = u * diag(s) * v^T + e.  The columns of u and v are drawn
// uniformly at random on the unit sphere and then orthonormalized; e has iid
// N(0, 1/n) entries.  The singular values are cumulative sums of iid Exp(1)
// increments on top of a baseline of kappa times the top singular value of a
// freshly drawn noise matrix, so for kappa >= 1 every signal singular value
// clears the noise level; kappa = 0 drops the baseline and the smallest
// signal singular values may fall below the noise edge.  Generated
// increasing, stored decreasing.  Requires 1 <= d_star <= min(n, p).
SimDataset gen_lowrank_noise(std::size_t n, std::size_t p, std::size_t d_star,
                             double kappa, RngStream& rng);

// Generalized XOR: signal coordinate j < d_star of each sample is drawn
// around -2 with probability pi (else +2) with N(0, sigma^2) noise added;
// the remaining p - d_star coordinates are pure N(0, sigma^2).  The class
// label is the parity of the number of -2 centers, which for d_star = 2
// reduces to the classic XOR quadrant labeling.  Labels are 0/1 in y.
// Requires 1 <= d_star <= min(p, 64), sigma >= 0 and pi in [0, 1].
SimDataset gen_xor(std::size_t n, std::size_t p, std::size_t d_star,
                   double sigma, double pi, RngStream& rng);

// Latent-factor regression.  Draws B orthonormal, theta and s from a
// t-distribution with 5 degrees of freedom sorted by decreasing magnitude
// (s keeps its signs), then picks signal-to-noise targets s2n_x and s2n_y
// uniformly in [s2n_lo, s2n_hi] and solves them for psi2 and tau2 exactly:
//   s2n_x = min(s^2) / (psi2 + min(s^2)),
//   s2n_y = theta^T theta / (tau2 + theta^T theta).
// Passing d_star = 0 draws the factor count uniformly from {5, ..., 20}.
// Requires d_star <= p (after the draw) and 0 < s2n_lo <= s2n_hi <= 1.
SimDataset gen_latent_factor(std::size_t n, std::size_t p, std::size_t d_star,
                             double s2n_lo, double s2n_hi, RngStream& rng);

// Draws n fresh samples from an existing latent-factor model: the held-out
// set shares the truth bundle with the training draw.
SimDataset sample_latent_factor(const LatentFactorTruth& truth, std::size_t n,
                                RngStream& rng);

// ---------------------------------------------------------------------------
// Evaluation metrics.

// Pearson correlation.  Requires equal lengths >= 2; returns 0 when either
// input has zero variance.
double pearson_correlation(const std::vector<double>& u, const std::vector<double>& v);

// Agreement between an estimated direction basis and the true one, both
// p x r with directions as columns.  For a single direction this is the
// absolute Pearson correlation of the two coordinate vectors; for r > 1 it
// generalizes to the mean cosine of the principal angles between the two
// column spans.  1 means identical span, 0 means orthogonal.
double direction_agreement(const Matrix& b_true, const Matrix& b_hat);

// Least-squares fit of y on the columns of z plus an intercept.
struct LinearModel {
  std::vector<double> coef;  // one weight per column of z
  double intercept = 0.0;
};
LinearModel fit_linear_model(const Matrix& z, const std::vector<double>& y);
std::vector<double> predict(const LinearModel& model, const Matrix& z);

// Mean of the squared residuals between observed and predicted responses.
double mean_squared_error(const std::vector<double>& y, const std::vector<double>& y_hat);

// Squared Pearson correlation between observed and predicted responses.
double r_squared(const std::vector<double>& y, const std::vector<double>& y_hat);

// Mean percent relative error of the leading top_d estimated singular
// values against the true ones.  Requires top_d entries in both inputs and
// strictly positive true values.
double mean_singular_value_pct_error(const std::vector<double>& s_true,
                                     const std::vector<double>& s_hat,
                                     std::size_t top_d);

// || a - a_hat ||_F / || a ||_F.  Requires matching shapes and a nonzero
// reference.
double relative_frobenius_error(const Matrix& a, const Matrix& a_hat);

// Fraction of positions where the predicted label equals the true one.
double classification_accuracy(const std::vector<double>& y_true,
                               const std::vector<double>& y_hat);

}  // namespace rdr
