#include "rdr/simgen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rdr/linalg.hpp"
#include "rdr/rsvd.hpp"

namespace rdr {

namespace {

// Power iterations used to estimate the top singular value of the noise
// probe.  The estimate only sets a baseline scale, so bulk-edge convergence
// to a percent or two is plenty.
constexpr std::size_t kNoiseEdgePowerIters = 8;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

// Orthonormalized Gaussian draw: columns land uniformly at random on the
// unit sphere (up to scale) and Gram-Schmidt turns them into an orthonormal
// basis.  Random columns are almost surely independent, so deficiency is an
// error here.
Matrix random_orthonormal(std::size_t rows, std::size_t cols, RngStream& rng) {
  return qr_orthonormalize(gaussian_matrix(rows, cols, rng), DeficiencyPolicy::kError);
}

// Student t with 5 degrees of freedom: z / sqrt(chi2_5 / 5).  Drawn through
// the stream's own primitives so the sequence stays reproducible.
double student_t5(RngStream& rng) {
  const double z = rng.normal();
  double chi2 = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double w = rng.normal();
    chi2 += w * w;
  }
  return z / std::sqrt(chi2 / 5.0);
}

void sort_by_magnitude_descending(std::vector<double>& v) {
  std::stable_sort(v.begin(), v.end(),
                   [](double a, double b) { return std::abs(a) > std::abs(b); });
}

}  // namespace

SimDataset gen_lowrank_noise(std::size_t n, std::size_t p, std::size_t d_star,
                             double kappa, RngStream& rng) {
  require(n >= 1 && p >= 1, "gen_lowrank_noise: n and p must be positive");
  require(d_star >= 1 && d_star <= std::min(n, p),
          "gen_lowrank_noise: d_star must lie in [1, min(n, p)]");
  require(kappa >= 0.0, "gen_lowrank_noise: kappa must be nonnegative");
  RngStream entry = rng;

  // Baseline for the singular values: kappa times the top singular value of
  // a noise matrix drawn fresh from its own substream (so the baseline is
  // independent of the noise actually added below).  Estimated by a short
  // randomized power iteration.
  RngStream probe_rng = rng.derive("noise-edge");
  const double root_n = std::sqrt(static_cast<double>(n));
  const Matrix probe = scale(gaussian_matrix(n, p, probe_rng), 1.0 / root_n);
  const std::size_t probe_delta = std::min<std::size_t>(10, std::min(n, p) - 1);
  const double noise_edge =
      randomized_svd_fixed(probe, 1, probe_delta, kNoiseEdgePowerIters, probe_rng).s.front();

  Matrix u = random_orthonormal(n, d_star, rng);
  Matrix v = random_orthonormal(p, d_star, rng);

  // Singular values grow by iid Exp(1) increments from the kappa-scaled
  // baseline; built increasing, stored decreasing.
  std::vector<double> s(d_star);
  double running = kappa * noise_edge;
  for (std::size_t j = 0; j < d_star; ++j) {
    running += rng.exponential();
    s[j] = running;
  }
  std::reverse(s.begin(), s.end());

  Matrix us(n, d_star);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d_star; ++j) us(i, j) = u(i, j) * s[j];
  Matrix x = matmul_nt(us, v);

  const Matrix noise = gaussian_matrix(n, p, rng);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) x(i, j) += noise(i, j) / root_n;

  SimDataset ds{std::move(x), {},
                LowRankTruth{std::move(u), std::move(v), std::move(s), d_star},
                entry};
  return ds;
}

SimDataset gen_xor(std::size_t n, std::size_t p, std::size_t d_star,
                   double sigma, double pi, RngStream& rng) {
  require(n >= 1 && p >= 1, "gen_xor: n and p must be positive");
  require(d_star >= 1 && d_star <= p, "gen_xor: d_star must lie in [1, p]");
  require(d_star <= 64, "gen_xor: at most 64 signal coordinates (sign patterns are 64-bit)");
  require(sigma >= 0.0, "gen_xor: sigma must be nonnegative");
  require(pi >= 0.0 && pi <= 1.0, "gen_xor: pi must lie in [0, 1]");
  RngStream entry = rng;

  Matrix x(n, p);
  std::vector<double> y(n);
  std::vector<std::uint64_t> cluster(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    for (std::size_t j = 0; j < d_star; ++j) {
      const bool negative = rng.uniform01() < pi;
      if (negative) bits |= std::uint64_t{1} << j;
      x(i, j) = (negative ? -2.0 : 2.0) + sigma * rng.normal();
    }
    for (std::size_t j = d_star; j < p; ++j) x(i, j) = sigma * rng.normal();
    cluster[i] = bits;
    y[i] = static_cast<double>(std::popcount(bits) % 2);
  }

  SimDataset ds{std::move(x), std::move(y),
                XorTruth{d_star, sigma, pi, std::move(cluster)}, entry};
  return ds;
}

SimDataset sample_latent_factor(const LatentFactorTruth& truth, std::size_t n,
                                RngStream& rng) {
  require(n >= 1, "sample_latent_factor: n must be positive");
  const std::size_t p = truth.basis.rows();
  const std::size_t d = truth.d_star;
  require(truth.basis.cols() == d && truth.s.size() == d && truth.theta.size() == d,
          "sample_latent_factor: truth bundle dimensions are inconsistent");
  RngStream entry = rng;

  // Draw order per dataset: factors, response noise, covariate noise.
  const Matrix factors = gaussian_matrix(n, d, rng);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < d; ++j) dot += factors(i, j) * truth.theta[j];
    y[i] = dot + std::sqrt(truth.tau2) * rng.normal();
  }

  Matrix scaled(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) scaled(i, j) = factors(i, j) * truth.s[j];
  Matrix x = matmul_nt(scaled, truth.basis);
  const double psi = std::sqrt(truth.psi2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) x(i, j) += psi * rng.normal();

  SimDataset ds{std::move(x), std::move(y), truth, entry};
  return ds;
}

SimDataset gen_latent_factor(std::size_t n, std::size_t p, std::size_t d_star,
                             double s2n_lo, double s2n_hi, RngStream& rng) {
  require(n >= 1 && p >= 1, "gen_latent_factor: n and p must be positive");
  require(s2n_lo > 0.0 && s2n_lo <= s2n_hi && s2n_hi <= 1.0,
          "gen_latent_factor: signal-to-noise range must satisfy 0 < lo <= hi <= 1");
  RngStream entry = rng;

  if (d_star == 0) d_star = 5 + static_cast<std::size_t>(rng.uniform_below(16));
  require(d_star <= p, "gen_latent_factor: d_star must not exceed p");

  LatentFactorTruth truth;
  truth.d_star = d_star;
  truth.basis = random_orthonormal(p, d_star, rng);

  truth.theta.resize(d_star);
  for (double& t : truth.theta) t = student_t5(rng);
  sort_by_magnitude_descending(truth.theta);
  truth.s.resize(d_star);
  for (double& t : truth.s) t = student_t5(rng);
  sort_by_magnitude_descending(truth.s);

  truth.s2n_x = s2n_lo + (s2n_hi - s2n_lo) * rng.uniform01();
  truth.s2n_y = s2n_lo + (s2n_hi - s2n_lo) * rng.uniform01();

  // Invert the two signal-to-noise definitions exactly:
  //   s2n_x = min(s^2) / (psi2 + min(s^2))   =>  psi2 = min(s^2) (1 - s2n_x) / s2n_x
  //   s2n_y = theta'theta / (tau2 + theta'theta)
  double min_s2 = truth.s.front() * truth.s.front();
  for (double v : truth.s) min_s2 = std::min(min_s2, v * v);
  double theta_sq = 0.0;
  for (double t : truth.theta) theta_sq += t * t;
  truth.psi2 = min_s2 * (1.0 - truth.s2n_x) / truth.s2n_x;
  truth.tau2 = theta_sq * (1.0 - truth.s2n_y) / truth.s2n_y;

  // Population regression direction.  The Woodbury identity collapses
  // (B S^2 B' + psi2 I)^{-1} B S theta to B diag(s_j / (psi2 + s_j^2)) theta,
  // so no p x p inverse is ever formed.  A zero denominator means the factor
  // never reaches the covariates; its weight is the zero limit.
  truth.b_true.assign(p, 0.0);
  for (std::size_t j = 0; j < d_star; ++j) {
    const double den = truth.psi2 + truth.s[j] * truth.s[j];
    const double w = den == 0.0 ? 0.0 : truth.s[j] / den * truth.theta[j];
    for (std::size_t i = 0; i < p; ++i) truth.b_true[i] += truth.basis(i, j) * w;
  }

  SimDataset ds = sample_latent_factor(truth, n, rng);
  ds.seed = entry;
  return ds;
}

double pearson_correlation(const std::vector<double>& u, const std::vector<double>& v) {
  require(u.size() == v.size(), "pearson_correlation: inputs must have equal length");
  require(u.size() >= 2, "pearson_correlation: need at least two observations");
  const double n = static_cast<double>(u.size());
  double mu = 0.0, mv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    mu += u[i];
    mv += v[i];
  }
  mu /= n;
  mv /= n;
  double suv = 0.0, suu = 0.0, svv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double du = u[i] - mu;
    const double dv = v[i] - mv;
    suv += du * dv;
    suu += du * du;
    svv += dv * dv;
  }
  if (suu == 0.0 || svv == 0.0) return 0.0;
  return suv / std::sqrt(suu * svv);
}

double direction_agreement(const Matrix& b_true, const Matrix& b_hat) {
  require(b_true.rows() == b_hat.rows(),
          "direction_agreement: direction bases must have equal row counts");
  require(b_true.cols() >= 1 && b_hat.cols() >= 1,
          "direction_agreement: direction bases must be nonempty");
  if (b_true.cols() == 1 && b_hat.cols() == 1)
    return std::abs(pearson_correlation(b_true.col_vector(0), b_hat.col_vector(0)));
  const std::vector<double> cosines = principal_angle_cosines(b_true, b_hat);
  double sum = 0.0;
  for (double c : cosines) sum += c;
  return sum / static_cast<double>(cosines.size());
}

LinearModel fit_linear_model(const Matrix& z, const std::vector<double>& y) {
  require(z.rows() == y.size(), "fit_linear_model: row count must match response length");
  require(z.rows() >= 1, "fit_linear_model: need at least one observation");
  const std::size_t n = z.rows();
  const std::size_t r = z.cols();
  Matrix design(n, r + 1);
  for (std::size_t i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (std::size_t j = 0; j < r; ++j) design(i, j + 1) = z(i, j);
  }
  Matrix rhs(n, 1);
  for (std::size_t i = 0; i < n; ++i) rhs(i, 0) = y[i];
  const Matrix beta = matmul(pseudoinverse(design), rhs);
  LinearModel model;
  model.intercept = beta(0, 0);
  model.coef.resize(r);
  for (std::size_t j = 0; j < r; ++j) model.coef[j] = beta(j + 1, 0);
  return model;
}

std::vector<double> predict(const LinearModel& model, const Matrix& z) {
  require(z.cols() == model.coef.size(),
          "predict: column count must match the fitted coefficients");
  std::vector<double> out(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    double acc = model.intercept;
    for (std::size_t j = 0; j < z.cols(); ++j) acc += z(i, j) * model.coef[j];
    out[i] = acc;
  }
  return out;
}

double mean_squared_error(const std::vector<double>& y, const std::vector<double>& y_hat) {
  require(y.size() == y_hat.size(), "mean_squared_error: inputs must have equal length");
  require(!y.empty(), "mean_squared_error: need at least one observation");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - y_hat[i];
    acc += d * d;
  }
  return acc / static_cast<double>(y.size());
}

double r_squared(const std::vector<double>& y, const std::vector<double>& y_hat) {
  const double c = pearson_correlation(y, y_hat);
  return c * c;
}

double mean_singular_value_pct_error(const std::vector<double>& s_true,
                                     const std::vector<double>& s_hat,
                                     std::size_t top_d) {
  require(top_d >= 1, "mean_singular_value_pct_error: top_d must be positive");
  require(s_true.size() >= top_d && s_hat.size() >= top_d,
          "mean_singular_value_pct_error: both inputs need at least top_d entries");
  double acc = 0.0;
  for (std::size_t j = 0; j < top_d; ++j) {
    require(s_true[j] > 0.0,
            "mean_singular_value_pct_error: true singular values must be positive");
    acc += std::abs(s_hat[j] - s_true[j]) / s_true[j];
  }
  return 100.0 * acc / static_cast<double>(top_d);
}

double relative_frobenius_error(const Matrix& a, const Matrix& a_hat) {
  require(a.rows() == a_hat.rows() && a.cols() == a_hat.cols(),
          "relative_frobenius_error: shapes must match");
  Matrix diff(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) diff(i, j) = a(i, j) - a_hat(i, j);
  const double ref = frobenius_norm(a);
  require(ref > 0.0, "relative_frobenius_error: reference matrix must be nonzero");
  return frobenius_norm(diff) / ref;
}

double classification_accuracy(const std::vector<double>& y_true,
                               const std::vector<double>& y_hat) {
  require(y_true.size() == y_hat.size(),
          "classification_accuracy: inputs must have equal length");
  require(!y_true.empty(), "classification_accuracy: need at least one observation");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i)
    if (y_true[i] == y_hat[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

}  // namespace rdr
