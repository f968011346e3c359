#include "rdr/lpp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rdr/linalg.hpp"
#include "rdr/select.hpp"
#include "rdr/stats.hpp"

namespace rdr {

namespace {

// Image directions whose cosine with D^{1/2} 1 reaches this value are treated
// as the trivial constant solution and excluded.
constexpr double kTrivialCosine = 0.999;
// Metric eigenvalues at or below this fraction of the largest are outside the
// numerically safe span of the pencil.
constexpr double kMetricTol = 1e-12;

double edge_distance(const Matrix& x, std::size_t i, std::size_t j) {
  double acc = 0.0;
  const double* a = x.row(i);
  const double* b = x.row(j);
  for (std::size_t c = 0; c < x.cols(); ++c) {
    const double d = a[c] - b[c];
    acc += d * d;
  }
  return std::sqrt(acc);
}

// State shared by the pencil solves: the centered data, the affinity graph,
// and the degree scaling.
struct PencilData {
  const Matrix& xc;
  const HeatKernelGraph& graph;
  std::vector<double> dsqrt;  // sqrt(D_ii)
};

// Gamma~ Z = X^T (W (X Z)) for a p x c block.
Matrix apply_gamma(const PencilData& data, const Matrix& z) {
  return matmul_tn(data.xc, apply_weights(data.graph, matmul(data.xc, z)));
}

Matrix scale_rows(const Matrix& m, const std::vector<double>& factors) {
  Matrix out = m;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) *= factors[i];
  }
  return out;
}

// Orthonormal p x width basis after t symmetric power applications of Gamma~.
Matrix gamma_power_basis(const PencilData& data, std::size_t width, std::size_t t,
                         RngStream& rng) {
  Matrix f = qr_orthonormalize(gaussian_matrix(data.xc.cols(), width, rng),
                               DeficiencyPolicy::kComplete, &rng);
  for (std::size_t step = 0; step < t; ++step) {
    f = qr_orthonormalize(apply_gamma(data, f), DeficiencyPolicy::kComplete, &rng);
  }
  return f;
}

// Eigenbasis of Gamma~ seen through one random projection of the given width,
// columns ordered by descending |eigenvalue| (the order power iteration
// favors, which is what must be stable across projections).
Matrix projected_gamma_eigenbasis(const PencilData& data, std::size_t width, std::size_t t,
                                  RngStream& rng) {
  const Matrix q = gamma_power_basis(data, width, t, rng);
  Matrix m = matmul_tn(q, apply_gamma(data, q));
  for (std::size_t i = 0; i < width; ++i) {
    for (std::size_t j = i + 1; j < width; ++j) {
      const double avg = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = avg;
      m(j, i) = avg;
    }
  }
  const SymmetricEig eig = symmetric_eig(m);
  std::vector<std::size_t> order(width);
  for (std::size_t i = 0; i < width; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&eig](std::size_t a, std::size_t b) {
    return std::fabs(eig.values[a]) > std::fabs(eig.values[b]);
  });
  Matrix sorted(width, width);
  for (std::size_t c = 0; c < width; ++c) {
    for (std::size_t i = 0; i < width; ++i) sorted(i, c) = eig.vectors(i, order[c]);
  }
  return matmul(q, sorted);
}

// Stability change point for the rank of Gamma~, mirroring the data-matrix
// selector but with eigenbases drawn from the symmetric operator.
std::size_t gamma_stability_rank(const PencilData& data, std::size_t t, std::size_t d_max,
                                 std::size_t num_projections, RngStream& rng) {
  std::vector<Matrix> bases;
  bases.reserve(num_projections);
  for (std::size_t b = 0; b < num_projections; ++b) {
    RngStream b_rng = rng.derive(b);
    bases.push_back(projected_gamma_eigenbasis(data, d_max, t, b_rng));
  }
  StabilityProfile profile;
  profile.t = t;
  profile.num_projections = num_projections;
  profile.scores.assign(d_max, 0.0);
  const double num_pairs =
      0.5 * static_cast<double>(num_projections) * static_cast<double>(num_projections - 1);
  for (std::size_t k = 0; k < d_max; ++k) {
    double acc = 0.0;
    for (std::size_t b1 = 0; b1 < num_projections; ++b1) {
      for (std::size_t b2 = b1 + 1; b2 < num_projections; ++b2) {
        acc += std::fabs(
            spearman_correlation(bases[b1].col_vector(k), bases[b2].col_vector(k)));
      }
    }
    profile.scores[k] = acc / num_pairs;
  }
  return change_point_rank(profile);
}

struct PencilSolution {
  std::vector<double> mu;  // descending, over the safe span of the basis
  Matrix directions;       // p x |mu|, unnormalized
  std::vector<bool> trivial;
};

// Dense solve of (Q^T Gamma~ Q, Q^T Sigma~ Q) for an orthonormal-column basis
// Q, whitening the metric and flagging near-constant image directions.
PencilSolution solve_projected_pencil(const PencilData& data, const Matrix& q) {
  const std::size_t m = q.cols();
  const Matrix t = matmul(data.xc, q);  // n x m
  Matrix a = matmul_tn(t, apply_weights(data.graph, t));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double avg = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = avg;
      a(j, i) = avg;
    }
  }
  const Matrix t_tilde = scale_rows(t, data.dsqrt);
  const Matrix b = matmul_tn(t_tilde, t_tilde);

  const SymmetricEig eb = symmetric_eig(b);
  std::size_t keep = 0;
  while (keep < m && eb.values[keep] > kMetricTol * eb.values[0]) ++keep;
  if (keep == 0) throw std::runtime_error("the pencil metric is numerically zero");
  // R = E diag(1/sqrt(lambda)): columns whiten the metric on the safe span.
  Matrix r_mat(m, keep);
  for (std::size_t j = 0; j < keep; ++j) {
    const double inv = 1.0 / std::sqrt(eb.values[j]);
    for (std::size_t i = 0; i < m; ++i) r_mat(i, j) = eb.vectors(i, j) * inv;
  }

  Matrix mw(keep, keep);
  {
    const Matrix ar = matmul(a, r_mat);
    Matrix raw = matmul_tn(r_mat, ar);
    for (std::size_t i = 0; i < keep; ++i) {
      for (std::size_t j = i; j < keep; ++j) {
        const double avg = 0.5 * (raw(i, j) + raw(j, i));
        mw(i, j) = avg;
        mw(j, i) = avg;
      }
    }
  }
  const SymmetricEig em = symmetric_eig(mw);

  PencilSolution sol;
  sol.mu = em.values;
  sol.directions = matmul(q, matmul(r_mat, em.vectors));
  const Matrix images = matmul(t_tilde, matmul(r_mat, em.vectors));  // X~ e per column
  double d_norm = 0.0;
  for (double v : data.dsqrt) d_norm += v * v;
  d_norm = std::sqrt(d_norm);
  sol.trivial.assign(keep, false);
  for (std::size_t c = 0; c < keep; ++c) {
    double dot = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < images.rows(); ++i) {
      dot += images(i, c) * data.dsqrt[i];
      norm += images(i, c) * images(i, c);
    }
    norm = std::sqrt(norm);
    if (norm > 0.0 && std::fabs(dot) / (norm * d_norm) >= kTrivialCosine) {
      sol.trivial[c] = true;
    }
  }
  return sol;
}

}  // namespace

HeatKernelGraph heat_kernel_graph(const Matrix& x, std::size_t k, double b, RngStream& rng,
                                  bool use_rp, bool squared) {
  const std::size_t n = x.rows();
  if (b < 0.0) throw std::invalid_argument("the bandwidth must be positive (or 0 for auto)");
  HeatKernelGraph out;
  out.pattern = symmetrize(use_rp ? rp_knn(x, k, rng) : exact_knn(x, k));
  out.squared = squared;

  // Unsquared edge distances; also the pool the default bandwidth is drawn
  // from.
  std::vector<std::vector<double>> dists(n);
  std::vector<double> pool;
  for (std::size_t i = 0; i < n; ++i) {
    dists[i].reserve(out.pattern.neighbors[i].size());
    for (std::size_t j : out.pattern.neighbors[i]) {
      const double d = i == j ? 0.0 : edge_distance(x, i, j);
      dists[i].push_back(d);
      // The bandwidth divides d (or d^2), so the default must be drawn on the
      // same scale.
      if (j > i) pool.push_back(squared ? d * d : d);
    }
  }
  if (b == 0.0) {
    std::sort(pool.begin(), pool.end());
    const std::size_t m = pool.size();
    const double median =
        m % 2 == 1 ? pool[m / 2] : 0.5 * (pool[m / 2 - 1] + pool[m / 2]);
    // All-coincident data has median 0; any bandwidth then gives unit weights.
    b = median > 0.0 ? median : 1.0;
  }
  out.bandwidth = b;

  out.weights.assign(n, {});
  out.degree.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out.weights[i].reserve(dists[i].size());
    for (std::size_t a = 0; a < dists[i].size(); ++a) {
      const bool self = out.pattern.neighbors[i][a] == i;
      const double d = dists[i][a];
      const double w = self ? 0.0 : std::exp(-(squared ? d * d : d) / b);
      out.weights[i].push_back(w);
      out.degree[i] += w;
    }
    if (!(out.degree[i] > 0.0)) {
      throw std::runtime_error("node " + std::to_string(i) +
                               " has zero total edge weight; increase k or the bandwidth");
    }
  }
  return out;
}

Matrix apply_weights(const HeatKernelGraph& graph, const Matrix& z) {
  const std::size_t n = graph.pattern.n;
  if (z.rows() != n) {
    throw std::invalid_argument("weight application: expected " + std::to_string(n) +
                                " rows, got " + std::to_string(z.rows()));
  }
  Matrix out(n, z.cols());
  for (std::size_t i = 0; i < n; ++i) {
    double* oi = out.row(i);
    for (std::size_t a = 0; a < graph.pattern.neighbors[i].size(); ++a) {
      const double w = graph.weights[i][a];
      if (w == 0.0) continue;
      const double* zj = z.row(graph.pattern.neighbors[i][a]);
      for (std::size_t c = 0; c < z.cols(); ++c) oi[c] += w * zj[c];
    }
  }
  return out;
}

LppFit fit_lpp_full(const Matrix& x, std::size_t k, double b, const FitOptions& opts,
                    RngStream& rng, bool squared, bool center) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();

  Matrix xc;
  std::vector<double> means(p, 0.0);
  if (center) {
    auto centered = center_columns(x);
    xc = std::move(centered.first);
    means = std::move(centered.second);
  } else {
    xc = x;
  }

  RngStream graph_rng = rng.derive("knn");
  const HeatKernelGraph graph =
      heat_kernel_graph(xc, k, b, graph_rng, opts.use_rp_knn, squared);
  PencilData data{xc, graph, {}};
  data.dsqrt.resize(n);
  for (std::size_t i = 0; i < n; ++i) data.dsqrt[i] = std::sqrt(graph.degree[i]);

  Matrix basis;
  std::size_t d_star = 0;
  std::size_t t_star = 0;
  if (opts.mode == FitMode::kExact) {
    const Matrix x_tilde = scale_rows(xc, data.dsqrt);
    const TruncatedSVD f = dense_svd(x_tilde);
    d_star = f.rank_est;
    if (d_star == 0) throw std::runtime_error("X is numerically zero after centering");
    basis = f.v.cols_range(0, d_star);
  } else {
    const std::size_t m_dim = std::min(n, p);
    const AdaptiveOptions& ad = opts.adaptive;
    t_star = ad.fixed_t.value_or(3);
    if (t_star < 1) throw std::invalid_argument("the iteration count must be at least 1");
    if (ad.fixed_d) {
      d_star = *ad.fixed_d;
    } else {
      std::size_t d_max = ad.d_max != 0 ? std::min(ad.d_max, m_dim)
                          : m_dim > ad.delta + 3
                              ? m_dim - ad.delta
                              : std::max<std::size_t>(1, m_dim - 1);
      if (d_max >= 4) {
        RngStream stab_rng = rng.derive("stability");
        d_star = gamma_stability_rank(data, t_star, d_max, ad.num_projections, stab_rng);
      } else {
        d_star = d_max;
      }
    }
    d_star = std::min(std::max<std::size_t>(d_star, 1), m_dim);
    const std::size_t ell = std::min(d_star + ad.delta, p);

    RngStream fac_rng = rng.derive("factor");
    const Matrix q = gamma_power_basis(data, ell, t_star, fac_rng);
    // Rank-d_star eigenbasis of Gamma~ within the captured subspace.
    Matrix m = matmul_tn(q, apply_gamma(data, q));
    for (std::size_t i = 0; i < ell; ++i) {
      for (std::size_t j = i + 1; j < ell; ++j) {
        const double avg = 0.5 * (m(i, j) + m(j, i));
        m(i, j) = avg;
        m(j, i) = avg;
      }
    }
    const SymmetricEig eig = symmetric_eig(m);
    std::vector<std::size_t> order(ell);
    for (std::size_t i = 0; i < ell; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&eig](std::size_t i, std::size_t j) {
      return std::fabs(eig.values[i]) > std::fabs(eig.values[j]);
    });
    Matrix top(ell, d_star);
    for (std::size_t c = 0; c < d_star; ++c) {
      for (std::size_t i = 0; i < ell; ++i) top(i, c) = eig.vectors(i, order[c]);
    }
    basis = matmul(q, top);
  }

  const PencilSolution sol = solve_projected_pencil(data, basis);

  LppFit fit;
  fit.mu = sol.mu;
  std::vector<std::size_t> chosen;
  for (std::size_t c = 0; c < sol.mu.size(); ++c) {
    if (sol.trivial[c]) {
      ++fit.num_excluded;
      continue;
    }
    chosen.push_back(c);
  }
  const std::size_t r_eff = opts.r == 0 ? chosen.size() : opts.r;
  if (r_eff > chosen.size()) {
    throw std::runtime_error("only " + std::to_string(chosen.size()) +
                             " non-trivial directions are available; " +
                             std::to_string(r_eff) + " were requested");
  }

  EdrModel& model = fit.model;
  model.g = Matrix(p, r_eff);
  for (std::size_t c = 0; c < r_eff; ++c) {
    double norm = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double v = sol.directions(i, chosen[c]);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw std::runtime_error("produced a zero direction");
    for (std::size_t i = 0; i < p; ++i) model.g(i, c) = sol.directions(i, chosen[c]) / norm;
  }
  model.method = EdrMethod::kLpp;
  model.r = r_eff;
  model.d_star = d_star;
  model.t_star = t_star;
  model.x_means = std::move(means);
  model.y_mean = 0.0;
  return fit;
}

EdrModel fit_lpp(const Matrix& x, std::size_t k, double b, const FitOptions& opts,
                 RngStream& rng, bool squared) {
  return fit_lpp_full(x, k, b, opts, rng, squared, /*center=*/true).model;
}

}  // namespace rdr
