#include "rdr/sdr.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rdr/knn.hpp"
#include "rdr/linalg.hpp"

namespace rdr {

namespace {

// Right-singular directions of W whose singular value falls at or below this
// fraction of the largest are numerically in the null space of W and are not
// eligible as eigendirections.
constexpr double kEdrGuardTol = 1e-10;

void check_finite(const std::vector<double>& y) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) {
      throw std::invalid_argument("response entry " + std::to_string(i) + " is not finite");
    }
  }
}

}  // namespace

std::pair<Matrix, std::vector<double>> center_columns(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n == 0) throw std::invalid_argument("cannot center an empty matrix");
  std::vector<double> means(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x(i, j);
    means[j] = acc / static_cast<double>(n);
  }
  Matrix centered(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) centered(i, j) = x(i, j) - means[j];
  }
  return {std::move(centered), std::move(means)};
}

SliceAssignment slice_response(const std::vector<double>& y, std::size_t num_slices,
                               bool categorical) {
  const std::size_t n = y.size();
  if (n == 0) throw std::invalid_argument("cannot slice an empty response");
  check_finite(y);

  SliceAssignment out;
  out.slice_of.assign(n, 0);

  if (categorical) {
    // One slice per distinct value, ordered by descending value so the layout
    // matches the quantitative convention.
    std::map<double, std::size_t, std::greater<double>> slot;
    for (double v : y) slot.emplace(v, 0);
    std::size_t h = 0;
    for (auto& kv : slot) kv.second = h++;
    out.num_slices = slot.size();
    out.sizes.assign(out.num_slices, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t s = slot.at(y[i]);
      out.slice_of[i] = s;
      ++out.sizes[s];
    }
    out.h_overridden = num_slices != 0 && num_slices != out.num_slices;
    return out;
  }

  if (num_slices == 0) throw std::invalid_argument("the slice count must be positive");
  if (num_slices > n) {
    throw std::invalid_argument("cannot form " + std::to_string(num_slices) + " slices from " +
                                std::to_string(n) + " samples");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Descending response; ties keep the original sample order.
  std::stable_sort(order.begin(), order.end(),
                   [&y](std::size_t a, std::size_t b) { return y[a] > y[b]; });

  out.num_slices = num_slices;
  out.sizes.assign(num_slices, n / num_slices);
  for (std::size_t h = 0; h < n % num_slices; ++h) ++out.sizes[h];

  std::size_t pos = 0;
  for (std::size_t h = 0; h < num_slices; ++h) {
    for (std::size_t c = 0; c < out.sizes[h]; ++c) out.slice_of[order[pos++]] = h;
  }
  return out;
}

GammaFactor build_gamma_sir(const Matrix& x, const SliceAssignment& slices) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (slices.slice_of.size() != n) {
    throw std::invalid_argument("slice assignment covers " +
                                std::to_string(slices.slice_of.size()) + " samples but X has " +
                                std::to_string(n) + " rows");
  }
  GammaFactor out;
  out.m = slices.num_slices;
  out.l = Matrix(p, slices.num_slices);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = slices.slice_of[i];
    const double* xi = x.row(i);
    for (std::size_t j = 0; j < p; ++j) out.l(j, h) += xi[j];
  }
  return out;
}

GammaFactor build_gamma_lsir(const Matrix& x, const SliceAssignment& slices, std::size_t k,
                             bool use_rp, RngStream& rng) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (slices.slice_of.size() != n) {
    throw std::invalid_argument("slice assignment covers " +
                                std::to_string(slices.slice_of.size()) + " samples but X has " +
                                std::to_string(n) + " rows");
  }
  if (k == 0) throw std::invalid_argument("the smoothing neighbor count must be positive");
  for (std::size_t h = 0; h < slices.num_slices; ++h) {
    if (slices.sizes[h] <= k) {
      throw std::invalid_argument("slice " + std::to_string(h) + " has " +
                                  std::to_string(slices.sizes[h]) +
                                  " samples; smoothing over k = " + std::to_string(k) +
                                  " neighbors needs at least k + 1");
    }
  }

  GammaFactor out;
  out.m = n;
  out.l = Matrix(p, n);

  for (std::size_t h = 0; h < slices.num_slices; ++h) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (slices.slice_of[i] == h) members.push_back(i);
    }
    const Matrix xh = x.rows_subset(members);
    RngStream slice_rng = rng.derive(h);
    const NeighborGraph graph =
        symmetrize(use_rp ? rp_knn(xh, k, slice_rng) : exact_knn(xh, k));
    for (std::size_t a = 0; a < members.size(); ++a) {
      const std::size_t gi = members[a];
      const double w = 1.0 / static_cast<double>(graph.k_h[a]);
      for (std::size_t b : graph.neighbors[a]) {
        const double* xb = xh.row(b);
        for (std::size_t j = 0; j < p; ++j) out.l(j, gi) += w * xb[j];
      }
    }
  }
  return out;
}

EdrModel generalized_edr(const GammaFactor& gamma, const Matrix& x, std::size_t r,
                         FitMode mode, const AdaptiveOptions& adaptive, RngStream& rng) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (gamma.l.rows() != p) {
    throw std::invalid_argument("the Gamma factor has " + std::to_string(gamma.l.rows()) +
                                " rows but X has " + std::to_string(p) + " columns");
  }

  // Gamma = U S^2 U^T through a factorization of L.
  Matrix u;
  std::vector<double> s;
  std::size_t d_star = 0;
  std::size_t t_star = 0;
  if (mode == FitMode::kExact) {
    const TruncatedSVD f = dense_svd(gamma.l);
    d_star = f.rank_est;
    if (d_star == 0) throw std::runtime_error("the Gamma factor is numerically zero");
    u = f.u.cols_range(0, d_star);
    s.assign(f.s.begin(), f.s.begin() + static_cast<std::ptrdiff_t>(d_star));
  } else {
    const TruncatedSVD f = adaptive_randomized_svd(gamma.l, adaptive, rng);
    d_star = f.rank_est;
    t_star = static_cast<std::size_t>(f.power_iters);
    u = f.u;
    s = f.s;
  }
  const double s_max = s.empty() ? 0.0 : s[0];
  for (std::size_t j = 0; j < d_star; ++j) {
    if (!(s[j] > kEdrGuardTol * s_max) || s[j] <= 0.0) {
      throw std::runtime_error("retained rank " + std::to_string(d_star) +
                               " overestimates the Gamma factor: singular value " +
                               std::to_string(j) + " is numerically zero");
    }
  }

  // W = X U S^-1; its smallest right-singular directions solve the
  // generalized problem restricted to the span of U.
  Matrix u_scaled = u;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < d_star; ++j) u_scaled(i, j) /= s[j];
  }
  const Matrix w = matmul(x, u_scaled);
  if (n < d_star) {
    throw std::runtime_error("X has fewer rows than the retained rank " +
                             std::to_string(d_star));
  }
  const TruncatedSVD fw = dense_svd(w);

  std::vector<std::size_t> eligible;  // descending singular value order
  const double w_max = fw.s.empty() ? 0.0 : fw.s[0];
  for (std::size_t j = 0; j < fw.s.size(); ++j) {
    if (fw.s[j] > kEdrGuardTol * w_max) eligible.push_back(j);
  }

  const std::size_t r_eff = r == 0 ? d_star : r;
  if (r_eff > d_star) {
    throw std::invalid_argument("requested " + std::to_string(r_eff) +
                                " directions but the Gamma factor supports only " +
                                std::to_string(d_star));
  }
  if (r_eff > eligible.size()) {
    throw std::runtime_error("only " + std::to_string(eligible.size()) +
                             " directions are numerically identifiable; " +
                             std::to_string(r_eff) + " were requested");
  }

  // Smallest eligible singular values, strongest direction first.
  Matrix e(d_star, r_eff);
  for (std::size_t c = 0; c < r_eff; ++c) {
    const std::size_t src = eligible[eligible.size() - 1 - c];
    for (std::size_t i = 0; i < d_star; ++i) e(i, c) = fw.v(i, src);
  }

  EdrModel model;
  model.g = matmul(u_scaled, e);
  for (std::size_t c = 0; c < r_eff; ++c) {
    double norm = 0.0;
    for (std::size_t i = 0; i < p; ++i) norm += model.g(i, c) * model.g(i, c);
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw std::runtime_error("produced a zero direction");
    for (std::size_t i = 0; i < p; ++i) model.g(i, c) /= norm;
  }
  model.r = r_eff;
  model.d_star = d_star;
  model.t_star = t_star;
  return model;
}

namespace {

double mean_of(const std::vector<double>& y) {
  double acc = 0.0;
  for (double v : y) acc += v;
  return acc / static_cast<double>(y.size());
}

}  // namespace

EdrModel fit_sir(const Matrix& x, const std::vector<double>& y, std::size_t num_slices,
                 const FitOptions& opts, RngStream& rng) {
  if (y.size() != x.rows()) {
    throw std::invalid_argument("X has " + std::to_string(x.rows()) + " rows but y has " +
                                std::to_string(y.size()) + " entries");
  }
  auto [xc, means] = center_columns(x);
  const SliceAssignment slices = slice_response(y, num_slices, opts.categorical_response);
  const GammaFactor gamma = build_gamma_sir(xc, slices);
  RngStream edr_rng = rng.derive("edr");
  EdrModel model = generalized_edr(gamma, xc, opts.r, opts.mode, opts.adaptive, edr_rng);
  model.method = EdrMethod::kSir;
  model.x_means = std::move(means);
  model.y_mean = opts.categorical_response ? 0.0 : mean_of(y);
  return model;
}

EdrModel fit_lsir(const Matrix& x, const std::vector<double>& y, std::size_t num_slices,
                  std::size_t k, const FitOptions& opts, RngStream& rng) {
  if (y.size() != x.rows()) {
    throw std::invalid_argument("X has " + std::to_string(x.rows()) + " rows but y has " +
                                std::to_string(y.size()) + " entries");
  }
  auto [xc, means] = center_columns(x);
  const SliceAssignment slices = slice_response(y, num_slices, opts.categorical_response);
  RngStream knn_rng = rng.derive("knn");
  const GammaFactor gamma = build_gamma_lsir(xc, slices, k, opts.use_rp_knn, knn_rng);
  RngStream edr_rng = rng.derive("edr");
  EdrModel model = generalized_edr(gamma, xc, opts.r, opts.mode, opts.adaptive, edr_rng);
  model.method = EdrMethod::kLsir;
  model.x_means = std::move(means);
  model.y_mean = opts.categorical_response ? 0.0 : mean_of(y);
  return model;
}

EdrModel fit_pca(const Matrix& x, const FitOptions& opts, RngStream& rng) {
  auto [xc, means] = center_columns(x);
  EdrModel model;
  if (opts.mode == FitMode::kExact) {
    const TruncatedSVD f = dense_svd(xc);
    model.d_star = f.rank_est;
    if (model.d_star == 0) throw std::runtime_error("X is numerically zero after centering");
    const std::size_t r_eff = opts.r == 0 ? model.d_star : opts.r;
    if (r_eff > model.d_star) {
      throw std::invalid_argument("requested " + std::to_string(r_eff) +
                                  " components but X supports only " +
                                  std::to_string(model.d_star));
    }
    model.g = f.v.cols_range(0, r_eff);
    model.r = r_eff;
  } else {
    RngStream edr_rng = rng.derive("edr");
    AdaptiveOptions adaptive = opts.adaptive;
    if (opts.r != 0 && !adaptive.fixed_d.has_value()) adaptive.fixed_d = opts.r;
    const TruncatedSVD f = adaptive_randomized_svd(xc, adaptive, edr_rng);
    model.d_star = f.rank_est;
    model.t_star = static_cast<std::size_t>(f.power_iters);
    const std::size_t r_eff = opts.r == 0 ? model.d_star : opts.r;
    if (r_eff > model.d_star) {
      throw std::invalid_argument("requested " + std::to_string(r_eff) +
                                  " components but the factorization kept only " +
                                  std::to_string(model.d_star));
    }
    model.g = f.v.cols_range(0, r_eff);
    model.r = r_eff;
  }
  model.method = EdrMethod::kPca;
  model.x_means = std::move(means);
  model.y_mean = 0.0;
  return model;
}

Matrix transform(const EdrModel& model, const Matrix& x_new, TransformCentering centering) {
  if (x_new.cols() != model.g.rows()) {
    throw std::invalid_argument("new data has " + std::to_string(x_new.cols()) +
                                " columns but the model expects " +
                                std::to_string(model.g.rows()));
  }
  if (centering == TransformCentering::kSelf) {
    auto [xc, means] = center_columns(x_new);
    (void)means;
    return matmul(xc, model.g);
  }
  if (model.x_means.size() != x_new.cols()) {
    throw std::invalid_argument("the model carries no training means for train centering");
  }
  Matrix xc(x_new.rows(), x_new.cols());
  for (std::size_t i = 0; i < x_new.rows(); ++i) {
    for (std::size_t j = 0; j < x_new.cols(); ++j) xc(i, j) = x_new(i, j) - model.x_means[j];
  }
  return matmul(xc, model.g);
}

}  // namespace rdr
