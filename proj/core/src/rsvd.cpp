#include "rdr/rsvd.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "rdr/select.hpp"

namespace rdr {

namespace {

void check_width(const Matrix& x, std::size_t ell) {
  const std::size_t min_dim = std::min(x.rows(), x.cols());
  if (ell == 0) throw std::invalid_argument("power block width must be positive");
  if (ell > min_dim) {
    throw std::invalid_argument("power block width " + std::to_string(ell) +
                                " exceeds min(n, p) = " + std::to_string(min_dim));
  }
}

}  // namespace

PowerBlockSequence power_blocks(const Matrix& x, std::size_t ell, std::size_t t_max,
                                RngStream& rng, bool normalized) {
  check_width(x, ell);
  if (t_max < 1) throw std::invalid_argument("t_max must be at least 1");
  PowerBlockSequence seq;
  seq.ell = ell;
  seq.normalized = normalized;
  seq.blocks.reserve(t_max);
  Matrix f = gaussian_matrix(x.rows(), ell, rng);
  if (normalized) f = qr_orthonormalize(f, DeficiencyPolicy::kComplete, &rng);
  for (std::size_t t = 1; t <= t_max; ++t) {
    if (normalized) {
      const Matrix g = qr_orthonormalize(matmul_tn(x, f), DeficiencyPolicy::kComplete, &rng);
      f = qr_orthonormalize(matmul(x, g), DeficiencyPolicy::kComplete, &rng);
    } else {
      f = matmul(x, matmul_tn(x, f));
    }
    seq.blocks.push_back(f);
  }
  return seq;
}

Matrix power_block_basis(const Matrix& x, std::size_t ell, std::size_t t, RngStream& rng) {
  check_width(x, ell);
  if (t < 1) throw std::invalid_argument("iteration count must be at least 1");
  Matrix f = qr_orthonormalize(gaussian_matrix(x.rows(), ell, rng),
                               DeficiencyPolicy::kComplete, &rng);
  for (std::size_t step = 0; step < t; ++step) {
    const Matrix g = qr_orthonormalize(matmul_tn(x, f), DeficiencyPolicy::kComplete, &rng);
    f = qr_orthonormalize(matmul(x, g), DeficiencyPolicy::kComplete, &rng);
  }
  return f;
}

TruncatedSVD randomized_svd_fixed(const Matrix& x, std::size_t d, std::size_t delta,
                                  std::size_t t, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("target rank must be at least 1");
  if (x.rows() > x.cols()) {
    TruncatedSVD f = randomized_svd_fixed(transpose(x), d, delta, t, rng);
    std::swap(f.u, f.v);
    return f;
  }
  const std::size_t ell = d + delta;
  check_width(x, ell);
  const Matrix q = power_block_basis(x, ell, t, rng);
  const Matrix b = matmul_tn(x, q);  // p x ell
  const TruncatedSVD fb = dense_svd(b);
  TruncatedSVD out;
  out.u = matmul(q, fb.v.cols_range(0, d));
  out.v = fb.u.cols_range(0, d);
  out.s.assign(fb.s.begin(), fb.s.begin() + static_cast<std::ptrdiff_t>(d));
  out.rank_est = d;
  out.power_iters = static_cast<int>(t);
  return out;
}

TruncatedSVD adaptive_randomized_svd(const Matrix& x, const AdaptiveOptions& opts,
                                     RngStream& rng) {
  return adaptive_randomized_svd(x, opts, rng, nullptr);
}

TruncatedSVD adaptive_randomized_svd(const Matrix& x, const AdaptiveOptions& opts,
                                     RngStream& rng, AdaptiveSvdDiagnostics* diagnostics) {
  if (x.rows() > x.cols()) {
    TruncatedSVD f = adaptive_randomized_svd(transpose(x), opts, rng, diagnostics);
    std::swap(f.u, f.v);
    return f;
  }
  const std::size_t min_dim = std::min(x.rows(), x.cols());
  std::size_t d_max = opts.d_max;
  if (d_max == 0) {
    d_max = min_dim > opts.delta + 3 ? min_dim - opts.delta
                                     : std::max<std::size_t>(1, min_dim - 1);
  }
  d_max = std::min(d_max, min_dim);
  const std::size_t delta_sel = std::min(opts.delta, min_dim - std::min(d_max, min_dim - 1));

  if (diagnostics) *diagnostics = AdaptiveSvdDiagnostics{d_max, {}, {}};
  std::size_t t_star = 0, d_star = 0;
  if (opts.fixed_t && opts.fixed_d) {
    t_star = *opts.fixed_t;
    d_star = *opts.fixed_d;
  } else if (opts.fixed_d) {
    RngStream sel_rng = rng.derive("select");
    const Selection sel =
        select_t_d(x, opts.t_max, d_max, delta_sel, sel_rng, opts.reuse_partition);
    t_star = sel.t_star;
    d_star = *opts.fixed_d;
    if (diagnostics) diagnostics->bicv = sel.reports;
  } else if (opts.fixed_t) {
    t_star = *opts.fixed_t;
    if (d_max >= 4) {
      RngStream stab_rng = rng.derive("stability");
      StabilityProfile profile =
          stability_scores(x, t_star, d_max, opts.num_projections, stab_rng);
      d_star = change_point_rank(profile);
      if (diagnostics) diagnostics->stability_scores = profile.scores;
    } else {
      d_star = d_max;  // too thin for a change point; keep the full width
    }
  } else {
    RngStream sel_rng = rng.derive("select");
    const Selection sel =
        select_t_d(x, opts.t_max, d_max, delta_sel, sel_rng, opts.reuse_partition);
    t_star = sel.t_star;
    d_star = sel.d_star;
    if (diagnostics) diagnostics->bicv = sel.reports;
  }

  d_star = std::min(std::max<std::size_t>(d_star, 1), min_dim);
  const std::size_t delta_fit = std::min(opts.delta, min_dim - d_star);
  RngStream fit_rng = rng.derive("factor");
  return randomized_svd_fixed(x, d_star, delta_fit, t_star, fit_rng);
}

}  // namespace rdr
