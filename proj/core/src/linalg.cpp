#include "rdr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rdr/rng.hpp"

namespace rdr {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// c*a + s*b = r >= 0,  -s*a + c*b = 0.
void make_givens(double a, double b, double& c, double& s, double& r) {
  r = std::hypot(a, b);
  if (r == 0.0) {
    c = 1.0;
    s = 0.0;
  } else {
    c = a / r;
    s = b / r;
  }
}

void rotate_rows(Matrix& m, std::size_t r1, std::size_t r2, double c, double s) {
  double* a = m.row(r1);
  double* b = m.row(r2);
  const std::size_t n = m.cols();
  for (std::size_t j = 0; j < n; ++j) {
    const double x = a[j];
    const double y = b[j];
    a[j] = c * x + s * y;
    b[j] = -s * x + c * y;
  }
}

double segment_norm(const double* x, std::size_t len) {
  double mx = 0.0;
  for (std::size_t i = 0; i < len; ++i) mx = std::max(mx, std::fabs(x[i]));
  if (mx == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double v = x[i] / mx;
    acc += v * v;
  }
  return mx * std::sqrt(acc);
}

}  // namespace

Matrix qr_orthonormalize(const Matrix& a, DeficiencyPolicy policy, RngStream* fill_rng) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m == 0 || n == 0) throw std::invalid_argument("qr_orthonormalize: empty input");
  if (n > m) {
    throw std::invalid_argument("qr_orthonormalize: more columns (" + std::to_string(n) +
                                ") than rows (" + std::to_string(m) + ")");
  }
  // Work on the transpose so every reflector touches contiguous memory.
  Matrix at = transpose(a);
  double scale = 0.0;
  for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, segment_norm(at.row(j), m));
  std::vector<double> taus(n, 0.0);

  for (std::size_t j = 0; j < n; ++j) {
    double* cj = at.row(j);
    double sigma = segment_norm(cj + j, m - j);
    if (sigma <= kQrRankTol * scale) {
      if (policy == DeficiencyPolicy::kError) {
        throw std::invalid_argument(
            "qr_orthonormalize: column " + std::to_string(j) +
            " is numerically dependent on earlier columns (residual norm " +
            std::to_string(sigma) + ")");
      }
      if (fill_rng == nullptr) {
        taus[j] = 0.0;  // no reflector; Q gets an arbitrary orthogonal completion
        continue;
      }
      // A reflected Gaussian is still Gaussian, so drawing in the working
      // frame gives a random direction orthogonalized against the others.
      for (std::size_t t = j; t < m; ++t) cj[t] = fill_rng->normal();
      sigma = segment_norm(cj + j, m - j);
    }
    const double x0 = cj[j];
    const double beta = -std::copysign(sigma, x0);
    const double v0 = x0 - beta;
    taus[j] = (beta - x0) / beta;
    const double inv = 1.0 / v0;
    for (std::size_t t = j + 1; t < m; ++t) cj[t] *= inv;
    cj[j] = beta;
    for (std::size_t c = j + 1; c < n; ++c) {
      double* cc = at.row(c);
      double acc = cc[j];
      for (std::size_t t = j + 1; t < m; ++t) acc += cj[t] * cc[t];
      acc *= taus[j];
      cc[j] -= acc;
      for (std::size_t t = j + 1; t < m; ++t) cc[t] -= acc * cj[t];
    }
  }

  // Back-accumulate the thin Q (rows of qt are columns of Q).
  Matrix qt(n, m);
  for (std::size_t j = 0; j < n; ++j) qt(j, j) = 1.0;
  for (std::size_t jj = n; jj-- > 0;) {
    if (taus[jj] == 0.0) continue;
    const double* vj = at.row(jj);
    for (std::size_t c = 0; c < n; ++c) {
      double* qc = qt.row(c);
      double acc = qc[jj];
      for (std::size_t t = jj + 1; t < m; ++t) acc += vj[t] * qc[t];
      acc *= taus[jj];
      qc[jj] -= acc;
      for (std::size_t t = jj + 1; t < m; ++t) qc[t] -= acc * vj[t];
    }
  }
  // Normalize signs so the implied R has a nonnegative diagonal; this makes
  // the factorization unique for full-rank inputs (and Q(I) == I).
  for (std::size_t j = 0; j < n; ++j) {
    if (taus[j] != 0.0 && at(j, j) < 0.0) {
      double* qj = qt.row(j);
      for (std::size_t t = 0; t < m; ++t) qj[t] = -qj[t];
    }
  }
  return transpose(qt);
}

namespace {

struct BidiagResult {
  std::vector<double> d;      // diagonal
  std::vector<double> e;      // superdiagonal
  Matrix ut;                  // n x m, rows are left vectors
  Matrix vt;                  // n x n, rows are right vectors
};

// Householder bidiagonalization of w (m x n, m >= n), with accumulation of
// the thin transforms.
BidiagResult bidiagonalize(Matrix w) {
  const std::size_t m = w.rows(), n = w.cols();
  std::vector<double> d(n, 0.0), e(n > 1 ? n - 1 : 0, 0.0);
  std::vector<double> tau_l(n, 0.0), tau_r(n, 0.0);

  for (std::size_t j = 0; j < n; ++j) {
    // Left reflector on column j, rows j..m-1.
    {
      double mx = 0.0;
      for (std::size_t i = j; i < m; ++i) mx = std::max(mx, std::fabs(w(i, j)));
      double sigma = 0.0;
      if (mx > 0.0) {
        for (std::size_t i = j; i < m; ++i) {
          const double v = w(i, j) / mx;
          sigma += v * v;
        }
        sigma = mx * std::sqrt(sigma);
      }
      if (sigma == 0.0) {
        d[j] = 0.0;
        tau_l[j] = 0.0;
      } else {
        const double x0 = w(j, j);
        const double beta = -std::copysign(sigma, x0);
        const double v0 = x0 - beta;
        tau_l[j] = (beta - x0) / beta;
        const double inv = 1.0 / v0;
        for (std::size_t i = j + 1; i < m; ++i) w(i, j) *= inv;
        d[j] = beta;
        for (std::size_t c = j + 1; c < n; ++c) {
          double acc = w(j, c);
          for (std::size_t i = j + 1; i < m; ++i) acc += w(i, j) * w(i, c);
          acc *= tau_l[j];
          w(j, c) -= acc;
          for (std::size_t i = j + 1; i < m; ++i) w(i, c) -= acc * w(i, j);
        }
      }
    }
    if (j + 2 < n) {
      // Right reflector on row j, columns j+1..n-1.
      double* rj = w.row(j);
      const double sigma = segment_norm(rj + j + 1, n - j - 1);
      if (sigma == 0.0) {
        e[j] = 0.0;
        tau_r[j] = 0.0;
      } else {
        const double x0 = rj[j + 1];
        const double beta = -std::copysign(sigma, x0);
        const double v0 = x0 - beta;
        tau_r[j] = (beta - x0) / beta;
        const double inv = 1.0 / v0;
        for (std::size_t c = j + 2; c < n; ++c) rj[c] *= inv;
        e[j] = beta;
        for (std::size_t i = j + 1; i < m; ++i) {
          double* ri = w.row(i);
          double acc = ri[j + 1];
          for (std::size_t c = j + 2; c < n; ++c) acc += rj[c] * ri[c];
          acc *= tau_r[j];
          ri[j + 1] -= acc;
          for (std::size_t c = j + 2; c < n; ++c) ri[c] -= acc * rj[c];
        }
      }
    } else if (j + 1 < n) {
      e[j] = w(j, j + 1);
      tau_r[j] = 0.0;
    }
  }

  // Accumulate left transform: rows of ut are the columns of the thin U.
  Matrix ut(n, m);
  for (std::size_t j = 0; j < n; ++j) ut(j, j) = 1.0;
  std::vector<double> scratch(m);
  for (std::size_t jj = n; jj-- > 0;) {
    if (tau_l[jj] == 0.0) continue;
    scratch[0] = 1.0;
    for (std::size_t i = jj + 1; i < m; ++i) scratch[i - jj] = w(i, jj);
    const std::size_t len = m - jj;
    for (std::size_t r = 0; r < n; ++r) {
      double* ur = ut.row(r) + jj;
      double acc = 0.0;
      for (std::size_t t = 0; t < len; ++t) acc += ur[t] * scratch[t];
      acc *= tau_l[jj];
      for (std::size_t t = 0; t < len; ++t) ur[t] -= acc * scratch[t];
    }
  }

  // Accumulate right transform: rows of vt are the columns of V.
  Matrix vt = Matrix::identity(n);
  if (n >= 3) {
    for (std::size_t jj = n - 2; jj-- > 0;) {
      if (tau_r[jj] == 0.0) continue;
      const double* rj = w.row(jj);
      const std::size_t base = jj + 1;
      const std::size_t len = n - base;
      scratch[0] = 1.0;
      for (std::size_t c = base + 1; c < n; ++c) scratch[c - base] = rj[c];
      for (std::size_t r = 0; r < n; ++r) {
        double* vr = vt.row(r) + base;
        double acc = 0.0;
        for (std::size_t t = 0; t < len; ++t) acc += vr[t] * scratch[t];
        acc *= tau_r[jj];
        for (std::size_t t = 0; t < len; ++t) vr[t] -= acc * scratch[t];
      }
    }
  }
  return BidiagResult{std::move(d), std::move(e), std::move(ut), std::move(vt)};
}

// One implicit-shift QR sweep on the bidiagonal block [l..k].
void golub_kahan_step(std::vector<double>& d, std::vector<double>& e, std::size_t l,
                      std::size_t k, Matrix& ut, Matrix& vt) {
  const double dk = d[k], dk1 = d[k - 1], ek1 = e[k - 1];
  const double ek2 = (k >= 2 && k - 1 > l) ? e[k - 2] : 0.0;
  const double t11 = dk1 * dk1 + ek2 * ek2;
  const double t22 = dk * dk + ek1 * ek1;
  const double t12 = dk1 * ek1;
  const double delta = 0.5 * (t11 - t22);
  double mu;
  if (t12 == 0.0) {
    mu = t22;
  } else {
    const double denom = delta + std::copysign(std::hypot(delta, t12), delta == 0.0 ? 1.0 : delta);
    mu = t22 - (t12 * t12) / denom;
  }
  double y = d[l] * d[l] - mu;
  double z = d[l] * e[l];
  double c, s, r;
  for (std::size_t i = l; i < k; ++i) {
    make_givens(y, z, c, s, r);
    if (i > l) e[i - 1] = r;
    // Right rotation of columns (i, i+1).
    const double f1 = c * d[i] + s * e[i];
    const double f2 = -s * d[i] + c * e[i];
    const double g1 = s * d[i + 1];  // bulge below the diagonal
    const double g2 = c * d[i + 1];
    d[i] = f1;
    e[i] = f2;
    d[i + 1] = g2;
    rotate_rows(vt, i, i + 1, c, s);
    // Left rotation of rows (i, i+1) clearing the bulge.
    make_givens(d[i], g1, c, s, r);
    d[i] = r;
    const double h1 = c * e[i] + s * d[i + 1];
    const double h2 = -s * e[i] + c * d[i + 1];
    e[i] = h1;
    d[i + 1] = h2;
    if (i + 1 < k) {
      const double b2 = s * e[i + 1];
      e[i + 1] = c * e[i + 1];
      y = e[i];
      z = b2;
    }
    rotate_rows(ut, i, i + 1, c, s);
  }
}

}  // namespace

TruncatedSVD dense_svd(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("dense_svd: empty input");
  const std::size_t mind = std::min(a.rows(), a.cols());
  if (mind > kDenseSvdMaxDim) {
    throw std::invalid_argument("dense_svd: min dimension " + std::to_string(mind) +
                                " exceeds the dense solver bound " +
                                std::to_string(kDenseSvdMaxDim));
  }
  const bool flipped = a.rows() < a.cols();
  BidiagResult b = bidiagonalize(flipped ? transpose(a) : a);
  std::vector<double>& d = b.d;
  std::vector<double>& e = b.e;
  const std::size_t n = d.size();

  double bnorm = 0.0;
  for (double v : d) bnorm = std::max(bnorm, std::fabs(v));
  for (double v : e) bnorm = std::max(bnorm, std::fabs(v));

  const int cap = kSvdSweepCapPerDim * static_cast<int>(n);
  int sweeps = 0;
  std::size_t k = n > 0 ? n - 1 : 0;
  while (k > 0) {
    for (std::size_t i = 0; i < k; ++i) {
      if (std::fabs(e[i]) <= kEps * (std::fabs(d[i]) + std::fabs(d[i + 1]))) e[i] = 0.0;
    }
    if (e[k - 1] == 0.0) {
      --k;
      continue;
    }
    std::size_t l = k - 1;
    while (l > 0 && e[l - 1] != 0.0) --l;

    // A negligible diagonal inside the block is rotated away explicitly.
    bool rotated_out = false;
    for (std::size_t i = l; i <= k; ++i) {
      if (std::fabs(d[i]) <= kEps * bnorm) {
        d[i] = 0.0;
        if (i < k) {
          double f = e[i];
          e[i] = 0.0;
          for (std::size_t j = i + 1; j <= k; ++j) {
            double c, s, r;
            make_givens(d[j], f, c, s, r);
            d[j] = r;
            if (j < k) {
              f = -s * e[j];
              e[j] = c * e[j];
            }
            rotate_rows(b.ut, j, i, c, s);
          }
        } else {
          double f = e[k - 1];
          e[k - 1] = 0.0;
          for (std::size_t jj = k; jj-- > l;) {
            double c, s, r;
            make_givens(d[jj], f, c, s, r);
            d[jj] = r;
            if (jj > l) {
              f = -s * e[jj - 1];
              e[jj - 1] = c * e[jj - 1];
            }
            rotate_rows(b.vt, jj, k, c, s);
          }
        }
        rotated_out = true;
        break;
      }
    }
    if (rotated_out) continue;

    if (++sweeps > cap) {
      double worst = 0.0;
      for (double v : e) worst = std::max(worst, std::fabs(v));
      throw std::runtime_error("dense_svd: QR sweeps did not converge after " +
                               std::to_string(cap) + " iterations (largest superdiagonal " +
                               std::to_string(worst) + ")");
    }
    golub_kahan_step(d, e, l, k, b.ut, b.vt);
  }

  // Make singular values nonnegative.
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] < 0.0) {
      d[i] = -d[i];
      double* vr = b.vt.row(i);
      for (std::size_t j = 0; j < n; ++j) vr[j] = -vr[j];
    }
  }
  // Sort descending (stable on ties for determinism).
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return d[i] > d[j]; });
  TruncatedSVD out;
  out.s.resize(n);
  Matrix ut_sorted(n, b.ut.cols()), vt_sorted(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    out.s[i] = d[order[i]];
    const double* su = b.ut.row(order[i]);
    double* du = ut_sorted.row(i);
    for (std::size_t j = 0; j < b.ut.cols(); ++j) du[j] = su[j];
    const double* sv = b.vt.row(order[i]);
    double* dv = vt_sorted.row(i);
    for (std::size_t j = 0; j < n; ++j) dv[j] = sv[j];
  }
  // Sign convention: the largest-magnitude entry of each left vector is
  // positive; ties resolved at the smallest index.
  for (std::size_t i = 0; i < n; ++i) {
    double* ur = ut_sorted.row(i);
    std::size_t best = 0;
    double best_abs = -1.0;
    for (std::size_t j = 0; j < ut_sorted.cols(); ++j) {
      const double av = std::fabs(ur[j]);
      if (av > best_abs) {
        best_abs = av;
        best = j;
      }
    }
    if (ur[best] < 0.0) {
      for (std::size_t j = 0; j < ut_sorted.cols(); ++j) ur[j] = -ur[j];
      double* vr = vt_sorted.row(i);
      for (std::size_t j = 0; j < n; ++j) vr[j] = -vr[j];
    }
  }
  out.u = transpose(ut_sorted);
  out.v = transpose(vt_sorted);
  if (flipped) std::swap(out.u, out.v);
  const double smax = out.s.empty() ? 0.0 : out.s[0];
  const double cutoff = kPinvRelTol * static_cast<double>(std::max(a.rows(), a.cols())) * smax;
  out.rank_est = 0;
  for (double v : out.s) {
    if (v > cutoff && v > 0.0) ++out.rank_est;
  }
  out.power_iters = 0;
  return out;
}

namespace {

// Householder tridiagonalization; reflector vectors remain in the rows of w.
void tridiagonalize(Matrix& w, std::vector<double>& d, std::vector<double>& e,
                    std::vector<double>& taus) {
  const std::size_t n = w.rows();
  d.assign(n, 0.0);
  e.assign(n > 1 ? n - 1 : 0, 0.0);
  taus.assign(n, 0.0);
  std::vector<double> p(n), q(n);
  for (std::size_t j = 0; j + 2 < n; ++j) {
    double* rj = w.row(j);
    const std::size_t base = j + 1;
    const std::size_t len = n - base;
    const double sigma = segment_norm(rj + base, len);
    if (sigma == 0.0) {
      e[j] = 0.0;
      taus[j] = 0.0;
      continue;
    }
    const double x0 = rj[base];
    const double beta = -std::copysign(sigma, x0);
    const double v0 = x0 - beta;
    const double tau = (beta - x0) / beta;
    const double inv = 1.0 / v0;
    rj[base] = 1.0;
    for (std::size_t c = base + 1; c < n; ++c) rj[c] *= inv;
    e[j] = beta;
    taus[j] = tau;
    // p = tau * S * v over the trailing block.
    for (std::size_t i = base; i < n; ++i) {
      const double* ri = w.row(i);
      double acc = 0.0;
      for (std::size_t c = base; c < n; ++c) acc += ri[c] * rj[c];
      p[i] = tau * acc;
    }
    double vp = 0.0;
    for (std::size_t i = base; i < n; ++i) vp += rj[i] * p[i];
    const double kappa = 0.5 * tau * vp;
    for (std::size_t i = base; i < n; ++i) q[i] = p[i] - kappa * rj[i];
    for (std::size_t i = base; i < n; ++i) {
      double* ri = w.row(i);
      const double vi = rj[i];
      const double qi = q[i];
      for (std::size_t c = base; c < n; ++c) ri[c] -= vi * q[c] + qi * rj[c];
    }
  }
  if (n >= 2) e[n - 2] = w(n - 2, n - 1);
  for (std::size_t i = 0; i < n; ++i) d[i] = w(i, i);
}

// Implicit-shift QL sweeps on the tridiagonal (d, e).  When zt is non-null
// its rows accumulate the eigenvectors of the tridiagonal matrix.
void tql_sweeps(std::vector<double>& d, std::vector<double>& e, Matrix* zt) {
  const std::size_t n = d.size();
  if (n <= 1) return;
  e.resize(n, 0.0);  // one slot of slack for e[m] bookkeeping
  const int cap = kSvdSweepCapPerDim * static_cast<int>(n);
  int total = 0;
  for (std::size_t l = 0; l < n; ++l) {
    for (;;) {
      std::size_t m = l;
      while (m + 1 < n) {
        if (std::fabs(e[m]) <= kEps * (std::fabs(d[m]) + std::fabs(d[m + 1]))) break;
        ++m;
      }
      if (m == l) break;
      if (++total > cap) {
        throw std::runtime_error("symmetric_eig: QL sweeps did not converge after " +
                                 std::to_string(cap) + " iterations");
      }
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g == 0.0 ? 1.0 : g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool restarted = false;
      for (std::size_t ii = m; ii-- > l;) {
        double f = s * e[ii];
        const double bb = c * e[ii];
        r = std::hypot(f, g);
        e[ii + 1] = r;
        if (r == 0.0) {
          d[ii + 1] -= p;
          e[m] = 0.0;
          restarted = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[ii + 1] - p;
        r = (d[ii] - g) * s + 2.0 * c * bb;
        p = s * r;
        d[ii + 1] = g + p;
        g = c * r - bb;
        if (zt != nullptr) rotate_rows(*zt, ii + 1, ii, c, s);
      }
      if (restarted) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

Matrix check_and_symmetrize(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw std::invalid_argument("symmetric_eig: input must be square and nonempty");
  }
  const std::size_t n = a.rows();
  double mx = max_abs(a);
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      asym = std::max(asym, std::fabs(a(i, j) - a(j, i)));
    }
  }
  if (asym > kSymmetryTol * std::max(mx, 1e-300)) {
    throw std::invalid_argument("symmetric_eig: input asymmetry " + std::to_string(asym) +
                                " exceeds tolerance at scale " + std::to_string(mx));
  }
  Matrix w = a;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (w(i, j) + w(j, i));
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return w;
}

}  // namespace

SymmetricEig symmetric_eig(const Matrix& a) {
  Matrix w = check_and_symmetrize(a);
  const std::size_t n = w.rows();
  std::vector<double> d, e, taus;
  tridiagonalize(w, d, e, taus);
  Matrix zt = Matrix::identity(n);
  tql_sweeps(d, e, &zt);
  // Back-transform the tridiagonal eigenvectors through the reflectors.
  for (std::size_t jj = n >= 2 ? n - 2 : 0; jj-- > 0;) {
    if (taus[jj] == 0.0) continue;
    const double* vj = w.row(jj);
    const std::size_t base = jj + 1;
    for (std::size_t r = 0; r < n; ++r) {
      double* zr = zt.row(r);
      double acc = 0.0;
      for (std::size_t c = base; c < n; ++c) acc += vj[c] * zr[c];
      acc *= taus[jj];
      for (std::size_t c = base; c < n; ++c) zr[c] -= acc * vj[c];
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return d[i] > d[j]; });
  SymmetricEig out;
  out.values.resize(n);
  Matrix zt_sorted(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = d[order[i]];
    const double* src = zt.row(order[i]);
    double* dst = zt_sorted.row(i);
    for (std::size_t j = 0; j < n; ++j) dst[j] = src[j];
  }
  for (std::size_t i = 0; i < n; ++i) {
    double* zr = zt_sorted.row(i);
    std::size_t best = 0;
    double best_abs = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double av = std::fabs(zr[j]);
      if (av > best_abs) {
        best_abs = av;
        best = j;
      }
    }
    if (zr[best] < 0.0) {
      for (std::size_t j = 0; j < n; ++j) zr[j] = -zr[j];
    }
  }
  out.vectors = transpose(zt_sorted);
  return out;
}

std::vector<double> symmetric_eigenvalues(const Matrix& a) {
  Matrix w = check_and_symmetrize(a);
  std::vector<double> d, e, taus;
  tridiagonalize(w, d, e, taus);
  tql_sweeps(d, e, nullptr);
  std::sort(d.begin(), d.end(), std::greater<double>());
  return d;
}

Matrix pinv_from_svd(const TruncatedSVD& svd, double rel_tol) {
  const std::size_t dcount = svd.s.size();
  const double smax = dcount > 0 ? svd.s[0] : 0.0;
  const double cutoff = rel_tol * smax;
  Matrix v_scaled = svd.v;
  for (std::size_t j = 0; j < dcount; ++j) {
    const double f = (svd.s[j] > cutoff && svd.s[j] > 0.0) ? 1.0 / svd.s[j] : 0.0;
    for (std::size_t i = 0; i < v_scaled.rows(); ++i) v_scaled(i, j) *= f;
  }
  return matmul_nt(v_scaled, svd.u);
}

Matrix pseudoinverse(const Matrix& a, double rel_tol) {
  if (rel_tol < 0.0) {
    rel_tol = kPinvRelTol * static_cast<double>(std::max(a.rows(), a.cols()));
  }
  return pinv_from_svd(dense_svd(a), rel_tol);
}

std::vector<double> principal_angle_cosines(const Matrix& a, const Matrix& b) {
  const Matrix qa = qr_orthonormalize(a);
  const Matrix qb = qr_orthonormalize(b);
  const Matrix m = matmul_tn(qa, qb);
  TruncatedSVD svd = dense_svd(m);
  std::vector<double> cosines = svd.s;
  for (double& c : cosines) c = std::clamp(c, 0.0, 1.0);
  return cosines;
}

double max_principal_angle(const Matrix& a, const Matrix& b) {
  const std::vector<double> cosines = principal_angle_cosines(a, b);
  return std::acos(cosines.back());
}

}  // namespace rdr
