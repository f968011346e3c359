#pragma once

#include <cstddef>
#include <vector>

#include "rdr/matrix.hpp"

namespace rdr {

// Rank-d factorization A ~= U diag(s) V^T with orthonormal columns.
struct TruncatedSVD {
  Matrix u;               // rows x d
  std::vector<double> s;  // nonincreasing, nonnegative
  Matrix v;               // cols x d
  std::size_t rank_est = 0;
  int power_iters = 0;
};

struct SymmetricEig {
  std::vector<double> values;  // nonincreasing; may be negative
  Matrix vectors;              // columns are eigenvectors
};

// Relative column-norm threshold below which QR reports rank deficiency.
inline constexpr double kQrRankTol = 1e-13;
// Multiplier for the default pseudoinverse cutoff: rel_tol = kPinvRelTol * max(m, n).
inline constexpr double kPinvRelTol = 1e-12;
// Relative asymmetry tolerated by symmetric_eig.
inline constexpr double kSymmetryTol = 1e-10;
// Largest min(rows, cols) dense_svd accepts.
inline constexpr std::size_t kDenseSvdMaxDim = 2000;
// QR sweeps allowed per unit of min(rows, cols) before giving up.
inline constexpr int kSvdSweepCapPerDim = 100;

// What to do when a column's residual norm collapses during QR.
enum class DeficiencyPolicy {
  kError,     // throw, naming the offending column
  kComplete,  // keep going; the column is filled with an arbitrary
              // direction orthogonal to the others
};

class RngStream;

// Thin orthonormal basis Q (rows x cols) of the column span via Householder
// QR.  Requires cols <= rows.  Under kComplete, dependent columns are
// replaced: by fresh Gaussian draws when fill_rng is given (so completions
// from independent streams are independent), otherwise by a deterministic
// orthogonal fill.
Matrix qr_orthonormalize(const Matrix& a, DeficiencyPolicy policy = DeficiencyPolicy::kError,
                         RngStream* fill_rng = nullptr);

// Full SVD (d = min(rows, cols)) via Golub-Kahan bidiagonalization and
// implicit-shift QR sweeps.
TruncatedSVD dense_svd(const Matrix& a);

// Eigendecomposition of a symmetric matrix via Householder tridiagonalization
// and implicit-shift QL sweeps.  Asymmetry beyond kSymmetryTol (relative to
// the largest entry) is an error.
SymmetricEig symmetric_eig(const Matrix& a);
// Values-only variant, nonincreasing.
std::vector<double> symmetric_eigenvalues(const Matrix& a);

// Moore-Penrose pseudoinverse.  Singular values at or below
// rel_tol * s_max are treated as zero; rel_tol < 0 selects the default
// kPinvRelTol * max(rows, cols).
Matrix pseudoinverse(const Matrix& a, double rel_tol = -1.0);
Matrix pinv_from_svd(const TruncatedSVD& svd, double rel_tol);

// Cosines of the principal angles between the column spans of a and b,
// nonincreasing.  Inputs need not be orthonormal but must have full column
// rank.
std::vector<double> principal_angle_cosines(const Matrix& a, const Matrix& b);
// Largest principal angle, in radians.
double max_principal_angle(const Matrix& a, const Matrix& b);

}  // namespace rdr
