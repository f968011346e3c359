#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rdr/matrix.hpp"
#include "rdr/rng.hpp"
#include "rdr/rsvd.hpp"

namespace rdr {

enum class EdrMethod { kPca, kSir, kLsir, kLpp };
enum class FitMode { kExact, kRandomized };

// Linear dimension reduction map Z = X_centered * G.
struct EdrModel {
  Matrix g;                // p x r, unit-norm columns
  EdrMethod method = EdrMethod::kPca;
  std::size_t r = 0;       // subspace dimension
  std::size_t d_star = 0;  // rank retained from the Gamma factor
  std::size_t t_star = 0;  // power iterations used (0 on the exact path)
  std::vector<double> x_means;  // training column means
  double y_mean = 0.0;          // training response mean (0 for categorical)
};

// Membership of each sample in one of H response slices.
struct SliceAssignment {
  std::size_t num_slices = 0;
  std::vector<std::size_t> slice_of;  // per sample
  std::vector<std::size_t> sizes;     // per slice, each >= 1
  bool h_overridden = false;  // requested H replaced by the class count
};

// Thin factor L with Gamma = L L^T (p x H for slice means, p x n for the
// locally smoothed variant).
struct GammaFactor {
  Matrix l;
  std::size_t m = 0;  // column count of L
};

struct FitOptions {
  FitMode mode = FitMode::kExact;
  std::size_t r = 0;  // 0: use the estimated rank d_star
  bool categorical_response = false;
  bool use_rp_knn = false;  // random-projection kNN inside the local smoother
  AdaptiveOptions adaptive;  // randomized-path controls
};

enum class TransformCentering {
  kSelf,   // center new data by its own column means
  kTrain,  // center by the training means
};

std::pair<Matrix, std::vector<double>> center_columns(const Matrix& x);

// Quantitative responses: sort descending (ties by original index) and cut
// into H contiguous slices of size floor(n/H), remainder to the earliest
// slices.  Categorical responses: one slice per distinct value (descending),
// overriding H if it disagrees.
SliceAssignment slice_response(const std::vector<double>& y, std::size_t num_slices,
                               bool categorical = false);

// L column h = sum of the centered rows in slice h.
GammaFactor build_gamma_sir(const Matrix& x, const SliceAssignment& slices);

// L column i = smoothed within-slice local mean of sample i over its
// symmetrized k-neighborhood (self included, weight 1/k_h(i)).
GammaFactor build_gamma_lsir(const Matrix& x, const SliceAssignment& slices, std::size_t k,
                             bool use_rp, RngStream& rng);

// Low-rank generalized eigensolve: factor Gamma = U S^2 U^T from L, form
// W = X U S^-1, and keep the r right-singular vectors of W with the smallest
// non-degenerate singular values; G = U S^-1 E_r, columns unit-normalized.
// r = 0 keeps d_star directions.
EdrModel generalized_edr(const GammaFactor& gamma, const Matrix& x, std::size_t r,
                         FitMode mode, const AdaptiveOptions& adaptive, RngStream& rng);

EdrModel fit_sir(const Matrix& x, const std::vector<double>& y, std::size_t num_slices,
                 const FitOptions& opts, RngStream& rng);
EdrModel fit_lsir(const Matrix& x, const std::vector<double>& y, std::size_t num_slices,
                  std::size_t k, const FitOptions& opts, RngStream& rng);
EdrModel fit_pca(const Matrix& x, const FitOptions& opts, RngStream& rng);

// Project new data: center (by its own means, by default) and multiply by G.
Matrix transform(const EdrModel& model, const Matrix& x_new,
                 TransformCentering centering = TransformCentering::kSelf);

}  // namespace rdr
