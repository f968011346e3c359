#pragma once

#include <cstddef>
#include <vector>

#include "rdr/knn.hpp"
#include "rdr/matrix.hpp"
#include "rdr/rng.hpp"
#include "rdr/sdr.hpp"

namespace rdr {

// Symmetric heat-kernel affinity over the symmetrized kNN pattern, stored as
// adjacency lists parallel to the pattern.  Self-edges carry weight zero; all
// other weights are exp(-dist / b) (or exp(-dist^2 / b) in the squared
// variant), so they lie in (0, 1].
struct HeatKernelGraph {
  NeighborGraph pattern;                     // symmetrized, sorted, self-loops present
  std::vector<std::vector<double>> weights;  // aligned with pattern.neighbors
  std::vector<double> degree;                // D_ii = sum_j W_ij, all > 0
  double bandwidth = 0.0;
  bool squared = false;
};

// Build the affinity graph.  b > 0 is used as given; b = 0 selects the median
// distance over the kNN edges.  A node whose total edge weight underflows to
// zero is an error (the graph is effectively disconnected there).
HeatKernelGraph heat_kernel_graph(const Matrix& x, std::size_t k, double b, RngStream& rng,
                                  bool use_rp = false, bool squared = false);

// W * Z through the adjacency lists, O(nnz * cols).
Matrix apply_weights(const HeatKernelGraph& graph, const Matrix& z);

// Locality-preserving fit plus the diagnostics the model does not carry: the
// generalized eigenvalues of the projected pencil (descending) and how many
// leading directions were dropped as near-trivial.
struct LppFit {
  EdrModel model;
  std::vector<double> mu;
  std::size_t num_excluded = 0;
};

// Solve the degree-weighted pencil (X~^T W~ X~, X~^T X~) with X~ = D^{1/2} X
// and W~ = D^{-1/2} W D^{-1/2}, keeping the r eigenvectors of LARGEST mu and
// excluding directions whose image aligns with the constant vector D^{1/2} 1.
// Exact mode restricts the pencil to the right-singular span of X~; randomized
// mode restricts it to a rank-d randomized eigenbasis of X~^T W~ X~ reached by
// symmetric power iteration applied through X^T(W(X .)) products.
// `center` exists so tests can plant an exactly representable trivial
// direction; fit_lpp always centers.
LppFit fit_lpp_full(const Matrix& x, std::size_t k, double b, const FitOptions& opts,
                    RngStream& rng, bool squared = false, bool center = true);

EdrModel fit_lpp(const Matrix& x, std::size_t k, double b, const FitOptions& opts,
                 RngStream& rng, bool squared = false);

}  // namespace rdr
