#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rdr/linalg.hpp"
#include "rdr/matrix.hpp"
#include "rdr/rng.hpp"
#include "rdr/select.hpp"

namespace rdr {

// Blocks F^(t) = (X X^T)^t F^(0) for t = 1..t_max, starting from a Gaussian
// draw F^(0).  In the normalized variant (the default, and the numerically
// safe one) the columns are re-orthonormalized after each half-application,
// so every stored block is an orthonormal basis.
struct PowerBlockSequence {
  std::vector<Matrix> blocks;   // blocks[t-1] is F^(t), n x ell
  std::size_t ell = 0;          // working width
  std::size_t oversampling = 0; // extra columns beyond the target rank
  bool normalized = true;
};

PowerBlockSequence power_blocks(const Matrix& x, std::size_t ell, std::size_t t_max,
                                RngStream& rng, bool normalized = true);

// Just the final normalized block F^(t): an orthonormal n x ell basis that
// captures the dominant left subspace after t power applications.
Matrix power_block_basis(const Matrix& x, std::size_t ell, std::size_t t, RngStream& rng);

// Rank-d factorization from a width d+delta power basis at a fixed iteration
// count t.  Deterministic given the stream.
TruncatedSVD randomized_svd_fixed(const Matrix& x, std::size_t d, std::size_t delta,
                                  std::size_t t, RngStream& rng);

struct AdaptiveOptions {
  std::size_t t_max = 10;
  std::size_t d_max = 0;  // 0: as large as the working width allows
  std::size_t delta = 10;
  std::size_t num_projections = 5;  // independent draws behind the stability scores
  std::optional<std::size_t> fixed_t;  // pin the iteration count, select only d
  std::optional<std::size_t> fixed_d;  // pin the rank, select only t
  bool reuse_partition = true;  // one holdout partition shared across the t sweep
};

// Selection traces captured during an adaptive factorization, for reporting.
// Curves are empty when the corresponding selection pass did not run (for
// example when the value was pinned).  Scores refer to the factorization's
// working orientation (the transpose is used when rows > cols).
struct AdaptiveSvdDiagnostics {
  std::size_t d_max_used = 0;
  std::vector<BicvReport> bicv;          // one entry per candidate t
  std::vector<double> stability_scores;  // per-direction, at the chosen t
};

// Chooses the iteration count by cross-validated holdout error and the rank
// by the stability change point, then factorizes at the chosen pair.  The
// result carries the choices in rank_est and power_iters.  Matrices with
// more rows than columns are handled by working on the transpose.
TruncatedSVD adaptive_randomized_svd(const Matrix& x, const AdaptiveOptions& opts,
                                     RngStream& rng);
TruncatedSVD adaptive_randomized_svd(const Matrix& x, const AdaptiveOptions& opts,
                                     RngStream& rng, AdaptiveSvdDiagnostics* diagnostics);

}  // namespace rdr
