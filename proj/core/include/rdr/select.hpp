#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "rdr/matrix.hpp"
#include "rdr/rng.hpp"
#include "rdr/stats.hpp"

namespace rdr {

// Per-direction stability of a randomized eigenbasis: scores[k-1] is the mean
// absolute rank correlation of the k-th eigenvector across pairs of
// independent projections.
struct StabilityProfile {
  std::size_t t = 0;
  std::size_t num_projections = 0;
  std::vector<double> scores;   // length d_max, each in [0, 1]
  std::vector<double> pvalues;  // split points k = 2..d_max-1 (set by change_point_rank)
  std::size_t d_hat = 0;        // retained rank (set by change_point_rank)
  bool degenerate_scores = false;
};

// Holdout error of one 2x2 cross-validation pass at iteration count t.
struct BicvReport {
  std::size_t t = 0;
  std::array<double, 4> block_errors{};   // squared Frobenius error per held-out block
  std::array<std::size_t, 4> block_ranks{};
  double bicv_error = 0.0;                // median of the four block errors
  std::size_t d_hat = 0;                  // median block rank, rounded half up
  std::uint64_t partition_seed = 0;
};

struct Selection {
  std::size_t t_star = 0;
  std::size_t d_star = 0;
  std::vector<BicvReport> reports;  // one per t = 1..t_max
};

StabilityProfile stability_scores(const Matrix& x, std::size_t t, std::size_t d_max,
                                  std::size_t num_projections, RngStream& rng);

// Splits scores into a leading "stable" and trailing "unstable" group at every
// k in {2..d_max-1}, picks the split with the smallest rank-sum p-value, and
// returns k-1, the number of directions kept before the split.  Fills
// profile.pvalues / d_hat / degenerate_scores.  The default alternative is
// one-sided: the leading group should score higher.
std::size_t change_point_rank(StabilityProfile& profile,
                              TailAlternative alt = TailAlternative::kGreater);

BicvReport bicv_error(const Matrix& x, std::size_t t, std::size_t d_max, std::size_t delta,
                      RngStream& rng);

// One-standard-error tie window for the holdout sweep: errors within
// sd(block errors)/2 of the minimum count as ties, plus a small relative
// floor so error curves at numerical-noise level tie exactly.
inline constexpr double kBicvTieRelFloor = 1e-9;

// Sweeps t = 1..t_max, scoring each by holdout error; returns the smallest t
// whose error ties the minimum (see kBicvTieRelFloor above: a gap within one
// standard error of the winner's block spread is a tie) and the rank estimate
// recorded at that t.  Each t gets an independent derived stream, so
// evaluation order cannot matter.
Selection select_t_d(const Matrix& x, std::size_t t_max, std::size_t d_max,
                     std::size_t delta, RngStream& rng, bool reuse_partition = true);

}  // namespace rdr
