#include "rdr/select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rdr/linalg.hpp"
#include "rdr/rsvd.hpp"

namespace rdr {

namespace {

// Eigenbasis of (X X^T)^t restricted to one random projection: orthonormal
// block Q, then the small projected Gram Q^T X X^T Q rotated back up.
Matrix projected_eigenbasis(const Matrix& x, std::size_t t, std::size_t width,
                            RngStream& rng) {
  const Matrix q = power_block_basis(x, width, t, rng);
  const Matrix y = matmul_tn(x, q);  // p x width
  const SymmetricEig eig = symmetric_eig(matmul_tn(y, y));
  return matmul(q, eig.vectors);
}

struct Partition {
  std::vector<std::size_t> group[2];
};

Partition make_partition(std::size_t n, RngStream& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (int attempt = 0; attempt < 2; ++attempt) {
    rng.shuffle(idx);
    const std::size_t first = (n + 1) / 2;
    if (first == 0 || first == n) continue;
    Partition part;
    part.group[0].assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(first));
    part.group[1].assign(idx.begin() + static_cast<std::ptrdiff_t>(first), idx.end());
    return part;
  }
  throw std::invalid_argument("holdout partition degenerate: a group would be empty");
}

double median_of_four(std::array<double, 4> v) {
  std::sort(v.begin(), v.end());
  return 0.5 * (v[1] + v[2]);
}

BicvReport bicv_given_partition(const Matrix& x, std::size_t t, std::size_t d_max,
                                std::size_t delta, const Partition& rows,
                                const Partition& cols, const RngStream& rng) {
  BicvReport report;
  report.t = t;
  std::size_t slot = 0;
  for (int gi = 0; gi < 2; ++gi) {
    for (int gj = 0; gj < 2; ++gj, ++slot) {
      const Matrix a = x.rows_subset(rows.group[gi]).cols_subset(cols.group[gj]);
      const Matrix b = x.rows_subset(rows.group[gi]).cols_subset(cols.group[1 - gj]);
      const Matrix c = x.rows_subset(rows.group[1 - gi]).cols_subset(cols.group[gj]);
      const Matrix d = x.rows_subset(rows.group[1 - gi]).cols_subset(cols.group[1 - gj]);

      const std::size_t min_d = std::min(d.rows(), d.cols());
      const std::size_t d_max_blk = std::min(d_max, min_d);
      RngStream blk_rng = rng.derive(slot);
      std::size_t rank_blk = d_max_blk;
      if (d_max_blk >= 4) {
        RngStream stab_rng = blk_rng.derive("stability");
        StabilityProfile profile = stability_scores(d, t, d_max_blk, 5, stab_rng);
        rank_blk = change_point_rank(profile);
      }
      const std::size_t delta_blk = std::min(delta, min_d - rank_blk);
      RngStream fac_rng = blk_rng.derive("factor");
      const TruncatedSVD f = randomized_svd_fixed(d, rank_blk, delta_blk, t, fac_rng);

      // A - B D^+ C with D^+ taken from the rank-limited factorization:
      // (B V) diag(1/s) (U^T C), dropping negligible singular values.
      Matrix bv = matmul(b, f.v);
      const Matrix utc = matmul_tn(f.u, c);
      const double cutoff =
          kPinvRelTol * static_cast<double>(std::max(d.rows(), d.cols())) *
          (f.s.empty() ? 0.0 : f.s.front());
      for (std::size_t j = 0; j < f.s.size(); ++j) {
        const double w = f.s[j] > cutoff ? 1.0 / f.s[j] : 0.0;
        for (std::size_t i = 0; i < bv.rows(); ++i) bv(i, j) *= w;
      }
      const double err = frobenius_norm(subtract(a, matmul(bv, utc)));
      report.block_errors[slot] = err * err;
      report.block_ranks[slot] = rank_blk;
    }
  }
  report.bicv_error = median_of_four(report.block_errors);
  std::array<std::size_t, 4> ranks = report.block_ranks;
  std::sort(ranks.begin(), ranks.end());
  const double mid = 0.5 * static_cast<double>(ranks[1] + ranks[2]);
  report.d_hat = static_cast<std::size_t>(std::floor(mid + 0.5));
  return report;
}

}  // namespace

StabilityProfile stability_scores(const Matrix& x, std::size_t t, std::size_t d_max,
                                  std::size_t num_projections, RngStream& rng) {
  if (num_projections < 2) {
    throw std::invalid_argument("stability_scores: need at least 2 projections");
  }
  if (d_max < 1 || d_max > std::min(x.rows(), x.cols())) {
    throw std::invalid_argument("stability_scores: d_max out of range");
  }
  if (x.rows() < 3) {
    throw std::invalid_argument("stability_scores: need at least 3 rows");
  }
  StabilityProfile profile;
  profile.t = t;
  profile.num_projections = num_projections;

  std::vector<Matrix> bases;
  bases.reserve(num_projections);
  for (std::size_t b = 0; b < num_projections; ++b) {
    bases.push_back(projected_eigenbasis(x, t, d_max, rng));
  }

  profile.scores.assign(d_max, 0.0);
  const double num_pairs =
      0.5 * static_cast<double>(num_projections) * static_cast<double>(num_projections - 1);
  for (std::size_t k = 0; k < d_max; ++k) {
    double acc = 0.0;
    for (std::size_t b1 = 0; b1 < num_projections; ++b1) {
      for (std::size_t b2 = b1 + 1; b2 < num_projections; ++b2) {
        acc += std::fabs(spearman_correlation(bases[b1].col_vector(k), bases[b2].col_vector(k)));
      }
    }
    profile.scores[k] = acc / num_pairs;
  }
  return profile;
}

std::size_t change_point_rank(StabilityProfile& profile, TailAlternative alt) {
  const std::size_t d_max = profile.scores.size();
  if (d_max < 4) {
    throw std::invalid_argument("change_point_rank: need at least 4 scores");
  }
  profile.pvalues.assign(d_max - 2, 1.0);
  for (std::size_t k = 2; k <= d_max - 1; ++k) {
    const std::vector<double> head(profile.scores.begin(),
                                   profile.scores.begin() + static_cast<std::ptrdiff_t>(k - 1));
    const std::vector<double> tail(profile.scores.begin() + static_cast<std::ptrdiff_t>(k - 1),
                                   profile.scores.end());
    profile.pvalues[k - 2] = wilcoxon_rank_sum_pvalue(head, tail, alt);
  }
  std::size_t best_k = 2;
  for (std::size_t k = 3; k <= d_max - 1; ++k) {
    if (profile.pvalues[k - 2] < profile.pvalues[best_k - 2]) best_k = k;
  }
  profile.degenerate_scores =
      std::all_of(profile.pvalues.begin(), profile.pvalues.end(),
                  [&](double p) { return p == profile.pvalues.front(); });
  profile.d_hat = best_k - 1;
  return profile.d_hat;
}

BicvReport bicv_error(const Matrix& x, std::size_t t, std::size_t d_max, std::size_t delta,
                      RngStream& rng) {
  if (x.rows() < 4 || x.cols() < 4) {
    throw std::invalid_argument("bicv_error: need at least 4 rows and 4 columns");
  }
  const Partition rows = make_partition(x.rows(), rng);
  const Partition cols = make_partition(x.cols(), rng);
  BicvReport report = bicv_given_partition(x, t, d_max, delta, rows, cols, rng);
  report.partition_seed = rng.stream();
  return report;
}

Selection select_t_d(const Matrix& x, std::size_t t_max, std::size_t d_max,
                     std::size_t delta, RngStream& rng, bool reuse_partition) {
  if (t_max < 1) throw std::invalid_argument("select_t_d: t_max must be at least 1");
  if (x.rows() < 4 || x.cols() < 4) {
    throw std::invalid_argument("select_t_d: need at least 4 rows and 4 columns");
  }
  Partition rows, cols;
  std::uint64_t part_seed = 0;
  if (reuse_partition) {
    RngStream part_rng = rng.derive("partition");
    rows = make_partition(x.rows(), part_rng);
    cols = make_partition(x.cols(), part_rng);
    part_seed = part_rng.stream();
  }

  Selection sel;
  sel.reports.reserve(t_max);
  for (std::size_t t = 1; t <= t_max; ++t) {
    RngStream t_rng = rng.derive(t);
    if (!reuse_partition) {
      RngStream part_rng = t_rng.derive("partition");
      rows = make_partition(x.rows(), part_rng);
      cols = make_partition(x.cols(), part_rng);
      part_seed = part_rng.stream();
    }
    BicvReport report = bicv_given_partition(x, t, d_max, delta, rows, cols, t_rng);
    report.partition_seed = part_seed;
    sel.reports.push_back(std::move(report));
  }

  // Strict minimiser first, then widen to statistical ties: a holdout error
  // within one standard error of the minimum (spread estimated from the four
  // block errors of the winning report) carries no evidence against a smaller
  // t, so the smallest tied t wins.  The tiny relative floor keeps exactly
  // rank-deficient inputs, whose errors sit at numerical-noise level, tied all
  // the way down to t = 1.
  std::size_t best = 0;
  for (std::size_t i = 1; i < sel.reports.size(); ++i) {
    if (sel.reports[i].bicv_error < sel.reports[best].bicv_error) best = i;
  }
  const double min_err = sel.reports[best].bicv_error;
  double mean = 0.0;
  for (double e : sel.reports[best].block_errors) mean += e / 4.0;
  double var = 0.0;
  for (double e : sel.reports[best].block_errors) var += (e - mean) * (e - mean) / 3.0;
  const double threshold =
      min_err + 0.5 * std::sqrt(var) + kBicvTieRelFloor * (1.0 + min_err);
  std::size_t chosen = best;
  for (std::size_t i = 0; i < best; ++i) {
    if (sel.reports[i].bicv_error <= threshold) {
      chosen = i;
      break;
    }
  }
  sel.t_star = chosen + 1;
  sel.d_star = sel.reports[chosen].d_hat;
  return sel;
}

}  // namespace rdr
