#pragma once

#include <cstddef>
#include <vector>

namespace rdr {

enum class TailAlternative {
  kTwoSided,
  kGreater,  // first sample shifted to larger values
  kLess,
};

// Ranks 1..n with ties replaced by the average of the ranks they occupy.
std::vector<double> midranks(const std::vector<double>& values);

// Pearson correlation of the mid-ranks of u and v. A constant input has zero
// rank variance; the result is then defined as 0 and *degenerate (if given)
// is set. Requires equal lengths >= 3.
double spearman_correlation(const std::vector<double>& u, const std::vector<double>& v,
                            bool* degenerate = nullptr);

// Rank-sum location test of a against b. Exact enumeration of all group
// assignments when the pooled size is <= 12, otherwise a normal approximation
// with tie-corrected variance and continuity correction. When every pooled
// value is identical the p-value is 1. Requires both samples nonempty and a
// pooled size >= 4.
double wilcoxon_rank_sum_pvalue(const std::vector<double>& a, const std::vector<double>& b,
                                TailAlternative alt = TailAlternative::kTwoSided);

}  // namespace rdr
