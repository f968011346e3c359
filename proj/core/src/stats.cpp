#include "rdr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace rdr {

namespace {

// P(Z <= z) for standard normal Z.
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double two_sided_from_tails(double p_less, double p_greater) {
  return std::min(1.0, 2.0 * std::min(p_less, p_greater));
}

}  // namespace

std::vector<double> midranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double spearman_correlation(const std::vector<double>& u, const std::vector<double>& v,
                            bool* degenerate) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("spearman_correlation: length mismatch");
  }
  if (u.size() < 3) {
    throw std::invalid_argument("spearman_correlation: need at least 3 observations");
  }
  if (degenerate != nullptr) *degenerate = false;
  const std::vector<double> ru = midranks(u);
  const std::vector<double> rv = midranks(v);
  const std::size_t n = ru.size();
  const double mean = 0.5 * static_cast<double>(n + 1);
  double suu = 0.0, svv = 0.0, suv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double du = ru[i] - mean;
    const double dv = rv[i] - mean;
    suu += du * du;
    svv += dv * dv;
    suv += du * dv;
  }
  if (suu == 0.0 || svv == 0.0) {
    if (degenerate != nullptr) *degenerate = true;
    return 0.0;
  }
  return std::clamp(suv / std::sqrt(suu * svv), -1.0, 1.0);
}

double wilcoxon_rank_sum_pvalue(const std::vector<double>& a, const std::vector<double>& b,
                                TailAlternative alt) {
  const std::size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;
  if (n1 == 0 || n2 == 0) {
    throw std::invalid_argument("wilcoxon_rank_sum_pvalue: empty sample");
  }
  if (n < 4) {
    throw std::invalid_argument("wilcoxon_rank_sum_pvalue: pooled size must be >= 4");
  }
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::vector<double> ranks = midranks(pooled);

  double w_obs = 0.0;
  for (std::size_t i = 0; i < n1; ++i) w_obs += ranks[i];

  bool all_equal = true;
  for (std::size_t i = 1; i < n && all_equal; ++i) all_equal = pooled[i] == pooled[0];
  if (all_equal) return 1.0;

  if (n <= 12) {
    // Enumerate every assignment of n1 pooled positions to the first group.
    const std::uint32_t full = 1u << n;
    std::size_t total = 0, le = 0, ge = 0;
    const double eps = 1e-9;
    for (std::uint32_t mask = 0; mask < full; ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) != n1) continue;
      ++total;
      double w = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) w += ranks[i];
      }
      if (w <= w_obs + eps) ++le;
      if (w >= w_obs - eps) ++ge;
    }
    const double p_less = static_cast<double>(le) / static_cast<double>(total);
    const double p_greater = static_cast<double>(ge) / static_cast<double>(total);
    switch (alt) {
      case TailAlternative::kGreater: return p_greater;
      case TailAlternative::kLess: return p_less;
      case TailAlternative::kTwoSided: return two_sided_from_tails(p_less, p_greater);
    }
  }

  // Normal approximation with tie correction.
  const double dn = static_cast<double>(n);
  const double mean = static_cast<double>(n1) * (dn + 1.0) / 2.0;
  double tie_term = 0.0;
  {
    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
  }
  const double var = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                     ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (var <= 0.0) return 1.0;
  const double sd = std::sqrt(var);
  // Continuity correction shrinks the deviation toward the mean.
  const double p_greater = 1.0 - normal_cdf((w_obs - mean - 0.5) / sd);
  const double p_less = normal_cdf((w_obs - mean + 0.5) / sd);
  switch (alt) {
    case TailAlternative::kGreater: return p_greater;
    case TailAlternative::kLess: return p_less;
    case TailAlternative::kTwoSided: return two_sided_from_tails(p_less, p_greater);
  }
  return 1.0;  // unreachable
}

}  // namespace rdr
