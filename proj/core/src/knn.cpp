#include "rdr/knn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "rdr/linalg.hpp"

namespace rdr {

namespace {

double squared_distance(const double* a, const double* b, std::size_t p) {
  double acc = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    const double d = a[j] - b[j];
    acc += d * d;
  }
  return acc;
}

// Indices of the k nearest rows of ref to the given query row, ordered by
// (distance, index); skip_self excludes the identical index (in-sample search).
std::vector<std::size_t> nearest_rows(const Matrix& ref, const double* query,
                                      std::size_t k, std::ptrdiff_t skip) {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(ref.rows());
  for (std::size_t j = 0; j < ref.rows(); ++j) {
    if (static_cast<std::ptrdiff_t>(j) == skip) continue;
    dist.emplace_back(squared_distance(query, ref.row(j), ref.cols()), j);
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::vector<std::size_t> out(k);
  for (std::size_t j = 0; j < k; ++j) out[j] = dist[j].second;
  return out;
}

}  // namespace

std::size_t rp_dimension(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(20.0 * std::log2(static_cast<double>(n))));
}

NeighborGraph exact_knn(const Matrix& x, std::size_t k) {
  const std::size_t n = x.rows();
  if (k == 0 || k >= n) {
    throw std::invalid_argument("exact_knn: k must be in [1, n-1]");
  }
  NeighborGraph g;
  g.n = n;
  g.neighbors.resize(n);
  g.k_h.assign(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    g.neighbors[i] = nearest_rows(x, x.row(i), k, static_cast<std::ptrdiff_t>(i));
  }
  return g;
}

NeighborGraph rp_knn(const Matrix& x, std::size_t k, RngStream& rng) {
  const std::size_t m = rp_dimension(x.rows());
  if (x.cols() <= m) return exact_knn(x, k);
  const Matrix omega = gaussian_matrix(x.cols(), m, rng);
  const Matrix basis = qr_orthonormalize(omega, DeficiencyPolicy::kComplete, &rng);
  return exact_knn(matmul(x, basis), k);
}

NeighborGraph symmetrize(const NeighborGraph& graph) {
  NeighborGraph out;
  out.n = graph.n;
  out.symmetrized = true;
  std::vector<std::vector<bool>> adj(graph.n, std::vector<bool>(graph.n, false));
  for (std::size_t i = 0; i < graph.n; ++i) {
    adj[i][i] = true;
    for (std::size_t j : graph.neighbors[i]) {
      adj[i][j] = true;
      adj[j][i] = true;
    }
  }
  out.neighbors.resize(graph.n);
  out.k_h.resize(graph.n);
  for (std::size_t i = 0; i < graph.n; ++i) {
    for (std::size_t j = 0; j < graph.n; ++j) {
      if (adj[i][j]) out.neighbors[i].push_back(j);
    }
    out.k_h[i] = out.neighbors[i].size();
  }
  return out;
}

std::vector<int> knn_classify(const Matrix& train_z, const std::vector<int>& labels,
                              const Matrix& test_z, std::size_t k) {
  if (labels.size() != train_z.rows()) {
    throw std::invalid_argument("knn_classify: one label per training row required");
  }
  if (k == 0 || k > train_z.rows()) {
    throw std::invalid_argument("knn_classify: k must be in [1, train rows]");
  }
  if (train_z.cols() != test_z.cols()) {
    throw std::invalid_argument("knn_classify: projected dimensions disagree");
  }
  std::vector<int> out(test_z.rows());
  for (std::size_t i = 0; i < test_z.rows(); ++i) {
    const std::vector<std::size_t> nn = nearest_rows(train_z, test_z.row(i), k, -1);
    std::map<int, std::size_t> votes;
    for (std::size_t j : nn) ++votes[labels[j]];
    int best = labels[nn[0]];
    std::size_t best_count = 0;
    for (const auto& [cls, count] : votes) {
      if (count > best_count) {  // map iterates ascending: ties keep the smaller class
        best = cls;
        best_count = count;
      }
    }
    out[i] = best;
  }
  return out;
}

}  // namespace rdr
