#pragma once

#include <cstddef>
#include <vector>

#include "rdr/matrix.hpp"
#include "rdr/rng.hpp"

namespace rdr {

// k-nearest-neighbor lists.  Before symmetrization, neighbors[i] holds the k
// nearest other points ordered by (distance, index); after, the union graph
// with self-loops, sorted by index, with k_h[i] = |neighbors[i]|.
struct NeighborGraph {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> neighbors;
  std::vector<std::size_t> k_h;
  bool symmetrized = false;
};

// Exhaustive Euclidean kNN; distance ties break toward the smaller index.
NeighborGraph exact_knn(const Matrix& x, std::size_t k);

// Random-projection-accelerated kNN: project onto an orthonormalized Gaussian
// basis of dimension ceil(20 * log2(n)) and run the exact search there.  When
// the data dimension does not exceed the projection dimension this is exactly
// exact_knn.
NeighborGraph rp_knn(const Matrix& x, std::size_t k, RngStream& rng);

// Union symmetrization plus self-loops: i and j are neighbors if either listed
// the other.
NeighborGraph symmetrize(const NeighborGraph& graph);

// Majority vote over the k nearest training points; vote ties break toward the
// smallest class label.
std::vector<int> knn_classify(const Matrix& train_z, const std::vector<int>& labels,
                              const Matrix& test_z, std::size_t k);

// Projection dimension used by rp_knn.
std::size_t rp_dimension(std::size_t n);

}  // namespace rdr
