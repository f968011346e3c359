#include "rdr/knn.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "rdr/matrix.hpp"
#include "rdr/rng.hpp"
#include "test_util.hpp"

using rdr::Matrix;
using rdr::NeighborGraph;
using rdr::RngStream;
using test_util::matrix_from;

namespace {

// Independent quadratic scan used as the oracle.
std::vector<std::size_t> brute_force_knn(const Matrix& x, std::size_t i, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t j = 0; j < x.rows(); ++j) {
    if (j == i) continue;
    double acc = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double diff = x(i, c) - x(j, c);
      acc += diff * diff;
    }
    d.emplace_back(acc, j);
  }
  std::sort(d.begin(), d.end());
  std::vector<std::size_t> out(k);
  for (std::size_t j = 0; j < k; ++j) out[j] = d[j].second;
  return out;
}

Matrix blobs(std::size_t per_blob, std::size_t num_blobs, std::size_t p, double spread,
             std::uint64_t seed, std::vector<int>* labels = nullptr) {
  RngStream rng(seed);
  Matrix centers(num_blobs, p);
  for (std::size_t b = 0; b < num_blobs; ++b) {
    for (std::size_t j = 0; j < p; ++j) centers(b, j) = 50.0 * rng.normal();
  }
  Matrix x(per_blob * num_blobs, p);
  if (labels != nullptr) labels->resize(x.rows());
  for (std::size_t b = 0; b < num_blobs; ++b) {
    for (std::size_t i = 0; i < per_blob; ++i) {
      const std::size_t r = b * per_blob + i;
      if (labels != nullptr) (*labels)[r] = static_cast<int>(b);
      for (std::size_t j = 0; j < p; ++j) x(r, j) = centers(b, j) + spread * rng.normal();
    }
  }
  return x;
}

}  // namespace

TEST(ExactKnn, CollinearPoints) {
  const Matrix x = matrix_from({{0.0}, {1.0}, {10.0}});
  const NeighborGraph g = rdr::exact_knn(x, 1);
  EXPECT_EQ(g.neighbors[0], (std::vector<std::size_t>{1}));
  EXPECT_EQ(g.neighbors[1], (std::vector<std::size_t>{0}));
  EXPECT_EQ(g.neighbors[2], (std::vector<std::size_t>{1}));
}

TEST(ExactKnn, MatchesBruteForce) {
  const Matrix x = test_util::random_matrix(50, 4, 606);
  const NeighborGraph g = rdr::exact_knn(x, 5);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(g.neighbors[i], brute_force_knn(x, i, 5)) << "i=" << i;
  }
}

TEST(ExactKnn, FullNeighborhoodListsEveryOther) {
  const Matrix x = test_util::random_matrix(8, 3, 2);
  const NeighborGraph g = rdr::exact_knn(x, 7);
  for (std::size_t i = 0; i < 8; ++i) {
    std::set<std::size_t> seen(g.neighbors[i].begin(), g.neighbors[i].end());
    EXPECT_EQ(seen.size(), 7u);
    EXPECT_EQ(seen.count(i), 0u);
  }
}

TEST(ExactKnn, DuplicatePointsRankFirst) {
  const Matrix x = matrix_from({{1.0, 1.0}, {5.0, 5.0}, {1.0, 1.0}});
  const NeighborGraph g = rdr::exact_knn(x, 1);
  EXPECT_EQ(g.neighbors[0], (std::vector<std::size_t>{2}));
  EXPECT_EQ(g.neighbors[2], (std::vector<std::size_t>{0}));
}

TEST(ExactKnn, TiesBreakTowardSmallerIndex) {
  // Points 1 and 2 are equidistant from point 0.
  const Matrix x = matrix_from({{0.0, 0.0}, {1.0, 0.0}, {-1.0, 0.0}, {5.0, 5.0}});
  const NeighborGraph g = rdr::exact_knn(x, 1);
  EXPECT_EQ(g.neighbors[0], (std::vector<std::size_t>{1}));
}

TEST(ExactKnn, RejectsBadK) {
  const Matrix x = test_util::random_matrix(5, 2, 3);
  EXPECT_THROW(rdr::exact_knn(x, 0), std::invalid_argument);
  EXPECT_THROW(rdr::exact_knn(x, 5), std::invalid_argument);
}

TEST(RpKnn, FallsThroughWhenDimensionIsSmall) {
  const Matrix x = test_util::random_matrix(64, 10, 17);  // 10 <= 20*log2(64)
  RngStream rng(5);
  const NeighborGraph fast = rdr::rp_knn(x, 4, rng);
  const NeighborGraph exact = rdr::exact_knn(x, 4);
  for (std::size_t i = 0; i < x.rows(); ++i) EXPECT_EQ(fast.neighbors[i], exact.neighbors[i]);
}

TEST(RpKnn, HighOverlapOnClusteredData) {
  // Blob size 6 with k = 5: each point's neighbor set is exactly its
  // blobmates, so the structure a projection must preserve is the (huge)
  // cluster separation, not the noise-level ranking inside a blob.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = blobs(6, 10, 500, 1.0, 40 + seed);
    ASSERT_GT(x.cols(), rdr::rp_dimension(x.rows()));
    RngStream rng(800 + seed);
    const NeighborGraph fast = rdr::rp_knn(x, 5, rng);
    const NeighborGraph exact = rdr::exact_knn(x, 5);
    double overlap = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const std::set<std::size_t> a(fast.neighbors[i].begin(), fast.neighbors[i].end());
      std::size_t common = 0;
      for (std::size_t j : exact.neighbors[i]) common += a.count(j);
      overlap += static_cast<double>(common) / 5.0;
    }
    overlap /= static_cast<double>(x.rows());
    EXPECT_GE(overlap, 0.95) << "seed=" << seed;
  }
}

TEST(RpKnn, DeterministicGivenSeed) {
  const Matrix x = test_util::random_matrix(40, 200, 31);
  RngStream r1(9), r2(9);
  const NeighborGraph a = rdr::rp_knn(x, 3, r1);
  const NeighborGraph b = rdr::rp_knn(x, 3, r2);
  for (std::size_t i = 0; i < x.rows(); ++i) EXPECT_EQ(a.neighbors[i], b.neighbors[i]);
}

TEST(Symmetrize, AddsMissingReverseEdgesAndSelfLoops) {
  NeighborGraph g;
  g.n = 3;
  g.neighbors = {{1}, {0}, {0}};  // 2->0 present, 0->2 absent
  const NeighborGraph s = rdr::symmetrize(g);
  EXPECT_TRUE(s.symmetrized);
  EXPECT_EQ(s.neighbors[0], (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(s.neighbors[1], (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(s.neighbors[2], (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(s.k_h, (std::vector<std::size_t>{3, 2, 2}));
}

TEST(Symmetrize, MatchesAdjacencyMatrixOracle) {
  const Matrix x = test_util::random_matrix(30, 3, 99);
  const NeighborGraph pre = rdr::exact_knn(x, 4);
  const NeighborGraph post = rdr::symmetrize(pre);
  // Oracle: pattern of max(A, A^T) + I.
  std::vector<std::vector<bool>> a(30, std::vector<bool>(30, false));
  for (std::size_t i = 0; i < 30; ++i) {
    for (std::size_t j : pre.neighbors[i]) a[i][j] = true;
  }
  for (std::size_t i = 0; i < 30; ++i) {
    std::set<std::size_t> expect;
    expect.insert(i);
    for (std::size_t j = 0; j < 30; ++j) {
      if (a[i][j] || a[j][i]) expect.insert(j);
    }
    const std::vector<std::size_t> want(expect.begin(), expect.end());
    EXPECT_EQ(post.neighbors[i], want) << "i=" << i;
    EXPECT_GE(post.k_h[i], 1u);
  }
  // Symmetry invariant.
  for (std::size_t i = 0; i < 30; ++i) {
    for (std::size_t j : post.neighbors[i]) {
      EXPECT_TRUE(std::binary_search(post.neighbors[j].begin(), post.neighbors[j].end(), i));
    }
  }
}

TEST(KnnClassify, CoincidentPointTakesItsLabel) {
  const Matrix train = matrix_from({{0.0}, {10.0}});
  const Matrix test = matrix_from({{10.0}});
  EXPECT_EQ(rdr::knn_classify(train, {3, 7}, test, 1), (std::vector<int>{7}));
}

TEST(KnnClassify, MatchesBruteForceVoteOnTwoBlobs) {
  std::vector<int> labels;
  const Matrix train = blobs(15, 2, 1, 0.5, 7, &labels);
  const Matrix test = blobs(8, 2, 1, 0.5, 8);
  const std::vector<int> got = rdr::knn_classify(train, labels, test, 3);
  for (std::size_t i = 0; i < test.rows(); ++i) {
    const std::vector<std::size_t> nn = [&] {
      std::vector<std::pair<double, std::size_t>> d;
      for (std::size_t j = 0; j < train.rows(); ++j) {
        const double diff = test(i, 0) - train(j, 0);
        d.emplace_back(diff * diff, j);
      }
      std::sort(d.begin(), d.end());
      return std::vector<std::size_t>{d[0].second, d[1].second, d[2].second};
    }();
    int votes0 = 0;
    for (std::size_t j : nn) votes0 += labels[j] == 0 ? 1 : 0;
    const int expect = votes0 >= 2 ? 0 : 1;
    EXPECT_EQ(got[i], expect) << "i=" << i;
  }
}

TEST(KnnClassify, UniformLabels) {
  const Matrix train = test_util::random_matrix(12, 2, 5);
  const Matrix test = test_util::random_matrix(4, 2, 6);
  const std::vector<int> labels(12, 9);
  for (int c : rdr::knn_classify(train, labels, test, 5)) EXPECT_EQ(c, 9);
}

TEST(KnnClassify, VoteTieGoesToSmallestClass) {
  const Matrix train = matrix_from({{-1.0}, {1.0}});
  const Matrix test = matrix_from({{0.0}});
  EXPECT_EQ(rdr::knn_classify(train, {2, 1}, test, 2), (std::vector<int>{1}));
  EXPECT_EQ(rdr::knn_classify(train, {1, 2}, test, 2), (std::vector<int>{1}));
}

TEST(KnnClassify, PerfectOnSeparatedBlobs) {
  std::vector<int> labels;
  const Matrix train = blobs(12, 4, 6, 0.5, 21, &labels);
  std::vector<int> test_labels;
  const Matrix test = blobs(5, 4, 6, 0.5, 21, &test_labels);  // same centers (same seed)
  for (std::size_t k : {1u, 5u, 11u}) {
    const std::vector<int> pred = rdr::knn_classify(train, labels, test, k);
    for (std::size_t i = 0; i < pred.size(); ++i) EXPECT_EQ(pred[i], test_labels[i]);
  }
}
