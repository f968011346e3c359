#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "rdr/matrix.hpp"

namespace rdr {

// Deterministic random stream keyed by (seed, stream id).  Two streams with
// the same key produce the identical draw sequence; distinct keys give
// independent sequences.  Child streams are derived from labels or indices
// without consuming any parent state, so adding a consumer never perturbs
// the draws seen by existing ones.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  RngStream derive(std::string_view label) const;
  RngStream derive(std::uint64_t index) const;

  std::uint64_t next_u64();
  double uniform01();       // [0, 1)
  double uniform_open01();  // (0, 1], safe under log
  double normal();          // standard normal, Marsaglia polar transform
  double exponential();     // rate 1
  std::uint64_t uniform_below(std::uint64_t n);  // uniform on {0..n-1}

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::mt19937_64 gen_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// n x p matrix of iid standard normals drawn from rng.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, RngStream& rng);

}  // namespace rdr
