#pragma once

#include <cstdint>

#include "ccq/densemath.hpp"

namespace ccq {

// Counter-based generator: draw i of stream s under seed k is a pure
// function of (k, s, i), so per-sample streams are schedule independent.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Independent generator for sample index `index` within this stream.
  SeededRng substream(std::uint64_t index) const;

  std::uint64_t next_u64();
  double uniform();              // in (0, 1)
  double normal();               // standard real Gaussian
  cplx complex_normal();         // E|z|^2 = 1
  std::size_t below(std::size_t n);  // uniform on [0, n)

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

CMatrix random_hermitian(std::size_t d, SeededRng& rng);
CMatrix random_ginibre(std::size_t rows, std::size_t cols, SeededRng& rng);
DensityOperator random_density(std::size_t d, SeededRng& rng);  // full rank, Hilbert-Schmidt

}  // namespace ccq
