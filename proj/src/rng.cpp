#include "ccq/rng.hpp"

#include <cmath>
#include <numbers>

namespace ccq {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SeededRng SeededRng::substream(std::uint64_t index) const {
  return SeededRng(seed_, splitmix64(stream_ ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

std::uint64_t SeededRng::next_u64() {
  const std::uint64_t key = splitmix64(seed_ ^ splitmix64(stream_));
  return splitmix64(key + splitmix64(counter_++));
}

double SeededRng::uniform() {
  // 53 random bits, shifted off zero
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return r * std::cos(th);
}

cplx SeededRng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return cplx(re, im) * std::sqrt(0.5);
}

std::size_t SeededRng::below(std::size_t n) {
  if (n == 0) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

CMatrix random_ginibre(std::size_t rows, std::size_t cols, SeededRng& rng) {
  CMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.complex_normal();
  }
  return g;
}

CMatrix random_hermitian(std::size_t d, SeededRng& rng) {
  const CMatrix g = random_ginibre(d, d, rng);
  return (g + g.adjoint()) * 0.5;
}

DensityOperator random_density(std::size_t d, SeededRng& rng) {
  const CMatrix g = random_ginibre(d, d, rng);
  CMatrix r = g * g.adjoint();
  r /= r.trace().real();
  return DensityOperator(r, Dims{d});
}

}  // namespace ccq
