#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "ccq/config.hpp"
#include "ccq/densemath.hpp"
#include "ccq/matrix_io.hpp"
#include "ccq/rng.hpp"

using namespace ccq;
using Catch::Matchers::WithinAbs;

namespace {

CMatrix pauli_x() {
  CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

CMatrix diag(std::initializer_list<double> v) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(i, i) = x, ++i;
  return m;
}

// Independent partial trace by explicit index sums over a bipartition.
CMatrix naive_trace_second(const CMatrix& m, std::size_t dA, std::size_t dB) {
  CMatrix r = CMatrix::Zero(static_cast<Eigen::Index>(dA), static_cast<Eigen::Index>(dA));
  for (std::size_t i = 0; i < dA; ++i)
    for (std::size_t j = 0; j < dA; ++j)
      for (std::size_t b = 0; b < dB; ++b)
        r(i, j) += m(static_cast<Eigen::Index>(i * dB + b), static_cast<Eigen::Index>(j * dB + b));
  return r;
}

}  // namespace

TEST_CASE("kron of identities and basis projectors") {
  CHECK(max_abs(kron(CMatrix(CMatrix::Identity(2, 2)), CMatrix(CMatrix::Identity(2, 2))) - CMatrix::Identity(4, 4)) == 0);
  CHECK(max_abs(kron(basis_projector(2, 0), basis_projector(2, 1)) - diag({0, 1, 0, 0})) == 0);
}

TEST_CASE("X tensor X flips both qubits") {
  const CMatrix xx = kron(pauli_x(), pauli_x());
  const CVector out = xx * basis_ket(4, 0);
  CHECK(std::abs(out(3) - cplx(1, 0)) < 1e-15);
  CHECK(out.norm() == 1.0);
}

TEST_CASE("partial trace examples") {
  const DensityOperator omega = max_entangled(2).density();
  const DensityOperator red = partial_trace(omega, {0});
  CHECK(max_abs(red.mat() - CMatrix::Identity(2, 2) / 2.0) < 1e-15);

  SeededRng rng(3);
  const DensityOperator a = random_density(2, rng), b = random_density(3, rng);
  CHECK(max_abs(partial_trace(kron(a, b), {0}).mat() - a.mat()) < 1e-12);
  CHECK(max_abs(partial_trace(kron(a, b), {1}).mat() - b.mat()) < 1e-12);

  const DensityOperator d(diag({0.1, 0.2, 0.3, 0.4}), {2, 2});
  CHECK(max_abs(partial_trace(d, {1}).mat() - diag({0.4, 0.6})) < 1e-15);
}

TEST_CASE("partial trace defining identity on random operators") {
  SeededRng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix x = random_ginibre(6, 6, rng);
    const CMatrix y = random_ginibre(2, 2, rng);
    const CMatrix trB = partial_trace(x, {2, 3}, {0});
    CHECK(max_abs(trB - naive_trace_second(x, 2, 3)) < 1e-12);
    const cplx lhs = (trB * y).trace();
    const cplx rhs = (x * kron(y, CMatrix::Identity(3, 3))).trace();
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("partial trace preserves the trace and composes") {
  SeededRng rng(5);
  const DensityOperator rho = random_density(8, rng);
  const DensityOperator r3(rho.mat(), {2, 2, 2});
  const auto once = partial_trace(r3, {0, 1});
  const auto twice = partial_trace(once, {0});
  CHECK(std::abs(once.mat().trace().real() - 1.0) < 1e-12);
  CHECK(max_abs(twice.mat() - partial_trace(r3, {0}).mat()) < 1e-12);
  CHECK(max_abs(partial_trace(once, {0, 1}).mat() - once.mat()) == 0);
}

TEST_CASE("partial trace rejects bad indices") {
  const DensityOperator rho(CMatrix::Identity(4, 4) / 4.0, {2, 2});
  CHECK_THROWS_AS(partial_trace(rho, {2}), DimensionError);
}

TEST_CASE("herm_eig examples") {
  auto e = herm_eig(diag({1, 3}));
  CHECK_THAT(e.values(0), WithinAbs(3, 1e-15));
  CHECK_THAT(e.values(1), WithinAbs(1, 1e-15));

  e = herm_eig(pauli_x());
  CHECK_THAT(e.values(0), WithinAbs(1, 1e-14));
  CHECK_THAT(e.values(1), WithinAbs(-1, 1e-14));
  const CVector plus = (basis_ket(2, 0) + basis_ket(2, 1)) / std::sqrt(2.0);
  CHECK_THAT(std::abs(plus.dot(e.vectors.col(0))), WithinAbs(1, 1e-14));

  CMatrix bad(2, 2);
  bad << 0, 1, 0, 0;
  CHECK_THROWS_AS(herm_eig(bad), InvariantError);
}

TEST_CASE("herm_eig reconstructs random Hermitian matrices") {
  SeededRng rng(17);
  for (std::size_t d : {2u, 5u, 8u, 16u}) {
    const CMatrix h = random_hermitian(d, rng);
    const auto e = herm_eig(h);
    const CMatrix rec = e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint();
    CHECK((rec - h).norm() < 1e-9);
    const auto n = static_cast<Eigen::Index>(d);
    CHECK((e.vectors.adjoint() * e.vectors - CMatrix::Identity(n, n)).norm() < 1e-9);
    for (Eigen::Index i = 1; i < n; ++i) CHECK(e.values(i - 1) >= e.values(i));
  }
}

TEST_CASE("tr_sqrt examples") {
  CHECK_THAT(tr_sqrt(CMatrix(CMatrix::Identity(2, 2) / 2.0)), WithinAbs(std::sqrt(2.0), 1e-14));
  CHECK_THAT(tr_sqrt(basis_projector(2, 0)), WithinAbs(1, 1e-14));
  CHECK_THAT(tr_sqrt(diag({0.9, 0.1})), WithinAbs(1.26491106406735, 1e-12));
}

TEST_CASE("tr_sqrt squared dominates the trace") {
  SeededRng rng(23);
  for (int i = 0; i < 20; ++i) {
    const DensityOperator rho = random_density(4, rng);
    CHECK(tr_sqrt(rho) * tr_sqrt(rho) >= 1.0 - 1e-12);
    const Ket psi(random_ginibre(4, 1, rng).col(0).normalized());
    CHECK_THAT(tr_sqrt(psi.density()), WithinAbs(1.0, 1e-7));
  }
}

TEST_CASE("tr_sqrt rejects clearly negative spectra") {
  CHECK_THROWS_AS(tr_sqrt(diag({1.0, -1e-3})), InvariantError);
  CHECK_NOTHROW(tr_sqrt(diag({1.0, -1e-10})));
}

TEST_CASE("max_entangled examples") {
  const Ket one = max_entangled(1);
  CHECK(one.dim() == 1);
  CHECK(std::abs(one.vec()(0) - cplx(1, 0)) < 1e-15);
  const Ket two = max_entangled(2);
  CHECK(std::abs(two.vec()(0) - cplx(M_SQRT1_2, 0)) < 1e-15);
  CHECK(std::abs(two.vec()(3) - cplx(M_SQRT1_2, 0)) < 1e-15);
  CHECK(std::abs(two.vec()(1)) == 0);
  CHECK_THROWS(max_entangled(0));
}

TEST_CASE("transpose trick on the maximally entangled state") {
  SeededRng rng(29);
  for (std::size_t d : {2u, 3u, 4u}) {
    const Ket om = max_entangled(d);
    const auto n = static_cast<Eigen::Index>(d);
    const CMatrix a = random_ginibre(d, d, rng);
    const cplx lhs = om.vec().dot(kron(a, CMatrix(CMatrix::Identity(n, n))) * om.vec());
    CHECK(std::abs(lhs - a.trace() / static_cast<double>(d)) < 1e-12);

    const DensityOperator r = random_density(d, rng), tau = random_density(d, rng);
    const double ov = overlap_pure(om, kron(r, tau)) * static_cast<double>(d);
    CHECK_THAT(ov, WithinAbs((r.mat() * tau.mat().transpose()).trace().real(), 1e-10));
  }
}

TEST_CASE("overlap_pure examples") {
  const Ket zero(basis_ket(2, 0));
  CHECK_THAT(overlap_pure(zero, DensityOperator(basis_projector(2, 0))), WithinAbs(1, 1e-15));
  CHECK_THAT(overlap_pure(zero, DensityOperator(CMatrix(CMatrix::Identity(2, 2) / 2.0))),
             WithinAbs(0.5, 1e-15));

  CVector v = CVector::Zero(4);
  v(0) = std::sqrt(0.9);
  v(3) = std::sqrt(0.1);
  const Ket s(v, {2, 2});
  const CVector om = max_entangled(2).vec();
  const double brute = std::norm(om.dot(v));
  CHECK_THAT(overlap_pure(max_entangled(2), s.density()), WithinAbs(brute, 1e-14));
  CHECK_THROWS_AS(overlap_pure(zero, s.density()), DimensionError);
}

TEST_CASE("trace_norm examples") {
  CHECK_THAT(trace_norm(CMatrix::Identity(2, 2)), WithinAbs(2, 1e-14));
  const CVector plus = (basis_ket(2, 0) + basis_ket(2, 1)) / std::sqrt(2.0);
  CHECK_THAT(trace_norm(basis_projector(2, 0) - plus * plus.adjoint()), WithinAbs(std::sqrt(2.0), 1e-14));
  CHECK(trace_norm(CMatrix::Zero(3, 3)) == 0);
}

TEST_CASE("density operator validation") {
  CHECK_THROWS_AS(DensityOperator(diag({0.5, 0.6})), InvariantError);
  CHECK_THROWS_AS(DensityOperator(diag({1.2, -0.2})), InvariantError);
  CHECK_THROWS_AS(DensityOperator(CMatrix(CMatrix::Identity(4, 4) / 4.0), {2, 3}), DimensionError);
  CVector v = CVector::Zero(2);
  v(0) = 1.1;
  CHECK_THROWS_AS(Ket(v), InvariantError);
}

TEST_CASE("permute_subsystems swaps tensor factors") {
  SeededRng rng(31);
  const CMatrix a = random_ginibre(2, 2, rng), b = random_ginibre(3, 3, rng);
  CHECK(max_abs(permute_subsystems(kron(a, b), {2, 3}, {1, 0}) - kron(b, a)) < 1e-14);
}

TEST_CASE("text matrix format round-trips exactly") {
  SeededRng rng(37);
  const CMatrix m = random_ginibre(3, 4, rng);
  std::stringstream ss;
  write_matrix(ss, m);
  std::string first;
  std::getline(ss, first);
  CHECK(first == "3 4");
  ss.seekg(0);
  CHECK(max_abs(read_matrix(ss) - m) == 0);
}

TEST_CASE("seeded streams are reproducible") {
  SeededRng a(99, 4), b(99, 4);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  SeededRng s1 = SeededRng(99, 4).substream(7), s2 = SeededRng(99, 4).substream(7);
  CHECK(s1.normal() == s2.normal());
  CHECK(SeededRng(99, 4).substream(7).next_u64() != SeededRng(99, 4).substream(8).next_u64());
}
