#include <catch_amalgamated.hpp>

#include <cmath>

#include "ccq/circuits.hpp"
#include "ccq/config.hpp"

using namespace ccq;

namespace {

GateSet only(std::initializer_list<const char*> names) {
  std::vector<Gate> gates;
  for (const char* n : names) gates.push_back(builtin_gate(n));
  return GateSet("test", gates);
}

// Closed-form bound evaluated with plain integers.
long long bound_by_hand(long long gates, long long n, long long l, long long G) {
  long long base = gates;
  for (long long i = 0; i < l; ++i) base *= n + l * G;
  long long sum = 0, term = 1;
  for (long long m = 0; m <= G; ++m, term *= base) sum += term;
  return sum;
}

}  // namespace

TEST_CASE("builtin gate sets") {
  const GateSet c = builtin_gate_set("clifford_hsc");
  CHECK(c.size() == 3);
  CHECK(c.max_arity() == 2);
  CHECK_NOTHROW(c.find("H"));
  CHECK_NOTHROW(c.find("S"));
  CHECK_NOTHROW(c.find("CNOT"));
  const GateSet u = builtin_gate_set("universal_htc");
  CHECK(u.size() == 3);
  CHECK(u.max_arity() == 2);
  CHECK_NOTHROW(u.find("T"));
  CHECK_THROWS_AS(builtin_gate_set("foo"), ConfigError);
  CHECK_THROWS_AS(builtin_gate_set("custom"), ConfigError);
}

TEST_CASE("every builtin gate is unitary") {
  for (const char* n : {"I", "H", "X", "Y", "Z", "S", "Sdg", "T", "Tdg", "CNOT", "CZ", "SWAP"}) {
    const Gate g = builtin_gate(n);
    const auto d = g.unitary.rows();
    CHECK((g.unitary.adjoint() * g.unitary - CMatrix::Identity(d, d)).norm() < 1e-12);
    CHECK(d == (Eigen::Index{1} << g.arity));
  }
}

TEST_CASE("synthesize examples") {
  const GateSet gs = builtin_gate_set("clifford_hsc");
  CHECK(max_abs(synthesize(Circuit{2, {}}, gs) - CMatrix::Identity(4, 4)) == 0);
  CHECK(max_abs(synthesize(parse_linear("H(0)", 1), gs) - builtin_gate("H").unitary) < 1e-15);

  const CMatrix bell = synthesize(parse_linear("H(0);CNOT(0,1)", 2), gs);
  const CVector out = bell.col(0);
  CHECK(std::abs(out(0) - cplx(M_SQRT1_2, 0)) < 1e-15);
  CHECK(std::abs(out(3) - cplx(M_SQRT1_2, 0)) < 1e-15);
  CHECK(std::abs(out(1)) + std::abs(out(2)) == 0);
}

TEST_CASE("wire 0 is the most significant bit") {
  const GateSet gs = builtin_gate_set("clifford_hsc");
  const CMatrix u = synthesize(parse_linear("CNOT(1,0)", 2), gs);
  // |01> (control on wire 1 set) maps to |11>.
  CHECK(std::abs(u(3, 1) - cplx(1, 0)) < 1e-15);
}

TEST_CASE("synthesize errors") {
  const GateSet gs = builtin_gate_set("clifford_hsc");
  CHECK_THROWS_AS(synthesize(parse_linear("T(0)", 1), gs), ConfigError);
  CHECK_THROWS_AS(synthesize(Circuit{2, {GateOp{"CNOT", {0, 0}}}}, gs), DimensionError);
  CHECK_THROWS_AS(parse_linear("H(3)", 2), ConfigError);
}

TEST_CASE("linear syntax round trip") {
  const Circuit c = parse_linear("H(0);CNOT(0,2);S(1)", 3);
  CHECK(c.gate_count() == 3);
  CHECK(to_linear(c) == "H(0);CNOT(0,2);S(1)");
  CHECK(parse_linear("", 1).gate_count() == 0);
}

TEST_CASE("enumeration examples") {
  CHECK(enumerate_circuits(only({"H"}), {2, 1, 0}).size() == 2);
  CHECK(enumerate_circuits(only({"H", "S"}), {1, 1, 0}).size() == 3);
  const GateSet gs = builtin_gate_set("clifford_hsc");
  const auto g1 = enumerate_circuits(gs, {1, 1, 0});
  CHECK(g1.size() <= 28);
  CHECK(count_bound(gs, 1, 1) == 28);
  CHECK(count_bound(gs, 1, 0) == 1);
  CHECK(count_bound(gs, 3, 2) == bound_by_hand(3, 3, 2, 2));
}

TEST_CASE("enumeration stays below the counting bound") {
  const GateSet gs = builtin_gate_set("clifford_hsc");
  for (std::size_t n : {1u, 2u}) {
    for (std::size_t G : {0u, 1u, 2u, 3u}) {
      const std::size_t amax = G == 0 ? 0 : 1;
      const auto list = enumerate_circuits(gs, {G, n, amax});
      CHECK(BigInt(list.size()) <= count_bound(gs, n, G));
    }
  }
}

TEST_CASE("enumeration output is unitary, minimal and phase-distinct") {
  const GateSet gs = builtin_gate_set("clifford_hsc");
  const auto list = enumerate_circuits(gs, {3, 2, 0});
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& e = list[i];
    const auto d = e.unitary.rows();
    CHECK((e.unitary.adjoint() * e.unitary - CMatrix::Identity(d, d)).norm() < 1e-10);
    CHECK(phase_distance(synthesize(e.circuit, gs), e.unitary) < 1e-8);
    if (i > 0) CHECK(list[i - 1].circuit.gate_count() <= e.circuit.gate_count());
    for (std::size_t j = 0; j < i; ++j) CHECK(phase_distance(list[j].unitary, e.unitary) >= 1e-8);
  }
  // H S S H = X needs 4 gates; S S = Z needs 2.
  bool found_z = false;
  const CMatrix z = kron(builtin_gate("Z").unitary, CMatrix(CMatrix::Identity(2, 2)));
  for (const auto& e : list) {
    if (phase_distance(e.unitary, z) < 1e-8) {
      found_z = true;
      CHECK(e.circuit.gate_count() == 2);
    }
  }
  CHECK(found_z);
}

TEST_CASE("enumeration is deterministic") {
  const GateSet gs = builtin_gate_set("universal_htc");
  const auto a = enumerate_circuits(gs, {2, 2, 1});
  const auto b = enumerate_circuits(gs, {2, 2, 1});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(to_linear(a[i].circuit) == to_linear(b[i].circuit));
    CHECK(a[i].ancillas == b[i].ancillas);
    CHECK(max_abs(a[i].unitary - b[i].unitary) == 0);
  }
}

TEST_CASE("phase canonicalisation") {
  const CMatrix h = builtin_gate("H").unitary;
  const CMatrix rotated = h * std::polar(1.0, 0.7);
  CHECK(max_abs(phase_canonical(h) - phase_canonical(rotated)) < 1e-14);
  CHECK(phase_distance(h, rotated) < 1e-14);
  CHECK(phase_distance(h, builtin_gate("X").unitary) > 0.5);
}

TEST_CASE("enumeration caps") {
  const GateSet gs = builtin_gate_set("clifford_hsc");
  CHECK_THROWS_AS(enumerate_circuits(gs, {7, 1, 0}), CapExceeded);
  CHECK_THROWS_AS(enumerate_circuits(gs, {1, 11, 2}), CapExceeded);
  CHECK_THROWS_AS(enumerate_circuits(gs, {1, 1, 3}), ConfigError);
}

TEST_CASE("custom gate set block") {
  const GateSet gs = parse_gate_set(
      "name = mine\n"
      "gate H = builtin H\n"
      "gate Q = matrix 1 (0,0) (1,0) (1,0) (0,0)\n");
  CHECK(gs.name() == "mine");
  CHECK(gs.size() == 2);
  CHECK(max_abs(gs.find("Q").unitary - builtin_gate("X").unitary) == 0);
  CHECK_THROWS_AS(parse_gate_set("gate Q = matrix 1 (1,0) (1,0) (1,0) (1,0)\n"), ConfigError);
  CHECK_THROWS_AS(parse_gate_set("gate Q = builtin NOPE\n"), ConfigError);
}
