#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ccq/densemath.hpp"

namespace ccq {

using BigInt = boost::multiprecision::cpp_int;

struct Gate {
  std::string label;
  std::size_t arity = 1;
  CMatrix unitary;  // first listed wire is the most significant
};

class GateSet {
 public:
  GateSet(std::string name, std::vector<Gate> gates);

  const std::string& name() const { return name_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  std::size_t max_arity() const { return max_arity_; }
  const Gate& find(const std::string& label) const;

 private:
  std::string name_;
  std::vector<Gate> gates_;
  std::size_t max_arity_ = 0;
};

// Named single gates: I, H, X, Y, Z, S, Sdg, T, Tdg, CNOT, CZ, SWAP.
Gate builtin_gate(const std::string& name);

// clifford_hsc = {H, S, CNOT}, universal_htc = {H, T, CNOT}. "custom" must
// come from parse_gate_set.
GateSet builtin_gate_set(const std::string& name);

// Block syntax, one statement per line:
//   name = mine
//   gate LABEL = builtin NAME
//   gate LABEL = matrix ARITY (re,im) (re,im) ...
GateSet parse_gate_set(const std::string& text);

struct GateOp {
  std::string label;
  std::vector<std::size_t> wires;
};

struct Circuit {
  std::size_t wires = 0;
  std::vector<GateOp> ops;

  std::size_t gate_count() const { return ops.size(); }
  bool touches(std::size_t wire) const;
};

// Linear syntax "H(0);CNOT(0,1)"; empty string is the empty circuit.
std::string to_linear(const Circuit& c);
Circuit parse_linear(const std::string& text, std::size_t wires);

// Applies a gate to every column of `m` (a 2^N x cols matrix), in place.
void apply_gate(CMatrix& m, const CMatrix& gate, const std::vector<std::size_t>& wires,
                std::size_t n_wires);

CMatrix synthesize(const Circuit& c, const GateSet& gs);

struct EnumerationBudget {
  std::size_t G = 0;      // max gate count
  std::size_t n = 1;      // system wires
  std::size_t a_max = 0;  // max ancilla wires
  double dedup_tol = 1e-8;
  std::size_t a_min = 0;  // smallest ancilla count enumerated
};

struct EnumerationCaps {
  std::size_t max_wires = 12;
  std::size_t max_gates = 6;
};

struct EnumeratedCircuit {
  Circuit circuit;       // minimal gate count representative
  CMatrix unitary;       // on circuit.wires = n + ancillas
  std::size_t ancillas = 0;
};

// Phase fixed by making the first near-maximal-magnitude entry real positive.
CMatrix phase_canonical(const CMatrix& u);
// min over phi of ||a - e^{i phi} b||_F
double phase_distance(const CMatrix& a, const CMatrix& b);

// Unitaries reachable with <= G gates, deduplicated up to global phase,
// one list per ancilla count a_min..a_max (merged in that order). For a > a_min
// only circuits acting on the last ancilla wire are kept, so entries with
// different ancilla counts are distinct circuit descriptions.
std::vector<EnumeratedCircuit> enumerate_circuits(const GateSet& gs,
                                                  const EnumerationBudget& budget,
                                                  const EnumerationCaps& caps = {});

// sum_{m=0}^{G} (|gs| (n + l G)^l)^m
BigInt count_bound(const GateSet& gs, std::size_t n, std::size_t G);

}  // namespace ccq
