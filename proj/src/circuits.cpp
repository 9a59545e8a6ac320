#include "ccq/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace ccq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double unitarity_residual(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

GateSet::GateSet(std::string name, std::vector<Gate> gates)
    : name_(std::move(name)), gates_(std::move(gates)) {
  if (gates_.empty()) throw ConfigError("gate set '" + name_ + "' is empty");
  for (const auto& g : gates_) {
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << g.arity);
    if (g.arity == 0 || g.unitary.rows() != d || g.unitary.cols() != d) {
      throw ConfigError("gate '" + g.label + "' has inconsistent arity");
    }
    if (unitarity_residual(g.unitary) > tolerances().gate_unitary) {
      throw ConfigError("gate '" + g.label + "' is not unitary");
    }
    if (std::count_if(gates_.begin(), gates_.end(),
                      [&](const Gate& o) { return o.label == g.label; }) > 1) {
      throw ConfigError("duplicate gate label '" + g.label + "'");
    }
    max_arity_ = std::max(max_arity_, g.arity);
  }
}

const Gate& GateSet::find(const std::string& label) const {
  for (const auto& g : gates_) {
    if (g.label == label) return g;
  }
  throw ConfigError("gate '" + label + "' not in gate set '" + name_ + "'");
}

Gate builtin_gate(const std::string& name) {
  const double r = 1.0 / std::numbers::sqrt2;
  const cplx i(0, 1);
  CMatrix m;
  std::size_t arity = 1;
  if (name == "I") {
    m = CMatrix::Identity(2, 2);
  } else if (name == "H") {
    m.resize(2, 2);
    m << r, r, r, -r;
  } else if (name == "X") {
    m.resize(2, 2);
    m << 0, 1, 1, 0;
  } else if (name == "Y") {
    m.resize(2, 2);
    m << 0, -i, i, 0;
  } else if (name == "Z") {
    m.resize(2, 2);
    m << 1, 0, 0, -1;
  } else if (name == "S") {
    m.resize(2, 2);
    m << 1, 0, 0, i;
  } else if (name == "Sdg") {
    m.resize(2, 2);
    m << 1, 0, 0, -i;
  } else if (name == "T") {
    m.resize(2, 2);
    m << 1, 0, 0, std::polar(1.0, std::numbers::pi / 4);
  } else if (name == "Tdg") {
    m.resize(2, 2);
    m << 1, 0, 0, std::polar(1.0, -std::numbers::pi / 4);
  } else if (name == "CNOT") {
    arity = 2;
    m = CMatrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
  } else if (name == "CZ") {
    arity = 2;
    m = CMatrix::Identity(4, 4);
    m(3, 3) = -1;
  } else if (name == "SWAP") {
    arity = 2;
    m = CMatrix::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
  } else {
    throw ConfigError("unknown builtin gate '" + name + "'");
  }
  return Gate{name, arity, m};
}

GateSet builtin_gate_set(const std::string& name) {
  if (name == "clifford_hsc") {
    return GateSet(name, {builtin_gate("H"), builtin_gate("S"), builtin_gate("CNOT")});
  }
  if (name == "universal_htc") {
    return GateSet(name, {builtin_gate("H"), builtin_gate("T"), builtin_gate("CNOT")});
  }
  if (name == "custom") {
    throw ConfigError("gate set 'custom' requires a [gateset] block");
  }
  throw ConfigError("unknown gate set '" + name + "'");
}

GateSet parse_gate_set(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string name = "custom";
  std::vector<Gate> gates;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("gate set line " + std::to_string(lineno) + ": missing '='");
    }
    const std::string lhs = trim(line.substr(0, eq));
    const std::string rhs = trim(line.substr(eq + 1));
    if (lhs == "name") {
      name = rhs;
      continue;
    }
    std::istringstream ls(lhs);
    std::string kw, label;
    ls >> kw >> label;
    if (kw != "gate" || label.empty()) {
      throw ConfigError("gate set line " + std::to_string(lineno) + ": expected 'gate LABEL'");
    }
    std::istringstream rs(rhs);
    std::string kind;
    rs >> kind;
    if (kind == "builtin") {
      std::string bname;
      rs >> bname;
      Gate g = builtin_gate(bname);
      g.label = label;
      gates.push_back(std::move(g));
    } else if (kind == "matrix") {
      std::size_t arity = 0;
      if (!(rs >> arity) || arity == 0 || arity > 3) {
        throw ConfigError("gate '" + label + "': bad arity");
      }
      const auto d = static_cast<Eigen::Index>(std::size_t{1} << arity);
      CMatrix m(d, d);
      for (Eigen::Index k = 0; k < d * d; ++k) {
        std::string tok;
        if (!(rs >> tok)) throw ConfigError("gate '" + label + "': too few entries");
        double re = 0, im = 0;
        char c1 = 0, c2 = 0, c3 = 0;
        std::istringstream ts(tok);
        if (!(ts >> c1 >> re >> c2 >> im >> c3) || c1 != '(' || c2 != ',' || c3 != ')') {
          throw ConfigError("gate '" + label + "': bad entry '" + tok + "'");
        }
        m(k / d, k % d) = cplx(re, im);
      }
      std::string extra;
      if (rs >> extra) throw ConfigError("gate '" + label + "': too many entries");
      gates.push_back(Gate{label, arity, m});
    } else {
      throw ConfigError("gate '" + label + "': expected 'builtin' or 'matrix'");
    }
  }
  return GateSet(name, std::move(gates));
}

bool Circuit::touches(std::size_t wire) const {
  return std::any_of(ops.begin(), ops.end(), [&](const GateOp& op) {
    return std::find(op.wires.begin(), op.wires.end(), wire) != op.wires.end();
  });
}

std::string to_linear(const Circuit& c) {
  std::ostringstream os;
  for (std::size_t i = 0; i < c.ops.size(); ++i) {
    if (i) os << ';';
    os << c.ops[i].label << '(';
    for (std::size_t j = 0; j < c.ops[i].wires.size(); ++j) {
      if (j) os << ',';
      os << c.ops[i].wires[j];
    }
    os << ')';
  }
  return os.str();
}

Circuit parse_linear(const std::string& text, std::size_t wires) {
  Circuit c;
  c.wires = wires;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto lp = item.find('(');
    const auto rp = item.find(')');
    if (lp == std::string::npos || rp == std::string::npos || rp < lp) {
      throw ConfigError("bad gate application '" + item + "'");
    }
    GateOp op;
    op.label = trim(item.substr(0, lp));
    std::istringstream ws(item.substr(lp + 1, rp - lp - 1));
    std::string w;
    while (std::getline(ws, w, ',')) {
      try {
        op.wires.push_back(static_cast<std::size_t>(std::stoul(trim(w))));
      } catch (const std::exception&) {
        throw ConfigError("bad wire index in '" + item + "'");
      }
    }
    for (auto x : op.wires) {
      if (x >= wires) throw ConfigError("wire index out of range in '" + item + "'");
    }
    c.ops.push_back(std::move(op));
  }
  return c;
}

void apply_gate(CMatrix& m, const CMatrix& gate, const std::vector<std::size_t>& wires,
                std::size_t n_wires) {
  const std::size_t l = wires.size();
  const std::size_t gd = std::size_t{1} << l;
  if (static_cast<std::size_t>(gate.rows()) != gd) {
    throw DimensionError("gate arity does not match wire count");
  }
  for (std::size_t a = 0; a < l; ++a) {
    if (wires[a] >= n_wires) throw DimensionError("wire index out of range");
    for (std::size_t b = a + 1; b < l; ++b) {
      if (wires[a] == wires[b]) throw DimensionError("wire collision inside gate application");
    }
  }
  const std::size_t dim = std::size_t{1} << n_wires;
  if (static_cast<std::size_t>(m.rows()) != dim) throw DimensionError("state size mismatch");
  std::vector<std::size_t> bit(l);
  std::size_t mask = 0;
  for (std::size_t a = 0; a < l; ++a) {
    bit[a] = std::size_t{1} << (n_wires - 1 - wires[a]);
    mask |= bit[a];
  }
  std::vector<std::size_t> offs(gd, 0);
  for (std::size_t s = 0; s < gd; ++s) {
    for (std::size_t a = 0; a < l; ++a) {
      if (s & (std::size_t{1} << (l - 1 - a))) offs[s] |= bit[a];
    }
  }
  std::vector<cplx> in(gd);
  for (Eigen::Index col = 0; col < m.cols(); ++col) {
    for (std::size_t base = 0; base < dim; ++base) {
      if (base & mask) continue;
      for (std::size_t s = 0; s < gd; ++s) in[s] = m(static_cast<Eigen::Index>(base + offs[s]), col);
      for (std::size_t r = 0; r < gd; ++r) {
        cplx acc = 0;
        for (std::size_t s = 0; s < gd; ++s) {
          acc += gate(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) * in[s];
        }
        m(static_cast<Eigen::Index>(base + offs[r]), col) = acc;
      }
    }
  }
}

CMatrix synthesize(const Circuit& c, const GateSet& gs) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << c.wires);
  CMatrix u = CMatrix::Identity(dim, dim);
  for (const auto& op : c.ops) {
    const Gate& g = gs.find(op.label);
    if (op.wires.size() != g.arity) {
      throw ConfigError("gate '" + op.label + "' applied to wrong number of wires");
    }
    apply_gate(u, g.unitary, op.wires, c.wires);
  }
  if (unitarity_residual(u) > tolerances().unitary) {
    throw InvariantError("synthesized circuit is not unitary: " + to_linear(c));
  }
  return u;
}

CMatrix phase_canonical(const CMatrix& u) {
  const double mx = max_abs(u);
  if (mx == 0) return u;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      const cplx z = u(i, j);
      if (std::abs(z) >= mx - 1e-6) return u * (std::conj(z) / std::abs(z));
    }
  }
  return u;
}

double phase_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("phase_distance: shape mismatch");
  // Best phase aligns <a, b>; evaluate the residual directly to avoid cancellation.
  const cplx ip = (a.conjugate().cwiseProduct(b)).sum();
  const cplx phase = std::abs(ip) > 0 ? std::conj(ip) / std::abs(ip) : cplx(1, 0);
  return (a - phase * b).norm();
}

namespace {

std::uint64_t hash_rounded(const CMatrix& m) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](long long v) {
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<std::uint64_t>(v >> (8 * b)) & 0xffULL;
      h *= 1099511628211ULL;
    }
  };
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    mix(std::llround(m.data()[i].real() * 1e8));
    mix(std::llround(m.data()[i].imag() * 1e8));
  }
  return h;
}

// Tuples of distinct wires of the given length, lexicographic order.
std::vector<std::vector<std::size_t>> wire_tuples(std::size_t n_wires, std::size_t arity) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  std::vector<bool> used(n_wires, false);
  auto rec = [&](auto&& self) -> void {
    if (cur.size() == arity) {
      out.push_back(cur);
      return;
    }
    for (std::size_t w = 0; w < n_wires; ++w) {
      if (used[w]) continue;
      used[w] = true;
      cur.push_back(w);
      self(self);
      cur.pop_back();
      used[w] = false;
    }
  };
  rec(rec);
  return out;
}

std::vector<EnumeratedCircuit> enumerate_fixed(const GateSet& gs, std::size_t n_wires,
                                               std::size_t G, double tol) {
  struct Entry {
    Circuit circuit;
    CMatrix unitary;
  };
  std::vector<Entry> found;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> index;

  auto insert = [&](Circuit c, CMatrix u) -> bool {
    CMatrix canon = phase_canonical(u);
    const std::uint64_t h = hash_rounded(canon);
    auto& bucket = index[h];
    for (auto idx : bucket) {
      if (phase_distance(found[idx].unitary, canon) < tol) return false;
    }
    bucket.push_back(found.size());
    found.push_back(Entry{std::move(c), std::move(canon)});
    return true;
  };

  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_wires);
  insert(Circuit{n_wires, {}}, CMatrix::Identity(dim, dim));

  struct Move {
    const Gate* gate;
    std::vector<std::size_t> wires;
  };
  std::vector<Move> moves;
  for (const auto& g : gs.gates()) {
    if (g.arity > n_wires) continue;
    for (auto& t : wire_tuples(n_wires, g.arity)) moves.push_back(Move{&g, t});
  }

  std::size_t lo = 0;
  for (std::size_t m = 1; m <= G; ++m) {
    const std::size_t hi = found.size();
    for (std::size_t p = lo; p < hi; ++p) {
      for (const auto& mv : moves) {
        CMatrix u = found[p].unitary;
        apply_gate(u, mv.gate->unitary, mv.wires, n_wires);
        Circuit c = found[p].circuit;
        c.ops.push_back(GateOp{mv.gate->label, mv.wires});
        insert(std::move(c), std::move(u));
      }
    }
    lo = hi;
    if (lo == found.size()) break;  // closed under the gate set
  }

  std::vector<EnumeratedCircuit> out;
  out.reserve(found.size());
  for (auto& e : found) out.push_back(EnumeratedCircuit{std::move(e.circuit), std::move(e.unitary), 0});
  return out;
}

}  // namespace

std::vector<EnumeratedCircuit> enumerate_circuits(const GateSet& gs,
                                                  const EnumerationBudget& budget,
                                                  const EnumerationCaps& caps) {
  if (budget.a_max > gs.max_arity() * budget.G && budget.a_max > budget.a_min) {
    throw ConfigError("ancilla budget a_max exceeds l*G active-ancilla bound");
  }
  if (budget.a_min > budget.a_max) throw ConfigError("a_min exceeds a_max");
  if (budget.n + budget.a_max > caps.max_wires) {
    throw CapExceeded("enumeration exceeds wire cap of " + std::to_string(caps.max_wires));
  }
  if (budget.G > caps.max_gates) {
    throw CapExceeded("enumeration exceeds gate cap of " + std::to_string(caps.max_gates));
  }
  if (budget.n + budget.a_min == 0) throw ConfigError("enumeration needs at least one wire");
  std::vector<EnumeratedCircuit> out;
  for (std::size_t a = budget.a_min; a <= budget.a_max; ++a) {
    const std::size_t n_wires = budget.n + a;
    auto list = enumerate_fixed(gs, n_wires, budget.G, budget.dedup_tol);
    for (auto& e : list) {
      if (a > budget.a_min && !e.circuit.touches(n_wires - 1)) continue;
      e.ancillas = a;
      out.push_back(std::move(e));
    }
  }
  return out;
}

BigInt count_bound(const GateSet& gs, std::size_t n, std::size_t G) {
  const std::size_t l = gs.max_arity();
  BigInt base = BigInt(n + l * G);
  BigInt per_gate = BigInt(gs.size()) * boost::multiprecision::pow(base, static_cast<unsigned>(l));
  BigInt total = 0, term = 1;
  for (std::size_t m = 0; m <= G; ++m) {
    total += term;
    term *= per_gate;
  }
  return total;
}

}  // namespace ccq
