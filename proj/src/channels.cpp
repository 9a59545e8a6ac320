#include "ccq/channels.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>

namespace ccq {

namespace {

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

std::size_t place_bits(std::size_t value, const Indices& wires, std::size_t n_wires) {
  std::size_t idx = 0;
  const std::size_t l = wires.size();
  for (std::size_t a = 0; a < l; ++a) {
    if (value & (std::size_t{1} << (l - 1 - a))) idx |= std::size_t{1} << (n_wires - 1 - wires[a]);
  }
  return idx;
}

std::string join(const Indices& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

Indices parse_indices(const std::string& s) {
  Indices out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) out.push_back(static_cast<std::size_t>(std::stoul(tok)));
  }
  return out;
}

// Subsets of {0..n-1} of size k in lexicographic order.
std::vector<Indices> subsets(std::size_t n, std::size_t k) {
  std::vector<Indices> out;
  Indices cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t w = start; w < n; ++w) {
      cur.push_back(w);
      self(self, w + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

// Isometry columns U|b, 0_E>, one per input basis state.
CMatrix input_columns(const CMatrix& u, const Indices& in_wires, std::size_t n_wires) {
  const std::size_t d_in = std::size_t{1} << in_wires.size();
  CMatrix v(u.rows(), static_cast<Eigen::Index>(d_in));
  for (std::size_t b = 0; b < d_in; ++b) {
    v.col(static_cast<Eigen::Index>(b)) = u.col(static_cast<Eigen::Index>(place_bits(b, in_wires, n_wires)));
  }
  return v;
}

std::uint64_t fnv_rounded(const CMatrix& m, double scale) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](long long v) {
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<std::uint64_t>(v >> (8 * b)) & 0xffULL;
      h *= 1099511628211ULL;
    }
  };
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    mix(std::llround(m.data()[i].real() * scale));
    mix(std::llround(m.data()[i].imag() * scale));
  }
  return h;
}

// Coarse fingerprint of J = Y Y^dag used to bucket candidates.
std::uint64_t choi_fingerprint(const ChoiOperator& j) {
  const CMatrix& y = j.factor();
  const auto D = y.rows();
  CMatrix fp(D + 2, 1);
  for (Eigen::Index r = 0; r < D; ++r) fp(r, 0) = y.row(r).squaredNorm();
  CVector w1(D), w2(D);
  for (Eigen::Index r = 0; r < D; ++r) {
    const double t = static_cast<double>(r);
    w1(r) = cplx(std::cos(0.7 * t + 0.3), std::sin(1.3 * t + 0.1));
    w2(r) = cplx(std::cos(2.1 * t + 1.1), std::sin(0.4 * t + 0.9));
  }
  fp(D, 0) = (y.adjoint() * w1).squaredNorm();
  fp(D + 1, 0) = (y.adjoint() * w2).squaredNorm();
  return fnv_rounded(fp, 1e6);
}

}  // namespace

void validate(const ChannelSpec& spec) {
  const std::size_t n = spec.circuit.wires;
  auto partition = [n](const Indices& a, const Indices& b, const char* what) {
    std::vector<int> seen(n, 0);
    for (auto w : a) {
      if (w >= n) throw DimensionError(std::string(what) + ": wire out of range");
      ++seen[w];
    }
    for (auto w : b) {
      if (w >= n) throw DimensionError(std::string(what) + ": wire out of range");
      ++seen[w];
    }
    for (auto s : seen) {
      if (s != 1) throw DimensionError(std::string(what) + " wires do not partition the circuit");
    }
  };
  partition(spec.in_wires, spec.anc_wires, "input/ancilla");
  partition(spec.out_wires, spec.env_wires, "output/environment");
  if (!spec.gate_set) throw ConfigError("channel spec without gate set");
}

CMatrix stinespring(const ChannelSpec& spec) {
  validate(spec);
  const std::size_t n = spec.circuit.wires;
  const CMatrix u = synthesize(spec.circuit, *spec.gate_set);
  const std::size_t dA = spec.d_out(), dK = spec.d_env(), dB = spec.d_in();
  CMatrix v(static_cast<Eigen::Index>(dA * dK), static_cast<Eigen::Index>(dB));
  for (std::size_t b = 0; b < dB; ++b) {
    const auto col = static_cast<Eigen::Index>(place_bits(b, spec.in_wires, n));
    for (std::size_t a = 0; a < dA; ++a) {
      for (std::size_t k = 0; k < dK; ++k) {
        const std::size_t row = place_bits(a, spec.out_wires, n) | place_bits(k, spec.env_wires, n);
        v(static_cast<Eigen::Index>(a * dK + k), static_cast<Eigen::Index>(b)) =
            u(static_cast<Eigen::Index>(row), col);
      }
    }
  }
  const double iso = (v.adjoint() * v - CMatrix::Identity(v.cols(), v.cols())).norm();
  if (iso > 1e-9) throw InvariantError("Stinespring operator is not an isometry");
  return v;
}

std::vector<CMatrix> kraus_operators(const ChannelSpec& spec) {
  const CMatrix v = stinespring(spec);
  const auto dA = static_cast<Eigen::Index>(spec.d_out());
  const auto dK = static_cast<Eigen::Index>(spec.d_env());
  std::vector<CMatrix> ks;
  for (Eigen::Index k = 0; k < dK; ++k) {
    CMatrix K(dA, v.cols());
    for (Eigen::Index a = 0; a < dA; ++a) K.row(a) = v.row(a * dK + k);
    ks.push_back(std::move(K));
  }
  return ks;
}

CMatrix channel_apply(const ChannelSpec& spec, const CMatrix& x) {
  if (static_cast<std::size_t>(x.rows()) != spec.d_in() || x.rows() != x.cols()) {
    throw DimensionError("channel_apply: input dimension mismatch");
  }
  const CMatrix v = stinespring(spec);
  return partial_trace(v * x * v.adjoint(), Dims{spec.d_out(), spec.d_env()}, Indices{0});
}

DensityOperator channel_apply(const ChannelSpec& spec, const DensityOperator& rho) {
  return DensityOperator::trusted(channel_apply(spec, rho.mat()), Dims{spec.d_out()});
}

CMatrix dual_apply(const ChannelSpec& spec, const CMatrix& x) {
  if (static_cast<std::size_t>(x.rows()) != spec.d_out() || x.rows() != x.cols()) {
    throw DimensionError("dual_apply: input dimension mismatch");
  }
  const CMatrix v = stinespring(spec);
  const auto dK = static_cast<Eigen::Index>(spec.d_env());
  return v.adjoint() * kron(x, CMatrix::Identity(dK, dK)) * v;
}

ChoiOperator::ChoiOperator(CMatrix factor, std::size_t d_A, std::size_t d_B,
                           std::size_t gate_count, std::string label,
                           std::shared_ptr<const ChannelSpec> spec)
    : factor_(std::move(factor)),
      d_A_(d_A),
      d_B_(d_B),
      gate_count_(gate_count),
      label_(std::move(label)),
      spec_(std::move(spec)) {
  if (static_cast<std::size_t>(factor_.rows()) != d_A_ * d_B_) {
    throw DimensionError("Choi factor rows do not match d_A d_B");
  }
}

ChoiOperator ChoiOperator::from_matrix(const CMatrix& j, std::size_t d_A, std::size_t d_B,
                                       std::size_t gate_count, std::string label) {
  const auto ed = herm_eig(j);
  const double top = std::max(ed.values(0), 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ed.values.size(); ++i) {
    if (ed.values(i) < -tolerances().choi_psd) {
      throw InvariantError("Choi matrix '" + label + "' is not PSD");
    }
    if (ed.values(i) > 1e-13 * std::max(1.0, top)) keep.push_back(i);
  }
  CMatrix y(j.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    y.col(static_cast<Eigen::Index>(c)) = ed.vectors.col(keep[c]) * std::sqrt(ed.values(keep[c]));
  }
  return ChoiOperator(std::move(y), d_A, d_B, gate_count, std::move(label));
}

double ChoiOperator::expect(const CMatrix& rho) const {
  if (static_cast<std::size_t>(rho.rows()) != d_A_ * d_B_) {
    throw DimensionError("Choi expectation: state dimension mismatch");
  }
  return (factor_.adjoint() * rho * factor_).trace().real();
}

double ChoiOperator::expect_pure(const CVector& psi) const {
  if (static_cast<std::size_t>(psi.size()) != d_A_ * d_B_) {
    throw DimensionError("Choi expectation: ket dimension mismatch");
  }
  return (factor_.adjoint() * psi).squaredNorm();
}

double ChoiOperator::expect_id_tensor(const CMatrix& sigma_B) const {
  if (static_cast<std::size_t>(sigma_B.rows()) != d_B_) {
    throw DimensionError("Choi expectation: sigma_B dimension mismatch");
  }
  double s = 0;
  for (Eigen::Index k = 0; k < factor_.cols(); ++k) {
    RowMajorMap ym(factor_.col(k).data(), static_cast<Eigen::Index>(d_A_),
                   static_cast<Eigen::Index>(d_B_));
    s += (ym.conjugate() * sigma_B * ym.transpose()).trace().real();
  }
  return s;
}

CMatrix ChoiOperator::slice() const {
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(d_B_), static_cast<Eigen::Index>(d_B_));
  for (Eigen::Index k = 0; k < factor_.cols(); ++k) {
    RowMajorMap ym(factor_.col(k).data(), static_cast<Eigen::Index>(d_A_),
                   static_cast<Eigen::Index>(d_B_));
    out += ym.transpose() * ym.conjugate();
  }
  return out;
}

double ChoiOperator::lambda_max() const {
  if (factor_.cols() == 0) return 0.0;
  return ccq::lambda_max(factor_.adjoint() * factor_);
}

void check_choi_invariants(const ChoiOperator& j) {
  const auto dB = static_cast<Eigen::Index>(j.d_B());
  const double slice_err = max_abs(j.slice() - CMatrix::Identity(dB, dB));
  if (slice_err > tolerances().choi_slice) {
    throw InvariantError("Choi '" + j.label() + "': tr_A J != 1_B (residual " +
                         std::to_string(slice_err) + ")");
  }
  const double lmax = j.lambda_max() / static_cast<double>(j.d_A());
  if (lmax > 1.0 + tolerances().choi_psd) {
    throw InvariantError("Choi '" + j.label() + "': effect J/d_A exceeds identity");
  }
}

ChoiOperator choi_of(const ChannelSpec& spec, std::size_t d_A, std::size_t gate_count) {
  if (d_A != spec.d_out()) throw DimensionError("choi_of: d_A does not match channel output");
  const CMatrix v = stinespring(spec);
  const std::size_t dB = spec.d_in(), dK = spec.d_env();
  CMatrix y(static_cast<Eigen::Index>(d_A * dB), static_cast<Eigen::Index>(dK));
  for (std::size_t x = 0; x < d_A; ++x) {
    for (std::size_t b = 0; b < dB; ++b) {
      for (std::size_t k = 0; k < dK; ++k) {
        y(static_cast<Eigen::Index>(x * dB + b), static_cast<Eigen::Index>(k)) =
            std::conj(v(static_cast<Eigen::Index>(x * dK + k), static_cast<Eigen::Index>(b)));
      }
    }
  }
  auto shared = std::make_shared<const ChannelSpec>(spec);
  ChoiOperator j(std::move(y), d_A, dB, gate_count, to_linear(spec.circuit), shared);
  check_choi_invariants(j);
  return j;
}

CMatrix choi_schrodinger(const ChannelSpec& spec) {
  const std::size_t dB = spec.d_in(), dA = spec.d_out();
  CMatrix j = CMatrix::Zero(static_cast<Eigen::Index>(dB * dA), static_cast<Eigen::Index>(dB * dA));
  for (std::size_t x = 0; x < dB; ++x) {
    for (std::size_t y = 0; y < dB; ++y) {
      CMatrix e = CMatrix::Zero(static_cast<Eigen::Index>(dB), static_cast<Eigen::Index>(dB));
      e(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = 1;
      j.block(static_cast<Eigen::Index>(x * dA), static_cast<Eigen::Index>(y * dA),
              static_cast<Eigen::Index>(dA), static_cast<Eigen::Index>(dA)) = channel_apply(spec, e);
    }
  }
  return j;
}

CMatrix normalized_effect(const ChoiOperator& j) {
  return j.mat() / static_cast<double>(j.d_A());
}

double choi_effect_probability(const ChoiOperator& j, const DensityOperator& rho) {
  const std::size_t dA = j.d_A(), dB = j.d_B();
  if (rho.dim() != dA * dB) throw DimensionError("effect test: state dimension mismatch");
  if (!j.spec()) return j.expect(rho.mat()) / static_cast<double>(dA);
  // Apply the channel's Kraus operators to B, then project A A' onto |Omega>.
  const CVector omega = max_entangled(dA).vec();
  double p = 0;
  for (const auto& K : kraus_operators(*j.spec())) {
    const CMatrix op = kron(CMatrix::Identity(static_cast<Eigen::Index>(dA), static_cast<Eigen::Index>(dA)), K);
    const CVector w = op.adjoint() * omega;
    p += (w.adjoint() * rho.mat() * w)(0, 0).real();
  }
  return p;
}

double simulate_choi_effect_test(const ChoiOperator& j, const DensityOperator& rho,
                                 std::size_t shots, SeededRng& rng) {
  if (shots == 0) throw ConfigError("shots must be positive");
  const double p = std::clamp(choi_effect_probability(j, rho), 0.0, 1.0);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < shots; ++s) {
    if (rng.uniform() < p) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(shots);
}

double choi_distance(const ChoiOperator& a, const ChoiOperator& b) {
  // J_a - J_b = X D X^dag with X = [Y_a Y_b], D = diag(1, -1); its nonzero
  // spectrum is that of G^{1/2} D G^{1/2}, G = X^dag X.
  const auto ka = a.factor().cols(), kb = b.factor().cols();
  if (ka + kb == 0) return 0.0;
  CMatrix x(a.factor().rows(), ka + kb);
  x << a.factor(), b.factor();
  const CMatrix g = x.adjoint() * x;
  const CMatrix gh = psd_sqrt((g + g.adjoint()) * 0.5);
  Eigen::VectorXcd dvec(ka + kb);
  for (Eigen::Index i = 0; i < ka + kb; ++i) dvec(i) = i < ka ? 1.0 : -1.0;
  const CMatrix m = gh * dvec.asDiagonal() * gh;
  Eigen::SelfAdjointEigenSolver<CMatrix> es((m + m.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
  return es.eigenvalues().norm();
}

void add_deduplicated(ChoiSet& cs, std::vector<ChoiOperator> candidates, double tol) {
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> index;
  for (std::size_t i = 0; i < cs.generators.size(); ++i) {
    index[choi_fingerprint(cs.generators[i])].push_back(i);
  }
  for (auto& c : candidates) {
    const std::uint64_t h = choi_fingerprint(c);
    auto& bucket = index[h];
    bool dup = false;
    for (auto idx : bucket) {
      if (choi_distance(cs.generators[idx], c) < tol) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    bucket.push_back(cs.generators.size());
    cs.generators.push_back(std::move(c));
  }
}

ChoiSet generate_choi_set(std::shared_ptr<const GateSet> gs, const EnumerationBudget& budget,
                          std::size_t d_A, std::size_t d_B, const ChoiSetOptions& opts) {
  const std::size_t n_A = log2_exact(d_A), n_B = log2_exact(d_B);
  if (budget.n != n_B) throw ConfigError("budget.n must equal the number of B qubits");
  EnumerationBudget eb = budget;
  if (n_A > n_B) eb.a_min = std::max(eb.a_min, n_A - n_B);
  if (eb.a_min > eb.a_max) eb.a_max = eb.a_min;
  const auto circuits = enumerate_circuits(*gs, eb, opts.caps);

  ChoiSet cs;
  cs.budget = budget;
  cs.d_A = d_A;
  cs.d_B = d_B;
  std::vector<ChoiOperator> candidates;
  for (const auto& e : circuits) {
    const std::size_t N = e.circuit.wires;
    if (N < n_A) continue;
    std::vector<Indices> outs;
    if (opts.all_output_subsets) {
      outs = subsets(N, n_A);
    } else {
      Indices o(n_A);
      for (std::size_t i = 0; i < n_A; ++i) o[i] = i;
      outs.push_back(o);
    }
    for (const auto& out : outs) {
      ChannelSpec spec;
      spec.circuit = e.circuit;
      spec.gate_set = gs;
      for (std::size_t w = 0; w < n_B; ++w) spec.in_wires.push_back(w);
      for (std::size_t w = n_B; w < N; ++w) spec.anc_wires.push_back(w);
      spec.out_wires = out;
      for (std::size_t w = 0; w < N; ++w) {
        if (std::find(out.begin(), out.end(), w) == out.end()) spec.env_wires.push_back(w);
      }
      candidates.push_back(choi_of(spec, d_A, e.circuit.gate_count()));
    }
  }
  add_deduplicated(cs, std::move(candidates), budget.dedup_tol);
  return cs;
}

namespace {

CVector qubit_state(char s) {
  const double r = 1.0 / std::sqrt(2.0);
  CVector v(2);
  switch (s) {
    case '0': v << 1, 0; break;
    case '1': v << 0, 1; break;
    case '+': v << r, r; break;
    case 'i': v << r, cplx(0, r); break;
    default: throw ConfigError(std::string("unknown product-state symbol '") + s + "'");
  }
  return v;
}

CMatrix pauli(char p) {
  switch (p) {
    case 'I': return builtin_gate("I").unitary;
    case 'X': return builtin_gate("X").unitary;
    case 'Y': return builtin_gate("Y").unitary;
    case 'Z': return builtin_gate("Z").unitary;
    default: throw ConfigError(std::string("unknown Pauli symbol '") + p + "'");
  }
}

}  // namespace

ChoiOperator pauli_mp_generator(const std::string& states, const std::string& paulis, int sign) {
  if (states.size() != paulis.size() || states.empty()) {
    throw ConfigError("measure-and-prepare label length mismatch");
  }
  CMatrix sigma = CMatrix::Identity(1, 1), sigma0 = CMatrix::Identity(1, 1), q = CMatrix::Identity(1, 1);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const CVector v = qubit_state(states[i]);
    sigma = kron(sigma, CMatrix(v * v.adjoint()));
    sigma0 = kron(sigma0, basis_projector(2, 0));
    q = kron(q, pauli(paulis[i]));
  }
  const auto d = sigma.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  const CMatrix e = (id + static_cast<double>(sign) * q) * 0.5;
  const CMatrix j = kron(CMatrix(sigma.transpose()), e) + kron(CMatrix(sigma0.transpose()), CMatrix(id - e));
  std::string label = "mp:s=" + states + ",Q=" + (sign > 0 ? "+" : "-") + paulis;
  const auto dd = static_cast<std::size_t>(d);
  return ChoiOperator::from_matrix(j, dd, dd, 0, label);
}

ChoiSet pauli_mp_family(std::size_t n) {
  if (n == 0 || n > 3) throw CapExceeded("pauli_mp_family supports 1 <= n <= 3");
  const std::string syms = "01+i", pls = "IXYZ";
  std::size_t ns = 1;
  for (std::size_t i = 0; i < n; ++i) ns *= 4;
  std::vector<ChoiOperator> raw;
  for (std::size_t si = 0; si < ns; ++si) {
    std::string s(n, '0');
    for (std::size_t i = 0, x = si; i < n; ++i, x /= 4) s[n - 1 - i] = syms[x % 4];
    for (std::size_t qi = 0; qi < ns; ++qi) {
      std::string q(n, 'I');
      for (std::size_t i = 0, x = qi; i < n; ++i, x /= 4) q[n - 1 - i] = pls[x % 4];
      for (int sign : {+1, -1}) raw.push_back(pauli_mp_generator(s, q, sign));
    }
  }
  ChoiSet cs;
  cs.d_A = cs.d_B = std::size_t{1} << n;
  cs.budget.n = n;
  add_deduplicated(cs, std::move(raw), tolerances().dedup);
  return cs;
}

namespace {

// Real coordinates of a Hermitian matrix, isometric for the HS inner product.
Eigen::VectorXd herm_coords(const CMatrix& m) {
  const auto d = m.rows();
  Eigen::VectorXd v(d * d);
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < d; ++i) v(c++) = m(i, i).real();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      v(c++) = std::sqrt(2.0) * m(i, j).real();
      v(c++) = std::sqrt(2.0) * m(i, j).imag();
    }
  }
  return v;
}

}  // namespace

CompletenessRank informational_completeness_rank(const ChoiSet& cs) {
  if (cs.generators.empty()) throw ConfigError("completeness rank of empty set");
  const std::size_t D = cs.d_A * cs.d_B;
  const auto N = static_cast<Eigen::Index>(cs.generators.size());
  Eigen::MatrixXd coords(static_cast<Eigen::Index>(D * D), N);
  for (Eigen::Index i = 0; i < N; ++i) coords.col(i) = herm_coords(cs.generators[i].mat());
  Eigen::MatrixXd gram = N <= coords.rows() ? Eigen::MatrixXd(coords.transpose() * coords)
                                            : Eigen::MatrixXd(coords * coords.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  CompletenessRank r;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > tolerances().gram_rank * std::max(1.0, top)) ++r.rank;
  }
  r.full_dim = cs.d_A * cs.d_A * cs.d_B * cs.d_B - cs.d_B * cs.d_B + 1;
  r.full = r.rank == r.full_dim;
  return r;
}

ChoiSet tensor_choi_set(const ChoiSet& a, const ChoiSet& b) {
  ChoiSet out;
  out.d_A = a.d_A * b.d_A;
  out.d_B = a.d_B * b.d_B;
  out.budget = a.budget;
  out.budget.G = a.budget.G + b.budget.G;
  out.budget.n = a.budget.n + b.budget.n;
  const Indices map = permutation_map(Dims{a.d_A, a.d_B, b.d_A, b.d_B}, Indices{0, 2, 1, 3});
  std::vector<ChoiOperator> cands;
  for (const auto& ja : a.generators) {
    for (const auto& jb : b.generators) {
      const CMatrix y = kron(ja.factor(), jb.factor());
      CMatrix yp(y.rows(), y.cols());
      for (Eigen::Index r = 0; r < y.rows(); ++r) yp.row(static_cast<Eigen::Index>(map[r])) = y.row(r);
      cands.emplace_back(std::move(yp), out.d_A, out.d_B, ja.gate_count() + jb.gate_count(),
                         "(" + ja.label() + ")x(" + jb.label() + ")");
    }
  }
  add_deduplicated(out, std::move(cands), a.budget.dedup_tol);
  return out;
}

std::string content_hash(const CMatrix& m) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv_rounded(m, 1e8);
  return os.str();
}

std::string export_manifest(const ChoiSet& cs) {
  std::ostringstream os;
  os << "# choiset d_A=" << cs.d_A << " d_B=" << cs.d_B << " G=" << cs.budget.G
     << " n=" << cs.budget.n << " a_max=" << cs.budget.a_max << " count=" << cs.size() << '\n';
  for (const auto& j : cs.generators) {
    os << "gates=" << j.gate_count() << " hash=" << content_hash(j.mat());
    if (j.spec()) {
      const auto& s = *j.spec();
      os << " wires=" << s.circuit.wires << " anc=" << s.anc_wires.size()
         << " out=" << join(s.out_wires) << " circuit=" << to_linear(s.circuit);
    } else {
      os << " label=" << j.label();
    }
    os << '\n';
  }
  return os.str();
}

ChoiSet import_manifest(const std::string& text, std::shared_ptr<const GateSet> gs) {
  std::istringstream in(text);
  std::string line;
  ChoiSet cs;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::map<std::string, std::string> kv;
    std::istringstream ls(line[0] == '#' ? line.substr(1) : line);
    std::string tok;
    while (ls >> tok) {
      const auto eq = tok.find('=');
      if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    if (line[0] == '#') {
      if (kv.count("d_A") == 0 || kv.count("d_B") == 0) continue;
      cs.d_A = std::stoul(kv["d_A"]);
      cs.d_B = std::stoul(kv["d_B"]);
      cs.budget.G = std::stoul(kv["G"]);
      cs.budget.n = std::stoul(kv["n"]);
      cs.budget.a_max = std::stoul(kv["a_max"]);
      header = true;
      continue;
    }
    if (!header) throw ConfigError("manifest: missing header");
    ChoiOperator j = [&]() {
      if (kv.count("label")) {
        const std::string& l = kv["label"];
        const auto sp = l.find("s="), qp = l.find(",Q=");
        if (l.rfind("mp:", 0) != 0 || sp == std::string::npos || qp == std::string::npos) {
          throw ConfigError("manifest: cannot regenerate '" + l + "'");
        }
        const std::string s = l.substr(sp + 2, qp - sp - 2);
        const int sign = l[qp + 3] == '-' ? -1 : 1;
        return pauli_mp_generator(s, l.substr(qp + 4), sign);
      }
      const std::size_t wires = std::stoul(kv.at("wires"));
      const std::size_t anc = std::stoul(kv.at("anc"));
      ChannelSpec spec;
      spec.circuit = parse_linear(kv.count("circuit") ? kv["circuit"] : "", wires);
      spec.gate_set = gs;
      spec.out_wires = parse_indices(kv.at("out"));
      for (std::size_t w = 0; w < wires - anc; ++w) spec.in_wires.push_back(w);
      for (std::size_t w = wires - anc; w < wires; ++w) spec.anc_wires.push_back(w);
      for (std::size_t w = 0; w < wires; ++w) {
        if (std::find(spec.out_wires.begin(), spec.out_wires.end(), w) == spec.out_wires.end()) {
          spec.env_wires.push_back(w);
        }
      }
      return choi_of(spec, cs.d_A, spec.circuit.gate_count());
    }();
    if (content_hash(j.mat()) != kv["hash"]) {
      throw InvariantError("manifest: regenerated generator hash mismatch for '" + j.label() + "'");
    }
    cs.generators.push_back(std::move(j));
  }
  return cs;
}

PreparableStateSet preparable_states(const GateSet& gs, const EnumerationBudget& budget,
                                     std::size_t d_A, const EnumerationCaps& caps) {
  const std::size_t n_A = log2_exact(d_A);
  if (budget.n != n_A) throw ConfigError("budget.n must equal the number of A qubits");
  const auto circuits = enumerate_circuits(gs, budget, caps);
  PreparableStateSet out;
  for (const auto& e : circuits) {
    const CVector psi = e.unitary.col(0);
    const std::size_t N = e.circuit.wires;
    CMatrix rho = psi * psi.adjoint();
    if (N > n_A) rho = partial_trace(rho, Dims{d_A, std::size_t{1} << (N - n_A)}, Indices{0});
    bool dup = false;
    for (const auto& s : out.states) {
      if (frobenius_distance(s.mat(), rho) < budget.dedup_tol) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    out.states.push_back(DensityOperator::trusted(rho, Dims{d_A}));
    out.labels.push_back(to_linear(e.circuit) + (e.ancillas ? " anc=" + std::to_string(e.ancillas) : ""));
    out.gate_counts.push_back(e.circuit.gate_count());
  }
  return out;
}

FlaggedPovmSet flag_povm_set(const GateSet& gs, const EnumerationBudget& budget,
                             std::size_t d_B, std::size_t outcomes, const EnumerationCaps& caps) {
  const std::size_t n_B = log2_exact(d_B);
  const std::size_t n_o = log2_exact(outcomes);
  if (budget.n != n_B) throw ConfigError("budget.n must equal the number of B qubits");
  EnumerationBudget eb = budget;
  if (n_o > n_B) {
    eb.a_min = std::max(eb.a_min, n_o - n_B);
    eb.a_max = std::max(eb.a_max, eb.a_min);
  }
  const auto circuits = enumerate_circuits(gs, eb, caps);
  FlaggedPovmSet out;
  out.outcomes = outcomes;
  out.d_B = d_B;
  Indices in_wires(n_B);
  for (std::size_t w = 0; w < n_B; ++w) in_wires[w] = w;
  for (const auto& e : circuits) {
    const std::size_t N = e.circuit.wires;
    if (N < n_o) continue;
    const CMatrix v = input_columns(e.unitary, in_wires, N);
    Povm p;
    p.label = to_linear(e.circuit) + (e.ancillas ? " anc=" + std::to_string(e.ancillas) : "");
    p.gate_count = e.circuit.gate_count();
    const std::size_t shift = N - n_o;
    for (std::size_t i = 0; i < outcomes; ++i) {
      std::vector<Eigen::Index> sel;
      for (Eigen::Index r = 0; r < v.rows(); ++r) {
        if ((static_cast<std::size_t>(r) >> shift) == i) sel.push_back(r);
      }
      CMatrix vs(static_cast<Eigen::Index>(sel.size()), v.cols());
      for (std::size_t s = 0; s < sel.size(); ++s) vs.row(static_cast<Eigen::Index>(s)) = v.row(sel[s]);
      p.effects.push_back(vs.adjoint() * vs);
    }
    CMatrix total = CMatrix::Zero(static_cast<Eigen::Index>(d_B), static_cast<Eigen::Index>(d_B));
    for (const auto& E : p.effects) total += E;
    if (max_abs(total - CMatrix::Identity(total.rows(), total.cols())) > tolerances().povm) {
      throw InvariantError("POVM '" + p.label + "' is not complete");
    }
    bool dup = false;
    for (const auto& q : out.povms) {
      double d2 = 0;
      for (std::size_t i = 0; i < outcomes; ++i) d2 += (q.effects[i] - p.effects[i]).squaredNorm();
      if (std::sqrt(d2) < budget.dedup_tol) {
        dup = true;
        break;
      }
    }
    if (!dup) out.povms.push_back(std::move(p));
  }
  return out;
}

ChoiSet flagged_choi_set(const FlaggedPovmSet& povms, std::size_t labels) {
  if (labels == 0) throw ConfigError("flagged set needs at least one label");
  ChoiSet cs;
  cs.d_A = labels;
  cs.d_B = povms.d_B;
  const std::size_t o = povms.outcomes;
  std::size_t nf = 1;
  for (std::size_t i = 0; i < o; ++i) nf *= labels;
  const auto dB = static_cast<Eigen::Index>(povms.d_B);
  std::vector<ChoiOperator> cands;
  for (const auto& p : povms.povms) {
    for (std::size_t f = 0; f < nf; ++f) {
      std::vector<std::size_t> assign(o);
      for (std::size_t i = 0, x = f; i < o; ++i, x /= labels) assign[o - 1 - i] = x % labels;
      std::vector<CMatrix> ex(labels, CMatrix::Zero(dB, dB));
      for (std::size_t i = 0; i < o; ++i) ex[assign[i]] += p.effects[i];
      CMatrix j = CMatrix::Zero(static_cast<Eigen::Index>(labels) * dB, static_cast<Eigen::Index>(labels) * dB);
      for (std::size_t x = 0; x < labels; ++x) {
        j.block(static_cast<Eigen::Index>(x) * dB, static_cast<Eigen::Index>(x) * dB, dB, dB) = ex[x];
      }
      std::string lab = p.label + " |f=";
      for (std::size_t i = 0; i < o; ++i) lab += (i ? "," : "") + std::to_string(assign[i]);
      cands.push_back(ChoiOperator::from_matrix(j, labels, povms.d_B, p.gate_count, lab));
    }
  }
  add_deduplicated(cs, std::move(cands), tolerances().dedup);
  return cs;
}

}  // namespace ccq
