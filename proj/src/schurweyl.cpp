#include "ccq/schurweyl.hpp"

#include <cmath>
#include <sstream>

namespace ccq {

namespace {

using RMatrix = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

constexpr std::size_t kMaxCopies = 10;
constexpr std::size_t kMaxChannelCopies = 5;

double casimir_value(double j) { return j * (j + 1); }

std::size_t popcount(std::size_t x) {
  std::size_t c = 0;
  for (; x; x &= x - 1) ++c;
  return c;
}

std::size_t swap_bits(std::size_t x, std::size_t i, std::size_t j) {
  const std::size_t bi = (x >> i) & 1U, bj = (x >> j) & 1U;
  if (bi == bj) return x;
  return x ^ ((std::size_t{1} << i) | (std::size_t{1} << j));
}

// Collective lowering on k qubits with |0> as spin up.
RVec lower(const RVec& v, std::size_t k) {
  RVec out = RVec::Zero(v.size());
  for (Eigen::Index x = 0; x < v.size(); ++x) {
    if (v(x) == 0) continue;
    for (std::size_t b = 0; b < k; ++b) {
      const std::size_t bit = std::size_t{1} << b;
      if ((static_cast<std::size_t>(x) & bit) == 0) out(static_cast<Eigen::Index>(x | bit)) += v(x);
    }
  }
  return out;
}

std::size_t to_size(const BigInt& b) { return b.convert_to<std::size_t>(); }

CMatrix complexify(const RMatrix& m) { return m.cast<cplx>(); }

CMatrix reduced_A(const Ket& psi) {
  if (psi.dim() != 4) throw DimensionError("expected a two-qubit state");
  return partial_trace(CMatrix(psi.vec() * psi.vec().adjoint()), Dims{2, 2}, Indices{0});
}

}  // namespace

YoungDiagramTwoRow::YoungDiagramTwoRow(std::size_t l1, std::size_t l2) : lam1(l1), lam2(l2) {
  if (l2 > l1) throw DimensionError("Young diagram rows must be non-increasing");
}

std::string YoungDiagramTwoRow::str() const {
  std::ostringstream os;
  os << "(" << lam1 << "," << lam2 << ")";
  return os.str();
}

std::vector<YoungDiagramTwoRow> diagrams(std::size_t k) {
  if (k < 1 || k > kMaxCopies) throw ConfigError("diagrams: k must lie in [1, 10]");
  std::vector<YoungDiagramTwoRow> out;
  for (std::size_t j = 0; j <= k / 2; ++j) out.emplace_back(k - j, j);
  return out;
}

BigInt dim_unitary_irrep(const std::vector<std::size_t>& rows, std::size_t d) {
  std::vector<long long> lam;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i] > rows[i - 1]) throw DimensionError("partition rows must be non-increasing");
    if (rows[i] == 0) continue;
    lam.push_back(static_cast<long long>(rows[i]));
  }
  if (lam.size() > d) throw DimensionError("diagram has more rows than the local dimension");
  lam.resize(d, 0);
  BigInt num = 1, den = 1;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      num *= lam[i] - lam[j] + static_cast<long long>(j - i);
      den *= static_cast<long long>(j - i);
    }
  }
  return num / den;
}

BigInt dim_unitary_irrep(const YoungDiagramTwoRow& lam, std::size_t d) {
  return dim_unitary_irrep(std::vector<std::size_t>{lam.lam1, lam.lam2}, d);
}

BigInt dim_symmetric_irrep(const std::vector<std::size_t>& rows) {
  const std::size_t d = rows.size();
  std::size_t k = 0;
  for (std::size_t i = 0; i < d; ++i) {
    if (i > 0 && rows[i] > rows[i - 1]) throw DimensionError("partition rows must be non-increasing");
    k += rows[i];
  }
  auto factorial = [](std::size_t n) {
    BigInt f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= i;
    return f;
  };
  BigInt num = factorial(k), den = 1;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      num *= static_cast<long long>(rows[i]) - static_cast<long long>(rows[j]) +
             static_cast<long long>(j - i);
    }
    den *= factorial(rows[i] + d - 1 - i);
  }
  if (num % den != 0) throw InvariantError("dim_symmetric_irrep: non-integral dimension");
  return num / den;
}

BigInt dim_symmetric_irrep(const YoungDiagramTwoRow& lam) {
  return dim_symmetric_irrep(std::vector<std::size_t>{lam.lam1, lam.lam2});
}

Eigen::VectorXd SchurBlock::ket(std::size_t u, std::size_t v) const {
  return basis.col(static_cast<Eigen::Index>(u * dim_v + v));
}

Eigen::MatrixXd SchurBlockTable::schur_unitary() const {
  const auto n = static_cast<Eigen::Index>(dim());
  RMatrix U(n, n);
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    U.middleCols(c, b.basis.cols()) = b.basis;
    c += b.basis.cols();
  }
  if (c != n) throw InvariantError("Schur basis is not square");
  return U;
}

double SchurBlockTable::completeness_residual() const {
  const auto n = static_cast<Eigen::Index>(dim());
  RMatrix sum = RMatrix::Zero(n, n);
  for (const auto& b : blocks) sum += b.projector;
  return (sum - RMatrix::Identity(n, n)).norm();
}

double SchurBlockTable::orthogonality_residual() const {
  double worst = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      RMatrix p = blocks[i].projector * blocks[j].projector;
      if (i == j) p -= blocks[i].projector;
      worst = std::max(worst, p.norm());
    }
  }
  return worst;
}

Eigen::MatrixXd casimir(std::size_t k) {
  if (k < 1 || k > kMaxCopies) throw ConfigError("casimir: k must lie in [1, 10]");
  const std::size_t n = std::size_t{1} << k;
  const double kd = static_cast<double>(k);
  RMatrix c = (3 * kd / 4 - kd * (kd - 1) / 4) *
              RMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        c(static_cast<Eigen::Index>(swap_bits(x, i, j)), static_cast<Eigen::Index>(x)) += 1;
      }
    }
  }
  return c;
}

SchurBlockTable schur_blocks(std::size_t k) {
  const auto lams = diagrams(k);
  const std::size_t n = std::size_t{1} << k;
  const auto N = static_cast<Eigen::Index>(n);
  const RMatrix cas = casimir(k);
  const double half = static_cast<double>(k) / 2;

  SchurBlockTable table;
  table.k = k;
  for (const auto& lam : lams) {
    SchurBlock b;
    b.lam = lam;
    b.dim_u = to_size(dim_unitary_irrep(lam, 2));
    b.dim_v = to_size(dim_symmetric_irrep(lam));
    b.projector = RMatrix::Zero(N, N);
    table.blocks.push_back(std::move(b));
  }

  // Spectral projection sector by sector: the Casimir preserves Hamming weight.
  for (std::size_t w = 0; w <= k; ++w) {
    std::vector<Eigen::Index> idx;
    for (std::size_t x = 0; x < n; ++x) {
      if (popcount(x) == w) idx.push_back(static_cast<Eigen::Index>(x));
    }
    const auto s = static_cast<Eigen::Index>(idx.size());
    RMatrix cw(s, s);
    for (Eigen::Index r = 0; r < s; ++r) {
      for (Eigen::Index c = 0; c < s; ++c) cw(r, c) = cas(idx[r], idx[c]);
    }
    const double jmin = std::abs(half - static_cast<double>(w));
    for (auto& b : table.blocks) {
      const double j = b.lam.spin();
      if (j < jmin) continue;
      RMatrix p = RMatrix::Identity(s, s);
      for (const auto& other : table.blocks) {
        const double jo = other.lam.spin();
        if (jo < jmin || jo == j) continue;
        p = p * (cw - casimir_value(jo) * RMatrix::Identity(s, s)) /
            (casimir_value(j) - casimir_value(jo));
      }
      for (Eigen::Index r = 0; r < s; ++r) {
        for (Eigen::Index c = 0; c < s; ++c) b.projector(idx[r], idx[c]) = p(r, c);
      }
    }
  }

  std::size_t total = 0, offset = 0;
  for (auto& b : table.blocks) {
    const double tr = b.projector.trace();
    if (static_cast<std::size_t>(std::llround(tr)) != b.dim_u * b.dim_v ||
        std::abs(tr - std::round(tr)) > 1e-9) {
      std::ostringstream os;
      os << "schur_blocks: rank of projector " << b.lam.str() << " is " << tr << ", expected "
         << b.dim_u * b.dim_v;
      throw InvariantError(os.str());
    }
    total += b.dim_u * b.dim_v;

    // Highest-weight vectors: Gram-Schmidt over Pi |x>, x of weight lam2, ascending x.
    std::vector<RVec> hw;
    for (std::size_t x = 0; x < n && hw.size() < b.dim_v; ++x) {
      if (popcount(x) != b.lam.lam2) continue;
      RVec v = b.projector.col(static_cast<Eigen::Index>(x));
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : hw) v -= q.dot(v) * q;
      }
      const double nv = v.norm();
      if (nv > 1e-8) hw.push_back(v / nv);
    }
    if (hw.size() != b.dim_v) throw InvariantError("schur_blocks: highest-weight space has wrong size");

    b.basis = RMatrix::Zero(N, static_cast<Eigen::Index>(b.dim_u * b.dim_v));
    const double j = b.lam.spin();
    for (std::size_t v = 0; v < b.dim_v; ++v) {
      RVec cur = hw[v];
      double m = j;
      for (std::size_t u = 0; u < b.dim_u; ++u) {
        b.basis.col(static_cast<Eigen::Index>(u * b.dim_v + v)) = cur;
        if (u + 1 == b.dim_u) break;
        const double norm = std::sqrt(casimir_value(j) - m * (m - 1));
        cur = lower(cur, k) / norm;
        m -= 1;
      }
    }
    b.offset = offset;
    offset += b.dim_v;
  }
  if (total != n) throw InvariantError("schur_blocks: dimensions do not sum to 2^k");
  return table;
}

std::vector<double> pr_lambda(const DensityOperator& rho_A, const SchurBlockTable& table) {
  if (rho_A.dim() != 2) throw DimensionError("pr_lambda: rho_A must be a qubit state");
  const CMatrix r = kron_power(rho_A.mat(), table.k);
  std::vector<double> pr;
  for (const auto& b : table.blocks) {
    const CMatrix q = complexify(b.basis);
    double p = (q.adjoint() * r * q).trace().real();
    if (p < -1e-12) throw InvariantError("pr_lambda: negative block weight");
    pr.push_back(std::max(p, 0.0));
  }
  return pr;
}

CMatrix copies_matrix(const Ket& psi, std::size_t k) {
  if (psi.dim() != 4) throw DimensionError("copies_matrix: expected a two-qubit state");
  CVector v = psi.vec();
  for (std::size_t i = 1; i < k; ++i) v = kron(v, psi.vec());
  Indices perm;
  for (std::size_t i = 0; i < k; ++i) perm.push_back(2 * i);
  for (std::size_t i = 0; i < k; ++i) perm.push_back(2 * i + 1);
  const CVector p = permute_subsystems(v, Dims(2 * k, 2), perm);
  const auto n = static_cast<Eigen::Index>(std::size_t{1} << k);
  return Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      p.data(), n, n);
}

DecompositionCheck decomposition_check(const Ket& psi, const SchurBlockTable& table) {
  if (table.k > kMaxChannelCopies) throw CapExceeded("decomposition_check: k must be at most 5");
  const CMatrix M = copies_matrix(psi, table.k);
  CMatrix rec = CMatrix::Zero(M.rows(), M.cols());
  DecompositionCheck out;
  for (const auto& b : table.blocks) {
    const CMatrix q = complexify(b.basis);
    const CMatrix blk = q.transpose() * M * q;
    const auto du = static_cast<Eigen::Index>(b.dim_u), dv = static_cast<Eigen::Index>(b.dim_v);
    CMatrix phi = CMatrix::Zero(du, du);
    for (Eigen::Index u = 0; u < du; ++u) {
      for (Eigen::Index w = 0; w < du; ++w) {
        for (Eigen::Index v = 0; v < dv; ++v) phi(u, w) += blk(u * dv + v, w * dv + v);
      }
    }
    phi /= std::sqrt(static_cast<double>(dv));
    out.pr.push_back(phi.squaredNorm());
    const CMatrix block_form =
        kron(phi, CMatrix::Identity(dv, dv)) / std::sqrt(static_cast<double>(dv));
    rec += q * block_form * q.transpose();
  }
  out.residual = (M - rec).norm();
  for (std::size_t i = 0; i < table.blocks.size(); ++i) {
    for (std::size_t j = 0; j < table.blocks.size(); ++j) {
      if (i == j) continue;
      const CMatrix c = complexify(table.blocks[i].projector) * M *
                        complexify(table.blocks[j].projector).transpose();
      out.cross_block = std::max(out.cross_block, c.norm());
    }
  }
  return out;
}

ConcentrationChannel build_concentration_channel(const SchurBlockTable& table) {
  if (table.k > kMaxChannelCopies) throw CapExceeded("concentration channel: k must be at most 5");
  const auto n = static_cast<Eigen::Index>(table.dim());
  ConcentrationChannel ch;
  ch.k = table.k;
  std::vector<RMatrix> A;
  for (std::size_t bi = 0; bi < table.blocks.size(); ++bi) {
    const auto& b = table.blocks[bi];
    for (std::size_t u = 0; u < b.dim_u; ++u) {
      RMatrix a = RMatrix::Zero(n, n);
      for (std::size_t v = 0; v < b.dim_v; ++v) {
        a.row(static_cast<Eigen::Index>(b.offset + v)) = b.ket(u, v).transpose();
      }
      A.push_back(a);
      ch.A.push_back(complexify(a));
      ch.A_block.push_back(bi);
      ch.A_u.push_back(u);
    }
  }
  RMatrix tp = RMatrix::Zero(n, n), tp_norm = RMatrix::Zero(n, n), x = RMatrix::Zero(n, n);
  for (std::size_t i = 0; i < A.size(); ++i) {
    x += A[i].transpose() * A[i];
    const double du = static_cast<double>(table.blocks[ch.A_block[i]].dim_u);
    for (std::size_t j = 0; j < A.size(); ++j) {
      const RMatrix c = A[i].transpose() * A[j];
      const RMatrix ctc = c.transpose() * c;
      tp += ctc;
      tp_norm += ctc / du;
      ch.kraus.push_back({ch.A_block[i], ch.A_block[j], ch.A_u[i], ch.A_u[j], complexify(c)});
    }
  }
  const RMatrix id = RMatrix::Identity(n, n);
  ch.tp_residual = (tp - id).norm();
  ch.tp_residual_normalized = (tp_norm - id).norm();
  const RMatrix xx = kron(complexify(x), complexify(x)).real();
  ch.lambda_tp_residual = (xx - RMatrix::Identity(n * n, n * n)).norm();
  return ch;
}

OverlapReport concentrate_overlap(const Ket& psi, const ConcentrationChannel& ch,
                                  const SchurBlockTable& table) {
  if (ch.k != table.k) throw DimensionError("concentrate_overlap: channel and table differ in k");
  const CMatrix M = copies_matrix(psi, table.k);
  const double d = static_cast<double>(table.dim());
  OverlapReport out;

  for (const auto& kr : ch.kraus) {
    const double term = std::norm(trace_product(M, kr.C.transpose())) / d;
    out.overlap += term;
    out.overlap_normalized += term / static_cast<double>(table.blocks[kr.lam].dim_u);
  }

  const auto n = M.rows();
  CMatrix vecs(n * n, static_cast<Eigen::Index>(ch.A.size() * ch.A.size()));
  Eigen::Index col = 0;
  for (const auto& a : ch.A) {
    const CMatrix am = a * M;
    for (const auto& b : ch.A) {
      const CMatrix out_m = am * b.transpose();
      out.overlap_lambda += std::norm(out_m.trace()) / d;
      vecs.col(col++) = Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, 1>>(
          CMatrix(out_m.transpose()).data(), n * n);
    }
  }

  const DensityOperator rho_A = DensityOperator::trusted(reduced_A(psi), Dims{2});
  out.pr = pr_lambda(rho_A, table);
  CMatrix target = CMatrix::Zero(n * n, n * n);
  for (std::size_t i = 0; i < table.blocks.size(); ++i) {
    const auto& b = table.blocks[i];
    const double dv = static_cast<double>(b.dim_v);
    out.formula += out.pr[i] * dv / d;
    out.formula_normalized += out.pr[i] * dv / (static_cast<double>(b.dim_u) * d);
    CVector phi = CVector::Zero(n * n);
    for (std::size_t v = 0; v < b.dim_v; ++v) {
      const auto s = static_cast<Eigen::Index>(b.offset + v);
      phi(s * n + s) = 1.0 / std::sqrt(dv);
    }
    target += out.pr[i] * phi * phi.adjoint();
  }
  out.blockform_residual = (vecs * vecs.adjoint() - target).norm();
  return out;
}

BoundReport hmin_upper_bound(const Ket& psi, std::size_t k) {
  if (k < 1 || k > 64) throw ConfigError("hmin_upper_bound: k must lie in [1, 64]");
  BoundReport out;
  out.hmin_A = -log2_safe(lambda_max(reduced_A(psi)));
  out.bound = -(static_cast<double>(k) / 4) * std::min(out.hmin_A, std::log2(static_cast<double>(k))) +
              std::log2(1.5);
  if (k <= kMaxChannelCopies) {
    const auto table = schur_blocks(k);
    const auto ch = build_concentration_channel(table);
    const auto ov = concentrate_overlap(psi, ch, table);
    const double d = static_cast<double>(table.dim());
    out.achieved = -log2_safe(d * ov.overlap);
    out.achieved_normalized = -log2_safe(d * ov.overlap_normalized);
    out.within_bound = *out.achieved <= out.bound;
  }
  return out;
}

Ket schmidt_state(double p) {
  if (!(p >= 0 && p <= 1)) throw ConfigError("schmidt_state: weight must lie in [0, 1]");
  CVector v = CVector::Zero(4);
  v(0) = std::sqrt(p);
  v(3) = std::sqrt(1 - p);
  return Ket(v, Dims{2, 2});
}

}  // namespace ccq
