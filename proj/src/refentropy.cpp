#include "ccq/refentropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ccq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense Hessian up to this d_B; conjugate gradients beyond.
constexpr std::size_t kDenseNewtonMaxDB = 32;
constexpr double kCenteringDecrement = 1e-9;
// Above the noise floor at large t the decrement stalls; accept once it stops halving.
constexpr double kCenteringStall = 1e-5;
constexpr double kEarlyGapFraction = 0.05;

struct BarrierState {
  CMatrix S;
  CMatrix W;      // 1 (x) S - rho
  CMatrix Z;      // W^{-1}
  CMatrix S_inv;
  double value = 0;
};

bool cholesky_inverse(const CMatrix& m, CMatrix& inv, double& logdet) {
  Eigen::LLT<CMatrix> llt(m);
  if (llt.info() != Eigen::Success) return false;
  const CMatrix& l = llt.matrixLLT();
  logdet = 0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    const double d = l(i, i).real();
    if (!(d > 0)) return false;
    logdet += 2 * std::log(d);
  }
  inv = llt.solve(CMatrix::Identity(m.rows(), m.cols()));
  return true;
}

CMatrix lift(const CMatrix& s, std::size_t d_A) {
  return kron(CMatrix::Identity(static_cast<Eigen::Index>(d_A), static_cast<Eigen::Index>(d_A)), s);
}

CMatrix partial_trace_A(const CMatrix& m, std::size_t d_A, std::size_t d_B) {
  const auto b = static_cast<Eigen::Index>(d_B);
  CMatrix out = CMatrix::Zero(b, b);
  for (std::size_t a = 0; a < d_A; ++a) {
    const auto o = static_cast<Eigen::Index>(a) * b;
    out += m.block(o, o, b, b);
  }
  return out;
}

// Evaluates the barrier at S; false when S is not strictly feasible.
bool evaluate(const CMatrix& rho, const CMatrix& S, std::size_t d_A, double t, BarrierState& st) {
  double ld_w = 0, ld_s = 0;
  CMatrix W = lift(S, d_A) - rho;
  CMatrix Z, S_inv;
  if (!cholesky_inverse(W, Z, ld_w)) return false;
  if (!cholesky_inverse(S, S_inv, ld_s)) return false;
  st.S = S;
  st.W = std::move(W);
  st.Z = std::move(Z);
  st.S_inv = std::move(S_inv);
  st.value = t * S.trace().real() - ld_w - ld_s;
  return true;
}

CMatrix hermitize(const CMatrix& m) { return (m + m.adjoint()) / 2.0; }

// H -> tr_A[Z (1 (x) H) Z] + S^{-1} H S^{-1}
CMatrix hessian_apply(const BarrierState& st, const CMatrix& h, std::size_t d_A, std::size_t d_B) {
  const auto b = static_cast<Eigen::Index>(d_B);
  CMatrix out = st.S_inv * h * st.S_inv;
  for (std::size_t x = 0; x < d_A; ++x) {
    for (std::size_t y = 0; y < d_A; ++y) {
      const auto ox = static_cast<Eigen::Index>(x) * b, oy = static_cast<Eigen::Index>(y) * b;
      out += st.Z.block(ox, oy, b, b) * h * st.Z.block(oy, ox, b, b);
    }
  }
  return out;
}

CMatrix newton_dense(const BarrierState& st, const CMatrix& grad, std::size_t d_A,
                     std::size_t d_B) {
  const auto b = static_cast<Eigen::Index>(d_B);
  const Eigen::Index n = b * b;
  CMatrix M = kron(st.S_inv.transpose(), st.S_inv);
  for (std::size_t x = 0; x < d_A; ++x) {
    for (std::size_t y = 0; y < d_A; ++y) {
      const auto ox = static_cast<Eigen::Index>(x) * b, oy = static_cast<Eigen::Index>(y) * b;
      M += kron(CMatrix(st.Z.block(oy, ox, b, b).transpose()), CMatrix(st.Z.block(ox, oy, b, b)));
    }
  }
  M = hermitize(M);
  CVector rhs = -Eigen::Map<const CVector>(grad.data(), n);
  Eigen::LLT<CMatrix> llt(M);
  CVector sol;
  if (llt.info() == Eigen::Success) {
    sol = llt.solve(rhs);
  } else {
    sol = M.ldlt().solve(rhs);
  }
  return hermitize(Eigen::Map<const CMatrix>(sol.data(), b, b));
}

CMatrix newton_cg(const BarrierState& st, const CMatrix& grad, std::size_t d_A, std::size_t d_B) {
  const auto b = static_cast<Eigen::Index>(d_B);
  CMatrix x = CMatrix::Zero(b, b);
  CMatrix r = -grad;
  CMatrix p = r;
  double rr = r.squaredNorm();
  const double stop = 1e-24 * std::max(rr, 1e-300);
  for (Eigen::Index it = 0; it < 4 * b * b && rr > stop; ++it) {
    const CMatrix ap = hessian_apply(st, p, d_A, d_B);
    const double pap = trace_product(p.adjoint(), ap).real();
    if (!(pap > 0)) break;
    const double alpha = rr / pap;
    x += alpha * p;
    r -= alpha * ap;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  return hermitize(x);
}

}  // namespace

double SdpSolution::hmin() const { return -log2_safe(primal_value); }

double dmax_exact(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("dmax_exact: dimension mismatch");
  const auto& tol = tolerances();
  const EigenDecomposition er = herm_eig(rho.mat());
  for (Eigen::Index i = 0; i < er.values.size(); ++i) {
    if (er.values(i) <= tol.supp_eig) break;
    const CVector v = er.vectors.col(i);
    if ((v.adjoint() * sigma.mat() * v)(0, 0).real() < tol.supp_sigma) return kInf;
  }
  const EigenDecomposition es = herm_eig(sigma.mat());
  Eigen::Index r = 0;
  while (r < es.values.size() && es.values(r) > tol.supp_sigma) ++r;
  if (r == 0) return kInf;
  const CMatrix V = es.vectors.leftCols(r);
  // Weight of rho outside supp(sigma).
  const CMatrix P = V * V.adjoint();
  const CMatrix Q = CMatrix::Identity(P.rows(), P.cols()) - P;
  if ((Q * rho.mat() * Q).trace().real() > tol.supp_eig) return kInf;
  RVector inv_sqrt(r);
  for (Eigen::Index i = 0; i < r; ++i) inv_sqrt(i) = 1.0 / std::sqrt(es.values(i));
  const CMatrix K = inv_sqrt.asDiagonal() * (V.adjoint() * rho.mat() * V) * inv_sqrt.asDiagonal();
  return log2_safe(std::max(lambda_max(hermitize(K)), 0.0));
}

SdpSolution hmin_sdp(const DensityOperator& rho, std::size_t d_A, std::size_t d_B) {
  if (d_A == 0 || d_B == 0 || rho.dim() != d_A * d_B) {
    throw DimensionError("hmin_sdp: rho is not on d_A x d_B");
  }
  if (d_A * d_B > 256) throw CapExceeded("hmin_sdp: d_A d_B exceeds 256");
  const auto& tol = tolerances();
  const CMatrix& r = rho.mat();
  const auto b = static_cast<Eigen::Index>(d_B);
  const double m_barrier = static_cast<double>(d_A * d_B + d_B);

  const double lmax = lambda_max(r);
  CMatrix S = 2 * lmax * CMatrix::Identity(b, b);
  double t = 1.0;
  BarrierState st;
  if (!evaluate(r, S, d_A, t, st) || lambda_min(st.W) <= 0) {
    throw InvariantError("hmin_sdp: starting point 2 lambda_max(rho) 1_B is not strictly feasible");
  }

  SdpSolution sol;
  const bool dense = d_B <= kDenseNewtonMaxDB;
  while (true) {
    std::size_t steps = 0;
    double decrement = kInf, previous = kInf;
    while (true) {
      const CMatrix grad = hermitize(t * CMatrix::Identity(b, b) -
                                     partial_trace_A(st.Z, d_A, d_B) - st.S_inv);
      const CMatrix delta = dense ? newton_dense(st, grad, d_A, d_B) : newton_cg(st, grad, d_A, d_B);
      decrement = std::sqrt(std::max(-trace_product(grad, delta).real(), 0.0));
      if (decrement < kCenteringDecrement) break;
      if (decrement < kCenteringStall && decrement > 0.5 * previous) break;
      previous = decrement;
      if (steps >= static_cast<std::size_t>(tol.sdp_max_iter)) {
        std::ostringstream os;
        os << "hmin_sdp: centering did not converge after " << steps
           << " Newton steps at t=" << t << " (decrement " << decrement << ")";
        throw ConvergenceError(os.str());
      }
      double step = decrement >= 0.25 ? 1.0 / (1.0 + decrement) : 1.0;
      BarrierState next;
      while (!evaluate(r, st.S + step * delta, d_A, t, next)) {
        step /= 2;
        if (step < 1e-12) {
          throw ConvergenceError("hmin_sdp: Newton step lost strict feasibility");
        }
      }
      st = std::move(next);
      ++steps;
      ++sol.iterations;
    }
    ++sol.outer;

    // Certificate at this centre; both sides stay feasible, so keep the best of each.
    const double primal = st.S.trace().real();
    if (sol.sigma_B.size() == 0 || primal < sol.primal_value) {
      sol.sigma_B = hermitize(st.S);
      sol.primal_value = primal;
    }
    CMatrix F = hermitize(st.Z / t);
    const double scale = lambda_max(hermitize(partial_trace_A(F, d_A, d_B)));
    if (scale > 0) F /= scale;
    const double dual = trace_product(r, F).real();
    if (sol.F.size() == 0 || dual > sol.dual_value) {
      sol.F = F;
      sol.dual_value = dual;
    }
    sol.gap = sol.primal_value - sol.dual_value;
    // Large t amplifies round-off in W^{-1}; stop early once the certified gap is ample.
    if (m_barrier / t < tol.sdp_barrier ||
        sol.gap <= kEarlyGapFraction * tol.sdp_gap * (1 + std::abs(sol.primal_value))) {
      break;
    }
    t *= 8;
  }

  if (sol.dual_value > sol.primal_value + 1e-9) {
    throw InvariantError("hmin_sdp: weak duality violated");
  }
  if (sol.gap > tol.sdp_gap * (1 + std::abs(sol.primal_value))) {
    std::ostringstream os;
    os << "hmin_sdp: duality gap " << sol.gap << " above tolerance (primal " << sol.primal_value
       << ", dual " << sol.dual_value << ")";
    throw ConvergenceError(os.str());
  }
  return sol;
}

SdpSolution hmin_sdp(const DensityOperator& rho) {
  if (rho.dims().size() != 2) throw DimensionError("hmin_sdp: rho must carry two subsystems");
  return hmin_sdp(rho, rho.dims()[0], rho.dims()[1]);
}

double hmin_pure(const Ket& psi, std::size_t d_A, std::size_t d_B) {
  if (psi.dim() != d_A * d_B) throw DimensionError("hmin_pure: ket is not on d_A x d_B");
  const auto a = static_cast<Eigen::Index>(d_A), b = static_cast<Eigen::Index>(d_B);
  // Row-major reshape: M(x, y) = psi[x d_B + y], so rho_A = M M^dag.
  const CMatrix M = Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic,
                                                   Eigen::RowMajor>>(psi.vec().data(), a, b);
  return -2 * log2_safe(tr_sqrt(CMatrix(M * M.adjoint())));
}

double hmin_pure(const Ket& psi) {
  if (psi.dims().size() != 2) throw DimensionError("hmin_pure: ket must carry two subsystems");
  return hmin_pure(psi, psi.dims()[0], psi.dims()[1]);
}

double hmin_noncond_exact(const DensityOperator& rho) { return -log2_safe(lambda_max(rho.mat())); }

double pguess_helstrom(double p0, const DensityOperator& rho0, double p1,
                       const DensityOperator& rho1) {
  if (rho0.dim() != rho1.dim()) throw DimensionError("pguess_helstrom: dimension mismatch");
  if (p0 < 0 || p1 < 0 || std::abs(p0 + p1 - 1) > tolerances().trace) {
    throw ConfigError("pguess_helstrom: priors must be a probability pair");
  }
  return (1 + trace_norm(p0 * rho0.mat() - p1 * rho1.mat())) / 2;
}

}  // namespace ccq
