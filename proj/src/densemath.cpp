#include "ccq/densemath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ccq {

Tolerances& tolerances() {
  static Tolerances t;
  return t;
}

std::size_t dim_product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>());
}

bool is_power_of_two(std::size_t d) { return d != 0 && (d & (d - 1)) == 0; }

std::size_t log2_exact(std::size_t d) {
  if (!is_power_of_two(d)) {
    throw DimensionError("dimension " + std::to_string(d) + " is not a power of two");
  }
  std::size_t n = 0;
  while ((std::size_t{1} << n) < d) ++n;
  return n;
}

double log2_safe(double x) {
  if (x < 0) throw InvariantError("log of negative value " + std::to_string(x));
  if (x == 0) return -std::numeric_limits<double>::infinity();
  return std::log2(x);
}

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool all_finite(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m.data()[i].real()) || !std::isfinite(m.data()[i].imag())) {
      return false;
    }
  }
  return true;
}

double herm_residual(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("matrix is not square");
  return max_abs(m - m.adjoint());
}

namespace {

void require_square(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("matrix is not square");
}

void check_hermitian(const CMatrix& m) {
  const double scale = std::max(1.0, max_abs(m));
  const double r = herm_residual(m);
  if (r > tolerances().herm * scale) {
    std::ostringstream os;
    os << "matrix is not Hermitian (residual " << r << ")";
    throw InvariantError(os.str());
  }
}

CMatrix hermitize(const CMatrix& m) { return (m + m.adjoint()) * 0.5; }

}  // namespace

DensityOperator::DensityOperator(CMatrix mat, Dims dims) {
  require_square(mat);
  if (dim_product(dims) != static_cast<std::size_t>(mat.rows())) {
    throw DimensionError("subsystem dims do not match matrix size");
  }
  if (!all_finite(mat)) throw InvariantError("density operator has non-finite entries");
  check_hermitian(mat);
  mat = hermitize(mat);
  const double tr = mat.trace().real();
  if (std::abs(tr - 1.0) > tolerances().trace) {
    throw InvariantError("density operator trace " + std::to_string(tr) + " != 1");
  }
  const double lmin = lambda_min(mat);
  if (lmin < -tolerances().psd) {
    throw InvariantError("density operator has eigenvalue " + std::to_string(lmin));
  }
  mat_ = std::move(mat);
  dims_ = std::move(dims);
}

DensityOperator::DensityOperator(CMatrix mat)
    : DensityOperator(mat, Dims{static_cast<std::size_t>(mat.rows())}) {}

DensityOperator DensityOperator::trusted(CMatrix mat, Dims dims) {
  require_square(mat);
  if (dim_product(dims) != static_cast<std::size_t>(mat.rows())) {
    throw DimensionError("subsystem dims do not match matrix size");
  }
  DensityOperator rho;
  rho.mat_ = hermitize(mat);
  rho.dims_ = std::move(dims);
  return rho;
}

Ket::Ket(CVector vec, Dims dims) : vec_(std::move(vec)), dims_(std::move(dims)) {
  if (dim_product(dims_) != dim()) throw DimensionError("ket dims do not match length");
  const double nrm = vec_.norm();
  if (std::abs(nrm - 1.0) > tolerances().unit_norm) {
    throw InvariantError("ket norm " + std::to_string(nrm) + " != 1");
  }
}

Ket::Ket(CVector vec) : Ket(vec, Dims{static_cast<std::size_t>(vec.size())}) {}

DensityOperator Ket::density() const {
  return DensityOperator::trusted(vec_ * vec_.adjoint(), dims_);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

DensityOperator kron(const DensityOperator& a, const DensityOperator& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityOperator::trusted(kron(a.mat(), b.mat()), dims);
}

Ket kron(const Ket& a, const Ket& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  CVector v = kron(a.vec(), b.vec());
  return Ket(v / v.norm(), dims);
}

CMatrix kron_power(const CMatrix& a, std::size_t k) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (std::size_t i = 0; i < k; ++i) out = kron(out, a);
  return out;
}

Indices permutation_map(const Dims& dims, const Indices& perm) {
  const std::size_t n = dims.size();
  if (perm.size() != n) throw DimensionError("permutation length mismatch");
  std::vector<bool> seen(n, false);
  for (auto p : perm) {
    if (p >= n || seen[p]) throw DimensionError("invalid subsystem permutation");
    seen[p] = true;
  }
  const std::size_t total = dim_product(dims);
  Dims new_dims(n);
  for (std::size_t i = 0; i < n; ++i) new_dims[i] = dims[perm[i]];
  // strides of the output layout, indexed by input subsystem
  std::vector<std::size_t> out_stride_of_input(n);
  std::size_t s = 1;
  for (std::size_t i = n; i-- > 0;) {
    out_stride_of_input[perm[i]] = s;
    s *= new_dims[i];
  }
  Indices map(total);
  std::vector<std::size_t> digit(n, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx, target = 0;
    for (std::size_t i = n; i-- > 0;) {
      digit[i] = rem % dims[i];
      rem /= dims[i];
      target += digit[i] * out_stride_of_input[i];
    }
    map[idx] = target;
  }
  return map;
}

CMatrix permute_subsystems(const CMatrix& m, const Dims& dims, const Indices& perm) {
  require_square(m);
  if (dim_product(dims) != static_cast<std::size_t>(m.rows())) {
    throw DimensionError("permute: dims do not match matrix");
  }
  const Indices map = permutation_map(dims, perm);
  const auto d = static_cast<Eigen::Index>(map.size());
  CMatrix out(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      out(static_cast<Eigen::Index>(map[i]), static_cast<Eigen::Index>(map[j])) = m(i, j);
    }
  }
  return out;
}

CVector permute_subsystems(const CVector& v, const Dims& dims, const Indices& perm) {
  if (dim_product(dims) != static_cast<std::size_t>(v.size())) {
    throw DimensionError("permute: dims do not match vector");
  }
  const Indices map = permutation_map(dims, perm);
  CVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(map[i])) = v(i);
  return out;
}

CMatrix partial_trace(const CMatrix& m, const Dims& dims, const Indices& keep) {
  require_square(m);
  if (dim_product(dims) != static_cast<std::size_t>(m.rows())) {
    throw DimensionError("partial_trace: dims do not match matrix");
  }
  std::vector<bool> kept(dims.size(), false);
  for (auto k : keep) {
    if (k >= dims.size()) throw DimensionError("partial_trace: subsystem index out of range");
    if (kept[k]) throw DimensionError("partial_trace: repeated subsystem index");
    kept[k] = true;
  }
  Indices perm(keep.begin(), keep.end());
  std::size_t dk = 1, dt = 1;
  for (auto k : keep) dk *= dims[k];
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (!kept[i]) {
      perm.push_back(i);
      dt *= dims[i];
    }
  }
  const CMatrix p = permute_subsystems(m, dims, perm);
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  const auto DT = static_cast<Eigen::Index>(dt);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      cplx s = 0;
      for (Eigen::Index t = 0; t < DT; ++t) s += p(i * DT + t, j * DT + t);
      out(i, j) = s;
    }
  }
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, const Indices& keep) {
  CMatrix out = partial_trace(rho.mat(), rho.dims(), keep);
  Dims dims;
  for (auto k : keep) dims.push_back(rho.dims()[k]);
  if (dims.empty()) dims.push_back(1);
  return DensityOperator::trusted(out, dims);
}

EigenDecomposition herm_eig(const CMatrix& m) {
  require_square(m);
  check_hermitian(m);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(m));
  if (es.info() != Eigen::Success) throw InvariantError("eigendecomposition failed");
  const auto n = m.rows();
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

double lambda_max(const CMatrix& m) {
  require_square(m);
  check_hermitian(m);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(m.rows() - 1);
}

double lambda_min(const CMatrix& m) {
  require_square(m);
  check_hermitian(m);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

namespace {

double clipped(double lam) {
  if (lam < -tolerances().clip) {
    throw InvariantError("negative eigenvalue " + std::to_string(lam) + " beyond clip tolerance");
  }
  return std::max(lam, 0.0);
}

}  // namespace

CMatrix psd_sqrt(const CMatrix& m) {
  const auto ed = herm_eig(m);
  RVector s(ed.values.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::sqrt(clipped(ed.values(i)));
  return ed.vectors * s.cast<cplx>().asDiagonal() * ed.vectors.adjoint();
}

double tr_sqrt(const CMatrix& m) {
  require_square(m);
  check_hermitian(m);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(m), Eigen::EigenvaluesOnly);
  double s = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    s += std::sqrt(clipped(es.eigenvalues()(i)));
  }
  return s;
}

double tr_sqrt(const DensityOperator& rho) { return tr_sqrt(rho.mat()); }

Ket max_entangled(std::size_t d) {
  if (d == 0) throw DimensionError("max_entangled: d must be positive");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(d * d));
  const double a = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t x = 0; x < d; ++x) v(static_cast<Eigen::Index>(x * d + x)) = a;
  return Ket(v, Dims{d, d});
}

double overlap_pure(const Ket& phi, const DensityOperator& rho) {
  if (phi.dim() != rho.dim()) throw DimensionError("overlap_pure: dimension mismatch");
  return (phi.vec().adjoint() * rho.mat() * phi.vec())(0, 0).real();
}

double trace_norm(const CMatrix& m) {
  require_square(m);
  if (m.size() == 0) return 0.0;
  if (herm_residual(m) <= tolerances().herm * std::max(1.0, max_abs(m))) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().sum();
}

double von_neumann_entropy(const DensityOperator& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.mat(), Eigen::EigenvaluesOnly);
  double h = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p > 1e-15) h -= p * std::log2(p);
  }
  return h;
}

CMatrix basis_projector(std::size_t d, std::size_t i) {
  CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
  return p;
}

CVector basis_ket(std::size_t d, std::size_t i) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(d));
  v(static_cast<Eigen::Index>(i)) = 1.0;
  return v;
}

double frobenius_distance(const CMatrix& a, const CMatrix& b) { return (a - b).norm(); }

cplx trace_product(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) {
    throw DimensionError("trace_product: shape mismatch");
  }
  return a.cwiseProduct(b.transpose()).sum();
}

}  // namespace ccq
