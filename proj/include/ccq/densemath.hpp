#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ccq/config.hpp"

namespace ccq {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Dims = std::vector<std::size_t>;
using Indices = std::vector<std::size_t>;

std::size_t dim_product(const Dims& dims);
bool is_power_of_two(std::size_t d);
std::size_t log2_exact(std::size_t d);
double log2_safe(double x);  // -inf for 0, throws for negative

// Positive unit-trace operator with a subsystem layout.
class DensityOperator {
 public:
  DensityOperator(CMatrix mat, Dims dims);
  explicit DensityOperator(CMatrix mat);

  // Skips the PSD eigen-check; used for results of operations that
  // preserve positivity (kron, partial trace, conjugation by isometries).
  static DensityOperator trusted(CMatrix mat, Dims dims);

  const CMatrix& mat() const { return mat_; }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }

 private:
  DensityOperator() = default;
  CMatrix mat_;
  Dims dims_;
};

class Ket {
 public:
  Ket(CVector vec, Dims dims);
  explicit Ket(CVector vec);

  const CVector& vec() const { return vec_; }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(vec_.size()); }
  DensityOperator density() const;

 private:
  CVector vec_;
  Dims dims_;
};

CMatrix kron(const CMatrix& a, const CMatrix& b);
CVector kron(const CVector& a, const CVector& b);
DensityOperator kron(const DensityOperator& a, const DensityOperator& b);
Ket kron(const Ket& a, const Ket& b);
CMatrix kron_power(const CMatrix& a, std::size_t k);

CMatrix partial_trace(const CMatrix& m, const Dims& dims, const Indices& keep);
DensityOperator partial_trace(const DensityOperator& rho, const Indices& keep);

// Reorders tensor factors: output factor i is input factor perm[i].
CMatrix permute_subsystems(const CMatrix& m, const Dims& dims, const Indices& perm);
CVector permute_subsystems(const CVector& v, const Dims& dims, const Indices& perm);
Indices permutation_map(const Dims& dims, const Indices& perm);

struct EigenDecomposition {
  RVector values;   // descending
  CMatrix vectors;  // columns
};

double herm_residual(const CMatrix& m);
EigenDecomposition herm_eig(const CMatrix& m);
double lambda_max(const CMatrix& m);
double lambda_min(const CMatrix& m);

// Functional calculus on a Hermitian PSD matrix: V f(lambda) V^dag.
CMatrix psd_sqrt(const CMatrix& m);

double tr_sqrt(const CMatrix& m);
double tr_sqrt(const DensityOperator& rho);
Ket max_entangled(std::size_t d);
double overlap_pure(const Ket& phi, const DensityOperator& rho);
double trace_norm(const CMatrix& m);
double von_neumann_entropy(const DensityOperator& rho);

CMatrix basis_projector(std::size_t d, std::size_t i);
CVector basis_ket(std::size_t d, std::size_t i);
double frobenius_distance(const CMatrix& a, const CMatrix& b);
double max_abs(const CMatrix& m);
bool all_finite(const CMatrix& m);
// Tr[a b] without forming the product.
cplx trace_product(const CMatrix& a, const CMatrix& b);

}  // namespace ccq
