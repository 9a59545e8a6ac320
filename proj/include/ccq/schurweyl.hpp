#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ccq/circuits.hpp"
#include "ccq/densemath.hpp"

namespace ccq {

struct YoungDiagramTwoRow {
  std::size_t lam1 = 0;
  std::size_t lam2 = 0;

  YoungDiagramTwoRow() = default;
  YoungDiagramTwoRow(std::size_t l1, std::size_t l2);

  std::size_t k() const { return lam1 + lam2; }
  double spin() const { return (static_cast<double>(lam1) - static_cast<double>(lam2)) / 2; }
  std::string str() const;
  bool operator==(const YoungDiagramTwoRow& o) const { return lam1 == o.lam1 && lam2 == o.lam2; }
};

// Descending lam1.
std::vector<YoungDiagramTwoRow> diagrams(std::size_t k);

// Partitions as non-increasing row lengths; trailing zeros allowed.
BigInt dim_unitary_irrep(const std::vector<std::size_t>& rows, std::size_t d);
BigInt dim_unitary_irrep(const YoungDiagramTwoRow& lam, std::size_t d);
BigInt dim_symmetric_irrep(const std::vector<std::size_t>& rows);
BigInt dim_symmetric_irrep(const YoungDiagramTwoRow& lam);

struct SchurBlock {
  YoungDiagramTwoRow lam;
  std::size_t dim_u = 0;
  std::size_t dim_v = 0;
  Eigen::MatrixXd projector;  // 2^k square
  // Schur basis |lam, u, v> as columns, index u * dim_v + v.
  Eigen::MatrixXd basis;
  std::size_t offset = 0;     // W_lam: |v> -> |offset + v>

  Eigen::VectorXd ket(std::size_t u, std::size_t v) const;
};

struct SchurBlockTable {
  std::size_t k = 0;
  std::vector<SchurBlock> blocks;  // descending lam1

  std::size_t dim() const { return std::size_t{1} << k; }
  Eigen::MatrixXd schur_unitary() const;  // columns ordered (lam, u, v)
  double completeness_residual() const;
  double orthogonality_residual() const;
};

SchurBlockTable schur_blocks(std::size_t k);

// Total-spin Casimir on k qubits; wire 0 is the most significant bit.
Eigen::MatrixXd casimir(std::size_t k);

std::vector<double> pr_lambda(const DensityOperator& rho_A, const SchurBlockTable& table);

// |psi>^{(x)k} for a two-qubit psi, reshaped to the (A^k) x (B^k) coefficient matrix.
CMatrix copies_matrix(const Ket& psi, std::size_t k);

struct DecompositionCheck {
  double residual = 0;          // ||psi^k - block form||
  double cross_block = 0;       // max_{lam != mu} ||(Pi_lam (x) Pi_mu) psi^k||
  std::vector<double> pr;       // Pr(lam) read off the block form
};

DecompositionCheck decomposition_check(const Ket& psi, const SchurBlockTable& table);

struct ConcentrationKraus {
  std::size_t lam = 0;  // block index on the A side
  std::size_t mu = 0;   // block index on the B side
  std::size_t u = 0;
  std::size_t v = 0;
  CMatrix C;            // A_{lam,u}^T B_{mu,v}
};

struct ConcentrationChannel {
  std::size_t k = 0;
  std::vector<CMatrix> A;                 // A_{lam,u} in table order
  std::vector<std::size_t> A_block;
  std::vector<std::size_t> A_u;
  std::vector<ConcentrationKraus> kraus;
  double tp_residual = 0;                 // ||sum C^dag C - 1||_F
  double tp_residual_normalized = 0;      // with C / sqrt(dim_u(lam))
  double lambda_tp_residual = 0;          // two-sided map on A (x) B
};

ConcentrationChannel build_concentration_channel(const SchurBlockTable& table);

struct OverlapReport {
  double overlap = 0;            // through the one-sided Kraus list
  double overlap_lambda = 0;     // through the two-sided map
  double formula = 0;            // sum Pr dim_v / 2^k
  double overlap_normalized = 0; // one-sided map rescaled to trace preservation
  double formula_normalized = 0; // sum Pr dim_v / (dim_u 2^k)
  double blockform_residual = 0;
  std::vector<double> pr;
};

OverlapReport concentrate_overlap(const Ket& psi, const ConcentrationChannel& ch,
                                  const SchurBlockTable& table);

struct BoundReport {
  double bound = 0;
  double hmin_A = 0;
  std::optional<double> achieved;             // -log(2^k overlap)
  std::optional<double> achieved_normalized;  // same for the trace-preserving rescaling
  std::optional<bool> within_bound;
};

BoundReport hmin_upper_bound(const Ket& psi, std::size_t k);

Ket schmidt_state(double p);  // sqrt(p)|00> + sqrt(1-p)|11>

}  // namespace ccq
