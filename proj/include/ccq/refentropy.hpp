#pragma once

#include <cstddef>
#include <utility>

#include "ccq/densemath.hpp"

namespace ccq {

struct SdpSolution {
  double primal_value = 0;  // Tr sigma~_B
  double dual_value = 0;    // Tr[rho F]
  CMatrix sigma_B;          // primal optimiser (unnormalised)
  CMatrix F;                // dual optimiser, tr_A F <= 1_B
  double gap = 0;
  std::size_t iterations = 0;  // total Newton steps
  std::size_t outer = 0;       // centering rounds

  double hmin() const;  // -log primal
};

double dmax_exact(const DensityOperator& rho, const DensityOperator& sigma);

// min Tr S s.t. 1_A (x) S >= rho, by barrier path following.
SdpSolution hmin_sdp(const DensityOperator& rho, std::size_t d_A, std::size_t d_B);
SdpSolution hmin_sdp(const DensityOperator& rho);  // dims must be (d_A, d_B)

double hmin_pure(const Ket& psi);                   // dims must be (d_A, d_B)
double hmin_pure(const Ket& psi, std::size_t d_A, std::size_t d_B);
double hmin_noncond_exact(const DensityOperator& rho);
double pguess_helstrom(double p0, const DensityOperator& rho0, double p1,
                       const DensityOperator& rho1);

}  // namespace ccq
