#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ccq/channels.hpp"
#include "ccq/densemath.hpp"

namespace ccq {

struct DivergenceValue {
  double value = 0;  // may be +inf
  std::optional<std::size_t> witness;
  std::optional<std::size_t> partner;  // second generator of a mixed optimum
  double weight = 1.0;                 // weight on witness when partner is set

  bool infinite() const;
};

struct EntropyReport {
  double computational = 0;
  std::optional<double> informational;
  std::optional<double> gap;
  std::size_t witness = 0;
  std::string witness_label;
};

bool cone_order_leq(const DensityOperator& rho, const DensityOperator& sigma, double scale,
                    const ChoiSet& cs);

DivergenceValue comp_dmax(const DensityOperator& rho, const DensityOperator& sigma,
                          const ChoiSet& cs);
// Generator ratios from precomputed expectations a_j = Tr[rho J], b_j = Tr[sigma J].
DivergenceValue dmax_from_values(const std::vector<double>& num, const std::vector<double>& den);

// eta in (0, 1]; exact over the convex hull of normalized effects.
DivergenceValue comp_dh(const DensityOperator& rho, const DensityOperator& sigma,
                        const ChoiSet& cs, double eta);
// Core linear-fractional minimisation of sum w a / sum w b over the simplex
// subject to sum w b >= eta. Returns min ratio (inf when infeasible).
DivergenceValue dh_from_values(const std::vector<double>& a, const std::vector<double>& b,
                               double eta, bool force_hull = false);

std::vector<double> cone_values(const ChoiSet& cs, const CMatrix& rho);
std::vector<double> cone_values(const ChoiSet& cs, const CVector& psi);

EntropyReport comp_hmin(const DensityOperator& rho, const ChoiSet& cs);
EntropyReport comp_hmin(const Ket& psi, const ChoiSet& cs);

struct GuessResult {
  double pguess = 0;
  EntropyReport report;
  std::size_t povm = 0;
  std::vector<std::size_t> relabeling;  // raw outcome -> guessed label
};

GuessResult comp_guess(const std::vector<double>& p, const std::vector<DensityOperator>& states,
                       const FlaggedPovmSet& povms);

// Sum_x p_x |x><x| (x) rho^x.
DensityOperator cq_state(const std::vector<double>& p, const std::vector<DensityOperator>& states);

DivergenceValue measured_dmax(const DensityOperator& rho, const DensityOperator& sigma,
                              const FlaggedPovmSet& povms);

double comp_op_norm(const CMatrix& x, const PreparableStateSet& prep);
EntropyReport comp_hmin_noncond(const DensityOperator& rho, const PreparableStateSet& prep);

}  // namespace ccq
