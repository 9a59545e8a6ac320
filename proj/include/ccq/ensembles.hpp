#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ccq/circuits.hpp"
#include "ccq/densemath.hpp"
#include "ccq/rng.hpp"

namespace ccq {

enum class EnsembleKind { haar_pure, ginibre_reduced, haar_subsystem, ghse };

EnsembleKind parse_ensemble_kind(const std::string& s);
std::string to_string(EnsembleKind kind);

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::haar_pure;
  std::size_t n = 2;    // total qubits
  std::size_t m = 0;    // subsystem / environment qubits
  std::size_t n_A = 1;
  std::size_t n_B = 1;

  void validate() const;
};

Ket haar_pure(std::size_t dim, SeededRng& rng);
DensityOperator ginibre_reduced(std::size_t d_A, std::size_t d_B, SeededRng& rng);
Ket haar_subsystem(std::size_t n, std::size_t m, SeededRng& rng);
DensityOperator ghse_sample(std::size_t n, std::size_t m, SeededRng& rng);
// Same construction on arbitrary dimensions: tr_M of a Haar state on d_n d_m.
DensityOperator ghse_sample_dims(std::size_t d_n, std::size_t d_m, SeededRng& rng);

// c = 1 Marchenko-Pastur law on [0, 4].
double mp_cdf(double x);
double mp_density(double x);

struct EsdStats {
  std::vector<double> x;          // d_A lambda_i, ascending
  double ks_to_mp = 0;
  double max_x = 0;
  std::vector<std::size_t> histogram;  // uniform bins on [0, 4], overflow in the last
};

EsdStats esd_stats(const DensityOperator& rho, std::size_t d_A, std::size_t bins = 16);

double ks_two_sample(std::vector<double> a, std::vector<double> b);
double ks_critical(std::size_t n1, std::size_t n2, double alpha = 0.01);

double tr_sqrt_ratio(const DensityOperator& rho, std::size_t d_A);

// Permutation operator on (C^d)^{(x)k}: |i_1..i_k> -> |i_{perm^{-1}(1)}..>.
CMatrix permutation_operator(const std::vector<std::size_t>& perm, std::size_t d);
std::size_t cycle_count(const std::vector<std::size_t>& perm);

// E[rho^{(x)k}] over the GHSE with system dimension d_n and environment d_m.
CMatrix ghse_moment_exact(std::size_t d_n, std::size_t d_m, std::size_t k);

struct CycleIdentity {
  BigInt lhs;  // sum over non-identity permutations of d_m^cycles
  BigInt rhs;  // (d_m + k - 1)! / (d_m - 1)! - d_m^k
  bool holds() const { return lhs == rhs; }
};
CycleIdentity ghse_cycle_identity(std::size_t d_m, std::size_t k);

struct MomentCheck {
  CMatrix exact;
  CMatrix mean;
  double max_z = 0;        // worst |mean - exact| / standard error over real and imaginary parts
  double max_abs_dev = 0;
  std::size_t samples = 0;
  bool within(double sigmas) const { return max_z <= sigmas; }
};

MomentCheck ghse_moment_monte_carlo(std::size_t d_n, std::size_t d_m, std::size_t k,
                                    std::size_t samples, std::uint64_t seed);

// Entrywise Monte-Carlo mean of |psi><psi|^{(x)2} against Pi_sym / Tr Pi_sym.
MomentCheck haar_second_moment(std::size_t dim, std::size_t samples, std::uint64_t seed);

}  // namespace ccq
