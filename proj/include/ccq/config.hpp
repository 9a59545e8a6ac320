#pragma once

#include <stdexcept>
#include <string>

namespace ccq {

// Numerical tolerances shared by every module. Experiments may override
// individual fields through the [tolerances] block of a config file.
struct Tolerances {
  double herm = 1e-10;        // max |M - M^dag| entrywise
  double psd = 1e-9;          // min eigenvalue floor for states
  double trace = 1e-9;        // |Tr rho - 1|
  double clip = 1e-8;         // largest negative eigenvalue silently clipped
  double unit_norm = 1e-10;   // ket normalisation
  double gate_unitary = 1e-12;
  double unitary = 1e-10;     // synthesized circuits
  double dedup = 1e-8;        // unitary / Choi / state deduplication
  double choi_psd = 1e-9;
  double choi_slice = 1e-8;   // tr_A J = 1_B
  double povm = 1e-9;
  double gram_rank = 1e-8;
  double dmax_den = 1e-14;
  double dmax_num = 1e-12;
  double cone_slack = 1e-10;
  double supp_eig = 1e-9;
  double supp_sigma = 1e-12;
  double route = 1e-9;        // agreement of two evaluation routes
  double sdp_gap = 1e-7;      // relative: gap <= sdp_gap * (1 + |primal|)
  double sdp_barrier = 1e-9;  // stop when m / t < sdp_barrier
  int sdp_max_iter = 200;     // Newton steps per centering
  double ordering = 1e-7;     // H_comp >= H_info - ordering
};

Tolerances& tolerances();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// A mathematical invariant failed; signals a bug or a broken assumption.
class InvariantError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace ccq
