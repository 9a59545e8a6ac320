#include "ccq/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace ccq {

namespace {

constexpr std::size_t kMaxSampleQubits = 20;
constexpr std::size_t kMaxMomentDim = 4096;
constexpr std::size_t kMaxMomentCopies = 6;

using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

CMatrix reduce_first(const CVector& v, std::size_t d_keep, std::size_t d_trace) {
  const RowMajor g =
      Eigen::Map<const RowMajor>(v.data(), static_cast<Eigen::Index>(d_keep),
                                 static_cast<Eigen::Index>(d_trace));
  return g * g.adjoint();
}

template <typename F>
MomentCheck moment_check(const CMatrix& exact, std::size_t samples, std::uint64_t seed, F draw) {
  MomentCheck mc;
  mc.exact = exact;
  mc.samples = samples;
  const auto r = exact.rows(), c = exact.cols();
  Eigen::MatrixXd sum_re = Eigen::MatrixXd::Zero(r, c), sum_im = sum_re;
  Eigen::MatrixXd sq_re = sum_re, sq_im = sum_re;
  const SeededRng base(seed, 0x6d6f6d656e74ULL);
  for (std::size_t s = 0; s < samples; ++s) {
    SeededRng rng = base.substream(s);
    const CMatrix x = draw(rng);
    sum_re += x.real();
    sum_im += x.imag();
    sq_re += x.real().cwiseAbs2();
    sq_im += x.imag().cwiseAbs2();
  }
  const double n = static_cast<double>(samples);
  mc.mean = CMatrix(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      const double mre = sum_re(i, j) / n, mim = sum_im(i, j) / n;
      mc.mean(i, j) = cplx(mre, mim);
      const double parts[2][3] = {{mre, sq_re(i, j) / n, exact(i, j).real()},
                                  {mim, sq_im(i, j) / n, exact(i, j).imag()}};
      for (const auto& p : parts) {
        const double var = std::max(p[1] - p[0] * p[0], 0.0);
        const double se = std::sqrt(var / std::max(n - 1, 1.0));
        const double dev = std::abs(p[0] - p[2]);
        mc.max_abs_dev = std::max(mc.max_abs_dev, dev);
        if (se < 1e-14) {
          // Deterministic entry: must match exactly up to round-off.
          if (dev > 1e-12) mc.max_z = std::numeric_limits<double>::infinity();
          continue;
        }
        mc.max_z = std::max(mc.max_z, dev / se);
      }
    }
  }
  return mc;
}

}  // namespace

EnsembleKind parse_ensemble_kind(const std::string& s) {
  if (s == "haar_pure") return EnsembleKind::haar_pure;
  if (s == "ginibre_reduced") return EnsembleKind::ginibre_reduced;
  if (s == "haar_subsystem") return EnsembleKind::haar_subsystem;
  if (s == "ghse") return EnsembleKind::ghse;
  throw ConfigError("unknown ensemble kind: " + s);
}

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::haar_pure: return "haar_pure";
    case EnsembleKind::ginibre_reduced: return "ginibre_reduced";
    case EnsembleKind::haar_subsystem: return "haar_subsystem";
    case EnsembleKind::ghse: return "ghse";
  }
  return "unknown";
}

void EnsembleSpec::validate() const {
  if (n_A + n_B != n) throw ConfigError("ensemble: n_A + n_B must equal n");
  if (kind == EnsembleKind::haar_subsystem && m > n) {
    throw ConfigError("ensemble: haar_subsystem needs m <= n");
  }
  if (n + (kind == EnsembleKind::ghse ? m : 0) > kMaxSampleQubits) {
    throw CapExceeded("ensemble: state vector exceeds 2^20 entries");
  }
}

Ket haar_pure(std::size_t dim, SeededRng& rng) {
  if (dim == 0) throw DimensionError("haar_pure: dimension must be positive");
  if (dim == 1) return Ket(CVector::Ones(1), Dims{1});
  CVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
  v /= v.norm();
  return Ket(v, Dims{dim});
}

DensityOperator ginibre_reduced(std::size_t d_A, std::size_t d_B, SeededRng& rng) {
  const CMatrix g = random_ginibre(d_A, d_B, rng);
  CMatrix r = g * g.adjoint();
  r /= r.trace().real();
  return DensityOperator::trusted(r, Dims{d_A});
}

Ket haar_subsystem(std::size_t n, std::size_t m, SeededRng& rng) {
  if (m > n) throw ConfigError("haar_subsystem: m must not exceed n");
  if (n > kMaxSampleQubits) throw CapExceeded("haar_subsystem: n exceeds 20 qubits");
  const std::size_t dim = std::size_t{1} << n;
  std::vector<std::size_t> perm(dim);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = dim; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  const Ket phi = haar_pure(std::size_t{1} << m, rng);
  // |0^{n-m}> (x) |phi> occupies the first 2^m basis states.
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < phi.vec().size(); ++i) {
    v(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)])) = phi.vec()(i);
  }
  return Ket(v, Dims{dim});
}

DensityOperator ghse_sample_dims(std::size_t d_n, std::size_t d_m, SeededRng& rng) {
  const Ket psi = haar_pure(d_n * d_m, rng);
  return DensityOperator::trusted(reduce_first(psi.vec(), d_n, d_m), Dims{d_n});
}

DensityOperator ghse_sample(std::size_t n, std::size_t m, SeededRng& rng) {
  if (n + m > kMaxSampleQubits) throw CapExceeded("ghse_sample: n + m exceeds 20 qubits");
  return ghse_sample_dims(std::size_t{1} << n, std::size_t{1} << m, rng);
}

double mp_cdf(double x) {
  if (x <= 0) return 0;
  if (x >= 4) return 1;
  const double th = std::asin(std::sqrt(x / 4));
  return (2 / std::numbers::pi) * (th + std::sin(th) * std::cos(th));
}

double mp_density(double x) {
  if (x <= 0 || x >= 4) return 0;
  return std::sqrt((4 - x) / x) / (2 * std::numbers::pi);
}

EsdStats esd_stats(const DensityOperator& rho, std::size_t d_A, std::size_t bins) {
  if (rho.dim() != d_A) throw DimensionError("esd_stats: rho must live on d_A");
  if (bins == 0) throw ConfigError("esd_stats: need at least one bin");
  EsdStats st;
  const RVector ev = herm_eig(rho.mat()).values;
  for (Eigen::Index i = ev.size(); i-- > 0;) st.x.push_back(static_cast<double>(d_A) * ev(i));
  const double n = static_cast<double>(st.x.size());
  for (std::size_t i = 0; i < st.x.size(); ++i) {
    const double f = mp_cdf(st.x[i]);
    st.ks_to_mp = std::max({st.ks_to_mp, f - static_cast<double>(i) / n,
                            static_cast<double>(i + 1) / n - f});
  }
  st.max_x = st.x.back();
  st.histogram.assign(bins, 0);
  for (double x : st.x) {
    auto b = static_cast<std::size_t>(std::max(x, 0.0) / 4.0 * static_cast<double>(bins));
    ++st.histogram[std::min(b, bins - 1)];
  }
  return st;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ConfigError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical(std::size_t n1, std::size_t n2, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2));
  const double a = static_cast<double>(n1), b = static_cast<double>(n2);
  return c * std::sqrt((a + b) / (a * b));
}

double tr_sqrt_ratio(const DensityOperator& rho, std::size_t d_A) {
  return tr_sqrt(rho) / std::sqrt(static_cast<double>(d_A));
}

CMatrix permutation_operator(const std::vector<std::size_t>& perm, std::size_t d) {
  const std::size_t k = perm.size();
  std::size_t n = 1;
  for (std::size_t i = 0; i < k; ++i) n *= d;
  CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<std::size_t> digits(k), out(k);
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t r = x;
    for (std::size_t i = k; i-- > 0;) {
      digits[i] = r % d;
      r /= d;
    }
    // factor perm[i] of the output carries factor i of the input
    for (std::size_t i = 0; i < k; ++i) out[perm[i]] = digits[i];
    std::size_t y = 0;
    for (std::size_t i = 0; i < k; ++i) y = y * d + out[i];
    p(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = 1;
  }
  return p;
}

std::size_t cycle_count(const std::vector<std::size_t>& perm) {
  std::vector<bool> seen(perm.size(), false);
  std::size_t cycles = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    ++cycles;
    for (std::size_t j = i; !seen[j]; j = perm[j]) seen[j] = true;
  }
  return cycles;
}

CMatrix ghse_moment_exact(std::size_t d_n, std::size_t d_m, std::size_t k) {
  if (k == 0 || k > kMaxMomentCopies) throw CapExceeded("ghse_moment_exact: k must lie in [1, 6]");
  std::size_t n = 1;
  for (std::size_t i = 0; i < k; ++i) {
    n *= d_n;
    if (n > kMaxMomentDim) throw CapExceeded("ghse_moment_exact: d_n^k exceeds 4096");
  }
  const double D = static_cast<double>(d_n * d_m);
  double coef = 1;
  for (std::size_t i = 0; i < k; ++i) coef /= D + static_cast<double>(i);
  CMatrix sum = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  do {
    sum += std::pow(static_cast<double>(d_m), static_cast<double>(cycle_count(perm))) *
           permutation_operator(perm, d_n);
  } while (std::next_permutation(perm.begin(), perm.end()));
  sum *= coef;
  if (std::abs(sum.trace().real() - 1) > 1e-12) {
    throw InvariantError("ghse_moment_exact: moment operator does not have unit trace");
  }
  return sum;
}

CycleIdentity ghse_cycle_identity(std::size_t d_m, std::size_t k) {
  if (d_m == 0 || k == 0) throw ConfigError("ghse_cycle_identity: d_m and k must be positive");
  CycleIdentity out;
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  const BigInt dm = d_m;
  do {
    if (cycle_count(perm) == k) continue;  // identity
    out.lhs += boost::multiprecision::pow(dm, static_cast<unsigned>(cycle_count(perm)));
  } while (std::next_permutation(perm.begin(), perm.end()));
  BigInt rising = 1;
  for (std::size_t i = 0; i < k; ++i) rising *= dm + i;
  out.rhs = rising - boost::multiprecision::pow(dm, static_cast<unsigned>(k));
  return out;
}

MomentCheck ghse_moment_monte_carlo(std::size_t d_n, std::size_t d_m, std::size_t k,
                                    std::size_t samples, std::uint64_t seed) {
  const CMatrix exact = ghse_moment_exact(d_n, d_m, k);
  return moment_check(exact, samples, seed, [&](SeededRng& rng) {
    const CMatrix r = ghse_sample_dims(d_n, d_m, rng).mat();
    return kron_power(r, k);
  });
}

MomentCheck haar_second_moment(std::size_t dim, std::size_t samples, std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(dim);
  const CMatrix swap = permutation_operator({1, 0}, dim);
  const CMatrix exact =
      (CMatrix::Identity(d * d, d * d) + swap) / static_cast<double>(dim * (dim + 1));
  return moment_check(exact, samples, seed, [&](SeededRng& rng) {
    const CVector v = haar_pure(dim, rng).vec();
    const CVector vv = kron(v, v);
    return CMatrix(vv * vv.adjoint());
  });
}

}  // namespace ccq
