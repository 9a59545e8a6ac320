#include "ccq/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ccq/rng.hpp"

namespace ccq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fixed seed for the auxiliary sigma_B of the Def.-style route check.
constexpr std::uint64_t kRouteSeed = 0x5eedc0ffee123457ULL;

}  // namespace

bool DivergenceValue::infinite() const { return std::isinf(value) && value > 0; }

std::vector<double> cone_values(const ChoiSet& cs, const CMatrix& rho) {
  std::vector<double> v;
  v.reserve(cs.size());
  for (const auto& j : cs.generators) v.push_back(j.expect(rho));
  return v;
}

std::vector<double> cone_values(const ChoiSet& cs, const CVector& psi) {
  std::vector<double> v;
  v.reserve(cs.size());
  for (const auto& j : cs.generators) v.push_back(j.expect_pure(psi));
  return v;
}

bool cone_order_leq(const DensityOperator& rho, const DensityOperator& sigma, double scale,
                    const ChoiSet& cs) {
  if (rho.dim() != sigma.dim()) throw DimensionError("cone_order_leq: dimension mismatch");
  for (const auto& j : cs.generators) {
    if (j.expect(rho.mat()) > scale * j.expect(sigma.mat()) + tolerances().cone_slack) return false;
  }
  return true;
}

DivergenceValue dmax_from_values(const std::vector<double>& num, const std::vector<double>& den) {
  if (num.size() != den.size()) throw DimensionError("dmax: value lists differ in length");
  const double tden = tolerances().dmax_den, tnum = tolerances().dmax_num;
  DivergenceValue out;
  double best = -1;
  for (std::size_t j = 0; j < num.size(); ++j) {
    if (den[j] <= tden) {
      if (num[j] > tnum) {
        out.value = kInf;
        out.witness = j;
        return out;
      }
      continue;
    }
    const double r = num[j] / den[j];
    if (r > best) {
      best = r;
      out.witness = j;
    }
  }
  if (!out.witness) throw InvariantError("degenerate pair: every generator vanishes on both states");
  out.value = log2_safe(std::max(best, 0.0));
  return out;
}

DivergenceValue comp_dmax(const DensityOperator& rho, const DensityOperator& sigma,
                          const ChoiSet& cs) {
  if (cs.generators.empty()) throw ConfigError("comp_dmax: empty Choi set");
  if (rho.dim() != sigma.dim() || rho.dim() != cs.d_A * cs.d_B) {
    throw DimensionError("comp_dmax: dimension mismatch");
  }
  return dmax_from_values(cone_values(cs, rho.mat()), cone_values(cs, sigma.mat()));
}

namespace {

struct Candidate {
  double ratio = kInf;
  std::size_t i = 0;
  std::optional<std::size_t> j;
  double w = 1.0;
};

// Lower convex hull of (b, a) points; returns indices ordered by b.
std::vector<std::size_t> lower_hull(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<std::size_t> idx(a.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    return b[x] < b[y] || (b[x] == b[y] && a[x] < a[y]);
  });
  std::vector<std::size_t> h;
  for (auto p : idx) {
    if (!h.empty() && b[h.back()] == b[p]) continue;  // same b, larger a
    while (h.size() >= 2) {
      const auto o = h[h.size() - 2], q = h.back();
      const double cross = (b[q] - b[o]) * (a[p] - a[o]) - (a[q] - a[o]) * (b[p] - b[o]);
      if (cross <= 0) {
        h.pop_back();
      } else {
        break;
      }
    }
    h.push_back(p);
  }
  return h;
}

}  // namespace

DivergenceValue dh_from_values(const std::vector<double>& a, const std::vector<double>& b,
                               double eta, bool force_hull) {
  if (!(eta > 0 && eta <= 1)) throw ConfigError("comp_dh: eta must lie in (0, 1]");
  if (a.size() != b.size() || a.empty()) throw DimensionError("comp_dh: bad value lists");
  DivergenceValue out;
  const double bmax = *std::max_element(b.begin(), b.end());
  if (bmax < eta) {
    out.value = kInf;  // infeasible
    return out;
  }
  Candidate best;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (b[j] >= eta) {
      const double r = a[j] / b[j];
      if (r < best.ratio) best = Candidate{r, j, std::nullopt, 1.0};
    }
  }
  const std::size_t n = a.size();
  if (!force_hull && n <= 10000) {
    for (std::size_t i = 0; i < n; ++i) {
      if (b[i] <= eta) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (b[j] >= eta) continue;
        const double w = (eta - b[j]) / (b[i] - b[j]);
        const double r = (w * a[i] + (1 - w) * a[j]) / eta;
        if (r < best.ratio) best = Candidate{r, i, j, w};
      }
    }
  } else {
    const auto h = lower_hull(a, b);
    for (std::size_t k = 0; k + 1 < h.size(); ++k) {
      const auto lo = h[k], hi = h[k + 1];
      if (b[lo] < eta && b[hi] > eta) {
        const double w = (eta - b[lo]) / (b[hi] - b[lo]);
        const double r = (w * a[hi] + (1 - w) * a[lo]) / eta;
        if (r < best.ratio) best = Candidate{r, hi, lo, w};
      }
    }
  }
  out.witness = best.i;
  out.partner = best.j;
  out.weight = best.w;
  out.value = best.ratio <= 0 ? kInf : -std::log2(best.ratio);
  return out;
}

DivergenceValue comp_dh(const DensityOperator& rho, const DensityOperator& sigma,
                        const ChoiSet& cs, double eta) {
  if (cs.generators.empty()) throw ConfigError("comp_dh: empty Choi set");
  const double dA = static_cast<double>(cs.d_A);
  auto a = cone_values(cs, sigma.mat());
  auto b = cone_values(cs, rho.mat());
  for (auto& x : a) x /= dA;
  for (auto& x : b) x /= dA;
  return dh_from_values(a, b, eta);
}

namespace {

EntropyReport hmin_from_values(const std::vector<double>& vals, const ChoiSet& cs) {
  if (vals.empty()) throw ConfigError("comp_hmin: empty Choi set");
  std::size_t w = 0;
  for (std::size_t j = 1; j < vals.size(); ++j) {
    if (vals[j] > vals[w]) w = j;
  }
  EntropyReport r;
  r.computational = -log2_safe(std::max(vals[w], 0.0));
  r.witness = w;
  r.witness_label = cs.generators[w].label();

  // Same quantity through -D_max(rho || 1 (x) sigma_B) for an arbitrary sigma_B.
  SeededRng rng(kRouteSeed);
  const CMatrix sigma_b = random_density(cs.d_B, rng).mat();
  std::vector<double> den;
  den.reserve(cs.size());
  for (const auto& j : cs.generators) den.push_back(j.expect_id_tensor(sigma_b));
  const DivergenceValue d = dmax_from_values(vals, den);
  if (std::abs(-d.value - r.computational) > tolerances().route) {
    std::ostringstream os;
    os << "comp_hmin route mismatch: " << r.computational << " vs " << -d.value;
    throw InvariantError(os.str());
  }
  return r;
}

}  // namespace

EntropyReport comp_hmin(const DensityOperator& rho, const ChoiSet& cs) {
  if (rho.dim() != cs.d_A * cs.d_B) throw DimensionError("comp_hmin: dimension mismatch");
  return hmin_from_values(cone_values(cs, rho.mat()), cs);
}

EntropyReport comp_hmin(const Ket& psi, const ChoiSet& cs) {
  if (psi.dim() != cs.d_A * cs.d_B) throw DimensionError("comp_hmin: dimension mismatch");
  return hmin_from_values(cone_values(cs, psi.vec()), cs);
}

DensityOperator cq_state(const std::vector<double>& p, const std::vector<DensityOperator>& states) {
  if (p.size() != states.size() || p.empty()) throw ConfigError("cq_state: size mismatch");
  const std::size_t dB = states[0].dim();
  const std::size_t X = p.size();
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(X * dB), static_cast<Eigen::Index>(X * dB));
  for (std::size_t x = 0; x < X; ++x) {
    if (states[x].dim() != dB) throw DimensionError("cq_state: states differ in dimension");
    m.block(static_cast<Eigen::Index>(x * dB), static_cast<Eigen::Index>(x * dB),
            static_cast<Eigen::Index>(dB), static_cast<Eigen::Index>(dB)) = p[x] * states[x].mat();
  }
  return DensityOperator(m, Dims{X, dB});
}

GuessResult comp_guess(const std::vector<double>& p, const std::vector<DensityOperator>& states,
                       const FlaggedPovmSet& povms) {
  if (p.size() != states.size() || p.empty()) throw ConfigError("comp_guess: |p| != |states|");
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("comp_guess: probabilities do not sum to 1");
  if (povms.povms.empty()) throw ConfigError("comp_guess: empty POVM set");
  GuessResult best;
  best.pguess = -1;
  for (std::size_t k = 0; k < povms.povms.size(); ++k) {
    const auto& pv = povms.povms[k];
    double s = 0;
    std::vector<std::size_t> relabel(pv.effects.size(), 0);
    for (std::size_t i = 0; i < pv.effects.size(); ++i) {
      double top = -1;
      for (std::size_t x = 0; x < p.size(); ++x) {
        const double v = p[x] * trace_product(pv.effects[i], states[x].mat()).real();
        if (v > top) {
          top = v;
          relabel[i] = x;
        }
      }
      s += top;
    }
    if (s > best.pguess) {
      best.pguess = s;
      best.povm = k;
      best.relabeling = relabel;
    }
  }
  best.report.computational = -log2_safe(best.pguess);
  best.report.witness = best.povm;
  best.report.witness_label = povms.povms[best.povm].label;

  const ChoiSet flagged = flagged_choi_set(povms, p.size());
  const EntropyReport cq = comp_hmin(cq_state(p, states), flagged);
  if (std::abs(cq.computational - best.report.computational) > tolerances().route) {
    std::ostringstream os;
    os << "comp_guess disagrees with flagged comp_hmin: " << best.report.computational << " vs "
       << cq.computational;
    throw InvariantError(os.str());
  }
  return best;
}

DivergenceValue measured_dmax(const DensityOperator& rho, const DensityOperator& sigma,
                              const FlaggedPovmSet& povms) {
  if (rho.dim() != povms.d_B || sigma.dim() != povms.d_B) {
    throw DimensionError("measured_dmax: dimension mismatch");
  }
  std::vector<double> num, den;
  for (const auto& pv : povms.povms) {
    for (const auto& e : pv.effects) {
      num.push_back(trace_product(e, rho.mat()).real());
      den.push_back(trace_product(e, sigma.mat()).real());
    }
  }
  const DivergenceValue d = dmax_from_values(num, den);

  const ChoiSet flagged = flagged_choi_set(povms, 2);
  const DensityOperator flag0(basis_projector(2, 0));
  const DivergenceValue e = comp_dmax(kron(flag0, rho), kron(flag0, sigma), flagged);
  const bool agree = (d.infinite() && e.infinite()) ||
                     (!d.infinite() && !e.infinite() && std::abs(d.value - e.value) <= tolerances().route);
  if (!agree) {
    std::ostringstream os;
    os << "measured_dmax disagrees with flagged comp_dmax: " << d.value << " vs " << e.value;
    throw InvariantError(os.str());
  }
  return d;
}

double comp_op_norm(const CMatrix& x, const PreparableStateSet& prep) {
  if (herm_residual(x) > tolerances().herm * std::max(1.0, max_abs(x))) {
    throw InvariantError("comp_op_norm: operator is not Hermitian");
  }
  if (prep.states.empty()) throw ConfigError("comp_op_norm: empty preparable set");
  double best = 0;
  for (const auto& t : prep.states) {
    if (t.dim() != static_cast<std::size_t>(x.rows())) throw DimensionError("comp_op_norm: dimension mismatch");
    best = std::max(best, std::abs(trace_product(x, t.mat().transpose()).real()));
  }
  return best;
}

EntropyReport comp_hmin_noncond(const DensityOperator& rho, const PreparableStateSet& prep) {
  EntropyReport r;
  double best = -1;
  for (std::size_t i = 0; i < prep.states.size(); ++i) {
    const double v = std::abs(trace_product(rho.mat(), prep.states[i].mat().transpose()).real());
    if (v > best) {
      best = v;
      r.witness = i;
    }
  }
  if (best < 0) throw ConfigError("comp_hmin_noncond: empty preparable set");
  r.computational = -log2_safe(best);
  r.witness_label = prep.labels.empty() ? "" : prep.labels[r.witness];
  r.informational = -log2_safe(lambda_max(rho.mat()));
  r.gap = r.computational - *r.informational;
  return r;
}

}  // namespace ccq
