// Acceptance runner: one PASS/FAIL line per criterion. argv[1] is the ccq CLI.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "ccq/channels.hpp"
#include "ccq/config.hpp"
#include "ccq/divergences.hpp"
#include "ccq/ensembles.hpp"
#include "ccq/lab.hpp"
#include "ccq/refentropy.hpp"
#include "ccq/schurweyl.hpp"

using namespace ccq;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  std::string id;
  double time_limit;  // seconds; 0 means none
  std::function<Outcome()> run;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::shared_ptr<const GateSet> clifford() {
  return std::make_shared<const GateSet>(builtin_gate_set("clifford_hsc"));
}

DensityOperator id_tensor(const DensityOperator& sigma_B, std::size_t dA) {
  const auto n = static_cast<Eigen::Index>(dA);
  return DensityOperator(kron(CMatrix(CMatrix::Identity(n, n) / static_cast<double>(dA)), sigma_B.mat()),
                         {dA, sigma_B.dim()});
}

Outcome ac1() {
  const ChoiSet cs = generate_choi_set(clifford(), {2, 1, 1}, 2, 2);
  const DensityOperator omega = max_entangled(2).density();
  const double comp = comp_hmin(omega, cs).computational;
  const double info = hmin_sdp(omega).hmin();
  Outcome o;
  o.pass = std::abs(comp + 1) <= 1e-6 && std::abs(info + 1) <= 1e-6;
  o.detail = "comp=" + num(comp) + " sdp=" + num(info);
  return o;
}

Outcome ac2() {
  double worst_gap = 0, worst_pure = 0;
  std::size_t n = 0;
  for (std::size_t d : {2u, 4u}) {
    for (std::size_t i = 0; i < 25; ++i) {
      SeededRng rng = SeededRng(2002, d).substream(i);
      const DensityOperator mixed(random_density(d * d, rng).mat(), {d, d});
      const SdpSolution s = hmin_sdp(mixed);
      worst_gap = std::max(worst_gap, s.gap / (1 + std::abs(s.primal_value)));

      const Ket psi(haar_pure(d * d, rng).vec(), {d, d});
      const SdpSolution p = hmin_sdp(psi.density());
      worst_gap = std::max(worst_gap, p.gap / (1 + std::abs(p.primal_value)));
      worst_pure = std::max(worst_pure, std::abs(p.hmin() - hmin_pure(psi)));
      n += 2;
    }
  }
  Outcome o;
  o.pass = worst_gap <= 1e-7 && worst_pure <= 1e-6;
  o.detail = std::to_string(n) + " solves, max rel gap=" + num(worst_gap) + " max |sdp-pure|=" + num(worst_pure);
  return o;
}

Outcome ac3() {
  const ChoiSet cs = generate_choi_set(clifford(), {2, 1, 1}, 2, 2);
  double worst = 0, worst_route = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    SeededRng rng = SeededRng(3003).substream(i);
    const DensityOperator rho(random_density(4, rng).mat(), {2, 2});
    const double ref = comp_dmax(rho, id_tensor(random_density(2, rng), 2), cs).value;
    for (int s = 0; s < 10; ++s) {
      worst = std::max(worst, std::abs(comp_dmax(rho, id_tensor(random_density(2, rng), 2), cs).value - ref));
    }
    // Down-arrow value -D(rho || 1 (x) sigma_B) against the generator-maximum form.
    worst_route = std::max(worst_route, std::abs((1.0 - ref) - comp_hmin(rho, cs).computational));
  }
  Outcome o;
  o.pass = worst <= 1e-10 && worst_route <= 1e-9;
  o.detail = "max spread=" + num(worst) + " route diff=" + num(worst_route);
  return o;
}

Outcome ac4() {
  const ChoiSet cs = generate_choi_set(clifford(), {2, 1, 1}, 2, 2);
  double worst = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    SeededRng rng = SeededRng(4004).substream(i);
    const DensityOperator rho(random_density(4, rng).mat(), {2, 2});
    const DensityOperator sigma = id_tensor(partial_trace(rho, {1}), 2);
    const double dmax = comp_dmax(rho, sigma, cs).value;
    double top = 0;
    for (const auto& j : cs.generators) top = std::max(top, j.expect(rho.mat()) / 2.0);
    for (double f : {0.1, 0.3, 0.5, 0.8, 1.0}) {
      worst = std::max(worst, std::abs(comp_dh(rho, sigma, cs, f * top).value - dmax));
    }
  }
  Outcome o;
  o.pass = worst <= 1e-9;
  o.detail = "100 (instance, eta) pairs, max diff=" + num(worst);
  return o;
}

Outcome ac5() {
  const GateSet hst = parse_gate_set("name = hst\ngate H = builtin H\ngate S = builtin S\ngate T = builtin T\n");
  const FlaggedPovmSet rich = flag_povm_set(hst, {5, 1, 0}, 2, 2);
  const FlaggedPovmSet cliff = flag_povm_set(builtin_gate_set("clifford_hsc"), {3, 1, 1}, 2, 2);

  double worst_route = 0;
  bool below = true;
  for (const FlaggedPovmSet* f : {&rich, &cliff}) {
    const ChoiSet flagged = flagged_choi_set(*f, 2);
    for (std::size_t i = 0; i < 20; ++i) {
      SeededRng rng = SeededRng(5005).substream(i);
      const double p0 = rng.uniform();
      const std::vector<double> p{p0, 1 - p0};
      const std::vector<DensityOperator> st{random_density(2, rng), random_density(2, rng)};
      const GuessResult g = comp_guess(p, st, *f);
      worst_route = std::max(worst_route, std::abs(comp_hmin(cq_state(p, st), flagged).computational -
                                                   g.report.computational));
      below &= g.pguess <= pguess_helstrom(p[0], st[0], p[1], st[1]) + 1e-9;
    }
  }
  const DensityOperator zero(basis_projector(2, 0));
  const CVector plus = (basis_ket(2, 0) + basis_ket(2, 1)) / std::sqrt(2.0);
  const DensityOperator pl(CMatrix(plus * plus.adjoint()));
  const double helstrom = pguess_helstrom(0.5, zero, 0.5, pl);
  const double pg = comp_guess({0.5, 0.5}, {zero, pl}, rich).pguess;
  const double pg_cliff = comp_guess({0.5, 0.5}, {zero, pl}, cliff).pguess;
  Outcome o;
  o.pass = worst_route <= 1e-9 && below && pg >= 0.99 * helstrom && std::abs(helstrom - 0.85355) < 1e-5;
  o.detail = "route diff=" + num(worst_route) + " helstrom=" + num(helstrom) + " {H,S,T}@5 pguess=" +
             num(pg) + " ratio=" + num(pg / helstrom) + " (clifford_hsc@3: " + num(pg_cliff) + ")";
  return o;
}

Outcome ac6() {
  std::size_t count = 0;
  std::string failure;
  const std::vector<std::string> sets{"clifford_hsc", "universal_htc"};
  struct Case {
    std::size_t G, n_B, a, d_A;
  };
  const std::vector<Case> cases{{0, 1, 0, 2}, {1, 1, 1, 2}, {2, 1, 1, 2}, {3, 1, 1, 2},
                                {2, 2, 0, 4}, {2, 2, 1, 4}, {2, 2, 1, 2}, {2, 1, 1, 4}};
  for (const auto& name : sets) {
    const auto gs = std::make_shared<const GateSet>(builtin_gate_set(name));
    for (const auto& c : cases) {
      const std::size_t d_B = std::size_t{1} << c.n_B;
      const ChoiSet cs = generate_choi_set(gs, {c.G, c.n_B, c.a}, c.d_A, d_B);
      for (const auto& j : cs.generators) {
        ++count;
        const CMatrix m = j.mat();
        const auto dB = static_cast<Eigen::Index>(d_B);
        const CMatrix e = m / static_cast<double>(c.d_A);
        const auto ev = herm_eig(e).values;
        const CMatrix slice = partial_trace(m, {c.d_A, d_B}, {1});
        const CMatrix eslice = partial_trace(e, {c.d_A, d_B}, {1});
        const bool ok = ev.minCoeff() >= -1e-8 && ev.maxCoeff() <= 1 + 1e-8 &&
                        max_abs(slice - CMatrix::Identity(dB, dB)) <= 1e-8 &&
                        max_abs(eslice - CMatrix::Identity(dB, dB) / static_cast<double>(c.d_A)) <= 1e-8;
        if (!ok && failure.empty()) failure = name + ":" + j.label();
      }
    }
  }
  const CompletenessRank r = informational_completeness_rank(pauli_mp_family(1));
  Outcome o;
  o.pass = failure.empty() && r.rank == 13 && r.full;
  o.detail = std::to_string(count) + " generators checked" + (failure.empty() ? "" : ", first failure " + failure) +
             "; pauli_mp rank=" + std::to_string(r.rank);
  return o;
}

Outcome ac7() {
  double complete = 0, orth = 0, decomp = 0, tp = 0, tp_scaled = 0, dual = 0, formula = 0;
  bool dims_exact = true;
  for (std::size_t k = 1; k <= 5; ++k) {
    const SchurBlockTable t = schur_blocks(k);
    complete = std::max(complete, t.completeness_residual());
    orth = std::max(orth, t.orthogonality_residual());
    for (const auto& b : t.blocks) {
      dims_exact &= BigInt(b.dim_u) == dim_unitary_irrep(b.lam, 2);
      dims_exact &= BigInt(b.dim_v) == dim_symmetric_irrep(b.lam);
      dims_exact &= std::llround(b.projector.trace()) == static_cast<long long>(b.dim_u * b.dim_v);
    }
    const ConcentrationChannel ch = build_concentration_channel(t);
    tp = std::max(tp, ch.tp_residual);
    tp_scaled = std::max(tp_scaled, ch.tp_residual_normalized);
    for (std::size_t i = 0; i < 5; ++i) {
      SeededRng rng = SeededRng(7007, k).substream(i);
      const Ket psi(haar_pure(4, rng).vec(), {2, 2});
      decomp = std::max(decomp, decomposition_check(psi, t).residual);
      const OverlapReport r = concentrate_overlap(psi, ch, t);
      dual = std::max(dual, std::abs(r.overlap - r.overlap_lambda));
      const auto pr = pr_lambda(partial_trace(psi.density(), {0}), t);
      double f = 0;
      for (std::size_t b = 0; b < pr.size(); ++b) {
        f += pr[b] * static_cast<double>(t.blocks[b].dim_v) / static_cast<double>(t.dim());
      }
      formula = std::max(formula, std::abs(r.overlap - f));
    }
  }
  const SchurBlockTable t2 = schur_blocks(2);
  const double om = concentrate_overlap(max_entangled(2), build_concentration_channel(t2), t2).overlap;
  Outcome o;
  o.pass = complete < 1e-9 && orth < 1e-9 && dims_exact && decomp < 1e-9 && tp < 1e-9 && dual < 1e-9 &&
           formula < 1e-9 && std::abs(om - 0.25) < 1e-9;
  o.detail = "completeness=" + num(complete) + " orth=" + num(orth) + " dims=" + (dims_exact ? "exact" : "MISMATCH") +
             " decomp=" + num(decomp) + " TP residual=" + num(tp) + " (1/sqrt(dim_u)-scaled: " + num(tp_scaled) +
             ") dual-path=" + num(dual) + " formula=" + num(formula) + " omega k=2 overlap=" + num(om);
  return o;
}

Outcome ac8() {
  double s = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    SeededRng rng = SeededRng(8008).substream(i);
    s += tr_sqrt_ratio(ginibre_reduced(32, 32, rng), 32);
  }
  const double mean = s / 200, target = 8 / (3 * M_PI);
  bool decreasing = true;
  std::string trend;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto ks = [seed](std::size_t d) {
      double acc = 0;
      for (std::size_t i = 0; i < 20; ++i) {
        SeededRng rng = SeededRng(seed, d).substream(i);
        acc += esd_stats(ginibre_reduced(d, d, rng), d).ks_to_mp;
      }
      return acc / 20;
    };
    const double k8 = ks(8), k16 = ks(16), k32 = ks(32);
    decreasing &= k32 < k16 && k16 < k8;
    trend += " [" + num(k8) + "," + num(k16) + "," + num(k32) + "]";
  }
  Outcome o;
  o.pass = std::abs(mean - target) <= 0.02 && decreasing;
  o.detail = "mean ratio=" + num(mean) + " target=" + num(target) + " KS d=8,16,32:" + trend;
  return o;
}

Outcome ac9() {
  const MomentCheck mc = ghse_moment_monte_carlo(4, 2, 2, 100000, 9009);
  bool identity = true;
  for (std::size_t k = 1; k <= 6; ++k)
    for (std::size_t dm = 1; dm <= 16; ++dm) identity &= ghse_cycle_identity(dm, k).holds();
  Outcome o;
  o.pass = mc.within(5.0) && identity;
  o.detail = "max z=" + num(mc.max_z) + " over " + std::to_string(mc.samples) + " samples; cycle identity " +
             (identity ? "exact" : "FAILED");
  return o;
}

Outcome ac10() {
  ExperimentConfig cfg;
  cfg.kind = EnsembleKind::ghse;
  cfg.n_A = 2;
  cfg.n_B = 2;
  cfg.m = 2;
  cfg.k = 1;
  cfg.G = 2;
  cfg.a_max = 0;
  cfg.samples = 50;
  cfg.seed = 10010;
  cfg.epsilon = 0.3;
  const SeparationRun run = run_separation_mixed(cfg);
  double worst_order = 1e300;
  for (const auto& r : run.records) worst_order = std::min(worst_order, r.computational - r.informational);
  const double mean_gap = run.summary["mean_gap"].get<double>();
  const double frac = run.summary["fraction_near_maximal"].get<double>();
  Outcome o;
  o.pass = worst_order >= -1e-7 && mean_gap > 0 && frac >= 0.9;
  o.detail = "generators=" + std::to_string(run.summary["generators"].get<std::size_t>()) +
             " min(comp-info)=" + num(worst_order) + " mean gap=" + num(mean_gap) +
             " mean comp=" + num(run.summary["mean_computational"].get<double>()) +
             " near-maximal fraction=" + num(frac) + " (needs >= 0.9)";
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome ac11(const std::string& cli) {
  Outcome o;
  if (cli.empty()) {
    o.pass = false;
    o.detail = "no CLI path given";
    return o;
  }
  const fs::path base = fs::temp_directory_path() / "ccq_acceptance_determinism";
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path cfg = base / "run.cfg";
  std::ofstream(cfg) << "[experiment]\nbudget = 2\nancillas = 1\nk = 2\nk_list = 1,2\nm = 1\nsamples = 4\n"
                        "kind = ghse\nrho = random:1\nschmidt = 0.8\n";
  const std::vector<std::string> commands{"separation-pure --kind haar_pure", "separation-mixed", "gap-report",
                                          "enumerate-channels", "divergence", "min-entropy", "guess",
                                          "opnorm", "schur-demo", "concentrate", "ensemble-stats --n 4 --m 2",
                                          "sdp-check"};
  std::size_t files = 0;
  for (const auto& c : commands) {
    const std::string name = c.substr(0, c.find(' '));
    for (const char* run : {"a", "b"}) {
      const fs::path out = base / run / name;
      const std::string cmd = "\"" + cli + "\" " + c + " --config \"" + cfg.string() + "\" --seed 11 --out \"" +
                              out.string() + "\" > /dev/null";
      if (std::system(cmd.c_str()) != 0) {
        o.pass = false;
        o.detail = "command failed: " + c;
        return o;
      }
    }
    for (const auto& e : fs::directory_iterator(base / "a" / name)) {
      ++files;
      const fs::path other = base / "b" / name / e.path().filename();
      if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
        o.pass = false;
        o.detail = "differs: " + name + "/" + e.path().filename().string();
        return o;
      }
    }
  }
  fs::remove_all(base);
  o.detail = std::to_string(commands.size()) + " commands, " + std::to_string(files) + " files byte-identical";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<Criterion> criteria{
      {"AC1", 1, ac1},   {"AC2", 30, ac2},  {"AC3", 0, ac3},   {"AC4", 0, ac4},
      {"AC5", 0, ac5},   {"AC6", 0, ac6},   {"AC7", 60, ac7},  {"AC8", 120, ac8},
      {"AC9", 120, ac9}, {"AC10", 0, ac10}, {"AC11", 0, [&] { return ac11(cli); }},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0 && secs > c.time_limit) {
      o.pass = false;
      o.detail += " [over time limit " + num(c.time_limit) + " s]";
    }
    std::printf("%s %s (%.2f s) %s\n", o.pass ? "PASS" : "FAIL", c.id.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
