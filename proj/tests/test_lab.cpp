#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ccq/config.hpp"
#include "ccq/divergences.hpp"
#include "ccq/lab.hpp"
#include "ccq/matrix_io.hpp"
#include "ccq/refentropy.hpp"

using namespace ccq;
using Catch::Matchers::WithinAbs;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig cfg = parse_config(
      "# comment\n"
      "[experiment]\n"
      "gateset = universal_htc\n"
      "budget = 3\n"
      "ancillas = 1\n"
      "n_A = 2\n"
      "n_B = 2\n"
      "k = 2\n"
      "k_list = 1,2,3\n"
      "kind = ghse\n"
      "m = 2\n"
      "samples = 7\n"
      "seed = 42\n"
      "epsilon = 0.25\n"
      "rho = schmidt:0.9\n"
      "[tolerances]\n"
      "sdp_gap = 1e-8\n");
  CHECK(cfg.gateset == "universal_htc");
  CHECK(cfg.G == 3);
  CHECK(cfg.a_max == 1);
  CHECK(cfg.n_A == 2);
  CHECK(cfg.k == 2);
  CHECK(cfg.k_list == std::vector<std::size_t>{1, 2, 3});
  CHECK(cfg.kind == EnsembleKind::ghse);
  CHECK(cfg.m == 2);
  CHECK(cfg.samples == 7);
  CHECK(cfg.seed == 42);
  CHECK(cfg.epsilon == 0.25);
  CHECK(cfg.param("rho", "") == "schmidt:0.9");
  CHECK(cfg.tolerance_overrides.at("sdp_gap") == 1e-8);
  CHECK(cfg.total_qubits() == 4);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("[nope]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("budget 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("budget = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("kind = gue\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[tolerances]\nfoo = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("n_A = 0\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/ccq.cfg"), ConfigError);
}

TEST_CASE("custom gate set from a config block") {
  const ExperimentConfig cfg = parse_config(
      "gateset = custom\n"
      "[gateset]\n"
      "name = hst\n"
      "gate H = builtin H\n"
      "gate T = builtin T\n");
  const auto gs = make_gate_set(cfg);
  CHECK(gs->name() == "hst");
  CHECK(gs->size() == 2);
  CHECK_THROWS_AS(make_gate_set(parse_config("gateset = custom\n")), ConfigError);
}

TEST_CASE("tolerance overrides apply and can be restored") {
  const double before = tolerances().sdp_gap;
  ExperimentConfig cfg;
  cfg.tolerance_overrides["sdp_gap"] = 1e-8;
  apply_tolerances(cfg);
  CHECK(tolerances().sdp_gap == 1e-8);
  CHECK(tolerances_json()["sdp_gap"] == 1e-8);
  tolerances().sdp_gap = before;
}

TEST_CASE("state specs") {
  const Dims d{2, 2};
  CHECK(max_abs(parse_state("maxmixed", d, 1).mat() - CMatrix::Identity(4, 4) / 4.0) < 1e-15);
  CHECK(max_abs(parse_state("bell", d, 1).mat() - max_entangled(2).density().mat()) < 1e-15);
  CHECK_THAT(parse_state("plus", d, 1).mat()(0, 3).real(), WithinAbs(0.25, 1e-15));
  CHECK_THAT(parse_state("schmidt:0.9", d, 1).mat()(3, 3).real(), WithinAbs(0.1, 1e-15));
  CHECK_THAT(parse_state("basis:2", d, 1).mat()(2, 2).real(), WithinAbs(1.0, 1e-15));
  CHECK(max_abs(parse_state("random:3", d, 9).mat() - parse_state("random:3", d, 9).mat()) == 0);
  CHECK(max_abs(parse_state("random:3", d, 9).mat() - parse_state("random:4", d, 9).mat()) > 0);
  CHECK_THROWS_AS(parse_state("basis:4", d, 1), ConfigError);
  CHECK_THROWS_AS(parse_state("schmidt:1.5", d, 1), ConfigError);
  CHECK_THROWS_AS(parse_state("ghz", d, 1), ConfigError);

  const auto path = std::filesystem::temp_directory_path() / "ccq_state_fixture.txt";
  save_matrix(path.string(), CMatrix::Identity(4, 4) / 4.0);
  CHECK(max_abs(parse_state("file:" + path.string(), d, 1).mat() - CMatrix::Identity(4, 4) / 4.0) < 1e-15);
  std::filesystem::remove(path);
}

TEST_CASE("tensor copies regroup onto A^k B^k") {
  SeededRng rng(251);
  const Ket psi(random_ginibre(4, 1, rng).col(0).normalized(), {2, 2});
  const Ket two = tensor_copies(psi, 2, 2, 2);
  // Amplitude <a1 a2 b1 b2| = psi(a1 b1) psi(a2 b2).
  for (std::size_t a1 = 0; a1 < 2; ++a1)
    for (std::size_t a2 = 0; a2 < 2; ++a2)
      for (std::size_t b1 = 0; b1 < 2; ++b1)
        for (std::size_t b2 = 0; b2 < 2; ++b2) {
          const cplx want = psi.vec()(static_cast<Eigen::Index>(a1 * 2 + b1)) *
                            psi.vec()(static_cast<Eigen::Index>(a2 * 2 + b2));
          const auto idx = static_cast<Eigen::Index>(((a1 * 2 + a2) * 2 + b1) * 2 + b2);
          CHECK(std::abs(two.vec()(idx) - want) < 1e-15);
        }
  const DensityOperator r2 = tensor_copies(psi.density(), 2, 2, 2);
  CHECK(max_abs(r2.mat() - two.density().mat()) < 1e-14);
  CHECK(r2.dims() == Dims{4, 4});
}

TEST_CASE("pure separation on single copies") {
  ExperimentConfig cfg;
  cfg.k = 1;
  cfg.samples = 8;
  cfg.G = 2;
  const SeparationRun run = run_separation_pure(cfg);
  REQUIRE(run.records.size() == 8);
  for (const auto& r : run.records) {
    CHECK(r.gap >= -1e-7);
    CHECK_THAT(r.gap, WithinAbs(r.computational - r.informational, 1e-15));
    CHECK(r.diagnostics.count("concentration_witness") == 1);
  }
  CHECK(run.summary["samples"] == 8);
}

TEST_CASE("identity witness on two maximally entangled copies") {
  ExperimentConfig cfg;
  cfg.G = 0;
  const ChoiSet cs = experiment_choi_set(cfg, 2);
  REQUIRE(cs.size() == 1);
  const Ket two = tensor_copies(max_entangled(2), 2, 2, 2);
  CHECK_THAT(comp_hmin(two, cs).computational, WithinAbs(-2.0, 1e-12));
  CHECK_THAT(2 * hmin_pure(max_entangled(2)), WithinAbs(-2.0, 1e-12));
}

TEST_CASE("Haar-subsystem samples respect the -m bound") {
  ExperimentConfig cfg;
  cfg.kind = EnsembleKind::haar_subsystem;
  cfg.n_A = 2;
  cfg.n_B = 2;
  cfg.m = 1;
  cfg.G = 1;
  cfg.samples = 10;
  const SeparationRun run = run_separation_pure(cfg);
  for (const auto& r : run.records) CHECK(r.informational >= -1.0 - 1e-12);
}

TEST_CASE("pure separation with two copies carries the concentration witness") {
  ExperimentConfig cfg;
  cfg.k = 2;
  cfg.G = 2;
  cfg.samples = 4;
  const SeparationRun run = run_separation_pure(cfg);
  for (const auto& r : run.records) {
    CHECK(r.informational <= r.diagnostics.at("concentration_witness") + 1e-7);
    CHECK(r.computational >= r.informational - 1e-7);
  }
}

TEST_CASE("mixed separation with a pure environment matches the pure run") {
  ExperimentConfig cfg;
  cfg.kind = EnsembleKind::ghse;
  cfg.m = 0;
  cfg.samples = 4;
  cfg.G = 1;
  const SeparationRun run = run_separation_mixed(cfg);
  for (const auto& r : run.records) {
    CHECK(r.gap >= -1e-7);
    // Pure GHSE samples: H_min equals minus twice the log of Tr sqrt(rho_A), and H(A|B) = -S(A).
    CHECK(r.informational <= r.diagnostics.at("conditional_entropy") + 1e-7);
  }
}

TEST_CASE("mixed separation sanity bounds") {
  ExperimentConfig cfg;
  cfg.kind = EnsembleKind::ghse;
  cfg.n_A = 1;
  cfg.n_B = 1;
  cfg.m = 2;
  cfg.k = 2;
  cfg.G = 1;
  cfg.samples = 3;
  const SeparationRun run = run_separation_mixed(cfg);
  for (const auto& r : run.records) {
    CHECK(r.informational <= r.diagnostics.at("conditional_entropy") * 2 + 1e-7);
    CHECK_THAT(r.diagnostics.at("hmin_joint"), WithinAbs(r.informational, 1e-5));
  }
  CHECK(run.summary.contains("fraction_near_maximal"));
}

TEST_CASE("a maximally mixing generator caps the computational entropy") {
  ExperimentConfig cfg;
  cfg.kind = EnsembleKind::ghse;
  cfg.m = 1;
  cfg.G = 1;
  cfg.samples = 5;
  ChoiSet cs = experiment_choi_set(cfg, 1);
  cs.generators.push_back(ChoiOperator::from_matrix(CMatrix::Identity(4, 4) / 2.0, 2, 2, 0, "mix"));
  const SeparationRun run = run_separation_mixed(cfg, cs);
  for (const auto& r : run.records) CHECK(r.computational <= 1.0 + 1e-9);
}

TEST_CASE("gap report columns") {
  ExperimentConfig cfg;
  cfg.k_list = {};
  CHECK(csv_rows(run_gap_report(cfg)).size() == 1);

  cfg.k_list = {1, 2};
  cfg.samples = 3;
  cfg.G = 1;
  cfg.m = 1;
  const auto rows = csv_rows(run_gap_report(cfg));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0][0] == "family");
  // rows: pure k=1, mixed k=1, pure k=2, mixed k=2
  const double p1 = std::stod(rows[1][3]), p2 = std::stod(rows[3][3]);
  CHECK_THAT(p2, WithinAbs(2 * p1, 1e-9));
  for (std::size_t i : {2u, 4u}) {
    CHECK(rows[i][0] == "mixed");
    CHECK(std::stod(rows[i][4]) >= std::stod(rows[i][3]) - 1e-7);
  }
}

TEST_CASE("command surface") {
  CHECK(command_names().size() == 12);
  CHECK_THROWS_AS(run_command("nope", ExperimentConfig{}), ConfigError);

  ExperimentConfig cfg;
  cfg.params["rho"] = "bell";
  const CommandResult me = run_command("min-entropy", cfg);
  CHECK_THAT(me.summary["value"].get<double>(), WithinAbs(-1.0, 1e-9));
  CHECK_THAT(me.summary["informational"].get<double>(), WithinAbs(-1.0, 1e-6));

  const CommandResult sdp = run_command("sdp-check", cfg);
  CHECK(sdp.files.count("sigma_B.txt") == 1);
  CHECK_THAT(sdp.summary["hmin"].get<double>(), WithinAbs(-1.0, 1e-6));

  ExperimentConfig c2;
  c2.k = 2;
  c2.params["schmidt"] = "0.5";
  const CommandResult conc = run_command("concentrate", c2);
  CHECK_THAT(conc.summary["overlap"].get<double>(), WithinAbs(0.25, 1e-12));
  CHECK_THAT(conc.summary["formula"].get<double>(), WithinAbs(0.25, 1e-12));

  ExperimentConfig c3;
  c3.params["quantity"] = "dmax";
  c3.params["rho"] = "bell";
  c3.params["sigma"] = "maxmixed";
  const CommandResult dv = run_command("divergence", c3);
  CHECK(dv.summary["value"].get<double>() <= dv.summary["exact_dmax"].get<double>() + 1e-9);

  ExperimentConfig c4;
  c4.G = 3;
  const CommandResult gs = run_command("guess", c4);
  CHECK(gs.summary["value"].get<double>() <= gs.summary["helstrom"].get<double>() + 1e-9);

  ExperimentConfig c5;
  c5.kind = EnsembleKind::ginibre_reduced;
  c5.n = 3;
  c5.m = 3;
  c5.samples = 5;
  const CommandResult es = run_command("ensemble-stats", c5);
  CHECK(es.summary["eigen_histogram"].size() == 16);
}

TEST_CASE("infinite values serialise as strings") {
  CHECK(number_json(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(number_json(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(number_json(1.5) == 1.5);
}

TEST_CASE("outputs are byte-identical across runs") {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "ccq_determinism_test";
  fs::remove_all(base);
  ExperimentConfig cfg;
  cfg.samples = 4;
  cfg.seed = 5;
  cfg.k = 2;
  for (const char* run : {"a", "b"}) {
    std::string text;
    write_outputs("separation-pure", run_command("separation-pure", cfg), (base / run).string(), text);
  }
  for (const char* f : {"separation-pure.json", "records.jsonl", "summary.csv"}) {
    const std::string a = slurp(base / "a" / f), b = slurp(base / "b" / f);
    CHECK_FALSE(a.empty());
    CHECK(a == b);
  }
  fs::remove_all(base);
}
