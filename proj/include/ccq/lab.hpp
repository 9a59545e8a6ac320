#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccq/channels.hpp"
#include "ccq/densemath.hpp"
#include "ccq/ensembles.hpp"
#include "ccq/rng.hpp"

namespace ccq {

using Json = nlohmann::ordered_json;

// Key-value config with [experiment], [gateset] and [tolerances] sections.
struct ExperimentConfig {
  std::string gateset = "clifford_hsc";
  std::string gateset_text;  // body of [gateset] when gateset = custom
  std::size_t G = 2;
  std::size_t a_max = 0;
  std::size_t n_A = 1;
  std::size_t n_B = 1;
  std::size_t n = 0;  // ensemble qubits; 0 means n_A + n_B
  std::size_t k = 1;
  std::vector<std::size_t> k_list{1, 2};  // gap-report sweep
  EnsembleKind kind = EnsembleKind::haar_pure;
  std::size_t m = 0;
  std::size_t samples = 10;
  std::uint64_t seed = 1;
  std::string out;
  double epsilon = 0.3;       // near-maximality margin for the mixed family
  double slack = 1e-7;
  bool all_output_subsets = false;
  std::map<std::string, std::string> params;  // command-specific keys (rho, sigma, eta, ...)
  std::map<std::string, double> tolerance_overrides;

  std::string param(const std::string& key, const std::string& fallback) const;
  double param_double(const std::string& key, double fallback) const;
  std::size_t total_qubits() const { return n ? n : n_A + n_B; }
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void apply_tolerances(const ExperimentConfig& cfg);
Json tolerances_json();

std::shared_ptr<const GateSet> make_gate_set(const ExperimentConfig& cfg);

// State mini-language: maxmixed, bell, plus, schmidt:P, basis:I, random[:S], file:PATH.
DensityOperator parse_state(const std::string& spec, const Dims& dims, std::uint64_t seed);

// psi^{(x)k} and rho^{(x)k} regrouped onto (A_1..A_k)(B_1..B_k).
Ket tensor_copies(const Ket& psi, std::size_t k, std::size_t d_A, std::size_t d_B);
DensityOperator tensor_copies(const DensityOperator& rho, std::size_t k, std::size_t d_A,
                              std::size_t d_B);

// Generators on A^k B^k from the configured gate set and budget.
ChoiSet experiment_choi_set(const ExperimentConfig& cfg, std::size_t copies);

struct GapRecord {
  std::size_t id = 0;
  double informational = 0;
  double computational = 0;
  double gap = 0;
  std::string witness;
  std::map<std::string, double> diagnostics;

  Json to_json() const;
};

struct SeparationRun {
  std::vector<GapRecord> records;
  Json summary;
};

SeparationRun run_separation_pure(const ExperimentConfig& cfg);
SeparationRun run_separation_mixed(const ExperimentConfig& cfg);
SeparationRun run_separation_mixed(const ExperimentConfig& cfg, const ChoiSet& cs);

// Columnar rows: family,k,mean_informational,mean_computational,min/max bands.
std::string run_gap_report(const ExperimentConfig& cfg);

struct CommandResult {
  Json summary;
  std::vector<Json> records;
  std::map<std::string, std::string> files;  // extra artefacts keyed by file name
  std::string text;                           // human-readable table
};

const std::vector<std::string>& command_names();
CommandResult run_command(const std::string& name, const ExperimentConfig& cfg);

// Writes <name>.json (+ records.jsonl and the extra files) into out_dir, or the
// summary to `stdout_text` when out_dir is empty.
void write_outputs(const std::string& name, const CommandResult& res, const std::string& out_dir,
                   std::string& stdout_text);

// +inf as the string "inf".
Json number_json(double v);

}  // namespace ccq
