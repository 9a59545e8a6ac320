// ccq: command-line driver for the experiment runners.
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ccq/lab.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::string> gateset;
  std::optional<std::size_t> budget, ancillas, k, n, m, samples, n_A, n_B;
  std::optional<double> schmidt;
  std::optional<std::string> kind;
};

void add_options(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "experiment config file");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--gateset", o.gateset, "clifford_hsc | universal_htc | custom");
  sub->add_option("--budget", o.budget, "gate budget G");
  sub->add_option("--ancillas", o.ancillas, "maximum ancilla count");
  sub->add_option("--k", o.k, "number of copies");
  sub->add_option("--schmidt", o.schmidt, "Schmidt weight p of sqrt(p)|00> + sqrt(1-p)|11>");
  sub->add_option("--kind", o.kind, "ensemble kind");
  sub->add_option("--n", o.n, "ensemble qubits");
  sub->add_option("--m", o.m, "subsystem / environment qubits");
  sub->add_option("--samples", o.samples, "sample count");
  sub->add_option("--n-A", o.n_A, "qubits in A");
  sub->add_option("--n-B", o.n_B, "qubits in B");
}

ccq::ExperimentConfig resolve(const Overrides& o) {
  ccq::ExperimentConfig cfg = o.config.empty() ? ccq::ExperimentConfig{} : ccq::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.out = o.out;
  if (o.gateset) cfg.gateset = *o.gateset;
  if (o.budget) cfg.G = *o.budget;
  if (o.ancillas) cfg.a_max = *o.ancillas;
  if (o.k) cfg.k = *o.k;
  if (o.n) cfg.n = *o.n;
  if (o.m) cfg.m = *o.m;
  if (o.samples) cfg.samples = *o.samples;
  if (o.n_A) cfg.n_A = *o.n_A;
  if (o.n_B) cfg.n_B = *o.n_B;
  if (o.kind) cfg.kind = ccq::parse_ensemble_kind(*o.kind);
  if (o.schmidt) cfg.params["schmidt"] = std::to_string(*o.schmidt);
  return cfg;
}

}  // namespace

const std::map<std::string, std::string> kBlurbs = {
    {"separation-pure", "computational vs SDP min-entropy on k copies of a pure state"},
    {"separation-mixed", "same comparison on mixed ensemble samples"},
    {"gap-report", "gap table over the k_list sweep"},
    {"enumerate-channels", "enumerate the Choi set for a budget"},
    {"divergence", "restricted max-divergence of rho against sigma"},
    {"min-entropy", "restricted conditional min-entropy of one state"},
    {"guess", "restricted guessing probability for a two-state ensemble"},
    {"opnorm", "restricted operator norm and unconditional min-entropy"},
    {"schur-demo", "Schur-Weyl block table for k qubits"},
    {"concentrate", "concentration overlap and bound report"},
    {"ensemble-stats", "spectral statistics of an ensemble"},
    {"sdp-check", "solve the min-entropy SDP and dump the certificate"},
};

int main(int argc, char** argv) {
  CLI::App app{"ccq: computational vs information-theoretic quantum correlations"};
  app.require_subcommand(1);
  Overrides o;
  for (const auto& name : ccq::command_names()) add_options(app.add_subcommand(name, kBlurbs.count(name) ? kBlurbs.at(name) : ""), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const ccq::ExperimentConfig cfg = resolve(o);
    const ccq::CommandResult res = ccq::run_command(name, cfg);
    std::string text;
    ccq::write_outputs(name, res, cfg.out, text);
    std::cout << text;
    return 0;
  } catch (const ccq::InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const ccq::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
