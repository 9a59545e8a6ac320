#include "ccq/lab.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ccq/divergences.hpp"
#include "ccq/matrix_io.hpp"
#include "ccq/refentropy.hpp"
#include "ccq/schurweyl.hpp"

namespace ccq {

namespace {

constexpr std::size_t kPureCopiesCap = 4096;
constexpr std::size_t kSdpCap = 256;
constexpr std::uint64_t kPureStream = 0x7075726573746174ULL;
constexpr std::uint64_t kMixedStream = 0x6d69786564737461ULL;
constexpr std::uint64_t kEnsembleStream = 0x656e73656d626c65ULL;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::size_t to_count(const std::string& key, const std::string& v) {
  try {
    if (v.empty() || v.front() == '-' || v.front() == '+') throw std::invalid_argument(v);
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos, 10);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
}

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: '" + key + "' expects true/false, got '" + v + "'");
}

struct TolField {
  const char* name;
  double Tolerances::*real;
};

const std::vector<TolField>& tol_fields() {
  static const std::vector<TolField> f = {
      {"herm", &Tolerances::herm},           {"psd", &Tolerances::psd},
      {"trace", &Tolerances::trace},         {"clip", &Tolerances::clip},
      {"unit_norm", &Tolerances::unit_norm}, {"gate_unitary", &Tolerances::gate_unitary},
      {"unitary", &Tolerances::unitary},     {"dedup", &Tolerances::dedup},
      {"choi_psd", &Tolerances::choi_psd},   {"choi_slice", &Tolerances::choi_slice},
      {"povm", &Tolerances::povm},           {"gram_rank", &Tolerances::gram_rank},
      {"dmax_den", &Tolerances::dmax_den},   {"dmax_num", &Tolerances::dmax_num},
      {"cone_slack", &Tolerances::cone_slack}, {"supp_eig", &Tolerances::supp_eig},
      {"supp_sigma", &Tolerances::supp_sigma}, {"route", &Tolerances::route},
      {"sdp_gap", &Tolerances::sdp_gap},     {"sdp_barrier", &Tolerances::sdp_barrier},
      {"ordering", &Tolerances::ordering},
  };
  return f;
}

std::size_t pow_size(std::size_t base, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

struct Stats {
  double sum = 0, lo = std::numeric_limits<double>::infinity(),
         hi = -std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
};

std::string witness_circuit(const ChoiOperator& j) {
  if (j.spec()) return to_linear(j.spec()->circuit);
  return j.label();
}

void ordering_check(const GapRecord& r) {
  if (r.computational < r.informational - tolerances().ordering) {
    std::ostringstream os;
    os << "record " << r.id << ": computational " << r.computational << " below informational "
       << r.informational;
    throw InvariantError(os.str());
  }
}

Json run_summary(const std::string& command, const ExperimentConfig& cfg, const ChoiSet& cs,
                 const std::vector<GapRecord>& recs) {
  Stats gap, info, comp;
  for (const auto& r : recs) {
    gap.add(r.gap);
    info.add(r.informational);
    comp.add(r.computational);
  }
  Json s;
  s["command"] = command;
  s["gateset"] = cfg.gateset;
  s["budget"] = cfg.G;
  s["ancillas"] = cfg.a_max;
  s["n_A"] = cfg.n_A;
  s["n_B"] = cfg.n_B;
  s["k"] = cfg.k;
  s["kind"] = to_string(cfg.kind);
  s["m"] = cfg.m;
  s["samples"] = recs.size();
  s["seed"] = cfg.seed;
  s["generators"] = cs.size();
  s["mean_informational"] = number_json(info.mean());
  s["mean_computational"] = number_json(comp.mean());
  s["mean_gap"] = number_json(gap.mean());
  s["min_gap"] = number_json(recs.empty() ? 0.0 : gap.lo);
  s["max_gap"] = number_json(recs.empty() ? 0.0 : gap.hi);
  return s;
}

std::string summary_csv(const Json& s) {
  std::ostringstream h, v;
  bool first = true;
  for (auto it = s.begin(); it != s.end(); ++it) {
    if (it.value().is_structured()) continue;
    h << (first ? "" : ",") << it.key();
    v << (first ? "" : ",");
    if (it.value().is_string()) {
      v << it.value().get<std::string>();
    } else if (it.value().is_number_float()) {
      v << fmt(it.value().get<double>());
    } else {
      v << it.value().dump();
    }
    first = false;
  }
  return h.str() + "\n" + v.str() + "\n";
}

Ket sample_pure(const ExperimentConfig& cfg, SeededRng& rng) {
  const std::size_t n = cfg.n_A + cfg.n_B;
  const Dims dims{std::size_t{1} << cfg.n_A, std::size_t{1} << cfg.n_B};
  switch (cfg.kind) {
    case EnsembleKind::haar_pure: return Ket(haar_pure(std::size_t{1} << n, rng).vec(), dims);
    case EnsembleKind::haar_subsystem: return Ket(haar_subsystem(n, cfg.m, rng).vec(), dims);
    default: throw ConfigError("separation-pure needs kind haar_pure or haar_subsystem");
  }
}

}  // namespace

std::string ExperimentConfig::param(const std::string& key, const std::string& fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double ExperimentConfig::param_double(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : to_real(key, it->second);
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line, section = "experiment";
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (section == "gateset") {
      const std::string t = trim(line);
      if (!(t.size() > 2 && t.front() == '[' && t.back() == ']')) {
        cfg.gateset_text += line + "\n";
        continue;
      }
    }
    const auto hash = line.find('#');
    const std::string t = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": bad section");
      section = trim(t.substr(1, t.size() - 2));
      if (section != "experiment" && section != "gateset" && section != "tolerances") {
        throw ConfigError("config: unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq)), val = trim(t.substr(eq + 1));
    if (section == "tolerances") {
      if (key != "sdp_max_iter" &&
          std::none_of(tol_fields().begin(), tol_fields().end(),
                       [&](const TolField& f) { return key == f.name; })) {
        throw ConfigError("config: unknown tolerance '" + key + "'");
      }
      cfg.tolerance_overrides[key] = to_real(key, val);
      continue;
    }
    if (key == "gateset") cfg.gateset = val;
    else if (key == "budget" || key == "G") cfg.G = to_count(key, val);
    else if (key == "ancillas" || key == "a_max") cfg.a_max = to_count(key, val);
    else if (key == "n_A") cfg.n_A = to_count(key, val);
    else if (key == "n_B") cfg.n_B = to_count(key, val);
    else if (key == "n") cfg.n = to_count(key, val);
    else if (key == "k") cfg.k = to_count(key, val);
    else if (key == "k_list") {
      cfg.k_list.clear();
      for (const auto& part : split(val, ',')) cfg.k_list.push_back(to_count(key, part));
    } else if (key == "kind") cfg.kind = parse_ensemble_kind(val);
    else if (key == "m") cfg.m = to_count(key, val);
    else if (key == "samples") cfg.samples = to_count(key, val);
    else if (key == "seed") cfg.seed = to_count(key, val);
    else if (key == "out") cfg.out = val;
    else if (key == "epsilon") cfg.epsilon = to_real(key, val);
    else if (key == "slack") cfg.slack = to_real(key, val);
    else if (key == "all_output_subsets") cfg.all_output_subsets = to_bool(key, val);
    else cfg.params[key] = val;
  }
  if (cfg.n_A == 0 || cfg.n_B == 0) throw ConfigError("config: n_A and n_B must be positive");
  if (cfg.k == 0) throw ConfigError("config: k must be positive");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void apply_tolerances(const ExperimentConfig& cfg) {
  auto& tol = tolerances();
  for (const auto& [key, value] : cfg.tolerance_overrides) {
    if (key == "sdp_max_iter") {
      tol.sdp_max_iter = static_cast<int>(value);
      continue;
    }
    for (const auto& f : tol_fields()) {
      if (key == f.name) tol.*(f.real) = value;
    }
  }
}

Json tolerances_json() {
  Json j;
  for (const auto& f : tol_fields()) j[f.name] = tolerances().*(f.real);
  j["sdp_max_iter"] = tolerances().sdp_max_iter;
  return j;
}

Json number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::shared_ptr<const GateSet> make_gate_set(const ExperimentConfig& cfg) {
  if (cfg.gateset == "custom") {
    if (trim(cfg.gateset_text).empty()) throw ConfigError("gateset = custom needs a [gateset] block");
    return std::make_shared<const GateSet>(parse_gate_set(cfg.gateset_text));
  }
  return std::make_shared<const GateSet>(builtin_gate_set(cfg.gateset));
}

DensityOperator parse_state(const std::string& spec, const Dims& dims, std::uint64_t seed) {
  const std::size_t d = dim_product(dims);
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  const auto D = static_cast<Eigen::Index>(d);
  if (head == "maxmixed") {
    return DensityOperator(CMatrix::Identity(D, D) / static_cast<double>(d), dims);
  }
  if (head == "bell") {
    if (dims.size() != 2 || dims[0] != dims[1]) throw ConfigError("state 'bell' needs d_A = d_B");
    return DensityOperator(max_entangled(dims[0]).density().mat(), dims);
  }
  if (head == "plus") {
    return DensityOperator(CMatrix::Constant(D, D, cplx(1.0 / static_cast<double>(d), 0)), dims);
  }
  if (head == "schmidt") {
    if (dims.size() != 2) throw ConfigError("state 'schmidt' needs a bipartition");
    const double p = to_real("schmidt", arg);
    if (!(p >= 0 && p <= 1)) throw ConfigError("schmidt weight must lie in [0, 1]");
    CVector v = CVector::Zero(D);
    v(0) = std::sqrt(p);
    v(static_cast<Eigen::Index>(dims[1] + 1)) = std::sqrt(1 - p);
    return Ket(v, dims).density();
  }
  if (head == "basis") {
    const std::size_t i = to_count("basis", arg);
    if (i >= d) throw ConfigError("basis index out of range");
    return DensityOperator(basis_projector(d, i), dims);
  }
  if (head == "random") {
    SeededRng rng(seed, arg.empty() ? 0 : to_count("random", arg));
    return DensityOperator(random_density(d, rng).mat(), dims);
  }
  if (head == "file") {
    const CMatrix m = load_matrix(arg);
    if (static_cast<std::size_t>(m.rows()) != d) throw DimensionError("state file has wrong dimension");
    return DensityOperator(m, dims);
  }
  throw ConfigError("unknown state spec '" + spec + "'");
}

Ket tensor_copies(const Ket& psi, std::size_t k, std::size_t d_A, std::size_t d_B) {
  if (psi.dim() != d_A * d_B) throw DimensionError("tensor_copies: ket is not on d_A x d_B");
  CVector v = psi.vec();
  Dims dims{d_A, d_B};
  for (std::size_t i = 1; i < k; ++i) {
    v = kron(v, psi.vec());
    dims.push_back(d_A);
    dims.push_back(d_B);
  }
  Indices perm;
  for (std::size_t i = 0; i < k; ++i) perm.push_back(2 * i);
  for (std::size_t i = 0; i < k; ++i) perm.push_back(2 * i + 1);
  return Ket(permute_subsystems(v, dims, perm), Dims{pow_size(d_A, k), pow_size(d_B, k)});
}

DensityOperator tensor_copies(const DensityOperator& rho, std::size_t k, std::size_t d_A,
                              std::size_t d_B) {
  if (rho.dim() != d_A * d_B) throw DimensionError("tensor_copies: state is not on d_A x d_B");
  CMatrix m = rho.mat();
  Dims dims{d_A, d_B};
  for (std::size_t i = 1; i < k; ++i) {
    m = kron(m, rho.mat());
    dims.push_back(d_A);
    dims.push_back(d_B);
  }
  Indices perm;
  for (std::size_t i = 0; i < k; ++i) perm.push_back(2 * i);
  for (std::size_t i = 0; i < k; ++i) perm.push_back(2 * i + 1);
  return DensityOperator::trusted(permute_subsystems(m, dims, perm),
                                  Dims{pow_size(d_A, k), pow_size(d_B, k)});
}

ChoiSet experiment_choi_set(const ExperimentConfig& cfg, std::size_t copies) {
  const auto gs = make_gate_set(cfg);
  EnumerationBudget b;
  b.G = cfg.G;
  b.n = cfg.n_B * copies;
  b.a_max = cfg.a_max;
  b.dedup_tol = tolerances().dedup;
  ChoiSetOptions opts;
  opts.all_output_subsets = cfg.all_output_subsets;
  return generate_choi_set(gs, b, std::size_t{1} << (cfg.n_A * copies),
                           std::size_t{1} << (cfg.n_B * copies), opts);
}

Json GapRecord::to_json() const {
  Json j;
  j["id"] = id;
  j["informational"] = number_json(informational);
  j["computational"] = number_json(computational);
  j["gap"] = number_json(gap);
  j["witness"] = witness;
  Json d = Json::object();
  for (const auto& [k, v] : diagnostics) d[k] = number_json(v);
  j["diagnostics"] = d;
  return j;
}

SeparationRun run_separation_pure(const ExperimentConfig& cfg) {
  if (cfg.kind != EnsembleKind::haar_pure && cfg.kind != EnsembleKind::haar_subsystem) {
    throw ConfigError("separation-pure needs kind haar_pure or haar_subsystem");
  }
  if (cfg.kind == EnsembleKind::haar_subsystem && cfg.m > cfg.n_A + cfg.n_B) {
    throw ConfigError("haar_subsystem needs m <= n_A + n_B");
  }
  const std::size_t d_A = std::size_t{1} << cfg.n_A, d_B = std::size_t{1} << cfg.n_B;
  if (pow_size(d_A * d_B, cfg.k) > kPureCopiesCap) {
    throw CapExceeded("separation-pure: (d_A d_B)^k exceeds 4096");
  }
  const ChoiSet cs = experiment_choi_set(cfg, cfg.k);

  const bool concentrate = cfg.n_A == 1 && cfg.n_B == 1 && cfg.k <= 5;
  std::optional<SchurBlockTable> table;
  std::optional<ConcentrationChannel> channel;
  if (concentrate) {
    table = schur_blocks(cfg.k);
    channel = build_concentration_channel(*table);
  }

  SeparationRun run;
  const SeededRng base(cfg.seed, kPureStream);
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    SeededRng rng = base.substream(i);
    const Ket psi = sample_pure(cfg, rng);
    const double single = hmin_pure(psi, d_A, d_B);
    if (cfg.kind == EnsembleKind::haar_subsystem &&
        single < -static_cast<double>(cfg.m) - tolerances().ordering) {
      std::ostringstream os;
      os << "sample " << i << ": H_min " << single << " below -m = -" << cfg.m;
      throw InvariantError(os.str());
    }
    const EntropyReport rep = comp_hmin(tensor_copies(psi, cfg.k, d_A, d_B), cs);

    GapRecord r;
    r.id = i;
    r.informational = static_cast<double>(cfg.k) * single;
    r.computational = rep.computational;
    r.gap = r.computational - r.informational;
    r.witness = witness_circuit(cs.generators[rep.witness]);
    r.diagnostics["hmin_single_copy"] = single;
    if (concentrate) {
      const OverlapReport ov = concentrate_overlap(psi, *channel, *table);
      const double d = static_cast<double>(table->dim());
      const double witness = -log2_safe(d * ov.overlap_normalized);
      r.diagnostics["concentration_witness"] = witness;
      r.diagnostics["concentration_overlap"] = ov.overlap;
      if (r.informational > witness + tolerances().ordering) {
        std::ostringstream os;
        os << "sample " << i << ": informational " << r.informational
           << " exceeds the concentration witness " << witness;
        throw InvariantError(os.str());
      }
    }
    ordering_check(r);
    run.records.push_back(std::move(r));
  }
  run.summary = run_summary("separation-pure", cfg, cs, run.records);
  return run;
}

SeparationRun run_separation_mixed(const ExperimentConfig& cfg) {
  return run_separation_mixed(cfg, experiment_choi_set(cfg, cfg.k));
}

SeparationRun run_separation_mixed(const ExperimentConfig& cfg, const ChoiSet& cs) {
  if (cfg.kind != EnsembleKind::ghse) throw ConfigError("separation-mixed needs kind ghse");
  const std::size_t n = cfg.n_A + cfg.n_B;
  const std::size_t d_A = std::size_t{1} << cfg.n_A, d_B = std::size_t{1} << cfg.n_B;
  if (d_A * d_B > kSdpCap) throw CapExceeded("separation-mixed: single-copy SDP needs d_A d_B <= 256");
  if (pow_size(d_A * d_B, cfg.k) > kPureCopiesCap) {
    throw CapExceeded("separation-mixed: (d_A d_B)^k exceeds 4096");
  }
  if (cs.d_A != pow_size(d_A, cfg.k) || cs.d_B != pow_size(d_B, cfg.k)) {
    throw DimensionError("separation-mixed: Choi set does not match the configured registers");
  }
  const bool cross_check = cfg.k > 1 && pow_size(d_A * d_B, cfg.k) <= kSdpCap;
  const double kd = static_cast<double>(cfg.k);
  const double near_max = kd * static_cast<double>(cfg.n_A) - cfg.epsilon;
  const double info_bound =
      -kd * (static_cast<double>(cfg.n_A) - static_cast<double>(cfg.m)) + cfg.slack;

  SeparationRun run;
  std::size_t n_near = 0, n_bound = 0;
  const SeededRng base(cfg.seed, kMixedStream);
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    SeededRng rng = base.substream(i);
    const DensityOperator rho = DensityOperator::trusted(ghse_sample(n, cfg.m, rng).mat(), Dims{d_A, d_B});
    const SdpSolution sol = hmin_sdp(rho, d_A, d_B);
    const double single = sol.hmin();

    // H_min(A|B) <= H(A|B) = S(AB) - S(B).
    const double cond = von_neumann_entropy(rho) - von_neumann_entropy(partial_trace(rho, Indices{1}));
    if (single > cond + tolerances().ordering) {
      std::ostringstream os;
      os << "sample " << i << ": H_min " << single << " exceeds conditional entropy " << cond;
      throw InvariantError(os.str());
    }

    const DensityOperator copies = tensor_copies(rho, cfg.k, d_A, d_B);
    const EntropyReport rep = comp_hmin(copies, cs);

    GapRecord r;
    r.id = i;
    r.informational = kd * single;
    r.computational = rep.computational;
    r.gap = r.computational - r.informational;
    r.witness = witness_circuit(cs.generators[rep.witness]);
    r.diagnostics["hmin_single_copy"] = single;
    r.diagnostics["conditional_entropy"] = cond;
    r.diagnostics["sdp_gap"] = sol.gap;
    if (cross_check) {
      const double joint = hmin_sdp(copies).hmin();
      r.diagnostics["hmin_joint"] = joint;
      if (std::abs(joint - r.informational) > 1e-5) {
        std::ostringstream os;
        os << "sample " << i << ": additivity check failed, " << joint << " vs " << r.informational;
        throw InvariantError(os.str());
      }
    }
    ordering_check(r);
    if (r.computational >= near_max) ++n_near;
    if (r.informational <= info_bound) ++n_bound;
    run.records.push_back(std::move(r));
  }
  run.summary = run_summary("separation-mixed", cfg, cs, run.records);
  const double ns = std::max<double>(1.0, static_cast<double>(cfg.samples));
  run.summary["epsilon"] = cfg.epsilon;
  run.summary["fraction_near_maximal"] = static_cast<double>(n_near) / ns;
  run.summary["fraction_informational_bound"] = static_cast<double>(n_bound) / ns;
  return run;
}

std::string run_gap_report(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "family,k,samples,mean_informational,mean_computational,min_informational,"
        "max_informational,min_computational,max_computational\n";
  auto row = [&](const std::string& family, std::size_t k, const SeparationRun& run) {
    Stats info, comp;
    for (const auto& r : run.records) {
      info.add(r.informational);
      comp.add(r.computational);
    }
    os << family << "," << k << "," << run.records.size() << "," << fmt(info.mean()) << ","
       << fmt(comp.mean()) << "," << fmt(info.lo) << "," << fmt(info.hi) << "," << fmt(comp.lo)
       << "," << fmt(comp.hi) << "\n";
  };
  for (const std::size_t k : cfg.k_list) {
    ExperimentConfig pure = cfg;
    pure.k = k;
    if (pure.kind != EnsembleKind::haar_subsystem) pure.kind = EnsembleKind::haar_pure;
    row("pure", k, run_separation_pure(pure));

    ExperimentConfig mixed = cfg;
    mixed.k = k;
    mixed.kind = EnsembleKind::ghse;
    row("mixed", k, run_separation_mixed(mixed));
  }
  return os.str();
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "separation-pure", "separation-mixed", "gap-report", "enumerate-channels",
      "divergence",      "min-entropy",      "guess",      "opnorm",
      "schur-demo",      "concentrate",      "ensemble-stats", "sdp-check"};
  return names;
}

namespace {

CommandResult from_run(const SeparationRun& run) {
  CommandResult res;
  res.summary = run.summary;
  for (const auto& r : run.records) res.records.push_back(r.to_json());
  res.files["summary.csv"] = summary_csv(run.summary);
  return res;
}

Dims bipartite_dims(const ExperimentConfig& cfg) {
  return Dims{std::size_t{1} << cfg.n_A, std::size_t{1} << cfg.n_B};
}

CommandResult cmd_enumerate(const ExperimentConfig& cfg) {
  const auto gs = make_gate_set(cfg);
  const ChoiSet cs = experiment_choi_set(cfg, 1);
  CommandResult res;
  for (const auto& j : cs.generators) {
    check_choi_invariants(j);
    Json r;
    r["label"] = j.label();
    r["circuit"] = witness_circuit(j);
    r["gate_count"] = j.gate_count();
    r["hash"] = content_hash(j.mat());
    res.records.push_back(r);
  }
  const CompletenessRank rank = informational_completeness_rank(cs);
  Json& s = res.summary;
  s["command"] = "enumerate-channels";
  s["gateset"] = gs->name();
  s["budget"] = cfg.G;
  s["ancillas"] = cfg.a_max;
  s["d_A"] = cs.d_A;
  s["d_B"] = cs.d_B;
  s["generators"] = cs.size();
  s["count_bound"] = count_bound(*gs, cfg.n_B, cfg.G).str();
  s["completeness_rank"] = rank.rank;
  s["full_dimension"] = rank.full_dim;
  s["invariants"] = "pass";
  res.files["choiset.manifest"] = export_manifest(cs);
  return res;
}

CommandResult cmd_divergence(const ExperimentConfig& cfg) {
  const Dims dims = bipartite_dims(cfg);
  const DensityOperator rho = parse_state(cfg.param("rho", "bell"), dims, cfg.seed);
  const DensityOperator sigma = parse_state(cfg.param("sigma", "maxmixed"), dims, cfg.seed + 1);
  const ChoiSet cs = experiment_choi_set(cfg, 1);
  const std::string q = cfg.param("quantity", "dmax");
  DivergenceValue v;
  CommandResult res;
  if (q == "dmax") {
    v = comp_dmax(rho, sigma, cs);
  } else if (q == "dh") {
    v = comp_dh(rho, sigma, cs, cfg.param_double("eta", 0.5));
  } else {
    throw ConfigError("divergence: quantity must be dmax or dh");
  }
  res.summary["quantity"] = q == "dmax" ? "dmax_comp" : "dh_comp";
  res.summary["value"] = number_json(v.value);
  res.summary["witness_circuit"] = v.witness ? witness_circuit(cs.generators[*v.witness]) : "";
  if (v.partner) {
    res.summary["partner_circuit"] = witness_circuit(cs.generators[*v.partner]);
    res.summary["witness_weight"] = v.weight;
  }
  res.summary["generator_count"] = cs.size();
  if (q == "dmax") res.summary["exact_dmax"] = number_json(dmax_exact(rho, sigma));
  if (q == "dh") res.summary["eta"] = cfg.param_double("eta", 0.5);
  res.summary["tolerances"] = tolerances_json();
  return res;
}

CommandResult cmd_min_entropy(const ExperimentConfig& cfg) {
  const Dims dims = bipartite_dims(cfg);
  const DensityOperator rho = parse_state(cfg.param("rho", "bell"), dims, cfg.seed);
  const ChoiSet cs = experiment_choi_set(cfg, 1);
  const EntropyReport rep = comp_hmin(rho, cs);
  CommandResult res;
  res.summary["quantity"] = "hmin_comp";
  res.summary["value"] = number_json(rep.computational);
  if (rho.dim() <= kSdpCap) {
    const double info = hmin_sdp(rho, dims[0], dims[1]).hmin();
    res.summary["informational"] = number_json(info);
    res.summary["gap"] = number_json(rep.computational - info);
  }
  res.summary["witness_circuit"] = witness_circuit(cs.generators[rep.witness]);
  res.summary["generator_count"] = cs.size();
  res.summary["tolerances"] = tolerances_json();
  return res;
}

CommandResult cmd_guess(const ExperimentConfig& cfg) {
  const std::size_t d_B = std::size_t{1} << cfg.n_B;
  const auto specs = split(cfg.param("states", "basis:0;plus"), ';');
  if (specs.size() < 2) throw ConfigError("guess: need at least two states");
  std::vector<DensityOperator> states;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    states.push_back(parse_state(specs[i], Dims{d_B}, cfg.seed + i));
  }
  std::vector<double> p;
  if (cfg.params.count("priors")) {
    for (const auto& s : split(cfg.param("priors", ""), ',')) p.push_back(to_real("priors", s));
  } else {
    p.assign(states.size(), 1.0 / static_cast<double>(states.size()));
  }
  std::size_t outcomes = 2;
  while (outcomes < states.size()) outcomes *= 2;
  const auto gs = make_gate_set(cfg);
  EnumerationBudget b;
  b.G = cfg.G;
  b.n = cfg.n_B;
  b.a_max = cfg.a_max;
  b.dedup_tol = tolerances().dedup;
  const FlaggedPovmSet povms = flag_povm_set(*gs, b, d_B, outcomes);
  const GuessResult g = comp_guess(p, states, povms);
  CommandResult res;
  res.summary["quantity"] = "pguess_comp";
  res.summary["value"] = g.pguess;
  res.summary["hmin_comp"] = number_json(g.report.computational);
  if (states.size() == 2) res.summary["helstrom"] = pguess_helstrom(p[0], states[0], p[1], states[1]);
  res.summary["witness_circuit"] = povms.povms[g.povm].label;
  res.summary["relabeling"] = g.relabeling;
  res.summary["generator_count"] = povms.povms.size();
  res.summary["tolerances"] = tolerances_json();
  return res;
}

CommandResult cmd_opnorm(const ExperimentConfig& cfg) {
  const std::size_t d_A = std::size_t{1} << cfg.n_A;
  const DensityOperator x = parse_state(cfg.param("operator", "random"), Dims{d_A}, cfg.seed);
  const auto gs = make_gate_set(cfg);
  EnumerationBudget b;
  b.G = cfg.G;
  b.n = cfg.n_A;
  b.a_max = cfg.a_max;
  b.dedup_tol = tolerances().dedup;
  const PreparableStateSet prep = preparable_states(*gs, b, d_A);
  const EntropyReport rep = comp_hmin_noncond(x, prep);
  CommandResult res;
  res.summary["quantity"] = "opnorm_comp";
  res.summary["value"] = comp_op_norm(x.mat(), prep);
  res.summary["exact"] = lambda_max(x.mat());
  res.summary["hmin_noncond_comp"] = number_json(rep.computational);
  res.summary["hmin_noncond"] = number_json(hmin_noncond_exact(x));
  res.summary["witness_circuit"] = rep.witness_label;
  res.summary["generator_count"] = prep.states.size();
  res.summary["tolerances"] = tolerances_json();
  return res;
}

Json concentrate_json(std::size_t k, double p, std::string& table_text) {
  const Ket psi = schmidt_state(p);
  const SchurBlockTable table = schur_blocks(k);
  const ConcentrationChannel ch = build_concentration_channel(table);
  const OverlapReport ov = concentrate_overlap(psi, ch, table);
  const BoundReport br = hmin_upper_bound(psi, k);
  Json s;
  s["k"] = k;
  s["schmidt"] = p;
  Json blocks = Json::array();
  std::ostringstream tt;
  tt << "lambda   dim_u  dim_v  Pr(lambda)\n";
  for (std::size_t i = 0; i < table.blocks.size(); ++i) {
    const auto& b = table.blocks[i];
    Json bj;
    bj["lam"] = {b.lam.lam1, b.lam.lam2};
    bj["dim_u"] = b.dim_u;
    bj["dim_v"] = b.dim_v;
    bj["pr"] = ov.pr[i];
    blocks.push_back(bj);
    tt << std::left << std::setw(9) << b.lam.str() << std::setw(7) << b.dim_u << std::setw(7)
       << b.dim_v << fmt(ov.pr[i]) << "\n";
  }
  tt << "overlap (one-sided)  " << fmt(ov.overlap) << "\n"
     << "overlap (two-sided)  " << fmt(ov.overlap_lambda) << "\n"
     << "formula              " << fmt(ov.formula) << "\n"
     << "overlap (TP-scaled)  " << fmt(ov.overlap_normalized) << "\n";
  table_text = tt.str();
  s["blocks"] = blocks;
  s["overlap"] = ov.overlap;
  s["overlap_two_sided"] = ov.overlap_lambda;
  s["formula"] = ov.formula;
  s["overlap_tp_scaled"] = ov.overlap_normalized;
  s["formula_tp_scaled"] = ov.formula_normalized;
  s["blockform_residual"] = ov.blockform_residual;
  s["tp_residual"] = ch.tp_residual;
  s["tp_residual_scaled"] = ch.tp_residual_normalized;
  s["two_sided_tp_residual"] = ch.lambda_tp_residual;
  s["bound"] = br.bound;
  s["hmin_A"] = number_json(br.hmin_A);
  if (br.achieved) s["achieved"] = number_json(*br.achieved);
  if (br.achieved_normalized) s["achieved_tp_scaled"] = number_json(*br.achieved_normalized);
  if (br.within_bound) s["within_bound"] = *br.within_bound;
  return s;
}

CommandResult cmd_concentrate(const ExperimentConfig& cfg, bool demo) {
  CommandResult res;
  std::string text;
  res.summary = concentrate_json(cfg.k, cfg.param_double("schmidt", 0.9), text);
  if (demo) res.text = text;
  return res;
}

CommandResult cmd_ensemble_stats(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.total_qubits();
  std::size_t d_A = 0;
  switch (cfg.kind) {
    case EnsembleKind::ghse:
    case EnsembleKind::ginibre_reduced: d_A = std::size_t{1} << n; break;
    default:
      if (cfg.n_A >= n) throw ConfigError("ensemble-stats: pure kinds need n_A < n");
      d_A = std::size_t{1} << cfg.n_A;
  }
  EnsembleSpec spec{cfg.kind, n, cfg.m, n, 0};
  if (cfg.kind == EnsembleKind::haar_pure || cfg.kind == EnsembleKind::haar_subsystem) {
    spec.n_A = cfg.n_A;
    spec.n_B = n - cfg.n_A;
  }
  spec.validate();
  const SeededRng base(cfg.seed, kEnsembleStream);
  Stats ratio, ks;
  std::vector<std::size_t> hist(16, 0);
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    SeededRng rng = base.substream(i);
    CMatrix r;
    switch (cfg.kind) {
      case EnsembleKind::ghse: r = ghse_sample(n, cfg.m, rng).mat(); break;
      case EnsembleKind::ginibre_reduced:
        r = ginibre_reduced(d_A, std::size_t{1} << cfg.m, rng).mat();
        break;
      case EnsembleKind::haar_pure:
      case EnsembleKind::haar_subsystem: {
        const Ket psi = cfg.kind == EnsembleKind::haar_pure ? haar_pure(std::size_t{1} << n, rng)
                                                           : haar_subsystem(n, cfg.m, rng);
        r = partial_trace(CMatrix(psi.vec() * psi.vec().adjoint()),
                          Dims{d_A, (std::size_t{1} << n) / d_A}, Indices{0});
        break;
      }
    }
    const DensityOperator rho = DensityOperator::trusted(r, Dims{d_A});
    ratio.add(tr_sqrt_ratio(rho, d_A));
    const EsdStats st = esd_stats(rho, d_A);
    ks.add(st.ks_to_mp);
    for (std::size_t b = 0; b < hist.size(); ++b) hist[b] += st.histogram[b];
  }
  CommandResult res;
  Json& s = res.summary;
  s["kind"] = to_string(cfg.kind);
  s["params"] = {{"n", n}, {"m", cfg.m}, {"d_A", d_A}, {"samples", cfg.samples}, {"seed", cfg.seed}};
  s["tr_sqrt_ratio_mean"] = ratio.mean();
  s["ks_mp"] = ks.mean();
  s["eigen_histogram"] = hist;
  return res;
}

CommandResult cmd_sdp_check(const ExperimentConfig& cfg) {
  const Dims dims = bipartite_dims(cfg);
  const DensityOperator rho = parse_state(cfg.param("rho", "random"), dims, cfg.seed);
  const SdpSolution sol = hmin_sdp(rho, dims[0], dims[1]);
  CommandResult res;
  res.summary["primal"] = sol.primal_value;
  res.summary["dual"] = sol.dual_value;
  res.summary["gap"] = sol.gap;
  res.summary["iterations"] = sol.iterations;
  res.summary["hmin"] = number_json(sol.hmin());
  std::ostringstream a, b;
  write_matrix(a, sol.sigma_B);
  write_matrix(b, sol.F);
  res.files["sigma_B.txt"] = a.str();
  res.files["F.txt"] = b.str();
  return res;
}

}  // namespace

CommandResult run_command(const std::string& name, const ExperimentConfig& cfg) {
  apply_tolerances(cfg);
  if (name == "separation-pure") return from_run(run_separation_pure(cfg));
  if (name == "separation-mixed") return from_run(run_separation_mixed(cfg));
  if (name == "gap-report") {
    CommandResult res;
    res.files["gap_report.csv"] = run_gap_report(cfg);
    res.summary["command"] = "gap-report";
    res.summary["k_list"] = cfg.k_list;
    res.summary["samples"] = cfg.samples;
    res.summary["seed"] = cfg.seed;
    return res;
  }
  if (name == "enumerate-channels") return cmd_enumerate(cfg);
  if (name == "divergence") return cmd_divergence(cfg);
  if (name == "min-entropy") return cmd_min_entropy(cfg);
  if (name == "guess") return cmd_guess(cfg);
  if (name == "opnorm") return cmd_opnorm(cfg);
  if (name == "schur-demo") return cmd_concentrate(cfg, true);
  if (name == "concentrate") return cmd_concentrate(cfg, false);
  if (name == "ensemble-stats") return cmd_ensemble_stats(cfg);
  if (name == "sdp-check") return cmd_sdp_check(cfg);
  throw ConfigError("unknown command '" + name + "'");
}

void write_outputs(const std::string& name, const CommandResult& res, const std::string& out_dir,
                   std::string& stdout_text) {
  std::ostringstream os;
  os << res.text << res.summary.dump(2) << "\n";
  stdout_text = os.str();
  if (out_dir.empty()) return;
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + out_dir);
  auto write = [&](const std::string& file, const std::string& content) {
    std::ofstream f(fs::path(out_dir) / file, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + file + " in " + out_dir);
    f << content;
  };
  write(name + ".json", res.summary.dump(2) + "\n");
  if (!res.records.empty()) {
    std::ostringstream rs;
    for (const auto& r : res.records) rs << r.dump() << "\n";
    write("records.jsonl", rs.str());
  }
  for (const auto& [file, content] : res.files) write(file, content);
}

}  // namespace ccq
