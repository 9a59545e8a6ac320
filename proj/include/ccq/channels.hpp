#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ccq/circuits.hpp"
#include "ccq/densemath.hpp"
#include "ccq/rng.hpp"

namespace ccq {

// Channel T(rho) = tr_K[U (rho_B (x) |0><0|_E) U^dag] read off a circuit.
struct ChannelSpec {
  Circuit circuit;
  std::shared_ptr<const GateSet> gate_set;
  Indices in_wires;   // register B
  Indices out_wires;  // register A'
  Indices env_wires;  // register K, traced
  Indices anc_wires;  // register E, prepared in |0>

  std::size_t d_in() const { return std::size_t{1} << in_wires.size(); }
  std::size_t d_out() const { return std::size_t{1} << out_wires.size(); }
  std::size_t d_env() const { return std::size_t{1} << env_wires.size(); }
};

void validate(const ChannelSpec& spec);

// Stinespring isometry V : B -> A' (x) K, rows ordered (a', k).
CMatrix stinespring(const ChannelSpec& spec);
std::vector<CMatrix> kraus_operators(const ChannelSpec& spec);

// Schrodinger action on an arbitrary (not necessarily Hermitian) operator.
CMatrix channel_apply(const ChannelSpec& spec, const CMatrix& x);
DensityOperator channel_apply(const ChannelSpec& spec, const DensityOperator& rho);
CMatrix dual_apply(const ChannelSpec& spec, const CMatrix& x);

// Choi operator J = Y Y^dag of a dual map on A (x) B, stored through the
// factor Y so that expectations never materialise d_A d_B square matrices.
class ChoiOperator {
 public:
  ChoiOperator(CMatrix factor, std::size_t d_A, std::size_t d_B, std::size_t gate_count,
               std::string label, std::shared_ptr<const ChannelSpec> spec = nullptr);
  // Factorises an explicit PSD matrix.
  static ChoiOperator from_matrix(const CMatrix& j, std::size_t d_A, std::size_t d_B,
                                  std::size_t gate_count, std::string label);

  const CMatrix& factor() const { return factor_; }
  CMatrix mat() const { return factor_ * factor_.adjoint(); }
  std::size_t d_A() const { return d_A_; }
  std::size_t d_B() const { return d_B_; }
  std::size_t gate_count() const { return gate_count_; }
  const std::string& label() const { return label_; }
  const std::shared_ptr<const ChannelSpec>& spec() const { return spec_; }

  double expect(const CMatrix& rho) const;             // Tr[rho J]
  double expect_pure(const CVector& psi) const;        // <psi|J|psi>
  double expect_id_tensor(const CMatrix& sigma_B) const;  // Tr[(1_A (x) sigma_B) J]
  CMatrix slice() const;                               // tr_A J
  double lambda_max() const;

 private:
  CMatrix factor_;
  std::size_t d_A_, d_B_, gate_count_;
  std::string label_;
  std::shared_ptr<const ChannelSpec> spec_;
};

// PSD, tr_A J = 1_B, 0 <= J/d_A <= 1; throws InvariantError with details.
void check_choi_invariants(const ChoiOperator& j);

ChoiOperator choi_of(const ChannelSpec& spec, std::size_t d_A, std::size_t gate_count = 0);
// J(T) = sum_xy |x><y|_B (x) T(|x><y|) on B (x) A' (the Schrodinger-side convention).
CMatrix choi_schrodinger(const ChannelSpec& spec);
CMatrix normalized_effect(const ChoiOperator& j);

double choi_effect_probability(const ChoiOperator& j, const DensityOperator& rho);
double simulate_choi_effect_test(const ChoiOperator& j, const DensityOperator& rho,
                                 std::size_t shots, SeededRng& rng);

struct ChoiSet {
  std::vector<ChoiOperator> generators;
  EnumerationBudget budget;
  std::size_t d_A = 0;
  std::size_t d_B = 0;

  std::size_t size() const { return generators.size(); }
};

struct ChoiSetOptions {
  bool all_output_subsets = false;
  EnumerationCaps caps{};
};

// Wire roles: inputs are the first n_B wires, then a ancillas; outputs are
// the first n_A wires (or every n_A-subset when requested); the rest is traced.
ChoiSet generate_choi_set(std::shared_ptr<const GateSet> gs, const EnumerationBudget& budget,
                          std::size_t d_A, std::size_t d_B, const ChoiSetOptions& opts = {});

// Appends generators not within dedup_tol (Frobenius) of an existing one.
void add_deduplicated(ChoiSet& cs, std::vector<ChoiOperator> candidates, double tol);
double choi_distance(const ChoiOperator& a, const ChoiOperator& b);

ChoiSet pauli_mp_family(std::size_t n);
ChoiOperator pauli_mp_generator(const std::string& states, const std::string& pauli, int sign);

struct CompletenessRank {
  std::size_t rank = 0;
  std::size_t full_dim = 0;
  bool full = false;
};
CompletenessRank informational_completeness_rank(const ChoiSet& cs);

// Generators J1 (x) J2 reordered onto (A1 A2) (B1 B2).
ChoiSet tensor_choi_set(const ChoiSet& a, const ChoiSet& b);

// Manifest: one generator per line, matrices regenerable from the gate set.
std::string export_manifest(const ChoiSet& cs);
ChoiSet import_manifest(const std::string& text, std::shared_ptr<const GateSet> gs);
std::string content_hash(const CMatrix& m);

struct PreparableStateSet {
  std::vector<DensityOperator> states;
  std::vector<std::string> labels;
  std::vector<std::size_t> gate_counts;
};

PreparableStateSet preparable_states(const GateSet& gs, const EnumerationBudget& budget,
                                     std::size_t d_A, const EnumerationCaps& caps = {});

struct Povm {
  std::vector<CMatrix> effects;
  std::string label;
  std::size_t gate_count = 0;
};

struct FlaggedPovmSet {
  std::vector<Povm> povms;
  std::size_t outcomes = 0;
  std::size_t d_B = 0;
};

// Outcome wires are the first log2(outcomes) wires of each circuit.
FlaggedPovmSet flag_povm_set(const GateSet& gs, const EnumerationBudget& budget,
                             std::size_t d_B, std::size_t outcomes,
                             const EnumerationCaps& caps = {});

// J = sum_x |x><x| (x) E^x for every POVM and every outcome relabeling
// f : outcomes -> labels, with E^x = sum_{f(i)=x} M_i.
ChoiSet flagged_choi_set(const FlaggedPovmSet& povms, std::size_t labels);

}  // namespace ccq
