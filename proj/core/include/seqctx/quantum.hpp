#pragma once

#include <string>
#include <vector>

#include "seqctx/linalg.hpp"
#include "seqctx/measurement.hpp"
#include "seqctx/scenario.hpp"

// Exact quantum predictions for the two-step sequential experiment: outcome
// probabilities, the Lueders state update, and the conditional-probability
// functional summed over ordered outcome pairs.

namespace seqctx {

// Density operator: PSD with unit trace (both within kSpectrumTol).
class DensityState {
 public:
  static DensityState from_operator(const HermitianOperator& rho, double tol = kSpectrumTol);
  static DensityState maximally_mixed(int dim);
  static DensityState pure(const Ket& v);

  int dim() const { return rho_.dim(); }
  const HermitianOperator& matrix() const { return rho_; }

 private:
  explicit DensityState(HermitianOperator rho) : rho_(std::move(rho)) {}
  HermitianOperator rho_;
};

// Tr(effect * rho), clamped into [0, 1] after a tolerance check.
double outcome_probability(const DensityState& rho, const HermitianOperator& effect);

// Lueders update rho -> sqrt(E) rho sqrt(E) / Tr(E rho).  For a scaled rank-1
// effect this reduces to the projector collapse |v><v|.  Throws
// std::invalid_argument when the outcome probability is below kStructureTol.
DensityState luders_update(const DensityState& rho, const HermitianOperator& effect);

// p(E_i observed second | E_j observed first)
//   = Tr(E_i |v_j><v_j|) = (p_i + p_{i+1}) |<v_i|v_j>|^2.
// State-independent because the first collapse lands on the ray |v_j>.
double sequential_conditional(const CycleScenario& sc, int i, int j);

// Sum over all ordered index pairs (i, j) of sequential_conditional.
// Uniform five-cycle value: 2 * (4 - sqrt(5)).
double contextuality_value(const CycleScenario& sc);

// 2 * (4 - sqrt(5)), the closed form of the uniform five-cycle value.
double closed_form_value();

// Full conditional table over the configuration-1 labels E0..E{n-1}, K:
// row j, column i holds p(second outcome = label i | first outcome = label j).
// Rows for first outcomes with probability < kStructureTol (given `initial`)
// are filled with -1 markers.  The E rows are state-independent; the K row
// depends on `initial` because the completion effect is not rank-1.
struct ConditionalTable {
  std::vector<std::string> labels;
  std::vector<double> first_probs;          // from `initial`
  std::vector<std::vector<double>> rows;    // rows[j][i]
};

ConditionalTable conditional_table(const CycleScenario& sc, const DensityState& initial);

}  // namespace seqctx
