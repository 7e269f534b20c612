#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqctx/linalg.hpp"
#include "seqctx/scenario.hpp"

// Labeled POVMs, the two device configurations built from a cycle scenario,
// and the similarity (proportional-effect) checker.

namespace seqctx {

struct LabeledEffect {
  std::string label;
  HermitianOperator op;
};

// A finite list of labeled effects.  "complete" POVMs must sum to the
// identity; "partial" lists (e.g. a device restricted to a subset of its
// outcomes) skip the sum check.  Every effect must be PSD and <= identity
// within kSpectrumTol.
class LabeledPovm {
 public:
  static LabeledPovm complete(std::vector<LabeledEffect> effects, double tol = kSpectrumTol);
  static LabeledPovm partial(std::vector<LabeledEffect> effects, double tol = kSpectrumTol);

  int dim() const { return effects_.front().op.dim(); }
  bool is_complete() const { return complete_; }
  int size() const { return static_cast<int>(effects_.size()); }
  const LabeledEffect& effect(int k) const { return effects_[static_cast<size_t>(k)]; }
  const std::vector<LabeledEffect>& effects() const { return effects_; }
  // Effect by label; throws std::invalid_argument if absent.
  const HermitianOperator& find(const std::string& label) const;
  bool has_label(const std::string& label) const;
  // Partial POVM holding only the named outcomes (in the order given).
  LabeledPovm restricted(const std::vector<std::string>& labels) const;

 private:
  LabeledPovm(std::vector<LabeledEffect> effects, bool complete)
      : effects_(std::move(effects)), complete_(complete) {}
  std::vector<LabeledEffect> effects_;
  bool complete_;
};

// Single-device configuration: one POVM with effects
//   E_i = (p_i + p_{i+1}) |v_i><v_i|   (labels "E0".."E{n-1}")
// plus the completion effect K = I - sum E_i (label "K").  The completion is
// defined as the complement so the device is a genuine POVM; see
// settingwise_completion_effect for the alternative expression and the validate
// command for the diagnostic comparing the two.
// Throws input_error if sum E_i has an eigenvalue above 1 + kSpectrumTol
// (scenario and probabilities incompatible with a completable device).
LabeledPovm build_config1(const CycleScenario& sc);

// Multi-setting configuration: setting i measures
//   {Pi_i, Pi_{i+1}, K_i = I - Pi_i - Pi_{i+1}}
// with labels "Pi{i}", "Pi{i+1}", "K{i}".
LabeledPovm build_config2(const CycleScenario& sc, int setting);

// One row of the coarse-graining that realizes configuration 1 as a mixture
// of configuration-2 settings: choosing setting `setting` (with the sampling
// weight shown) and observing outcome `c2_label` is recorded under the
// configuration-1 label the entry is filed under.
struct MixtureEntry {
  int setting;
  std::string c2_label;
  double weight;  // sampling probability of the setting
};

struct MixtureDecomposition {
  std::vector<std::string> labels;                  // "E0".."E{n-1}", "K"
  std::vector<std::vector<MixtureEntry>> entries;   // parallel to labels
  // Operator reconstructed from a label's entries: sum weight * effect.
  HermitianOperator reconstruct(const CycleScenario& sc, int label_index) const;
};

// E_i receives weight p_i from setting i (outcome Pi_i) and weight p_{i-1}
// from setting i-1 (outcome Pi_i again); K collects every completion outcome
// K_i with weight p_i, so the K-row weights sum to 1.
MixtureDecomposition config1_as_mixture(const CycleScenario& sc);

// The completion effect written as 2 * sum_i p_i K_i instead of the
// complement.  For the uniform five-cycle the two differ; the validate
// command reports the operator distance rather than silently reconciling.
HermitianOperator settingwise_completion_effect(const CycleScenario& sc);

struct SimilarityResult {
  bool matched = false;
  // Single factor with b_effect = scale * a_effect for every paired outcome.
  // Absent when the match is vacuous (a has no non-null effects).
  std::optional<double> scale;
  // (a label, b label) pairs, in a's effect order.
  std::vector<std::pair<std::string, std::string>> outcome_pairing;
};

// Searches for an injective pairing of a's non-null effects into b's effects
// and a single scale s >= 0 with b_k = s * a_k entrywise within tol.  Effects
// with operator norm below kStructureTol are treated as null outcomes: they
// are dropped from a, and in b they only participate in the scale-zero case
// (every a effect mapped to a distinct null b outcome).  Non-match is a
// result, not an error.  Dimension mismatch throws std::invalid_argument.
SimilarityResult check_similarity(const LabeledPovm& a, const LabeledPovm& b,
                                  double tol = kSpectrumTol);

}  // namespace seqctx
