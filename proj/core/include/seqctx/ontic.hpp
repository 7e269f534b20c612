#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqctx/linalg.hpp"
#include "seqctx/rng.hpp"
#include "seqctx/scenario.hpp"

// Finite ontic (hidden-variable) response models for the five-cycle device,
// the constraint battery they must satisfy, the inequality chain that yields
// the 3.20 noncontextual ceiling, and a constrained maximizer over models.

namespace seqctx {

inline constexpr int kCycleSize = 5;
inline constexpr double kNoncontextualBound = 3.20;

// K ontic states with weights mu (a probability simplex).  xi[k][i] is the
// response of state k to the projective outcome associated with ket i (the
// same response function serves every setting containing that outcome);
// xi_completion[k][i] is the response to the completion outcome of setting i.
// Per state and setting, xi[k][i] + xi[k][i+1] + xi_completion[k][i] = 1.
class OnticModel {
 public:
  using Row = std::array<double, kCycleSize>;

  // Validates the simplex, box bounds, and per-setting normalization within
  // 1e-10; violations throw input_error.
  static OnticModel make(std::vector<double> mu, std::vector<Row> xi,
                         std::vector<Row> xi_completion);
  // Derives xi_completion[k][i] = 1 - xi[k][i] - xi[k][i+1]; throws if any
  // derived entry is negative beyond 1e-10 (clamps smaller drift to zero).
  static OnticModel from_responses(std::vector<double> mu, std::vector<Row> xi);

  int states() const { return static_cast<int>(mu_.size()); }
  const std::vector<double>& mu() const { return mu_; }
  const std::vector<Row>& xi() const { return xi_; }
  const std::vector<Row>& xi_completion() const { return xi_completion_; }

 private:
  OnticModel(std::vector<double> mu, std::vector<Row> xi, std::vector<Row> xiK)
      : mu_(std::move(mu)), xi_(std::move(xi)), xi_completion_(std::move(xiK)) {}
  std::vector<double> mu_;
  std::vector<Row> xi_;
  std::vector<Row> xi_completion_;
};

// Optional constraints layered on top of the core set (box bounds,
// normalization, completeness, zero adjacent overlap):
//   exhaustive   - xi[k][i] + xi[k][i+1] = 1 pointwise (completion silent)
//   overlap_cap  - <xi_i xi_{i+2}> <= 1/2 at the measure level
//   equal_overlap- all next-nearest overlaps equal (symmetric-model study)
struct ConstraintMode {
  bool exhaustive = false;
  bool overlap_cap = false;
  bool equal_overlap = false;
};

struct ConstraintReport {
  bool completeness_ok = false;        // sum_i (p_i+p_{i+1}) xi_i <= 1 per state
  double completeness_residual = 0.0;  // worst positive excess
  std::array<double, kCycleSize> adjacent_overlap{};  // must vanish
  bool exhaustiveness_ok = false;      // informational unless mode.exhaustive
  double exhaustiveness_residual = 0.0;
  std::array<double, kCycleSize> nn_overlaps{};       // <xi_i xi_{i+2}>
  double equal_overlap_residual = 0.0;
  double worst_violation = 0.0;        // over the constraints the mode checks
  bool passed = false;                 // worst_violation <= tol
  double tol = kFeasibilityTol;
};

ConstraintReport check_constraints(const OnticModel& m, const CycleScenario& sc,
                                   const ConstraintMode& mode,
                                   double tol = kFeasibilityTol);

// Pairwise response overlaps O[i][j] = sum_k mu_k xi[k][i] xi[k][j].
std::array<std::array<double, kCycleSize>, kCycleSize> pair_overlap_matrix(const OnticModel& m);

// sum_{i,j} weights[i] * overlaps[i][j]; the single code path used for both
// the ontic value (weights 2 p_i) and the quantum-analog substitution
// (overlaps replaced by squared ket overlaps).
double sequential_sum(const std::array<std::array<double, kCycleSize>, kCycleSize>& overlaps,
                      const std::array<double, kCycleSize>& weights);

// Literal ontic transcription of the sequential double sum:
//   C = sum_{i,j} 2 p_i <xi_i xi_j>.
// No feasibility check is performed; callers pair this with
// check_constraints when feasibility matters.
double evaluate_C(const OnticModel& m, const CycleScenario& sc);

// Sensitivity-analysis variant: each (i, j) term divided by the ontic
// first-outcome marginal 2 p_j <xi_j>, with zero-marginal columns skipped.
// Not part of the certified value; reported only when explicitly requested.
double evaluate_C_normalized(const OnticModel& m, const CycleScenario& sc);

// The five-line inequality chain from the exact value to the 3.20 ceiling:
//   L1 = exact C
//   L2 = (2/5) sum_i <xi_i> + (4/5) sum_i <xi_i xi_{i+2}>
//   L3 = 2 + (4/5) sum_i <xi_i xi_{i+2}>
//   L4(anchor i) = 2 + (4/5) (1 + <xi_{i+2} xi_{i+4}>)
//   L5 = 3.20
// Each consecutive comparison carries the premise that justifies it; a
// comparison whose premise the model does not satisfy is reported as skipped
// rather than evaluated.
struct BoundChainStep {
  std::string from;
  std::string to;
  std::string premise;         // human-readable premise description
  bool premise_ok = false;
  std::optional<bool> ordered; // lhs <= rhs + tol; set only when premise_ok
  double lhs = 0.0;
  double rhs = 0.0;
};

struct BoundChainReport {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
  std::array<double, kCycleSize> l4{};  // by anchor
  double l5 = kNoncontextualBound;
  std::vector<BoundChainStep> steps;
  bool all_evaluated_ordered = false;   // every premise-satisfied step ordered
};

// Requires the uniform five-cycle (non-uniform probabilities throw
// input_error; the chain's second line substitutes p_i = 1/5).
BoundChainReport verify_bound_chain(const OnticModel& m, const CycleScenario& sc,
                                    double tol = kFeasibilityTol);

// Multistart projected coordinate ascent over (mu, xi).  Alternates an exact
// linear-program step in mu (zero adjacent overlap handled by support
// restriction, overlap caps by slack variables, solved by basic-solution
// enumeration) with per-coordinate exact line searches in xi under box,
// normalization, and completeness bounds, plus quadratic penalties that
// drive the measure-level constraints to feasibility.  Candidate results are
// re-verified with check_constraints at `tol` and re-evaluated with
// evaluate_C; `feasible` is false when no restart lands on a feasible point.
struct OptimizerConfig {
  int ontic_states = 4;
  int restarts = 64;
  ConstraintMode mode;
  int outer_iters = 30;
  int sweeps_per_outer = 4;
  double tol = kFeasibilityTol;
  std::uint64_t seed = 1;
  int workers = 0;               // 0 = SEQCTX_WORKERS / hardware
  std::vector<double> start_grid;  // nonempty: draw initial xi values from it
  double penalty_base = 8.0;
  double penalty_growth = 1.4;
};

struct OptResult {
  OnticModel best_model;   // best feasible model, or best candidate if none
  double best_value = 0.0; // evaluate_C(best_model)
  bool feasible = false;
  int restarts_used = 0;
};

OptResult maximize_C(const CycleScenario& sc, const OptimizerConfig& cfg);

// Random model satisfying the core constraints exactly (per-state supports
// are independent sets of the cycle, so adjacent overlaps vanish identically)
// plus the overlap cap when requested.  Used by property tests and the
// bound-chain sweep.
OnticModel random_feasible_model(SplitMix64& rng, int states, bool enforce_cap);

}  // namespace seqctx
