#pragma once

#include <vector>

#include "seqctx/linalg.hpp"

// Odd-cycle measurement scenarios on a qutrit: n rank-1 projectors whose
// neighbors (indices mod n) are orthogonal, plus a probability vector used to
// mix the n projective settings into a single device.

namespace seqctx {

class CycleScenario {
 public:
  // kets must be normalized, dimension 3, with adjacent pairs orthogonal
  // within kSpectrumTol; probs must be nonnegative and sum to 1 within
  // kStructureTol.  Violations throw input_error.
  static CycleScenario make(std::vector<Ket> kets, std::vector<double> probs);
  // Skips the invariant checks; only for diagnostics (e.g. the validate
  // command reporting residuals of a deliberately broken file).
  static CycleScenario make_unchecked(std::vector<Ket> kets, std::vector<double> probs);

  int n() const { return static_cast<int>(kets_.size()); }
  const Ket& ket(int i) const { return kets_[static_cast<size_t>(i)]; }
  const std::vector<double>& probs() const { return probs_; }
  double prob(int i) const { return probs_[static_cast<size_t>(i)]; }
  int next(int i) const { return (i + 1) % n(); }

  // Largest |<v_i|v_{i+1}>| over the cycle.
  double max_adjacent_overlap() const;
  // Entrywise squared overlaps |<v_i|v_j>|^2.
  std::vector<std::vector<double>> gram_abs2() const;

 private:
  CycleScenario(std::vector<Ket> kets, std::vector<double> probs)
      : kets_(std::move(kets)), probs_(std::move(probs)) {}
  std::vector<Ket> kets_;
  std::vector<double> probs_;
};

// The five pentagram vectors, unnormalized, exactly as conventionally
// displayed: <v_0| = (1, 0, sqrt(cos(pi/5))) and rotated copies.  Squared
// norm of each is 1 + cos(pi/5).
std::vector<Ket> kcbs_vectors();

// Normalized, phase-canonical KCBS scenario.  Default: uniform probabilities.
CycleScenario build_kcbs_scenario();
CycleScenario build_kcbs_scenario(const std::vector<double>& probs);

// Generalization to any odd n >= 5: unit kets with third component
// sqrt(cos(pi/n) / (1 + cos(pi/n))) and planar angles i*pi*(n-1)/n, uniform
// probabilities.  Even or small n throws input_error.
CycleScenario build_ncycle_scenario(int n);

// Qubit example used by the similarity checker: the Z and X measurements and
// their convex interpolation {s|0><0|, s|1><1|, (1-s)|+><+|, (1-s)|-><-|}.
struct QubitZxExample {
  double s;
  std::vector<HermitianOperator> z_effects;   // |0><0|, |1><1|
  std::vector<HermitianOperator> x_effects;   // |+><+|, |-><-|
  std::vector<HermitianOperator> zx_effects;  // scaled copies, Z pair then X pair
};

// s must lie in [0, 1]; throws input_error otherwise.
QubitZxExample zx_example(double s);

}  // namespace seqctx
