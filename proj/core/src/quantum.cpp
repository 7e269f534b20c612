#include "seqctx/quantum.hpp"

#include <cmath>
#include <sstream>

namespace seqctx {

DensityState DensityState::from_operator(const HermitianOperator& rho, double tol) {
  if (!is_psd(rho, tol)) throw input_error("density operator must be positive semidefinite");
  if (std::abs(rho.trace() - 1.0) > tol) {
    std::ostringstream os;
    os << "density operator must have unit trace, got " << rho.trace();
    throw input_error(os.str());
  }
  return DensityState(rho);
}

DensityState DensityState::maximally_mixed(int dim) {
  return DensityState(HermitianOperator::identity(dim).scaled(1.0 / dim));
}

DensityState DensityState::pure(const Ket& v) { return DensityState(projector(v)); }

double outcome_probability(const DensityState& rho, const HermitianOperator& effect) {
  const double p = real_trace_product(effect, rho.matrix());
  if (p < -kSpectrumTol || p > 1.0 + kSpectrumTol) {
    std::ostringstream os;
    os << "outcome probability " << p << " outside [0, 1]; effect or state invalid";
    throw std::invalid_argument(os.str());
  }
  return std::clamp(p, 0.0, 1.0);
}

DensityState luders_update(const DensityState& rho, const HermitianOperator& effect) {
  const double p = outcome_probability(rho, effect);
  if (p < kStructureTol) {
    throw std::invalid_argument("Lueders update on a zero-probability outcome");
  }
  // A scaled rank-1 effect collapses onto its ray no matter the input state:
  // sqrt(E) rho sqrt(E) / p is exactly |v><v|.  Taking that form directly
  // keeps the collapse state-independent to machine precision instead of
  // amplifying eigenvector round-off by 1/p.
  const int dim = effect.dim();
  const EigenSystem es = eigensystem(effect);
  if (dim >= 2 && es.values.back() > kStructureTol &&
      std::abs(es.values[static_cast<size_t>(dim) - 2]) <= kSpectrumTol) {
    std::vector<Complex> amp;
    amp.reserve(static_cast<size_t>(dim));
    for (int r = 0; r < dim; ++r) amp.push_back(es.vectors.at(r, dim - 1));
    return DensityState::pure(Ket(std::move(amp)).normalized());
  }
  const HermitianOperator root = sqrt_psd(effect);
  const HermitianOperator post = sandwich(root, rho.matrix()).scaled(1.0 / p);
  return DensityState::from_operator(post, 1e-9);
}

double sequential_conditional(const CycleScenario& sc, int i, int j) {
  if (i < 0 || i >= sc.n() || j < 0 || j >= sc.n()) {
    throw std::invalid_argument("sequential_conditional: index out of range");
  }
  const double w = sc.prob(i) + sc.prob(sc.next(i));
  return w * std::norm(inner_product(sc.ket(i), sc.ket(j)));
}

double contextuality_value(const CycleScenario& sc) {
  double total = 0.0;
  for (int i = 0; i < sc.n(); ++i)
    for (int j = 0; j < sc.n(); ++j) total += sequential_conditional(sc, i, j);
  return total;
}

double closed_form_value() { return 2.0 * (4.0 - std::sqrt(5.0)); }

ConditionalTable conditional_table(const CycleScenario& sc, const DensityState& initial) {
  const LabeledPovm device = build_config1(sc);
  ConditionalTable t;
  for (const LabeledEffect& e : device.effects()) t.labels.push_back(e.label);

  for (int j = 0; j < device.size(); ++j) {
    const double pj = outcome_probability(initial, device.effect(j).op);
    t.first_probs.push_back(pj);
    std::vector<double> row(static_cast<size_t>(device.size()), -1.0);
    if (pj >= kStructureTol) {
      const DensityState post = luders_update(initial, device.effect(j).op);
      for (int i = 0; i < device.size(); ++i) {
        row[static_cast<size_t>(i)] = outcome_probability(post, device.effect(i).op);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace seqctx
