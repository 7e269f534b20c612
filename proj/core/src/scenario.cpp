#include "seqctx/scenario.hpp"

#include <cmath>
#include <sstream>

namespace seqctx {

namespace {

void validate_probs(const std::vector<double>& probs, size_t expected_size) {
  if (probs.size() != expected_size) {
    throw input_error("probability vector must have " + std::to_string(expected_size) +
                      " entries, got " + std::to_string(probs.size()));
  }
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw input_error("probabilities must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kStructureTol) {
    std::ostringstream os;
    os << "probabilities must sum to 1, got " << sum;
    throw input_error(os.str());
  }
}

}  // namespace

CycleScenario CycleScenario::make(std::vector<Ket> kets, std::vector<double> probs) {
  const int n = static_cast<int>(kets.size());
  if (n < 3) throw input_error("a cycle scenario needs at least 3 kets");
  for (const Ket& k : kets) {
    if (k.dim() != 3) throw input_error("cycle scenario kets must have dimension 3");
    if (!k.is_normalized(kSpectrumTol)) throw input_error("cycle scenario kets must be normalized");
  }
  validate_probs(probs, kets.size());

  CycleScenario sc(std::move(kets), std::move(probs));
  const double adj = sc.max_adjacent_overlap();
  if (adj > kSpectrumTol) {
    std::ostringstream os;
    os << "adjacent kets must be orthogonal; worst |<v_i|v_{i+1}>| = " << adj;
    throw input_error(os.str());
  }
  return sc;
}

CycleScenario CycleScenario::make_unchecked(std::vector<Ket> kets, std::vector<double> probs) {
  if (kets.empty() || kets.size() != probs.size()) {
    throw input_error("unchecked scenario still needs one probability per ket");
  }
  return CycleScenario(std::move(kets), std::move(probs));
}

double CycleScenario::max_adjacent_overlap() const {
  double worst = 0.0;
  for (int i = 0; i < n(); ++i) {
    worst = std::max(worst, std::abs(inner_product(ket(i), ket(next(i)))));
  }
  return worst;
}

std::vector<std::vector<double>> CycleScenario::gram_abs2() const {
  std::vector<std::vector<double>> g(static_cast<size_t>(n()),
                                     std::vector<double>(static_cast<size_t>(n()), 0.0));
  for (int i = 0; i < n(); ++i)
    for (int j = 0; j < n(); ++j)
      g[static_cast<size_t>(i)][static_cast<size_t>(j)] = std::norm(inner_product(ket(i), ket(j)));
  return g;
}

std::vector<Ket> kcbs_vectors() {
  const double root = std::sqrt(std::cos(M_PI / 5.0));
  auto real_ket = [](double x, double y, double z) {
    return Ket({Complex{x, 0.0}, Complex{y, 0.0}, Complex{z, 0.0}});
  };
  return {
      real_ket(1.0, 0.0, root),
      real_ket(std::cos(4.0 * M_PI / 5.0), -std::sin(4.0 * M_PI / 5.0), root),
      real_ket(std::cos(2.0 * M_PI / 5.0), std::sin(2.0 * M_PI / 5.0), root),
      real_ket(std::cos(2.0 * M_PI / 5.0), -std::sin(2.0 * M_PI / 5.0), root),
      real_ket(std::cos(4.0 * M_PI / 5.0), std::sin(4.0 * M_PI / 5.0), root),
  };
}

CycleScenario build_kcbs_scenario() {
  return build_kcbs_scenario(std::vector<double>(5, 0.2));
}

CycleScenario build_kcbs_scenario(const std::vector<double>& probs) {
  validate_probs(probs, 5);
  std::vector<Ket> kets;
  kets.reserve(5);
  for (const Ket& raw : kcbs_vectors()) {
    kets.push_back(raw.normalized().with_canonical_phase());
  }
  return CycleScenario::make(std::move(kets), probs);
}

CycleScenario build_ncycle_scenario(int n) {
  if (n < 5 || n % 2 == 0) {
    throw input_error("cycle size must be an odd integer >= 5, got " + std::to_string(n));
  }
  const double c2 = std::cos(M_PI / n) / (1.0 + std::cos(M_PI / n));
  const double c = std::sqrt(c2);
  const double s = std::sqrt(1.0 - c2);
  std::vector<Ket> kets;
  kets.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double angle = i * M_PI * (n - 1.0) / n;
    Ket k({Complex{s * std::cos(angle), 0.0}, Complex{s * std::sin(angle), 0.0},
           Complex{c, 0.0}});
    kets.push_back(k.normalized().with_canonical_phase());
  }
  return CycleScenario::make(std::move(kets), std::vector<double>(static_cast<size_t>(n), 1.0 / n));
}

QubitZxExample zx_example(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw input_error("interpolation weight s must lie in [0, 1]");
  }
  const double inv = 1.0 / std::sqrt(2.0);
  const Ket zero = Ket::basis(2, 0);
  const Ket one = Ket::basis(2, 1);
  const Ket plus({Complex{inv, 0.0}, Complex{inv, 0.0}});
  const Ket minus({Complex{inv, 0.0}, Complex{-inv, 0.0}});

  QubitZxExample ex;
  ex.s = s;
  ex.z_effects = {projector(zero), projector(one)};
  ex.x_effects = {projector(plus), projector(minus)};
  ex.zx_effects = {projector(zero).scaled(s), projector(one).scaled(s),
                   projector(plus).scaled(1.0 - s), projector(minus).scaled(1.0 - s)};
  return ex;
}

}  // namespace seqctx
