#include "seqctx/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace seqctx {

namespace {

void validate_effects(const std::vector<LabeledEffect>& effects, bool require_complete,
                      double tol) {
  if (effects.empty()) throw std::invalid_argument("a POVM needs at least one effect");
  const int d = effects.front().op.dim();
  for (const LabeledEffect& e : effects) {
    if (e.op.dim() != d) throw std::invalid_argument("POVM effects must share one dimension");
    if (e.label.empty()) throw std::invalid_argument("POVM effect labels must be nonempty");
    const std::vector<double> eig = eigenvalues(e.op);
    if (eig.front() < -tol) {
      throw input_error("effect '" + e.label + "' is not positive semidefinite");
    }
    if (eig.back() > 1.0 + tol) {
      throw input_error("effect '" + e.label + "' exceeds the identity");
    }
  }
  for (size_t i = 0; i < effects.size(); ++i) {
    for (size_t j = i + 1; j < effects.size(); ++j) {
      if (effects[i].label == effects[j].label) {
        throw std::invalid_argument("duplicate POVM label '" + effects[i].label + "'");
      }
    }
  }
  if (require_complete) {
    HermitianOperator sum = HermitianOperator::zero(d);
    for (const LabeledEffect& e : effects) sum = sum + e.op;
    if (sum.matrix().distance(SquareMatrix::identity(d)) > tol) {
      throw input_error("POVM effects do not sum to the identity");
    }
  }
}

}  // namespace

LabeledPovm LabeledPovm::complete(std::vector<LabeledEffect> effects, double tol) {
  validate_effects(effects, /*require_complete=*/true, tol);
  return LabeledPovm(std::move(effects), true);
}

LabeledPovm LabeledPovm::partial(std::vector<LabeledEffect> effects, double tol) {
  validate_effects(effects, /*require_complete=*/false, tol);
  return LabeledPovm(std::move(effects), false);
}

const HermitianOperator& LabeledPovm::find(const std::string& label) const {
  for (const LabeledEffect& e : effects_) {
    if (e.label == label) return e.op;
  }
  throw std::invalid_argument("no effect labeled '" + label + "'");
}

bool LabeledPovm::has_label(const std::string& label) const {
  for (const LabeledEffect& e : effects_) {
    if (e.label == label) return true;
  }
  return false;
}

LabeledPovm LabeledPovm::restricted(const std::vector<std::string>& labels) const {
  std::vector<LabeledEffect> subset;
  subset.reserve(labels.size());
  for (const std::string& l : labels) subset.push_back({l, find(l)});
  return LabeledPovm::partial(std::move(subset));
}

LabeledPovm build_config1(const CycleScenario& sc) {
  const int n = sc.n();
  std::vector<LabeledEffect> effects;
  effects.reserve(static_cast<size_t>(n) + 1);
  HermitianOperator sum = HermitianOperator::zero(3);
  for (int i = 0; i < n; ++i) {
    const double w = sc.prob(i) + sc.prob(sc.next(i));
    const HermitianOperator e = projector(sc.ket(i)).scaled(w);
    sum = sum + e;
    effects.push_back({"E" + std::to_string(i), e});
  }
  const double top = max_eigenvalue(sum);
  if (top > 1.0 + kSpectrumTol) {
    std::ostringstream os;
    os << "weighted projectors sum to an operator with eigenvalue " << top
       << " > 1; no completion effect exists";
    throw input_error(os.str());
  }
  effects.push_back({"K", HermitianOperator::identity(3) - sum});
  return LabeledPovm::complete(std::move(effects));
}

LabeledPovm build_config2(const CycleScenario& sc, int setting) {
  if (setting < 0 || setting >= sc.n()) {
    throw std::invalid_argument("setting index out of range");
  }
  const int j = sc.next(setting);
  const HermitianOperator a = projector(sc.ket(setting));
  const HermitianOperator b = projector(sc.ket(j));
  const HermitianOperator k = HermitianOperator::identity(3) - a - b;
  std::vector<LabeledEffect> effects = {
      {"Pi" + std::to_string(setting), a},
      {"Pi" + std::to_string(j), b},
      {"K" + std::to_string(setting), k},
  };
  return LabeledPovm::complete(std::move(effects));
}

HermitianOperator MixtureDecomposition::reconstruct(const CycleScenario& sc,
                                                    int label_index) const {
  HermitianOperator out = HermitianOperator::zero(3);
  for (const MixtureEntry& e : entries[static_cast<size_t>(label_index)]) {
    const LabeledPovm setting = build_config2(sc, e.setting);
    out = out + setting.find(e.c2_label).scaled(e.weight);
  }
  return out;
}

MixtureDecomposition config1_as_mixture(const CycleScenario& sc) {
  const int n = sc.n();
  MixtureDecomposition d;
  for (int i = 0; i < n; ++i) {
    const int prev = (i + n - 1) % n;
    d.labels.push_back("E" + std::to_string(i));
    d.entries.push_back({
        {i, "Pi" + std::to_string(i), sc.prob(i)},
        {prev, "Pi" + std::to_string(i), sc.prob(prev)},
    });
  }
  d.labels.push_back("K");
  std::vector<MixtureEntry> completion;
  for (int i = 0; i < n; ++i) completion.push_back({i, "K" + std::to_string(i), sc.prob(i)});
  d.entries.push_back(std::move(completion));
  return d;
}

HermitianOperator settingwise_completion_effect(const CycleScenario& sc) {
  HermitianOperator out = HermitianOperator::zero(3);
  for (int i = 0; i < sc.n(); ++i) {
    const HermitianOperator ki = HermitianOperator::identity(3) - projector(sc.ket(i)) -
                                 projector(sc.ket(sc.next(i)));
    out = out + ki.scaled(2.0 * sc.prob(i));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Similarity

namespace {

// If b == s * a for some real s >= 0, return s; otherwise nullopt.
// a is assumed non-null.
std::optional<double> proportionality_scale(const HermitianOperator& a,
                                            const HermitianOperator& b, double tol) {
  // Anchor the ratio at a's largest entry for stability.
  int br = 0, bc = 0;
  double best = 0.0;
  for (int r = 0; r < a.dim(); ++r) {
    for (int c = 0; c < a.dim(); ++c) {
      if (std::abs(a.entry(r, c)) > best) {
        best = std::abs(a.entry(r, c));
        br = r;
        bc = c;
      }
    }
  }
  const Complex ratio = b.entry(br, bc) / a.entry(br, bc);
  if (std::abs(ratio.imag()) > tol || ratio.real() < -tol) return std::nullopt;
  const double s = std::max(ratio.real(), 0.0);
  if (b.matrix().distance(a.matrix().scaled(Complex{s, 0.0})) > tol) return std::nullopt;
  return s;
}

struct PairingSearch {
  const std::vector<int>* a_idx;                       // non-null a effects
  const std::vector<std::vector<std::optional<double>>>* scales;  // [ai][bi]
  int b_count = 0;
  double tol = 0.0;
  std::vector<int> chosen;
  std::vector<bool> used;

  bool assign(size_t pos, std::optional<double>& scale) {
    if (pos == a_idx->size()) return true;
    for (int bi = 0; bi < b_count; ++bi) {
      if (used[static_cast<size_t>(bi)]) continue;
      const std::optional<double>& s = (*scales)[pos][static_cast<size_t>(bi)];
      if (!s.has_value()) continue;
      if (scale.has_value() && std::abs(*scale - *s) > tol) continue;
      const std::optional<double> saved = scale;
      scale = scale.has_value() ? scale : s;
      used[static_cast<size_t>(bi)] = true;
      chosen[pos] = bi;
      if (assign(pos + 1, scale)) return true;
      used[static_cast<size_t>(bi)] = false;
      scale = saved;
    }
    return false;
  }
};

}  // namespace

SimilarityResult check_similarity(const LabeledPovm& a, const LabeledPovm& b, double tol) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("check_similarity: dimension mismatch");
  }

  std::vector<int> a_live;  // a effects that are not null outcomes
  for (int i = 0; i < a.size(); ++i) {
    if (a.effect(i).op.max_abs() >= kStructureTol) a_live.push_back(i);
  }

  SimilarityResult res;
  if (a_live.empty()) {
    // Every outcome of a is null; vacuously similar with no meaningful scale.
    res.matched = true;
    return res;
  }

  std::vector<int> b_live, b_null;
  for (int i = 0; i < b.size(); ++i) {
    (b.effect(i).op.max_abs() >= kStructureTol ? b_live : b_null).push_back(i);
  }

  // Primary search: pair a's live effects with b's live effects under one
  // common positive scale.
  std::vector<std::vector<std::optional<double>>> scales(a_live.size());
  for (size_t ai = 0; ai < a_live.size(); ++ai) {
    scales[ai].resize(b_live.size());
    for (size_t bi = 0; bi < b_live.size(); ++bi) {
      scales[ai][bi] =
          proportionality_scale(a.effect(a_live[ai]).op, b.effect(b_live[bi]).op, tol);
    }
  }
  PairingSearch search;
  search.a_idx = &a_live;
  search.scales = &scales;
  search.b_count = static_cast<int>(b_live.size());
  search.tol = tol;
  search.chosen.assign(a_live.size(), -1);
  search.used.assign(b_live.size(), false);
  std::optional<double> scale;
  if (search.assign(0, scale)) {
    res.matched = true;
    res.scale = scale;
    for (size_t ai = 0; ai < a_live.size(); ++ai) {
      res.outcome_pairing.emplace_back(a.effect(a_live[ai]).label,
                                       b.effect(b_live[search.chosen[ai]]).label);
    }
    return res;
  }

  // Scale-zero case: the relation "b occurs with 0 times a's probability"
  // holds exactly when each a outcome maps to a distinct null b outcome.
  if (b_null.size() >= a_live.size()) {
    res.matched = true;
    res.scale = 0.0;
    for (size_t ai = 0; ai < a_live.size(); ++ai) {
      res.outcome_pairing.emplace_back(a.effect(a_live[ai]).label,
                                       b.effect(b_null[ai]).label);
    }
    return res;
  }

  return res;  // matched = false
}

}  // namespace seqctx
