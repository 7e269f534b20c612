#include "seqctx/ontic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "seqctx/sim.hpp"  // resolve_workers

namespace seqctx {

namespace {

constexpr int kN = kCycleSize;
constexpr double kModelTol = 1e-10;

int nxt(int i) { return (i + 1) % kN; }

}  // namespace

// ---------------------------------------------------------------------------
// OnticModel

OnticModel OnticModel::make(std::vector<double> mu, std::vector<Row> xi,
                            std::vector<Row> xi_completion) {
  const size_t k = mu.size();
  if (k == 0) throw input_error("an ontic model needs at least one state");
  if (xi.size() != k || xi_completion.size() != k) {
    throw input_error("mu, xi and xi_completion must have one row per ontic state");
  }
  double total = 0.0;
  for (double w : mu) {
    if (w < -kModelTol) throw input_error("ontic weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > kModelTol) {
    std::ostringstream os;
    os << "ontic weights must sum to 1, got " << total;
    throw input_error(os.str());
  }
  for (size_t s = 0; s < k; ++s) {
    for (int i = 0; i < kN; ++i) {
      const double a = xi[s][static_cast<size_t>(i)];
      const double b = xi_completion[s][static_cast<size_t>(i)];
      if (a < -kModelTol || a > 1.0 + kModelTol || b < -kModelTol || b > 1.0 + kModelTol) {
        throw input_error("response values must lie in [0, 1]");
      }
      const double norm = xi[s][static_cast<size_t>(i)] + xi[s][static_cast<size_t>(nxt(i))] +
                          xi_completion[s][static_cast<size_t>(i)];
      if (std::abs(norm - 1.0) > kModelTol) {
        std::ostringstream os;
        os << "state " << s << ", setting " << i
           << ": responses must sum to 1 per setting, got " << norm;
        throw input_error(os.str());
      }
    }
  }
  return OnticModel(std::move(mu), std::move(xi), std::move(xi_completion));
}

OnticModel OnticModel::from_responses(std::vector<double> mu, std::vector<Row> xi) {
  std::vector<Row> xiK(xi.size());
  for (size_t s = 0; s < xi.size(); ++s) {
    for (int i = 0; i < kN; ++i) {
      double rest = 1.0 - xi[s][static_cast<size_t>(i)] - xi[s][static_cast<size_t>(nxt(i))];
      if (rest < -kModelTol) {
        std::ostringstream os;
        os << "state " << s << ", setting " << i << ": responses exceed 1 by " << -rest;
        throw input_error(os.str());
      }
      xiK[s][static_cast<size_t>(i)] = std::max(rest, 0.0);
    }
  }
  return make(std::move(mu), std::move(xi), std::move(xiK));
}

// ---------------------------------------------------------------------------
// Constraints and values

ConstraintReport check_constraints(const OnticModel& m, const CycleScenario& sc,
                                   const ConstraintMode& mode, double tol) {
  if (sc.n() != kN) throw std::invalid_argument("constraint battery expects a five-cycle");
  ConstraintReport rep;
  rep.tol = tol;

  // Completeness: per-state weighted response sum must not exceed 1.
  double completeness_excess = 0.0;
  for (int s = 0; s < m.states(); ++s) {
    double sum = 0.0;
    for (int i = 0; i < kN; ++i) {
      sum += (sc.prob(i) + sc.prob(nxt(i))) * m.xi()[static_cast<size_t>(s)][static_cast<size_t>(i)];
    }
    completeness_excess = std::max(completeness_excess, sum - 1.0);
  }
  rep.completeness_residual = std::max(completeness_excess, 0.0);
  rep.completeness_ok = rep.completeness_residual <= tol;

  const auto overlaps = pair_overlap_matrix(m);
  for (int i = 0; i < kN; ++i) {
    rep.adjacent_overlap[static_cast<size_t>(i)] = overlaps[static_cast<size_t>(i)][static_cast<size_t>(nxt(i))];
    rep.nn_overlaps[static_cast<size_t>(i)] = overlaps[static_cast<size_t>(i)][static_cast<size_t>((i + 2) % kN)];
  }

  // Exhaustiveness: xi_i + xi_{i+1} = 1 for every state and setting.
  double exh_residual = 0.0;
  for (int s = 0; s < m.states(); ++s) {
    for (int i = 0; i < kN; ++i) {
      const double pair = m.xi()[static_cast<size_t>(s)][static_cast<size_t>(i)] +
                          m.xi()[static_cast<size_t>(s)][static_cast<size_t>(nxt(i))];
      exh_residual = std::max(exh_residual, std::abs(pair - 1.0));
    }
  }
  rep.exhaustiveness_residual = exh_residual;
  rep.exhaustiveness_ok = exh_residual <= tol;

  double eq_residual = 0.0;
  for (int i = 0; i < kN; ++i) {
    eq_residual = std::max(eq_residual, std::abs(rep.nn_overlaps[static_cast<size_t>(i)] -
                                                 rep.nn_overlaps[static_cast<size_t>((i + 3) % kN)]));
  }
  rep.equal_overlap_residual = eq_residual;

  double worst = rep.completeness_residual;
  for (double a : rep.adjacent_overlap) worst = std::max(worst, std::abs(a));
  if (mode.exhaustive) worst = std::max(worst, exh_residual);
  if (mode.overlap_cap) {
    for (double v : rep.nn_overlaps) worst = std::max(worst, v - 0.5);
  }
  if (mode.equal_overlap) worst = std::max(worst, eq_residual);
  rep.worst_violation = std::max(worst, 0.0);
  rep.passed = rep.worst_violation <= tol;
  return rep;
}

std::array<std::array<double, kCycleSize>, kCycleSize> pair_overlap_matrix(const OnticModel& m) {
  std::array<std::array<double, kCycleSize>, kCycleSize> o{};
  for (int s = 0; s < m.states(); ++s) {
    const double w = m.mu()[static_cast<size_t>(s)];
    const OnticModel::Row& row = m.xi()[static_cast<size_t>(s)];
    for (int i = 0; i < kN; ++i) {
      for (int j = 0; j < kN; ++j) {
        o[static_cast<size_t>(i)][static_cast<size_t>(j)] +=
            w * row[static_cast<size_t>(i)] * row[static_cast<size_t>(j)];
      }
    }
  }
  return o;
}

double sequential_sum(const std::array<std::array<double, kCycleSize>, kCycleSize>& overlaps,
                      const std::array<double, kCycleSize>& weights) {
  double total = 0.0;
  for (int i = 0; i < kN; ++i) {
    for (int j = 0; j < kN; ++j) {
      total += weights[static_cast<size_t>(i)] * overlaps[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
  }
  return total;
}

double evaluate_C(const OnticModel& m, const CycleScenario& sc) {
  if (sc.n() != kN) throw std::invalid_argument("ontic value expects a five-cycle");
  std::array<double, kCycleSize> weights{};
  for (int i = 0; i < kN; ++i) weights[static_cast<size_t>(i)] = 2.0 * sc.prob(i);
  return sequential_sum(pair_overlap_matrix(m), weights);
}

double evaluate_C_normalized(const OnticModel& m, const CycleScenario& sc) {
  if (sc.n() != kN) throw std::invalid_argument("ontic value expects a five-cycle");
  const auto overlaps = pair_overlap_matrix(m);
  std::array<double, kCycleSize> mean{};
  for (int s = 0; s < m.states(); ++s) {
    for (int i = 0; i < kN; ++i) {
      mean[static_cast<size_t>(i)] +=
          m.mu()[static_cast<size_t>(s)] * m.xi()[static_cast<size_t>(s)][static_cast<size_t>(i)];
    }
  }
  double total = 0.0;
  for (int j = 0; j < kN; ++j) {
    const double marginal = 2.0 * sc.prob(j) * mean[static_cast<size_t>(j)];
    if (marginal <= 1e-12) continue;  // first outcome never fires; skip column
    for (int i = 0; i < kN; ++i) {
      total += 2.0 * sc.prob(i) * overlaps[static_cast<size_t>(i)][static_cast<size_t>(j)] / marginal;
    }
  }
  return total;
}

BoundChainReport verify_bound_chain(const OnticModel& m, const CycleScenario& sc, double tol) {
  if (sc.n() != kN) throw input_error("the bound chain is specific to the five-cycle");
  for (int i = 0; i < kN; ++i) {
    if (std::abs(sc.prob(i) - 1.0 / kN) > kStructureTol) {
      throw input_error("the bound chain requires uniform setting probabilities");
    }
  }

  const auto overlaps = pair_overlap_matrix(m);
  std::array<double, kCycleSize> mean{}, adj{}, nn{};
  for (int s = 0; s < m.states(); ++s) {
    for (int i = 0; i < kN; ++i) {
      mean[static_cast<size_t>(i)] +=
          m.mu()[static_cast<size_t>(s)] * m.xi()[static_cast<size_t>(s)][static_cast<size_t>(i)];
    }
  }
  for (int i = 0; i < kN; ++i) {
    adj[static_cast<size_t>(i)] = overlaps[static_cast<size_t>(i)][static_cast<size_t>(nxt(i))];
    nn[static_cast<size_t>(i)] = overlaps[static_cast<size_t>(i)][static_cast<size_t>((i + 2) % kN)];
  }
  double mean_sum = 0.0, nn_sum = 0.0, adj_max = 0.0;
  for (int i = 0; i < kN; ++i) {
    mean_sum += mean[static_cast<size_t>(i)];
    nn_sum += nn[static_cast<size_t>(i)];
    adj_max = std::max(adj_max, adj[static_cast<size_t>(i)]);
  }

  BoundChainReport rep;
  rep.l1 = evaluate_C(m, sc);
  rep.l2 = 0.4 * mean_sum + 0.8 * nn_sum;
  rep.l3 = 2.0 + 0.8 * nn_sum;
  for (int i = 0; i < kN; ++i) {
    rep.l4[static_cast<size_t>(i)] = 2.0 + 0.8 * (1.0 + nn[static_cast<size_t>((i + 2) % kN)]);
  }
  rep.l5 = kNoncontextualBound;

  const bool exhaustive_ok =
      check_constraints(m, sc, ConstraintMode{}, tol).exhaustiveness_residual <= tol;
  const double order_tol = 1e-9;

  auto push = [&](std::string from, std::string to, std::string premise, bool ok, double lhs,
                  double rhs) {
    BoundChainStep st;
    st.from = std::move(from);
    st.to = std::move(to);
    st.premise = std::move(premise);
    st.premise_ok = ok;
    st.lhs = lhs;
    st.rhs = rhs;
    if (ok) st.ordered = lhs <= rhs + order_tol;
    rep.steps.push_back(std::move(st));
  };

  push("L1", "L2", "zero adjacent overlap", adj_max <= tol, rep.l1, rep.l2);
  push("L2", "L3", "box bounds only", true, rep.l2, rep.l3);
  for (int i = 0; i < kN; ++i) {
    push("L3", "L4[" + std::to_string(i) + "]", "pointwise exhaustiveness", exhaustive_ok,
         rep.l3, rep.l4[static_cast<size_t>(i)]);
  }
  for (int i = 0; i < kN; ++i) {
    const double used_nn = nn[static_cast<size_t>((i + 2) % kN)];
    push("L4[" + std::to_string(i) + "]", "L5",
         "overlap cap on the anchored next-nearest pair", used_nn <= 0.5 + tol,
         rep.l4[static_cast<size_t>(i)], rep.l5);
  }

  rep.all_evaluated_ordered = true;
  for (const BoundChainStep& st : rep.steps) {
    if (st.premise_ok && !(st.ordered.has_value() && *st.ordered)) {
      rep.all_evaluated_ordered = false;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Small exact LP:  max c.x  s.t.  A x = b, x >= 0, by enumeration of basic
// feasible solutions after dropping linearly dependent rows.

namespace {

struct SmallLp {
  std::vector<std::vector<double>> a;  // rows x cols
  std::vector<double> b;
  std::vector<double> c;
};

// Indices of a maximal independent row subset; nullopt if the dropped rows
// are inconsistent (0 = nonzero).
std::optional<std::vector<int>> independent_rows(const SmallLp& lp) {
  const int rows = static_cast<int>(lp.a.size());
  const int cols = static_cast<int>(lp.a.front().size());
  std::vector<std::vector<double>> m(static_cast<size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    m[static_cast<size_t>(r)] = lp.a[static_cast<size_t>(r)];
    m[static_cast<size_t>(r)].push_back(lp.b[static_cast<size_t>(r)]);
  }
  std::vector<bool> used(static_cast<size_t>(rows), false);
  std::vector<int> pivots;
  for (int col = 0; col < cols; ++col) {
    int best = -1;
    double mag = 1e-11;
    for (int r = 0; r < rows; ++r) {
      if (!used[static_cast<size_t>(r)] && std::abs(m[static_cast<size_t>(r)][static_cast<size_t>(col)]) > mag) {
        mag = std::abs(m[static_cast<size_t>(r)][static_cast<size_t>(col)]);
        best = r;
      }
    }
    if (best < 0) continue;
    used[static_cast<size_t>(best)] = true;
    pivots.push_back(best);
    for (int r = 0; r < rows; ++r) {
      if (r == best || std::abs(m[static_cast<size_t>(r)][static_cast<size_t>(col)]) < 1e-15) continue;
      const double f = m[static_cast<size_t>(r)][static_cast<size_t>(col)] / m[static_cast<size_t>(best)][static_cast<size_t>(col)];
      for (int k = 0; k <= cols; ++k) {
        m[static_cast<size_t>(r)][static_cast<size_t>(k)] -= f * m[static_cast<size_t>(best)][static_cast<size_t>(k)];
      }
    }
  }
  for (int r = 0; r < rows; ++r) {
    if (!used[static_cast<size_t>(r)] && std::abs(m[static_cast<size_t>(r)][static_cast<size_t>(cols)]) > 1e-9) {
      return std::nullopt;  // inconsistent system
    }
  }
  std::sort(pivots.begin(), pivots.end());
  return pivots;
}

// Solve the square system given by `rows` and basis columns `basis`.
std::optional<std::vector<double>> solve_square(const SmallLp& lp, const std::vector<int>& rows,
                                                const std::vector<int>& basis) {
  const int n = static_cast<int>(rows.size());
  std::vector<std::vector<double>> m(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n) + 1, 0.0));
  for (int r = 0; r < n; ++r) {
    for (int k = 0; k < n; ++k) {
      m[static_cast<size_t>(r)][static_cast<size_t>(k)] = lp.a[static_cast<size_t>(rows[static_cast<size_t>(r)])][static_cast<size_t>(basis[static_cast<size_t>(k)])];
    }
    m[static_cast<size_t>(r)][static_cast<size_t>(n)] = lp.b[static_cast<size_t>(rows[static_cast<size_t>(r)])];
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(m[static_cast<size_t>(r)][static_cast<size_t>(col)]) > std::abs(m[static_cast<size_t>(piv)][static_cast<size_t>(col)])) piv = r;
    }
    if (std::abs(m[static_cast<size_t>(piv)][static_cast<size_t>(col)]) < 1e-11) return std::nullopt;
    std::swap(m[static_cast<size_t>(col)], m[static_cast<size_t>(piv)]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m[static_cast<size_t>(r)][static_cast<size_t>(col)] / m[static_cast<size_t>(col)][static_cast<size_t>(col)];
      if (f == 0.0) continue;
      for (int k = col; k <= n; ++k) m[static_cast<size_t>(r)][static_cast<size_t>(k)] -= f * m[static_cast<size_t>(col)][static_cast<size_t>(k)];
    }
  }
  std::vector<double> x(static_cast<size_t>(n));
  for (int r = 0; r < n; ++r) x[static_cast<size_t>(r)] = m[static_cast<size_t>(r)][static_cast<size_t>(n)] / m[static_cast<size_t>(r)][static_cast<size_t>(r)];
  return x;
}

std::optional<std::vector<double>> lp_max_bfs(const SmallLp& lp) {
  const int cols = static_cast<int>(lp.a.front().size());
  const std::optional<std::vector<int>> rows = independent_rows(lp);
  if (!rows.has_value()) return std::nullopt;
  const int n = static_cast<int>(rows->size());
  if (n == 0) {
    // No binding constraints; maximize over x >= 0 alone would be unbounded
    // unless c <= 0.  Not reachable from the callers (the simplex row is
    // always present); treat as infeasible defensively.
    return std::nullopt;
  }
  if (cols < n) return std::nullopt;

  std::vector<int> basis(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) basis[static_cast<size_t>(i)] = i;

  std::optional<std::vector<double>> best;
  double best_value = -std::numeric_limits<double>::infinity();

  for (;;) {
    const std::optional<std::vector<double>> sol = solve_square(lp, *rows, basis);
    if (sol.has_value()) {
      bool feasible = true;
      for (double v : *sol) {
        if (v < -1e-10) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        double value = 0.0;
        for (int k = 0; k < n; ++k) {
          value += lp.c[static_cast<size_t>(basis[static_cast<size_t>(k)])] * (*sol)[static_cast<size_t>(k)];
        }
        if (value > best_value + 1e-13) {
          best_value = value;
          std::vector<double> full(static_cast<size_t>(cols), 0.0);
          for (int k = 0; k < n; ++k) {
            full[static_cast<size_t>(basis[static_cast<size_t>(k)])] = std::max((*sol)[static_cast<size_t>(k)], 0.0);
          }
          best = std::move(full);
        }
      }
    }
    // next lexicographic combination
    int i = n - 1;
    while (i >= 0 && basis[static_cast<size_t>(i)] == cols - n + i) --i;
    if (i < 0) break;
    ++basis[static_cast<size_t>(i)];
    for (int j = i + 1; j < n; ++j) basis[static_cast<size_t>(j)] = basis[static_cast<size_t>(j - 1)] + 1;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Restart optimizer internals

struct Candidate {
  std::vector<double> mu;
  std::vector<OnticModel::Row> xi;
  double value = -std::numeric_limits<double>::infinity();
  bool feasible = false;
};

double row_objective(const OnticModel::Row& row, const CycleScenario& sc) {
  double ps = 0.0, s = 0.0;
  for (int i = 0; i < kN; ++i) {
    ps += sc.prob(i) * row[static_cast<size_t>(i)];
    s += row[static_cast<size_t>(i)];
  }
  return 2.0 * ps * s;
}

// Row adjacency products; a row is "clean" when every product vanishes, which
// is what the measure-level zero-overlap equalities force on supported states.
bool row_is_clean(const OnticModel::Row& row) {
  for (int i = 0; i < kN; ++i) {
    if (row[static_cast<size_t>(i)] * row[static_cast<size_t>(nxt(i))] > 1e-13) return false;
  }
  return true;
}

struct MeasureStats {
  std::array<double, kCycleSize> adj{};
  std::array<double, kCycleSize> nn{};
};

MeasureStats measure_stats(const std::vector<double>& mu,
                           const std::vector<OnticModel::Row>& xi) {
  MeasureStats st;
  for (size_t s = 0; s < mu.size(); ++s) {
    for (int i = 0; i < kN; ++i) {
      st.adj[static_cast<size_t>(i)] += mu[s] * xi[s][static_cast<size_t>(i)] * xi[s][static_cast<size_t>(nxt(i))];
      st.nn[static_cast<size_t>(i)] += mu[s] * xi[s][static_cast<size_t>(i)] * xi[s][static_cast<size_t>((i + 2) % kN)];
    }
  }
  return st;
}

double merit(const std::vector<double>& mu, const std::vector<OnticModel::Row>& xi,
             const CycleScenario& sc, const ConstraintMode& mode, double rho) {
  double value = 0.0;
  for (size_t s = 0; s < mu.size(); ++s) value += mu[s] * row_objective(xi[s], sc);
  const MeasureStats st = measure_stats(mu, xi);
  double penalty = 0.0;
  for (int i = 0; i < kN; ++i) {
    penalty += st.adj[static_cast<size_t>(i)] * st.adj[static_cast<size_t>(i)];
    if (mode.overlap_cap) {
      const double over = std::max(0.0, st.nn[static_cast<size_t>(i)] - 0.5);
      penalty += over * over;
    }
    if (mode.equal_overlap) {
      const double diff = st.nn[static_cast<size_t>(i)] - st.nn[static_cast<size_t>((i + 3) % kN)];
      penalty += diff * diff;
    }
  }
  return value - rho * penalty;
}

// Exact maximization of the piecewise-quadratic merit over one coordinate's
// feasible interval.  Within each hinge segment the merit is an exact
// quadratic, so a three-point fit recovers its vertex.
void coordinate_update(std::vector<OnticModel::Row>& xi, const std::vector<double>& mu,
                       const CycleScenario& sc, const ConstraintMode& mode, double rho,
                       int state, int coord) {
  OnticModel::Row& row = xi[static_cast<size_t>(state)];
  const double lo = 0.0;
  double hi = std::min({1.0, 1.0 - row[static_cast<size_t>(nxt(coord))],
                        1.0 - row[static_cast<size_t>((coord + kN - 1) % kN)]});
  // Completeness: sum_i (p_i + p_{i+1}) xi_i <= 1.
  const double wc = sc.prob(coord) + sc.prob(nxt(coord));
  if (wc > 1e-15) {
    double rest = 0.0;
    for (int j = 0; j < kN; ++j) {
      if (j == coord) continue;
      rest += (sc.prob(j) + sc.prob(nxt(j))) * row[static_cast<size_t>(j)];
    }
    hi = std::min(hi, (1.0 - rest) / wc);
  }
  hi = std::max(hi, lo);

  auto merit_at = [&](double x) {
    const double saved = row[static_cast<size_t>(coord)];
    row[static_cast<size_t>(coord)] = x;
    const double v = merit(mu, xi, sc, mode, rho);
    row[static_cast<size_t>(coord)] = saved;
    return v;
  };

  // Segment boundaries: the cap hinges of the two next-nearest overlaps this
  // coordinate enters are the only non-smooth points.
  std::vector<double> cuts = {lo, hi};
  if (mode.overlap_cap) {
    const double w = mu[static_cast<size_t>(state)];
    if (w > 1e-15) {
      const MeasureStats st = measure_stats(mu, xi);
      for (int which = 0; which < 2; ++which) {
        const int pair_index = which == 0 ? (coord + kN - 2) % kN : coord;
        const int partner = which == 0 ? (coord + kN - 2) % kN : (coord + 2) % kN;
        const double coef = w * row[static_cast<size_t>(partner)];
        if (coef <= 1e-15) continue;
        const double base = st.nn[static_cast<size_t>(pair_index)] -
                            coef * row[static_cast<size_t>(coord)];
        const double bp = (0.5 - base) / coef;
        if (bp > lo + 1e-15 && bp < hi - 1e-15) cuts.push_back(bp);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());

  double best_x = row[static_cast<size_t>(coord)];
  double best_v = -std::numeric_limits<double>::infinity();
  auto consider = [&](double x, double v) {
    if (v > best_v + 1e-15 || (std::abs(v - best_v) <= 1e-15 && x < best_x)) {
      best_v = v;
      best_x = x;
    }
  };
  for (size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    const double a = cuts[seg];
    const double b = cuts[seg + 1];
    if (b - a < 1e-15) {
      consider(a, merit_at(a));
      continue;
    }
    const double mid = 0.5 * (a + b);
    const double fa = merit_at(a);
    const double fm = merit_at(mid);
    const double fb = merit_at(b);
    consider(a, fa);
    consider(b, fb);
    // Quadratic through the three samples: vertex if concave and interior.
    const double alpha = 2.0 * (fa - 2.0 * fm + fb) / ((b - a) * (b - a));
    if (alpha < -1e-15) {
      const double beta = (fb - fa) / (b - a) - alpha * (a + b);
      const double vx = -beta / (2.0 * alpha);
      if (vx > a && vx < b) consider(vx, merit_at(vx));
    }
  }
  row[static_cast<size_t>(coord)] = best_x;
}

// Hard-constraint linear program in mu: support restricted to clean rows,
// overlap caps via slack variables, simplex normalization.
bool mu_step(std::vector<double>& mu, const std::vector<OnticModel::Row>& xi,
             const CycleScenario& sc, const ConstraintMode& mode) {
  std::vector<int> support;
  for (size_t s = 0; s < xi.size(); ++s) {
    if (row_is_clean(xi[s])) support.push_back(static_cast<int>(s));
  }
  if (support.empty()) return false;

  const int nv = static_cast<int>(support.size());
  const int slacks = mode.overlap_cap ? kN : 0;
  SmallLp lp;
  lp.c.assign(static_cast<size_t>(nv + slacks), 0.0);
  for (int k = 0; k < nv; ++k) {
    lp.c[static_cast<size_t>(k)] = row_objective(xi[static_cast<size_t>(support[static_cast<size_t>(k)])], sc);
  }
  // simplex row
  {
    std::vector<double> row(static_cast<size_t>(nv + slacks), 0.0);
    for (int k = 0; k < nv; ++k) row[static_cast<size_t>(k)] = 1.0;
    lp.a.push_back(std::move(row));
    lp.b.push_back(1.0);
  }
  if (mode.overlap_cap) {
    for (int i = 0; i < kN; ++i) {
      std::vector<double> row(static_cast<size_t>(nv + slacks), 0.0);
      for (int k = 0; k < nv; ++k) {
        const OnticModel::Row& r = xi[static_cast<size_t>(support[static_cast<size_t>(k)])];
        row[static_cast<size_t>(k)] = r[static_cast<size_t>(i)] * r[static_cast<size_t>((i + 2) % kN)];
      }
      row[static_cast<size_t>(nv + i)] = 1.0;
      lp.a.push_back(std::move(row));
      lp.b.push_back(0.5);
    }
  }
  if (mode.equal_overlap) {
    for (int i = 0; i + 1 < kN; ++i) {  // four independent equalities
      std::vector<double> row(static_cast<size_t>(nv + slacks), 0.0);
      for (int k = 0; k < nv; ++k) {
        const OnticModel::Row& r = xi[static_cast<size_t>(support[static_cast<size_t>(k)])];
        const int j = (i + 3) % kN;
        row[static_cast<size_t>(k)] = r[static_cast<size_t>(i)] * r[static_cast<size_t>((i + 2) % kN)] -
                                      r[static_cast<size_t>(j)] * r[static_cast<size_t>((j + 2) % kN)];
      }
      lp.a.push_back(std::move(row));
      lp.b.push_back(0.0);
    }
  }

  const std::optional<std::vector<double>> sol = lp_max_bfs(lp);
  if (!sol.has_value()) return false;
  std::fill(mu.begin(), mu.end(), 0.0);
  double total = 0.0;
  for (int k = 0; k < nv; ++k) {
    mu[static_cast<size_t>(support[static_cast<size_t>(k)])] = (*sol)[static_cast<size_t>(k)];
    total += (*sol)[static_cast<size_t>(k)];
  }
  if (total <= 0.0) return false;
  for (double& w : mu) w /= total;  // absorb solver round-off exactly
  return true;
}

double model_value(const Candidate& cand, const CycleScenario& sc) {
  double value = 0.0;
  for (size_t k = 0; k < cand.mu.size(); ++k) {
    value += cand.mu[k] * row_objective(cand.xi[k], sc);
  }
  return value;
}

// One cleanup pass.  Quadratic penalties leave a residual violation of order
// 1/rho, which the 1e-8 feasibility check rightly rejects; this pass removes
// it exactly.  Each row is projected onto its best independent support (an
// independent set of the cycle), which makes every adjacent product
// identically zero; the overlap cap and completeness then become exact
// per-coordinate interval bounds, and the measure step enforces the remaining
// measure-level constraints as hard LP rows.  The best measure-feasible
// snapshot wins; returns whether one was found.
bool run_cleanup(Candidate& cand, const CycleScenario& sc, const ConstraintMode& mode,
                 bool singletons_only) {
  const size_t K = cand.xi.size();

  // Project each row onto the independent support that keeps the most value.
  std::vector<std::array<int, 2>> support(K, {-1, -1});
  for (size_t k = 0; k < K; ++k) {
    OnticModel::Row& row = cand.xi[k];
    double best_q = 0.0;
    std::array<int, 2> best{-1, -1};
    auto try_support = [&](int a, int b) {
      OnticModel::Row r{};
      if (a >= 0) r[static_cast<size_t>(a)] = row[static_cast<size_t>(a)];
      if (b >= 0) r[static_cast<size_t>(b)] = row[static_cast<size_t>(b)];
      const double q = row_objective(r, sc);
      if (q > best_q + 1e-15) {
        best_q = q;
        best = {a, b};
      }
    };
    for (int i = 0; i < kN; ++i) try_support(i, -1);
    if (!singletons_only) {
      for (int i = 0; i < kN; ++i) try_support(i, (i + 2) % kN);
    }
    OnticModel::Row projected{};
    for (int idx : best) {
      if (idx >= 0) projected[static_cast<size_t>(idx)] = row[static_cast<size_t>(idx)];
    }
    row = projected;
    support[k] = best;
  }

  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<double> best_mu;
  std::vector<OnticModel::Row> best_xi;
  auto snapshot = [&]() {
    const MeasureStats st = measure_stats(cand.mu, cand.xi);
    for (double a : st.adj) {
      if (a > 1e-12) return;
    }
    if (mode.overlap_cap) {
      for (double v : st.nn) {
        if (v > 0.5 + 1e-12) return;
      }
    }
    if (mode.equal_overlap) {
      for (int i = 0; i < kN; ++i) {
        if (std::abs(st.nn[static_cast<size_t>(i)] - st.nn[static_cast<size_t>((i + 3) % kN)]) > 1e-10) return;
      }
    }
    for (size_t k = 0; k < K; ++k) {
      double sum = 0.0;
      for (int i = 0; i < kN; ++i) {
        sum += (sc.prob(i) + sc.prob(nxt(i))) * cand.xi[k][static_cast<size_t>(i)];
      }
      if (sum > 1.0 + 1e-12) return;
    }
    double value = 0.0;
    for (size_t k = 0; k < K; ++k) value += cand.mu[k] * row_objective(cand.xi[k], sc);
    if (value > best_value + 1e-15) {
      best_value = value;
      best_mu = cand.mu;
      best_xi = cand.xi;
    }
  };

  for (int iter = 0; iter < 8; ++iter) {
    mu_step(cand.mu, cand.xi, sc, mode);
    snapshot();
    // Hard-bounded saturation sweep over the support coordinates: the value
    // restricted to one coordinate is quadratic, so endpoints plus the fitted
    // vertex cover the maximum exactly.
    for (size_t k = 0; k < K; ++k) {
      const double w = cand.mu[k];
      for (int idx : support[k]) {
        if (idx < 0) continue;
        OnticModel::Row& row = cand.xi[k];
        double hi = 1.0;
        const double wc = sc.prob(idx) + sc.prob(nxt(idx));
        if (wc > 1e-15) {
          double rest = 0.0;
          for (int j = 0; j < kN; ++j) {
            if (j == idx) continue;
            rest += (sc.prob(j) + sc.prob(nxt(j))) * row[static_cast<size_t>(j)];
          }
          hi = std::min(hi, (1.0 - rest) / wc);
        }
        if (mode.overlap_cap && support[k][0] >= 0 && support[k][1] >= 0 && w > 1e-15) {
          const int partner = support[k][0] == idx ? support[k][1] : support[k][0];
          const double v = row[static_cast<size_t>(partner)];
          if (v > 1e-15) {
            // Pair supports are stored as {i, (i+2) % 5}, so the pair's
            // next-nearest index is the first entry.
            const int pair_index = support[k][0];
            const MeasureStats st = measure_stats(cand.mu, cand.xi);
            const double others = st.nn[static_cast<size_t>(pair_index)] -
                                  w * v * row[static_cast<size_t>(idx)];
            hi = std::min(hi, (0.5 - others) / (w * v));
          }
        }
        hi = std::max(hi, 0.0);
        auto value_at = [&](double x) {
          const double saved = row[static_cast<size_t>(idx)];
          row[static_cast<size_t>(idx)] = x;
          double value = 0.0;
          for (size_t kk = 0; kk < K; ++kk) value += cand.mu[kk] * row_objective(cand.xi[kk], sc);
          row[static_cast<size_t>(idx)] = saved;
          return value;
        };
        const double fa = value_at(0.0);
        const double fb = value_at(hi);
        double best_x = fb >= fa ? hi : 0.0;
        double best_f = std::max(fa, fb);
        if (hi > 1e-15) {
          const double mid = 0.5 * hi;
          const double fm = value_at(mid);
          const double alpha = 2.0 * (fa - 2.0 * fm + fb) / (hi * hi);
          if (alpha < -1e-15) {
            const double beta = (fb - fa) / hi - alpha * hi;
            const double vx = -beta / (2.0 * alpha);
            if (vx > 0.0 && vx < hi && value_at(vx) > best_f) {
              best_f = value_at(vx);
              best_x = vx;
            }
          }
        }
        row[static_cast<size_t>(idx)] = best_x;
      }
    }
    // A capped pair can jam the per-coordinate sweep anywhere on the active
    // cap curve xi_i xi_{i+2} = budget: each coordinate alone is blocked at
    // the partner's current value.  The value is convex along that curve, so
    // its maximum sits at one of the two endpoints; evaluate both directly.
    // (Completeness never binds on a pair row: the four setting weights it
    // touches sum to at most 1.)
    if (mode.overlap_cap) {
      for (size_t k = 0; k < K; ++k) {
        const double w = cand.mu[k];
        if (w <= 1e-15 || support[k][0] < 0 || support[k][1] < 0) continue;
        const int i = support[k][0];
        const int j = support[k][1];
        OnticModel::Row& row = cand.xi[k];
        const MeasureStats st = measure_stats(cand.mu, cand.xi);
        const double budget = 0.5 - (st.nn[static_cast<size_t>(i)] -
                                     w * row[static_cast<size_t>(i)] * row[static_cast<size_t>(j)]);
        const double partner = std::clamp(budget / w, 0.0, 1.0);
        auto pair_value = [&](double a, double b) {
          const double sa = row[static_cast<size_t>(i)];
          const double sb = row[static_cast<size_t>(j)];
          row[static_cast<size_t>(i)] = a;
          row[static_cast<size_t>(j)] = b;
          double value = 0.0;
          for (size_t kk = 0; kk < K; ++kk) value += cand.mu[kk] * row_objective(cand.xi[kk], sc);
          row[static_cast<size_t>(i)] = sa;
          row[static_cast<size_t>(j)] = sb;
          return value;
        };
        double best_a = row[static_cast<size_t>(i)];
        double best_b = row[static_cast<size_t>(j)];
        double best_f = pair_value(best_a, best_b);
        const std::array<std::array<double, 2>, 2> endpoints = {{{1.0, partner}, {partner, 1.0}}};
        for (const auto& pt : endpoints) {
          const double f = pair_value(pt[0], pt[1]);
          if (f > best_f + 1e-15) {
            best_f = f;
            best_a = pt[0];
            best_b = pt[1];
          }
        }
        row[static_cast<size_t>(i)] = best_a;
        row[static_cast<size_t>(j)] = best_b;
      }
    }
  }
  mu_step(cand.mu, cand.xi, sc, mode);
  snapshot();

  if (best_value > -std::numeric_limits<double>::infinity()) {
    cand.mu = std::move(best_mu);
    cand.xi = std::move(best_xi);
    return true;
  }
  return false;
}

void cleanup_phase(Candidate& cand, const CycleScenario& sc, const ConstraintMode& mode) {
  Candidate primary = cand;
  const bool primary_ok = run_cleanup(primary, sc, mode, false);
  // Pair supports carry nonzero next-nearest overlaps, which the equal-overlap
  // equalities can make unreachable at small K; a singletons-only pass covers
  // that regime (and rescues any pass that found no feasible point at all).
  if (mode.equal_overlap || !primary_ok) {
    Candidate alt = cand;
    const bool alt_ok = run_cleanup(alt, sc, mode, true);
    if (alt_ok && (!primary_ok || model_value(alt, sc) > model_value(primary, sc) + 1e-15)) {
      cand = std::move(alt);
      return;
    }
  }
  cand = std::move(primary);
}

Candidate run_restart(const CycleScenario& sc, const OptimizerConfig& cfg,
                      std::uint64_t stream_seed) {
  SplitMix64 rng(stream_seed);
  const int K = cfg.ontic_states;

  Candidate cand;
  cand.xi.assign(static_cast<size_t>(K), OnticModel::Row{});
  cand.mu.assign(static_cast<size_t>(K), 1.0 / K);

  auto draw_value = [&]() {
    if (!cfg.start_grid.empty()) {
      return cfg.start_grid[static_cast<size_t>(rng.below(cfg.start_grid.size()))];
    }
    return rng.uniform();
  };

  if (cfg.mode.exhaustive) {
    // Around an odd cycle the pointwise equations xi_i + xi_{i+1} = 1 have the
    // single solution xi = 1/2 everywhere, so there is nothing to sweep; the
    // measure step below then decides (in)feasibility against the remaining
    // constraints.
    for (auto& row : cand.xi) row.fill(0.5);
  } else {
    // A quarter of the restarts seed the five cyclic shifts of one gap-2
    // pair across the first rows; that family is the natural candidate for
    // the symmetric (equal-overlap) constraints and a good basin generally.
    const bool rotation_family = rng.below(4) == 0;
    for (size_t k = 0; k < cand.xi.size(); ++k) {
      OnticModel::Row& row = cand.xi[k];
      row.fill(0.0);
      if (rotation_family) {
        const int i = static_cast<int>(k % static_cast<size_t>(kN));
        row[static_cast<size_t>(i)] = draw_value();
        row[static_cast<size_t>((i + 2) % kN)] = draw_value();
        continue;
      }
      const std::uint64_t kind = rng.below(10);
      if (kind < 6) {
        const int i = static_cast<int>(rng.below(kN));
        row[static_cast<size_t>(i)] = draw_value();
        row[static_cast<size_t>((i + 2) % kN)] = draw_value();
      } else if (kind < 9) {
        row[static_cast<size_t>(rng.below(kN))] = draw_value();
      }
      // else: the null response row
    }
    double total = 0.0;
    for (double& w : cand.mu) {
      w = rng.uniform() + 1e-3;
      total += w;
    }
    for (double& w : cand.mu) w /= total;
  }

  for (int outer = 0; outer < cfg.outer_iters; ++outer) {
    const double rho = cfg.penalty_base * std::pow(cfg.penalty_growth, outer);
    if (!cfg.mode.exhaustive) {
      for (int sweep = 0; sweep < cfg.sweeps_per_outer; ++sweep) {
        for (int s = 0; s < K; ++s) {
          for (int i = 0; i < kN; ++i) {
            coordinate_update(cand.xi, cand.mu, sc, cfg.mode, rho, s, i);
          }
        }
      }
    }
    mu_step(cand.mu, cand.xi, sc, cfg.mode);
  }
  if (!cfg.mode.exhaustive) cleanup_phase(cand, sc, cfg.mode);

  return cand;
}

}  // namespace

OptResult maximize_C(const CycleScenario& sc, const OptimizerConfig& cfg) {
  if (sc.n() != kN) throw input_error("the model search is specific to the five-cycle");
  if (cfg.ontic_states < 1) throw std::invalid_argument("need at least one ontic state");
  if (cfg.restarts < 1) throw std::invalid_argument("need at least one restart");

  std::vector<Candidate> results(static_cast<size_t>(cfg.restarts));
  int next_restart = 0;
  std::mutex mtx;
  auto worker = [&]() {
    for (;;) {
      int r;
      {
        std::lock_guard<std::mutex> lock(mtx);
        if (next_restart >= cfg.restarts) return;
        r = next_restart++;
      }
      results[static_cast<size_t>(r)] =
          run_restart(sc, cfg, derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    }
  };
  const int workers = std::min(resolve_workers(cfg.workers), cfg.restarts);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // Evaluate every candidate with the independent checker and keep the best
  // (feasible beats infeasible, then value, then restart index).
  std::optional<OptResult> best;
  for (int r = 0; r < cfg.restarts; ++r) {
    Candidate& cand = results[static_cast<size_t>(r)];
    OnticModel model = OnticModel::from_responses(cand.mu, cand.xi);
    const ConstraintReport rep = check_constraints(model, sc, cfg.mode, cfg.tol);
    const double value = evaluate_C(model, sc);
    const bool better =
        !best.has_value() ||
        (rep.passed && !best->feasible) ||
        (rep.passed == best->feasible && value > best->best_value + 1e-15);
    if (better) {
      OptResult out{std::move(model), value, rep.passed, cfg.restarts};
      best = std::move(out);
    }
  }
  best->restarts_used = cfg.restarts;
  return std::move(*best);
}

OnticModel random_feasible_model(SplitMix64& rng, int states, bool enforce_cap) {
  if (states < 1) throw std::invalid_argument("need at least one ontic state");
  std::vector<OnticModel::Row> xi(static_cast<size_t>(states));
  std::vector<double> mu(static_cast<size_t>(states));
  for (int s = 0; s < states; ++s) {
    xi[static_cast<size_t>(s)].fill(0.0);
    const std::uint64_t kind = rng.below(20);
    if (kind == 0) {
      // null row
    } else if (kind < 8) {
      xi[static_cast<size_t>(s)][static_cast<size_t>(rng.below(kN))] = 1.0 - rng.uniform();
    } else {
      const int i = static_cast<int>(rng.below(kN));
      xi[static_cast<size_t>(s)][static_cast<size_t>(i)] = 1.0 - rng.uniform();
      xi[static_cast<size_t>(s)][static_cast<size_t>((i + 2) % kN)] = 1.0 - rng.uniform();
    }
    mu[static_cast<size_t>(s)] = rng.uniform() + 1e-6;
  }
  double total = 0.0;
  for (double w : mu) total += w;
  for (double& w : mu) w /= total;

  if (enforce_cap) {
    for (int guard = 0; guard < 400; ++guard) {
      double worst = 0.0;
      MeasureStats st = measure_stats(mu, xi);
      for (double v : st.nn) worst = std::max(worst, v);
      if (worst <= 0.5) break;
      for (auto& row : xi) {
        int nonzero = 0;
        for (double v : row) nonzero += v > 0.0 ? 1 : 0;
        if (nonzero >= 2) {
          for (double& v : row) v *= 0.9;
        }
      }
    }
  }
  return OnticModel::from_responses(std::move(mu), std::move(xi));
}

}  // namespace seqctx
