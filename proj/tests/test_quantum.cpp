#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "seqctx/linalg.hpp"
#include "seqctx/measurement.hpp"
#include "seqctx/quantum.hpp"
#include "seqctx/scenario.hpp"

using namespace seqctx;
using testutil::random_full_rank_state;

namespace {

// Frozen values for the uniform five-cycle.
constexpr double kExactValue = 3.5278640450004204;          // 2 (4 - sqrt 5)
constexpr double kSkipConditional = 0.15278640450004205;    // 0.4 |<v_i|v_{i+2}>|^2
constexpr double kCompletionFirst = 0.11777087639996636;    // p(E_i | first = K), state I/3
constexpr double kCompletionRepeat = 0.4111456180001682;    // p(K | first = K), state I/3

}  // namespace

TEST_CASE("density states") {
  const DensityState mixed = DensityState::maximally_mixed(3);
  CHECK(mixed.matrix().trace() == doctest::Approx(1.0).epsilon(1e-15));

  SplitMix64 rng(7);
  const Ket v = testutil::random_ket(rng, 3);
  const DensityState pure = DensityState::pure(v);
  CHECK(pure.matrix().matrix().distance(projector(v).matrix()) <= 1e-15);

  CHECK_THROWS_AS(DensityState::from_operator(HermitianOperator::identity(3).scaled(0.3)),
                  input_error);  // trace 0.9
  SquareMatrix neg(3);
  neg.at(0, 0) = 1.5;
  neg.at(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityState::from_operator(HermitianOperator::from_matrix(neg)),
                  input_error);  // not PSD
}

TEST_CASE("outcome probabilities") {
  const CycleScenario sc = build_kcbs_scenario();
  const LabeledPovm device = build_config1(sc);
  const DensityState mixed = DensityState::maximally_mixed(3);

  CHECK(outcome_probability(mixed, device.find("E0")) ==
        doctest::Approx(0.4 / 3.0).epsilon(1e-14));
  CHECK(outcome_probability(mixed, HermitianOperator::identity(3)) == 1.0);
  CHECK(outcome_probability(mixed, HermitianOperator::zero(3)) == 0.0);

  double total = 0.0;
  for (const LabeledEffect& e : device.effects()) total += outcome_probability(mixed, e.op);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("lueders update collapses scaled rank-1 effects to the ray") {
  const CycleScenario sc = build_kcbs_scenario();
  const LabeledPovm device = build_config1(sc);
  const HermitianOperator target = projector(sc.ket(0));

  const DensityState from_mixed = luders_update(DensityState::maximally_mixed(3),
                                                device.find("E0"));
  CHECK(from_mixed.matrix().matrix().distance(target.matrix()) <= 1e-12);

  SplitMix64 rng(17);
  for (int t = 0; t < 10; ++t) {
    const DensityState rho = random_full_rank_state(rng, 3);
    const DensityState post = luders_update(rho, device.find("E0"));
    CHECK(post.matrix().matrix().distance(target.matrix()) <= 1e-12);
  }
}

TEST_CASE("lueders update keeps rank for the completion effect") {
  const CycleScenario sc = build_kcbs_scenario();
  const HermitianOperator k = build_config1(sc).find("K");
  const DensityState post = luders_update(DensityState::maximally_mixed(3), k);
  // K is full rank, so the post state is too: no projector can match it.
  CHECK(min_eigenvalue(post.matrix()) > 1e-3);
  CHECK(post.matrix().trace() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lueders update rejects zero-probability outcomes") {
  const CycleScenario sc = build_kcbs_scenario();
  const LabeledPovm device = build_config1(sc);
  const DensityState pinned = DensityState::pure(sc.ket(0));
  // E1 is supported on the neighbor ray, orthogonal to ket 0.
  CHECK_THROWS_AS(luders_update(pinned, device.find("E1")), std::invalid_argument);
}

TEST_CASE("sequential conditionals on the uniform five-cycle") {
  const CycleScenario sc = build_kcbs_scenario();
  for (int j = 0; j < 5; ++j) {
    CHECK(std::abs(sequential_conditional(sc, j, j) - 0.4) <= 1e-12);
    CHECK(sequential_conditional(sc, (j + 1) % 5, j) <= 1e-15);
    CHECK(sequential_conditional(sc, (j + 4) % 5, j) <= 1e-15);
    CHECK(std::abs(sequential_conditional(sc, (j + 2) % 5, j) - kSkipConditional) <= 1e-12);
    CHECK(std::abs(sequential_conditional(sc, (j + 3) % 5, j) - kSkipConditional) <= 1e-12);
  }
}

TEST_CASE("contextuality value matches the closed form") {
  const CycleScenario sc = build_kcbs_scenario();
  const double c = contextuality_value(sc);
  CHECK(std::abs(c - closed_form_value()) <= 1e-12);
  CHECK(std::abs(c - kExactValue) <= 1e-12);
  CHECK(std::abs(closed_form_value() - 2.0 * (4.0 - std::sqrt(5.0))) == 0.0);
}

TEST_CASE("contextuality value equals the literal double sum for any weights") {
  const std::vector<double> probs{0.3, 0.3, 0.2, 0.1, 0.1};
  const CycleScenario sc = build_kcbs_scenario(probs);
  const auto gram = sc.gram_abs2();
  double expected = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double w = probs[static_cast<size_t>(i)] + probs[static_cast<size_t>((i + 1) % 5)];
    for (int j = 0; j < 5; ++j) expected += w * gram[i][j];
  }
  CHECK(std::abs(contextuality_value(sc) - expected) <= 1e-12);
}

TEST_CASE("seven-cycle value against an operator-level oracle") {
  const CycleScenario sc = build_ncycle_scenario(7);
  const LabeledPovm device = build_config1(sc);

  // Independent path: explicit collapse-then-measure with operators only.
  double oracle = 0.0;
  for (int j = 0; j < 7; ++j) {
    const HermitianOperator post = projector(sc.ket(j));
    for (int i = 0; i < 7; ++i) {
      oracle += real_trace_product(device.find("E" + std::to_string(i)), post);
    }
  }
  const double c = contextuality_value(sc);
  CHECK(std::abs(c - oracle) <= 1e-10);
  CHECK(std::abs(c - 5.0819151705052965) <= 1e-9);  // frozen
  CHECK(c > 5.0);  // beats the odd-cycle noncontextual ceiling n - 2 at n = 7
}

TEST_CASE("conditional table from the maximally mixed state") {
  const CycleScenario sc = build_kcbs_scenario();
  const ConditionalTable table = conditional_table(sc, DensityState::maximally_mixed(3));

  REQUIRE(table.labels.size() == 6);
  CHECK(table.labels[5] == "K");
  for (int j = 0; j < 5; ++j) {
    CHECK(std::abs(table.first_probs[static_cast<size_t>(j)] - 2.0 / 15.0) <= 1e-12);
  }
  CHECK(std::abs(table.first_probs[5] - 1.0 / 3.0) <= 1e-12);

  for (int j = 0; j < 5; ++j) {
    const auto& row = table.rows[static_cast<size_t>(j)];
    CHECK(std::abs(row[static_cast<size_t>(j)] - 0.4) <= 1e-12);
    CHECK(row[static_cast<size_t>((j + 1) % 5)] <= 1e-15);
    CHECK(row[static_cast<size_t>((j + 4) % 5)] <= 1e-15);
    CHECK(std::abs(row[static_cast<size_t>((j + 2) % 5)] - kSkipConditional) <= 1e-12);
    double sum = 0.0;
    for (double v : row) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-10);
  }

  // Completion-first row, exact closed-form values.
  const auto& krow = table.rows[5];
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(krow[static_cast<size_t>(i)] - kCompletionFirst) <= 1e-12);
  }
  CHECK(std::abs(krow[5] - kCompletionRepeat) <= 1e-12);
}

TEST_CASE("rows for unreachable first outcomes are marked") {
  const CycleScenario sc = build_kcbs_scenario();
  const ConditionalTable table = conditional_table(sc, DensityState::pure(sc.ket(0)));
  // Neighbors of ket 0 have zero first-outcome probability.
  CHECK(table.first_probs[1] <= 1e-15);
  CHECK(table.rows[1][0] == -1.0);
  CHECK(table.rows[4][0] == -1.0);
  // Non-adjacent rows stay defined and identical to the mixed-state rows.
  CHECK(std::abs(table.rows[2][2] - 0.4) <= 1e-12);
}

TEST_CASE("direct rows of the conditional table are state independent") {
  const CycleScenario sc = build_kcbs_scenario();
  const ConditionalTable base = conditional_table(sc, DensityState::maximally_mixed(3));

  SplitMix64 rng(29);
  for (int t = 0; t < 10; ++t) {
    const ConditionalTable other = conditional_table(sc, random_full_rank_state(rng, 3));
    for (int j = 0; j < 5; ++j) {
      for (int i = 0; i < 6; ++i) {
        CHECK(std::abs(other.rows[static_cast<size_t>(j)][static_cast<size_t>(i)] -
                       base.rows[static_cast<size_t>(j)][static_cast<size_t>(i)]) <= 1e-10);
      }
    }
  }

  // The completion-first row is genuinely state dependent.
  const ConditionalTable pinned = conditional_table(sc, DensityState::pure(sc.ket(0)));
  double max_gap = 0.0;
  for (int i = 0; i < 6; ++i) {
    max_gap = std::max(max_gap, std::abs(pinned.rows[5][static_cast<size_t>(i)] -
                                         base.rows[5][static_cast<size_t>(i)]));
  }
  CHECK(max_gap > 1e-3);
}
