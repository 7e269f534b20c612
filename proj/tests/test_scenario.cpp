#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "seqctx/linalg.hpp"
#include "seqctx/scenario.hpp"

using namespace seqctx;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
// Squared overlap of next-nearest normalized pentagram vectors.
constexpr double kNextNearestOverlap2 = 0.3819660112501051;

}  // namespace

TEST_CASE("raw pentagram vectors") {
  const std::vector<Ket> raw = kcbs_vectors();
  REQUIRE(raw.size() == 5);

  const double croot = std::sqrt(std::cos(kPi / 5.0));
  CHECK(std::abs(raw[0][0] - Complex(1.0, 0.0)) <= 1e-15);
  CHECK(std::abs(raw[0][1]) <= 1e-15);
  CHECK(std::abs(raw[0][2] - Complex(croot, 0.0)) <= 1e-15);

  const double norm2 = 1.0 + std::cos(kPi / 5.0);
  for (const Ket& v : raw) {
    CHECK(std::abs(v.norm() * v.norm() - norm2) <= 1e-12);
  }
}

TEST_CASE("five-cycle scenario structure") {
  const CycleScenario sc = build_kcbs_scenario();
  REQUIRE(sc.n() == 5);
  CHECK(sc.max_adjacent_overlap() <= 1e-12);
  for (int i = 0; i < 5; ++i) {
    CHECK(sc.ket(i).is_normalized(1e-12));
    CHECK(sc.prob(i) == doctest::Approx(0.2).epsilon(1e-15));
    // Serialization canon: leading nonzero amplitude real and nonnegative.
    CHECK(std::abs(sc.ket(i)[0].imag()) <= 1e-15);
    CHECK(sc.ket(i)[0].real() >= 0.0);
  }
  CHECK(sc.next(4) == 0);

  const auto gram = sc.gram_abs2();
  for (int i = 0; i < 5; ++i) {
    CHECK(gram[i][i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(gram[i][(i + 1) % 5]) <= 1e-20);
    CHECK(std::abs(gram[i][(i + 2) % 5] - kNextNearestOverlap2) <= 1e-12);
    CHECK(std::abs(gram[i][(i + 3) % 5] - kNextNearestOverlap2) <= 1e-12);
    for (int j = 0; j < 5; ++j) CHECK(gram[i][j] == doctest::Approx(gram[j][i]).epsilon(1e-12));
  }
}

TEST_CASE("custom setting probabilities") {
  const std::vector<double> probs{0.3, 0.3, 0.2, 0.1, 0.1};
  const CycleScenario sc = build_kcbs_scenario(probs);
  for (int i = 0; i < 5; ++i) CHECK(sc.prob(i) == probs[static_cast<size_t>(i)]);

  CHECK_THROWS_AS(build_kcbs_scenario({0.3, 0.3, 0.2, 0.1, 0.2}), input_error);   // sums to 1.1
  CHECK_THROWS_AS(build_kcbs_scenario({0.5, 0.7, -0.2, 0.0, 0.0}), input_error);  // negative
  CHECK_THROWS_AS(build_kcbs_scenario({0.5, 0.5, 0.0, 0.0}), input_error);        // wrong length
}

TEST_CASE("scenario invariants are enforced") {
  const CycleScenario good = build_kcbs_scenario();
  std::vector<Ket> kets;
  for (int i = 0; i < 5; ++i) kets.push_back(good.ket(i));
  const std::vector<double> uniform(5, 0.2);

  // Duplicate neighbor: adjacent overlap 1.
  std::vector<Ket> dup = kets;
  dup[1] = dup[0];
  CHECK_THROWS_AS(CycleScenario::make(dup, uniform), input_error);
  CHECK_NOTHROW(CycleScenario::make_unchecked(dup, uniform));
  CHECK(CycleScenario::make_unchecked(dup, uniform).max_adjacent_overlap() ==
        doctest::Approx(1.0));

  // Unnormalized ket.
  std::vector<Ket> big = kets;
  big[2] = Ket({Complex(2.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0)});
  CHECK_THROWS_AS(CycleScenario::make(big, uniform), input_error);

  // Wrong dimension.
  std::vector<Ket> flat;
  for (int i = 0; i < 5; ++i) flat.push_back(Ket::basis(2, i % 2));
  CHECK_THROWS_AS(CycleScenario::make(flat, uniform), input_error);
}

TEST_CASE("n-cycle generalization reduces to the pentagram at n = 5") {
  const CycleScenario a = build_kcbs_scenario();
  const CycleScenario b = build_ncycle_scenario(5);
  const auto ga = a.gram_abs2();
  const auto gb = b.gram_abs2();
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      CHECK(std::abs(ga[i][j] - gb[i][j]) <= 1e-10);
    }
  }
}

TEST_CASE("larger odd cycles") {
  for (int n : {7, 9, 11}) {
    const CycleScenario sc = build_ncycle_scenario(n);
    REQUIRE(sc.n() == n);
    CHECK(sc.max_adjacent_overlap() <= 1e-10);
    for (int i = 0; i < n; ++i) {
      CHECK(sc.ket(i).is_normalized(1e-12));
      CHECK(sc.prob(i) == doctest::Approx(1.0 / n).epsilon(1e-15));
    }
    // Circulant symmetry of the skip overlap.
    const auto gram = sc.gram_abs2();
    const double skip = gram[0][2];
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(gram[i][(i + 2) % n] - skip) <= 1e-10);
    }
  }

  CHECK_THROWS_AS(build_ncycle_scenario(4), input_error);
  CHECK_THROWS_AS(build_ncycle_scenario(6), input_error);
  CHECK_THROWS_AS(build_ncycle_scenario(3), input_error);
  CHECK_THROWS_AS(build_ncycle_scenario(-5), input_error);
}

TEST_CASE("qubit z/x interpolation example") {
  const QubitZxExample ex = zx_example(0.3);
  CHECK(ex.s == 0.3);
  REQUIRE(ex.z_effects.size() == 2);
  REQUIRE(ex.x_effects.size() == 2);
  REQUIRE(ex.zx_effects.size() == 4);

  const SquareMatrix id = SquareMatrix::identity(2);
  CHECK((ex.z_effects[0].matrix() + ex.z_effects[1].matrix()).distance(id) <= 1e-14);
  CHECK((ex.x_effects[0].matrix() + ex.x_effects[1].matrix()).distance(id) <= 1e-14);
  SquareMatrix total(2);
  for (const HermitianOperator& e : ex.zx_effects) total = total + e.matrix();
  CHECK(total.distance(id) <= 1e-13);

  // First pair scales Z by s, second scales X by 1 - s.
  CHECK(ex.zx_effects[0].matrix().distance(ex.z_effects[0].matrix().scaled(0.3)) <= 1e-15);
  CHECK(ex.zx_effects[1].matrix().distance(ex.z_effects[1].matrix().scaled(0.3)) <= 1e-15);
  CHECK(ex.zx_effects[2].matrix().distance(ex.x_effects[0].matrix().scaled(0.7)) <= 1e-15);
  CHECK(ex.zx_effects[3].matrix().distance(ex.x_effects[1].matrix().scaled(0.7)) <= 1e-15);

  CHECK(zx_example(0.0).zx_effects[0].max_abs() == 0.0);
  CHECK(zx_example(1.0).zx_effects[2].max_abs() == 0.0);
  CHECK_THROWS_AS(zx_example(-0.1), input_error);
  CHECK_THROWS_AS(zx_example(1.1), input_error);
}
