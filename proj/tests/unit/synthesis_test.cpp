#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qsyn/hinf.hpp"
#include "qsyn/synthesis.hpp"
#include "support/fixtures.hpp"

namespace qsyn {
namespace {

using testing::diag_near;
using testing::opo_params;
using testing::with_range;
constexpr double kPi = std::numbers::pi;

TEST(Synthesize, PassiveReferenceController) {
  const auto c = synthesize(build_plant(opo_params(), Decomposition::kPassive), 0.05, 1.0);
  EXPECT_TRUE(diag_near(c.Ac, -2.0763, -2.0763, 1e-3));
  EXPECT_TRUE(diag_near(c.Bc, -0.0334, -0.0334, 1e-3));
  EXPECT_TRUE(diag_near(c.Cc, -1.8265, -1.8265, 1e-3));
  EXPECT_NEAR(c.coupling, 3.0092 * 0.0021, 1e-4);
  EXPECT_EQ(c.kind, ControllerKind::kRobustPassive);
  EXPECT_EQ(c.rho, 1.0);
  EXPECT_EQ(c.gamma, 0.05);
  EXPECT_EQ(c.epsilon, 1.0);
}

TEST(Synthesize, ActiveReferenceController) {
  const auto c = synthesize(build_plant(opo_params(), Decomposition::kActive), 0.05, 1.0);
  EXPECT_TRUE(diag_near(c.Ac, -2.2219, -2.0109, 2e-3));
  EXPECT_TRUE(diag_near(c.Bc, -0.0342, -0.0339, 2e-3));
  EXPECT_TRUE(diag_near(c.Cc, -2.0113, -1.7030, 2e-3));
  EXPECT_NEAR(c.coupling, std::max(3.2125 * 0.0094, 2.8733 * 0.0077), 1e-3);
  EXPECT_EQ(c.kind, ControllerKind::kRobustActive);
}

TEST(Synthesize, DiagonalPlantsGiveDiagonalControllers) {
  for (auto d : {Decomposition::kPassive, Decomposition::kActive}) {
    const auto c = synthesize(build_plant(opo_params(), d), 0.05, 1.0);
    for (const Matrix* m : {&c.Ac, &c.Bc, &c.Cc, &c.X.X, &c.Y.X}) EXPECT_TRUE(is_diagonal(*m));
  }
}

TEST(Synthesize, PassiveIgnoresPhaseRangeActiveDoesNot) {
  const auto narrow = with_range(opo_params(), -kPi / 4, kPi / 4);
  const auto pf = synthesize(build_plant(opo_params(), Decomposition::kPassive), 0.05, 1.0);
  const auto pn = synthesize(build_plant(narrow, Decomposition::kPassive), 0.05, 1.0);
  EXPECT_LE((pf.Ac - pn.Ac).max_abs(), 1e-12);
  EXPECT_LE((pf.Bc - pn.Bc).max_abs(), 1e-12);
  EXPECT_LE((pf.Cc - pn.Cc).max_abs(), 1e-12);
  const auto af = synthesize(build_plant(opo_params(), Decomposition::kActive), 0.05, 1.0);
  const auto an = synthesize(build_plant(narrow, Decomposition::kActive), 0.05, 1.0);
  EXPECT_GT((af.Ac - an.Ac).max_abs(), 1e-6);
}

TEST(Synthesize, InfeasibleGamma) {
  EXPECT_THROW(synthesize(build_plant(opo_params(), Decomposition::kPassive), 0.001, 1.0),
               NoStabilizingSolution);
}

TEST(Synthesize, CouplingFailureCarriesRadius) {
  // Open-loop unstable plant with weak actuation and sensing: both Riccati
  // equations are solvable but the coupling condition fails.
  UncertainPlant plant = build_plant(opo_params(), Decomposition::kNominal);
  plant.A = 0.5 * Matrix::identity(2);
  plant.B1 = plant.C1 = 0.5 * Matrix::identity(2);
  plant.B2 = plant.C2 = 0.5 * Matrix::identity(2);
  try {
    synthesize_nominal(plant, 3.0);
    FAIL() << "expected CouplingFailure";
  } catch (const CouplingFailure& e) {
    EXPECT_NEAR(e.radius(), 5.0625, 1e-6);
  }
}

TEST(SynthesizeNominal, EpsilonIndependentAndStabilizing) {
  const auto plant = build_plant(opo_params(), Decomposition::kNominal);
  const auto n = synthesize_nominal(plant, 0.05);
  EXPECT_EQ(n.kind, ControllerKind::kNominal);
  EXPECT_EQ(n.rho, 0.0);
  for (double eps : {0.01, 1.0, 500.0}) {
    const auto s = synthesize(plant, 0.05, eps);
    EXPECT_LE((s.Ac - n.Ac).max_abs(), 1e-12);
    EXPECT_LE((s.Bc - n.Bc).max_abs(), 1e-12);
    EXPECT_LE((s.Cc - n.Cc).max_abs(), 1e-12);
  }
  const double norm = hinf_norm(close_loop(plant, n, 0.0, 0.0));
  EXPECT_LT(norm, 0.05);
}

TEST(SynthesizeNominal, LargeGammaLeavesSlack) {
  const auto plant = build_plant(opo_params(), Decomposition::kNominal);
  const auto c = synthesize_nominal(plant, 1e3);
  EXPECT_LT(hinf_norm(close_loop(plant, c, 0.0, 0.0)), 1e-2 * 1e3);
}

TEST(SynthesizeNominal, RejectsUncertainPlant) {
  EXPECT_THROW(synthesize_nominal(build_plant(opo_params(), Decomposition::kPassive), 0.05),
               ValidationError);
}

TEST(CouplingRadius, Values) {
  RiccatiSolution x, y;
  x.X = Matrix::zero(2, 2);
  y.X = Matrix::identity(2);
  EXPECT_EQ(coupling_radius(x, y), 0.0);
  x.X = 3.0092 * Matrix::identity(2);
  y.X = 0.0021 * Matrix::identity(2);
  EXPECT_NEAR(coupling_radius(x, y), 0.0063, 1e-4);
  x.X = Matrix::diagonal({3.2125, 2.8733});
  y.X = Matrix::diagonal({0.0094, 0.0077});
  EXPECT_NEAR(coupling_radius(x, y), 0.0302, 1e-4);
}

TEST(ControllerKind, NamesRoundTrip) {
  for (auto k : {ControllerKind::kRobustPassive, ControllerKind::kRobustActive,
                 ControllerKind::kNominal}) {
    EXPECT_EQ(parse_controller_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_controller_kind("lqg"), ValidationError);
}

}  // namespace
}  // namespace qsyn
