#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qsyn/riccati.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace qsyn {
namespace {

using testing::diag_near;
using testing::opo_params;

TEST(SolveCare, ScalarExample) {
  const RiccatiProblem p(Matrix{{0.0}}, Matrix{{1.0}}, Matrix{{1.0}});
  const auto sol = solve_care(p);
  EXPECT_NEAR(sol.X(0, 0), 1.0, 1e-12);
  ASSERT_EQ(sol.closed_loop_eigs.size(), 1u);
  EXPECT_NEAR(sol.closed_loop_eigs[0].real(), -1.0, 1e-12);
}

TEST(SolveCare, ImaginaryAxisMeansNoSolution) {
  // x^2 = -1 has no real root; the Hamiltonian has eigenvalues +-i.
  const RiccatiProblem p(Matrix{{0.0}}, Matrix{{1.0}}, Matrix{{-1.0}});
  EXPECT_THROW(solve_care(p), NoStabilizingSolution);
}

TEST(SolveCare, UncontrollableUnstableModeHasNoSolution) {
  // Unstable mode that B cannot reach: no stabilizing X exists.
  const RiccatiProblem p(Matrix::diagonal({1.0, -1.0}), Matrix::diagonal({0.0, 1.0}),
                         Matrix::diagonal({0.0, 1.0}));
  EXPECT_THROW(solve_care(p), NoStabilizingSolution);
}

TEST(RiccatiProblem, SymmetrizesAndChecksShapes) {
  const RiccatiProblem p(Matrix::identity(2), Matrix{{1.0, 2.0}, {0.0, 1.0}}, Matrix::identity(2));
  EXPECT_EQ(asymmetry(p.bhat()), 0.0);
  EXPECT_THROW(RiccatiProblem(Matrix::identity(2), Matrix::identity(3), Matrix::identity(2)),
               DimensionError);
}

TEST(AssemblePair, PassiveScalars) {
  const auto plant = build_plant(opo_params(), Decomposition::kPassive);
  const auto [primal, dual] = assemble_pair(plant, 0.05, 1.0);
  // Ahat = A + kappa2, Bhat = kappa2 - eps chi^2 - kappa1/gamma^2, Chat = 1/eps.
  EXPECT_TRUE(diag_near(primal.ahat(), 0.41265, 0.41265, 1e-12));
  EXPECT_TRUE(diag_near(primal.bhat(), 0.38469, 0.38469, 1e-5));
  EXPECT_TRUE(diag_near(primal.chat(), 1.0, 1.0, 1e-12));
  EXPECT_EQ(primal.side(), RiccatiSide::kPrimal);
  EXPECT_EQ(dual.side(), RiccatiSide::kDual);
}

TEST(AssemblePair, ActiveDual) {
  const auto plant = build_plant(opo_params(), Decomposition::kActive);
  const auto [primal, dual] = assemble_pair(plant, 0.05, 1.0);
  EXPECT_TRUE(diag_near(dual.chat(), 0.006857, 0.006857, 2e-6));
  EXPECT_TRUE(diag_near(dual.bhat(), -1.8264, -1.8264, 1e-5));
}

TEST(AssemblePair, NoUncertaintyIsEpsilonIndependent) {
  const auto plant = build_plant(opo_params(), Decomposition::kNominal);
  const auto a = assemble_pair(plant, 0.05, 1.0);
  const auto b = assemble_pair(plant, 0.05, 1000.0);
  EXPECT_EQ(a.first.bhat(), b.first.bhat());
  EXPECT_EQ(a.first.chat(), b.first.chat());
  EXPECT_EQ(a.second.bhat(), b.second.bhat());
  EXPECT_EQ(a.second.chat(), b.second.chat());
}

TEST(AssemblePair, RejectsBadScalars) {
  const auto plant = build_plant(opo_params(), Decomposition::kPassive);
  EXPECT_THROW(assemble_pair(plant, 0.0, 1.0), ValidationError);
  EXPECT_THROW(assemble_pair(plant, 0.05, -1.0), ValidationError);
}

TEST(SolveCare, OpoInstancesMatchScalarOracle) {
  for (auto d : {Decomposition::kPassive, Decomposition::kActive, Decomposition::kNominal}) {
    const auto plant = build_plant(opo_params(), d);
    const auto [primal, dual] = assemble_pair(plant, 0.05, 1.0);
    for (const auto* prob : {&primal, &dual}) {
      const auto sol = solve_care(*prob);
      for (std::size_t i = 0; i < 2; ++i) {
        const double want = oracle::scalar_care_root(prob->ahat()(i, i), prob->bhat()(i, i),
                                                     prob->chat()(i, i));
        EXPECT_NEAR(sol.X(i, i), want, 1e-8) << to_string(d) << " axis " << i;
      }
      EXPECT_EQ(sol.X(0, 1), 0.0);
      EXPECT_LE(asymmetry(sol.X), 1e-10);
    }
  }
}

TEST(SolveCare, ReferenceValues) {
  {
    const auto [primal, dual] = assemble_pair(build_plant(opo_params(), Decomposition::kPassive),
                                              0.05, 1.0);
    EXPECT_TRUE(diag_near(solve_care(primal).X, 3.0092, 3.0092, 1e-3));
    EXPECT_TRUE(diag_near(solve_care(dual).X, 0.0021, 0.0021, 1e-3));
  }
  {
    const auto [primal, dual] = assemble_pair(build_plant(opo_params(), Decomposition::kActive),
                                              0.05, 1.0);
    EXPECT_TRUE(diag_near(solve_care(primal).X, 3.2125, 2.8733, 2e-3));
    EXPECT_TRUE(diag_near(solve_care(dual).X, 0.0094, 0.0077, 2e-3));
  }
}

TEST(SolveCare, RandomProblemsSatisfyInvariants) {
  std::mt19937_64 rng(31);
  int solved = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const Matrix a = oracle::random_matrix(rng, n, n);
    const Matrix bf = oracle::random_matrix(rng, n, n);
    const Matrix cf = oracle::random_matrix(rng, n, n);
    const RiccatiProblem p(a, bf * bf.transpose(), cf.transpose() * cf);
    RiccatiSolution sol;
    try {
      sol = solve_care(p);
    } catch (const NoStabilizingSolution&) {
      continue;
    }
    ++solved;
    const double xn = sol.X.max_abs();
    EXPECT_LE(sol.residual_norm, 1e-8 * (1 + xn) * (1 + xn) * p.coefficient_scale());
    EXPECT_LE(p.residual(sol.X).max_abs(), 1e-8 * (1 + xn) * (1 + xn) * p.coefficient_scale());
    EXPECT_LE(asymmetry(sol.X), 1e-10);
    for (auto ev : sol.closed_loop_eigs) EXPECT_LT(ev.real(), 0.0);
  }
  // Positive definite B and C make almost every draw solvable.
  EXPECT_GT(solved, 190);
}

TEST(ExistenceCheck, ReferencePassive) {
  const auto r = existence_check(opo_params(), Decomposition::kPassive, 0.05, 1.0);
  EXPECT_EQ(r.branch, ExistenceBranch::kPrimal);
  EXPECT_NEAR(r.branch_value, 0.3864, 1e-12);
  ASSERT_FALSE(r.inequalities.empty());
  EXPECT_NEAR(r.inequalities[0].value, 0.3864 - 0.0414 * 0.0414, 1e-12);
  EXPECT_TRUE(r.satisfied());
  EXPECT_NE(r.describe().find("kappa2 - kappa1/gamma^2"), std::string::npos);
}

TEST(ExistenceCheck, SmallGammaFlipsBranch) {
  const auto r = existence_check(opo_params(), Decomposition::kPassive, 0.001, 1.0);
  EXPECT_EQ(r.branch, ExistenceBranch::kDual);
  EXPECT_FALSE(r.satisfied());
}

TEST(ExistenceCheck, PrimalSatisfiedImpliesSolvable) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 4000 && checked < 200; ++trial) {
    OpoParams p;
    p.kappa1 = 0.0005 + 0.01 * u(rng);
    p.kappa2 = 0.1 + 2.0 * u(rng);
    p.chi = 0.2 * u(rng);
    const double gamma = 0.02 + 0.2 * u(rng);
    const double eps = std::exp(std::log(1e-3) + u(rng) * std::log(1e6));
    for (auto d : {Decomposition::kPassive, Decomposition::kActive}) {
      const auto r = existence_check(p, d, gamma, eps);
      if (r.branch != ExistenceBranch::kPrimal || !r.satisfied()) continue;
      ++checked;
      const auto [primal, dual] = assemble_pair(build_plant(p, d), gamma, eps);
      EXPECT_NO_THROW(solve_care(primal));
    }
  }
  EXPECT_GE(checked, 200);
}

TEST(ExistenceCheck, ViolatedPrimalConditionIsReported) {
  // epsilon past the closed-form upper limit makes the primal Bhat negative.
  const auto p = opo_params();
  const auto r = existence_check(p, Decomposition::kPassive, 0.05, 300.0);
  EXPECT_FALSE(r.inequalities[0].satisfied);
  EXPECT_FALSE(r.satisfied());
}

TEST(EpsilonInterval, ReferenceUpperBound) {
  const auto p = opo_params();
  const auto row = epsilon_interval(p, Decomposition::kPassive, 0.05, 1.0);
  const double want = (p.kappa2 - p.kappa1 / 0.0025) / (p.chi * p.chi);
  EXPECT_NEAR(want, 225.4, 0.1);
  EXPECT_NEAR(row.eps_upper, want, 1e-9 * want);
  EXPECT_EQ(row.eps_lower, 0.0);
  EXPECT_TRUE(row.feasible);
  EXPECT_NEAR(eps_upper_by_bisection(p, Decomposition::kPassive, 0.05, 1.0), want, 1e-6);
}

TEST(EpsilonInterval, BoundaryGammaIsInfeasible) {
  const auto p = opo_params();
  const double g = std::sqrt(p.kappa1 / p.kappa2);
  const auto row = epsilon_interval(p, Decomposition::kPassive, g * (1 + 1e-9), 1.0);
  EXPECT_LT(row.eps_upper, 1e-3);
  const auto below = epsilon_interval(p, Decomposition::kPassive, 0.03, 1.0);
  EXPECT_TRUE(std::isinf(below.eps_upper) || !below.feasible);
}

TEST(EpsilonInterval, DoublingRhoQuartersUpperBound) {
  const auto p = opo_params();
  for (double g : {0.04, 0.05, 0.08}) {
    const double u1 = epsilon_interval(p, Decomposition::kPassive, g, 1.0).eps_upper;
    const double u2 = epsilon_interval(p, Decomposition::kPassive, g, 2.0).eps_upper;
    EXPECT_NEAR(u2, u1 / 4.0, 1e-9 * u1);
  }
}

TEST(EpsilonInterval, AgreesWithDirectEvaluation) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto d = trial % 2 ? Decomposition::kActive : Decomposition::kPassive;
    const double gamma = 0.01 + 0.2 * u(rng);
    const double rho = 3.0 * u(rng);
    const double eps = std::exp(std::log(1e-4) + u(rng) * std::log(1e8));
    const auto row = epsilon_interval(opo_params(), d, gamma, rho);
    const bool inside = row.feasible && eps > row.eps_lower && eps < row.eps_upper;
    EXPECT_EQ(inside, existence_check(opo_params(), d, gamma, eps, rho).satisfied())
        << "gamma " << gamma << " rho " << rho << " eps " << eps;
  }
}

TEST(EpsilonInterval, UpperBoundMatchesBisection) {
  for (auto d : {Decomposition::kPassive, Decomposition::kActive}) {
    for (double gamma : {0.04, 0.05, 0.1}) {
      for (double rho : {0.5, 1.0, 2.0}) {
        const auto row = epsilon_interval(opo_params(), d, gamma, rho);
        ASSERT_TRUE(row.feasible);
        EXPECT_NEAR(eps_upper_by_bisection(opo_params(), d, gamma, rho), row.eps_upper,
                    1e-6 * row.eps_upper);
      }
    }
  }
}

TEST(EpsilonFeasibility, OrderAndMonotonicity) {
  const auto p = opo_params();
  const std::vector<double> gammas{0.04, 0.05, 0.06};
  const std::vector<double> rhos{0.8, 1.0, 1.2};
  const auto rows = epsilon_feasibility(p, Decomposition::kPassive, gammas, rhos, 3);
  ASSERT_EQ(rows.size(), 9u);
  for (std::size_t gi = 0; gi < 3; ++gi) {
    for (std::size_t ri = 0; ri < 3; ++ri) {
      EXPECT_EQ(rows[gi * 3 + ri].gamma, gammas[gi]);
      EXPECT_EQ(rows[gi * 3 + ri].rho, rhos[ri]);
    }
    EXPECT_GT(rows[gi * 3].eps_upper, rows[gi * 3 + 1].eps_upper);
    EXPECT_GT(rows[gi * 3 + 1].eps_upper, rows[gi * 3 + 2].eps_upper);
  }
  const auto serial = epsilon_feasibility(p, Decomposition::kPassive, gammas, rhos, 1);
  for (std::size_t k = 0; k < rows.size(); ++k) EXPECT_EQ(rows[k].eps_upper, serial[k].eps_upper);
  EXPECT_THROW(epsilon_feasibility(p, Decomposition::kPassive, gammas, {}), ValidationError);
  EXPECT_THROW(epsilon_feasibility(p, Decomposition::kPassive, {0.0}, rhos), ValidationError);
}

}  // namespace
}  // namespace qsyn
