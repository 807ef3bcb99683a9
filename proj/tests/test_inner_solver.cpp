#include "byzattack/inner_solver.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "byzattack/divergence.hpp"
#include "byzattack/errors.hpp"
#include "byzattack/validation.hpp"
#include "oracles.hpp"

namespace byzattack {
namespace {

NominalModel reference_model(double delta = 80.0) { return {Gaussian(2, 2.8), Gaussian(10, 3.1), delta}; }

const OuterPoint kReferencePsi{11.9985, 0.3385, 0.4069};

}  // namespace

TEST(InnerConstants, NominalMeans) {
  const InnerConstants c = inner_constants(reference_model(), {2, 10, 0.5});
  EXPECT_NEAR(c.c0, 2.8, 1e-12);
  EXPECT_NEAR(c.c1, 3.1, 1e-12);
  EXPECT_NEAR(c.c2, 128.0, 1e-12);
  EXPECT_NEAR(c.B, 2 * 80 + 5.9, 1e-12);
}

TEST(InnerConstants, MeanGapTermOnly) {
  for (double a : {0.1, 0.25, 0.9}) {
    const InnerConstants c = inner_constants(reference_model(), {2, 10, a});
    EXPECT_NEAR(c.c2, 64.0 / a, 1e-10);
  }
}

TEST(InnerConstants, ReferenceOptimumMeansNearlyCoincide) {
  EXPECT_LE(inner_constants(reference_model(), kReferencePsi).c2, 1e-5);
}

TEST(InnerConstants, RejectsInfeasible) {
  EXPECT_THROW(inner_constants(reference_model(), {102, 10, 0.5}), InfeasiblePoint);
  EXPECT_THROW(inner_constants(reference_model(), {2, 10, 0.0}), InfeasiblePoint);
  EXPECT_THROW(inner_constants(reference_model(), {2, 10, 1.0}), InfeasiblePoint);
  try {
    inner_constants(reference_model(), {102, 10, 0.5});
  } catch (const InfeasiblePoint& e) {
    EXPECT_NE(std::string(e.what()).find("delta"), std::string::npos);
  }
}

TEST(FeasibleInterval, ReferenceNominals) {
  const NominalModel m = reference_model();
  const auto [lo, hi] = feasible_gt1_interval(inner_constants(m, {2, 10, 0.5}), m);
  EXPECT_NEAR(hi, 1.0 / 6.2, 1e-12);
  EXPECT_NEAR(lo, 1.0 / 166.2, 1e-12);
}

TEST(FeasibleInterval, ExhaustedBudgetIsDegenerate) {
  const NominalModel m = reference_model();
  const OuterPoint psi{2 + std::sqrt(160.0), 10, 0.5};
  const InnerConstants c = inner_constants(m, psi);
  EXPECT_NEAR(c.B, 5.9, 1e-9);
  const auto [lo, hi] = feasible_gt1_interval(c, m);
  EXPECT_NEAR(lo, hi, 1e-12);
  EXPECT_NEAR(hi, 1.0 / (3.1 + c.c1), 1e-12);
}

TEST(SolveInner, ExhaustedBudgetForcesNominalVariances) {
  const NominalModel m = reference_model();
  const OuterPoint psi{2 + std::sqrt(160.0), 10, 0.5};
  const InnerSolution s = solve_inner(m, psi);
  EXPECT_NEAR(s.gamma0, 2.8, 1e-9);
  EXPECT_NEAR(s.gamma1, 3.1, 1e-9);
  const AttackScenario forced(m.h0, m.h1, Gaussian(psi.nu0, 2.8), Gaussian(psi.nu1, 3.1), psi.alpha);
  EXPECT_NEAR(s.f_star, kl_gaussian_approx(forced), 1e-9);
  EXPECT_NEAR(inner_oracle_grid(m, psi, 50), s.f_star, 1e-9);
}

TEST(SolveInner, ReferenceOptimum) {
  const NominalModel m = reference_model();
  const InnerSolution s = solve_inner(m, kReferencePsi);
  EXPECT_LE(s.f_star, 1e-4);
  EXPECT_LE(injection_energy(m, kReferencePsi, s.gamma0, s.gamma1), 80.0 * (1 + 1e-6));
  EXPECT_GE(s.gamma0, 2.8);
  EXPECT_GE(s.gamma1, 3.1);
  EXPECT_NEAR(inner_oracle_grid(m, kReferencePsi, 2000), s.f_star, 1e-3);
}

TEST(SolveInner, ReportsObjectiveOfReturnedPoint) {
  const NominalModel m = reference_model(30);
  const OuterPoint psi{6, 4, 0.3};
  const InnerSolution s = solve_inner(m, psi);
  const double direct = oracle::matched_kl(2, 2.8, 10, 3.1, psi.nu0, psi.nu1, psi.alpha, s.gamma0, s.gamma1);
  EXPECT_NEAR(s.f_star, direct, 1e-10);
}

TEST(SolveInner, MatchesIndependentBruteForce) {
  UniformSequence rng(SampleStream{404, 0});
  for (int i = 0; i < 40; ++i) {
    const NominalModel m = random_model(rng);
    const OuterPoint psi = random_feasible_psi(rng, m, rng.next(0.0, 0.95));
    const InnerSolution s = solve_inner(m, psi);
    const double brute = oracle::inner_brute_force(m.h0.mean(), m.h0.variance(), m.h1.mean(), m.h1.variance(),
                                                   m.delta, psi.nu0, psi.nu1, psi.alpha, 400, 400);
    EXPECT_LE(s.f_star, brute + 1e-9) << "instance " << i;
    EXPECT_NEAR(s.f_star, brute, 1e-3 * std::max(1.0, brute)) << "instance " << i;
  }
}

TEST(SolveInner, MatchesGridOracle) {
  UniformSequence rng(SampleStream{405, 0});
  for (int i = 0; i < 30; ++i) {
    const NominalModel m = random_model(rng);
    const OuterPoint psi = random_feasible_psi(rng, m, rng.next(0.0, 0.95));
    const double f = solve_inner(m, psi).f_star;
    const double grid = inner_oracle_grid(m, psi, 1000);
    EXPECT_LE(f, grid + 1e-9);
    EXPECT_LE(grid - f, 1e-3);
  }
}

TEST(SolveInner, ActiveSetAtNominalMeansLargeBudget) {
  // With nu = mu, H1's matched variance should grow to close the gap: the
  // energy budget ends up binding.
  const InnerSolution s = solve_inner(reference_model(), {2, 10, 0.5});
  EXPECT_TRUE(s.active_constraints.contains(ActiveConstraint::upper_line)) << s.active_constraints.to_string();
  EXPECT_NEAR(s.gamma0 + s.gamma1, 165.9, 1e-6);
}

TEST(Transform, RoundTrip) {
  UniformSequence rng(SampleStream{406, 0});
  for (int i = 0; i < 200; ++i) {
    const NominalModel m = random_model(rng);
    const OuterPoint psi = random_feasible_psi(rng, m, rng.next(0.0, 0.9));
    const auto [g0, g1] = random_feasible_gammas(rng, m, psi);
    const InnerConstants c = inner_constants(m, psi);
    const auto [b0, b1] = from_transformed(c, to_transformed(c, g0, g1));
    EXPECT_NEAR(b0, g0, 1e-12 * std::max(1.0, g0));
    EXPECT_NEAR(b1, g1, 1e-12 * std::max(1.0, g1));
    const double v = variance_objective(c, g0, g1);
    EXPECT_NEAR(transformed_objective(c, to_transformed(c, g0, g1)), v, 1e-10 * std::max(1.0, v));
    const double direct = oracle::matched_kl(m.h0.mean(), m.h0.variance(), m.h1.mean(), m.h1.variance(), psi.nu0,
                                             psi.nu1, psi.alpha, g0, g1);
    EXPECT_NEAR(v, direct, 1e-9 * std::max(1.0, direct));
  }
}

TEST(DefaultInnerSolver, IsSolveInner) {
  const InnerSolverFn fn = default_inner_solver();
  const InnerSolution a = fn(reference_model(), {5, 7, 0.3});
  const InnerSolution b = solve_inner(reference_model(), {5, 7, 0.3});
  EXPECT_EQ(a.f_star, b.f_star);
  EXPECT_EQ(a.gamma0, b.gamma0);
}

}  // namespace byzattack
