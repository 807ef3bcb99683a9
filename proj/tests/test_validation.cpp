#include "byzattack/validation.hpp"

#include <gtest/gtest.h>

namespace byzattack {

TEST(Validation, DefaultBatteryPasses) {
  const ValidationReport r = run_validation(ValidationOptions{});
  for (const PropertyResult& p : r.properties) {
    EXPECT_TRUE(p.ok) << p.name << ": " << p.counterexample;
    EXPECT_EQ(p.passed, p.trials) << p.name;
  }
  EXPECT_TRUE(r.all_passed());
  for (const char* name : {"transform_round_trip", "objective_equivalence", "convexity_witness", "solver_feasibility",
                           "solver_vs_grid_oracle", "bound_ordering", "quadrature_nonnegative", "mc_vs_quadrature",
                           "continuity"})
    EXPECT_NE(r.find(name), nullptr) << name;
}

TEST(Validation, VerdictsStableAcrossSeeds) {
  for (std::uint64_t seed : {2u, 3u}) {
    ValidationOptions o;
    o.seed = seed;
    o.solver_trials = 20;
    EXPECT_TRUE(run_validation(o).all_passed()) << "seed " << seed;
  }
}

TEST(Validation, CorruptedSolverIsCaught) {
  ValidationOptions o;
  o.solver_trials = 20;
  // Returns the feasible corner (Sigma0, Sigma1) instead of the optimum.
  o.solver = [](const NominalModel& m, const OuterPoint& psi) {
    const InnerConstants c = inner_constants(m, psi);
    InnerSolution s;
    s.gamma0 = m.h0.variance();
    s.gamma1 = m.h1.variance();
    s.f_star = variance_objective(c, s.gamma0, s.gamma1);
    s.transformed = to_transformed(c, s.gamma0, s.gamma1);
    return s;
  };
  const ValidationReport r = run_validation(o);
  EXPECT_FALSE(r.all_passed());
  const PropertyResult* p = r.find("solver_vs_grid_oracle");
  ASSERT_NE(p, nullptr);
  EXPECT_FALSE(p->ok);
  EXPECT_FALSE(p->counterexample.empty());
}

TEST(Validation, GeneratorsAreDeterministic) {
  UniformSequence a(SampleStream{3, 9}), b(SampleStream{3, 9});
  const NominalModel ma = random_model(a), mb = random_model(b);
  EXPECT_EQ(ma.h0, mb.h0);
  EXPECT_EQ(ma.delta, mb.delta);
  EXPECT_EQ(random_feasible_psi(a, ma, 0.5), random_feasible_psi(b, mb, 0.5));
}

}  // namespace byzattack
