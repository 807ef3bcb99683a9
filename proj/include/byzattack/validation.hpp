#pragma once

// Randomized property batteries that cross-check every solver against an
// independent route: the variable transform against its inverse, the inner
// solver against brute-force grid search, Monte Carlo against quadrature, and
// the chain-rule bound against quadrature.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "byzattack/divergence.hpp"
#include "byzattack/inner_solver.hpp"
#include "byzattack/model.hpp"
#include "byzattack/random.hpp"

namespace byzattack {

struct ValidationOptions {
  std::uint64_t seed = 1;
  std::size_t transform_trials = 1000;
  std::size_t solver_trials = 50;
  std::size_t oracle_resolution = 1000;
  std::size_t bound_trials = 100;
  std::size_t mc_trials = 20;
  std::size_t mc_samples = 20000;
  std::size_t continuity_trials = 100;
  /// Solver under test; replaceable for fault injection.
  InnerSolverFn solver = default_inner_solver();
};

struct PropertyResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t passed = 0;
  bool ok = true;
  /// First failing instance, human-readable; empty when ok.
  std::string counterexample;
};

struct ValidationReport {
  std::vector<PropertyResult> properties;

  bool all_passed() const;
  const PropertyResult* find(const std::string& name) const;
};

/// Generators for randomized instances. All draws come from the sequence, so
/// a (seed, stream) pair pins the instance set.
NominalModel random_model(UniformSequence& rng);
/// Feasible psi with alpha in [0.05, 0.95]; budget_fraction in [0, 1] is the
/// share of delta consumed by the mean shifts.
OuterPoint random_feasible_psi(UniformSequence& rng, const NominalModel& model,
                               double budget_fraction);
/// Feasible (Gamma0, Gamma1) for a feasible psi.
std::pair<double, double> random_feasible_gammas(UniformSequence& rng, const NominalModel& model,
                                                 const OuterPoint& psi);
AttackScenario random_scenario(UniformSequence& rng);

PropertyResult check_transform_round_trip(const ValidationOptions& opt);
PropertyResult check_objective_equivalence(const ValidationOptions& opt);
PropertyResult check_convexity_witness(const ValidationOptions& opt);
PropertyResult check_solver_feasibility(const ValidationOptions& opt);
PropertyResult check_solver_vs_grid_oracle(const ValidationOptions& opt);
PropertyResult check_bound_ordering(const ValidationOptions& opt);
PropertyResult check_quadrature_nonnegative(const ValidationOptions& opt);
PropertyResult check_mc_vs_quadrature(const ValidationOptions& opt);
PropertyResult check_continuity(const ValidationOptions& opt);

ValidationReport run_validation(const ValidationOptions& opt);

}  // namespace byzattack
