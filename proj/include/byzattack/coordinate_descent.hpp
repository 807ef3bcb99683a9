#pragma once

// Derivative-free coordinate descent over psi = (nu0, nu1, alpha) on the
// optimal-value function f*(psi) returned by the inner solver.
//
// Each pass k probes nu0 with step a_k, then nu1 with b_k, then alpha with
// c_k. A probe compares f* at psi - step and psi + step along one coordinate
// (minus wins ties), moves to the winner, and keeps stepping in that
// direction while f* strictly descends.

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "byzattack/inner_solver.hpp"
#include "byzattack/model.hpp"

namespace byzattack {

/// step(k) = initial * decay^k, unless explicit steps are given (then
/// explicit_steps[k-1], with the last entry repeated).
struct StepSchedule {
  double initial = 0.5;
  double decay = 0.99;
  std::vector<double> explicit_steps;

  double at(std::size_t k) const;
};

struct AlphaBounds {
  double min = 0.01;
  double max = 0.99;
};

enum class Coordinate { nu0, nu1, alpha };

struct SolverConfig {
  std::size_t max_iters = 200;
  StepSchedule step_nu0{0.5, 0.99, {}};
  StepSchedule step_nu1{0.5, 0.99, {}};
  StepSchedule step_alpha{0.02, 0.99, {}};
  /// Unset: default_init().
  std::optional<OuterPoint> init;
  double convergence_tol = 1e-8;
  AlphaBounds alpha_bounds;
  /// When false, alpha stays at its initial value (used by alpha_sweep).
  bool optimize_alpha = true;
};

/// Throws InvalidArgument naming the offending field.
void validate(const SolverConfig& cfg);

enum class StopReason { converged, max_iters };
std::string_view to_string(StopReason r);

struct TraceEntry {
  std::size_t k = 0;  // 0 is the initial point
  OuterPoint psi;
  double f_star = 0.0;
  InnerSolution inner;
};

struct OptimizationTrace {
  std::vector<TraceEntry> iterations;
  bool converged = false;
  StopReason stop_reason = StopReason::max_iters;
  std::size_t evaluations = 0;

  const TraceEntry& final() const { return iterations.back(); }
};

/// f* evaluation along the search; +infinity marks an infeasible point.
using OuterObjective = std::function<double(const OuterPoint&)>;

bool is_feasible_psi(const OuterPoint& psi, const NominalModel& model,
                     const AlphaBounds& bounds = {});

/// f*(psi) via the given inner solver, or +infinity if psi is infeasible.
OuterObjective make_outer_objective(const NominalModel& model, const AlphaBounds& bounds,
                                    InnerSolverFn solver = default_inner_solver());

struct ProbeResult {
  OuterPoint psi;
  double f_star = 0.0;
  std::size_t evaluations = 0;
};

/// One coordinate move. Returns the winning-direction point even when it is
/// worse than psi (the caller decides whether to accept it); when both
/// neighbours are infeasible psi is returned unchanged with f_star = +inf.
ProbeResult coordinate_probe(const OuterPoint& psi, Coordinate coord, double step,
                             const OuterObjective& objective);

ProbeResult coordinate_probe(const OuterPoint& psi, Coordinate coord, double step,
                             const NominalModel& model, const AlphaBounds& bounds = {});

/// Start point: nu0 = mu1, nu1 = mu0 (the swapped means), alpha = 0.5 halved
/// until feasible. If alpha reaches alpha_min without becoming feasible the
/// mean shift is scaled down toward the nominal means instead.
OuterPoint default_init(const NominalModel& model, const AlphaBounds& bounds = {});

/// Same heuristic with alpha pinned; the mean shift is scaled so the point
/// is feasible at that alpha.
OuterPoint default_init_fixed_alpha(const NominalModel& model, double alpha);

/// Throws InfeasiblePoint if the initial point is infeasible, InvalidArgument
/// on a malformed config. A pass whose probe ends above the incumbent f* is
/// discarded, so f* never increases between trace entries.
OptimizationTrace coordinate_descent(const NominalModel& model, const SolverConfig& cfg,
                                     InnerSolverFn solver = default_inner_solver());

struct SweepPoint {
  double alpha = 0.0;
  double f_star_min = 0.0;
  OuterPoint psi;
  InnerSolution inner;
};

/// For each alpha, coordinate descent over (nu0, nu1) with alpha fixed.
/// Grid points are evaluated concurrently; output order follows the grid.
std::vector<SweepPoint> alpha_sweep(const NominalModel& model, const std::vector<double>& alpha_grid,
                                    const SolverConfig& cfg);

}  // namespace byzattack
