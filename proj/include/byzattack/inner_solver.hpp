#pragma once

// Exact solution of the variance subproblem for a fixed outer point
// psi = (nu0, nu1, alpha).
//
// With the moment-matched objective, the minimization over the attack
// variances (Gamma0, Gamma1) reads
//
//   min  1/2 [ (G0 + c0)/(G1 + c1) + c2/(G1 + c1) - 1 - ln((G0 + c0)/(G1 + c1)) ]
//   s.t. G0 >= Sigma0,  G1 >= Sigma1,  G0 + G1 <= B,
//
// and the change of variables t0 = (G0 + c0)/(G1 + c1), t1 = 1/(G1 + c1)
// turns it into the convex program
//
//   min  1/2 (t0 - ln t0 + c2 t1 - 1)
//   s.t. (Sigma0 + c0) t1 <= t0 <= (B + c0 + c1) t1 - 1,  t1 <= 1/(Sigma1 + c1).
//
// For fixed t1 the optimal t0 is 1 clamped to the two lines; the partially
// minimized h(t1) is convex and is minimized by golden-section search.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include "byzattack/model.hpp"

namespace byzattack {

struct InnerConstants {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  /// delta/alpha - (nu0-mu0)^2 - (nu1-mu1)^2 + Sigma0 + Sigma1: the bound on
  /// Gamma0 + Gamma1.
  double B = 0.0;
};

/// Transformed variables (t0, t1) of the convex program.
struct TransformedPoint {
  double gt0 = 1.0;
  double gt1 = 1.0;
};

enum class ActiveConstraint : std::uint8_t {
  lower_line = 1,  // Gamma0 = Sigma0
  upper_line = 2,  // energy budget exhausted
  gt1_cap = 4,     // Gamma1 = Sigma1
};

struct ActiveSet {
  std::uint8_t bits = 0;

  bool contains(ActiveConstraint c) const { return (bits & static_cast<std::uint8_t>(c)) != 0; }
  void insert(ActiveConstraint c) { bits |= static_cast<std::uint8_t>(c); }
  std::string to_string() const;
};

struct InnerSolution {
  double f_star = 0.0;  // nats
  double gamma0 = 0.0;
  double gamma1 = 0.0;
  TransformedPoint transformed;
  ActiveSet active_constraints;
};

/// Tolerances; defaults are the documented solver contract.
struct InnerSolverOptions {
  double tol_gt1 = 1e-12;     // relative width of the final golden-section bracket
  double tol_active = 1e-8;   // relative slack under which a constraint is reported active
};

/// Throws InfeasiblePoint naming the violated condition if alpha is outside
/// (0, 1) or the mean shifts alone exceed delta.
InnerConstants inner_constants(const NominalModel& model, const OuterPoint& psi);

/// [1/(B + c1 - Sigma0), 1/(Sigma1 + c1)]. Throws InfeasiblePoint when empty.
std::pair<double, double> feasible_gt1_interval(const InnerConstants& c, const NominalModel& model);

TransformedPoint to_transformed(const InnerConstants& c, double gamma0, double gamma1);
std::pair<double, double> from_transformed(const InnerConstants& c, const TransformedPoint& t);

/// Objective in the original variances (equals kl_gaussian_approx of the
/// corresponding scenario).
double variance_objective(const InnerConstants& c, double gamma0, double gamma1);

/// Objective in the transformed variables.
double transformed_objective(const InnerConstants& c, const TransformedPoint& t);

InnerSolution solve_inner(const NominalModel& model, const OuterPoint& psi,
                          const InnerSolverOptions& options = {});

/// Brute force: minimum of variance_objective over the uniform grid
/// Gamma0 = Sigma0 + i*h, Gamma1 = Sigma1 + j*h, i + j <= resolution, with
/// h = (B - Sigma0 - Sigma1)/resolution. The diagonal i + j = resolution lies
/// exactly on the energy line. Upper-bounds the true minimum.
double inner_oracle_grid(const NominalModel& model, const OuterPoint& psi, std::size_t resolution);

/// Pluggable f* evaluator (lets the validation battery exercise a corrupted
/// solver).
using InnerSolverFn = std::function<InnerSolution(const NominalModel&, const OuterPoint&)>;

InnerSolverFn default_inner_solver();

}  // namespace byzattack
