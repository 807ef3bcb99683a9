#include "byzattack/inner_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "byzattack/errors.hpp"

namespace byzattack {

namespace {

// Relative slack on the mean-shift feasibility test; absorbs rounding when a
// caller constructs a point exactly on the energy boundary.
constexpr double kFeasibilitySlack = 1e-12;

constexpr double kInvGolden = 0.6180339887498948482;

/// Remaining variance budget delta/alpha - shifts, i.e. B - Sigma0 - Sigma1.
double remaining_budget(const InnerConstants& c, const NominalModel& model) {
  return c.B - model.h0.variance() - model.h1.variance();
}

struct PartialMinimizer {
  const InnerConstants& c;
  double sigma0;
  double sigma1;
  double remaining;

  double lower_line(double t1) const { return (sigma0 + c.c0) * t1; }

  // upper - lower = (remaining + Sigma1 + c1) t1 - 1, written this way so the
  // gap is never negative on the feasible interval.
  double line_gap(double t1) const { return std::max(0.0, (remaining + sigma1 + c.c1) * t1 - 1.0); }

  double upper_line(double t1) const { return lower_line(t1) + line_gap(t1); }

  double best_t0(double t1) const {
    const double lo = lower_line(t1);
    return std::clamp(1.0, lo, lo + line_gap(t1));
  }

  double h(double t1) const { return transformed_objective(c, {best_t0(t1), t1}); }
};

double golden_section(const PartialMinimizer& pm, double a, double b, double tol) {
  double x1 = b - kInvGolden * (b - a);
  double x2 = a + kInvGolden * (b - a);
  double f1 = pm.h(x1);
  double f2 = pm.h(x2);
  while (b - a > tol * std::max(std::abs(a), std::abs(b))) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvGolden * (b - a);
      f1 = pm.h(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvGolden * (b - a);
      f2 = pm.h(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::string ActiveSet::to_string() const {
  std::string out;
  auto append = [&](ActiveConstraint c, const char* name) {
    if (!contains(c)) return;
    if (!out.empty()) out += '|';
    out += name;
  };
  append(ActiveConstraint::lower_line, "lower_line");
  append(ActiveConstraint::upper_line, "upper_line");
  append(ActiveConstraint::gt1_cap, "gt1_cap");
  return out;
}

InnerConstants inner_constants(const NominalModel& model, const OuterPoint& psi) {
  const double a = psi.alpha;
  if (!(a > 0.0 && a < 1.0)) {
    std::ostringstream msg;
    msg << "infeasible outer point: alpha = " << a << " is outside (0, 1)";
    throw InfeasiblePoint(msg.str());
  }
  const double mu0 = model.h0.mean();
  const double mu1 = model.h1.mean();
  const double s0 = model.h0.variance();
  const double s1 = model.h1.variance();
  const double d0 = psi.nu0 - mu0;
  const double d1 = psi.nu1 - mu1;
  const double shifts = d0 * d0 + d1 * d1;

  double remaining = model.delta / a - shifts;
  if (remaining < -kFeasibilitySlack * (model.delta / a)) {
    std::ostringstream msg;
    msg << "infeasible outer point: energy alpha*[(nu0-mu0)^2 + (nu1-mu1)^2] = " << a * shifts
        << " exceeds delta = " << model.delta;
    throw InfeasiblePoint(msg.str());
  }
  remaining = std::max(remaining, 0.0);

  InnerConstants c;
  c.c0 = (1.0 - a) * (s0 / a + d0 * d0);
  c.c1 = (1.0 - a) * (s1 / a + d1 * d1);
  const double mean_gap = (1.0 - a) * mu1 + a * psi.nu1 - (1.0 - a) * mu0 - a * psi.nu0;
  c.c2 = mean_gap * mean_gap / a;
  c.B = remaining + s0 + s1;
  return c;
}

std::pair<double, double> feasible_gt1_interval(const InnerConstants& c, const NominalModel& model) {
  const double s1 = model.h1.variance();
  const double remaining = remaining_budget(c, model);
  if (remaining < -kFeasibilitySlack * std::max(1.0, c.B)) {
    throw InfeasiblePoint("empty feasible interval: B < Sigma0 + Sigma1");
  }
  const double gt1_max = 1.0 / (s1 + c.c1);
  const double gt1_min = remaining > 0.0 ? 1.0 / (remaining + s1 + c.c1) : gt1_max;
  return {gt1_min, gt1_max};
}

TransformedPoint to_transformed(const InnerConstants& c, double gamma0, double gamma1) {
  const double inv = 1.0 / (gamma1 + c.c1);
  return {(gamma0 + c.c0) * inv, inv};
}

std::pair<double, double> from_transformed(const InnerConstants& c, const TransformedPoint& t) {
  return {t.gt0 / t.gt1 - c.c0, 1.0 / t.gt1 - c.c1};
}

double variance_objective(const InnerConstants& c, double gamma0, double gamma1) {
  const double ratio = (gamma0 + c.c0) / (gamma1 + c.c1);
  return 0.5 * (ratio + c.c2 / (gamma1 + c.c1) - 1.0 - std::log(ratio));
}

double transformed_objective(const InnerConstants& c, const TransformedPoint& t) {
  return 0.5 * (t.gt0 - std::log(t.gt0) + c.c2 * t.gt1 - 1.0);
}

InnerSolution solve_inner(const NominalModel& model, const OuterPoint& psi,
                          const InnerSolverOptions& options) {
  const InnerConstants c = inner_constants(model, psi);
  const auto [gt1_min, gt1_max] = feasible_gt1_interval(c, model);
  const double s0 = model.h0.variance();
  const double s1 = model.h1.variance();
  const PartialMinimizer pm{c, s0, s1, remaining_budget(c, model)};

  double best_t1 = gt1_max;
  double best_h = pm.h(gt1_max);
  // Candidates in increasing order of preference on ties: the endpoints and
  // kinks of h are checked explicitly, and among equal values the largest t1
  // (least injected variance on H1) wins.
  auto consider = [&](double t1) {
    if (!(t1 >= gt1_min && t1 <= gt1_max)) return;
    const double value = pm.h(t1);
    const double tie = 1e-15 * std::max(1.0, std::abs(best_h));
    if (value < best_h - tie || (std::abs(value - best_h) <= tie && t1 > best_t1)) {
      best_t1 = t1;
      best_h = value;
    }
  };
  if (gt1_max > gt1_min) {
    consider(golden_section(pm, gt1_min, gt1_max, options.tol_gt1));
    consider(gt1_min);
    consider(1.0 / (s0 + c.c0));               // lower line crosses t0 = 1
    consider(2.0 / (c.B + c.c0 + c.c1));       // upper line crosses t0 = 1
  }

  InnerSolution out;
  const double t0 = pm.best_t0(best_t1);
  auto [gamma0, gamma1] = from_transformed(c, {t0, best_t1});

  // Snap rounding residue back into the constraint set of the variance problem.
  gamma1 = std::max(gamma1, s1);
  gamma0 = std::max(gamma0, s0);
  const double excess = gamma0 + gamma1 - c.B;
  if (excess > 0.0) {
    const double take0 = std::min(excess, gamma0 - s0);
    gamma0 -= take0;
    gamma1 = std::max(s1, gamma1 - (excess - take0));
  }
  out.gamma0 = gamma0;
  out.gamma1 = gamma1;
  out.transformed = {t0, best_t1};
  out.f_star = std::max(0.0, transformed_objective(c, out.transformed));

  const double lo = pm.lower_line(best_t1);
  const double hi = pm.upper_line(best_t1);
  if (t0 - lo <= options.tol_active * std::max(1.0, std::abs(lo))) {
    out.active_constraints.insert(ActiveConstraint::lower_line);
  }
  if (hi - t0 <= options.tol_active * std::max(1.0, std::abs(hi))) {
    out.active_constraints.insert(ActiveConstraint::upper_line);
  }
  if (gt1_max - best_t1 <= options.tol_active * gt1_max) {
    out.active_constraints.insert(ActiveConstraint::gt1_cap);
  }
  return out;
}

double inner_oracle_grid(const NominalModel& model, const OuterPoint& psi, std::size_t resolution) {
  if (resolution < 1) {
    throw InvalidArgument("oracle grid resolution must be >= 1");
  }
  const InnerConstants c = inner_constants(model, psi);
  const double s0 = model.h0.variance();
  const double s1 = model.h1.variance();
  const double remaining = remaining_budget(c, model);
  if (remaining <= 0.0) {
    return variance_objective(c, s0, s1);
  }
  const double h = remaining / static_cast<double>(resolution);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j <= resolution; ++j) {
    const double gamma1 = s1 + h * static_cast<double>(j);
    const double inv = 1.0 / (gamma1 + c.c1);
    const double mean_term = c.c2 * inv;
    for (std::size_t i = 0; i + j <= resolution; ++i) {
      const double gamma0 = s0 + h * static_cast<double>(i);
      const double ratio = (gamma0 + c.c0) * inv;
      best = std::min(best, 0.5 * (ratio + mean_term - 1.0 - std::log(ratio)));
    }
  }
  return best;
}

InnerSolverFn default_inner_solver() {
  return [](const NominalModel& model, const OuterPoint& psi) { return solve_inner(model, psi); };
}

}  // namespace byzattack
