#include "byzattack/coordinate_descent.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "byzattack/errors.hpp"

namespace byzattack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasibilitySlack = 1e-12;
// Upper bound on repeat steps in one probe; feasibility bounds every ray, this
// only guards against a pathological objective.
constexpr std::size_t kMaxRepeatSteps = 1000000;
// Pull initial points strictly inside the energy boundary.
constexpr double kInitShrink = 0.999;

OuterPoint shifted(OuterPoint psi, Coordinate coord, double amount) {
  switch (coord) {
    case Coordinate::nu0: psi.nu0 += amount; break;
    case Coordinate::nu1: psi.nu1 += amount; break;
    case Coordinate::alpha: psi.alpha += amount; break;
  }
  return psi;
}

void check_schedule(const StepSchedule& s, const char* name) {
  auto fail = [&](const std::string& what) {
    throw InvalidArgument(std::string(name) + ": " + what);
  };
  if (s.explicit_steps.empty()) {
    if (!(s.initial > 0.0) || !std::isfinite(s.initial)) fail("initial step must be > 0");
    if (!(s.decay > 0.0) || !std::isfinite(s.decay)) fail("decay must be > 0");
  } else {
    for (double step : s.explicit_steps) {
      if (!(step > 0.0) || !std::isfinite(step)) fail("every explicit step must be > 0");
    }
  }
}

OuterPoint scaled_swap(const NominalModel& model, double alpha) {
  const double mu0 = model.h0.mean();
  const double mu1 = model.h1.mean();
  const double gap = mu1 - mu0;
  const double shift_sq = 2.0 * gap * gap;
  double scale = 1.0;
  if (alpha * shift_sq > model.delta) {
    scale = kInitShrink * std::sqrt(model.delta / (alpha * shift_sq));
  }
  return {mu0 + scale * gap, mu1 - scale * gap, alpha};
}

}  // namespace

double StepSchedule::at(std::size_t k) const {
  if (!explicit_steps.empty()) {
    const std::size_t idx = std::min(k == 0 ? 0 : k - 1, explicit_steps.size() - 1);
    return explicit_steps[idx];
  }
  return initial * std::pow(decay, static_cast<double>(k));
}

void validate(const SolverConfig& cfg) {
  if (cfg.max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  check_schedule(cfg.step_nu0, "step_nu0");
  check_schedule(cfg.step_nu1, "step_nu1");
  check_schedule(cfg.step_alpha, "step_alpha");
  if (!(cfg.convergence_tol >= 0.0)) throw InvalidArgument("convergence_tol must be >= 0");
  const AlphaBounds& b = cfg.alpha_bounds;
  if (!(b.min > 0.0 && b.min < b.max && b.max < 1.0)) {
    throw InvalidArgument("alpha_bounds must satisfy 0 < alpha_min < alpha_max < 1");
  }
}

std::string_view to_string(StopReason r) {
  return r == StopReason::converged ? "converged" : "max_iters";
}

bool is_feasible_psi(const OuterPoint& psi, const NominalModel& model, const AlphaBounds& bounds) {
  if (!(psi.alpha >= bounds.min && psi.alpha <= bounds.max)) return false;
  if (!(psi.alpha > 0.0 && psi.alpha < 1.0)) return false;
  if (!std::isfinite(psi.nu0) || !std::isfinite(psi.nu1)) return false;
  return mean_shift_energy(model, psi) <= model.delta * (1.0 + kFeasibilitySlack);
}

OuterObjective make_outer_objective(const NominalModel& model, const AlphaBounds& bounds,
                                    InnerSolverFn solver) {
  return [model, bounds, solver = std::move(solver)](const OuterPoint& psi) {
    if (!is_feasible_psi(psi, model, bounds)) return kInf;
    try {
      return solver(model, psi).f_star;
    } catch (const InfeasiblePoint&) {
      return kInf;
    }
  };
}

ProbeResult coordinate_probe(const OuterPoint& psi, Coordinate coord, double step,
                             const OuterObjective& objective) {
  ProbeResult out{psi, kInf, 0};
  const OuterPoint minus = shifted(psi, coord, -step);
  const OuterPoint plus = shifted(psi, coord, step);
  const double f_minus = objective(minus);
  const double f_plus = objective(plus);
  out.evaluations = 2;
  if (f_minus == kInf && f_plus == kInf) return out;

  double direction;
  if (f_minus <= f_plus) {
    out.psi = minus;
    out.f_star = f_minus;
    direction = -1.0;
  } else {
    out.psi = plus;
    out.f_star = f_plus;
    direction = 1.0;
  }

  for (std::size_t i = 0; i < kMaxRepeatSteps; ++i) {
    const OuterPoint next = shifted(out.psi, coord, direction * step);
    const double f_next = objective(next);
    ++out.evaluations;
    if (!(f_next < out.f_star)) break;
    out.psi = next;
    out.f_star = f_next;
  }
  return out;
}

ProbeResult coordinate_probe(const OuterPoint& psi, Coordinate coord, double step,
                             const NominalModel& model, const AlphaBounds& bounds) {
  return coordinate_probe(psi, coord, step, make_outer_objective(model, bounds));
}

OuterPoint default_init(const NominalModel& model, const AlphaBounds& bounds) {
  const double gap = model.h1.mean() - model.h0.mean();
  const double shift_sq = 2.0 * gap * gap;
  double alpha = std::clamp(0.5, bounds.min, bounds.max);
  while (alpha * shift_sq > model.delta && alpha / 2.0 >= bounds.min) {
    alpha /= 2.0;
  }
  if (alpha * shift_sq > model.delta) {
    alpha = bounds.min;
  }
  return scaled_swap(model, alpha);
}

OuterPoint default_init_fixed_alpha(const NominalModel& model, double alpha) {
  return scaled_swap(model, alpha);
}

OptimizationTrace coordinate_descent(const NominalModel& model, const SolverConfig& cfg,
                                     InnerSolverFn solver) {
  validate(cfg);
  const OuterPoint init = cfg.init.value_or(default_init(model, cfg.alpha_bounds));
  if (!is_feasible_psi(init, model, cfg.alpha_bounds)) {
    std::ostringstream msg;
    msg << "infeasible initial point (nu0=" << init.nu0 << ", nu1=" << init.nu1
        << ", alpha=" << init.alpha << "): needs alpha in [" << cfg.alpha_bounds.min << ", "
        << cfg.alpha_bounds.max << "] and alpha*shift energy " << mean_shift_energy(model, init)
        << " <= delta " << model.delta;
    throw InfeasiblePoint(msg.str());
  }

  const OuterObjective objective = make_outer_objective(model, cfg.alpha_bounds, solver);
  OptimizationTrace trace;
  OuterPoint psi = init;
  InnerSolution inner = solver(model, psi);
  double f_current = inner.f_star;
  trace.evaluations = 1;
  trace.iterations.push_back({0, psi, f_current, inner});

  struct Axis {
    Coordinate coord;
    const StepSchedule* schedule;
  };
  std::vector<Axis> axes = {{Coordinate::nu0, &cfg.step_nu0}, {Coordinate::nu1, &cfg.step_nu1}};
  if (cfg.optimize_alpha) axes.push_back({Coordinate::alpha, &cfg.step_alpha});

  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    const double f_pass_start = f_current;
    for (const Axis& axis : axes) {
      const ProbeResult probe = coordinate_probe(psi, axis.coord, axis.schedule->at(k), objective);
      trace.evaluations += probe.evaluations;
      if (probe.f_star <= f_current) {
        psi = probe.psi;
        f_current = probe.f_star;
      }
    }
    inner = solver(model, psi);
    ++trace.evaluations;
    trace.iterations.push_back({k, psi, f_current, inner});
    if (f_pass_start - f_current < cfg.convergence_tol) {
      trace.converged = true;
      trace.stop_reason = StopReason::converged;
      break;
    }
  }
  return trace;
}

std::vector<SweepPoint> alpha_sweep(const NominalModel& model, const std::vector<double>& alpha_grid,
                                    const SolverConfig& cfg) {
  for (double a : alpha_grid) {
    if (!(a > 0.0 && a < 1.0)) {
      std::ostringstream msg;
      msg << "alpha grid value " << a << " is outside (0, 1)";
      throw InvalidArgument(msg.str());
    }
  }
  validate(cfg);

  auto run_one = [&model, &cfg](double alpha) {
    SolverConfig local = cfg;
    local.optimize_alpha = false;
    local.alpha_bounds = {std::min(alpha, cfg.alpha_bounds.min), std::max(alpha, cfg.alpha_bounds.max)};
    OuterPoint init = default_init_fixed_alpha(model, alpha);
    if (cfg.init) {
      const OuterPoint custom{cfg.init->nu0, cfg.init->nu1, alpha};
      if (is_feasible_psi(custom, model, local.alpha_bounds)) init = custom;
    }
    local.init = init;
    const OptimizationTrace trace = coordinate_descent(model, local);
    const TraceEntry& last = trace.final();
    return SweepPoint{alpha, last.f_star, last.psi, last.inner};
  };

  std::vector<std::future<SweepPoint>> jobs;
  jobs.reserve(alpha_grid.size());
  for (double a : alpha_grid) {
    jobs.push_back(std::async(std::launch::async, run_one, a));
  }
  std::vector<SweepPoint> out;
  out.reserve(jobs.size());
  for (auto& job : jobs) out.push_back(job.get());
  return out;
}

}  // namespace byzattack
