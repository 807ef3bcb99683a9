#include "byzattack/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "byzattack/coordinate_descent.hpp"
#include "byzattack/errors.hpp"

namespace byzattack {

namespace {

enum PropertyStream : std::uint64_t {
  kTransform = 1,
  kObjective,
  kConvexity,
  kFeasibility,
  kOracle,
  kBound,
  kNonnegative,
  kMonteCarlo,
  kContinuity,
};

UniformSequence sequence_for(const ValidationOptions& opt, PropertyStream which) {
  return UniformSequence(SampleStream{opt.seed, which});
}

double scaled(double value) { return std::max(1.0, std::abs(value)); }

std::string describe(const NominalModel& m, const OuterPoint& psi) {
  std::ostringstream out;
  out.precision(17);
  out << "mu0=" << m.h0.mean() << " sigma0=" << m.h0.variance() << " mu1=" << m.h1.mean()
      << " sigma1=" << m.h1.variance() << " delta=" << m.delta << " nu0=" << psi.nu0
      << " nu1=" << psi.nu1 << " alpha=" << psi.alpha;
  return out.str();
}

std::string describe(const AttackScenario& s) {
  std::ostringstream out;
  out.precision(17);
  out << "f0=N(" << s.nominal0().mean() << "," << s.nominal0().variance() << ") f1=N("
      << s.nominal1().mean() << "," << s.nominal1().variance() << ") g0=N(" << s.attacked0().mean()
      << "," << s.attacked0().variance() << ") g1=N(" << s.attacked1().mean() << ","
      << s.attacked1().variance() << ") alpha=" << s.alpha();
  return out.str();
}

/// Runs `trial` n times; it returns an empty string on success or a
/// counterexample description.
template <typename Trial>
PropertyResult run_property(const std::string& name, std::size_t n, Trial trial) {
  PropertyResult r;
  r.name = name;
  r.trials = n;
  for (std::size_t i = 0; i < n; ++i) {
    std::string failure = trial(i);
    if (failure.empty()) {
      ++r.passed;
    } else if (r.counterexample.empty()) {
      r.counterexample = std::move(failure);
    }
  }
  r.ok = r.passed == r.trials;
  return r;
}

}  // namespace

bool ValidationReport::all_passed() const {
  return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.ok; });
}

const PropertyResult* ValidationReport::find(const std::string& name) const {
  for (const auto& p : properties) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

NominalModel random_model(UniformSequence& rng) {
  const double mu0 = rng.next(-5.0, 5.0);
  const double gap = rng.next(0.5, 10.0) * (rng.next() < 0.5 ? -1.0 : 1.0);
  const double sigma0 = rng.next(0.5, 5.0);
  const double sigma1 = rng.next(0.5, 5.0);
  const double delta = rng.next(0.5, 100.0);
  return {Gaussian(mu0, sigma0), Gaussian(mu0 + gap, sigma1), delta};
}

OuterPoint random_feasible_psi(UniformSequence& rng, const NominalModel& model,
                               double budget_fraction) {
  const double alpha = rng.next(0.05, 0.95);
  const double theta = rng.next(0.0, 2.0 * std::numbers::pi);
  const double radius = std::sqrt(budget_fraction * model.delta / alpha);
  return {model.h0.mean() + radius * std::cos(theta), model.h1.mean() + radius * std::sin(theta),
          alpha};
}

std::pair<double, double> random_feasible_gammas(UniformSequence& rng, const NominalModel& model,
                                                 const OuterPoint& psi) {
  const InnerConstants c = inner_constants(model, psi);
  const double remaining = c.B - model.h0.variance() - model.h1.variance();
  const double share1 = rng.next();
  const double share0 = rng.next() * (1.0 - share1);
  return {model.h0.variance() + remaining * share0, model.h1.variance() + remaining * share1};
}

AttackScenario random_scenario(UniformSequence& rng) {
  const double mu0 = rng.next(-5.0, 5.0);
  const double mu1 = mu0 + rng.next(-8.0, 8.0);
  const double s0 = rng.next(0.5, 4.0);
  const double s1 = rng.next(0.5, 4.0);
  const Gaussian f0(mu0, s0);
  const Gaussian f1(mu1, s1);
  const Gaussian g0(mu0 + rng.next(-6.0, 6.0), s0 + rng.next(0.0, 5.0));
  const Gaussian g1(mu1 + rng.next(-6.0, 6.0), s1 + rng.next(0.0, 5.0));
  return {f0, f1, g0, g1, rng.next(0.05, 0.95)};
}

PropertyResult check_transform_round_trip(const ValidationOptions& opt) {
  UniformSequence rng = sequence_for(opt, kTransform);
  return run_property("transform_round_trip", opt.transform_trials, [&](std::size_t) {
    const NominalModel model = random_model(rng);
    const OuterPoint psi = random_feasible_psi(rng, model, rng.next());
    const auto [g0, g1] = random_feasible_gammas(rng, model, psi);
    const InnerConstants c = inner_constants(model, psi);
    const auto [b0, b1] = from_transformed(c, to_transformed(c, g0, g1));
    if (std::abs(b0 - g0) <= 1e-12 * scaled(g0) && std::abs(b1 - g1) <= 1e-12 * scaled(g1)) {
      return std::string();
    }
    return describe(model, psi) + " gamma0=" + std::to_string(g0) + " gamma1=" + std::to_string(g1);
  });
}

PropertyResult check_objective_equivalence(const ValidationOptions& opt) {
  UniformSequence rng = sequence_for(opt, kObjective);
  return run_property("objective_equivalence", opt.transform_trials, [&](std::size_t) {
    const NominalModel model = random_model(rng);
    const OuterPoint psi = random_feasible_psi(rng, model, rng.next());
    const auto [g0, g1] = random_feasible_gammas(rng, model, psi);
    const InnerConstants c = inner_constants(model, psi);
    const double direct = variance_objective(c, g0, g1);
    const double transformed = transformed_objective(c, to_transformed(c, g0, g1));
    if (std::abs(direct - transformed) <= 1e-10 * scaled(direct)) return std::string();
    return describe(model, psi) + " direct=" + std::to_string(direct) +
           " transformed=" + std::to_string(transformed);
  });
}

PropertyResult check_convexity_witness(const ValidationOptions& opt) {
  UniformSequence rng = sequence_for(opt, kConvexity);
  return run_property("convexity_witness", opt.transform_trials, [&](std::size_t) {
    const NominalModel model = random_model(rng);
    const OuterPoint psi = random_feasible_psi(rng, model, rng.next());
    const InnerConstants c = inner_constants(model, psi);
    const auto [a0, a1] = random_feasible_gammas(rng, model, psi);
    const auto [b0, b1] = random_feasible_gammas(rng, model, psi);
    const TransformedPoint a = to_transformed(c, a0, a1);
    const TransformedPoint b = to_transformed(c, b0, b1);
    const TransformedPoint mid{0.5 * (a.gt0 + b.gt0), 0.5 * (a.gt1 + b.gt1)};
    const double fa = transformed_objective(c, a);
    const double fb = transformed_objective(c, b);
    const double fm = transformed_objective(c, mid);
    if (fm <= 0.5 * (fa + fb) + 1e-12 * scaled(fa + fb)) return std::string();
    return describe(model, psi) + " midpoint value exceeds chord";
  });
}

PropertyResult check_solver_feasibility(const ValidationOptions& opt) {
  UniformSequence rng = sequence_for(opt, kFeasibility);
  return run_property("solver_feasibility", opt.transform_trials, [&](std::size_t i) {
    const NominalModel model = random_model(rng);
    // Every 10th instance sits exactly on the mean-shift boundary.
    const OuterPoint psi = random_feasible_psi(rng, model, i % 10 == 0 ? 1.0 : rng.next());
    const InnerSolution sol = opt.solver(model, psi);
    const double energy = injection_energy(model, psi, sol.gamma0, sol.gamma1);
    const bool ok = sol.gamma0 >= model.h0.variance() - 1e-9 &&
                    sol.gamma1 >= model.h1.variance() - 1e-9 &&
                    energy <= model.delta + 1e-9 * scaled(model.delta) && sol.f_star >= 0.0;
    if (ok) return std::string();
    return describe(model, psi) + " energy=" + std::to_string(energy);
  });
}

PropertyResult check_solver_vs_grid_oracle(const ValidationOptions& opt) {
  UniformSequence rng = sequence_for(opt, kOracle);
  return run_property("solver_vs_grid_oracle", opt.solver_trials, [&](std::size_t i) {
    const NominalModel model = random_model(rng);
    const OuterPoint psi = random_feasible_psi(rng, model, i % 10 == 0 ? 1.0 : rng.next());
    const double solver = opt.solver(model, psi).f_star;
    const double oracle = inner_oracle_grid(model, psi, opt.oracle_resolution);
    if (solver <= oracle + 1e-9 && oracle - solver <= 1e-3) return std::string();
    std::ostringstream out;
    out.precision(12);
    out << describe(model, psi) << " solver=" << solver << " oracle=" << oracle;
    return out.str();
  });
}

PropertyResult check_bound_ordering(const ValidationOptions& opt) {
  UniformSequence rng = sequence_for(opt, kBound);
  return run_property("bound_ordering", opt.bound_trials, [&](std::size_t) {
    const AttackScenario s = random_scenario(rng);
    const double bound = kl_upper_bound(s);
    const double truth = kl_quadrature_oracle(s);
    if (bound >= truth - 1e-6) return std::string();
    return describe(s) + " bound=" + std::to_string(bound) + " quadrature=" + std::to_string(truth);
  });
}

PropertyResult check_quadrature_nonnegative(const ValidationOptions& opt) {
  UniformSequence rng = sequence_for(opt, kNonnegative);
  return run_property("quadrature_nonnegative", opt.bound_trials, [&](std::size_t) {
    const AttackScenario s = random_scenario(rng);
    const double truth = kl_quadrature_oracle(s);
    if (truth >= -1e-9) return std::string();
    return describe(s) + " quadrature=" + std::to_string(truth);
  });
}

PropertyResult check_mc_vs_quadrature(const ValidationOptions& opt) {
  UniformSequence rng = sequence_for(opt, kMonteCarlo);
  PropertyResult r = run_property("mc_vs_quadrature", opt.mc_trials, [&](std::size_t i) {
    const AttackScenario s = random_scenario(rng);
    const MCEstimate mc = kl_monte_carlo(s, opt.mc_samples, SampleStream{opt.seed, 1000 + i});
    const double truth = kl_quadrature_oracle(s);
    if (std::abs(mc.value - truth) <= 4.0 * mc.std_error) return std::string();
    return describe(s) + " mc=" + std::to_string(mc.value) + "+-" + std::to_string(mc.std_error) +
           " quadrature=" + std::to_string(truth);
  });
  // Statistical property: at least 99% of trials inside the 4-sigma band.
  r.ok = static_cast<double>(r.passed) >= 0.99 * static_cast<double>(r.trials);
  if (r.ok) r.counterexample.clear();
  return r;
}

PropertyResult check_continuity(const ValidationOptions& opt) {
  UniformSequence rng = sequence_for(opt, kContinuity);
  const AlphaBounds open_interval{1e-9, 1.0 - 1e-9};
  return run_property("continuity", opt.continuity_trials, [&](std::size_t) {
    const NominalModel model = random_model(rng);
    const OuterPoint psi = random_feasible_psi(rng, model, rng.next(0.0, 0.9));
    // Uniform direction on the sphere, radius up to 1e-5.
    double d[3];
    double norm = 0.0;
    for (double& v : d) {
      v = rng.next(-1.0, 1.0);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    const double radius = rng.next(0.0, 1e-5);
    const OuterPoint moved{psi.nu0 + radius * d[0] / norm, psi.nu1 + radius * d[1] / norm,
                           psi.alpha + radius * d[2] / norm};
    if (!is_feasible_psi(moved, model, open_interval)) return std::string();
    const double a = opt.solver(model, psi).f_star;
    const double b = opt.solver(model, moved).f_star;
    if (std::abs(a - b) <= 1e-2) return std::string();
    return describe(model, psi) + " jump=" + std::to_string(std::abs(a - b));
  });
}

ValidationReport run_validation(const ValidationOptions& opt) {
  ValidationReport report;
  report.properties = {
      check_transform_round_trip(opt), check_objective_equivalence(opt),
      check_convexity_witness(opt),    check_solver_feasibility(opt),
      check_solver_vs_grid_oracle(opt), check_bound_ordering(opt),
      check_quadrature_nonnegative(opt), check_mc_vs_quadrature(opt),
      check_continuity(opt),
  };
  return report;
}

}  // namespace byzattack
