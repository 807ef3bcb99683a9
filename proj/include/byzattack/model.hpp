#pragma once

#include "byzattack/distributions.hpp"

namespace byzattack {

/// The two hypothesis densities f0, f1 and the attacker's energy budget.
struct NominalModel {
  Gaussian h0;
  Gaussian h1;
  double delta;

  /// Throws InvalidArgument unless delta is positive and finite.
  NominalModel(Gaussian h0, Gaussian h1, double delta);
};

/// The outer decision vector (nu0, nu1, alpha). Feasibility is not enforced at
/// construction; see inner_constants() and is_feasible_psi().
struct OuterPoint {
  double nu0 = 0.0;
  double nu1 = 0.0;
  double alpha = 0.5;

  friend bool operator==(const OuterPoint&, const OuterPoint&) = default;
};

/// alpha * [(nu0 - mu0)^2 + (nu1 - mu1)^2]: the budget consumed by mean shifts.
double mean_shift_energy(const NominalModel& model, const OuterPoint& psi);

/// Full injection energy of an attack:
/// alpha * [gamma0 + gamma1 - Sigma0 - Sigma1 + (nu0 - mu0)^2 + (nu1 - mu1)^2].
double injection_energy(const NominalModel& model, const OuterPoint& psi, double gamma0,
                        double gamma1);

}  // namespace byzattack
