#include "byzattack/model.hpp"

#include <cmath>
#include <string>

#include "byzattack/errors.hpp"

namespace byzattack {

NominalModel::NominalModel(Gaussian h0_, Gaussian h1_, double delta_)
    : h0(h0_), h1(h1_), delta(delta_) {
  if (!std::isfinite(delta) || delta <= 0.0) {
    throw InvalidArgument("delta must be positive and finite, got " + std::to_string(delta));
  }
}

double mean_shift_energy(const NominalModel& model, const OuterPoint& psi) {
  const double d0 = psi.nu0 - model.h0.mean();
  const double d1 = psi.nu1 - model.h1.mean();
  return psi.alpha * (d0 * d0 + d1 * d1);
}

double injection_energy(const NominalModel& model, const OuterPoint& psi, double gamma0,
                        double gamma1) {
  const double d0 = psi.nu0 - model.h0.mean();
  const double d1 = psi.nu1 - model.h1.mean();
  return psi.alpha * (gamma0 + gamma1 - model.h0.variance() - model.h1.variance() + d0 * d0 +
                      d1 * d1);
}

}  // namespace byzattack
