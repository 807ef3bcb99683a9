#pragma once

// KL divergence between the attacked received distributions
//   mix0 = (1 - alpha) f0 + alpha g0,   mix1 = (1 - alpha) f1 + alpha g1.
// Three approximations (Monte Carlo, chain-rule upper bound, moment-matched
// Gaussian) plus a composite-Simpson quadrature used as ground truth.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "byzattack/distributions.hpp"
#include "byzattack/random.hpp"

namespace byzattack {

/// f0, f1, g0, g1 and the attacking power. Requires attacked variances >=
/// nominal variances (the injected noise must have nonnegative variance) and
/// 0 < alpha < 1.
class AttackScenario {
 public:
  AttackScenario(Gaussian nominal0, Gaussian nominal1, Gaussian attacked0, Gaussian attacked1,
                 double alpha);

  /// Attacked components equal to the nominal ones.
  static AttackScenario no_attack(Gaussian nominal0, Gaussian nominal1, double alpha = 0.5);

  const Gaussian& nominal0() const { return nominal0_; }
  const Gaussian& nominal1() const { return nominal1_; }
  const Gaussian& attacked0() const { return attacked0_; }
  const Gaussian& attacked1() const { return attacked1_; }
  double alpha() const { return alpha_; }

  GaussianMixture mixture0() const { return {alpha_, nominal0_, attacked0_}; }
  GaussianMixture mixture1() const { return {alpha_, nominal1_, attacked1_}; }

 private:
  Gaussian nominal0_;
  Gaussian nominal1_;
  Gaussian attacked0_;
  Gaussian attacked1_;
  double alpha_;
};

struct MCEstimate {
  double value = 0.0;      // nats
  double std_error = 0.0;  // nats
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
};

/// Plain Monte Carlo: mean of log mix0(z) - log mix1(z) over K draws z ~ mix0.
/// std_error is the sample standard deviation of the summands over sqrt(K).
MCEstimate kl_monte_carlo(const AttackScenario& s, std::size_t K, const SampleStream& stream);

/// (1 - alpha) D(f0 || f1) + alpha D(g0 || g1).
double kl_upper_bound(const AttackScenario& s);

/// Gaussian with the exact mean and variance of (1 - alpha) nominal + alpha
/// attacked.
Gaussian moment_match(double alpha, const Gaussian& nominal, const Gaussian& attacked);

/// D(moment_match(H0) || moment_match(H1)).
double kl_gaussian_approx(const AttackScenario& s);

/// Uniform composite-Simpson grid on [lower, upper]; nodes must be odd.
struct QuadratureGrid {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t nodes = 20001;

  /// Grid spanning +-sigmas standard deviations of all four components.
  static QuadratureGrid covering(const AttackScenario& s, double sigmas = 12.0,
                                 std::size_t nodes = 20001);
};

struct QuadratureResult {
  double value = 0.0;
  /// |S(h) - S(2h)| / 15, the Richardson estimate of the Simpson error.
  double error_estimate = 0.0;
  /// mix0 probability mass outside [lower, upper].
  double truncated_mass = 0.0;
};

/// Numerical integral of mix0(x) ln[mix0(x) / mix1(x)]. Throws PrecisionError
/// when the grid leaves more than 1e-10 of mix0's mass outside, or when it
/// does not span +-10 standard deviations of every component; throws
/// InvalidArgument for fewer than 10^4 nodes or an even node count.
QuadratureResult kl_quadrature(const AttackScenario& s, const QuadratureGrid& grid);

inline double kl_quadrature_oracle(const AttackScenario& s, const QuadratureGrid& grid) {
  return kl_quadrature(s, grid).value;
}
inline double kl_quadrature_oracle(const AttackScenario& s) {
  return kl_quadrature(s, QuadratureGrid::covering(s)).value;
}

enum class DivergenceMethod { monte_carlo, upper_bound, gaussian_approx, quadrature };

std::string_view to_string(DivergenceMethod m);
std::optional<DivergenceMethod> parse_divergence_method(std::string_view name);

struct DivergenceOptions {
  std::size_t mc_samples = 100000;
  SampleStream stream{};
  std::size_t quadrature_nodes = 20001;
};

struct DivergenceValue {
  DivergenceMethod method;
  double value = 0.0;
  double std_error = 0.0;  // zero for the deterministic methods
};

/// Uniform entry point over the four methods.
DivergenceValue evaluate_divergence(DivergenceMethod method, const AttackScenario& s,
                                    const DivergenceOptions& options = {});

}  // namespace byzattack
