#include "byzattack/divergence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "byzattack/errors.hpp"

namespace byzattack {

namespace {

constexpr double kMinCoverageSigmas = 10.0;
constexpr double kMaxTruncatedMass = 1e-10;
constexpr std::size_t kMinQuadratureNodes = 10000;

double normal_tail_outside(const Gaussian& g, double lower, double upper) {
  const double sd = g.stddev();
  const double below = 0.5 * std::erfc((g.mean() - lower) / (sd * std::sqrt(2.0)));
  const double above = 0.5 * std::erfc((upper - g.mean()) / (sd * std::sqrt(2.0)));
  return below + above;
}

std::array<Gaussian, 4> components(const AttackScenario& s) {
  return {s.nominal0(), s.nominal1(), s.attacked0(), s.attacked1()};
}

}  // namespace

AttackScenario::AttackScenario(Gaussian nominal0, Gaussian nominal1, Gaussian attacked0,
                               Gaussian attacked1, double alpha)
    : nominal0_(nominal0),
      nominal1_(nominal1),
      attacked0_(attacked0),
      attacked1_(attacked1),
      alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  if (attacked0.variance() < nominal0.variance()) {
    throw InvalidArgument("gamma0 must be >= sigma0 (injected noise variance is negative)");
  }
  if (attacked1.variance() < nominal1.variance()) {
    throw InvalidArgument("gamma1 must be >= sigma1 (injected noise variance is negative)");
  }
}

AttackScenario AttackScenario::no_attack(Gaussian nominal0, Gaussian nominal1, double alpha) {
  return {nominal0, nominal1, nominal0, nominal1, alpha};
}

MCEstimate kl_monte_carlo(const AttackScenario& s, std::size_t K, const SampleStream& stream) {
  if (K == 0) {
    throw InvalidArgument("Monte Carlo sample count K must be >= 1");
  }
  const GaussianMixture mix0 = s.mixture0();
  const GaussianMixture mix1 = s.mixture1();
  const std::vector<double> z = sample_mixture(mix0, stream, K);

  // Welford accumulation of the log-ratio summands.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    const double term = mixture_log_pdf(mix0, z[i]) - mixture_log_pdf(mix1, z[i]);
    const double delta = term - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (term - mean);
  }
  MCEstimate out;
  out.value = mean;
  out.sample_count = K;
  out.seed = stream.seed;
  if (K > 1) {
    const double variance = m2 / static_cast<double>(K - 1);
    out.std_error = std::sqrt(std::max(variance, 0.0) / static_cast<double>(K));
  }
  return out;
}

double kl_upper_bound(const AttackScenario& s) {
  const double a = s.alpha();
  return (1.0 - a) * gaussian_kl(s.nominal0(), s.nominal1()) +
         a * gaussian_kl(s.attacked0(), s.attacked1());
}

Gaussian moment_match(double alpha, const Gaussian& nominal, const Gaussian& attacked) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("moment_match: alpha must lie in [0, 1]");
  }
  const double d = nominal.mean() - attacked.mean();
  const double mean = (1.0 - alpha) * nominal.mean() + alpha * attacked.mean();
  const double variance =
      (1.0 - alpha) * nominal.variance() + alpha * attacked.variance() + alpha * (1.0 - alpha) * d * d;
  return {mean, variance};
}

double kl_gaussian_approx(const AttackScenario& s) {
  return gaussian_kl(moment_match(s.alpha(), s.nominal0(), s.attacked0()),
                     moment_match(s.alpha(), s.nominal1(), s.attacked1()));
}

QuadratureGrid QuadratureGrid::covering(const AttackScenario& s, double sigmas, std::size_t nodes) {
  double lower = std::numeric_limits<double>::infinity();
  double upper = -std::numeric_limits<double>::infinity();
  for (const Gaussian& g : components(s)) {
    lower = std::min(lower, g.mean() - sigmas * g.stddev());
    upper = std::max(upper, g.mean() + sigmas * g.stddev());
  }
  return {lower, upper, nodes};
}

QuadratureResult kl_quadrature(const AttackScenario& s, const QuadratureGrid& grid) {
  if (grid.nodes < kMinQuadratureNodes || grid.nodes % 2 == 0) {
    throw InvalidArgument("quadrature needs an odd node count >= 10000, got " +
                          std::to_string(grid.nodes));
  }
  if (!(grid.upper > grid.lower)) {
    throw InvalidArgument("quadrature grid upper bound must exceed lower bound");
  }
  for (const Gaussian& g : components(s)) {
    if (grid.lower > g.mean() - kMinCoverageSigmas * g.stddev() ||
        grid.upper < g.mean() + kMinCoverageSigmas * g.stddev()) {
      throw PrecisionError("quadrature grid does not span +-10 standard deviations of every component");
    }
  }

  const GaussianMixture mix0 = s.mixture0();
  const GaussianMixture mix1 = s.mixture1();

  QuadratureResult out;
  out.truncated_mass = (1.0 - s.alpha()) * normal_tail_outside(s.nominal0(), grid.lower, grid.upper) +
                       s.alpha() * normal_tail_outside(s.attacked0(), grid.lower, grid.upper);
  if (out.truncated_mass > kMaxTruncatedMass) {
    throw PrecisionError("quadrature grid truncates " + std::to_string(out.truncated_mass) +
                         " of the H0 mixture mass (limit 1e-10)");
  }

  const std::size_t intervals = grid.nodes - 1;
  const double h = (grid.upper - grid.lower) / static_cast<double>(intervals);
  std::vector<double> f(grid.nodes);
  for (std::size_t i = 0; i < grid.nodes; ++i) {
    const double x = grid.lower + h * static_cast<double>(i);
    const double l0 = mixture_log_pdf(mix0, x);
    const double l1 = mixture_log_pdf(mix1, x);
    f[i] = std::exp(l0) * (l0 - l1);
  }

  auto simpson = [&](std::size_t stride) {
    const std::size_t n = intervals / stride;
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
      (k % 2 == 1 ? odd : even) += f[k * stride];
    }
    return (h * static_cast<double>(stride) / 3.0) * (f.front() + f.back() + 4.0 * odd + 2.0 * even);
  };

  out.value = simpson(1);
  if (intervals % 4 == 0) {
    out.error_estimate = std::abs(out.value - simpson(2)) / 15.0;
  } else {
    double trapezoid = 0.5 * (f.front() + f.back());
    for (std::size_t k = 1; k < intervals; ++k) trapezoid += f[k];
    out.error_estimate = std::abs(out.value - trapezoid * h);
  }
  return out;
}

std::string_view to_string(DivergenceMethod m) {
  switch (m) {
    case DivergenceMethod::monte_carlo: return "monte_carlo";
    case DivergenceMethod::upper_bound: return "upper_bound";
    case DivergenceMethod::gaussian_approx: return "gaussian_approx";
    case DivergenceMethod::quadrature: return "quadrature";
  }
  return "unknown";
}

std::optional<DivergenceMethod> parse_divergence_method(std::string_view name) {
  for (DivergenceMethod m : {DivergenceMethod::monte_carlo, DivergenceMethod::upper_bound,
                             DivergenceMethod::gaussian_approx, DivergenceMethod::quadrature}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

DivergenceValue evaluate_divergence(DivergenceMethod method, const AttackScenario& s,
                                    const DivergenceOptions& options) {
  switch (method) {
    case DivergenceMethod::monte_carlo: {
      const MCEstimate e = kl_monte_carlo(s, options.mc_samples, options.stream);
      return {method, e.value, e.std_error};
    }
    case DivergenceMethod::upper_bound:
      return {method, kl_upper_bound(s), 0.0};
    case DivergenceMethod::gaussian_approx:
      return {method, kl_gaussian_approx(s), 0.0};
    case DivergenceMethod::quadrature: {
      const QuadratureResult q =
          kl_quadrature(s, QuadratureGrid::covering(s, 12.0, options.quadrature_nodes));
      return {method, q.value, q.error_estimate};
    }
  }
  throw InvalidArgument("unknown divergence method");
}

}  // namespace byzattack
