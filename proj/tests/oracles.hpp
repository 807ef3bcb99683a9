#pragma once

// Reference computations used only by the tests. Each follows a different
// route from the library code: direct density products instead of log-space
// arithmetic, adaptive Gauss-Kronrod instead of fixed Simpson grids, and a
// separate polar parametrization for the inner brute force.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace oracle {

inline double normal_pdf(double mean, double var, double x) {
  const double z = x - mean;
  return std::exp(-z * z / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

inline double gaussian_kl(double m0, double v0, double m1, double v1) {
  return 0.5 * (v0 / v1 + (m1 - m0) * (m1 - m0) / v1 - 1.0 + std::log(v1 / v0));
}

inline double mixture_pdf(double w, double mn, double vn, double ma, double va, double x) {
  return (1.0 - w) * normal_pdf(mn, vn, x) + w * normal_pdf(ma, va, x);
}

struct Mix {
  double w, mn, vn, ma, va;
  double pdf(double x) const { return mixture_pdf(w, mn, vn, ma, va, x); }
};

/// KL(p || q) by adaptive Gauss-Kronrod on (-inf, inf).
inline double mixture_kl(const Mix& p, const Mix& q) {
  auto integrand = [&](double x) {
    const double a = p.pdf(x);
    if (a <= 0.0) return 0.0;
    const double b = q.pdf(x);
    if (b <= 0.0) return 0.0;
    return a * std::log(a / b);
  };
  // Split at the component means so the adaptive rule sees every bump.
  double lo = std::min({p.mn, p.ma, q.mn, q.ma});
  double hi = std::max({p.mn, p.ma, q.mn, q.ma});
  const double sd = std::sqrt(std::max({p.vn, p.va, q.vn, q.va}));
  lo -= 15.0 * sd;
  hi += 15.0 * sd;
  const int pieces = 64;
  double total = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double a = lo + (hi - lo) * i / pieces;
    const double b = lo + (hi - lo) * (i + 1) / pieces;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, a, b, 15, 1e-13);
  }
  return total;
}

/// Mean and variance of (1 - w) N(mn, vn) + w N(ma, va).
inline std::pair<double, double> mixture_moments(double w, double mn, double vn, double ma, double va) {
  const double mean = (1.0 - w) * mn + w * ma;
  const double second = (1.0 - w) * (vn + mn * mn) + w * (va + ma * ma);
  return {mean, second - mean * mean};
}

/// Moment-matched KL for attack variances (g0, g1); the inner objective
/// written from scratch.
inline double matched_kl(double mu0, double s0, double mu1, double s1, double nu0, double nu1,
                         double alpha, double g0, double g1) {
  const auto [m0, v0] = mixture_moments(alpha, mu0, s0, nu0, g0);
  const auto [m1, v1] = mixture_moments(alpha, mu1, s1, nu1, g1);
  return gaussian_kl(m0, v0, m1, v1);
}

/// Brute-force minimum of matched_kl over the feasible triangle, sampled along
/// rays from the corner (s0, s1): direction angle i/rays * pi/2, radius
/// fraction j/steps of the distance to the budget line.
inline double inner_brute_force(double mu0, double s0, double mu1, double s1, double delta,
                                double nu0, double nu1, double alpha, int rays, int steps) {
  const double spare = delta / alpha - (nu0 - mu0) * (nu0 - mu0) - (nu1 - mu1) * (nu1 - mu1);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= rays; ++i) {
    const double th = 0.5 * std::numbers::pi * i / rays;
    const double c = std::cos(th);
    const double s = std::sin(th);
    const double reach = spare / (c + s);
    for (int j = 0; j <= steps; ++j) {
      const double r = reach * j / steps;
      best = std::min(best, matched_kl(mu0, s0, mu1, s1, nu0, nu1, alpha, s0 + r * c, s1 + r * s));
    }
  }
  return best;
}

}  // namespace oracle
