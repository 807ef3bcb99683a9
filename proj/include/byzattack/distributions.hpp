#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "byzattack/random.hpp"

namespace byzattack {

/// Variances below this are rejected, never clamped.
inline constexpr double kMinVariance = 1e-12;

/// Scalar normal distribution N(mean, variance).
class Gaussian {
 public:
  /// Throws InvalidArgument if variance < kMinVariance or either field is not
  /// finite.
  Gaussian(double mean, double variance);

  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double stddev() const;

  friend bool operator==(const Gaussian&, const Gaussian&) = default;

 private:
  double mean_;
  double variance_;
};

/// (1 - weight) * nominal + weight * attacked.
class GaussianMixture {
 public:
  GaussianMixture(double weight, Gaussian nominal, Gaussian attacked);

  double weight() const { return weight_; }
  const Gaussian& nominal() const { return nominal_; }
  const Gaussian& attacked() const { return attacked_; }

 private:
  double weight_;
  Gaussian nominal_;
  Gaussian attacked_;
};

double gaussian_log_pdf(const Gaussian& g, double x);

/// Closed-form D(p || q) in nats.
double gaussian_kl(const Gaussian& p, const Gaussian& q);

/// ln of the mixture density, evaluated in log-sum-exp form so that it stays
/// finite far in the tails of both components.
double mixture_log_pdf(const GaussianMixture& m, double x);

/// log(exp(a) + exp(b)) without overflow/underflow; -inf inputs allowed.
double log_add_exp(double a, double b);

/// Draw i uses stream.normal(i).
std::vector<double> sample_gaussian(const Gaussian& g, const SampleStream& stream, std::size_t n);

/// Draw i selects the attacked component when stream.child(1).uniform(i) <
/// weight and then takes its value from stream.normal(i).
std::vector<double> sample_mixture(const GaussianMixture& m, const SampleStream& stream,
                                   std::size_t n);

/// Single mixture draw at a given index; sample_mixture(m, s, n)[i] ==
/// mixture_draw(m, s, i).
double mixture_draw(const GaussianMixture& m, const SampleStream& stream, std::size_t index);

}  // namespace byzattack
