#include "byzattack/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "byzattack/errors.hpp"

namespace byzattack {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

SampleStream selection_stream(const SampleStream& stream) { return stream.child(1); }

double draw_with_selection(const GaussianMixture& m, const SampleStream& values,
                           const SampleStream& selection, std::size_t index) {
  const bool attacked = selection.uniform(index) < m.weight();
  const Gaussian& component = attacked ? m.attacked() : m.nominal();
  return component.mean() + component.stddev() * values.normal(index);
}

}  // namespace

Gaussian::Gaussian(double mean, double variance) : mean_(mean), variance_(variance) {
  if (!std::isfinite(mean)) {
    throw InvalidArgument("Gaussian mean must be finite");
  }
  if (!std::isfinite(variance) || variance < kMinVariance) {
    throw InvalidArgument("Gaussian variance must be >= 1e-12 and finite, got " +
                          std::to_string(variance));
  }
}

double Gaussian::stddev() const { return std::sqrt(variance_); }

GaussianMixture::GaussianMixture(double weight, Gaussian nominal, Gaussian attacked)
    : weight_(weight), nominal_(nominal), attacked_(attacked) {
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw InvalidArgument("mixture weight must lie in [0, 1], got " + std::to_string(weight));
  }
}

double gaussian_log_pdf(const Gaussian& g, double x) {
  const double d = x - g.mean();
  return -0.5 * (kLogTwoPi + std::log(g.variance())) - d * d / (2.0 * g.variance());
}

double gaussian_kl(const Gaussian& p, const Gaussian& q) {
  const double ratio = p.variance() / q.variance();
  const double d = q.mean() - p.mean();
  return 0.5 * (ratio + d * d / q.variance() - 1.0 - std::log(ratio));
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double mixture_log_pdf(const GaussianMixture& m, double x) {
  const double w = m.weight();
  // log(0) = -inf is fine here: log_add_exp drops the vanished component.
  const double nominal = w < 1.0 ? std::log1p(-w) + gaussian_log_pdf(m.nominal(), x)
                                 : -std::numeric_limits<double>::infinity();
  const double attacked = w > 0.0 ? std::log(w) + gaussian_log_pdf(m.attacked(), x)
                                  : -std::numeric_limits<double>::infinity();
  return log_add_exp(nominal, attacked);
}

std::vector<double> sample_gaussian(const Gaussian& g, const SampleStream& stream, std::size_t n) {
  std::vector<double> out(n);
  const double sd = g.stddev();
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = g.mean() + sd * stream.normal(i);
  }
  return out;
}

std::vector<double> sample_mixture(const GaussianMixture& m, const SampleStream& stream,
                                   std::size_t n) {
  std::vector<double> out(n);
  const SampleStream selection = selection_stream(stream);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = draw_with_selection(m, stream, selection, i);
  }
  return out;
}

double mixture_draw(const GaussianMixture& m, const SampleStream& stream, std::size_t index) {
  return draw_with_selection(m, stream, selection_stream(stream), index);
}

}  // namespace byzattack
