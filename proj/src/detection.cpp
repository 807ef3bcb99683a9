#include "byzattack/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

#include "byzattack/errors.hpp"

namespace byzattack {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr std::size_t kTrialsPerChunk = 4096;
constexpr std::size_t kMinExpectedExceedances = 100;

unsigned worker_count(const DetectorSpec& spec, std::size_t chunks) {
  unsigned w = spec.workers != 0 ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(chunks, 1)));
}

/// Runs body(chunk) for every chunk; chunk boundaries are fixed by
/// kTrialsPerChunk, so the split across threads cannot affect results.
template <typename Body>
void for_each_chunk(std::size_t trials, unsigned workers, Body body) {
  const std::size_t chunks = (trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < chunks; c += workers) {
        const std::size_t begin = c * kTrialsPerChunk;
        body(begin, std::min(trials, begin + kTrialsPerChunk));
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

void validate(const DetectorSpec& spec) {
  if (spec.sensor_count < 1) throw InvalidArgument("sensor_count must be >= 1");
  if (spec.trials < 1) throw InvalidArgument("trials must be >= 1");
  if (std::isnan(spec.threshold)) throw InvalidArgument("threshold must not be NaN");
}

double llr_statistic(const NominalModel& model, std::span<const double> samples) {
  if (samples.empty()) throw InvalidArgument("llr_statistic needs at least one sample");
  double sum = 0.0;
  for (double x : samples) {
    sum += gaussian_log_pdf(model.h1, x) - gaussian_log_pdf(model.h0, x);
  }
  return sum;
}

double binomial_ci_halfwidth(std::size_t events, std::size_t trials) {
  if (trials == 0) return 1.0;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(events) / n;
  if (events < 10) {
    const double x = static_cast<double>(events);
    const double lower = events == 0 ? 0.0 : boost::math::ibeta_inv(x, n - x + 1.0, 0.025);
    const double upper = events == trials ? 1.0 : boost::math::ibeta_inv(x + 1.0, n - x, 0.975);
    return std::max(upper - p, p - lower);
  }
  return kZ95 * std::sqrt(p * (1.0 - p) / n) + 0.5 / n;
}

std::vector<double> simulate_statistics(const NominalModel& model,
                                        const std::optional<AttackScenario>& attack, int hypothesis,
                                        const DetectorSpec& spec) {
  validate(spec);
  if (hypothesis != 0 && hypothesis != 1) throw InvalidArgument("hypothesis must be 0 or 1");
  const Gaussian& nominal = hypothesis == 0 ? model.h0 : model.h1;
  const std::optional<GaussianMixture> mixture =
      attack ? std::optional<GaussianMixture>(hypothesis == 0 ? attack->mixture0() : attack->mixture1())
             : std::nullopt;
  const SampleStream values = spec.stream.child(static_cast<std::uint64_t>(hypothesis));
  const SampleStream selection = values.child(1);
  const std::size_t m = spec.sensor_count;

  std::vector<double> stats(spec.trials);
  const std::size_t chunks = (spec.trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
  for_each_chunk(spec.trials, worker_count(spec, chunks), [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(m);
    for (std::size_t t = begin; t < end; ++t) {
      for (std::size_t j = 0; j < m; ++j) {
        const std::uint64_t idx = static_cast<std::uint64_t>(t) * m + j;
        const Gaussian* component = &nominal;
        if (mixture && selection.uniform(idx) < mixture->weight()) component = &mixture->attacked();
        x[j] = component->mean() + component->stddev() * values.normal(idx);
      }
      stats[t] = llr_statistic(model, x);
    }
  });
  return stats;
}

ThresholdCalibration calibrate_threshold(const NominalModel& model,
                                         const std::optional<AttackScenario>& attack,
                                         const DetectorSpec& spec, double target_pfa) {
  if (!(target_pfa > 0.0 && target_pfa < 1.0)) {
    throw InvalidArgument("target_pfa must lie in (0, 1)");
  }
  std::vector<double> stats = simulate_statistics(model, attack, 0, spec);
  const std::size_t n = stats.size();
  const auto exceed = static_cast<std::size_t>(std::floor(target_pfa * static_cast<double>(n)));
  ThresholdCalibration out;
  if (exceed >= n) {
    out.threshold = -std::numeric_limits<double>::infinity();
  } else {
    auto nth = stats.begin() + static_cast<std::ptrdiff_t>(n - exceed - 1);
    std::nth_element(stats.begin(), nth, stats.end());
    out.threshold = *nth;
  }
  out.insufficient_trials = target_pfa * static_cast<double>(n) < kMinExpectedExceedances;
  out.pfa_ci_halfwidth = binomial_ci_halfwidth(exceed, n) * (out.insufficient_trials ? 2.0 : 1.0);
  return out;
}

ErrorEstimate simulate_error_probs(const NominalModel& model,
                                   const std::optional<AttackScenario>& attack,
                                   const DetectorSpec& spec) {
  const std::vector<double> h0 = simulate_statistics(model, attack, 0, spec);
  const std::vector<double> h1 = simulate_statistics(model, attack, 1, spec);
  ErrorEstimate out;
  for (double s : h0) (s > spec.threshold ? out.false_alarms : out.correct_rejections)++;
  for (double s : h1) (s > spec.threshold ? out.detections : out.misses)++;
  const double n = static_cast<double>(spec.trials);
  out.p_fa = static_cast<double>(out.false_alarms) / n;
  out.p_m = static_cast<double>(out.misses) / n;
  out.ci_halfwidth_fa = binomial_ci_halfwidth(out.false_alarms, spec.trials);
  out.ci_halfwidth_m = binomial_ci_halfwidth(out.misses, spec.trials);
  return out;
}

std::string_view to_string(ThresholdRule r) {
  switch (r) {
    case ThresholdRule::nominal_calibrated: return "nominal-calibrated";
    case ThresholdRule::attacked_calibrated: return "attacked-calibrated";
    case ThresholdRule::explicit_value: return "explicit";
  }
  return "unknown";
}

std::optional<ThresholdRule> parse_threshold_rule(std::string_view name) {
  for (ThresholdRule r : {ThresholdRule::nominal_calibrated, ThresholdRule::attacked_calibrated,
                          ThresholdRule::explicit_value}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

ExponentProbe error_exponent_probe(const NominalModel& model,
                                   const std::optional<AttackScenario>& attack,
                                   const std::vector<std::size_t>& m_grid, double target_pfa,
                                   const DetectorSpec& spec) {
  if (!std::is_sorted(m_grid.begin(), m_grid.end()) ||
      std::adjacent_find(m_grid.begin(), m_grid.end()) != m_grid.end()) {
    throw InvalidArgument("m_grid must be strictly increasing");
  }
  ExponentProbe out;
  const AttackScenario scenario = attack.value_or(AttackScenario::no_attack(model.h0, model.h1));
  out.reference_kl = kl_quadrature_oracle(scenario);

  for (std::size_t m : m_grid) {
    DetectorSpec local = spec;
    local.sensor_count = m;
    const ThresholdCalibration cal = calibrate_threshold(model, attack, local, target_pfa);
    local.threshold = cal.threshold;
    local.stream = spec.stream.child(2);
    const std::vector<double> h1 = simulate_statistics(model, attack, 1, local);
    const auto misses = static_cast<std::size_t>(
        std::count_if(h1.begin(), h1.end(), [&](double s) { return s <= local.threshold; }));

    ExponentPoint point;
    point.m = m;
    point.threshold = cal.threshold;
    point.p_m = static_cast<double>(misses) / static_cast<double>(local.trials);
    const double md = static_cast<double>(m);
    if (misses == 0) {
      point.exponent = std::log(static_cast<double>(local.trials)) / md;
      point.exponent_is_lower_bound = true;
    } else {
      point.exponent = -std::log(point.p_m) / md;
    }
    out.points.push_back(point);
  }
  return out;
}

}  // namespace byzattack
