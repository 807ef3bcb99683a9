#pragma once

// Run configuration: one flat JSON document, every key optional.
//
//   model        mu0, sigma0, mu1, sigma1, delta     (sigma* are variances)
//   optimizer    max_iters, step_nu0, step_nu0_decay, step_nu1,
//                step_nu1_decay, step_alpha, step_alpha_decay,
//                convergence_tol, alpha_min, alpha_max,
//                init_nu0, init_nu1, init_alpha      (all three or none)
//                fixed_alpha                         (pins alpha; no alpha moves)
//   sweep        alpha_grid                          (array of reals in (0,1))
//   divergence   method, K, quadrature_nodes
//   attack       attack_nu0, attack_gamma0, attack_nu1, attack_gamma1,
//                attack_alpha                        (all five or none)
//   detection    sensor_count, trials, target_pfa, threshold_rule,
//                threshold                           (number, "inf" or "-inf")
//   validation   oracle_resolution, solver_trials
//   run          seed, format ("csv" | "json"), out
//
// Unknown keys and invalid values raise ConfigError naming the key.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "byzattack/coordinate_descent.hpp"
#include "byzattack/detection.hpp"
#include "byzattack/divergence.hpp"
#include "byzattack/model.hpp"

namespace byzattack::cli {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class OutputFormat { csv, json };

struct AttackSpec {
  double nu0 = 0.0;
  double gamma0 = 0.0;
  double nu1 = 0.0;
  double gamma1 = 0.0;
  double alpha = 0.5;
};

struct RunConfig {
  double mu0 = 2.0;
  double sigma0 = 2.8;
  double mu1 = 10.0;
  double sigma1 = 3.1;
  double delta = 80.0;

  SolverConfig solver;
  std::optional<double> fixed_alpha;
  std::vector<double> alpha_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  DivergenceMethod method = DivergenceMethod::monte_carlo;
  std::size_t K = 100000;
  std::size_t quadrature_nodes = 20001;

  std::optional<AttackSpec> attack;

  std::size_t sensor_count = 10;
  std::size_t trials = 1000000;
  double target_pfa = 0.0004;
  ThresholdRule threshold_rule = ThresholdRule::attacked_calibrated;
  double threshold = 0.0;

  std::size_t oracle_resolution = 1000;
  std::size_t solver_trials = 50;

  std::uint64_t seed = 1;
  OutputFormat format = OutputFormat::csv;
  std::string out;

  NominalModel model() const;
  /// Throws ConfigError when attack is unset or violates Gamma >= Sigma.
  AttackScenario attack_scenario() const;
};

/// Defaults overlaid with the keys of `doc`; validates everything.
RunConfig parse_config(const nlohmann::json& doc);

/// Resolved configuration as a JSON object (round-trips through
/// parse_config).
nlohmann::json to_json(const RunConfig& cfg);

/// Finite numbers as JSON numbers, infinities as "inf" / "-inf".
nlohmann::json json_number(double value);

/// Locale-independent shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace byzattack::cli
