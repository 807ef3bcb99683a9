#include "byzattack/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include "byzattack/errors.hpp"

namespace byzattack::cli {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "mu0", "sigma0", "mu1", "sigma1", "delta",
      "max_iters", "step_nu0", "step_nu0_decay", "step_nu1", "step_nu1_decay", "step_alpha",
      "step_alpha_decay", "convergence_tol", "alpha_min", "alpha_max", "init_nu0", "init_nu1",
      "init_alpha", "fixed_alpha", "alpha_grid",
      "method", "K", "quadrature_nodes",
      "attack_nu0", "attack_gamma0", "attack_nu1", "attack_gamma1", "attack_alpha",
      "sensor_count", "trials", "target_pfa", "threshold_rule", "threshold",
      "oracle_resolution", "solver_trials",
      "seed", "format", "out", "schema_version"};
  return keys;
}

double get_real(const json& doc, const std::string& key, double fallback) {
  if (!doc.contains(key)) return fallback;
  const json& v = doc.at(key);
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ConfigError(key, "expected a number, got string \"" + s + "\"");
  }
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

double get_finite(const json& doc, const std::string& key, double fallback) {
  const double v = get_real(doc, key, fallback);
  if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
  return v;
}

std::uint64_t get_count(const json& doc, const std::string& key, std::uint64_t fallback) {
  if (!doc.contains(key)) return fallback;
  const json& v = doc.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const std::int64_t i = v.get<std::int64_t>();
    if (i < 0) throw ConfigError(key, "must be a non-negative integer");
    return static_cast<std::uint64_t>(i);
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d < 1.8e19 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
    throw ConfigError(key, "must be a non-negative integer");
  }
  throw ConfigError(key, "expected an integer");
}

std::string get_string(const json& doc, const std::string& key, const std::string& fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_string()) throw ConfigError(key, "expected a string");
  return doc.at(key).get<std::string>();
}

void require(bool condition, const std::string& key, const std::string& message) {
  if (!condition) throw ConfigError(key, message);
}

/// All-or-none groups: returns true if every key is present.
bool group_present(const json& doc, std::initializer_list<const char*> keys) {
  std::size_t present = 0;
  for (const char* k : keys) present += doc.contains(k) ? 1 : 0;
  if (present != 0 && present != keys.size()) {
    for (const char* k : keys) {
      if (!doc.contains(k)) throw ConfigError(k, "missing; this group must be given in full");
    }
  }
  return present == keys.size();
}

}  // namespace

NominalModel RunConfig::model() const {
  return {Gaussian(mu0, sigma0), Gaussian(mu1, sigma1), delta};
}

AttackScenario RunConfig::attack_scenario() const {
  if (!attack) {
    throw ConfigError("attack_nu0", "an explicit attack (attack_nu0, attack_gamma0, attack_nu1, "
                                    "attack_gamma1, attack_alpha) is required");
  }
  if (attack->gamma0 < sigma0) throw ConfigError("attack_gamma0", "must be >= sigma0");
  if (attack->gamma1 < sigma1) throw ConfigError("attack_gamma1", "must be >= sigma1");
  return {Gaussian(mu0, sigma0), Gaussian(mu1, sigma1), Gaussian(attack->nu0, attack->gamma0),
          Gaussian(attack->nu1, attack->gamma1), attack->alpha};
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "configuration must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!known_keys().contains(key)) throw ConfigError(key, "unknown configuration key");
  }

  RunConfig cfg;
  cfg.mu0 = get_finite(doc, "mu0", cfg.mu0);
  cfg.sigma0 = get_finite(doc, "sigma0", cfg.sigma0);
  cfg.mu1 = get_finite(doc, "mu1", cfg.mu1);
  cfg.sigma1 = get_finite(doc, "sigma1", cfg.sigma1);
  cfg.delta = get_finite(doc, "delta", cfg.delta);
  require(cfg.sigma0 >= kMinVariance, "sigma0", "variance must be > 0 (>= 1e-12)");
  require(cfg.sigma1 >= kMinVariance, "sigma1", "variance must be > 0 (>= 1e-12)");
  require(cfg.delta > 0.0, "delta", "energy budget must be > 0");

  SolverConfig& s = cfg.solver;
  s.max_iters = get_count(doc, "max_iters", s.max_iters);
  s.step_nu0.initial = get_finite(doc, "step_nu0", s.step_nu0.initial);
  s.step_nu0.decay = get_finite(doc, "step_nu0_decay", s.step_nu0.decay);
  s.step_nu1.initial = get_finite(doc, "step_nu1", s.step_nu1.initial);
  s.step_nu1.decay = get_finite(doc, "step_nu1_decay", s.step_nu1.decay);
  s.step_alpha.initial = get_finite(doc, "step_alpha", s.step_alpha.initial);
  s.step_alpha.decay = get_finite(doc, "step_alpha_decay", s.step_alpha.decay);
  s.convergence_tol = get_finite(doc, "convergence_tol", s.convergence_tol);
  s.alpha_bounds.min = get_finite(doc, "alpha_min", s.alpha_bounds.min);
  s.alpha_bounds.max = get_finite(doc, "alpha_max", s.alpha_bounds.max);
  require(s.max_iters >= 1, "max_iters", "must be >= 1");
  require(s.step_nu0.initial > 0.0, "step_nu0", "must be > 0");
  require(s.step_nu1.initial > 0.0, "step_nu1", "must be > 0");
  require(s.step_alpha.initial > 0.0, "step_alpha", "must be > 0");
  require(s.step_nu0.decay > 0.0, "step_nu0_decay", "must be > 0");
  require(s.step_nu1.decay > 0.0, "step_nu1_decay", "must be > 0");
  require(s.step_alpha.decay > 0.0, "step_alpha_decay", "must be > 0");
  require(s.convergence_tol >= 0.0, "convergence_tol", "must be >= 0");
  require(s.alpha_bounds.min > 0.0, "alpha_min", "must be > 0");
  require(s.alpha_bounds.max < 1.0, "alpha_max", "must be < 1");
  require(s.alpha_bounds.min < s.alpha_bounds.max, "alpha_min", "must be < alpha_max");
  if (group_present(doc, {"init_nu0", "init_nu1", "init_alpha"})) {
    s.init = OuterPoint{get_finite(doc, "init_nu0", 0.0), get_finite(doc, "init_nu1", 0.0),
                        get_finite(doc, "init_alpha", 0.5)};
    require(s.init->alpha > 0.0 && s.init->alpha < 1.0, "init_alpha", "must lie in (0, 1)");
  }
  if (doc.contains("fixed_alpha")) {
    const double a = get_finite(doc, "fixed_alpha", 0.5);
    require(a > 0.0 && a < 1.0, "fixed_alpha", "must lie in (0, 1)");
    cfg.fixed_alpha = a;
    s.optimize_alpha = false;
    s.alpha_bounds.min = std::min(s.alpha_bounds.min, a);
    s.alpha_bounds.max = std::max(s.alpha_bounds.max, a);
    if (s.init) {
      s.init->alpha = a;
    } else {
      s.init = default_init_fixed_alpha(cfg.model(), a);
    }
  }

  if (doc.contains("alpha_grid")) {
    const json& grid = doc.at("alpha_grid");
    require(grid.is_array() && !grid.empty(), "alpha_grid", "expected a non-empty array");
    cfg.alpha_grid.clear();
    for (const json& v : grid) {
      require(v.is_number(), "alpha_grid", "entries must be numbers");
      const double a = v.get<double>();
      require(a > 0.0 && a < 1.0, "alpha_grid", "entries must lie in (0, 1)");
      cfg.alpha_grid.push_back(a);
    }
  }

  const std::string method = get_string(doc, "method", std::string(to_string(cfg.method)));
  const auto parsed_method = parse_divergence_method(method);
  require(parsed_method.has_value(), "method",
          "expected monte_carlo | upper_bound | gaussian_approx | quadrature");
  cfg.method = *parsed_method;
  cfg.K = get_count(doc, "K", cfg.K);
  require(cfg.K >= 1, "K", "must be >= 1");
  cfg.quadrature_nodes = get_count(doc, "quadrature_nodes", cfg.quadrature_nodes);
  require(cfg.quadrature_nodes >= 10000 && cfg.quadrature_nodes % 2 == 1, "quadrature_nodes",
          "must be odd and >= 10000");

  if (group_present(doc, {"attack_nu0", "attack_gamma0", "attack_nu1", "attack_gamma1",
                          "attack_alpha"})) {
    AttackSpec a;
    a.nu0 = get_finite(doc, "attack_nu0", 0.0);
    a.gamma0 = get_finite(doc, "attack_gamma0", 0.0);
    a.nu1 = get_finite(doc, "attack_nu1", 0.0);
    a.gamma1 = get_finite(doc, "attack_gamma1", 0.0);
    a.alpha = get_finite(doc, "attack_alpha", 0.0);
    require(a.alpha > 0.0 && a.alpha < 1.0, "attack_alpha", "must lie in (0, 1)");
    require(a.gamma0 >= cfg.sigma0, "attack_gamma0", "must be >= sigma0");
    require(a.gamma1 >= cfg.sigma1, "attack_gamma1", "must be >= sigma1");
    cfg.attack = a;
  }

  cfg.sensor_count = get_count(doc, "sensor_count", cfg.sensor_count);
  require(cfg.sensor_count >= 1, "sensor_count", "must be >= 1");
  cfg.trials = get_count(doc, "trials", cfg.trials);
  require(cfg.trials >= 1, "trials", "must be >= 1");
  cfg.target_pfa = get_finite(doc, "target_pfa", cfg.target_pfa);
  require(cfg.target_pfa > 0.0 && cfg.target_pfa < 1.0, "target_pfa", "must lie in (0, 1)");
  const std::string rule = get_string(doc, "threshold_rule", std::string(to_string(cfg.threshold_rule)));
  const auto parsed_rule = parse_threshold_rule(rule);
  require(parsed_rule.has_value(), "threshold_rule",
          "expected nominal-calibrated | attacked-calibrated | explicit");
  cfg.threshold_rule = *parsed_rule;
  cfg.threshold = get_real(doc, "threshold", cfg.threshold);
  require(!std::isnan(cfg.threshold), "threshold", "must not be NaN");
  if (cfg.threshold_rule == ThresholdRule::explicit_value) {
    require(doc.contains("threshold"), "threshold", "required when threshold_rule is explicit");
  }

  cfg.oracle_resolution = get_count(doc, "oracle_resolution", cfg.oracle_resolution);
  require(cfg.oracle_resolution >= 1, "oracle_resolution", "must be >= 1");
  cfg.solver_trials = get_count(doc, "solver_trials", cfg.solver_trials);

  cfg.seed = get_count(doc, "seed", cfg.seed);
  const std::string format = get_string(doc, "format", "csv");
  require(format == "csv" || format == "json", "format", "expected csv | json");
  cfg.format = format == "csv" ? OutputFormat::csv : OutputFormat::json;
  cfg.out = get_string(doc, "out", cfg.out);
  return cfg;
}

json json_number(double value) {
  if (std::isfinite(value)) return value;
  if (std::isnan(value)) return "nan";
  return value > 0 ? "inf" : "-inf";
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

json to_json(const RunConfig& cfg) {
  const SolverConfig& s = cfg.solver;
  json doc = {
      {"mu0", cfg.mu0},
      {"sigma0", cfg.sigma0},
      {"mu1", cfg.mu1},
      {"sigma1", cfg.sigma1},
      {"delta", cfg.delta},
      {"max_iters", s.max_iters},
      {"step_nu0", s.step_nu0.initial},
      {"step_nu0_decay", s.step_nu0.decay},
      {"step_nu1", s.step_nu1.initial},
      {"step_nu1_decay", s.step_nu1.decay},
      {"step_alpha", s.step_alpha.initial},
      {"step_alpha_decay", s.step_alpha.decay},
      {"convergence_tol", s.convergence_tol},
      {"alpha_min", s.alpha_bounds.min},
      {"alpha_max", s.alpha_bounds.max},
      {"alpha_grid", cfg.alpha_grid},
      {"method", std::string(to_string(cfg.method))},
      {"K", cfg.K},
      {"quadrature_nodes", cfg.quadrature_nodes},
      {"sensor_count", cfg.sensor_count},
      {"trials", cfg.trials},
      {"target_pfa", cfg.target_pfa},
      {"threshold_rule", std::string(to_string(cfg.threshold_rule))},
      {"threshold", json_number(cfg.threshold)},
      {"oracle_resolution", cfg.oracle_resolution},
      {"solver_trials", cfg.solver_trials},
      {"seed", cfg.seed},
      {"format", cfg.format == OutputFormat::csv ? "csv" : "json"},
      {"out", cfg.out},
  };
  if (cfg.fixed_alpha) doc["fixed_alpha"] = *cfg.fixed_alpha;
  if (s.init) {
    doc["init_nu0"] = s.init->nu0;
    doc["init_nu1"] = s.init->nu1;
    doc["init_alpha"] = s.init->alpha;
  }
  if (cfg.attack) {
    doc["attack_nu0"] = cfg.attack->nu0;
    doc["attack_gamma0"] = cfg.attack->gamma0;
    doc["attack_nu1"] = cfg.attack->nu1;
    doc["attack_gamma1"] = cfg.attack->gamma1;
    doc["attack_alpha"] = cfg.attack->alpha;
  }
  return doc;
}

}  // namespace byzattack::cli
