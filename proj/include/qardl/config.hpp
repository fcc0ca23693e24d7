#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qardl/ardl.hpp"
#include "qardl/qardl.hpp"
#include "qardl/simulation.hpp"
#include "qardl/unit_root.hpp"

namespace qardl {

struct LagConfig {
  bool pinned = false;
  ModelSpec spec;  // used when pinned
  int max_p = 4;
  int max_q = 4;
  Criterion criterion = Criterion::bic;
};

struct UnitRootConfig {
  Deterministic deterministic = Deterministic::constant;
  int max_lag = -1;    // automatic
  int bandwidth = -1;  // automatic
};

struct SimulationConfig {
  DgpSpec dgp;
  int replications = 200;
  Estimator estimator = Estimator::ardl;
  std::vector<double> quantiles = {0.5};
};

// The declarative run description: one JSON file drives every command, with
// a handful of CLI flag overrides. Serialization round-trips losslessly.
struct RunConfig {
  std::string input_path;
  std::string date_column = "date";
  std::map<std::string, VariableRole> roles;
  std::map<std::string, bool> log_transform;  // variables absent default to true
  LagConfig lags;
  std::vector<double> quantiles = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::string output_dir = "artifacts";
  std::uint64_t seed = 42;
  SeMethod se = SeMethod::kernel;
  int bootstrap_replications = 500;
  bool two_stage_projection = false;
  std::vector<double> significance_levels = {0.01, 0.05, 0.10};
  UnitRootConfig unit_root;
  bool stationarity_warnings = true;
  Execution exec = Execution::parallel;
  SimulationConfig simulation;

  bool wants_log(const std::string& variable) const {
    auto it = log_transform.find(variable);
    return it == log_transform.end() ? true : it->second;
  }
};

// Strict JSON (de)serialization: unknown keys, malformed values, and
// inconsistent role maps raise ConfigError.
nlohmann::ordered_json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::ordered_json& j);
RunConfig load_config(const std::string& path);

VariableRole role_from_name(const std::string& name);

}  // namespace qardl
