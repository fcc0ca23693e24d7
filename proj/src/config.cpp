#include "qardl/config.hpp"

#include <fstream>
#include <set>

#include "qardl/errors.hpp"

namespace qardl {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& what) { throw ConfigError("config: " + what); }

// Rejects keys outside the allowed set so typos fail loudly.
void check_keys(const ordered_json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) bad(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) bad("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_or(const ordered_json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    bad("key '" + key + "' has the wrong type");
  }
}

std::string criterion_name(Criterion c) { return c == Criterion::aic ? "aic" : "bic"; }
Criterion criterion_from(const std::string& s) {
  if (s == "aic") return Criterion::aic;
  if (s == "bic") return Criterion::bic;
  bad("criterion must be 'aic' or 'bic', got '" + s + "'");
}

std::string se_name(SeMethod m) { return m == SeMethod::kernel ? "kernel" : "bootstrap"; }
SeMethod se_from(const std::string& s) {
  if (s == "kernel") return SeMethod::kernel;
  if (s == "bootstrap") return SeMethod::bootstrap;
  bad("se must be 'kernel' or 'bootstrap', got '" + s + "'");
}

std::string det_name(Deterministic d) {
  return d == Deterministic::constant ? "constant" : "constant_trend";
}
Deterministic det_from(const std::string& s) {
  if (s == "constant") return Deterministic::constant;
  if (s == "constant_trend") return Deterministic::constant_trend;
  bad("deterministic must be 'constant' or 'constant_trend', got '" + s + "'");
}

std::string exec_name(Execution e) { return e == Execution::serial ? "serial" : "parallel"; }
Execution exec_from(const std::string& s) {
  if (s == "serial") return Execution::serial;
  if (s == "parallel") return Execution::parallel;
  bad("execution must be 'serial' or 'parallel', got '" + s + "'");
}

std::string estimator_name(Estimator e) { return e == Estimator::ardl ? "ardl" : "qardl"; }
Estimator estimator_from(const std::string& s) {
  if (s == "ardl") return Estimator::ardl;
  if (s == "qardl") return Estimator::qardl;
  bad("estimator must be 'ardl' or 'qardl', got '" + s + "'");
}

std::string error_kind_name(ErrorKind e) {
  switch (e) {
    case ErrorKind::gaussian: return "gaussian";
    case ErrorKind::student_t: return "student_t";
    case ErrorKind::location_scale: return "location_scale";
  }
  return "gaussian";
}
ErrorKind error_kind_from(const std::string& s) {
  if (s == "gaussian") return ErrorKind::gaussian;
  if (s == "student_t") return ErrorKind::student_t;
  if (s == "location_scale") return ErrorKind::location_scale;
  bad("error kind must be gaussian, student_t, or location_scale; got '" + s + "'");
}

std::string process_name(RegressorProcess p) {
  return p == RegressorProcess::random_walk ? "random_walk" : "ar1";
}
RegressorProcess process_from(const std::string& s) {
  if (s == "random_walk") return RegressorProcess::random_walk;
  if (s == "ar1") return RegressorProcess::ar1;
  bad("regressor process must be 'random_walk' or 'ar1', got '" + s + "'");
}

ordered_json spec_to_json(const ModelSpec& spec) {
  ordered_json q = ordered_json::object();
  for (VariableRole role : regressor_roles()) {
    auto it = spec.q.find(role);
    if (it != spec.q.end()) q[role_name(role)] = it->second;
  }
  return ordered_json{{"p", spec.p}, {"q", q}};
}

ModelSpec spec_from_json(const ordered_json& j) {
  check_keys(j, "lags.pinned", {"p", "q"});
  ModelSpec spec;
  spec.p = get_or<int>(j, "p", 1);
  if (j.contains("q")) {
    if (!j.at("q").is_object()) bad("lags.pinned.q must be an object");
    for (const auto& [key, value] : j.at("q").items()) {
      if (!value.is_number_integer()) bad("lag order for '" + key + "' must be an integer");
      spec.q[role_from_name(key)] = value.get<int>();
    }
  }
  spec.validate();
  return spec;
}

ordered_json dgp_to_json(const DgpSpec& d) {
  ordered_json j;
  j["rho"] = d.rho;
  j["beta"] = d.beta;
  j["alpha"] = d.alpha;
  j["dep_short_run"] = d.dep_short_run;
  j["reg_short_run"] = d.reg_short_run;
  j["error"] = error_kind_name(d.error);
  j["sigma"] = d.sigma;
  j["t_df"] = d.t_df;
  j["scale_regressor"] = d.scale_regressor;
  j["scale_slope"] = d.scale_slope;
  j["regressor_process"] = process_name(d.regressor_process);
  j["ar1_coefficient"] = d.ar1_coefficient;
  j["regressor_sigma"] = d.regressor_sigma;
  j["n"] = d.n;
  j["seed"] = d.seed;
  return j;
}

DgpSpec dgp_from_json(const ordered_json& j) {
  check_keys(j, "simulation.dgp",
             {"rho", "beta", "alpha", "dep_short_run", "reg_short_run", "error", "sigma",
              "t_df", "scale_regressor", "scale_slope", "regressor_process",
              "ar1_coefficient", "regressor_sigma", "n", "seed"});
  DgpSpec d;
  d.rho = get_or<double>(j, "rho", d.rho);
  d.beta = get_or<std::vector<double>>(j, "beta", d.beta);
  d.alpha = get_or<double>(j, "alpha", d.alpha);
  d.dep_short_run = get_or<std::vector<double>>(j, "dep_short_run", d.dep_short_run);
  d.reg_short_run =
      get_or<std::vector<std::vector<double>>>(j, "reg_short_run", d.reg_short_run);
  d.error = error_kind_from(get_or<std::string>(j, "error", error_kind_name(d.error)));
  d.sigma = get_or<double>(j, "sigma", d.sigma);
  d.t_df = get_or<int>(j, "t_df", d.t_df);
  d.scale_regressor = get_or<int>(j, "scale_regressor", d.scale_regressor);
  d.scale_slope = get_or<double>(j, "scale_slope", d.scale_slope);
  d.regressor_process =
      process_from(get_or<std::string>(j, "regressor_process", process_name(d.regressor_process)));
  d.ar1_coefficient = get_or<double>(j, "ar1_coefficient", d.ar1_coefficient);
  d.regressor_sigma = get_or<double>(j, "regressor_sigma", d.regressor_sigma);
  d.n = get_or<int>(j, "n", d.n);
  d.seed = get_or<std::uint64_t>(j, "seed", d.seed);
  return d;
}

}  // namespace

VariableRole role_from_name(const std::string& name) {
  for (VariableRole role :
       {VariableRole::dependent, VariableRole::epu, VariableRole::sp500,
        VariableRole::csi300, VariableRole::interest, VariableRole::panic}) {
    if (role_name(role) == name) return role;
  }
  bad("unknown role '" + name + "'");
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["schema"] = "qardl/config/v1";
  j["input"] = c.input_path;
  j["date_column"] = c.date_column;
  ordered_json roles = ordered_json::object();
  for (const auto& [name, role] : c.roles) roles[name] = role_name(role);
  j["roles"] = roles;
  ordered_json logs = ordered_json::object();
  for (const auto& [name, flag] : c.log_transform) logs[name] = flag;
  j["log_transform"] = logs;
  if (c.lags.pinned) {
    j["lags"] = ordered_json{{"pinned", spec_to_json(c.lags.spec)}};
  } else {
    j["lags"] = ordered_json{{"select",
                              ordered_json{{"max_p", c.lags.max_p},
                                           {"max_q", c.lags.max_q},
                                           {"criterion", criterion_name(c.lags.criterion)}}}};
  }
  j["quantiles"] = c.quantiles;
  j["out"] = c.output_dir;
  j["seed"] = c.seed;
  j["se"] = se_name(c.se);
  j["bootstrap_replications"] = c.bootstrap_replications;
  j["two_stage_projection"] = c.two_stage_projection;
  j["significance_levels"] = c.significance_levels;
  j["unit_root"] = ordered_json{{"deterministic", det_name(c.unit_root.deterministic)},
                                {"max_lag", c.unit_root.max_lag},
                                {"bandwidth", c.unit_root.bandwidth}};
  j["stationarity_warnings"] = c.stationarity_warnings;
  j["execution"] = exec_name(c.exec);
  j["simulation"] = ordered_json{{"dgp", dgp_to_json(c.simulation.dgp)},
                                 {"replications", c.simulation.replications},
                                 {"estimator", estimator_name(c.simulation.estimator)},
                                 {"quantiles", c.simulation.quantiles}};
  return j;
}

RunConfig config_from_json(const nlohmann::ordered_json& j) {
  check_keys(j, "config",
             {"schema", "input", "date_column", "roles", "log_transform", "lags",
              "quantiles", "out", "seed", "se", "bootstrap_replications",
              "two_stage_projection", "significance_levels", "unit_root",
              "stationarity_warnings", "execution", "simulation"});
  if (j.contains("schema") && j.at("schema") != "qardl/config/v1") {
    bad("unsupported schema '" + j.at("schema").dump() + "'");
  }
  RunConfig c;
  c.input_path = get_or<std::string>(j, "input", c.input_path);
  c.date_column = get_or<std::string>(j, "date_column", c.date_column);
  if (j.contains("roles")) {
    if (!j.at("roles").is_object()) bad("roles must be an object");
    for (const auto& [name, role] : j.at("roles").items()) {
      if (!role.is_string()) bad("role for '" + name + "' must be a string");
      c.roles[name] = role_from_name(role.get<std::string>());
    }
    std::set<VariableRole> seen;
    for (const auto& [name, role] : c.roles) {
      if (!seen.insert(role).second) bad("role '" + role_name(role) + "' mapped twice");
    }
  }
  if (j.contains("log_transform")) {
    if (!j.at("log_transform").is_object()) bad("log_transform must be an object");
    for (const auto& [name, flag] : j.at("log_transform").items()) {
      if (!flag.is_boolean()) bad("log_transform for '" + name + "' must be a boolean");
      c.log_transform[name] = flag.get<bool>();
    }
  }
  if (j.contains("lags")) {
    const auto& lags = j.at("lags");
    check_keys(lags, "lags", {"pinned", "select"});
    if (lags.contains("pinned") && lags.contains("select")) {
      bad("lags must give either 'pinned' or 'select', not both");
    }
    if (lags.contains("pinned")) {
      c.lags.pinned = true;
      c.lags.spec = spec_from_json(lags.at("pinned"));
    } else if (lags.contains("select")) {
      const auto& sel = lags.at("select");
      check_keys(sel, "lags.select", {"max_p", "max_q", "criterion"});
      c.lags.max_p = get_or<int>(sel, "max_p", c.lags.max_p);
      c.lags.max_q = get_or<int>(sel, "max_q", c.lags.max_q);
      c.lags.criterion =
          criterion_from(get_or<std::string>(sel, "criterion", criterion_name(c.lags.criterion)));
    }
  }
  c.quantiles = get_or<std::vector<double>>(j, "quantiles", c.quantiles);
  c.output_dir = get_or<std::string>(j, "out", c.output_dir);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.se = se_from(get_or<std::string>(j, "se", se_name(c.se)));
  c.bootstrap_replications = get_or<int>(j, "bootstrap_replications", c.bootstrap_replications);
  c.two_stage_projection = get_or<bool>(j, "two_stage_projection", c.two_stage_projection);
  c.significance_levels =
      get_or<std::vector<double>>(j, "significance_levels", c.significance_levels);
  if (c.significance_levels.size() != 3 ||
      !(c.significance_levels[0] < c.significance_levels[1] &&
        c.significance_levels[1] < c.significance_levels[2])) {
    bad("significance_levels must be three ascending probabilities");
  }
  if (j.contains("unit_root")) {
    const auto& ur = j.at("unit_root");
    check_keys(ur, "unit_root", {"deterministic", "max_lag", "bandwidth"});
    c.unit_root.deterministic =
        det_from(get_or<std::string>(ur, "deterministic", det_name(c.unit_root.deterministic)));
    c.unit_root.max_lag = get_or<int>(ur, "max_lag", c.unit_root.max_lag);
    c.unit_root.bandwidth = get_or<int>(ur, "bandwidth", c.unit_root.bandwidth);
  }
  c.stationarity_warnings = get_or<bool>(j, "stationarity_warnings", c.stationarity_warnings);
  c.exec = exec_from(get_or<std::string>(j, "execution", exec_name(c.exec)));
  if (j.contains("simulation")) {
    const auto& sim = j.at("simulation");
    check_keys(sim, "simulation", {"dgp", "replications", "estimator", "quantiles"});
    if (sim.contains("dgp")) c.simulation.dgp = dgp_from_json(sim.at("dgp"));
    c.simulation.replications = get_or<int>(sim, "replications", c.simulation.replications);
    c.simulation.estimator =
        estimator_from(get_or<std::string>(sim, "estimator", estimator_name(c.simulation.estimator)));
    c.simulation.quantiles = get_or<std::vector<double>>(sim, "quantiles", c.simulation.quantiles);
  }
  for (double g : c.quantiles) {
    if (!(g > 0.0 && g < 1.0)) bad("quantiles must lie strictly inside (0,1)");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace qardl
