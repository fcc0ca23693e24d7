#include "qardl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "qardl/ardl.hpp"
#include "qardl/config.hpp"
#include "qardl/csv.hpp"
#include "qardl/descriptive.hpp"
#include "qardl/errors.hpp"
#include "qardl/qardl.hpp"
#include "qardl/simulation.hpp"
#include "qardl/stats.hpp"
#include "qardl/tables.hpp"
#include "qardl/unit_root.hpp"

namespace qardl {
namespace {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Diagnostic-stream records: one single-line JSON object per event, so logs
// stay machine-parseable. Artifacts never include them.

void emit_error_record(const std::string& category, const std::string& message) {
  ordered_json rec;
  rec["error"]["category"] = category;
  rec["error"]["message"] = message;
  std::cerr << rec.dump() << "\n";
}

void emit_warning(const std::string& message) {
  ordered_json rec;
  rec["warning"]["message"] = message;
  std::cerr << rec.dump() << "\n";
}

// ---------------------------------------------------------------------------
// Artifact plumbing.

std::filesystem::path prepare_output_dir(const RunConfig& config) {
  std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw DataError("cannot create output directory '" + config.output_dir +
                    "': " + ec.message());
  }
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw DataError("failed while writing '" + path.string() + "'");
}

std::string csv_num(double x) {
  return std::isnan(x) ? std::string() : format_full(x);
}

std::string format_gamma(double g) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", g);
  return buf;
}

std::string format_level_key(double level) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", level);
  return buf;
}

std::string reject_stars(const std::optional<double>& level) {
  if (!level) return "";
  if (*level <= 0.01) return "***";
  if (*level <= 0.05) return "**";
  return "*";
}

// ---------------------------------------------------------------------------
// Data loading: every variable named in the role map, ingested once, log
// transformed where configured, ordered dependent-first then canonically.

struct LoadedVariable {
  std::string name;
  VariableRole role;
  ObservationSeries series;
};

std::vector<LoadedVariable> load_variables(const RunConfig& config) {
  if (config.input_path.empty()) {
    throw ConfigError("no input file configured (set \"input\" in the config)");
  }
  if (config.roles.empty()) {
    throw ConfigError("no variable roles configured (set \"roles\" in the config)");
  }
  bool has_dependent = false;
  for (const auto& [name, role] : config.roles) {
    (void)name;
    has_dependent = has_dependent || role == VariableRole::dependent;
  }
  if (!has_dependent) throw ConfigError("roles must include a dependent variable");

  std::vector<std::string> wanted;
  wanted.reserve(config.roles.size());
  for (const auto& [name, role] : config.roles) {
    (void)role;
    wanted.push_back(name);
  }
  std::vector<ObservationSeries> raw =
      ingest_csv(config.input_path, config.date_column, wanted);

  std::vector<VariableRole> order{VariableRole::dependent};
  for (VariableRole r : regressor_roles()) order.push_back(r);

  std::vector<LoadedVariable> out;
  for (VariableRole role : order) {
    for (const auto& [name, r] : config.roles) {
      if (r != role) continue;
      auto it = std::find_if(raw.begin(), raw.end(),
                             [&](const ObservationSeries& s) { return s.name == name; });
      if (it == raw.end()) throw DataError("column '" + name + "' missing after ingestion");
      out.push_back({name, role, config.wants_log(name) ? log_transform(*it) : *it});
    }
  }
  return out;
}

AlignedPanel aligned_panel_from(const std::vector<LoadedVariable>& vars,
                                const RunConfig& config) {
  std::vector<ObservationSeries> series;
  series.reserve(vars.size());
  for (const auto& v : vars) series.push_back(v.series);
  return align_panel(series, config.roles);
}

// ---------------------------------------------------------------------------
// describe

std::vector<std::string> do_describe(const RunConfig& config, std::ostream& console) {
  const auto vars = load_variables(config);
  // Statistics are per-series (full samples), but an empty date intersection
  // is still a configuration problem worth failing on before any artifact.
  (void)aligned_panel_from(vars, config);

  TextTable t;
  t.title = "Descriptive statistics";
  t.columns = {"Variable", "N",        "Minimum",  "Maximum",  "Mean",
               "Std. Dev", "Skewness", "Kurtosis", "Jarque-Bera"};
  const std::vector<std::string> csv_cols = {
      "variable", "role",     "n",        "minimum",         "maximum",
      "mean",     "std_dev",  "skewness", "excess_kurtosis", "jarque_bera",
      "jb_p_value", "jb_stars"};
  std::vector<std::vector<std::string>> csv_rows;

  ordered_json doc;
  doc["schema"] = "qardl/describe/v1";
  doc["input"] = config.input_path;
  doc["variables"] = ordered_json::array();
  for (const auto& v : vars) {
    const DescriptiveStats d = describe(v.series);
    const std::string stars = significance_stars(d.jb_p_value);
    t.rows.push_back({v.name, std::to_string(d.n), format_fixed(d.minimum),
                      format_fixed(d.maximum), format_fixed(d.mean),
                      format_fixed(d.std_dev), format_fixed(d.skewness),
                      format_fixed(d.excess_kurtosis),
                      format_fixed(d.jarque_bera) + stars});
    csv_rows.push_back({v.name, role_name(v.role), std::to_string(d.n),
                        csv_num(d.minimum), csv_num(d.maximum), csv_num(d.mean),
                        csv_num(d.std_dev), csv_num(d.skewness),
                        csv_num(d.excess_kurtosis), csv_num(d.jarque_bera),
                        csv_num(d.jb_p_value), stars});
    ordered_json row;
    row["name"] = v.name;
    row["role"] = role_name(v.role);
    row["n"] = d.n;
    row["minimum"] = d.minimum;
    row["maximum"] = d.maximum;
    row["mean"] = d.mean;
    row["std_dev"] = d.std_dev;
    row["skewness"] = d.skewness;
    row["excess_kurtosis"] = d.excess_kurtosis;
    row["jarque_bera"] = d.jarque_bera;
    row["jb_p_value"] = d.jb_p_value;
    row["jb_stars"] = stars;
    doc["variables"].push_back(row);
  }
  t.notes = {"Kurtosis is excess kurtosis (normal = 0).",
             "***, ** and * mark significance at the 1%, 5% and 10% levels.",
             "Series are log-transformed where configured."};

  const auto dir = prepare_output_dir(config);
  const std::string text = render_text_table(t);
  write_file(dir / "describe.txt", text);
  write_file(dir / "describe.csv", render_csv_table(csv_cols, csv_rows));
  write_file(dir / "describe.json", doc.dump(2) + "\n");
  console << text;
  return {"describe.txt", "describe.csv", "describe.json"};
}

// ---------------------------------------------------------------------------
// unitroot

ordered_json unit_root_json(const UnitRootResult& r) {
  ordered_json j;
  j["statistic"] = r.statistic;
  if (r.test == UnitRootTest::pp) j["z_t"] = r.z_t;
  j[r.test == UnitRootTest::adf ? "lag" : "bandwidth"] = r.lag_or_bandwidth;
  j["p_value"] = r.p_value;
  j["reject_at"] = r.reject_at ? ordered_json(*r.reject_at) : ordered_json(nullptr);
  ordered_json cvs;
  for (const auto& [level, cv] : r.critical_values) cvs[format_level_key(level)] = cv;
  j["critical_values"] = cvs;
  return j;
}

std::vector<std::string> do_unitroot(const RunConfig& config, std::ostream& console) {
  const auto vars = load_variables(config);
  (void)aligned_panel_from(vars, config);
  const Deterministic det = config.unit_root.deterministic;

  TextTable t;
  t.title = "Unit-root tests";
  t.columns = {"Variable", "ADF(level)", "ADF(diff)", "PP(level)", "PP(diff)"};
  const std::vector<std::string> csv_cols = {
      "variable",
      "adf_level",      "adf_level_lag",      "adf_level_p",  "adf_level_reject_at",
      "adf_diff",       "adf_diff_lag",       "adf_diff_p",   "adf_diff_reject_at",
      "pp_level",       "pp_level_zt",        "pp_level_bandwidth",
      "pp_level_p",     "pp_level_reject_at",
      "pp_diff",        "pp_diff_zt",         "pp_diff_bandwidth",
      "pp_diff_p",      "pp_diff_reject_at"};
  std::vector<std::vector<std::string>> csv_rows;

  ordered_json doc;
  doc["schema"] = "qardl/unitroot/v1";
  doc["input"] = config.input_path;
  doc["deterministic"] = det == Deterministic::constant ? "constant" : "constant_trend";
  doc["variables"] = ordered_json::array();

  for (const auto& v : vars) {
    const ObservationSeries diff = first_difference(v.series);
    const UnitRootResult al = adf_test(v.series, det, config.unit_root.max_lag);
    const UnitRootResult ad = adf_test(diff, det, config.unit_root.max_lag);
    const UnitRootResult pl = pp_test(v.series, det, config.unit_root.bandwidth);
    const UnitRootResult pd = pp_test(diff, det, config.unit_root.bandwidth);

    auto cell = [](const UnitRootResult& r) {
      return format_fixed(r.statistic) + reject_stars(r.reject_at);
    };
    t.rows.push_back({v.name, cell(al), cell(ad), cell(pl), cell(pd)});

    auto reject_field = [](const UnitRootResult& r) {
      return r.reject_at ? format_full(*r.reject_at) : std::string();
    };
    csv_rows.push_back({v.name,
                        csv_num(al.statistic), std::to_string(al.lag_or_bandwidth),
                        csv_num(al.p_value), reject_field(al),
                        csv_num(ad.statistic), std::to_string(ad.lag_or_bandwidth),
                        csv_num(ad.p_value), reject_field(ad),
                        csv_num(pl.statistic), csv_num(pl.z_t),
                        std::to_string(pl.lag_or_bandwidth), csv_num(pl.p_value),
                        reject_field(pl),
                        csv_num(pd.statistic), csv_num(pd.z_t),
                        std::to_string(pd.lag_or_bandwidth), csv_num(pd.p_value),
                        reject_field(pd)});

    ordered_json row;
    row["name"] = v.name;
    row["level"] = ordered_json{{"adf", unit_root_json(al)}, {"pp", unit_root_json(pl)}};
    row["difference"] = ordered_json{{"adf", unit_root_json(ad)}, {"pp", unit_root_json(pd)}};
    doc["variables"].push_back(row);
  }
  t.notes = {"ADF entries are t-statistics; PP entries are normalized-bias statistics (Z_rho).",
             "***, ** and * mark rejection at the 1%, 5% and 10% levels.",
             std::string("Deterministic term: ") +
                 (det == Deterministic::constant ? "constant." : "constant and trend."),
             "Critical values and p-values are approximate (tabulated interpolations)."};

  const auto dir = prepare_output_dir(config);
  const std::string text = render_text_table(t);
  write_file(dir / "unitroot.txt", text);
  write_file(dir / "unitroot.csv", render_csv_table(csv_cols, csv_rows));
  write_file(dir / "unitroot.json", doc.dump(2) + "\n");
  console << text;
  return {"unitroot.txt", "unitroot.csv", "unitroot.json"};
}

// ---------------------------------------------------------------------------
// fit / fit-ardl / fit-qardl

Coefficient alpha_coefficient(const EcmCoefficients& c) {
  Coefficient a;
  a.label = "alpha";
  a.value = c.alpha;
  a.std_error = c.alpha_se;
  if (c.alpha_se > 0.0) {
    a.t_ratio = c.alpha / c.alpha_se;
    a.p_value = normal_two_sided_p(a.t_ratio);
  } else {
    a.t_ratio = 0.0;
    a.p_value = 1.0;
  }
  a.stars = significance_stars(a.p_value);
  return a;
}

ordered_json coef_json(const Coefficient& c) {
  ordered_json j;
  j["value"] = c.value;  // NaN serializes as null
  j["std_error"] = c.std_error;
  j["t_ratio"] = c.t_ratio;
  j["p_value"] = c.p_value;
  j["stars"] = c.stars;
  j["defined"] = c.defined;
  return j;
}

ordered_json coef_block(const std::vector<Coefficient>& coefs) {
  ordered_json j = ordered_json::object();
  for (const auto& c : coefs) j[c.label] = coef_json(c);
  return j;
}

ordered_json ecm_json(const EcmCoefficients& c) {
  ordered_json j;
  j["alpha"] = coef_json(alpha_coefficient(c));
  j["rho_star"] = coef_json(c.rho_star);
  j["adjustment_speed_pct"] = c.no_error_correction
                                  ? ordered_json(nullptr)
                                  : ordered_json(100.0 * std::abs(c.rho_star.value));
  j["long_run"] = coef_block(c.long_run);
  j["cumulative"] = coef_block(c.cumulative);
  j["short_run"] = coef_block(c.short_run);
  j["projection"] = coef_block(c.projection);
  j["no_error_correction"] = c.no_error_correction;
  if (!c.warning.empty()) j["warning"] = c.warning;
  return j;
}

ordered_json spec_json(const ModelSpec& spec) {
  ordered_json q = ordered_json::object();
  for (VariableRole role : regressor_roles()) {
    auto it = spec.q.find(role);
    if (it != spec.q.end()) q[role_name(role)] = it->second;
  }
  return ordered_json{{"p", spec.p}, {"q", q}};
}

struct FitColumn {
  std::string header;
  const EcmCoefficients* coefs;  // null for a failed quantile
};

using CoefGetter = std::function<std::optional<Coefficient>(const EcmCoefficients&)>;

std::optional<Coefficient> pick_label(const std::vector<Coefficient>& coefs,
                                      const std::string& label) {
  for (const auto& c : coefs) {
    if (c.label == label) return c;
  }
  return std::nullopt;
}

void append_coefficient_rows(TextTable& t, const std::vector<FitColumn>& cols,
                             const std::string& label, const CoefGetter& get) {
  std::vector<std::string> value_row{label};
  std::vector<std::string> se_row{""};
  for (const auto& col : cols) {
    std::optional<Coefficient> c;
    if (col.coefs) c = get(*col.coefs);
    if (c && c->defined) {
      value_row.push_back(format_fixed(c->value) + c->stars);
      se_row.push_back("(" + format_fixed(c->std_error) + ")");
    } else {
      value_row.push_back("");
      se_row.push_back("");
    }
  }
  t.rows.push_back(std::move(value_row));
  t.rows.push_back(std::move(se_row));
}

std::vector<std::string> do_fit(const RunConfig& config, bool with_linear,
                                bool with_quantile, std::ostream& console) {
  if (with_quantile && config.quantiles.empty()) {
    throw ConfigError("quantile grid is empty");
  }
  const auto vars = load_variables(config);
  const AlignedPanel panel = aligned_panel_from(vars, config);

  if (config.stationarity_warnings) {
    // Mixed integration orders are fine for this estimator family; what is
    // worth flagging is a series that still looks non-stationary after
    // differencing.
    for (const auto& v : vars) {
      try {
        const UnitRootResult diff = adf_test(first_difference(v.series),
                                             config.unit_root.deterministic,
                                             config.unit_root.max_lag);
        if (!diff.reject_at) {
          emit_warning("variable '" + v.name +
                       "' still shows a unit root after differencing; estimates assume "
                       "at most first-order integration");
        }
      } catch (const EstimationError&) {
        // Too short for the diagnostic; estimation raises its own error if it matters.
      }
    }
  }

  ModelSpec spec = config.lags.pinned
                       ? config.lags.spec
                       : select_lags(panel, config.lags.max_p, config.lags.max_q,
                                     config.lags.criterion, config.exec);
  spec.validate();

  std::optional<EcmFit> linear;
  if (with_linear) {
    linear = to_ecm(fit_linear_ardl(panel, spec));
    if (linear->coefficients.no_error_correction) {
      emit_warning(linear->coefficients.warning);
    }
  }

  std::optional<QardlFitSet> qfit;
  if (with_quantile) {
    QardlOptions opt;
    opt.quantiles = config.quantiles;
    opt.se = config.se;
    opt.bootstrap_replications = config.bootstrap_replications;
    opt.seed = config.seed;
    opt.two_stage_projection = config.two_stage_projection;
    opt.exec = config.exec;
    qfit = fit_qardl(panel, spec, opt);
    for (const auto& rec : qfit->records) {
      if (!rec.ok) {
        emit_warning("quantile " + format_gamma(rec.gamma) + " failed: " + rec.error);
      } else if (rec.coefficients.no_error_correction) {
        emit_warning(rec.coefficients.warning);
      }
    }
  }

  // Row labels come from the first successful fit; every column shares the
  // same specification, so label sets agree wherever estimation succeeded.
  const EcmCoefficients* ref = linear ? &linear->coefficients : nullptr;
  if (!ref && qfit) {
    for (const auto& rec : qfit->records) {
      if (rec.ok) {
        ref = &rec.coefficients;
        break;
      }
    }
  }
  if (!ref) {
    const std::string first =
        qfit && !qfit->records.empty() ? qfit->records.front().error : "nothing to fit";
    throw EstimationError("no specification could be estimated: " + first);
  }

  std::vector<FitColumn> cols;
  if (linear) cols.push_back({"Linear", &linear->coefficients});
  if (qfit) {
    for (const auto& rec : qfit->records) {
      cols.push_back({format_gamma(rec.gamma), rec.ok ? &rec.coefficients : nullptr});
    }
  }

  TextTable main_t;
  main_t.title = "Error-correction estimates";
  main_t.columns = {"Parameter"};
  for (const auto& col : cols) main_t.columns.push_back(col.header);

  append_coefficient_rows(main_t, cols, "alpha",
                          [](const EcmCoefficients& c) -> std::optional<Coefficient> {
                            return alpha_coefficient(c);
                          });
  append_coefficient_rows(main_t, cols, "rho*",
                          [](const EcmCoefficients& c) -> std::optional<Coefficient> {
                            return c.rho_star;
                          });
  for (const auto& c : ref->long_run) {
    append_coefficient_rows(main_t, cols, c.label,
                            [label = c.label](const EcmCoefficients& e) {
                              return pick_label(e.long_run, label);
                            });
  }
  for (const auto& c : ref->short_run) {
    append_coefficient_rows(main_t, cols, c.label,
                            [label = c.label](const EcmCoefficients& e) {
                              return pick_label(e.short_run, label);
                            });
  }
  if (config.two_stage_projection) {
    for (const auto& c : ref->projection) {
      append_coefficient_rows(main_t, cols, c.label,
                              [label = c.label](const EcmCoefficients& e) {
                                return pick_label(e.projection, label);
                              });
    }
  }

  std::string speed_note = "Adjustment speed (100*|rho*|, percent per period):";
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const FitColumn& col = cols[i];
    speed_note += " " + col.header + "=";
    if (col.coefs && !col.coefs->no_error_correction) {
      speed_note += format_fixed(100.0 * std::abs(col.coefs->rho_star.value), 2);
    } else {
      speed_note += "n/a";
    }
    if (i + 1 < cols.size()) speed_note += ",";
  }
  main_t.notes = {"Standard errors in parentheses.",
                  "***, ** and * mark significance at the 1%, 5% and 10% levels.",
                  "Empty cells: failed fits or undefined ratios.", speed_note};

  std::string text = render_text_table(main_t);
  if (!ref->cumulative.empty()) {
    TextTable cum_t;
    cum_t.title = "Cumulative short-run effects";
    cum_t.columns = main_t.columns;
    for (const auto& c : ref->cumulative) {
      append_coefficient_rows(cum_t, cols, c.label,
                              [label = c.label](const EcmCoefficients& e) {
                                return pick_label(e.cumulative, label);
                              });
    }
    cum_t.notes = {"Sums of the difference-term coefficients per variable; "
                   "delta-method standard errors in parentheses."};
    text += "\n" + render_text_table(cum_t);
  }

  ordered_json doc;
  doc["schema"] = "qardl/fit/v1";
  doc["input"] = config.input_path;
  doc["observations"] = panel.size();
  doc["date_range"] = ordered_json::array(
      {to_string(panel.dates.front()), to_string(panel.dates.back())});
  doc["spec"] = spec_json(spec);
  doc["lag_selection"] =
      config.lags.pinned ? "pinned"
                         : (config.lags.criterion == Criterion::aic ? "aic" : "bic");
  doc["seed"] = config.seed;
  if (linear) {
    ordered_json lj;
    lj["effective_observations"] = linear->dates.size();
    lj["aic"] = linear->aic;
    lj["bic"] = linear->bic;
    lj["estimates"] = ecm_json(linear->coefficients);
    doc["linear"] = lj;
  }
  if (qfit) {
    ordered_json qj;
    qj["effective_observations"] = qfit->effective_n;
    qj["se"] = config.se == SeMethod::kernel ? "kernel" : "bootstrap";
    if (config.se == SeMethod::bootstrap) {
      qj["bootstrap_replications"] = config.bootstrap_replications;
    }
    qj["two_stage_projection"] = config.two_stage_projection;
    qj["records"] = ordered_json::array();
    for (const auto& rec : qfit->records) {
      ordered_json rj;
      rj["gamma"] = rec.gamma;
      rj["ok"] = rec.ok;
      if (!rec.ok) {
        rj["error"] = rec.error;
      } else {
        rj["method"] = rec.method;
        rj["iterations"] = rec.iterations;
        rj["objective"] = rec.objective;
        rj["estimates"] = ecm_json(rec.coefficients);
      }
      qj["records"].push_back(rj);
    }
    doc["quantile"] = qj;
  }

  const auto dir = prepare_output_dir(config);
  write_file(dir / "fit.txt", text);
  write_file(dir / "fit.json", doc.dump(2) + "\n");
  console << text;
  std::vector<std::string> artifacts{"fit.txt", "fit.json"};

  if (qfit) {
    const std::vector<BandRow> bands = confidence_bands(*qfit);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(bands.size());
    for (const auto& b : bands) {
      if (b.defined) {
        rows.push_back({b.parameter, format_full(b.gamma), csv_num(b.lo),
                        csv_num(b.estimate), csv_num(b.hi)});
      } else {
        rows.push_back({b.parameter, format_full(b.gamma), "", "", ""});
      }
    }
    write_file(dir / "bands.csv",
               render_csv_table({"parameter", "gamma", "lo", "estimate", "hi"}, rows));
    artifacts.push_back("bands.csv");
  }
  return artifacts;
}

// ---------------------------------------------------------------------------
// simulate

std::vector<std::string> do_simulate(const RunConfig& config, std::ostream& console) {
  const SimulationConfig& sim = config.simulation;
  const RecoveryStudy study = run_recovery_study(sim.dgp, sim.replications,
                                                 sim.estimator, sim.quantiles,
                                                 config.exec);
  if (study.unreliable_coverage) {
    emit_warning("coverage estimates are unreliable below 50 replications (requested " +
                 std::to_string(study.replications) + ")");
  }

  TextTable t;
  t.title = "Parameter recovery";
  t.columns = {"Parameter", "Truth", "Mean",     "Median", "SD",
               "Bias",      "RMSE",  "Coverage", "Mean SE", "Used"};
  for (const auto& p : study.parameters) {
    t.rows.push_back({p.label, format_fixed(p.truth), format_fixed(p.mean),
                      format_fixed(p.median), format_fixed(p.sd), format_fixed(p.bias),
                      format_fixed(p.rmse), format_fixed(p.coverage),
                      format_fixed(p.mean_std_error), std::to_string(p.n_used)});
  }
  t.notes = {std::to_string(study.replications) + " replications, " +
             std::to_string(study.failures) + " failed.",
             "Coverage: share of nominal-95% intervals containing the truth."};
  if (study.unreliable_coverage) {
    t.notes.push_back("Coverage estimates are unreliable below 50 replications.");
  }
  console << render_text_table(t);

  ordered_json doc;
  doc["schema"] = "qardl/simulation/v1";
  doc["study"] = to_json(config)["simulation"];
  doc["replications"] = study.replications;
  doc["failures"] = study.failures;
  doc["unreliable_coverage"] = study.unreliable_coverage;
  if (!study.failure_messages.empty()) doc["failure_messages"] = study.failure_messages;
  doc["parameters"] = ordered_json::array();
  for (const auto& p : study.parameters) {
    ordered_json row;
    row["label"] = p.label;
    row["truth"] = p.truth;
    row["mean"] = p.mean;
    row["median"] = p.median;
    row["sd"] = p.sd;
    row["bias"] = p.bias;
    row["rmse"] = p.rmse;
    row["coverage"] = p.coverage;
    row["mean_std_error"] = p.mean_std_error;
    row["n_used"] = p.n_used;
    doc["parameters"].push_back(row);
  }

  std::vector<std::vector<std::string>> csv_rows;
  for (const auto& p : study.parameters) {
    csv_rows.push_back({p.label, csv_num(p.truth), csv_num(p.mean), csv_num(p.median),
                        csv_num(p.sd), csv_num(p.bias), csv_num(p.rmse),
                        csv_num(p.coverage), csv_num(p.mean_std_error),
                        std::to_string(p.n_used)});
  }

  const auto dir = prepare_output_dir(config);
  write_file(dir / "simulation.json", doc.dump(2) + "\n");
  write_file(dir / "simulation.csv",
             render_csv_table({"parameter", "truth", "mean", "median", "sd", "bias",
                               "rmse", "coverage", "mean_std_error", "n_used"},
                              csv_rows));
  return {"simulation.json", "simulation.csv"};
}

// ---------------------------------------------------------------------------
// report

std::vector<std::string> do_report(const RunConfig& config, std::ostream& console) {
  std::vector<std::string> artifacts;
  auto append = [&artifacts](std::vector<std::string> more) {
    artifacts.insert(artifacts.end(), more.begin(), more.end());
  };
  append(do_describe(config, console));
  append(do_unitroot(config, console));
  append(do_fit(config, true, true, console));
  artifacts.push_back("run.json");

  ordered_json manifest;
  manifest["schema"] = "qardl/report/v1";
  manifest["config"] = to_json(config);
  manifest["artifacts"] = artifacts;
  const auto dir = prepare_output_dir(config);
  write_file(dir / "run.json", manifest.dump(2) + "\n");
  return artifacts;
}

// ---------------------------------------------------------------------------
// flag plumbing

std::vector<double> parse_quantile_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    std::string token = comma == std::string::npos ? text.substr(pos)
                                                   : text.substr(pos, comma - pos);
    const auto first = token.find_first_not_of(" \t");
    const auto last = token.find_last_not_of(" \t");
    token = first == std::string::npos ? std::string()
                                       : token.substr(first, last - first + 1);
    if (token.empty()) throw ConfigError("empty entry in --quantiles list");
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse quantile '" + token + "'");
    }
    if (used != token.size()) throw ConfigError("cannot parse quantile '" + token + "'");
    out.push_back(value);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("--quantiles list is empty");
  return out;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"ARDL and quantile-ARDL cointegration toolkit", "qardl"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_value = 0;
  std::string quantiles_text;
  bool trend = false;
  std::string se_text;
  std::string out_text;

  app.add_option("--config", config_path, "JSON run configuration file");
  app.add_option("--seed", seed_value, "master seed override");
  app.add_option("--quantiles", quantiles_text, "comma-separated quantile levels");
  app.add_flag("--trend", trend, "include a linear trend in the unit-root tests");
  app.add_option("--se", se_text, "standard-error method")
      ->check(CLI::IsMember({"kernel", "bootstrap"}));
  app.add_option("--out", out_text, "output directory override");

  const char* const names[] = {"describe", "unitroot", "fit-ardl", "fit-qardl",
                               "fit",      "simulate", "report"};
  const char* const blurbs[] = {
      "descriptive statistics per variable",
      "ADF and PP unit-root tests on levels and differences",
      "linear error-correction estimation",
      "quantile error-correction estimation over the configured grid",
      "linear and quantile estimation in one table",
      "Monte-Carlo parameter-recovery study",
      "full pipeline: describe, unitroot, fit, and a run manifest"};
  for (int i = 0; i < 7; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], blurbs[i]);
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    emit_error_record("config", e.what());
    return 2;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (app.count("--seed") > 0) {
      config.seed = seed_value;
      config.simulation.dgp.seed = seed_value;
    }
    if (app.count("--quantiles") > 0) {
      const std::vector<double> grid = parse_quantile_list(quantiles_text);
      config.quantiles = grid;
      config.simulation.quantiles = grid;
    }
    if (trend) config.unit_root.deterministic = Deterministic::constant_trend;
    if (app.count("--se") > 0) {
      config.se = se_text == "kernel" ? SeMethod::kernel : SeMethod::bootstrap;
    }
    if (app.count("--out") > 0) config.output_dir = out_text;

    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "describe") {
      do_describe(config, std::cout);
    } else if (name == "unitroot") {
      do_unitroot(config, std::cout);
    } else if (name == "fit-ardl") {
      do_fit(config, true, false, std::cout);
    } else if (name == "fit-qardl") {
      do_fit(config, false, true, std::cout);
    } else if (name == "fit") {
      do_fit(config, true, true, std::cout);
    } else if (name == "simulate") {
      do_simulate(config, std::cout);
    } else if (name == "report") {
      do_report(config, std::cout);
    }
    return 0;
  } catch (const ConfigError& e) {
    emit_error_record("config", e.what());
    return 2;
  } catch (const DataError& e) {
    emit_error_record("data", e.what());
    return 3;
  } catch (const EstimationError& e) {
    emit_error_record("estimation", e.what());
    return 4;
  } catch (const std::exception& e) {
    emit_error_record("internal", e.what());
    return 1;
  }
}

}  // namespace qardl
