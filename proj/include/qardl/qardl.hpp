#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qardl/ardl.hpp"
#include "qardl/quantile.hpp"

namespace qardl {

enum class SeMethod { kernel, bootstrap };

struct QardlOptions {
  std::vector<double> quantiles = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  SeMethod se = SeMethod::kernel;
  int bootstrap_replications = 500;
  std::uint64_t seed = 42;
  // Literal two-stage treatment of the projection equation: the quantile
  // fit excludes contemporaneous differences and their loadings come from a
  // second-stage least-squares projection of the residuals. The default
  // one-stage form includes the contemporaneous differences directly.
  bool two_stage_projection = false;
  Execution exec = Execution::parallel;
};

struct QardlRecord {
  double gamma = 0.5;
  bool ok = false;
  std::string error;  // populated when this quantile's solver failed
  EcmCoefficients coefficients;
  double objective = 0.0;
  int iterations = 0;
  std::string method;
};

struct QardlFitSet {
  ModelSpec spec;
  std::vector<QardlRecord> records;  // one per requested gamma, input order
  std::vector<ColumnLabel> design_labels;
  std::size_t effective_n = 0;
};

// Independent quantile fits of the differenced design at each gamma; a
// failing quantile is reported in its record without aborting the others.
// Same inputs and seed give bitwise identical results under either
// execution policy, and each record is independent of which other
// quantiles were requested.
QardlFitSet fit_qardl(const AlignedPanel& panel, const ModelSpec& spec,
                      const QardlOptions& options = {});

struct BandRow {
  std::string parameter;
  double gamma = 0.0;
  double lo = 0.0;
  double estimate = 0.0;
  double hi = 0.0;
  bool defined = true;
};

// Long-format normal-approximation bands (parameter, gamma, lo, est, hi)
// over alpha, rho*, long-run, cumulative, and short-run entries of every
// successful record. Undefined long-run entries keep defined = false.
std::vector<BandRow> confidence_bands(const QardlFitSet& fits, double level = 0.95);

}  // namespace qardl
