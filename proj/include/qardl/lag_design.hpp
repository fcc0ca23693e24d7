#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qardl/model_spec.hpp"
#include "qardl/panel.hpp"

namespace qardl {

// Which regression the design feeds: the levels equation (response Oil_t)
// or its error-correction reparameterization (response delta-Oil_t with
// lag-1 level terms plus lagged differences).
enum class DesignForm { levels, ecm_differenced };

struct ColumnLabel {
  std::string variable;  // series name, or "const"
  VariableRole role = VariableRole::dependent;
  int lag = 0;
  bool differenced = false;
  bool intercept = false;

  friend bool operator==(const ColumnLabel&, const ColumnLabel&) = default;
};

// Human-readable column name, e.g. "const", "WTI(t-1)", "dEPU(t)".
std::string to_string(const ColumnLabel& label);

struct LagDesign {
  Eigen::VectorXd response;
  Eigen::MatrixXd regressors;
  std::vector<ColumnLabel> labels;   // one per regressor column
  std::vector<Date> dates;           // dates surviving lag truncation
  std::string response_name;
  bool differenced_response = false;

  std::size_t rows() const { return static_cast<std::size_t>(response.size()); }
  std::size_t cols() const { return labels.size(); }
};

// Assembles the design for the requested form. Column order is canonical:
//   levels:      const, Oil(t-1..p), then per regressor X(t..t-q)
//   differenced: const, Oil(t-1), each X(t-1), dOil(t-1..p-1),
//                then per regressor dX(t..t-(q-1)) (just dX(t) when q = 0)
// Regressors follow the fixed role order of regressor_roles(). Throws
// EstimationError when the panel is too short for the requested lags.
LagDesign build_lag_design(const AlignedPanel& panel, const ModelSpec& spec,
                           DesignForm form);

}  // namespace qardl
