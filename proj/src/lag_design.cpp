#include "qardl/lag_design.hpp"

#include "qardl/errors.hpp"

namespace qardl {

void ModelSpec::validate() const {
  if (p < 1) throw ConfigError("model spec: p must be >= 1");
  for (const auto& [role, order] : q) {
    if (order < 0) {
      throw ConfigError("model spec: q for " + role_name(role) + " must be >= 0");
    }
  }
}

std::string to_string(const ColumnLabel& label) {
  if (label.intercept) return "const";
  std::string name = label.differenced ? "d" + label.variable : label.variable;
  if (label.lag == 0) return name + "(t)";
  return name + "(t-" + std::to_string(label.lag) + ")";
}

LagDesign build_lag_design(const AlignedPanel& panel, const ModelSpec& spec,
                           DesignForm form) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(panel.size());
  const int offset = spec.max_lag();  // earliest level index used is t - offset
  if (n <= offset + 2) {
    throw EstimationError("lag design: panel too short for max lag " +
                          std::to_string(offset));
  }
  const Eigen::Index rows = n - offset;

  const PanelColumn& dep = panel.column(VariableRole::dependent);
  std::vector<const PanelColumn*> regs;
  for (VariableRole role : regressor_roles()) {
    if (panel.has_role(role)) regs.push_back(&panel.column(role));
  }

  // value of a column at design row r, lagged k periods
  auto level = [&](const PanelColumn& col, Eigen::Index r, int k) {
    return col.values[static_cast<std::size_t>(r + offset - k)];
  };
  auto diff = [&](const PanelColumn& col, Eigen::Index r, int k) {
    const auto t = static_cast<std::size_t>(r + offset - k);
    return col.values[t] - col.values[t - 1];
  };

  LagDesign design;
  design.response_name = dep.name;
  design.differenced_response = form == DesignForm::ecm_differenced;
  design.dates.assign(panel.dates.begin() + offset, panel.dates.end());
  design.response.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    design.response(r) = design.differenced_response ? diff(dep, r, 0) : level(dep, r, 0);
  }

  std::vector<std::pair<ColumnLabel, const PanelColumn*>> plan;
  plan.push_back({ColumnLabel{"const", VariableRole::dependent, 0, false, true}, nullptr});
  if (form == DesignForm::levels) {
    for (int i = 1; i <= spec.p; ++i) {
      plan.push_back({ColumnLabel{dep.name, VariableRole::dependent, i, false, false}, &dep});
    }
    for (const PanelColumn* col : regs) {
      for (int i = 0; i <= spec.q_for(col->role); ++i) {
        plan.push_back({ColumnLabel{col->name, col->role, i, false, false}, col});
      }
    }
  } else {
    plan.push_back({ColumnLabel{dep.name, VariableRole::dependent, 1, false, false}, &dep});
    for (const PanelColumn* col : regs) {
      plan.push_back({ColumnLabel{col->name, col->role, 1, false, false}, col});
    }
    for (int i = 1; i <= spec.p - 1; ++i) {
      plan.push_back({ColumnLabel{dep.name, VariableRole::dependent, i, true, false}, &dep});
    }
    for (const PanelColumn* col : regs) {
      const int q = spec.q_for(col->role);
      // q = 0 keeps the contemporaneous difference; otherwise lags 0..q-1.
      const int top = std::max(q - 1, 0);
      for (int i = 0; i <= top; ++i) {
        plan.push_back({ColumnLabel{col->name, col->role, i, true, false}, col});
      }
    }
  }

  design.regressors.resize(rows, static_cast<Eigen::Index>(plan.size()));
  design.labels.reserve(plan.size());
  for (std::size_t j = 0; j < plan.size(); ++j) {
    const auto& [label, col] = plan[j];
    design.labels.push_back(label);
    const auto jj = static_cast<Eigen::Index>(j);
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (label.intercept) {
        design.regressors(r, jj) = 1.0;
      } else if (label.differenced) {
        design.regressors(r, jj) = diff(*col, r, label.lag);
      } else {
        design.regressors(r, jj) = level(*col, r, label.lag);
      }
    }
  }
  return design;
}

}  // namespace qardl
