#pragma once

#include <map>
#include <string>
#include <vector>

#include "qardl/series.hpp"

namespace qardl {

// Model role of a panel column. Order here fixes the canonical regressor
// order used everywhere downstream (designs, coefficient tables).
enum class VariableRole { dependent, epu, sp500, csi300, interest, panic };

const std::vector<VariableRole>& regressor_roles();

std::string role_name(VariableRole role);

struct PanelColumn {
  std::string name;
  VariableRole role;
  std::vector<double> values;
};

// Series restricted to the exact date intersection; dependent column first,
// then regressors in canonical role order.
struct AlignedPanel {
  std::vector<Date> dates;
  std::vector<PanelColumn> columns;

  std::size_t size() const { return dates.size(); }
  const PanelColumn& column(VariableRole role) const;
  bool has_role(VariableRole role) const;
};

// Intersects all series' dates and assembles the panel. `roles` maps series
// name -> role; every listed series must be present, each role used at most
// once, and the dependent role is mandatory. Throws DataError otherwise or
// when the intersection is empty.
AlignedPanel align_panel(const std::vector<ObservationSeries>& series,
                         const std::map<std::string, VariableRole>& roles);

}  // namespace qardl
