#include "qardl/panel.hpp"

#include <algorithm>
#include <set>

#include "qardl/errors.hpp"

namespace qardl {

const std::vector<VariableRole>& regressor_roles() {
  static const std::vector<VariableRole> roles = {
      VariableRole::epu, VariableRole::sp500, VariableRole::csi300,
      VariableRole::interest, VariableRole::panic};
  return roles;
}

std::string role_name(VariableRole role) {
  switch (role) {
    case VariableRole::dependent: return "dependent";
    case VariableRole::epu: return "epu";
    case VariableRole::sp500: return "sp500";
    case VariableRole::csi300: return "csi300";
    case VariableRole::interest: return "interest";
    case VariableRole::panic: return "panic";
  }
  return "?";
}

const PanelColumn& AlignedPanel::column(VariableRole role) const {
  for (const auto& col : columns) {
    if (col.role == role) return col;
  }
  throw DataError("panel: no column with role " + role_name(role));
}

bool AlignedPanel::has_role(VariableRole role) const {
  return std::any_of(columns.begin(), columns.end(),
                     [&](const PanelColumn& c) { return c.role == role; });
}

AlignedPanel align_panel(const std::vector<ObservationSeries>& series,
                         const std::map<std::string, VariableRole>& roles) {
  if (roles.empty()) throw DataError("panel: no roles given");

  // Resolve role -> series, enforcing presence and uniqueness.
  std::map<VariableRole, const ObservationSeries*> by_role;
  for (const auto& [name, role] : roles) {
    auto it = std::find_if(series.begin(), series.end(),
                           [&](const ObservationSeries& s) { return s.name == name; });
    if (it == series.end()) {
      throw DataError("panel: series '" + name + "' not found");
    }
    if (!by_role.emplace(role, &*it).second) {
      throw DataError("panel: role " + role_name(role) + " assigned twice");
    }
  }
  if (!by_role.count(VariableRole::dependent)) {
    throw DataError("panel: no series mapped to the dependent role");
  }

  // Exact intersection of all mapped series' dates.
  std::vector<Date> common = by_role.begin()->second->dates;
  for (auto it = std::next(by_role.begin()); it != by_role.end(); ++it) {
    const auto& d = it->second->dates;
    std::vector<Date> next;
    std::set_intersection(common.begin(), common.end(), d.begin(), d.end(),
                          std::back_inserter(next));
    common = std::move(next);
  }
  if (common.empty()) throw DataError("panel: date intersection is empty");

  AlignedPanel panel;
  panel.dates = common;

  auto append = [&](VariableRole role) {
    auto it = by_role.find(role);
    if (it == by_role.end()) return;
    const ObservationSeries& s = *it->second;
    PanelColumn col;
    col.name = s.name;
    col.role = role;
    col.values.reserve(common.size());
    std::size_t k = 0;
    for (const Date& d : common) {
      while (s.dates[k] < d) ++k;
      col.values.push_back(s.values[k]);
    }
    panel.columns.push_back(std::move(col));
  };

  append(VariableRole::dependent);
  for (VariableRole role : regressor_roles()) append(role);
  return panel;
}

}  // namespace qardl
