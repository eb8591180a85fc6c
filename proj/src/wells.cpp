#include "geoboot/wells.hpp"

#include <set>
#include <string>

#include "geoboot/error.hpp"

namespace geoboot {

void WellTemplate::validate() const {
  if (columns.empty()) {
    throw Error("well template '" + name + "' has no columns");
  }
  std::set<std::array<int, 2>> seen;
  for (const auto& c : columns) {
    if (!seen.insert(c).second) {
      throw Error("well template '" + name + "': duplicate column (" +
                  std::to_string(c[0]) + ", " + std::to_string(c[1]) + ")");
    }
  }
}

std::vector<double> WellSet::flat_values() const {
  std::vector<double> out;
  out.reserve(data.size() * (data.empty() ? 0 : data[0].size()));
  for (const auto& column : data) {
    out.insert(out.end(), column.begin(), column.end());
  }
  return out;
}

WellSet extract_wells(const Grid3D& grid, const WellTemplate& tmpl,
                      std::array<int, 2> offset) {
  tmpl.validate();
  WellSet set;
  set.tmpl = tmpl;
  set.offset = offset;
  set.data.reserve(tmpl.columns.size());
  for (const auto& col : tmpl.columns) {
    const int x = col[0] + offset[0];
    const int y = col[1] + offset[1];
    if (!grid.in_bounds(x, y, 0)) {
      throw Error("well template '" + tmpl.name + "': column (" +
                  std::to_string(x) + ", " + std::to_string(y) +
                  ") outside grid " + std::to_string(grid.nx()) + "x" +
                  std::to_string(grid.ny()));
    }
    std::vector<double> column(static_cast<std::size_t>(grid.nz()));
    for (int z = 0; z < grid.nz(); ++z) {
      column[static_cast<std::size_t>(z)] = grid.at(x, y, z);
    }
    set.data.push_back(std::move(column));
  }
  return set;
}

}  // namespace geoboot
