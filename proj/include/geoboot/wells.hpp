#pragma once

#include <array>
#include <string>
#include <vector>

#include "geoboot/grid.hpp"

namespace geoboot {

/// A drilling strategy: ordered (x, y) block columns. Placements translate
/// the whole template, so pairwise coordinate differences are preserved
/// exactly.
struct WellTemplate {
  std::string name;
  std::vector<std::array<int, 2>> columns;

  int n_wells() const { return static_cast<int>(columns.size()); }

  /// Throws unless the template is non-empty with distinct columns.
  void validate() const;
};

/// A placed template with the full vertical column of porosity values read
/// from a source grid at each translated (x, y).
struct WellSet {
  WellTemplate tmpl;
  std::array<int, 2> offset{0, 0};
  std::vector<std::vector<double>> data;  // [well][z]

  int n_wells() const { return tmpl.n_wells(); }
  int nz() const { return data.empty() ? 0 : static_cast<int>(data[0].size()); }

  std::array<int, 2> well_xy(int i) const {
    return {tmpl.columns[i][0] + offset[0], tmpl.columns[i][1] + offset[1]};
  }

  /// All column values flattened, well-major.
  std::vector<double> flat_values() const;
};

/// Copies full vertical columns from `grid` at each translated template
/// position. Throws if any translated column falls outside the grid.
WellSet extract_wells(const Grid3D& grid, const WellTemplate& tmpl,
                      std::array<int, 2> offset);

}  // namespace geoboot
