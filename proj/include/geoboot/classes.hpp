#pragma once

#include <string>
#include <vector>

#include "geoboot/grid.hpp"

namespace geoboot {

/// Half-open porosity interval [lower, upper[. Sentinels: lower may be
/// -infinity (bottom class), upper may be +infinity (top class).
struct PorosityClass {
  std::string label;
  double lower = 0.0;  // inclusive
  double upper = 0.0;  // exclusive

  void validate() const;  // lower < upper
};

/// True iff lower <= value < upper. Throws on non-finite value.
bool class_indicator(double value, const PorosityClass& cls);

/// Type-7 quantile (linear interpolation between closest order statistics)
/// of an ascending-sorted, non-empty vector. p in [0, 1].
double quantile_type7(const std::vector<double>& sorted, double p);

/// Quartile-based three-class partition of the value axis from a reference
/// map: {1Q: [-inf, Q1[, 1Q3Q: [Q1, Q3[, 3Q: [Q3, +inf[}. Sentinel bounds
/// make every finite value classifiable. Throws if the reference has fewer
/// than 4 active cells or if Q1 == Q3 (degenerate classes).
std::vector<PorosityClass> classes_from_quartiles(const Grid3D& reference);

/// Fraction of active cells whose value falls in the class. Throws on a grid
/// with no active cells.
double class_proportion(const Grid3D& grid, const PorosityClass& cls);

}  // namespace geoboot
