#include "geoboot/classes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "geoboot/error.hpp"

namespace geoboot {

void PorosityClass::validate() const {
  if (!(lower < upper)) {
    throw Error("class '" + label + "': lower bound must be below upper");
  }
}

bool class_indicator(double value, const PorosityClass& cls) {
  if (!std::isfinite(value)) {
    throw Error("class indicator: value is not finite");
  }
  return value >= cls.lower && value < cls.upper;
}

double quantile_type7(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw Error("quantile of empty sample");
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = static_cast<double>(n - 1) * p;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<PorosityClass> classes_from_quartiles(const Grid3D& reference) {
  std::vector<double> values = reference.active_values();
  if (values.size() < 4) {
    throw Error("classes_from_quartiles: need at least 4 active cells, got " +
                std::to_string(values.size()));
  }
  std::sort(values.begin(), values.end());
  const double q1 = quantile_type7(values, 0.25);
  const double q3 = quantile_type7(values, 0.75);
  if (!(q1 < q3)) {
    throw Error("degenerate classes: Q1 == Q3 == " + std::to_string(q1));
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {
      {"1Q", -inf, q1},
      {"1Q3Q", q1, q3},
      {"3Q", q3, inf},
  };
}

double class_proportion(const Grid3D& grid, const PorosityClass& cls) {
  std::size_t in_class = 0;
  std::size_t active = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.active(i)) continue;
    ++active;
    if (class_indicator(grid[i], cls)) ++in_class;
  }
  if (active == 0) {
    throw Error("class_proportion: grid has no active cells");
  }
  return static_cast<double>(in_class) / static_cast<double>(active);
}

}  // namespace geoboot
