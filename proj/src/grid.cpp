#include "geoboot/grid.hpp"

#include <cmath>
#include <string>

#include "geoboot/error.hpp"

namespace geoboot {

Grid3D::Grid3D(int nx, int ny, int nz, double fill)
    : nx_(nx), ny_(ny), nz_(nz) {
  if (nx <= 0 || ny <= 0 || nz <= 0) {
    throw Error("grid dimensions must be positive, got " + std::to_string(nx) +
                "x" + std::to_string(ny) + "x" + std::to_string(nz));
  }
  values_.assign(static_cast<std::size_t>(nx) * ny * nz, fill);
}

Grid3D Grid3D::from_values(int nx, int ny, int nz, std::vector<double> values) {
  Grid3D g(nx, ny, nz);
  if (values.size() != g.values_.size()) {
    throw Error("grid value count " + std::to_string(values.size()) +
                " does not match " + std::to_string(nx) + "x" +
                std::to_string(ny) + "x" + std::to_string(nz) + " = " +
                std::to_string(g.values_.size()));
  }
  g.values_ = std::move(values);
  g.validate();
  return g;
}

void Grid3D::set_mask(std::vector<std::uint8_t> mask) {
  if (!mask.empty() && mask.size() != values_.size()) {
    throw Error("mask size does not match grid size");
  }
  mask_ = std::move(mask);
}

std::size_t Grid3D::active_count() const {
  if (mask_.empty()) return values_.size();
  std::size_t n = 0;
  for (auto m : mask_) n += (m != 0);
  return n;
}

std::vector<double> Grid3D::active_values() const {
  if (mask_.empty()) return values_;
  std::vector<double> out;
  out.reserve(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (mask_[i]) out.push_back(values_[i]);
  }
  return out;
}

void Grid3D::validate() const {
  if (values_.size() != static_cast<std::size_t>(nx_) * ny_ * nz_) {
    throw Error("grid value count does not match dimensions");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!active(i)) continue;
    const double v = values_[i];
    if (!std::isfinite(v)) {
      throw Error("grid value at flat index " + std::to_string(i) +
                  " is not finite");
    }
    if (v < 0.0 || v > 100.0) {
      throw Error("porosity " + std::to_string(v) + " at flat index " +
                  std::to_string(i) + " outside [0, 100]");
    }
  }
}

}  // namespace geoboot
