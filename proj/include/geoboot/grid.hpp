#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace geoboot {

/// Dense 3D porosity field (percent), indexed (x, y, z) with x fastest.
/// The one carrier type shared by initial maps, realities and scenarios.
class Grid3D {
 public:
  Grid3D() = default;

  /// Allocates an nx*ny*nz grid filled with `fill`. Throws on non-positive
  /// dimensions.
  Grid3D(int nx, int ny, int nz, double fill = 0.0);

  /// Builds a grid from existing values and validates the invariants:
  /// size nx*ny*nz, active values finite and inside [0, 100].
  static Grid3D from_values(int nx, int ny, int nz, std::vector<double> values);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  std::size_t size() const { return values_.size(); }

  bool in_bounds(int x, int y, int z) const {
    return x >= 0 && x < nx_ && y >= 0 && y < ny_ && z >= 0 && z < nz_;
  }

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(nx_) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(ny_) * static_cast<std::size_t>(z));
  }

  double at(int x, int y, int z) const { return values_[index(x, y, z)]; }
  double& at(int x, int y, int z) { return values_[index(x, y, z)]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  const std::vector<double>& values() const { return values_; }

  /// Empty mask means all cells are active; otherwise 1 = active.
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  void set_mask(std::vector<std::uint8_t> mask);
  bool active(std::size_t i) const { return mask_.empty() || mask_[i] != 0; }
  std::size_t active_count() const;

  /// Active values in index order.
  std::vector<double> active_values() const;

  /// Checks the type invariants; throws Error with a description on failure.
  void validate() const;

  bool same_shape(const Grid3D& other) const {
    return nx_ == other.nx_ && ny_ == other.ny_ && nz_ == other.nz_;
  }

  bool operator==(const Grid3D& other) const = default;

 private:
  int nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
};

}  // namespace geoboot
