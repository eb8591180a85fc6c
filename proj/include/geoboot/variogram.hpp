#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

namespace geoboot {

enum class VariogramKind { spherical };

/// Anisotropic spherical variogram. Ranges are in grid-block units along the
/// grid principal axes: ranges[0] along +x (azimuth 90, dip 0), ranges[1]
/// along +y (azimuth 0, dip 0), ranges[2] along +z (azimuth 0, dip 90).
struct VariogramModel {
  VariogramKind kind = VariogramKind::spherical;
  std::array<double, 3> ranges{1.0, 1.0, 1.0};
  double sill = 1.0;
  double nugget = 0.0;
  std::string label;  // conceptual-model id, e.g. "G", "M", "P"

  /// Throws Error unless ranges > 0, sill > 0, nugget >= 0.
  void validate() const;

  double total_sill() const { return sill + nugget; }

  /// Anisotropy-normalized lag |(dx/ax, dy/ay, dz/az)|.
  double normalized_lag(double dx, double dy, double dz) const {
    const double u = dx / ranges[0];
    const double v = dy / ranges[1];
    const double w = dz / ranges[2];
    return std::sqrt(u * u + v * v + w * w);
  }

  /// Semivariance. gamma(0) = 0; nugget + sill * (1.5h - 0.5h^3) for
  /// normalized lag h in (0, 1); nugget + sill at and beyond the range.
  double gamma(double dx, double dy, double dz) const {
    const double h = normalized_lag(dx, dy, dz);
    if (h == 0.0) return 0.0;
    if (h >= 1.0) return nugget + sill;
    return nugget + sill * (1.5 * h - 0.5 * h * h * h);
  }

  /// C(h) = C(0) - gamma(h) with C(0) = sill + nugget.
  double covariance(double dx, double dy, double dz) const {
    return (sill + nugget) - gamma(dx, dy, dz);
  }
};

/// A variogram as configured: the sill may be left unset, in which case it
/// defaults to the variance of the conditioning data at simulation time.
struct VariogramSpec {
  std::array<double, 3> ranges{1.0, 1.0, 1.0};
  double nugget = 0.0;
  std::optional<double> sill;
  std::string label;

  void validate() const;

  /// Resolves the sill (configured value, else `data_variance`, else 1.0 for
  /// degenerate zero-variance data) and returns a concrete model.
  VariogramModel materialize(double data_variance) const;
};

}  // namespace geoboot
