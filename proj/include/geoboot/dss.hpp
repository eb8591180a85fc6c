#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "geoboot/cdf.hpp"
#include "geoboot/grid.hpp"
#include "geoboot/kriging.hpp"
#include "geoboot/variogram.hpp"
#include "geoboot/wells.hpp"

namespace geoboot {

/// One conditioning datum at an absolute grid cell.
struct ConditioningPoint {
  int x = 0, y = 0, z = 0;
  double value = 0.0;
};

/// Everything a realization is a pure function of, besides the conditioning
/// data and the grid shape.
struct SimulationConfig {
  VariogramModel variogram;
  std::uint64_t seed = 0;
  int max_neighbors = 16;
  /// Anisotropic search ellipsoid radii; defaults to the variogram ranges.
  std::array<double, 3> search_radii{0.0, 0.0, 0.0};
  /// Global distribution the realization draws from (conditioning data, or
  /// the initial map for realities).
  std::shared_ptr<const EmpiricalCdf> global_cdf;

  std::array<double, 3> effective_radii() const {
    return (search_radii[0] > 0.0 && search_radii[1] > 0.0 &&
            search_radii[2] > 0.0)
               ? search_radii
               : variogram.ranges;
  }
};

struct GridShape {
  int nx = 0, ny = 0, nz = 0;
};

/// Direct sequential simulation: random path over unsimulated nodes; at each
/// node simple kriging in original units gives the local mean m(u) and
/// variance s2(u); m(u) maps through the global cdf to a Gaussian score, a
/// value is drawn from Normal(score, s2(u) / (sill + nugget)) and
/// back-transformed into original units. Conditioning cells are honored
/// exactly and previously simulated nodes condition later ones.
///
/// The realization is a pure function of (conditioning, shape, config): the
/// same inputs and seed give a bitwise-identical grid.
Grid3D dss_simulate(std::span<const ConditioningPoint> conditioning,
                    GridShape shape, const SimulationConfig& config,
                    KrigingDiagnostics* diag = nullptr);

/// Conditioning points of a well set: every (x, y, z) cell of each column.
std::vector<ConditioningPoint> conditioning_from_wells(const WellSet& wells);

struct VariogramEstimate {
  int lag = 0;
  double semivariance = 0.0;
  std::size_t n_pairs = 0;
};

/// Classical experimental variogram along an axis-aligned unit direction:
/// half the mean squared difference over all in-bounds active cell pairs at
/// each requested lag. Lags with no pairs are omitted.
std::vector<VariogramEstimate> experimental_variogram(
    const Grid3D& grid, std::array<int, 3> direction,
    std::span<const int> lags);

/// Least-squares spherical range fit to experimental points with the sill
/// held fixed; grid search over candidate ranges. Used to verify variogram
/// reproduction of synthetic maps.
double fit_spherical_range(std::span<const VariogramEstimate> points,
                           double sill, double max_range);

}  // namespace geoboot
