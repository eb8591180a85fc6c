#include "geoboot/dss.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "geoboot/error.hpp"
#include "geoboot/rng.hpp"

namespace geoboot {

namespace {

struct SearchOffset {
  std::int16_t dx, dy, dz;
  float dist;  // anisotropy-normalized, ordering only
};

using SearchTemplate = std::vector<SearchOffset>;

// Search templates are pure functions of (radii, ranges, clamped extents)
// and can be large; build once and share across realizations.
std::shared_ptr<const SearchTemplate> search_template(
    const std::array<double, 3>& radii, const std::array<double, 3>& ranges,
    GridShape shape) {
  const int ex = std::min(shape.nx - 1, static_cast<int>(radii[0]));
  const int ey = std::min(shape.ny - 1, static_cast<int>(radii[1]));
  const int ez = std::min(shape.nz - 1, static_cast<int>(radii[2]));

  using Key = std::tuple<double, double, double, double, double, double, int,
                         int, int>;
  const Key key{radii[0], radii[1], radii[2], ranges[0],
                ranges[1], ranges[2], ex,       ey,
                ez};

  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const SearchTemplate>> cache;
  std::scoped_lock lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto tmpl = std::make_shared<SearchTemplate>();
  for (int dz = -ez; dz <= ez; ++dz) {
    for (int dy = -ey; dy <= ey; ++dy) {
      for (int dx = -ex; dx <= ex; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const double u = dx / radii[0];
        const double v = dy / radii[1];
        const double w = dz / radii[2];
        if (u * u + v * v + w * w > 1.0) continue;
        const double a = dx / ranges[0];
        const double b = dy / ranges[1];
        const double c = dz / ranges[2];
        tmpl->push_back({static_cast<std::int16_t>(dx),
                         static_cast<std::int16_t>(dy),
                         static_cast<std::int16_t>(dz),
                         static_cast<float>(
                             std::sqrt(a * a + b * b + c * c))});
      }
    }
  }
  std::sort(tmpl->begin(), tmpl->end(),
            [](const SearchOffset& l, const SearchOffset& r) {
              if (l.dist != r.dist) return l.dist < r.dist;
              return std::tie(l.dz, l.dy, l.dx) < std::tie(r.dz, r.dy, r.dx);
            });
  cache.emplace(key, tmpl);
  return tmpl;
}

}  // namespace

Grid3D dss_simulate(std::span<const ConditioningPoint> conditioning,
                    GridShape shape, const SimulationConfig& config,
                    KrigingDiagnostics* diag) {
  if (!config.global_cdf || config.global_cdf->size() == 0) {
    throw Error("dss: empty global cdf");
  }
  config.variogram.validate();
  if (config.max_neighbors < 1) {
    throw Error("dss: max_neighbors must be >= 1");
  }

  Grid3D grid(shape.nx, shape.ny, shape.nz, 0.0);
  if (grid.size() > 0xffffffffull) {  // path indices are 32-bit
    throw Error("dss: grid larger than 2^32 cells");
  }
  std::vector<std::uint8_t> informed(grid.size(), 0);

  for (const auto& point : conditioning) {
    if (!grid.in_bounds(point.x, point.y, point.z)) {
      throw Error("dss: conditioning cell (" + std::to_string(point.x) + ", " +
                  std::to_string(point.y) + ", " + std::to_string(point.z) +
                  ") outside grid");
    }
    const std::size_t idx = grid.index(point.x, point.y, point.z);
    if (informed[idx] && grid[idx] != point.value) {
      throw Error("dss: conflicting conditioning data at cell (" +
                  std::to_string(point.x) + ", " + std::to_string(point.y) +
                  ", " + std::to_string(point.z) + ")");
    }
    grid[idx] = point.value;
    informed[idx] = 1;
  }

  const EmpiricalCdf& cdf = *config.global_cdf;
  const double global_mean = cdf.mean();
  const double total_sill = config.variogram.total_sill();
  const auto radii = config.effective_radii();
  const auto tmpl = search_template(radii, config.variogram.ranges, shape);

  // Random path over the unsimulated nodes.
  std::vector<std::uint32_t> path;
  path.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!informed[i]) path.push_back(static_cast<std::uint32_t>(i));
  }
  Rng rng(config.seed);
  rng.shuffle(path);

  const auto nx = static_cast<std::uint32_t>(shape.nx);
  const auto nxy = static_cast<std::uint32_t>(shape.nx) *
                   static_cast<std::uint32_t>(shape.ny);

  std::vector<Neighbor> neighbors;
  neighbors.reserve(static_cast<std::size_t>(config.max_neighbors));

  for (const std::uint32_t node : path) {
    const int z = static_cast<int>(node / nxy);
    const int y = static_cast<int>((node % nxy) / nx);
    const int x = static_cast<int>(node % nx);

    neighbors.clear();
    for (const auto& off : *tmpl) {
      const int px = x + off.dx;
      const int py = y + off.dy;
      const int pz = z + off.dz;
      if (px < 0 || px >= shape.nx || py < 0 || py >= shape.ny || pz < 0 ||
          pz >= shape.nz) {
        continue;
      }
      const std::size_t idx = grid.index(px, py, pz);
      if (!informed[idx]) continue;
      neighbors.push_back({static_cast<double>(off.dx),
                           static_cast<double>(off.dy),
                           static_cast<double>(off.dz), grid[idx]});
      if (static_cast<int>(neighbors.size()) >= config.max_neighbors) break;
    }

    const KrigingResult local =
        simple_kriging(config.variogram, neighbors, global_mean, diag);

    // Gaussian buffer: center the unit-variance-standardized draw on the
    // score of the kriged mean, then return to original units.
    const double score = cdf.to_gaussian(local.mean);
    const double sd = std::sqrt(local.variance / total_sill);
    const double draw = score + sd * rng.normal();
    grid[node] = cdf.from_gaussian(draw);
    informed[node] = 1;
  }

  return grid;
}

std::vector<ConditioningPoint> conditioning_from_wells(const WellSet& wells) {
  std::vector<ConditioningPoint> points;
  points.reserve(static_cast<std::size_t>(wells.n_wells()) *
                 static_cast<std::size_t>(wells.nz()));
  for (int i = 0; i < wells.n_wells(); ++i) {
    const auto [x, y] = wells.well_xy(i);
    const auto& column = wells.data[static_cast<std::size_t>(i)];
    for (int z = 0; z < static_cast<int>(column.size()); ++z) {
      points.push_back({x, y, z, column[static_cast<std::size_t>(z)]});
    }
  }
  return points;
}

std::vector<VariogramEstimate> experimental_variogram(
    const Grid3D& grid, std::array<int, 3> direction,
    std::span<const int> lags) {
  if (direction == std::array<int, 3>{0, 0, 0}) {
    throw Error("experimental variogram: zero direction");
  }
  std::vector<VariogramEstimate> out;
  for (const int lag : lags) {
    const int sx = direction[0] * lag;
    const int sy = direction[1] * lag;
    const int sz = direction[2] * lag;
    double sum = 0.0;
    std::size_t pairs = 0;
    for (int z = 0; z < grid.nz(); ++z) {
      if (z + sz < 0 || z + sz >= grid.nz()) continue;
      for (int y = 0; y < grid.ny(); ++y) {
        if (y + sy < 0 || y + sy >= grid.ny()) continue;
        for (int x = 0; x < grid.nx(); ++x) {
          if (x + sx < 0 || x + sx >= grid.nx()) continue;
          const std::size_t a = grid.index(x, y, z);
          const std::size_t b = grid.index(x + sx, y + sy, z + sz);
          if (!grid.active(a) || !grid.active(b)) continue;
          const double d = grid[a] - grid[b];
          sum += d * d;
          ++pairs;
        }
      }
    }
    if (pairs > 0) {
      out.push_back({lag, sum / (2.0 * static_cast<double>(pairs)), pairs});
    }
  }
  return out;
}

double fit_spherical_range(std::span<const VariogramEstimate> points,
                           double sill, double max_range) {
  if (points.empty()) {
    throw Error("fit_spherical_range: no experimental points");
  }
  auto model = [sill](double h, double a) {
    if (h <= 0.0) return 0.0;
    if (h >= a) return sill;
    const double t = h / a;
    return sill * (1.5 * t - 0.5 * t * t * t);
  };
  double best_a = max_range;
  double best_sse = std::numeric_limits<double>::infinity();
  for (double a = 0.25; a <= max_range + 1e-9; a += 0.25) {
    double sse = 0.0;
    for (const auto& p : points) {
      const double err = model(static_cast<double>(p.lag), a) - p.semivariance;
      sse += static_cast<double>(p.n_pairs) * err * err;
    }
    if (sse < best_sse) {
      best_sse = sse;
      best_a = a;
    }
  }
  return best_a;
}

}  // namespace geoboot
