#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "geoboot/variogram.hpp"

namespace geoboot {

/// A conditioning point expressed relative to the estimation target.
struct Neighbor {
  double dx = 0.0, dy = 0.0, dz = 0.0;
  double value = 0.0;
};

/// Counters for numerical fallbacks; merged across workers for run reports.
struct KrigingDiagnostics {
  std::uint64_t negative_variance_clamps = 0;
  std::uint64_t singular_fallbacks = 0;
  std::uint64_t dropped_neighbors = 0;

  void merge(const KrigingDiagnostics& other) {
    negative_variance_clamps += other.negative_variance_clamps;
    singular_fallbacks += other.singular_fallbacks;
    dropped_neighbors += other.dropped_neighbors;
  }
};

/// Assembled and solved simple-kriging normal equations for one target.
struct KrigingSystem {
  int n = 0;                        // neighbors actually used
  std::vector<double> covariance;   // row-major n*n, symmetric
  std::vector<double> rhs;          // covariance target <-> neighbor
  std::vector<double> weights;
  double mean = 0.0;
  double variance = 0.0;
};

struct KrigingResult {
  double mean = 0.0;
  double variance = 0.0;
  int n_used = 0;
};

/// Solves the simple-kriging system for a target with the given neighbors:
/// mean = global_mean + sum w_i (z_i - global_mean), variance = C(0) -
/// sum w_i c_i. Zero neighbors is legal and returns (global_mean, C(0)).
/// A singular system drops the most redundant neighbor (largest
/// off-diagonal covariance) and retries; if still singular with one
/// neighbor, falls back to the global moments and counts the event.
/// Variance is clamped to [0, C(0)]; negative clamps are counted.
KrigingSystem solve_simple_kriging(const VariogramModel& model,
                                   std::span<const Neighbor> neighbors,
                                   double global_mean,
                                   KrigingDiagnostics* diag = nullptr);

/// Convenience wrapper returning just the local moments.
KrigingResult simple_kriging(const VariogramModel& model,
                             std::span<const Neighbor> neighbors,
                             double global_mean,
                             KrigingDiagnostics* diag = nullptr);

}  // namespace geoboot
