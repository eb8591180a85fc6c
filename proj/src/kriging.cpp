#include "geoboot/kriging.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace geoboot {

namespace {

// In-place lower Cholesky of a row-major symmetric matrix. Returns false if
// a pivot drops below the tolerance (numerically non-positive-definite).
bool cholesky(std::vector<double>& a, int n, double pivot_tol) {
  for (int j = 0; j < n; ++j) {
    double d = a[static_cast<std::size_t>(j) * n + j];
    for (int k = 0; k < j; ++k) {
      const double l = a[static_cast<std::size_t>(j) * n + k];
      d -= l * l;
    }
    if (d <= pivot_tol) return false;
    const double root = std::sqrt(d);
    a[static_cast<std::size_t>(j) * n + j] = root;
    for (int i = j + 1; i < n; ++i) {
      double s = a[static_cast<std::size_t>(i) * n + j];
      for (int k = 0; k < j; ++k) {
        s -= a[static_cast<std::size_t>(i) * n + k] *
             a[static_cast<std::size_t>(j) * n + k];
      }
      a[static_cast<std::size_t>(i) * n + j] = s / root;
    }
  }
  return true;
}

// Solves L L^T x = b given the Cholesky factor in the lower triangle.
void cholesky_solve(const std::vector<double>& l, int n,
                    const std::vector<double>& b, std::vector<double>& x) {
  x = b;
  for (int i = 0; i < n; ++i) {
    double s = x[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) {
      s -= l[static_cast<std::size_t>(i) * n + k] * x[static_cast<std::size_t>(k)];
    }
    x[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i) * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) {
      s -= l[static_cast<std::size_t>(k) * n + i] * x[static_cast<std::size_t>(k)];
    }
    x[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i) * n + i];
  }
}

// Index of one member of the pair with the largest off-diagonal covariance;
// the later (farther, with distance-sorted neighbors) member is dropped.
int most_redundant(const std::vector<double>& cov, int n) {
  int drop = n - 1;
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double c = std::fabs(cov[static_cast<std::size_t>(i) * n + j]);
      if (c > best) {
        best = c;
        drop = j;
      }
    }
  }
  return drop;
}

}  // namespace

KrigingSystem solve_simple_kriging(const VariogramModel& model,
                                   std::span<const Neighbor> neighbors,
                                   double global_mean,
                                   KrigingDiagnostics* diag) {
  const double c0 = model.total_sill();
  KrigingSystem sys;

  std::vector<Neighbor> active(neighbors.begin(), neighbors.end());
  std::vector<double> factor;

  for (;;) {
    const int n = static_cast<int>(active.size());
    if (n == 0) {
      sys.n = 0;
      sys.mean = global_mean;
      sys.variance = c0;
      return sys;
    }

    sys.n = n;
    sys.covariance.assign(static_cast<std::size_t>(n) * n, 0.0);
    sys.rhs.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      sys.covariance[static_cast<std::size_t>(i) * n + i] = c0;
      for (int j = i + 1; j < n; ++j) {
        const double c = model.covariance(active[i].dx - active[j].dx,
                                          active[i].dy - active[j].dy,
                                          active[i].dz - active[j].dz);
        sys.covariance[static_cast<std::size_t>(i) * n + j] = c;
        sys.covariance[static_cast<std::size_t>(j) * n + i] = c;
      }
      sys.rhs[static_cast<std::size_t>(i)] =
          model.covariance(active[i].dx, active[i].dy, active[i].dz);
    }

    factor = sys.covariance;
    if (cholesky(factor, n, 1e-10 * c0)) {
      cholesky_solve(factor, n, sys.rhs, sys.weights);
      break;
    }

    if (n == 1) {
      // Irrecoverably singular: fall back to the global moments.
      if (diag) ++diag->singular_fallbacks;
      sys.n = 0;
      sys.covariance.clear();
      sys.rhs.clear();
      sys.weights.clear();
      sys.mean = global_mean;
      sys.variance = c0;
      return sys;
    }

    const int drop = most_redundant(sys.covariance, n);
    active.erase(active.begin() + drop);
    if (diag) ++diag->dropped_neighbors;
  }

  double mean = global_mean;
  double reduction = 0.0;
  for (std::size_t i = 0; i < active.size(); ++i) {
    mean += sys.weights[i] * (active[i].value - global_mean);
    reduction += sys.weights[i] * sys.rhs[i];
  }
  double variance = c0 - reduction;
  if (variance < 0.0) {
    if (diag) ++diag->negative_variance_clamps;
    variance = 0.0;
  }
  variance = std::min(variance, c0);

  sys.mean = mean;
  sys.variance = variance;
  return sys;
}

KrigingResult simple_kriging(const VariogramModel& model,
                             std::span<const Neighbor> neighbors,
                             double global_mean, KrigingDiagnostics* diag) {
  const KrigingSystem sys =
      solve_simple_kriging(model, neighbors, global_mean, diag);
  return {sys.mean, sys.variance, sys.n};
}

}  // namespace geoboot
