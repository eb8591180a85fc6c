#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "geoboot/cdf.hpp"
#include "geoboot/dss.hpp"
#include "geoboot/error.hpp"
#include "geoboot/kriging.hpp"
#include "geoboot/rng.hpp"
#include "oracles.hpp"

using namespace geoboot;

namespace {

VariogramModel iso10() {
  VariogramModel m;
  m.ranges = {10, 10, 10};
  m.sill = 1.0;
  m.nugget = 0.0;
  return m;
}

std::shared_ptr<const EmpiricalCdf> uniform_cdf(int n, double lo, double hi,
                                                std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> sample(static_cast<std::size_t>(n));
  for (auto& v : sample) v = lo + (hi - lo) * rng.uniform();
  return std::make_shared<const EmpiricalCdf>(std::move(sample));
}

}  // namespace

TEST_CASE("normal quantile inverts the normal cdf") {
  for (double p : {1e-6, 0.01, 0.2, 0.5, 0.8, 0.99, 1.0 - 1e-6}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
}

TEST_CASE("empirical cdf transforms round-trip inside the support") {
  Rng rng(7);
  std::vector<double> sample(200);
  for (auto& v : sample) v = 10.0 + 20.0 * rng.uniform();
  const EmpiricalCdf cdf(sample);
  for (int i = 0; i < 50; ++i) {
    const double v = 10.5 + 19.0 * rng.uniform();
    const double back = cdf.from_gaussian(cdf.to_gaussian(v));
    CHECK(back == doctest::Approx(v).epsilon(1e-9));
  }
  // tails clamp to the data support
  CHECK(cdf.from_gaussian(-9.0) == cdf.min());
  CHECK(cdf.from_gaussian(9.0) == cdf.max());
  CHECK_THROWS_AS(EmpiricalCdf({}), Error);
}

TEST_CASE("empirical cdf handles constant samples") {
  const EmpiricalCdf cdf(std::vector<double>{7.0, 7.0, 7.0});
  CHECK(cdf.variance() == 0.0);
  CHECK(cdf.to_gaussian(7.0) == 0.0);
  CHECK(cdf.from_gaussian(1.3) == 7.0);
  CHECK(cdf.from_gaussian(-2.0) == 7.0);
}

TEST_CASE("kriging with no neighbors returns the global moments") {
  const auto result = simple_kriging(iso10(), {}, 17.5);
  CHECK(result.mean == 17.5);
  CHECK(result.variance == 1.0);
  CHECK(result.n_used == 0);
}

TEST_CASE("kriging is exact at a collocated datum") {
  const std::vector<Neighbor> neighbors{{0, 0, 0, 23.5}};
  const auto result = simple_kriging(iso10(), neighbors, 10.0);
  CHECK(result.mean == doctest::Approx(23.5).epsilon(1e-10));
  CHECK(result.variance == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("two symmetric neighbors match the hand-solved system") {
  // target at origin; data at (+-3, 0, 0); isotropic range 10, sill 1.
  // c = C(3) = 1 - (1.5*0.3 - 0.5*0.027) = 0.5635; C12 = C(6) = 0.208.
  // weights = c / (1 + C12) each by symmetry.
  const double z1 = 18.0, z2 = 26.0, mean = 20.0;
  const std::vector<Neighbor> neighbors{{-3, 0, 0, z1}, {3, 0, 0, z2}};
  const auto sys = solve_simple_kriging(iso10(), neighbors, mean);

  const double c = 0.5635, c12 = 0.208;
  const double w = c / (1.0 + c12);
  REQUIRE(sys.n == 2);
  CHECK(sys.weights[0] == doctest::Approx(w).epsilon(1e-10));
  CHECK(sys.weights[1] == doctest::Approx(w).epsilon(1e-10));
  CHECK(sys.mean ==
        doctest::Approx(mean + w * (z1 - mean) + w * (z2 - mean))
            .epsilon(1e-10));
  CHECK(sys.variance == doctest::Approx(1.0 - 2.0 * w * c).epsilon(1e-10));
  // assembled system invariants
  CHECK(sys.covariance[0 * 2 + 0] == 1.0);
  CHECK(sys.covariance[1 * 2 + 1] == 1.0);
  CHECK(sys.covariance[0 * 2 + 1] == sys.covariance[1 * 2 + 0]);
}

TEST_CASE("duplicate neighbors are dropped, not fatal") {
  KrigingDiagnostics diag;
  const std::vector<Neighbor> neighbors{{2, 0, 0, 15.0}, {2, 0, 0, 15.0}};
  const auto with_dup = simple_kriging(iso10(), neighbors, 20.0, &diag);
  const auto single = simple_kriging(
      iso10(), std::vector<Neighbor>{{2, 0, 0, 15.0}}, 20.0);
  CHECK(diag.dropped_neighbors >= 1);
  CHECK(with_dup.mean == doctest::Approx(single.mean).epsilon(1e-12));
  CHECK(with_dup.variance == doctest::Approx(single.variance).epsilon(1e-12));
}

TEST_CASE("kriging variance stays within [0, sill + nugget]") {
  Rng rng(99);
  VariogramModel m;
  m.ranges = {8, 5, 3};
  m.sill = 2.0;
  m.nugget = 0.3;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Neighbor> neighbors(1 + rng.below(12));
    for (auto& n : neighbors) {
      n.dx = rng.uniform_int(-6, 6);
      n.dy = rng.uniform_int(-4, 4);
      n.dz = rng.uniform_int(-2, 2);
      n.value = 30.0 * rng.uniform();
    }
    const auto result = simple_kriging(m, neighbors, 15.0);
    CHECK(result.variance >= 0.0);
    CHECK(result.variance <= m.total_sill());
  }
}

TEST_CASE("dss honors conditioning data exactly and is deterministic") {
  SimulationConfig cfg;
  cfg.variogram = iso10();
  cfg.variogram.ranges = {6, 4, 2};
  cfg.variogram.sill = 0.0;  // resolved below
  cfg.variogram.sill = 30.0;
  cfg.seed = 12345;
  cfg.global_cdf = uniform_cdf(500, 10.0, 30.0, 5);

  std::vector<ConditioningPoint> data;
  Rng rng(31);
  for (int i = 0; i < 12; ++i) {
    data.push_back({static_cast<int>(rng.below(12)),
                    static_cast<int>(rng.below(9)),
                    static_cast<int>(rng.below(3)),
                    10.0 + 20.0 * rng.uniform()});
  }
  const GridShape shape{12, 9, 3};
  const Grid3D a = dss_simulate(data, shape, cfg);
  const Grid3D b = dss_simulate(data, shape, cfg);
  CHECK(a == b);  // bitwise determinism

  for (const auto& point : data) {
    CHECK(a.at(point.x, point.y, point.z) == point.value);
  }

  cfg.seed = 54321;
  const Grid3D c = dss_simulate(data, shape, cfg);
  CHECK_FALSE(a == c);
  for (const auto& point : data) {
    CHECK(c.at(point.x, point.y, point.z) == point.value);
  }
}

TEST_CASE("a fully conditioned grid is returned untouched") {
  SimulationConfig cfg;
  cfg.variogram = iso10();
  cfg.seed = 1;
  cfg.global_cdf = uniform_cdf(100, 10.0, 30.0, 6);
  std::vector<ConditioningPoint> data;
  Rng rng(8);
  const GridShape shape{4, 3, 2};
  Grid3D expected(4, 3, 2);
  for (int z = 0; z < 2; ++z)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 4; ++x) {
        const double v = 10.0 + 20.0 * rng.uniform();
        data.push_back({x, y, z, v});
        expected.at(x, y, z) = v;
      }
  CHECK(dss_simulate(data, shape, cfg) == expected);
}

TEST_CASE("dss rejects bad inputs") {
  SimulationConfig cfg;
  cfg.variogram = iso10();
  cfg.seed = 1;
  const GridShape shape{4, 4, 1};
  CHECK_THROWS_AS(dss_simulate({}, shape, cfg), Error);  // no cdf
  cfg.global_cdf = uniform_cdf(50, 10.0, 30.0, 7);
  const std::vector<ConditioningPoint> outside{{4, 0, 0, 20.0}};
  CHECK_THROWS_AS(dss_simulate(outside, shape, cfg), Error);
  const std::vector<ConditioningPoint> conflict{{1, 1, 0, 20.0},
                                                {1, 1, 0, 21.0}};
  CHECK_THROWS_AS(dss_simulate(conflict, shape, cfg), Error);
}

TEST_CASE("simulated values stay inside the global cdf support") {
  SimulationConfig cfg;
  cfg.variogram = iso10();
  cfg.variogram.ranges = {5, 5, 1};
  cfg.variogram.sill = 25.0;
  cfg.seed = 77;
  cfg.global_cdf = uniform_cdf(300, 12.0, 28.0, 9);
  const Grid3D g = dss_simulate({}, GridShape{20, 20, 1}, cfg);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g[i] >= cfg.global_cdf->min());
    CHECK(g[i] <= cfg.global_cdf->max());
  }
}

TEST_CASE("experimental variogram matches hand values") {
  // constant field: no variance at any lag
  Grid3D constant(6, 5, 2, 9.0);
  const std::vector<int> lags{1, 2, 3};
  for (const auto& e : experimental_variogram(constant, {1, 0, 0}, lags)) {
    CHECK(e.semivariance == 0.0);
  }

  // alternating 0/2 along x: squared difference 4 at lag 1, half of mean = 2
  Grid3D alternating(8, 1, 1);
  for (int x = 0; x < 8; ++x) alternating.at(x, 0, 0) = (x % 2 == 0) ? 0.0 : 2.0;
  const auto est = experimental_variogram(alternating, {1, 0, 0}, lags);
  REQUIRE(est.size() == 3);
  CHECK(est[0].lag == 1);
  CHECK(est[0].semivariance == 2.0);
  CHECK(est[0].n_pairs == 7);
  CHECK(est[1].semivariance == 0.0);  // lag 2 realigns the pattern

  // out-of-range lags are omitted
  const std::vector<int> far{7, 8, 9};
  CHECK(experimental_variogram(alternating, {1, 0, 0}, far).size() == 1);
}

TEST_CASE("experimental variogram agrees with the pairwise oracle") {
  Rng rng(404);
  Grid3D g(15, 8, 2);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 40.0 * rng.uniform();
  const std::vector<int> lags{1, 2, 3, 5};
  for (const auto& e : experimental_variogram(g, {1, 0, 0}, lags)) {
    CHECK(e.semivariance ==
          doctest::Approx(oracle::semivariance_x(g, e.lag)).epsilon(1e-13));
  }
}

TEST_CASE("white noise flattens to the sample variance at large lags") {
  Rng rng(515);
  Grid3D g(60, 60, 1);
  double mean = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = 10.0 + 20.0 * rng.uniform();
    mean += g[i];
  }
  mean /= static_cast<double>(g.size());
  double var = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    var += (g[i] - mean) * (g[i] - mean);
  }
  var /= static_cast<double>(g.size());

  const std::vector<int> lags{10, 15, 20};
  for (const auto& e : experimental_variogram(g, {1, 0, 0}, lags)) {
    CHECK(e.semivariance == doctest::Approx(var).epsilon(0.10));
  }
}

TEST_CASE("spherical range fit recovers a noiseless model") {
  VariogramModel m = iso10();
  m.ranges = {12, 12, 12};
  m.sill = 2.0;
  std::vector<VariogramEstimate> points;
  for (int lag = 1; lag <= 20; ++lag) {
    points.push_back({lag, m.gamma(lag, 0, 0), 100});
  }
  CHECK(fit_spherical_range(points, 2.0, 30.0) ==
        doctest::Approx(12.0).epsilon(0.03));
}

TEST_CASE("histogram reproduction smoke check") {
  SimulationConfig cfg;
  cfg.variogram = iso10();
  cfg.variogram.ranges = {8, 6, 1};
  auto cdf = uniform_cdf(1000, 10.0, 30.0, 21);
  cfg.variogram.sill = cdf->variance();
  cfg.global_cdf = cdf;

  std::vector<double> pooled;
  for (int r = 0; r < 10; ++r) {
    cfg.seed = derive_seed(400, {static_cast<std::uint64_t>(r)});
    const Grid3D g = dss_simulate({}, GridShape{30, 30, 1}, cfg);
    pooled.insert(pooled.end(), g.values().begin(), g.values().end());
  }
  const double ks = oracle::ks_distance(
      pooled, [&](double v) { return cdf->cdf(v); });
  CHECK(ks < 0.1);  // the acceptance suite runs the full 30-realization check
}
