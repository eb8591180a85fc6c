#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "geoboot/error.hpp"
#include "geoboot/ranking.hpp"
#include "geoboot/rng.hpp"

using namespace geoboot;

namespace {

DeviationCurve keyed_curve(double likelihood, double evidence, double real,
                           const std::string& scenario,
                           double posterior_raw = -1.0) {
  DeviationCurve c = deviation_r2_curve(likelihood, evidence, real);
  c.tpl = "w";
  c.cls = "1Q";
  c.reality_k = "G";
  c.scenario_k2 = scenario;
  if (posterior_raw >= 0.0) c.d_r1 = deviation_r1(posterior_raw, real);
  return c;
}

}  // namespace

TEST_CASE("the r grid is 0.1 .. 3.0 in steps of 0.1") {
  const auto grid = r_grid();
  REQUIRE(grid.size() == 30);
  CHECK(grid.front() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(grid.back() == doctest::Approx(3.0).epsilon(1e-15));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(grid[i] - grid[i - 1] == doctest::Approx(0.1).epsilon(1e-12));
  }
}

TEST_CASE("deviation_r1 is the normalized absolute deviation") {
  CHECK(deviation_r1(0.3, 0.25) == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(deviation_r1(0.25, 0.25) == 0.0);
  CHECK_THROWS_AS(deviation_r1(0.3, 0.0), Error);

  // independent re-evaluation of the same formula
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double post = 2.0 * rng.uniform();
    const double real = 0.01 + 0.99 * rng.uniform();
    const double direct = std::fabs(post - real) / real;
    CHECK(std::fabs(deviation_r1(post, real) - direct) <= 1e-15);
  }
}

TEST_CASE("deviation curve: literal and simplified paths agree") {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const double like = rng.uniform();
    const double evid = 0.05 + 0.95 * rng.uniform();
    const double real = 0.05 + 0.9 * rng.uniform();
    const DeviationCurve curve = deviation_r2_curve(like, evid, real);
    REQUIRE(curve.r.size() >= 30);
    for (std::size_t j = 0; j < curve.r.size(); ++j) {
      CHECK(std::fabs(curve.literal[j] - curve.simplified[j]) <= 1e-12);
      CHECK(curve.simplified[j] ==
            doctest::Approx(std::fabs(like / evid - curve.r[j]))
                .epsilon(1e-14));
      CHECK(curve.literal[j] >= 0.0);
    }
  }
}

TEST_CASE("deviation curve examples") {
  // likelihood == evidence: D(1.0) = 0 and the minimum sits at r = 1
  const DeviationCurve flat = deviation_r2_curve(0.4, 0.4, 0.3);
  CHECK(flat.vertex == 1.0);
  CHECK(flat.argmin_r == 1.0);
  CHECK(flat.min_value == 0.0);

  // L/E = 2: D(1.0) = 1
  const DeviationCurve steep = deviation_r2_curve(0.6, 0.3, 0.5);
  bool found = false;
  for (std::size_t i = 0; i < steep.r.size(); ++i) {
    if (std::fabs(steep.r[i] - 1.0) < 1e-12) {
      CHECK(steep.simplified[i] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(steep.literal[i] == doctest::Approx(1.0).epsilon(1e-12));
      found = true;
    }
  }
  CHECK(found);

  CHECK_THROWS_AS(deviation_r2_curve(0.5, 0.0, 0.5), Error);
  CHECK_THROWS_AS(deviation_r2_curve(0.5, 0.5, 0.0), Error);
}

TEST_CASE("curves are V-shaped with a zero minimum at the vertex") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double like = rng.uniform();
    const double evid = 0.05 + 0.95 * rng.uniform();
    const DeviationCurve curve = deviation_r2_curve(like, evid, 0.4);

    // non-increasing then non-decreasing
    bool decreasing = true;
    for (std::size_t j = 1; j < curve.r.size(); ++j) {
      if (decreasing && curve.simplified[j] > curve.simplified[j - 1] + 1e-15) {
        decreasing = false;
      } else if (!decreasing) {
        CHECK(curve.simplified[j] >= curve.simplified[j - 1] - 1e-15);
      }
    }

    if (curve.vertex >= 0.1 && curve.vertex <= 3.0) {
      CHECK(curve.min_value == 0.0);
      CHECK(curve.argmin_r == curve.vertex);
      // the analytic vertex was emitted
      bool has_vertex = false;
      for (const double r : curve.r) {
        if (r == curve.vertex) has_vertex = true;
      }
      CHECK(has_vertex);
    }
  }
}

TEST_CASE("D_R2 at the prior-matching r scales D_R1 by exactly r") {
  // With r* = real/prior1, the ratio prior reproduces the frequentist prior
  // and the deviations obey D_R2(r*) = r* * D_R1 (the trailing factor of the
  // formula); verified by exact substitution.
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const double like = rng.uniform();
    const double evid = 0.05 + 0.95 * rng.uniform();
    const double real = 0.05 + 0.9 * rng.uniform();
    const double prior1 = 0.05 + 0.9 * rng.uniform();
    const double r_star = real / prior1;

    const double post1 = like * prior1 / evid;
    const double d_r1 = deviation_r1(post1, real);
    const double d_r2_at_star = std::fabs(like / evid - r_star);
    CHECK(std::fabs(d_r2_at_star - r_star * d_r1) <= 1e-12);
  }
}

TEST_CASE("two-curve crossover lands at the vertex midpoint") {
  // vertices 0.5 and 2.0: |0.5 - r| = |2.0 - r| at r = 1.25
  const auto a = keyed_curve(0.25, 0.5, 0.4, "A", 0.3);
  const auto b = keyed_curve(0.8, 0.4, 0.4, "B", 0.5);
  CHECK(a.vertex == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b.vertex == doctest::Approx(2.0).epsilon(1e-15));

  const RankingEntry entry = rank_models(std::vector<DeviationCurve>{a, b});
  REQUIRE(entry.intervals.size() == 2);
  CHECK(entry.intervals[0].scenario_k2 == "A");
  CHECK(entry.intervals[0].lo == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(entry.intervals[0].hi == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(entry.intervals[1].lo == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(entry.intervals[1].hi == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_FALSE(entry.has_ties);

  for (const auto& opt : entry.grid_optima) {
    CHECK(opt.scenario_k2 == (opt.r < 1.25 ? "A" : "B"));
  }
}

TEST_CASE("identical curves tie everywhere and are flagged") {
  const auto a = keyed_curve(0.3, 0.6, 0.4, "A", 0.2);
  const auto b = keyed_curve(0.3, 0.6, 0.4, "B", 0.2);
  const RankingEntry entry = rank_models(std::vector<DeviationCurve>{a, b});
  CHECK(entry.has_ties);
  REQUIRE(entry.intervals.size() == 2);
  CHECK(entry.intervals[0].tied);
  CHECK(entry.intervals[1].tied);
  // lexicographic winner holds the region; the other is empty
  CHECK_FALSE(entry.intervals[0].empty);
  CHECK(entry.intervals[1].empty);
  for (const auto& opt : entry.grid_optima) {
    CHECK(opt.tied);
    CHECK(opt.scenario_k2 == "A");
  }
}

TEST_CASE("optimality regions are contiguous for any vertex set") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DeviationCurve> curves;
    const int n = 2 + static_cast<int>(rng.below(4));
    for (int s = 0; s < n; ++s) {
      const double like = 0.01 + 0.98 * rng.uniform();
      const double evid = 0.05 + 0.95 * rng.uniform();
      curves.push_back(keyed_curve(like, evid, 0.4,
                                   std::string(1, static_cast<char>('A' + s)),
                                   0.1 + rng.uniform()));
    }
    const RankingEntry entry = rank_models(curves);

    // each scenario's winning grid points form one contiguous run
    for (const auto& iv : entry.intervals) {
      int runs = 0;
      bool inside = false;
      for (const auto& opt : entry.grid_optima) {
        const bool mine = opt.scenario_k2 == iv.scenario_k2;
        if (mine && !inside) ++runs;
        inside = mine;
      }
      CHECK(runs <= 1);
    }

    // winners at grid points agree with the interval partition
    for (const auto& opt : entry.grid_optima) {
      if (opt.tied) continue;
      for (const auto& iv : entry.intervals) {
        if (iv.scenario_k2 != opt.scenario_k2 || iv.empty) continue;
        CHECK(opt.r >= iv.lo - 0.05 - 1e-12);
        CHECK(opt.r <= iv.hi + 0.05 + 1e-12);
      }
    }
  }
}

TEST_CASE("rank_models rejects degenerate groups") {
  const auto a = keyed_curve(0.3, 0.6, 0.4, "A", 0.2);
  CHECK_THROWS_AS(rank_models(std::vector<DeviationCurve>{a}), Error);
  CHECK_THROWS_AS(rank_models({}), Error);

  auto other = keyed_curve(0.2, 0.5, 0.4, "B", 0.2);
  other.reality_k = "P";  // different group
  CHECK_THROWS_AS(rank_models(std::vector<DeviationCurve>{a, other}), Error);
}

TEST_CASE("d_r1 ranking is ascending") {
  const auto a = keyed_curve(0.3, 0.6, 0.4, "A", 0.9);  // largest d_r1
  const auto b = keyed_curve(0.25, 0.5, 0.4, "B", 0.41);
  const auto c = keyed_curve(0.6, 0.9, 0.4, "C", 0.45);
  const RankingEntry entry = rank_models(std::vector<DeviationCurve>{a, b, c});
  REQUIRE(entry.d_r1_order.size() == 3);
  CHECK(entry.d_r1_order[0] == "B");
  CHECK(entry.d_r1_order[1] == "C");
  CHECK(entry.d_r1_order[2] == "A");
}

TEST_CASE("deviation csv round-trips curves") {
  std::vector<DeviationCurve> curves{keyed_curve(0.3, 0.6, 0.4, "A", 0.2),
                                     keyed_curve(0.7, 0.5, 0.4, "B", 0.6)};
  const auto path =
      std::filesystem::temp_directory_path() / "geoboot_test_curves.csv";
  write_deviation_csv(curves, path);
  const auto loaded = read_deviation_csv(path);
  REQUIRE(loaded.size() == 2);
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(loaded[c].scenario_k2 == curves[c].scenario_k2);
    REQUIRE(loaded[c].r.size() == curves[c].r.size());
    for (std::size_t i = 0; i < curves[c].r.size(); ++i) {
      CHECK(loaded[c].r[i] == curves[c].r[i]);
      CHECK(loaded[c].literal[i] == curves[c].literal[i]);
      CHECK(loaded[c].simplified[i] == curves[c].simplified[i]);
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("curves_from_table keeps table order and fills d_r1") {
  ProbabilityTable table;
  BayesCell cell;
  cell.tpl = "w";
  cell.cls = "1Q";
  cell.reality_k = "G";
  cell.scenario_k2 = "M";
  cell.prior = 0.3;
  cell.evidence = 0.5;
  cell.likelihood = 0.45;
  cell.posterior_raw = 0.27;
  cell.posterior_clamped = 0.27;
  cell.real_proportion = 0.25;
  cell.m = 10;
  table.cells.push_back(cell);

  BayesCell absent = cell;
  absent.scenario_k2 = "P";
  absent.status = BayesCell::Status::empty_class_in_reality;
  table.cells.push_back(absent);

  const auto curves = curves_from_table(table);
  REQUIRE(curves.size() == 1);  // absent cells are skipped
  CHECK(curves[0].scenario_k2 == "M");
  CHECK(curves[0].d_r1 ==
        doctest::Approx(std::fabs(0.27 - 0.25) / 0.25).epsilon(1e-12));
  CHECK(curves[0].vertex == doctest::Approx(0.9).epsilon(1e-12));
}
