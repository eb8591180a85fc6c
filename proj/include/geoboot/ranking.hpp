#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "geoboot/bayes.hpp"

namespace geoboot {

/// The r grid of prior hypotheses: 0.1, 0.2, ..., 3.0.
std::vector<double> r_grid();

/// Normalized deviation of the posterior from the reality's class
/// proportion: |posterior - real| / real. Uses the unclamped posterior.
/// Throws on real_proportion == 0.
double deviation_r1(double posterior_raw, double real_proportion);

/// D_R2 as a function of the prior-hypothesis coefficient r, for one
/// (template, class, reality, scenario) cell. Two code paths are kept: the
/// literal formula with the ratio prior substituted, and the simplified
/// |likelihood / evidence - r|; they must agree and both are exported.
/// The analytic vertex r* = likelihood / evidence is appended to the r grid
/// when it falls inside [0.1, 3.0], so the true minimum is always emitted.
struct DeviationCurve {
  std::string tpl;
  std::string cls;
  std::string reality_k;
  std::string scenario_k2;

  std::vector<double> r;           // ascending; 30 grid points (+ vertex)
  std::vector<double> literal;     // full-formula evaluation
  std::vector<double> simplified;  // |L/E - r|

  double vertex = 0.0;    // L/E, even when outside the grid
  double argmin_r = 0.0;  // r of the minimal emitted point
  double min_value = 0.0;
  double d_r1 = 0.0;  // deviation of the frequentist-prior posterior

  double likelihood = 0.0;
  double evidence = 0.0;
  double real_proportion = 0.0;
};

/// Throws on evidence <= 0 or real_proportion <= 0.
DeviationCurve deviation_r2_curve(double likelihood, double evidence,
                                  double real_proportion);

/// Curve for one present table cell, keys and D_R1 filled in.
DeviationCurve curve_from_cell(const BayesCell& cell);

/// Optimality structure of the scenario curves of one (template, class,
/// reality): each scenario's interval of r where its deviation is minimal.
/// V-shaped curves with distinct vertices give contiguous intervals with
/// crossovers at vertex midpoints.
struct ScenarioInterval {
  std::string scenario_k2;
  double vertex = 0.0;
  double lo = 0.0, hi = 0.0;  // clipped to [0.1, 3.0]
  bool empty = true;
  bool tied = false;  // shares its vertex with another scenario
  double d_r1 = 0.0;
};

/// Winner at one grid value of r.
struct GridOptimum {
  double r = 0.0;
  std::string scenario_k2;
  bool tied = false;
};

struct RankingEntry {
  std::string tpl;
  std::string cls;
  std::string reality_k;
  std::vector<ScenarioInterval> intervals;     // scenario order as given
  std::vector<GridOptimum> grid_optima;        // one per grid r
  std::vector<std::string> d_r1_order;         // labels, ascending D_R1
  std::vector<std::string> excluded;           // absent-cell scenarios
  bool has_ties = false;
};

/// Ranks the scenario curves of one (template, class, reality). Requires at
/// least two curves; ties are broken by lexicographic scenario label and
/// flagged.
RankingEntry rank_models(std::span<const DeviationCurve> curves);

/// All curves from the present cells of a table, in table order.
std::vector<DeviationCurve> curves_from_table(const ProbabilityTable& table);

/// Groups curves by (template, class, reality) and ranks each group with at
/// least two present curves; groups with fewer are reported as skipped.
std::vector<RankingEntry> rank_all(std::span<const DeviationCurve> curves);

/// CSV export: one row per (template, class, reality, scenario, r) with
/// both D_R2 evaluations. Deterministic bytes for fixed inputs.
void write_deviation_csv(std::span<const DeviationCurve> curves,
                         const std::filesystem::path& path);
std::vector<DeviationCurve> read_deviation_csv(
    const std::filesystem::path& path);

/// Line-oriented ranking report: per (template, class, reality), each
/// scenario's optimal-r interval and the D_R1 ordering.
void write_ranking_report(std::span<const RankingEntry> entries,
                          const std::filesystem::path& path);

}  // namespace geoboot
