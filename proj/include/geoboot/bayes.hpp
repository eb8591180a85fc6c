#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "geoboot/bootstrap.hpp"
#include "geoboot/classes.hpp"
#include "geoboot/grid.hpp"
#include "geoboot/wells.hpp"

namespace geoboot {

/// Frequentist prior: mean over well sets of the in-class fraction of each
/// set's cell values. Throws on an empty list or an empty well set.
double prior_frequentist(std::span<const WellSet> well_sets,
                         const PorosityClass& cls);

/// Ratio prior hypothesis: real_proportion / r. May exceed 1 (retained
/// unclamped); callers flag values > 1 as non-probability hypotheses.
/// Throws on r <= 0.
double prior_ratio(double real_proportion, double r);

/// Evidence: mean over scenario grids of the in-class cell fraction.
/// Throws on an empty list or shape mismatch.
double evidence(std::span<const Grid3D> scenarios, const PorosityClass& cls);

/// Likelihood of observing an in-class estimate where the reality is in
/// class: block-wise co-occurrence counted over all scenarios, normalized by
/// scenarios * (reality in-class cells) so the result is a conditional
/// proportion in [0, 1]. Throws if the reality has no in-class cell
/// ("empty class in reality") or on shape mismatch.
double likelihood(const Grid3D& reality, std::span<const Grid3D> scenarios,
                  const PorosityClass& cls);

/// Bayes update: likelihood * prior / evidence, unclamped.
/// Throws on evidence <= 0 ("no evidence mass").
double posterior(double likelihood, double prior, double evidence);

/// One (template, class, reality k, scenario k') cell of the probability
/// table. A cell is absent when the likelihood or posterior is undefined
/// for it; the raw posterior is kept alongside the clamped copy because the
/// Bayes ratio may exceed 1.
struct BayesCell {
  enum class Status { ok, empty_class_in_reality, no_evidence };

  std::string tpl;
  std::string cls;
  std::string reality_k;
  std::string scenario_k2;

  Status status = Status::ok;
  double prior = 0.0;
  double evidence = 0.0;
  double likelihood = 0.0;
  double posterior_raw = 0.0;
  double posterior_clamped = 0.0;
  double real_proportion = 0.0;
  int m = 0;

  bool ok() const { return status == Status::ok; }
};

struct ProbabilityTable {
  std::vector<BayesCell> cells;  // deterministic (tpl, cls, k, k') order
};

/// Streaming aggregator over the scenarios of one (template, reality k,
/// scenario k') group: scenarios are fed one at a time, so the pipeline
/// never holds the whole ensemble in memory. Equivalent, by construction,
/// to the evidence()/likelihood() pure functions over the full list.
class BayesAccumulator {
 public:
  BayesAccumulator(const Grid3D& reality,
                   std::span<const PorosityClass> classes);

  void add_scenario(const Grid3D& scenario);

  int n_scenarios() const { return n_; }

  /// Finalizes one class into a table cell.
  BayesCell finish(std::size_t cls_index, std::string tpl, std::string cls,
                   std::string reality_k, std::string scenario_k2,
                   double prior, double real_proportion) const;

 private:
  const Grid3D& reality_;
  std::vector<PorosityClass> classes_;
  std::vector<std::vector<bool>> reality_in_class_;   // [class][cell]
  std::vector<std::size_t> reality_counts_;           // in-class cells
  std::vector<std::uint64_t> co_occurrences_;         // [class]
  std::vector<double> fraction_sums_;                 // [class]
  int n_ = 0;
};

/// Full table from an in-memory bootstrap result.
ProbabilityTable compute_probability_table(const BootstrapResult& result,
                                           const BootstrapPlan& plan,
                                           std::span<const PorosityClass> classes);

/// CSV export: one row per present (template, class, reality, scenario)
/// with columns prior, evidence, likelihood, posterior_raw,
/// posterior_clamped, real_proportion, m. Values are serialized with
/// shortest-round-trip formatting, so re-reading is exact.
void write_probability_csv(const ProbabilityTable& table,
                           const std::filesystem::path& path);
ProbabilityTable read_probability_csv(const std::filesystem::path& path);

}  // namespace geoboot
