#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geoboot/dss.hpp"
#include "geoboot/grid.hpp"
#include "geoboot/rng.hpp"
#include "geoboot/variogram.hpp"
#include "geoboot/wells.hpp"

namespace geoboot {

/// The whole resampling experiment: templates (drilling strategies),
/// reality variograms k, scenario variograms k', and m samples per reality.
struct BootstrapPlan {
  std::vector<WellTemplate> templates;
  std::vector<VariogramSpec> variograms;           // realities k
  std::vector<VariogramSpec> scenario_variograms;  // scenarios k'
  int n_samples = 0;                               // m
  std::uint64_t master_seed = 0;
  int max_neighbors = 16;
  std::array<double, 3> search_radii{0.0, 0.0, 0.0};  // 0 = variogram ranges

  std::size_t n_realities() const {
    return templates.size() * variograms.size();
  }
  std::size_t total_scenario_count() const {
    return templates.size() * variograms.size() *
           static_cast<std::size_t>(n_samples) * scenario_variograms.size();
  }

  void validate() const;
};

// Deterministic artifact identifiers; i is 1-based as reported.
std::string reality_id(const BootstrapPlan& plan, int tpl, int k);
std::string wellset_id(const BootstrapPlan& plan, int tpl, int k, int i);
std::string scenario_id(const BootstrapPlan& plan, int tpl, int k, int i,
                        int k2);

// Per-artifact stream seeds derived from the master seed.
std::uint64_t reality_seed(std::uint64_t master, int tpl, int k);
std::uint64_t samples_seed(std::uint64_t master, int tpl, int k);
std::uint64_t scenario_seed(std::uint64_t master, int tpl, int k, int i,
                            int k2);

/// m uniformly random integer translations of the template, each fully in
/// bounds, sampled with replacement; every placement preserves the
/// template's pairwise offsets exactly. Throws if no placement fits.
std::vector<WellSet> sample_well_sets(const Grid3D& reality,
                                      const WellTemplate& tmpl, int m,
                                      Rng& rng);

/// Reality R_k: one realization conditioned on the template's wells taken
/// from the initial map at offset (0, 0), drawing from the initial map's
/// distribution. Pure function of (initial_map, plan, tpl, k).
Grid3D simulate_reality(const Grid3D& initial_map, const BootstrapPlan& plan,
                        int tpl, int k, KrigingDiagnostics* diag = nullptr);

/// Scenario S_ik': one realization conditioned on a sampled well set, with
/// the global cdf (and any defaulted sill) taken from that well data alone.
Grid3D simulate_scenario(const WellSet& wells, GridShape shape,
                         const BootstrapPlan& plan, int k2,
                         std::uint64_t seed,
                         KrigingDiagnostics* diag = nullptr);

/// One scenario simulation job; the full stage-3 job list is deterministic
/// and each job is an independent pure function, so a scheduler may run any
/// number concurrently.
struct ScenarioJob {
  int tpl = 0, k = 0, i = 0, k2 = 0;  // i is 0-based here
  std::uint64_t seed = 0;
  std::string id;
};

std::vector<ScenarioJob> scenario_jobs(const BootstrapPlan& plan);

/// In-memory bootstrap result, indexed by plan coordinates.
struct BootstrapResult {
  std::vector<Grid3D> realities;                // [tpl * |K| + k]
  std::vector<std::vector<WellSet>> well_sets;  // [tpl * |K| + k][i]
  std::vector<Grid3D> scenarios;                // [scenario_index(...)]

  std::size_t reality_index(const BootstrapPlan& plan, int tpl, int k) const;
  std::size_t scenario_index(const BootstrapPlan& plan, int tpl, int k, int i,
                             int k2) const;
};

/// Runs the three bootstrap stages in memory: realities conditioned on the
/// initial map's wells, m sampled well sets per reality, and one scenario
/// per (well set, scenario variogram). Intended for desk-scale grids; the
/// pipeline streams the same jobs to disk instead.
BootstrapResult run_bootstrap(const Grid3D& initial_map,
                              const BootstrapPlan& plan,
                              KrigingDiagnostics* diag = nullptr);

}  // namespace geoboot
