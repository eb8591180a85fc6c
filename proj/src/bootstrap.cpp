#include "geoboot/bootstrap.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <sstream>
#include <string>

#include "geoboot/error.hpp"

namespace geoboot {

namespace {

std::string pad_index(int i, int width = 3) {
  std::string s = std::to_string(i);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

// Inclusive translation bounds keeping every template column inside the
// grid. Throws if no placement exists.
struct OffsetBounds {
  int dx_lo, dx_hi, dy_lo, dy_hi;
};

OffsetBounds valid_offsets(const Grid3D& grid, const WellTemplate& tmpl) {
  tmpl.validate();
  int min_x = std::numeric_limits<int>::max(), max_x = std::numeric_limits<int>::min();
  int min_y = std::numeric_limits<int>::max(), max_y = std::numeric_limits<int>::min();
  for (const auto& c : tmpl.columns) {
    min_x = std::min(min_x, c[0]);
    max_x = std::max(max_x, c[0]);
    min_y = std::min(min_y, c[1]);
    max_y = std::max(max_y, c[1]);
  }
  const OffsetBounds b{-min_x, grid.nx() - 1 - max_x, -min_y,
                       grid.ny() - 1 - max_y};
  if (b.dx_lo > b.dx_hi || b.dy_lo > b.dy_hi) {
    throw Error("well template '" + tmpl.name + "' does not fit inside a " +
                std::to_string(grid.nx()) + "x" + std::to_string(grid.ny()) +
                " grid at any offset");
  }
  return b;
}

SimulationConfig make_sim_config(const BootstrapPlan& plan,
                                 const VariogramSpec& spec,
                                 std::shared_ptr<const EmpiricalCdf> cdf,
                                 std::uint64_t seed) {
  SimulationConfig config;
  config.variogram = spec.materialize(cdf->variance());
  config.seed = seed;
  config.max_neighbors = plan.max_neighbors;
  config.search_radii = plan.search_radii;
  config.global_cdf = std::move(cdf);
  return config;
}

}  // namespace

void BootstrapPlan::validate() const {
  if (templates.empty()) {
    throw ConfigError("at least one template required");
  }
  for (const auto& t : templates) t.validate();
  if (variograms.empty()) {
    throw ConfigError("at least one variogram required");
  }
  for (const auto& v : variograms) v.validate();
  if (scenario_variograms.empty()) {
    throw ConfigError("at least one scenario variogram required");
  }
  for (const auto& v : scenario_variograms) v.validate();
  if (n_samples < 1) {
    throw ConfigError("number of well-set samples (m) must be >= 1");
  }
  if (max_neighbors < 1) {
    throw ConfigError("max_neighbors must be >= 1");
  }
}

std::string reality_id(const BootstrapPlan& plan, int tpl, int k) {
  return "reality_" + plan.templates[static_cast<std::size_t>(tpl)].name + "_" +
         plan.variograms[static_cast<std::size_t>(k)].label;
}

std::string wellset_id(const BootstrapPlan& plan, int tpl, int k, int i) {
  return "wells_" + plan.templates[static_cast<std::size_t>(tpl)].name + "_" +
         plan.variograms[static_cast<std::size_t>(k)].label + "_i" +
         pad_index(i + 1);
}

std::string scenario_id(const BootstrapPlan& plan, int tpl, int k, int i,
                        int k2) {
  return "scenario_" + plan.templates[static_cast<std::size_t>(tpl)].name +
         "_" + plan.variograms[static_cast<std::size_t>(k)].label + "_i" +
         pad_index(i + 1) + "_" +
         plan.scenario_variograms[static_cast<std::size_t>(k2)].label;
}

std::uint64_t reality_seed(std::uint64_t master, int tpl, int k) {
  return derive_seed(master,
                     {static_cast<std::uint64_t>(SeedDomain::reality),
                      static_cast<std::uint64_t>(tpl),
                      static_cast<std::uint64_t>(k)});
}

std::uint64_t samples_seed(std::uint64_t master, int tpl, int k) {
  return derive_seed(master,
                     {static_cast<std::uint64_t>(SeedDomain::samples),
                      static_cast<std::uint64_t>(tpl),
                      static_cast<std::uint64_t>(k)});
}

std::uint64_t scenario_seed(std::uint64_t master, int tpl, int k, int i,
                            int k2) {
  return derive_seed(master,
                     {static_cast<std::uint64_t>(SeedDomain::scenario),
                      static_cast<std::uint64_t>(tpl),
                      static_cast<std::uint64_t>(k),
                      static_cast<std::uint64_t>(i),
                      static_cast<std::uint64_t>(k2)});
}

std::vector<WellSet> sample_well_sets(const Grid3D& reality,
                                      const WellTemplate& tmpl, int m,
                                      Rng& rng) {
  if (m < 1) throw Error("sample_well_sets: m must be >= 1");
  const OffsetBounds bounds = valid_offsets(reality, tmpl);
  std::vector<WellSet> sets;
  sets.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    // With replacement: repeats are legitimate bootstrap placements.
    const int dx = static_cast<int>(rng.uniform_int(bounds.dx_lo, bounds.dx_hi));
    const int dy = static_cast<int>(rng.uniform_int(bounds.dy_lo, bounds.dy_hi));
    sets.push_back(extract_wells(reality, tmpl, {dx, dy}));
  }
  return sets;
}

Grid3D simulate_reality(const Grid3D& initial_map, const BootstrapPlan& plan,
                        int tpl, int k, KrigingDiagnostics* diag) {
  const WellSet wells =
      extract_wells(initial_map, plan.templates[static_cast<std::size_t>(tpl)],
                    {0, 0});
  auto cdf = std::make_shared<const EmpiricalCdf>(initial_map.active_values());
  const SimulationConfig config = make_sim_config(
      plan, plan.variograms[static_cast<std::size_t>(k)], std::move(cdf),
      reality_seed(plan.master_seed, tpl, k));
  const GridShape shape{initial_map.nx(), initial_map.ny(), initial_map.nz()};
  return dss_simulate(conditioning_from_wells(wells), shape, config, diag);
}

Grid3D simulate_scenario(const WellSet& wells, GridShape shape,
                         const BootstrapPlan& plan, int k2, std::uint64_t seed,
                         KrigingDiagnostics* diag) {
  // The scenario's histogram knows only what the sampled wells show.
  auto cdf = std::make_shared<const EmpiricalCdf>(wells.flat_values());
  const SimulationConfig config = make_sim_config(
      plan, plan.scenario_variograms[static_cast<std::size_t>(k2)],
      std::move(cdf), seed);
  return dss_simulate(conditioning_from_wells(wells), shape, config, diag);
}

std::vector<ScenarioJob> scenario_jobs(const BootstrapPlan& plan) {
  std::vector<ScenarioJob> jobs;
  jobs.reserve(plan.total_scenario_count());
  for (int tpl = 0; tpl < static_cast<int>(plan.templates.size()); ++tpl) {
    for (int k = 0; k < static_cast<int>(plan.variograms.size()); ++k) {
      for (int i = 0; i < plan.n_samples; ++i) {
        for (int k2 = 0;
             k2 < static_cast<int>(plan.scenario_variograms.size()); ++k2) {
          jobs.push_back({tpl, k, i, k2,
                          scenario_seed(plan.master_seed, tpl, k, i, k2),
                          scenario_id(plan, tpl, k, i, k2)});
        }
      }
    }
  }
  return jobs;
}

std::size_t BootstrapResult::reality_index(const BootstrapPlan& plan, int tpl,
                                           int k) const {
  return static_cast<std::size_t>(tpl) * plan.variograms.size() +
         static_cast<std::size_t>(k);
}

std::size_t BootstrapResult::scenario_index(const BootstrapPlan& plan, int tpl,
                                            int k, int i, int k2) const {
  const std::size_t per_i = plan.scenario_variograms.size();
  const std::size_t per_k = static_cast<std::size_t>(plan.n_samples) * per_i;
  const std::size_t per_tpl = plan.variograms.size() * per_k;
  return static_cast<std::size_t>(tpl) * per_tpl +
         static_cast<std::size_t>(k) * per_k +
         static_cast<std::size_t>(i) * per_i + static_cast<std::size_t>(k2);
}

BootstrapResult run_bootstrap(const Grid3D& initial_map,
                              const BootstrapPlan& plan,
                              KrigingDiagnostics* diag) {
  plan.validate();
  const GridShape shape{initial_map.nx(), initial_map.ny(), initial_map.nz()};

  BootstrapResult result;
  result.realities.reserve(plan.n_realities());
  result.well_sets.reserve(plan.n_realities());
  result.scenarios.reserve(plan.total_scenario_count());

  for (int tpl = 0; tpl < static_cast<int>(plan.templates.size()); ++tpl) {
    for (int k = 0; k < static_cast<int>(plan.variograms.size()); ++k) {
      Grid3D reality = simulate_reality(initial_map, plan, tpl, k, diag);

      Rng sample_rng(samples_seed(plan.master_seed, tpl, k));
      std::vector<WellSet> sets = sample_well_sets(
          reality, plan.templates[static_cast<std::size_t>(tpl)],
          plan.n_samples, sample_rng);

      for (int i = 0; i < plan.n_samples; ++i) {
        for (int k2 = 0;
             k2 < static_cast<int>(plan.scenario_variograms.size()); ++k2) {
          result.scenarios.push_back(simulate_scenario(
              sets[static_cast<std::size_t>(i)], shape, plan, k2,
              scenario_seed(plan.master_seed, tpl, k, i, k2), diag));
        }
      }

      result.realities.push_back(std::move(reality));
      result.well_sets.push_back(std::move(sets));
    }
  }
  return result;
}

}  // namespace geoboot
