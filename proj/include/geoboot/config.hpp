#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "geoboot/bootstrap.hpp"
#include "geoboot/classes.hpp"
#include "geoboot/dss.hpp"

namespace geoboot {

/// Reference distribution for the synthetic initial map: either an explicit
/// sample file or a parametric form expanded into deterministic quantile
/// samples.
struct DistributionSpec {
  enum class Kind { normal, constant, sample_file };
  Kind kind = Kind::normal;
  double mean = 20.0;
  double sd = 5.0;
  double clip_lo = 0.0;
  double clip_hi = 100.0;
  int n_points = 4096;
  double value = 0.0;            // constant
  std::filesystem::path path;    // sample_file

  /// Expands to the sample the empirical cdf is built from.
  std::vector<double> sample() const;
};

struct InitialMapConfig {
  std::optional<std::filesystem::path> path;  // pre-existing map
  DistributionSpec distribution;              // used when generating
  /// Variogram label used for the generating simulation (must name one of
  /// the plan's variograms); defaults to the first.
  std::string variogram_label;
};

struct ClassConfig {
  enum class Mode { quartiles, explicit_bounds };
  Mode mode = Mode::quartiles;
  std::vector<PorosityClass> classes;  // explicit mode only
};

/// Parsed and validated project configuration: the bootstrap plan plus grid
/// shape, class definitions and initial-map source.
struct ProjectConfig {
  GridShape grid;
  BootstrapPlan plan;
  ClassConfig classes;
  InitialMapConfig initial_map;

  void validate() const;
};

/// Reads the JSON config (sections: grid, variograms, scenario_variograms,
/// templates, classes, bootstrap, seeds, simulation, initial_map). Unknown
/// keys are an error in strict mode and a stderr warning otherwise.
ProjectConfig read_config(const std::filesystem::path& path, bool strict);

/// Canonical serialization (sorted keys); read_config(write_config(c)) is
/// semantically identical to c.
void write_config(const ProjectConfig& config,
                  const std::filesystem::path& path);
std::string config_to_json(const ProjectConfig& config);

/// FNV-1a hash of the canonical serialization, as 16 hex digits. Identifies
/// a plan for resume checks.
std::string config_hash(const ProjectConfig& config);

}  // namespace geoboot
