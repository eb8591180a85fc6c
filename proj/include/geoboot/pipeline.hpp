#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geoboot/config.hpp"
#include "geoboot/kriging.hpp"

namespace geoboot {

enum class Stage { initial, realities, samples, scenarios, bayes, rank };

std::string stage_name(Stage stage);
std::optional<Stage> stage_from_name(std::string_view name);

// Process exit codes shared with the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitPartialFailure = 3;
inline constexpr int kExitMissingUpstream = 4;

/// One manifest row. Simulation jobs carry their stream seed so a resumed
/// run can prove it would regenerate the same artifact.
struct JobRecord {
  std::string id;
  Stage stage = Stage::initial;
  std::string tpl;       // "-" when not applicable
  std::string reality;   // k
  int sample = 0;        // 1-based i; 0 when not applicable
  std::string scenario;  // k'
  std::uint64_t seed = 0;
  enum class Status { pending, done, failed } status = Status::pending;
  std::string path;
  std::int64_t millis = -1;
};

/// Tab-separated job ledger covering every job implied by the plan exactly
/// once. The run identity (config hash + master seed) guards resume.
struct RunManifest {
  std::string run_id;
  std::string cfg_hash;
  std::uint64_t master_seed = 0;
  std::vector<JobRecord> jobs;

  JobRecord* find(const std::string& id);
  void save(const std::filesystem::path& path) const;
  static RunManifest load(const std::filesystem::path& path);
};

struct StageSummary {
  int executed = 0;
  int skipped = 0;
  int failed = 0;
};

/// Orchestrates the workflow against a run directory: stage artifacts,
/// manifest, probability table, deviation curves and ranking report. A
/// fixed-size worker pool consumes the deterministic job list; outputs are
/// identified by per-job seeds, never by execution order, so any
/// parallelism degree produces identical bytes.
class Pipeline {
 public:
  Pipeline(ProjectConfig config, std::filesystem::path out_dir, int workers,
           bool resume);

  /// Generates (or validates) the initial map artifact.
  int make_initial();

  /// Runs realities -> samples -> scenarios -> bayes -> rank.
  int run_all();

  /// Runs exactly one stage against existing upstream artifacts. Returns
  /// kExitMissingUpstream naming the incomplete stage on stderr if inputs
  /// are missing.
  int run_stage(Stage stage);

  /// Human-readable summary of a completed run.
  int report(std::ostream& out) const;

  const RunManifest& manifest() const { return manifest_; }
  const StageSummary& last_summary() const { return summary_; }
  const KrigingDiagnostics& diagnostics() const { return diagnostics_; }

  std::filesystem::path initial_map_path() const;
  std::filesystem::path manifest_path() const;
  std::filesystem::path probabilities_path() const;
  std::filesystem::path curves_path() const;
  std::filesystem::path ranking_path() const;

 private:
  struct PlannedJob;

  void plan_jobs();
  void load_or_init_manifest();
  bool job_done(const JobRecord& record) const;
  int execute(std::vector<PlannedJob>& jobs);
  int stage_initial();
  int stage_realities();
  int stage_samples();
  int stage_scenarios();
  int stage_bayes();
  int stage_rank();
  std::vector<PorosityClass> resolve_classes(const Grid3D& initial_map) const;
  Grid3D load_initial_map() const;

  ProjectConfig config_;
  std::filesystem::path out_;
  int workers_ = 1;
  bool resume_ = false;
  RunManifest manifest_;
  StageSummary summary_;
  KrigingDiagnostics diagnostics_;
};

}  // namespace geoboot
