#include "geoboot/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "geoboot/bayes.hpp"
#include "geoboot/bootstrap.hpp"
#include "geoboot/error.hpp"
#include "geoboot/gridio.hpp"
#include "geoboot/ranking.hpp"

namespace geoboot {

namespace fs = std::filesystem;

namespace {

const char* status_name(JobRecord::Status s) {
  switch (s) {
    case JobRecord::Status::pending:
      return "pending";
    case JobRecord::Status::done:
      return "done";
    case JobRecord::Status::failed:
      return "failed";
  }
  return "pending";
}

JobRecord::Status status_from(const std::string& s) {
  if (s == "done") return JobRecord::Status::done;
  if (s == "failed") return JobRecord::Status::failed;
  return JobRecord::Status::pending;
}

std::string ordash(const std::string& s) { return s.empty() ? "-" : s; }

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Results must be
/// written to pre-assigned slots so the outcome is order-independent.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  if (n == 0) return;
  const int pool = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (pool == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(pool));
  for (int t = 0; t < pool; ++t) {
    threads.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace

std::string stage_name(Stage stage) {
  switch (stage) {
    case Stage::initial:
      return "initial";
    case Stage::realities:
      return "realities";
    case Stage::samples:
      return "samples";
    case Stage::scenarios:
      return "scenarios";
    case Stage::bayes:
      return "bayes";
    case Stage::rank:
      return "rank";
  }
  return "initial";
}

std::optional<Stage> stage_from_name(std::string_view name) {
  if (name == "initial") return Stage::initial;
  if (name == "realities") return Stage::realities;
  if (name == "samples") return Stage::samples;
  if (name == "scenarios") return Stage::scenarios;
  if (name == "bayes") return Stage::bayes;
  if (name == "rank") return Stage::rank;
  return std::nullopt;
}

JobRecord* RunManifest::find(const std::string& id) {
  for (auto& job : jobs) {
    if (job.id == id) return &job;
  }
  return nullptr;
}

void RunManifest::save(const fs::path& path) const {
  std::ostringstream out;
  out << "# geoboot manifest v1\n";
  out << "# run_id=" << run_id << " config_hash=" << cfg_hash
      << " master_seed=" << master_seed << "\n";
  out << "job_id\tstage\ttemplate\treality\tsample\tscenario\tseed\tstatus\t"
         "path\tmillis\n";
  for (const auto& job : jobs) {
    out << job.id << '\t' << stage_name(job.stage) << '\t' << ordash(job.tpl)
        << '\t' << ordash(job.reality) << '\t'
        << (job.sample > 0 ? std::to_string(job.sample) : "-") << '\t'
        << ordash(job.scenario) << '\t' << job.seed << '\t'
        << status_name(job.status) << '\t' << job.path << '\t' << job.millis
        << '\n';
  }
  atomic_write(path, out.str());
}

RunManifest RunManifest::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open manifest: " + path.string());
  }
  const std::string where = path.string();
  RunManifest manifest;
  std::string line;
  if (!std::getline(in, line) || line != "# geoboot manifest v1") {
    throw ParseError(where + ":1: not a geoboot manifest");
  }
  if (!std::getline(in, line) || line.rfind("# run_id=", 0) != 0) {
    throw ParseError(where + ":2: missing run header");
  }
  {
    std::istringstream header(line.substr(2));
    std::string field;
    while (header >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      if (key == "run_id") manifest.run_id = value;
      if (key == "config_hash") manifest.cfg_hash = value;
      if (key == "master_seed") manifest.master_seed = std::stoull(value);
    }
  }
  if (!std::getline(in, line) || line.rfind("job_id\t", 0) != 0) {
    throw ParseError(where + ":3: missing column header");
  }
  int line_no = 3;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() != 10) {
      throw ParseError(where + ":" + std::to_string(line_no) +
                       ": expected 10 tab-separated fields");
    }
    JobRecord job;
    job.id = fields[0];
    const auto stage = stage_from_name(fields[1]);
    if (!stage) {
      throw ParseError(where + ":" + std::to_string(line_no) +
                       ": unknown stage '" + fields[1] + "'");
    }
    job.stage = *stage;
    job.tpl = fields[2] == "-" ? "" : fields[2];
    job.reality = fields[3] == "-" ? "" : fields[3];
    job.sample = fields[4] == "-" ? 0 : std::stoi(fields[4]);
    job.scenario = fields[5] == "-" ? "" : fields[5];
    job.seed = std::stoull(fields[6]);
    job.status = status_from(fields[7]);
    job.path = fields[8];
    job.millis = std::stoll(fields[9]);
    manifest.jobs.push_back(std::move(job));
  }
  return manifest;
}

struct Pipeline::PlannedJob {
  std::size_t manifest_index = 0;
  std::function<void(const JobRecord&)> work;
};

Pipeline::Pipeline(ProjectConfig config, fs::path out_dir, int workers,
                   bool resume)
    : config_(std::move(config)),
      out_(std::move(out_dir)),
      workers_(std::max(1, workers)),
      resume_(resume) {
  config_.validate();
  fs::create_directories(out_ / "grids");
  fs::create_directories(out_ / "wells");
  load_or_init_manifest();
}

fs::path Pipeline::initial_map_path() const {
  if (config_.initial_map.path) return *config_.initial_map.path;
  return out_ / "initial_map.gslib";
}
fs::path Pipeline::manifest_path() const { return out_ / "manifest.tsv"; }
fs::path Pipeline::probabilities_path() const {
  return out_ / "probabilities.csv";
}
fs::path Pipeline::curves_path() const { return out_ / "deviation_curves.csv"; }
fs::path Pipeline::ranking_path() const { return out_ / "ranking.txt"; }

void Pipeline::plan_jobs() {
  const auto& plan = config_.plan;
  manifest_.cfg_hash = config_hash(config_);
  manifest_.master_seed = plan.master_seed;
  {
    // Deterministic run id from (config, seed).
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : manifest_.cfg_hash) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    h = mix64(h ^ plan.master_seed);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    manifest_.run_id = buf;
  }

  auto& jobs = manifest_.jobs;
  jobs.clear();

  if (!config_.initial_map.path) {
    JobRecord job;
    job.id = "initial_map";
    job.stage = Stage::initial;
    job.seed = derive_seed(plan.master_seed,
                           {static_cast<std::uint64_t>(SeedDomain::initial_map)});
    job.path = "initial_map.gslib";
    jobs.push_back(std::move(job));
  }

  const int n_tpl = static_cast<int>(plan.templates.size());
  const int n_k = static_cast<int>(plan.variograms.size());

  for (int tpl = 0; tpl < n_tpl; ++tpl) {
    for (int k = 0; k < n_k; ++k) {
      JobRecord job;
      job.id = reality_id(plan, tpl, k);
      job.stage = Stage::realities;
      job.tpl = plan.templates[static_cast<std::size_t>(tpl)].name;
      job.reality = plan.variograms[static_cast<std::size_t>(k)].label;
      job.seed = reality_seed(plan.master_seed, tpl, k);
      job.path = "grids/" + job.id + ".gslib";
      jobs.push_back(std::move(job));
    }
  }

  for (int tpl = 0; tpl < n_tpl; ++tpl) {
    for (int k = 0; k < n_k; ++k) {
      JobRecord job;
      job.id = "samples_" + plan.templates[static_cast<std::size_t>(tpl)].name +
               "_" + plan.variograms[static_cast<std::size_t>(k)].label;
      job.stage = Stage::samples;
      job.tpl = plan.templates[static_cast<std::size_t>(tpl)].name;
      job.reality = plan.variograms[static_cast<std::size_t>(k)].label;
      job.seed = samples_seed(plan.master_seed, tpl, k);
      job.path = "wells/" + wellset_id(plan, tpl, k, 0) + ".tsv";
      jobs.push_back(std::move(job));
    }
  }

  for (const auto& sj : scenario_jobs(plan)) {
    JobRecord job;
    job.id = sj.id;
    job.stage = Stage::scenarios;
    job.tpl = plan.templates[static_cast<std::size_t>(sj.tpl)].name;
    job.reality = plan.variograms[static_cast<std::size_t>(sj.k)].label;
    job.sample = sj.i + 1;
    job.scenario =
        plan.scenario_variograms[static_cast<std::size_t>(sj.k2)].label;
    job.seed = sj.seed;
    job.path = "grids/" + job.id + ".gslib";
    jobs.push_back(std::move(job));
  }

  {
    JobRecord job;
    job.id = "bayes_table";
    job.stage = Stage::bayes;
    job.path = "probabilities.csv";
    jobs.push_back(std::move(job));
  }
  {
    JobRecord job;
    job.id = "rank_report";
    job.stage = Stage::rank;
    job.path = "deviation_curves.csv";
    jobs.push_back(std::move(job));
  }
}

void Pipeline::load_or_init_manifest() {
  plan_jobs();
  if (!resume_ || !fs::exists(manifest_path())) return;
  RunManifest previous;
  try {
    previous = RunManifest::load(manifest_path());
  } catch (const std::exception& e) {
    std::cerr << "geoboot: ignoring unreadable manifest: " << e.what() << "\n";
    return;
  }
  if (previous.cfg_hash != manifest_.cfg_hash ||
      previous.master_seed != manifest_.master_seed) {
    std::cerr << "geoboot: manifest belongs to a different (config, seed); "
                 "starting fresh\n";
    return;
  }
  std::map<std::string, const JobRecord*> by_id;
  for (const auto& job : previous.jobs) by_id[job.id] = &job;
  for (auto& job : manifest_.jobs) {
    const auto it = by_id.find(job.id);
    if (it == by_id.end()) continue;
    const JobRecord& old = *it->second;
    if (old.status == JobRecord::Status::done && old.seed == job.seed &&
        old.stage == job.stage) {
      job.status = JobRecord::Status::done;
      job.millis = old.millis;
    }
  }
}

bool Pipeline::job_done(const JobRecord& record) const {
  if (record.status != JobRecord::Status::done) return false;
  switch (record.stage) {
    case Stage::initial:
    case Stage::realities:
    case Stage::scenarios:
      return fs::exists(out_ / record.path);
    case Stage::samples: {
      const auto& plan = config_.plan;
      for (int tpl = 0; tpl < static_cast<int>(plan.templates.size()); ++tpl) {
        for (int k = 0; k < static_cast<int>(plan.variograms.size()); ++k) {
          if (plan.templates[static_cast<std::size_t>(tpl)].name !=
                  record.tpl ||
              plan.variograms[static_cast<std::size_t>(k)].label !=
                  record.reality) {
            continue;
          }
          for (int i = 0; i < plan.n_samples; ++i) {
            if (!fs::exists(out_ / "wells" /
                            (wellset_id(plan, tpl, k, i) + ".tsv"))) {
              return false;
            }
          }
          return true;
        }
      }
      return false;
    }
    case Stage::bayes:
      return fs::exists(probabilities_path()) &&
             fs::exists(out_ / "classes.csv");
    case Stage::rank:
      return fs::exists(curves_path()) && fs::exists(ranking_path());
  }
  return false;
}

int Pipeline::execute(std::vector<PlannedJob>& jobs) {
  std::mutex mutex;
  std::atomic<int> failed{0};

  parallel_for(jobs.size(), workers_, [&](std::size_t idx) {
    JobRecord& record = manifest_.jobs[jobs[idx].manifest_index];
    const auto start = std::chrono::steady_clock::now();
    try {
      jobs[idx].work(record);
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      std::scoped_lock lock(mutex);
      record.status = JobRecord::Status::done;
      record.millis = ms;
      ++summary_.executed;
    } catch (const std::exception& e) {
      std::scoped_lock lock(mutex);
      record.status = JobRecord::Status::failed;
      ++summary_.failed;
      failed.fetch_add(1);
      std::cerr << "geoboot: job " << record.id << " failed: " << e.what()
                << "\n";
    }
  });

  manifest_.save(manifest_path());
  return failed.load();
}

Grid3D Pipeline::load_initial_map() const {
  return read_grid(initial_map_path());
}

std::vector<PorosityClass> Pipeline::resolve_classes(
    const Grid3D& initial_map) const {
  if (config_.classes.mode == ClassConfig::Mode::explicit_bounds) {
    return config_.classes.classes;
  }
  return classes_from_quartiles(initial_map);
}

int Pipeline::stage_initial() {
  if (config_.initial_map.path) {
    if (!fs::exists(*config_.initial_map.path)) {
      std::cerr << "geoboot: initial map not found: "
                << config_.initial_map.path->string() << "\n";
      return kExitMissingUpstream;
    }
    return kExitOk;
  }

  std::vector<PlannedJob> jobs;
  std::mutex diag_mutex;
  for (std::size_t idx = 0; idx < manifest_.jobs.size(); ++idx) {
    JobRecord& record = manifest_.jobs[idx];
    if (record.stage != Stage::initial) continue;
    if (resume_ && job_done(record)) {
      ++summary_.skipped;
      continue;
    }
    jobs.push_back(
        {idx, [this, &diag_mutex](const JobRecord& rec) {
           const auto& plan = config_.plan;
           const VariogramSpec* spec = &plan.variograms.front();
           for (const auto& v : plan.variograms) {
             if (v.label == config_.initial_map.variogram_label) spec = &v;
           }
           auto cdf = std::make_shared<const EmpiricalCdf>(
               config_.initial_map.distribution.sample());
           SimulationConfig sim;
           sim.variogram = spec->materialize(cdf->variance());
           sim.seed = rec.seed;
           sim.max_neighbors = plan.max_neighbors;
           sim.search_radii = plan.search_radii;
           sim.global_cdf = std::move(cdf);
           KrigingDiagnostics diag;
           const Grid3D grid =
               dss_simulate({}, config_.grid, sim, &diag);
           write_grid(grid, out_ / rec.path, rec.id);
           std::scoped_lock lock(diag_mutex);
           diagnostics_.merge(diag);
         }});
  }
  return execute(jobs) > 0 ? kExitPartialFailure : kExitOk;
}

int Pipeline::stage_realities() {
  if (!fs::exists(initial_map_path())) {
    std::cerr << "geoboot: stage initial incomplete: missing "
              << initial_map_path().string() << "\n";
    return kExitMissingUpstream;
  }
  const Grid3D initial = load_initial_map();
  const auto& plan = config_.plan;

  // Conditioning wells per template, for transparency and reuse.
  for (const auto& tmpl : plan.templates) {
    write_wells(extract_wells(initial, tmpl, {0, 0}),
                out_ / "wells" / ("conditioning_" + tmpl.name + ".tsv"));
  }

  std::vector<PlannedJob> jobs;
  std::mutex diag_mutex;
  for (std::size_t idx = 0; idx < manifest_.jobs.size(); ++idx) {
    JobRecord& record = manifest_.jobs[idx];
    if (record.stage != Stage::realities) continue;
    if (resume_ && job_done(record)) {
      ++summary_.skipped;
      continue;
    }
    // Recover plan coordinates from the record keys.
    int tpl = -1, k = -1;
    for (int t = 0; t < static_cast<int>(plan.templates.size()); ++t) {
      if (plan.templates[static_cast<std::size_t>(t)].name == record.tpl)
        tpl = t;
    }
    for (int kk = 0; kk < static_cast<int>(plan.variograms.size()); ++kk) {
      if (plan.variograms[static_cast<std::size_t>(kk)].label ==
          record.reality)
        k = kk;
    }
    jobs.push_back({idx, [this, &initial, &diag_mutex, tpl,
                          k](const JobRecord& rec) {
                      KrigingDiagnostics diag;
                      const Grid3D grid = simulate_reality(
                          initial, config_.plan, tpl, k, &diag);
                      write_grid(grid, out_ / rec.path, rec.id);
                      std::scoped_lock lock(diag_mutex);
                      diagnostics_.merge(diag);
                    }});
  }
  return execute(jobs) > 0 ? kExitPartialFailure : kExitOk;
}

int Pipeline::stage_samples() {
  const auto& plan = config_.plan;
  for (int tpl = 0; tpl < static_cast<int>(plan.templates.size()); ++tpl) {
    for (int k = 0; k < static_cast<int>(plan.variograms.size()); ++k) {
      if (!fs::exists(out_ / "grids" /
                      (reality_id(plan, tpl, k) + ".gslib"))) {
        std::cerr << "geoboot: stage realities incomplete: missing "
                  << reality_id(plan, tpl, k) << "\n";
        return kExitMissingUpstream;
      }
    }
  }

  std::vector<PlannedJob> jobs;
  for (std::size_t idx = 0; idx < manifest_.jobs.size(); ++idx) {
    JobRecord& record = manifest_.jobs[idx];
    if (record.stage != Stage::samples) continue;
    if (resume_ && job_done(record)) {
      ++summary_.skipped;
      continue;
    }
    int tpl = -1, k = -1;
    for (int t = 0; t < static_cast<int>(plan.templates.size()); ++t) {
      if (plan.templates[static_cast<std::size_t>(t)].name == record.tpl)
        tpl = t;
    }
    for (int kk = 0; kk < static_cast<int>(plan.variograms.size()); ++kk) {
      if (plan.variograms[static_cast<std::size_t>(kk)].label ==
          record.reality)
        k = kk;
    }
    jobs.push_back({idx, [this, tpl, k](const JobRecord& rec) {
                      const auto& p = config_.plan;
                      const Grid3D reality = read_grid(
                          out_ / "grids" /
                          (reality_id(p, tpl, k) + ".gslib"));
                      Rng rng(rec.seed);
                      const auto sets = sample_well_sets(
                          reality,
                          p.templates[static_cast<std::size_t>(tpl)],
                          p.n_samples, rng);
                      for (int i = 0; i < p.n_samples; ++i) {
                        write_wells(sets[static_cast<std::size_t>(i)],
                                    out_ / "wells" /
                                        (wellset_id(p, tpl, k, i) + ".tsv"));
                      }
                    }});
  }
  return execute(jobs) > 0 ? kExitPartialFailure : kExitOk;
}

int Pipeline::stage_scenarios() {
  const auto& plan = config_.plan;
  for (int tpl = 0; tpl < static_cast<int>(plan.templates.size()); ++tpl) {
    for (int k = 0; k < static_cast<int>(plan.variograms.size()); ++k) {
      for (int i = 0; i < plan.n_samples; ++i) {
        if (!fs::exists(out_ / "wells" /
                        (wellset_id(plan, tpl, k, i) + ".tsv"))) {
          std::cerr << "geoboot: stage samples incomplete: missing "
                    << wellset_id(plan, tpl, k, i) << "\n";
          return kExitMissingUpstream;
        }
      }
    }
  }

  const auto sjobs = scenario_jobs(plan);
  std::map<std::string, const ScenarioJob*> by_id;
  for (const auto& sj : sjobs) by_id[sj.id] = &sj;

  std::vector<PlannedJob> jobs;
  std::mutex diag_mutex;
  for (std::size_t idx = 0; idx < manifest_.jobs.size(); ++idx) {
    JobRecord& record = manifest_.jobs[idx];
    if (record.stage != Stage::scenarios) continue;
    if (resume_ && job_done(record)) {
      ++summary_.skipped;
      continue;
    }
    const ScenarioJob* sj = by_id.at(record.id);
    jobs.push_back({idx, [this, sj, &diag_mutex](const JobRecord& rec) {
                      const auto& p = config_.plan;
                      const WellSet wells = read_wells(
                          out_ / "wells" /
                          (wellset_id(p, sj->tpl, sj->k, sj->i) + ".tsv"));
                      KrigingDiagnostics diag;
                      const Grid3D grid = simulate_scenario(
                          wells, config_.grid, p, sj->k2, sj->seed, &diag);
                      write_grid(grid, out_ / rec.path, rec.id);
                      std::scoped_lock lock(diag_mutex);
                      diagnostics_.merge(diag);
                    }});
  }
  return execute(jobs) > 0 ? kExitPartialFailure : kExitOk;
}

int Pipeline::stage_bayes() {
  for (const auto& job : manifest_.jobs) {
    if (job.stage == Stage::scenarios && !fs::exists(out_ / job.path)) {
      std::cerr << "geoboot: stage scenarios incomplete: missing " << job.path
                << "\n";
      return kExitMissingUpstream;
    }
  }
  if (!fs::exists(initial_map_path())) {
    std::cerr << "geoboot: stage initial incomplete: missing initial map\n";
    return kExitMissingUpstream;
  }

  std::vector<PlannedJob> jobs;
  for (std::size_t idx = 0; idx < manifest_.jobs.size(); ++idx) {
    JobRecord& record = manifest_.jobs[idx];
    if (record.stage != Stage::bayes) continue;
    if (resume_ && job_done(record)) {
      ++summary_.skipped;
      continue;
    }
    jobs.push_back({idx, [this](const JobRecord&) {
      const auto& p = config_.plan;
      const Grid3D initial = load_initial_map();
      const std::vector<PorosityClass> classes = resolve_classes(initial);

      {
        std::ostringstream out;
        out << "label,lower,upper\n";
        for (const auto& cls : classes) {
          out << cls.label << ',' << format_double(cls.lower) << ','
              << format_double(cls.upper) << '\n';
        }
        atomic_write(out_ / "classes.csv", out.str());
      }

      // One independent aggregation job per (template, reality, scenario
      // variogram); each streams its m scenario grids from disk.
      struct Group {
        int tpl, k, k2;
        std::vector<BayesCell> cells;  // one per class
      };
      std::vector<Group> groups;
      for (int tpl = 0; tpl < static_cast<int>(p.templates.size()); ++tpl) {
        for (int k = 0; k < static_cast<int>(p.variograms.size()); ++k) {
          for (int k2 = 0;
               k2 < static_cast<int>(p.scenario_variograms.size()); ++k2) {
            groups.push_back({tpl, k, k2, {}});
          }
        }
      }

      // Worker threads must not leak exceptions; collect the first error
      // and surface it as this job's failure.
      std::mutex error_mutex;
      std::string first_error;
      parallel_for(groups.size(), workers_, [&](std::size_t g) {
        try {
          Group& group = groups[g];
          const Grid3D reality = read_grid(
              out_ / "grids" / (reality_id(p, group.tpl, group.k) + ".gslib"));
          std::vector<WellSet> sets;
          sets.reserve(static_cast<std::size_t>(p.n_samples));
          for (int i = 0; i < p.n_samples; ++i) {
            sets.push_back(read_wells(
                out_ / "wells" /
                (wellset_id(p, group.tpl, group.k, i) + ".tsv")));
          }
          BayesAccumulator acc(reality, classes);
          for (int i = 0; i < p.n_samples; ++i) {
            acc.add_scenario(read_grid(
                out_ / "grids" /
                (scenario_id(p, group.tpl, group.k, i, group.k2) + ".gslib")));
          }
          for (std::size_t c = 0; c < classes.size(); ++c) {
            const double prior = prior_frequentist(sets, classes[c]);
            const double real_prop = class_proportion(reality, classes[c]);
            group.cells.push_back(acc.finish(
                c, p.templates[static_cast<std::size_t>(group.tpl)].name,
                classes[c].label,
                p.variograms[static_cast<std::size_t>(group.k)].label,
                p.scenario_variograms[static_cast<std::size_t>(group.k2)]
                    .label,
                prior, real_prop));
          }
        } catch (const std::exception& e) {
          std::scoped_lock lock(error_mutex);
          if (first_error.empty()) first_error = e.what();
        }
      });
      if (!first_error.empty()) {
        throw Error("bayes aggregation failed: " + first_error);
      }

      // Assemble rows in (template, class, reality, scenario) order,
      // independent of aggregation scheduling.
      ProbabilityTable table;
      const std::size_t n_k2 = p.scenario_variograms.size();
      const std::size_t n_k = p.variograms.size();
      for (std::size_t tpl = 0; tpl < p.templates.size(); ++tpl) {
        for (std::size_t c = 0; c < classes.size(); ++c) {
          for (std::size_t k = 0; k < n_k; ++k) {
            for (std::size_t k2 = 0; k2 < n_k2; ++k2) {
              const std::size_t g = (tpl * n_k + k) * n_k2 + k2;
              table.cells.push_back(groups[g].cells[c]);
            }
          }
        }
      }
      write_probability_csv(table, probabilities_path());
    }});
  }
  return execute(jobs) > 0 ? kExitPartialFailure : kExitOk;
}

int Pipeline::stage_rank() {
  if (!fs::exists(probabilities_path())) {
    std::cerr << "geoboot: stage bayes incomplete: missing "
              << probabilities_path().string() << "\n";
    return kExitMissingUpstream;
  }

  std::vector<PlannedJob> jobs;
  for (std::size_t idx = 0; idx < manifest_.jobs.size(); ++idx) {
    JobRecord& record = manifest_.jobs[idx];
    if (record.stage != Stage::rank) continue;
    if (resume_ && job_done(record)) {
      ++summary_.skipped;
      continue;
    }
    jobs.push_back({idx, [this](const JobRecord&) {
      const ProbabilityTable table =
          read_probability_csv(probabilities_path());
      const std::vector<DeviationCurve> curves = curves_from_table(table);
      write_deviation_csv(curves, curves_path());

      std::vector<RankingEntry> entries = rank_all(curves);
      // Scenarios whose table cell is absent are excluded from ranking.
      for (auto& entry : entries) {
        for (const auto& spec : config_.plan.scenario_variograms) {
          bool present = false;
          for (const auto& iv : entry.intervals) {
            if (iv.scenario_k2 == spec.label) present = true;
          }
          if (!present) entry.excluded.push_back(spec.label);
        }
      }
      write_ranking_report(entries, ranking_path());
    }});
  }
  return execute(jobs) > 0 ? kExitPartialFailure : kExitOk;
}

int Pipeline::make_initial() { return stage_initial(); }

int Pipeline::run_all() {
  const Stage order[] = {Stage::initial,   Stage::realities,
                         Stage::samples,   Stage::scenarios,
                         Stage::bayes,     Stage::rank};
  for (const Stage stage : order) {
    const int rc = run_stage(stage);
    if (rc != kExitOk) return rc;
  }
  return kExitOk;
}

int Pipeline::run_stage(Stage stage) {
  switch (stage) {
    case Stage::initial:
      return stage_initial();
    case Stage::realities:
      return stage_realities();
    case Stage::samples:
      return stage_samples();
    case Stage::scenarios:
      return stage_scenarios();
    case Stage::bayes:
      return stage_bayes();
    case Stage::rank:
      return stage_rank();
  }
  return kExitConfigError;
}

int Pipeline::report(std::ostream& out) const {
  // Prefer the on-disk manifest: reporting usually targets a finished run
  // from a fresh process.
  RunManifest manifest = manifest_;
  if (fs::exists(manifest_path())) {
    try {
      manifest = RunManifest::load(manifest_path());
    } catch (const std::exception& e) {
      out << "(unreadable manifest: " << e.what() << ")\n";
    }
  }

  out << "run " << manifest.run_id << " (config " << manifest.cfg_hash
      << ", master seed " << manifest.master_seed << ")\n";

  std::map<std::string, std::pair<int, int>> per_stage;  // done/total
  for (const auto& job : manifest.jobs) {
    auto& [done, total] = per_stage[stage_name(job.stage)];
    ++total;
    if (job.status == JobRecord::Status::done) ++done;
  }
  for (const auto& [name, counts] : per_stage) {
    out << "  " << name << ": " << counts.first << "/" << counts.second
        << " done\n";
  }
  out << "  kriging diagnostics: " << diagnostics_.singular_fallbacks
      << " singular fallbacks, " << diagnostics_.dropped_neighbors
      << " dropped neighbors, " << diagnostics_.negative_variance_clamps
      << " variance clamps\n";

  if (fs::exists(probabilities_path())) {
    const ProbabilityTable table = read_probability_csv(probabilities_path());
    out << "  probability table: " << table.cells.size() << " cells\n";
  }
  if (fs::exists(ranking_path())) {
    out << "\n";
    std::ifstream in(ranking_path());
    out << in.rdbuf();
  }
  return kExitOk;
}

}  // namespace geoboot
