#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "geoboot/config.hpp"
#include "geoboot/error.hpp"
#include "geoboot/gridio.hpp"
#include "geoboot/rng.hpp"

using namespace geoboot;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("geoboot_io_" + std::to_string(Rng(::getpid()).next()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

const char* kTinyConfig = R"json({
  "grid": {"nx": 12, "ny": 8, "nz": 2},
  "variograms": [
    {"label": "G", "ranges": {"(90;0)": 6, "(0;0)": 4, "(0;90)": 2}}
  ],
  "templates": [{"name": "w2", "columns": [[2, 2], [9, 5]]}],
  "classes": {"mode": "quartiles"},
  "bootstrap": {"m": 3},
  "seeds": {"master": 7}
})json";

}  // namespace

TEST_CASE("grid files round-trip bitwise") {
  TempDir dir;
  const Grid3D g = Grid3D::from_values(2, 2, 1, {1, 2, 3, 4});
  const fs::path path = dir.path / "g.gslib";
  write_grid(g, path, "test grid");
  CHECK(read_grid(path) == g);

  // values needing all 17 significant digits
  const Grid3D awkward = Grid3D::from_values(
      2, 1, 1, {19.755274900981529, 0.00000000000000031});
  write_grid(awkward, path);
  CHECK(read_grid(path) == awkward);
}

TEST_CASE("a thousand random grids round-trip bitwise") {
  TempDir dir;
  Rng rng(999);
  const fs::path path = dir.path / "g.gslib";
  for (int trial = 0; trial < 1000; ++trial) {
    const int nx = 1 + static_cast<int>(rng.below(3));
    const int ny = 1 + static_cast<int>(rng.below(3));
    const int nz = 1 + static_cast<int>(rng.below(2));
    Grid3D g(nx, ny, nz);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = 100.0 * rng.uniform();
    write_grid(g, path);
    CHECK(read_grid(path) == g);
  }
}

TEST_CASE("grid writer emits the documented layout") {
  TempDir dir;
  const Grid3D g = Grid3D::from_values(2, 2, 1, {1, 2.5, 3, 4});
  const fs::path path = dir.path / "g.gslib";
  write_grid(g, path, "title here");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "title here");
  std::getline(in, line);
  CHECK(line == "1 2 2 1");
  std::getline(in, line);
  CHECK(line == "porosity");
  std::getline(in, line);
  CHECK(line == "1");
  std::getline(in, line);
  CHECK(line == "2.5");
}

TEST_CASE("grid reader rejects malformed files with line numbers") {
  TempDir dir;
  const fs::path path = dir.path / "bad.gslib";

  // short body: 3 values for a 2x2x1 grid
  write_text(path, "t\n1 2 2 1\nporosity\n1\n2\n3\n");
  CHECK_THROWS_WITH_AS(read_grid(path), doctest::Contains("line 7"),
                       ParseError);

  write_text(path, "t\n1 2 2 1\nporosity\n1\nnot_a_number\n3\n4\n");
  CHECK_THROWS_WITH_AS(read_grid(path), doctest::Contains(":5"), ParseError);

  write_text(path, "t\n1 2 2 1\nporosity\n1\n2\n3\n4\n5\n");
  CHECK_THROWS_WITH_AS(read_grid(path), doctest::Contains("trailing"),
                       ParseError);

  write_text(path, "t\n2 2 2 1\nporosity\nrho\n1\n2\n3\n4\n");
  CHECK_THROWS_WITH_AS(read_grid(path),
                       doctest::Contains("single-variable"), ParseError);

  write_text(path, "t\n1 2 2\nporosity\n1\n2\n3\n4\n");
  CHECK_THROWS_AS(read_grid(path), ParseError);  // missing nz

  write_text(path, "t\n1 2 2 1\nporosity\n1\n2\n300\n4\n");
  CHECK_THROWS_AS(read_grid(path), ParseError);  // porosity out of range

  CHECK_THROWS_AS(read_grid(dir.path / "missing.gslib"), ParseError);
}

TEST_CASE("wells files round-trip") {
  TempDir dir;
  Rng rng(17);
  Grid3D g(14, 9, 4);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 30.0 * rng.uniform();
  const WellTemplate tmpl{"w3", {{1, 1}, {7, 4}, {12, 8}}};
  const WellSet set = extract_wells(g, tmpl, {1, 0});

  const fs::path path = dir.path / "wells.tsv";
  write_wells(set, path);
  const WellSet loaded = read_wells(path);
  CHECK(loaded.tmpl.name == set.tmpl.name);
  CHECK(loaded.tmpl.columns == set.tmpl.columns);
  CHECK(loaded.offset == set.offset);
  CHECK(loaded.data == set.data);
}

TEST_CASE("wells reader rejects inconsistent rows") {
  TempDir dir;
  const fs::path path = dir.path / "wells.tsv";
  write_text(path,
             "# template=w offset=0,0\n# columns=1,1\nwell_id\tx\ty\tz\t"
             "porosity\n0\t2\t1\t0\t15\n");
  CHECK_THROWS_WITH_AS(read_wells(path),
                       doctest::Contains("do not match template"), ParseError);
  write_text(path, "garbage\n");
  CHECK_THROWS_AS(read_wells(path), ParseError);
}

TEST_CASE("writers are deterministic byte for byte") {
  TempDir dir;
  Rng rng(23);
  Grid3D g(5, 4, 3);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 50.0 * rng.uniform();
  write_grid(g, dir.path / "a.gslib");
  write_grid(g, dir.path / "b.gslib");
  std::ifstream a(dir.path / "a.gslib"), b(dir.path / "b.gslib");
  const std::string sa((std::istreambuf_iterator<char>(a)), {});
  const std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
}

TEST_CASE("the case-study config expands to 1350 scenario jobs") {
  const fs::path configs = fs::path(GEOBOOT_SOURCE_DIR) / "configs";
  const ProjectConfig config = read_config(configs / "case_study.json", true);
  CHECK(config.plan.total_scenario_count() == 1350);
  CHECK(config.plan.n_realities() == 9);
  CHECK(config.plan.templates.size() == 3);
  CHECK(config.plan.templates[0].n_wells() == 3);
  CHECK(config.plan.templates[1].n_wells() == 5);
  CHECK(config.plan.templates[2].n_wells() == 10);
  CHECK(config.plan.variograms[0].ranges[0] == 33.0);
  CHECK(config.plan.scenario_variograms.size() == 3);  // defaulted
  CHECK(config.grid.nx == 66);

  const ProjectConfig desk = read_config(configs / "desk.json", true);
  CHECK(desk.plan.total_scenario_count() == 270);

  // the full-scale geometry carries the reference ranges and wells
  const ProjectConfig full =
      read_config(configs / "full_case_study.json", true);
  CHECK(full.plan.total_scenario_count() == 1350);
  CHECK(full.grid.nx == 330);
  CHECK(full.grid.ny == 130);
  CHECK(full.grid.nz == 50);
  CHECK(full.plan.variograms[0].ranges ==
        std::array<double, 3>{165.0, 65.0, 25.0});
  CHECK(full.plan.variograms[1].ranges ==
        std::array<double, 3>{110.0, 45.0, 25.0});
  CHECK(full.plan.variograms[2].ranges ==
        std::array<double, 3>{60.0, 25.0, 25.0});
  CHECK(full.plan.templates[0].columns ==
        std::vector<std::array<int, 2>>{{100, 40}, {170, 90}, {230, 60}});
  CHECK(full.plan.n_samples == 50);
}

TEST_CASE("config validation errors") {
  TempDir dir;
  const fs::path path = dir.path / "c.json";

  write_text(path, R"({"grid": {"nx": 10, "ny": 10, "nz": 1},
    "variograms": [{"label": "G", "ranges": {"x": 5, "y": 5, "z": 1}}],
    "templates": [],
    "classes": {"mode": "quartiles"},
    "bootstrap": {"m": 5}, "seeds": {"master": 1}})");
  CHECK_THROWS_WITH_AS(read_config(path, true),
                       doctest::Contains("at least one template"),
                       ConfigError);

  // template outside the grid
  write_text(path, R"({"grid": {"nx": 10, "ny": 10, "nz": 1},
    "variograms": [{"label": "G", "ranges": {"x": 5, "y": 5, "z": 1}}],
    "templates": [{"name": "w", "columns": [[12, 2]]}],
    "classes": {"mode": "quartiles"},
    "bootstrap": {"m": 5}, "seeds": {"master": 1}})");
  CHECK_THROWS_WITH_AS(read_config(path, true), doctest::Contains("outside"),
                       ConfigError);

  // non-positive range
  write_text(path, R"({"grid": {"nx": 10, "ny": 10, "nz": 1},
    "variograms": [{"label": "G", "ranges": {"x": 5, "y": 0, "z": 1}}],
    "templates": [{"name": "w", "columns": [[2, 2]]}],
    "classes": {"mode": "quartiles"},
    "bootstrap": {"m": 5}, "seeds": {"master": 1}})");
  CHECK_THROWS_WITH_AS(read_config(path, true),
                       doctest::Contains("ranges must be > 0"), Error);

  // missing section
  write_text(path, R"({"grid": {"nx": 10, "ny": 10, "nz": 1}})");
  CHECK_THROWS_WITH_AS(read_config(path, true), doctest::Contains("missing"),
                       ConfigError);
}

TEST_CASE("unknown keys: error in strict mode, tolerated otherwise") {
  TempDir dir;
  const fs::path path = dir.path / "c.json";
  std::string text(kTinyConfig);
  text.insert(text.rfind('}'), R"(, "extra_section": 1)");
  write_text(path, text);
  CHECK_THROWS_WITH_AS(read_config(path, true),
                       doctest::Contains("unknown key"), ConfigError);
  CHECK_NOTHROW(read_config(path, false));
}

TEST_CASE("config round-trips through write_config") {
  TempDir dir;
  const fs::path original = dir.path / "a.json";
  write_text(original, kTinyConfig);

  const ProjectConfig a = read_config(original, true);
  const fs::path rewritten = dir.path / "b.json";
  write_config(a, rewritten);
  const ProjectConfig b = read_config(rewritten, true);

  // normalize-and-compare: canonical serializations must match
  CHECK(config_to_json(a) == config_to_json(b));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(b.plan.total_scenario_count() == a.plan.total_scenario_count());
  CHECK(b.plan.master_seed == 7);

  // and the hash is sensitive to plan changes
  ProjectConfig c = a;
  c.plan.n_samples += 1;
  CHECK(config_hash(c) != config_hash(a));
}

TEST_CASE("explicit classes parse with infinity sentinels") {
  TempDir dir;
  const fs::path path = dir.path / "c.json";
  std::string text(kTinyConfig);
  const std::string quartiles = R"("classes": {"mode": "quartiles"})";
  const std::string explicit_classes = R"("classes": {"mode": "explicit",
    "classes": [
      {"label": "low", "lower": null, "upper": 15.0},
      {"label": "high", "lower": 15.0, "upper": null}
    ]})";
  text.replace(text.find(quartiles), quartiles.size(), explicit_classes);
  write_text(path, text);

  const ProjectConfig config = read_config(path, true);
  REQUIRE(config.classes.classes.size() == 2);
  CHECK(std::isinf(config.classes.classes[0].lower));
  CHECK(config.classes.classes[0].upper == 15.0);
  CHECK(std::isinf(config.classes.classes[1].upper));

  // round-trip keeps the sentinels
  write_config(config, path);
  const ProjectConfig again = read_config(path, true);
  CHECK(config_to_json(again) == config_to_json(config));
}

TEST_CASE("distribution samples are deterministic and clipped") {
  DistributionSpec dist;
  dist.kind = DistributionSpec::Kind::normal;
  dist.mean = 20.0;
  dist.sd = 5.0;
  dist.clip_lo = 10.0;
  dist.clip_hi = 30.0;
  dist.n_points = 501;
  const auto a = dist.sample();
  const auto b = dist.sample();
  CHECK(a == b);
  CHECK(a.size() == 501);
  for (double v : a) {
    CHECK(v >= 10.0);
    CHECK(v <= 30.0);
  }
  // median of an odd-length quantile expansion is the mean
  CHECK(a[250] == doctest::Approx(20.0).epsilon(1e-12));

  DistributionSpec constant;
  constant.kind = DistributionSpec::Kind::constant;
  constant.value = 7.0;
  CHECK(constant.sample() == std::vector<double>{7.0});
}
