#include "geoboot/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "geoboot/cdf.hpp"
#include "geoboot/error.hpp"
#include "geoboot/gridio.hpp"

namespace geoboot {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where, bool strict) {
  for (const auto& [key, value] : obj.items()) {
    if (allowed.count(key)) continue;
    const std::string msg = "unknown key '" + key + "' in " + where;
    if (strict) {
      throw ConfigError(msg);
    }
    std::cerr << "geoboot: warning: " << msg << "\n";
  }
}

const json& require(const json& obj, const char* key,
                    const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError("missing required key '" + std::string(key) + "' in " +
                      where);
  }
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) {
    throw ConfigError(where + " must be a number");
  }
  return v.get<double>();
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) {
    throw ConfigError(where + " must be an integer");
  }
  return v.get<int>();
}

// Direction labels are (azimuth; dip) pairs: (90;0) is the grid +x axis,
// (0;0) is +y, (0;90) is vertical. Plain axis names are accepted too.
std::array<double, 3> parse_ranges(const json& obj, const std::string& where,
                                   bool strict) {
  if (!obj.is_object()) {
    throw ConfigError(where + " must be an object of direction -> range");
  }
  check_keys(obj, {"(90;0)", "(0;0)", "(0;90)", "x", "y", "z"}, where, strict);
  std::array<double, 3> ranges{0.0, 0.0, 0.0};
  std::array<bool, 3> seen{false, false, false};
  auto assign = [&](int axis, const json& v, const std::string& key) {
    if (seen[static_cast<std::size_t>(axis)]) {
      throw ConfigError(where + ": direction '" + key + "' given twice");
    }
    ranges[static_cast<std::size_t>(axis)] = number(v, where + "." + key);
    seen[static_cast<std::size_t>(axis)] = true;
  };
  for (const auto& [key, value] : obj.items()) {
    if (key == "(90;0)" || key == "x") {
      assign(0, value, key);
    } else if (key == "(0;0)" || key == "y") {
      assign(1, value, key);
    } else if (key == "(0;90)" || key == "z") {
      assign(2, value, key);
    }
  }
  if (!seen[0] || !seen[1] || !seen[2]) {
    throw ConfigError(where + ": all three directions (90;0), (0;0), (0;90) "
                              "are required");
  }
  return ranges;
}

VariogramSpec parse_variogram(const json& obj, const std::string& where,
                              bool strict) {
  if (!obj.is_object()) {
    throw ConfigError(where + " must be an object");
  }
  check_keys(obj, {"label", "ranges", "sill", "nugget", "model"}, where,
             strict);
  VariogramSpec spec;
  spec.label = require(obj, "label", where).get<std::string>();
  spec.ranges = parse_ranges(require(obj, "ranges", where), where + ".ranges",
                             strict);
  if (const auto it = obj.find("model"); it != obj.end()) {
    if (it->get<std::string>() != "spherical") {
      throw ConfigError(where + ": only the spherical model is supported");
    }
  }
  if (const auto it = obj.find("nugget"); it != obj.end()) {
    spec.nugget = number(*it, where + ".nugget");
  }
  if (const auto it = obj.find("sill"); it != obj.end() && !it->is_null()) {
    spec.sill = number(*it, where + ".sill");
  }
  spec.validate();
  return spec;
}

std::vector<VariogramSpec> parse_variograms(const json& arr,
                                            const std::string& where,
                                            bool strict) {
  if (!arr.is_array() || arr.empty()) {
    throw ConfigError(where + " must be a non-empty array");
  }
  std::vector<VariogramSpec> specs;
  std::set<std::string> labels;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    specs.push_back(
        parse_variogram(arr[i], where + "[" + std::to_string(i) + "]",
                        strict));
    if (!labels.insert(specs.back().label).second) {
      throw ConfigError(where + ": duplicate variogram label '" +
                        specs.back().label + "'");
    }
  }
  return specs;
}

double parse_bound(const json& v, const std::string& where, bool is_lower) {
  if (v.is_null()) {
    return is_lower ? -std::numeric_limits<double>::infinity()
                    : std::numeric_limits<double>::infinity();
  }
  return number(v, where);
}

DistributionSpec parse_distribution(const json& obj, const std::string& where,
                                    bool strict) {
  check_keys(obj, {"type", "mean", "sd", "clip", "n", "value", "path"}, where,
             strict);
  DistributionSpec dist;
  const std::string type = require(obj, "type", where).get<std::string>();
  if (type == "normal") {
    dist.kind = DistributionSpec::Kind::normal;
    dist.mean = number(require(obj, "mean", where), where + ".mean");
    dist.sd = number(require(obj, "sd", where), where + ".sd");
    if (!(dist.sd > 0.0)) {
      throw ConfigError(where + ".sd must be > 0");
    }
    if (const auto it = obj.find("clip"); it != obj.end()) {
      if (!it->is_array() || it->size() != 2) {
        throw ConfigError(where + ".clip must be [lo, hi]");
      }
      dist.clip_lo = number((*it)[0], where + ".clip[0]");
      dist.clip_hi = number((*it)[1], where + ".clip[1]");
    }
    if (const auto it = obj.find("n"); it != obj.end()) {
      dist.n_points = integer(*it, where + ".n");
    }
    if (dist.n_points < 1 || dist.n_points > 10'000'000) {
      throw ConfigError(where + ".n out of range");
    }
    if (!(dist.clip_lo < dist.clip_hi) || dist.clip_lo < 0.0 ||
        dist.clip_hi > 100.0) {
      throw ConfigError(where + ".clip must satisfy 0 <= lo < hi <= 100");
    }
  } else if (type == "constant") {
    dist.kind = DistributionSpec::Kind::constant;
    dist.value = number(require(obj, "value", where), where + ".value");
    if (dist.value < 0.0 || dist.value > 100.0) {
      throw ConfigError(where + ".value outside [0, 100]");
    }
  } else if (type == "sample") {
    dist.kind = DistributionSpec::Kind::sample_file;
    dist.path = require(obj, "path", where).get<std::string>();
  } else {
    throw ConfigError(where + ".type must be normal, constant or sample");
  }
  return dist;
}

json ranges_to_json(const std::array<double, 3>& ranges) {
  return json{{"(90;0)", ranges[0]}, {"(0;0)", ranges[1]},
              {"(0;90)", ranges[2]}};
}

json variogram_to_json(const VariogramSpec& spec) {
  json obj{{"label", spec.label},
           {"model", "spherical"},
           {"ranges", ranges_to_json(spec.ranges)},
           {"nugget", spec.nugget}};
  if (spec.sill) obj["sill"] = *spec.sill;
  return obj;
}

}  // namespace

std::vector<double> DistributionSpec::sample() const {
  switch (kind) {
    case Kind::constant:
      return {value};
    case Kind::normal: {
      std::vector<double> values(static_cast<std::size_t>(n_points));
      const double n = static_cast<double>(n_points);
      for (int i = 0; i < n_points; ++i) {
        const double p = (static_cast<double>(i) + 0.5) / n;
        values[static_cast<std::size_t>(i)] =
            std::clamp(mean + sd * normal_quantile(p), clip_lo, clip_hi);
      }
      return values;
    }
    case Kind::sample_file: {
      std::ifstream in(path);
      if (!in) {
        throw ConfigError("cannot open sample file: " + path.string());
      }
      std::vector<double> values;
      std::string line;
      int line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        bool blank = true;
        for (char c : line) {
          if (c != ' ' && c != '\t' && c != '\r') blank = false;
        }
        if (blank) continue;
        values.push_back(
            parse_double(line, path.string() + ":" + std::to_string(line_no)));
      }
      if (values.empty()) {
        throw ConfigError("sample file is empty: " + path.string());
      }
      return values;
    }
  }
  throw ConfigError("unhandled distribution kind");
}

void ProjectConfig::validate() const {
  if (grid.nx <= 0 || grid.ny <= 0 || grid.nz <= 0) {
    throw ConfigError("grid dimensions must be positive");
  }
  plan.validate();
  // Realities condition on templates placed at their absolute coordinates.
  for (const auto& tmpl : plan.templates) {
    for (const auto& col : tmpl.columns) {
      if (col[0] < 0 || col[0] >= grid.nx || col[1] < 0 ||
          col[1] >= grid.ny) {
        throw ConfigError("template '" + tmpl.name + "' column (" +
                          std::to_string(col[0]) + ", " +
                          std::to_string(col[1]) + ") outside grid " +
                          std::to_string(grid.nx) + "x" +
                          std::to_string(grid.ny));
      }
    }
  }
  if (classes.mode == ClassConfig::Mode::explicit_bounds) {
    if (classes.classes.size() < 2) {
      throw ConfigError("explicit classes: need at least 2 classes");
    }
    for (const auto& cls : classes.classes) cls.validate();
    for (std::size_t i = 0; i + 1 < classes.classes.size(); ++i) {
      if (classes.classes[i].upper != classes.classes[i + 1].lower) {
        throw ConfigError(
            "explicit classes must be contiguous: class '" +
            classes.classes[i].label + "' upper bound differs from class '" +
            classes.classes[i + 1].label + "' lower bound");
      }
    }
  }
  if (initial_map.path && initial_map.path->empty()) {
    throw ConfigError("initial_map.path is empty");
  }
  if (!initial_map.path && !initial_map.variogram_label.empty()) {
    bool found = false;
    for (const auto& v : plan.variograms) {
      if (v.label == initial_map.variogram_label) found = true;
    }
    if (!found) {
      throw ConfigError("initial_map.variogram '" +
                        initial_map.variogram_label +
                        "' does not name a configured variogram");
    }
  }
}

ProjectConfig read_config(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config: " + path.string());
  }
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path.string() + ": " +
                      e.what());
  }
  if (!root.is_object()) {
    throw ConfigError("config root must be an object");
  }
  check_keys(root,
             {"grid", "variograms", "scenario_variograms", "templates",
              "classes", "bootstrap", "seeds", "simulation", "initial_map"},
             "config", strict);

  ProjectConfig config;

  const json& grid = require(root, "grid", "config");
  check_keys(grid, {"nx", "ny", "nz"}, "grid", strict);
  config.grid.nx = integer(require(grid, "nx", "grid"), "grid.nx");
  config.grid.ny = integer(require(grid, "ny", "grid"), "grid.ny");
  config.grid.nz = integer(require(grid, "nz", "grid"), "grid.nz");

  config.plan.variograms =
      parse_variograms(require(root, "variograms", "config"), "variograms",
                       strict);
  if (const auto it = root.find("scenario_variograms"); it != root.end()) {
    config.plan.scenario_variograms =
        parse_variograms(*it, "scenario_variograms", strict);
  } else {
    config.plan.scenario_variograms = config.plan.variograms;
  }

  const json& templates = require(root, "templates", "config");
  if (!templates.is_array() || templates.empty()) {
    throw ConfigError("at least one template required");
  }
  std::set<std::string> template_names;
  for (std::size_t t = 0; t < templates.size(); ++t) {
    const std::string where = "templates[" + std::to_string(t) + "]";
    const json& tj = templates[t];
    check_keys(tj, {"name", "columns"}, where, strict);
    WellTemplate tmpl;
    tmpl.name = require(tj, "name", where).get<std::string>();
    const json& cols = require(tj, "columns", where);
    if (!cols.is_array() || cols.empty()) {
      throw ConfigError(where + ".columns must be a non-empty array");
    }
    for (const auto& c : cols) {
      if (!c.is_array() || c.size() != 2) {
        throw ConfigError(where + ".columns entries must be [x, y]");
      }
      tmpl.columns.push_back({integer(c[0], where + ".columns.x"),
                              integer(c[1], where + ".columns.y")});
    }
    tmpl.validate();
    if (!template_names.insert(tmpl.name).second) {
      throw ConfigError("duplicate template name '" + tmpl.name + "'");
    }
    config.plan.templates.push_back(std::move(tmpl));
  }

  const json& classes = require(root, "classes", "config");
  check_keys(classes, {"mode", "classes"}, "classes", strict);
  const std::string mode = require(classes, "mode", "classes").get<std::string>();
  if (mode == "quartiles") {
    config.classes.mode = ClassConfig::Mode::quartiles;
  } else if (mode == "explicit") {
    config.classes.mode = ClassConfig::Mode::explicit_bounds;
    const json& arr = require(classes, "classes", "classes");
    if (!arr.is_array() || arr.empty()) {
      throw ConfigError("classes.classes must be a non-empty array");
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "classes.classes[" + std::to_string(i) + "]";
      check_keys(arr[i], {"label", "lower", "upper"}, where, strict);
      PorosityClass cls;
      cls.label = require(arr[i], "label", where).get<std::string>();
      cls.lower = parse_bound(require(arr[i], "lower", where),
                              where + ".lower", true);
      cls.upper = parse_bound(require(arr[i], "upper", where),
                              where + ".upper", false);
      cls.validate();
      config.classes.classes.push_back(std::move(cls));
    }
  } else {
    throw ConfigError("classes.mode must be 'quartiles' or 'explicit'");
  }

  const json& bootstrap = require(root, "bootstrap", "config");
  check_keys(bootstrap, {"m"}, "bootstrap", strict);
  config.plan.n_samples = integer(require(bootstrap, "m", "bootstrap"),
                                  "bootstrap.m");

  const json& seeds = require(root, "seeds", "config");
  check_keys(seeds, {"master"}, "seeds", strict);
  const json& master = require(seeds, "master", "seeds");
  if (!master.is_number_integer()) {
    throw ConfigError("seeds.master must be an integer");
  }
  config.plan.master_seed = master.get<std::uint64_t>();

  if (const auto it = root.find("simulation"); it != root.end()) {
    check_keys(*it, {"max_neighbors", "search_radii"}, "simulation", strict);
    if (const auto mn = it->find("max_neighbors"); mn != it->end()) {
      config.plan.max_neighbors = integer(*mn, "simulation.max_neighbors");
    }
    if (const auto sr = it->find("search_radii"); sr != it->end()) {
      config.plan.search_radii =
          parse_ranges(*sr, "simulation.search_radii", strict);
    }
  }

  if (const auto it = root.find("initial_map"); it != root.end()) {
    check_keys(*it, {"path", "generate"}, "initial_map", strict);
    if (const auto p = it->find("path"); p != it->end()) {
      config.initial_map.path = std::filesystem::path(p->get<std::string>());
    }
    if (const auto gen = it->find("generate"); gen != it->end()) {
      if (config.initial_map.path) {
        throw ConfigError("initial_map: give either path or generate");
      }
      check_keys(*gen, {"distribution", "variogram"}, "initial_map.generate",
                 strict);
      config.initial_map.distribution = parse_distribution(
          require(*gen, "distribution", "initial_map.generate"),
          "initial_map.generate.distribution", strict);
      if (const auto v = gen->find("variogram"); v != gen->end()) {
        config.initial_map.variogram_label = v->get<std::string>();
      }
    }
  }
  if (config.initial_map.variogram_label.empty()) {
    config.initial_map.variogram_label = config.plan.variograms.front().label;
  }

  config.validate();
  return config;
}

std::string config_to_json(const ProjectConfig& config) {
  json root;
  root["grid"] = {{"nx", config.grid.nx},
                  {"ny", config.grid.ny},
                  {"nz", config.grid.nz}};

  json variograms = json::array();
  for (const auto& v : config.plan.variograms) {
    variograms.push_back(variogram_to_json(v));
  }
  root["variograms"] = variograms;

  json scenario_variograms = json::array();
  for (const auto& v : config.plan.scenario_variograms) {
    scenario_variograms.push_back(variogram_to_json(v));
  }
  root["scenario_variograms"] = scenario_variograms;

  json templates = json::array();
  for (const auto& t : config.plan.templates) {
    json cols = json::array();
    for (const auto& c : t.columns) {
      cols.push_back(json::array({c[0], c[1]}));
    }
    templates.push_back(json{{"name", t.name}, {"columns", cols}});
  }
  root["templates"] = templates;

  if (config.classes.mode == ClassConfig::Mode::quartiles) {
    root["classes"] = {{"mode", "quartiles"}};
  } else {
    json arr = json::array();
    for (const auto& cls : config.classes.classes) {
      json c{{"label", cls.label}};
      c["lower"] = std::isinf(cls.lower) ? json(nullptr) : json(cls.lower);
      c["upper"] = std::isinf(cls.upper) ? json(nullptr) : json(cls.upper);
      arr.push_back(c);
    }
    root["classes"] = {{"mode", "explicit"}, {"classes", arr}};
  }

  root["bootstrap"] = {{"m", config.plan.n_samples}};
  root["seeds"] = {{"master", config.plan.master_seed}};

  json simulation{{"max_neighbors", config.plan.max_neighbors}};
  if (config.plan.search_radii[0] > 0.0) {
    simulation["search_radii"] = ranges_to_json(config.plan.search_radii);
  }
  root["simulation"] = simulation;

  json initial_map;
  if (config.initial_map.path) {
    initial_map["path"] = config.initial_map.path->string();
  } else {
    const auto& d = config.initial_map.distribution;
    json dist;
    switch (d.kind) {
      case DistributionSpec::Kind::normal:
        dist = {{"type", "normal"},
                {"mean", d.mean},
                {"sd", d.sd},
                {"clip", json::array({d.clip_lo, d.clip_hi})},
                {"n", d.n_points}};
        break;
      case DistributionSpec::Kind::constant:
        dist = {{"type", "constant"}, {"value", d.value}};
        break;
      case DistributionSpec::Kind::sample_file:
        dist = {{"type", "sample"}, {"path", d.path.string()}};
        break;
    }
    initial_map["generate"] = {
        {"distribution", dist},
        {"variogram", config.initial_map.variogram_label}};
  }
  root["initial_map"] = initial_map;

  return root.dump(2) + "\n";
}

void write_config(const ProjectConfig& config,
                  const std::filesystem::path& path) {
  atomic_write(path, config_to_json(config));
}

std::string config_hash(const ProjectConfig& config) {
  const std::string text = config_to_json(config);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace geoboot
