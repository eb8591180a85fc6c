#include "geoboot/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "geoboot/error.hpp"
#include "geoboot/gridio.hpp"

namespace geoboot {

namespace {

double in_class_fraction(std::span<const double> values,
                         const PorosityClass& cls) {
  if (values.empty()) throw Error("in-class fraction of an empty value set");
  std::size_t count = 0;
  for (double v : values) {
    if (class_indicator(v, cls)) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(values.size());
}

}  // namespace

double prior_frequentist(std::span<const WellSet> well_sets,
                         const PorosityClass& cls) {
  if (well_sets.empty()) {
    throw Error("prior: empty well-set list");
  }
  double sum = 0.0;
  for (const auto& set : well_sets) {
    sum += in_class_fraction(set.flat_values(), cls);
  }
  return sum / static_cast<double>(well_sets.size());
}

double prior_ratio(double real_proportion, double r) {
  if (!(r > 0.0)) {
    throw Error("prior_ratio: coefficient r must be > 0");
  }
  return real_proportion / r;
}

double evidence(std::span<const Grid3D> scenarios, const PorosityClass& cls) {
  if (scenarios.empty()) {
    throw Error("evidence: empty scenario list");
  }
  double sum = 0.0;
  for (const auto& grid : scenarios) {
    if (!grid.same_shape(scenarios.front())) {
      throw Error("evidence: scenario shape mismatch");
    }
    sum += class_proportion(grid, cls);
  }
  return sum / static_cast<double>(scenarios.size());
}

double likelihood(const Grid3D& reality, std::span<const Grid3D> scenarios,
                  const PorosityClass& cls) {
  if (scenarios.empty()) {
    throw Error("likelihood: empty scenario list");
  }
  std::size_t reality_count = 0;
  std::vector<bool> in_class(reality.size());
  for (std::size_t b = 0; b < reality.size(); ++b) {
    in_class[b] = reality.active(b) && class_indicator(reality[b], cls);
    reality_count += in_class[b];
  }
  if (reality_count == 0) {
    throw Error("empty class in reality: no cell of class '" + cls.label +
                "'");
  }
  std::uint64_t co = 0;
  for (const auto& scenario : scenarios) {
    if (!scenario.same_shape(reality)) {
      throw Error("likelihood: scenario shape mismatch");
    }
    for (std::size_t b = 0; b < reality.size(); ++b) {
      if (in_class[b] && class_indicator(scenario[b], cls)) ++co;
    }
  }
  return static_cast<double>(co) /
         (static_cast<double>(scenarios.size()) *
          static_cast<double>(reality_count));
}

double posterior(double likelihood, double prior, double evidence) {
  if (!(evidence > 0.0)) {
    throw Error("no evidence mass: evidence must be > 0");
  }
  return likelihood * prior / evidence;
}

BayesAccumulator::BayesAccumulator(const Grid3D& reality,
                                   std::span<const PorosityClass> classes)
    : reality_(reality), classes_(classes.begin(), classes.end()) {
  reality_in_class_.resize(classes_.size());
  reality_counts_.assign(classes_.size(), 0);
  co_occurrences_.assign(classes_.size(), 0);
  fraction_sums_.assign(classes_.size(), 0.0);
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    auto& mask = reality_in_class_[c];
    mask.resize(reality.size());
    for (std::size_t b = 0; b < reality.size(); ++b) {
      mask[b] = reality.active(b) && class_indicator(reality[b], classes_[c]);
      reality_counts_[c] += mask[b];
    }
  }
}

void BayesAccumulator::add_scenario(const Grid3D& scenario) {
  if (!scenario.same_shape(reality_)) {
    throw Error("bayes accumulator: scenario shape mismatch");
  }
  std::vector<std::size_t> in_class(classes_.size(), 0);
  std::size_t active = 0;
  for (std::size_t b = 0; b < scenario.size(); ++b) {
    if (!scenario.active(b)) continue;
    ++active;
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      if (class_indicator(scenario[b], classes_[c])) {
        ++in_class[c];
        if (reality_in_class_[c][b]) ++co_occurrences_[c];
      }
    }
  }
  if (active == 0) throw Error("bayes accumulator: empty scenario grid");
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    fraction_sums_[c] +=
        static_cast<double>(in_class[c]) / static_cast<double>(active);
  }
  ++n_;
}

BayesCell BayesAccumulator::finish(std::size_t cls_index, std::string tpl,
                                   std::string cls, std::string reality_k,
                                   std::string scenario_k2, double prior,
                                   double real_proportion) const {
  BayesCell cell;
  cell.tpl = std::move(tpl);
  cell.cls = std::move(cls);
  cell.reality_k = std::move(reality_k);
  cell.scenario_k2 = std::move(scenario_k2);
  cell.prior = prior;
  cell.real_proportion = real_proportion;
  cell.m = n_;

  if (reality_counts_[cls_index] == 0) {
    cell.status = BayesCell::Status::empty_class_in_reality;
    return cell;
  }
  cell.likelihood = static_cast<double>(co_occurrences_[cls_index]) /
                    (static_cast<double>(n_) *
                     static_cast<double>(reality_counts_[cls_index]));
  cell.evidence = fraction_sums_[cls_index] / static_cast<double>(n_);
  if (!(cell.evidence > 0.0)) {
    cell.status = BayesCell::Status::no_evidence;
    return cell;
  }
  cell.posterior_raw = posterior(cell.likelihood, cell.prior, cell.evidence);
  cell.posterior_clamped = std::clamp(cell.posterior_raw, 0.0, 1.0);
  return cell;
}

ProbabilityTable compute_probability_table(
    const BootstrapResult& result, const BootstrapPlan& plan,
    std::span<const PorosityClass> classes) {
  ProbabilityTable table;
  for (int tpl = 0; tpl < static_cast<int>(plan.templates.size()); ++tpl) {
    for (std::size_t c = 0; c < classes.size(); ++c) {
      for (int k = 0; k < static_cast<int>(plan.variograms.size()); ++k) {
        const std::size_t ridx = result.reality_index(plan, tpl, k);
        const Grid3D& reality = result.realities[ridx];
        const auto& sets = result.well_sets[ridx];
        const double prior = prior_frequentist(sets, classes[c]);
        const double real_prop = class_proportion(reality, classes[c]);

        for (int k2 = 0;
             k2 < static_cast<int>(plan.scenario_variograms.size()); ++k2) {
          BayesAccumulator acc(reality, classes.subspan(c, 1));
          for (int i = 0; i < plan.n_samples; ++i) {
            acc.add_scenario(
                result.scenarios[result.scenario_index(plan, tpl, k, i, k2)]);
          }
          table.cells.push_back(acc.finish(
              0, plan.templates[static_cast<std::size_t>(tpl)].name,
              classes[c].label,
              plan.variograms[static_cast<std::size_t>(k)].label,
              plan.scenario_variograms[static_cast<std::size_t>(k2)].label,
              prior, real_prop));
        }
      }
    }
  }
  return table;
}

void write_probability_csv(const ProbabilityTable& table,
                           const std::filesystem::path& path) {
  std::ostringstream out;
  out << "template,class,reality,scenario,prior,evidence,likelihood,"
         "posterior_raw,posterior_clamped,real_proportion,m\n";
  for (const auto& cell : table.cells) {
    if (!cell.ok()) continue;
    out << cell.tpl << ',' << cell.cls << ',' << cell.reality_k << ','
        << cell.scenario_k2 << ',' << format_double(cell.prior) << ','
        << format_double(cell.evidence) << ','
        << format_double(cell.likelihood) << ','
        << format_double(cell.posterior_raw) << ','
        << format_double(cell.posterior_clamped) << ','
        << format_double(cell.real_proportion) << ',' << cell.m << '\n';
  }
  atomic_write(path, out.str());
}

ProbabilityTable read_probability_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open probability table: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(path.string() + ": empty probability table");
  }
  ProbabilityTable table;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 11) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected 11 fields, got " +
                       std::to_string(fields.size()));
    }
    const std::string ctx = path.string() + ":" + std::to_string(line_no);
    BayesCell cell;
    cell.tpl = fields[0];
    cell.cls = fields[1];
    cell.reality_k = fields[2];
    cell.scenario_k2 = fields[3];
    cell.prior = parse_double(fields[4], ctx);
    cell.evidence = parse_double(fields[5], ctx);
    cell.likelihood = parse_double(fields[6], ctx);
    cell.posterior_raw = parse_double(fields[7], ctx);
    cell.posterior_clamped = parse_double(fields[8], ctx);
    cell.real_proportion = parse_double(fields[9], ctx);
    cell.m = static_cast<int>(parse_double(fields[10], ctx));
    table.cells.push_back(std::move(cell));
  }
  return table;
}

}  // namespace geoboot
