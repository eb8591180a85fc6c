#include "geoboot/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "geoboot/error.hpp"
#include "geoboot/gridio.hpp"

namespace geoboot {

std::vector<double> r_grid() {
  std::vector<double> grid(30);
  for (int i = 0; i < 30; ++i) {
    grid[static_cast<std::size_t>(i)] = static_cast<double>(i + 1) / 10.0;
  }
  return grid;
}

double deviation_r1(double posterior_raw, double real_proportion) {
  if (!(real_proportion > 0.0)) {
    throw Error("deviation_r1: undefined normalization (real proportion 0)");
  }
  return std::fabs(posterior_raw - real_proportion) / real_proportion;
}

namespace {

// The full formula: ratio prior substituted into the Bayes update, deviation
// taken against the reality proportion, scaled back by r.
double literal_deviation(double likelihood, double evidence,
                         double real_proportion, double r) {
  const double prior = real_proportion / r;
  const double post = likelihood * prior / evidence;
  return std::fabs(post - real_proportion) / real_proportion * r;
}

}  // namespace

DeviationCurve deviation_r2_curve(double likelihood, double evidence,
                                  double real_proportion) {
  if (!(evidence > 0.0)) {
    throw Error("deviation_r2_curve: evidence must be > 0");
  }
  if (!(real_proportion > 0.0)) {
    throw Error("deviation_r2_curve: real proportion must be > 0");
  }

  DeviationCurve curve;
  curve.likelihood = likelihood;
  curve.evidence = evidence;
  curve.real_proportion = real_proportion;
  curve.vertex = likelihood / evidence;

  curve.r = r_grid();
  // Emit the analytic vertex as well, so the curve's true minimum is never
  // lost to the 0.1 discretization.
  if (curve.vertex >= 0.1 && curve.vertex <= 3.0) {
    const auto pos = std::lower_bound(curve.r.begin(), curve.r.end(),
                                      curve.vertex);
    if (pos == curve.r.end() || std::fabs(*pos - curve.vertex) > 1e-12) {
      curve.r.insert(pos, curve.vertex);
    }
  }

  curve.literal.reserve(curve.r.size());
  curve.simplified.reserve(curve.r.size());
  double best = std::numeric_limits<double>::infinity();
  for (const double r : curve.r) {
    const double lit = literal_deviation(likelihood, evidence,
                                         real_proportion, r);
    const double simp = std::fabs(likelihood / evidence - r);
    curve.literal.push_back(lit);
    curve.simplified.push_back(simp);
    if (simp < best) {
      best = simp;
      curve.argmin_r = r;
    }
  }
  curve.min_value = best;
  return curve;
}

DeviationCurve curve_from_cell(const BayesCell& cell) {
  if (!cell.ok()) {
    throw Error("deviation curve from absent table cell");
  }
  DeviationCurve curve = deviation_r2_curve(cell.likelihood, cell.evidence,
                                            cell.real_proportion);
  curve.tpl = cell.tpl;
  curve.cls = cell.cls;
  curve.reality_k = cell.reality_k;
  curve.scenario_k2 = cell.scenario_k2;
  curve.d_r1 = deviation_r1(cell.posterior_raw, cell.real_proportion);
  return curve;
}

RankingEntry rank_models(std::span<const DeviationCurve> curves) {
  if (curves.size() < 2) {
    throw Error("rank_models: need at least 2 scenario curves, got " +
                std::to_string(curves.size()));
  }
  RankingEntry entry;
  entry.tpl = curves.front().tpl;
  entry.cls = curves.front().cls;
  entry.reality_k = curves.front().reality_k;
  for (const auto& c : curves) {
    if (c.tpl != entry.tpl || c.cls != entry.cls ||
        c.reality_k != entry.reality_k) {
      throw Error("rank_models: curves from different table groups");
    }
  }

  // Order by vertex; |v - r| is minimal for the scenario whose vertex is
  // nearest to r, so optimality regions are the 1D Voronoi cells of the
  // vertices, clipped to [0.1, 3.0].
  std::vector<const DeviationCurve*> by_vertex;
  for (const auto& c : curves) by_vertex.push_back(&c);
  std::sort(by_vertex.begin(), by_vertex.end(),
            [](const DeviationCurve* a, const DeviationCurve* b) {
              if (a->vertex != b->vertex) return a->vertex < b->vertex;
              return a->scenario_k2 < b->scenario_k2;
            });

  constexpr double r_lo = 0.1, r_hi = 3.0;
  entry.intervals.reserve(by_vertex.size());
  for (std::size_t s = 0; s < by_vertex.size(); ++s) {
    const DeviationCurve& c = *by_vertex[s];
    ScenarioInterval iv;
    iv.scenario_k2 = c.scenario_k2;
    iv.vertex = c.vertex;
    iv.d_r1 = c.d_r1;

    const bool tied_prev =
        s > 0 && by_vertex[s - 1]->vertex == c.vertex;
    const bool tied_next =
        s + 1 < by_vertex.size() && by_vertex[s + 1]->vertex == c.vertex;
    iv.tied = tied_prev || tied_next;
    if (iv.tied) entry.has_ties = true;

    if (tied_prev) {
      // Lexicographically-first label of the tie run already owns the cell.
      iv.empty = true;
      entry.intervals.push_back(iv);
      continue;
    }

    // Walk past the tie run to the next distinct vertex.
    std::size_t next = s + 1;
    while (next < by_vertex.size() && by_vertex[next]->vertex == c.vertex) {
      ++next;
    }
    double lo = (s == 0) ? r_lo
                         : 0.5 * (by_vertex[s - 1]->vertex + c.vertex);
    double hi = (next == by_vertex.size())
                    ? r_hi
                    : 0.5 * (c.vertex + by_vertex[next]->vertex);
    lo = std::max(lo, r_lo);
    hi = std::min(hi, r_hi);
    if (lo <= hi) {
      iv.lo = lo;
      iv.hi = hi;
      iv.empty = false;
    }
    entry.intervals.push_back(iv);
  }

  // Restore the caller's scenario order for reporting.
  std::map<std::string, std::size_t> given_order;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    given_order[curves[i].scenario_k2] = i;
  }
  std::sort(entry.intervals.begin(), entry.intervals.end(),
            [&](const ScenarioInterval& a, const ScenarioInterval& b) {
              return given_order.at(a.scenario_k2) <
                     given_order.at(b.scenario_k2);
            });

  // Per-grid-point optimum, ties flagged and broken lexicographically.
  for (const double r : r_grid()) {
    const DeviationCurve* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    bool tied = false;
    for (const auto& c : curves) {
      const double d = std::fabs(c.vertex - r);
      if (std::fabs(d - best_d) <= 1e-12) {
        tied = true;
        if (c.scenario_k2 < best->scenario_k2) best = &c;
      } else if (d < best_d) {
        best = &c;
        best_d = d;
        tied = false;
      }
    }
    entry.grid_optima.push_back({r, best->scenario_k2, tied});
  }

  std::vector<std::pair<double, std::string>> order;
  for (const auto& c : curves) order.emplace_back(c.d_r1, c.scenario_k2);
  std::sort(order.begin(), order.end());
  for (auto& [d, label] : order) entry.d_r1_order.push_back(label);

  return entry;
}

std::vector<DeviationCurve> curves_from_table(const ProbabilityTable& table) {
  std::vector<DeviationCurve> curves;
  curves.reserve(table.cells.size());
  for (const auto& cell : table.cells) {
    if (!cell.ok()) continue;
    if (!(cell.evidence > 0.0) || !(cell.real_proportion > 0.0)) continue;
    curves.push_back(curve_from_cell(cell));
  }
  return curves;
}

std::vector<RankingEntry> rank_all(std::span<const DeviationCurve> curves) {
  // Group by (template, class, reality) preserving first-seen order.
  std::vector<std::vector<const DeviationCurve*>> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& c : curves) {
    const std::string key = c.tpl + "\t" + c.cls + "\t" + c.reality_k;
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(&c);
  }
  std::vector<RankingEntry> entries;
  for (const auto& group : groups) {
    if (group.size() < 2) continue;  // caller reports skipped groups
    std::vector<DeviationCurve> owned;
    owned.reserve(group.size());
    for (const auto* c : group) owned.push_back(*c);
    entries.push_back(rank_models(owned));
  }
  return entries;
}

void write_deviation_csv(std::span<const DeviationCurve> curves,
                         const std::filesystem::path& path) {
  std::ostringstream out;
  out << "template,class,reality,scenario,r,d_r2_literal,d_r2_simplified\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.r.size(); ++i) {
      out << c.tpl << ',' << c.cls << ',' << c.reality_k << ','
          << c.scenario_k2 << ',' << format_double(c.r[i]) << ','
          << format_double(c.literal[i]) << ','
          << format_double(c.simplified[i]) << '\n';
    }
  }
  atomic_write(path, out.str());
}

std::vector<DeviationCurve> read_deviation_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open deviation curves: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(path.string() + ": empty deviation file");
  }
  std::vector<DeviationCurve> curves;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 7) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected 7 fields, got " +
                       std::to_string(fields.size()));
    }
    const std::string ctx = path.string() + ":" + std::to_string(line_no);
    const bool same_curve =
        !curves.empty() && curves.back().tpl == fields[0] &&
        curves.back().cls == fields[1] && curves.back().reality_k == fields[2] &&
        curves.back().scenario_k2 == fields[3];
    if (!same_curve) {
      DeviationCurve c;
      c.tpl = fields[0];
      c.cls = fields[1];
      c.reality_k = fields[2];
      c.scenario_k2 = fields[3];
      curves.push_back(std::move(c));
    }
    curves.back().r.push_back(parse_double(fields[4], ctx));
    curves.back().literal.push_back(parse_double(fields[5], ctx));
    curves.back().simplified.push_back(parse_double(fields[6], ctx));
  }
  return curves;
}

void write_ranking_report(std::span<const RankingEntry> entries,
                          const std::filesystem::path& path) {
  auto fixed6 = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
  };

  std::ostringstream out;
  out << "# geoboot ranking report\n";
  out << "# D_R2(r) = |likelihood/evidence - r|; each scenario is optimal "
         "where its vertex r* = L/E is nearest to r\n";
  for (const auto& entry : entries) {
    out << "template=" << entry.tpl << " class=" << entry.cls
        << " reality=" << entry.reality_k << "\n";
    for (const auto& iv : entry.intervals) {
      out << "  scenario " << iv.scenario_k2 << ": vertex "
          << fixed6(iv.vertex);
      if (iv.empty) {
        out << " optimal nowhere in [0.1, 3.0]";
      } else {
        out << " optimal [" << fixed6(iv.lo) << ", " << fixed6(iv.hi) << "]";
      }
      out << " d_r1 " << fixed6(iv.d_r1);
      if (iv.tied) out << " (tied)";
      out << "\n";
    }
    out << "  d_r1 ranking:";
    for (std::size_t i = 0; i < entry.d_r1_order.size(); ++i) {
      out << (i == 0 ? " " : " < ") << entry.d_r1_order[i];
    }
    out << "\n";
    if (!entry.excluded.empty()) {
      out << "  excluded (absent table cells):";
      for (const auto& label : entry.excluded) out << " " << label;
      out << "\n";
    }
  }
  atomic_write(path, out.str());
}

}  // namespace geoboot
