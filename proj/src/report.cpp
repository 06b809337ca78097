#include "probinc/report.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace probinc {

double report_round(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // no "-0"
}

AnalysisReport make_report(const std::string& command, const KnowledgeBase& kb) {
  AnalysisReport r;
  r.command = command;
  r.worlds = kb.signature().world_count();
  for (std::size_t i = 0; i < kb.size(); ++i) {
    ConstraintReport c;
    c.label = kb.display_label(i);
    c.constraint = to_string(kb[i], kb.signature());
    c.d = kb[i].probability;
    r.per_constraint.push_back(std::move(c));
  }
  return r;
}

void add_measure(AnalysisReport& report, const MeasureResult& result,
                 const KnowledgeBase& kb) {
  report.inc_star = result.value;
  report.inc_star_normalized =
      kb.empty() ? 0.0 : result.value / static_cast<double>(kb.size());
  for (std::size_t i = 0; i < kb.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    auto& c = report.per_constraint[i];
    c.eta = result.deviations.eta[r];
    c.tau = result.deviations.tau[r];
    c.adjusted_d = result.repaired[i].probability;
  }
  report.witness = std::vector<double>(result.witness.alpha().begin(),
                                       result.witness.alpha().end());
  auto& d = report.diagnostics;
  d["startsUsed"] = result.diagnostics.starts_used;
  d["convergedStarts"] = result.diagnostics.converged_starts;
  d["iterations"] = result.diagnostics.iterations;
  d["lpSolves"] = result.diagnostics.lp_solves;
  d["bestStart"] = result.diagnostics.best_start;
  d["maxResidual"] = report_round(result.diagnostics.max_residual);
}

void add_shapley(AnalysisReport& report, const ShapleyReport& shapley) {
  for (std::size_t i = 0; i < shapley.values.size(); ++i) {
    report.per_constraint[i].shapley = shapley.values[i];
  }
  auto& d = report.diagnostics;
  d["subsetsEvaluated"] = shapley.subsets_evaluated;
  d["superadditivityViolations"] = shapley.superadditivity_violations;
  d["worstSuperadditivityGap"] = report_round(shapley.worst_superadditivity_gap);
}

void add_mis(AnalysisReport& report, const MisReport& mis) {
  std::vector<std::vector<std::size_t>> sets;
  for (auto s : mis.subsets) sets.push_back(MisReport::positions(s));
  report.mis = std::move(sets);
  for (std::size_t i = 0; i < mis.free.size(); ++i) {
    report.per_constraint[i].free = mis.free[i];
  }
  report.diagnostics["subsetsTested"] = mis.subsets_tested;
}

nlohmann::ordered_json to_json(const AnalysisReport& report) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["command"] = report.command;
  j["worlds"] = report.worlds;
  j["consistent"] = report.consistent;
  if (report.inc_star) j["incStar"] = report_round(*report.inc_star);
  if (report.inc_star_normalized) {
    j["incStarNormalized"] = report_round(*report.inc_star_normalized);
  }
  if (report.oracle) j["oracle"] = report_round(*report.oracle);
  ordered_json rows = ordered_json::array();
  for (const auto& c : report.per_constraint) {
    ordered_json row;
    row["label"] = c.label;
    row["constraint"] = c.constraint;
    row["d"] = report_round(c.d);
    if (c.eta) row["eta"] = report_round(*c.eta);
    if (c.tau) row["tau"] = report_round(*c.tau);
    if (c.adjusted_d) row["adjustedD"] = report_round(*c.adjusted_d);
    if (c.shapley) row["shapley"] = report_round(*c.shapley);
    if (c.free) row["free"] = *c.free;
    rows.push_back(std::move(row));
  }
  j["perConstraint"] = std::move(rows);
  if (report.mis) j["mis"] = *report.mis;
  if (report.witness) {
    ordered_json w = ordered_json::array();
    for (double a : *report.witness) w.push_back(report_round(a));
    j["witness"] = std::move(w);
  }
  j["diagnostics"] = report.diagnostics;
  return j;
}

namespace {

std::string fmt(double v, int precision = 6) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, report_round(v));
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string to_text(const AnalysisReport& report) {
  std::ostringstream os;
  os << "consistent: " << (report.consistent ? "yes" : "no") << "\n";
  if (report.inc_star) os << "Inc*:       " << fmt(*report.inc_star) << "\n";
  if (report.inc_star_normalized) {
    os << "Inc*0:      " << fmt(*report.inc_star_normalized) << "\n";
  }
  if (report.oracle) os << "oracle:     " << fmt(*report.oracle) << "\n";

  std::size_t label_w = 5;
  std::size_t text_w = 10;
  for (const auto& c : report.per_constraint) {
    label_w = std::max(label_w, c.label.size());
    text_w = std::max(text_w, c.constraint.size());
  }
  const bool blame = std::any_of(report.per_constraint.begin(),
                                 report.per_constraint.end(),
                                 [](const auto& c) { return c.shapley.has_value(); });
  std::vector<std::size_t> order(report.per_constraint.size());
  std::iota(order.begin(), order.end(), 0);
  if (blame) {
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return *report.per_constraint[a].shapley > *report.per_constraint[b].shapley;
    });
  }
  if (!report.per_constraint.empty()) {
    os << "\n" << pad("label", label_w) << "  " << pad("constraint", text_w);
    if (blame) os << "  " << pad("shapley", 10);
    os << "  " << pad("eta", 10) << "  " << pad("tau", 10) << "  adjusted";
    if (report.mis) os << "  free";
    os << "\n";
    for (auto i : order) {
      const auto& c = report.per_constraint[i];
      os << pad(c.label, label_w) << "  " << pad(c.constraint, text_w);
      if (blame) os << "  " << pad(fmt(*c.shapley), 10);
      os << "  " << pad(c.eta ? fmt(*c.eta) : "-", 10) << "  "
         << pad(c.tau ? fmt(*c.tau) : "-", 10) << "  "
         << (c.adjusted_d ? fmt(*c.adjusted_d, 12) : "-");
      if (c.free) os << "  " << (*c.free ? "yes" : "no");
      os << "\n";
    }
  }
  if (report.mis) {
    os << "\nminimal inconsistent subsets: " << report.mis->size() << "\n";
    for (const auto& s : *report.mis) {
      os << "  {";
      for (std::size_t k = 0; k < s.size(); ++k) {
        os << (k ? ", " : "") << report.per_constraint[s[k]].label;
      }
      os << "}\n";
    }
  }
  return os.str();
}

}  // namespace probinc
