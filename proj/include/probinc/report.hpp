#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "probinc/feasibility.hpp"
#include "probinc/inc_measure.hpp"
#include "probinc/knowledge_base.hpp"
#include "probinc/shapley.hpp"

namespace probinc {

struct ConstraintReport {
  std::string label;
  std::string constraint;
  double d = 0.0;
  std::optional<double> eta;
  std::optional<double> tau;
  std::optional<double> adjusted_d;
  std::optional<double> shapley;
  std::optional<bool> free;
};

/// Everything one CLI invocation computed. Optional parts are omitted from
/// the JSON form when not requested.
struct AnalysisReport {
  std::string command;
  std::size_t worlds = 0;
  bool consistent = false;
  std::optional<double> inc_star;
  std::optional<double> inc_star_normalized;
  std::optional<double> oracle;
  std::vector<ConstraintReport> per_constraint;
  std::optional<std::vector<std::vector<std::size_t>>> mis;
  std::optional<std::vector<double>> witness;
  nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();
};

/// Rounds to 12 significant digits, the precision used in reports.
double report_round(double v);

nlohmann::ordered_json to_json(const AnalysisReport& report);

/// Human-readable rendering. Shapley tables are sorted by descending value.
std::string to_text(const AnalysisReport& report);

/// Fills per_constraint labels, texts and probabilities from the KB.
AnalysisReport make_report(const std::string& command, const KnowledgeBase& kb);

void add_measure(AnalysisReport& report, const MeasureResult& result,
                 const KnowledgeBase& kb);
void add_shapley(AnalysisReport& report, const ShapleyReport& shapley);
void add_mis(AnalysisReport& report, const MisReport& mis);

}  // namespace probinc
