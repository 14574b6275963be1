#pragma once
// Report emission: versioned JSON, CSV tables, a human-readable summary and
// static SVG plots.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bracket/bracketing.hpp"
#include "bracket/config.hpp"
#include "bracket/diagnostics.hpp"
#include "bracket/placebo.hpp"
#include "bracket/simulation.hpp"

namespace bracket {

inline constexpr int kSchemaVersion = 1;

struct ReferenceCheck {
    std::string arm;
    std::string field;
    double computed = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    bool agrees = false;
};

std::vector<ReferenceCheck> check_references(const BracketReport& report,
                                             const std::vector<ReferenceValue>& refs,
                                             double point_tol, double pct_tol);

struct AnalysisContext {
    StudyDesign design;
    double alpha = 0.05;
    std::string panel_source;
    std::optional<ControlGroups> construction;  // set when groups were built from prestudy data
    std::vector<ReferenceCheck> reference_checks;
};

// Serializes with two-space indent and a trailing newline. Throws
// InvariantViolation if any number is NaN or infinite.
std::string dump_json(const nlohmann::json& j);

nlohmann::json to_json(const ConfInterval& ci);
nlohmann::json to_json(const EffectEstimate& e);
nlohmann::json to_json(const PatternTestReport& p);
nlohmann::json to_json(const McReport& r);
nlohmann::json to_json(const CoverageReport& r);
nlohmann::json to_json(const SyntheticControlComparison& c);

nlohmann::json bracket_report_json(const BracketReport& report, const AnalysisContext& ctx);
std::string bracket_report_csv(const BracketReport& report);
std::string bracket_summary_text(const BracketReport& report, const AnalysisContext& ctx);

std::string placebo_results_csv(const std::vector<PlaceboResult>& results);
std::string histogram_csv(const std::vector<HistogramBin>& bins);
nlohmann::json placebo_report_json(const std::vector<PlaceboResult>& results,
                                   const std::optional<RankResult>& rank_lc,
                                   const std::optional<RankResult>& rank_uc,
                                   const UnitId& treated);
std::string placebo_histogram_svg(const std::vector<HistogramBin>& lc,
                                  const std::vector<HistogramBin>& uc,
                                  std::optional<double> marker_lc, std::optional<double> marker_uc);

std::string trends_csv(const std::vector<TrendRow>& rows);
std::string trends_svg(const std::vector<TrendRow>& rows, const std::string& title);

std::string mc_report_csv(const McReport& r, const std::optional<CoverageReport>& cov);

}  // namespace bracket
