#pragma once
// Before-period relative-trends checks: gap-change tests combined by
// intersection-union logic, plus tables for plotting.

#include <optional>
#include <string>
#include <vector>

#include "bracket/types.hpp"

namespace bracket {

enum class GapDirection { widens, narrows };

struct GapChange {
    double gap_first = 0.0;
    double gap_second = 0.0;
    double change = 0.0;  // gap_second - gap_first
    double se = 0.0;
    double p_value = 0.5;
};

// One-sided Wald test of a change in mean(group_hi) - mean(group_lo) between two
// sub-periods. Throws MissingSE.
GapChange gap_change_test(const PanelDataset& panel, const UnitSet& group_hi,
                          const UnitSet& group_lo, const PeriodRange& first,
                          const PeriodRange& second, GapDirection direction);

// Splits the before period at split_year (first year of the second part).
// Throws BadSplit unless before.start_year < split_year <= before.end_year.
PatternTestReport pattern_test(const PanelDataset& panel, const StudyDesign& design,
                               int split_year, Pattern pattern, double alpha);

std::string_view to_string(Pattern pattern);

struct TrendRow {
    PeriodRange period;
    std::string group;  // treated | lower | upper
    double mean = 0.0;
    std::optional<double> ci_lower;
    std::optional<double> ci_upper;
};

struct TrendTableOptions {
    bool by_year = true;
    // Used when by_year is false: rows for [start, split-1] and [split, end].
    std::optional<int> split_year;
    bool with_ci = true;
    double alpha = 0.05;
};

// Rows ordered by period then group (treated, lower, upper).
// Throws EmptyGroup, and MissingSE when CIs are requested without SEs.
std::vector<TrendRow> relative_trends_table(const PanelDataset& panel, const StudyDesign& design,
                                            const PeriodRange& period,
                                            const TrendTableOptions& options = {});

}  // namespace bracket
