#pragma once
// Lower/upper control construction, ordering checks, bracket bounds and the
// min-max confidence interval.

#include <map>
#include <optional>

#include "bracket/types.hpp"

namespace bracket {

struct ControlGroups {
    UnitSet lower;
    UnitSet upper;
    UnitSet tied;  // prestudy mean exactly equal to the treated unit's
    double treated_prestudy_mean = 0.0;
    std::map<UnitId, double> candidate_means;
};

// Classifies candidates by their prestudy mean relative to the treated unit.
// Either side may come back empty. Throws MissingData.
ControlGroups classify_candidates(const PanelDataset& panel, const UnitId& treated,
                                  const UnitSet& candidates, const PeriodRange& prestudy);

// As classify_candidates, but throws EmptyBracket when either side is empty.
ControlGroups construct_control_groups(const PanelDataset& panel, const UnitId& treated,
                                       const UnitSet& candidates, const PeriodRange& prestudy);

// Gaps (upper - treated) and (treated - lower) over `period` with Wald CIs.
OrderingReport validate_ordering(const PanelDataset& panel, const StudyDesign& design,
                                 const PeriodRange& period, double alpha);

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
};

Bracket bracket_bounds(double beta_lc, double beta_uc);

// [min of lower endpoints, max of upper endpoints]. Throws LevelMismatch.
ConfInterval minmax_ci(const ConfInterval& ci_lc, const ConfInterval& ci_uc);

struct AnalysisOptions {
    // nullopt: pool lower and upper controls; empty set: skip the pooled arm.
    std::optional<UnitSet> pooled_controls;
    // First year of the second before-period part; runs pattern tests when set.
    std::optional<int> split_year;
};

BracketReport full_analysis(const PanelDataset& panel, const StudyDesign& design, double alpha,
                            const AnalysisOptions& options = {});

}  // namespace bracket
