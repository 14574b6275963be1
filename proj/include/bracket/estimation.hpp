#pragma once
// Population-weighted period summaries and the moment difference-in-differences
// estimator with its standard error, Wald interval and percent-change forms.

#include <cstdint>

#include "bracket/types.hpp"

namespace bracket {

inline constexpr double kPer100k = 100000.0;

// Person-year weighted mean rate of `group` over `period`.
// Throws EmptyGroup for an empty group and MissingData when any unit-year is
// absent. The se is left empty (not an error) when any record lacks one.
PeriodSummary weighted_period_mean(const PanelDataset& panel, const UnitSet& group,
                                   const PeriodRange& period);

// SE of a crude rate per 100,000 under a Poisson count model.
double poisson_rate_se(std::int64_t deaths, std::int64_t population);

double did_point(const PeriodSummary& t_before, const PeriodSummary& t_after,
                 const PeriodSummary& c_before, const PeriodSummary& c_after);

// Four cells treated as independent. Throws MissingSE.
double did_se(const PeriodSummary& t_before, const PeriodSummary& t_after,
              const PeriodSummary& c_before, const PeriodSummary& c_after);

ConfInterval wald_ci(double point, double se, double alpha);

struct PctChange {
    double pct_point = 0.0;
    double denom = 0.0;
};

// 100 * beta / (treated before + control change). Throws NonpositiveDenominator.
PctChange pct_change(double beta, const PeriodSummary& t_before, const PeriodSummary& c_before,
                     const PeriodSummary& c_after);

// Delta-method SE of the percent change.
double pct_change_se_delta(const PeriodSummary& t_before, const PeriodSummary& t_after,
                           const PeriodSummary& c_before, const PeriodSummary& c_after);

ConfInterval pct_ci_scaled(const ConfInterval& ci, double denom);

// Point, SE, Wald CI and percent companions for one control arm.
EffectEstimate effect_estimate(const ArmSummaries& cells, double alpha);

// Cell summaries for one arm: treated unit vs control group over before/after.
ArmSummaries arm_summaries(const PanelDataset& panel, const UnitId& treated,
                           const UnitSet& controls, const PeriodRange& before,
                           const PeriodRange& after);

}  // namespace bracket
