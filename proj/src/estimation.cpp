#include "bracket/estimation.hpp"

#include <cmath>
#include <string>

#include "bracket/errors.hpp"
#include "bracket/normal.hpp"

namespace bracket {

PeriodSummary weighted_period_mean(const PanelDataset& panel, const UnitSet& group,
                                   const PeriodRange& period) {
    if (group.empty()) throw Error(Errc::EmptyGroup, "cannot summarize an empty group");
    double sum_w = 0.0;
    double sum_wy = 0.0;
    double sum_w2v = 0.0;
    bool all_se = true;
    for (const auto& unit : group) {
        for (int year = period.start_year; year <= period.end_year; ++year) {
            const Observation* obs = panel.find(unit, year);
            if (obs == nullptr) {
                throw Error(Errc::MissingData,
                            "no record for " + unit + " " + std::to_string(year));
            }
            const double w = static_cast<double>(obs->population);
            sum_w += w;
            sum_wy += w * obs->rate;
            if (obs->se) {
                sum_w2v += w * w * (*obs->se) * (*obs->se);
            } else {
                all_se = false;
            }
        }
    }
    PeriodSummary s;
    s.mean = sum_wy / sum_w;
    s.total_weight = sum_w;
    if (all_se) s.se = std::sqrt(sum_w2v) / sum_w;
    return s;
}

double poisson_rate_se(std::int64_t deaths, std::int64_t population) {
    if (population <= 0) throw Error(Errc::OutOfDomain, "population must be positive");
    if (deaths < 0) throw Error(Errc::OutOfDomain, "deaths must be non-negative");
    return std::sqrt(static_cast<double>(deaths)) / static_cast<double>(population) * kPer100k;
}

double did_point(const PeriodSummary& t_before, const PeriodSummary& t_after,
                 const PeriodSummary& c_before, const PeriodSummary& c_after) {
    return (t_after.mean - t_before.mean) - (c_after.mean - c_before.mean);
}

namespace {

double require_se(const PeriodSummary& s, const char* cell) {
    if (!s.se) throw Error(Errc::MissingSE, std::string("missing SE for cell ") + cell);
    return *s.se;
}

double require_denom(double denom) {
    if (!(denom > 0.0)) {
        throw Error(Errc::NonpositiveDenominator,
                    "percent-change denominator must be positive, got " + std::to_string(denom));
    }
    return denom;
}

}  // namespace

double did_se(const PeriodSummary& t_before, const PeriodSummary& t_after,
              const PeriodSummary& c_before, const PeriodSummary& c_after) {
    const double a = require_se(t_before, "treated/before");
    const double b = require_se(t_after, "treated/after");
    const double c = require_se(c_before, "control/before");
    const double d = require_se(c_after, "control/after");
    return std::sqrt(a * a + b * b + c * c + d * d);
}

ConfInterval wald_ci(double point, double se, double alpha) {
    if (se < 0.0) throw Error(Errc::OutOfDomain, "se must be non-negative");
    const double z = NormalTail::for_alpha(alpha).z;
    return ConfInterval{point - z * se, point + z * se, 1.0 - alpha};
}

PctChange pct_change(double beta, const PeriodSummary& t_before, const PeriodSummary& c_before,
                     const PeriodSummary& c_after) {
    const double denom = require_denom(t_before.mean + (c_after.mean - c_before.mean));
    return PctChange{100.0 * beta / denom, denom};
}

double pct_change_se_delta(const PeriodSummary& t_before, const PeriodSummary& t_after,
                           const PeriodSummary& c_before, const PeriodSummary& c_after) {
    const double se_t0 = require_se(t_before, "treated/before");
    const double se_t1 = require_se(t_after, "treated/after");
    const double se_c0 = require_se(c_before, "control/before");
    const double se_c1 = require_se(c_after, "control/after");

    const double a = did_point(t_before, t_after, c_before, c_after);
    const double b = require_denom(t_before.mean + (c_after.mean - c_before.mean));
    const double g_t1 = 100.0 / b;
    const double g_shared = 100.0 * (a + b) / (b * b);  // |d/dt0| = |d/dc1| = |d/dc0|

    return std::sqrt(g_t1 * g_t1 * se_t1 * se_t1 +
                     g_shared * g_shared * (se_t0 * se_t0 + se_c1 * se_c1 + se_c0 * se_c0));
}

ConfInterval pct_ci_scaled(const ConfInterval& ci, double denom) {
    require_denom(denom);
    return ConfInterval{100.0 * ci.lower / denom, 100.0 * ci.upper / denom, ci.level};
}

EffectEstimate effect_estimate(const ArmSummaries& cells, double alpha) {
    const auto& [t0, t1, c0, c1] = cells;
    EffectEstimate e;
    e.point = did_point(t0, t1, c0, c1);
    e.se = did_se(t0, t1, c0, c1);
    e.ci = wald_ci(e.point, e.se, alpha);
    const PctChange pct = pct_change(e.point, t0, c0, c1);
    e.pct_point = pct.pct_point;
    e.denom = pct.denom;
    e.pct_ci = pct_ci_scaled(e.ci, pct.denom);
    e.pct_se = pct_change_se_delta(t0, t1, c0, c1);
    return e;
}

ArmSummaries arm_summaries(const PanelDataset& panel, const UnitId& treated,
                           const UnitSet& controls, const PeriodRange& before,
                           const PeriodRange& after) {
    const UnitSet t{treated};
    return ArmSummaries{weighted_period_mean(panel, t, before),
                        weighted_period_mean(panel, t, after),
                        weighted_period_mean(panel, controls, before),
                        weighted_period_mean(panel, controls, after)};
}

}  // namespace bracket
