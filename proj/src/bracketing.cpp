#include "bracket/bracketing.hpp"

#include <algorithm>
#include <cmath>

#include "bracket/diagnostics.hpp"
#include "bracket/errors.hpp"
#include "bracket/estimation.hpp"
#include "bracket/validate.hpp"

namespace bracket {

ControlGroups classify_candidates(const PanelDataset& panel, const UnitId& treated,
                                  const UnitSet& candidates, const PeriodRange& prestudy) {
    ControlGroups g;
    g.treated_prestudy_mean = weighted_period_mean(panel, {treated}, prestudy).mean;
    for (const auto& unit : candidates) {
        if (unit == treated) continue;
        const double m = weighted_period_mean(panel, {unit}, prestudy).mean;
        g.candidate_means.emplace(unit, m);
        if (m < g.treated_prestudy_mean) {
            g.lower.insert(unit);
        } else if (m > g.treated_prestudy_mean) {
            g.upper.insert(unit);
        } else {
            g.tied.insert(unit);
        }
    }
    return g;
}

ControlGroups construct_control_groups(const PanelDataset& panel, const UnitId& treated,
                                       const UnitSet& candidates, const PeriodRange& prestudy) {
    ControlGroups g = classify_candidates(panel, treated, candidates, prestudy);
    if (g.lower.empty()) throw Error(Errc::EmptyBracket, "no lower control candidates for " + treated);
    if (g.upper.empty()) throw Error(Errc::EmptyBracket, "no upper control candidates for " + treated);
    return g;
}

namespace {

DiffWithCi gap(const PeriodSummary& hi, const PeriodSummary& lo, double alpha) {
    if (!hi.se || !lo.se) throw Error(Errc::MissingSE, "ordering check needs SEs");
    DiffWithCi d;
    d.point = hi.mean - lo.mean;
    d.se = std::hypot(*hi.se, *lo.se);
    d.ci = wald_ci(d.point, d.se, alpha);
    return d;
}

void require_valid(const PanelDataset& panel, const StudyDesign& design) {
    const auto violations = validate_design(panel, design);
    if (violations.empty()) return;
    std::string msg = "invalid design:";
    bool only_missing = true;
    for (const auto& v : violations) {
        msg += " " + std::string(to_string(v.code));
        if (!v.unit.empty()) msg += "(" + v.unit + ")";
        only_missing = only_missing && v.code == ViolationCode::MissingUnitYears;
    }
    throw Error(only_missing ? Errc::MissingData : Errc::ConfigError, msg);
}

}  // namespace

OrderingReport validate_ordering(const PanelDataset& panel, const StudyDesign& design,
                                 const PeriodRange& period, double alpha) {
    const PeriodSummary t = weighted_period_mean(panel, {design.treated}, period);
    const PeriodSummary lc = weighted_period_mean(panel, design.lower_controls, period);
    const PeriodSummary uc = weighted_period_mean(panel, design.upper_controls, period);
    OrderingReport r;
    r.period = period;
    r.diff_uc_minus_t = gap(uc, t, alpha);
    r.diff_t_minus_lc = gap(t, lc, alpha);
    r.ordered = r.diff_uc_minus_t.point >= 0.0 && r.diff_t_minus_lc.point >= 0.0;
    r.significant = r.diff_uc_minus_t.ci.lower > 0.0 && r.diff_t_minus_lc.ci.lower > 0.0;
    return r;
}

Bracket bracket_bounds(double beta_lc, double beta_uc) {
    return Bracket{std::min(beta_lc, beta_uc), std::max(beta_lc, beta_uc)};
}

ConfInterval minmax_ci(const ConfInterval& ci_lc, const ConfInterval& ci_uc) {
    if (std::abs(ci_lc.level - ci_uc.level) > 1e-12) {
        throw Error(Errc::LevelMismatch, "min-max CI needs intervals at the same level");
    }
    return ConfInterval{std::min(ci_lc.lower, ci_uc.lower), std::max(ci_lc.upper, ci_uc.upper),
                        ci_lc.level};
}

BracketReport full_analysis(const PanelDataset& panel, const StudyDesign& design, double alpha,
                            const AnalysisOptions& options) {
    require_valid(panel, design);

    BracketReport r;
    r.lower_cells = arm_summaries(panel, design.treated, design.lower_controls, design.before,
                                  design.after);
    r.upper_cells = arm_summaries(panel, design.treated, design.upper_controls, design.before,
                                  design.after);
    r.est_lower_ctrl = effect_estimate(r.lower_cells, alpha);
    r.est_upper_ctrl = effect_estimate(r.upper_cells, alpha);

    const Bracket b = bracket_bounds(r.est_lower_ctrl.point, r.est_upper_ctrl.point);
    r.bracket_lo = b.lo;
    r.bracket_hi = b.hi;
    r.minmax_ci = minmax_ci(r.est_lower_ctrl.ci, r.est_upper_ctrl.ci);
    r.minmax_pct_ci = minmax_ci(r.est_lower_ctrl.pct_ci, r.est_upper_ctrl.pct_ci);
    r.ordering = validate_ordering(panel, design, design.before, alpha);

    UnitSet pooled;
    if (options.pooled_controls) {
        pooled = *options.pooled_controls;
    } else {
        pooled = design.lower_controls;
        pooled.insert(design.upper_controls.begin(), design.upper_controls.end());
    }
    if (!pooled.empty()) {
        r.pooled_cells = arm_summaries(panel, design.treated, pooled, design.before, design.after);
        r.est_pooled = effect_estimate(*r.pooled_cells, alpha);
    }

    if (options.split_year) {
        r.diagnostics.push_back(pattern_test(panel, design, *options.split_year, Pattern::iii, alpha));
        r.diagnostics.push_back(pattern_test(panel, design, *options.split_year, Pattern::iv, alpha));
    }
    return r;
}

}  // namespace bracket
