#include "bracket/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "bracket/errors.hpp"
#include "bracket/estimation.hpp"
#include "bracket/normal.hpp"

namespace bracket {

std::string_view to_string(Pattern pattern) { return pattern == Pattern::iii ? "iii" : "iv"; }

GapChange gap_change_test(const PanelDataset& panel, const UnitSet& group_hi,
                          const UnitSet& group_lo, const PeriodRange& first,
                          const PeriodRange& second, GapDirection direction) {
    const PeriodSummary hi1 = weighted_period_mean(panel, group_hi, first);
    const PeriodSummary hi2 = weighted_period_mean(panel, group_hi, second);
    const PeriodSummary lo1 = weighted_period_mean(panel, group_lo, first);
    const PeriodSummary lo2 = weighted_period_mean(panel, group_lo, second);

    GapChange g;
    g.gap_first = hi1.mean - lo1.mean;
    g.gap_second = hi2.mean - lo2.mean;
    g.change = did_point(hi1, hi2, lo1, lo2);
    g.se = did_se(hi1, hi2, lo1, lo2);

    double z = 0.0;
    if (g.se > 0.0) {
        z = g.change / g.se;
    } else if (g.change != 0.0) {
        z = std::copysign(std::numeric_limits<double>::infinity(), g.change);
    }
    g.p_value = direction == GapDirection::widens ? normal_sf(z) : normal_cdf(z);
    return g;
}

PatternTestReport pattern_test(const PanelDataset& panel, const StudyDesign& design,
                               int split_year, Pattern pattern, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::OutOfDomain, "alpha must lie in (0, 1)");
    if (!(split_year > design.before.start_year && split_year <= design.before.end_year)) {
        throw Error(Errc::BadSplit, "split year " + std::to_string(split_year) +
                                        " must fall strictly inside before period " +
                                        design.before.to_string());
    }
    const PeriodRange first{design.before.start_year, split_year - 1};
    const PeriodRange second{split_year, design.before.end_year};
    const UnitSet treated{design.treated};

    // (a) concerns upper - treated, (b) treated - lower. Pattern iii: (a) widens
    // while (b) narrows; pattern iv is the reverse.
    const bool iii = pattern == Pattern::iii;
    const GapChange a = gap_change_test(panel, design.upper_controls, treated, first, second,
                                        iii ? GapDirection::widens : GapDirection::narrows);
    const GapChange b = gap_change_test(panel, treated, design.lower_controls, first, second,
                                        iii ? GapDirection::narrows : GapDirection::widens);

    PatternTestReport r;
    r.split_year = split_year;
    r.pattern = pattern;
    r.p_a = a.p_value;
    r.p_b = b.p_value;
    r.iu_pvalue = std::max(r.p_a, r.p_b);
    r.evidence = r.iu_pvalue < alpha;
    return r;
}

std::vector<TrendRow> relative_trends_table(const PanelDataset& panel, const StudyDesign& design,
                                            const PeriodRange& period,
                                            const TrendTableOptions& options) {
    if (design.lower_controls.empty() || design.upper_controls.empty()) {
        throw Error(Errc::EmptyGroup, "relative trends need nonempty lower and upper groups");
    }
    std::vector<PeriodRange> parts;
    if (options.by_year) {
        for (int y = period.start_year; y <= period.end_year; ++y) parts.push_back({y, y});
    } else if (options.split_year && *options.split_year > period.start_year &&
               *options.split_year <= period.end_year) {
        parts.push_back({period.start_year, *options.split_year - 1});
        parts.push_back({*options.split_year, period.end_year});
    } else {
        parts.push_back(period);
    }

    const double z = options.with_ci ? NormalTail::for_alpha(options.alpha).z : 0.0;
    const std::pair<const char*, UnitSet> groups[] = {
        {"treated", UnitSet{design.treated}},
        {"lower", design.lower_controls},
        {"upper", design.upper_controls}};

    std::vector<TrendRow> rows;
    for (const auto& part : parts) {
        for (const auto& [label, units] : groups) {
            const PeriodSummary s = weighted_period_mean(panel, units, part);
            TrendRow row{part, label, s.mean, std::nullopt, std::nullopt};
            if (options.with_ci) {
                if (!s.se) throw Error(Errc::MissingSE, std::string("no SE for group ") + label);
                row.ci_lower = s.mean - z * *s.se;
                row.ci_upper = s.mean + z * *s.se;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace bracket
