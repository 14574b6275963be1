#pragma once
// Domain types shared across the library: panel data, periods, designs and
// the estimate/report value types.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bracket {

using UnitId = std::string;
using UnitSet = std::set<UnitId>;

// Rates are per 100,000 persons, taken as provided (already age-adjusted).
struct Observation {
    UnitId unit;
    int year = 0;
    double rate = 0.0;
    std::optional<double> se;
    std::optional<std::int64_t> deaths;
    std::int64_t population = 0;

    bool operator==(const Observation&) const = default;
};

// Inclusive year range.
struct PeriodRange {
    int start_year = 0;
    int end_year = 0;

    // Throws OutOfDomain when start > end.
    static PeriodRange make(int start_year, int end_year);

    bool contains(int year) const { return year >= start_year && year <= end_year; }
    int length() const { return end_year - start_year + 1; }
    std::string to_string() const;

    bool operator==(const PeriodRange&) const = default;
};

// Immutable unit-by-year panel. Records are held in canonical (unit, year)
// order regardless of input order.
class PanelDataset {
public:
    PanelDataset() = default;

    // Validates record invariants and fills se from deaths where se is absent.
    // Throws InvalidPanel on duplicates or out-of-range values.
    static PanelDataset from_records(std::vector<Observation> records);

    const std::vector<Observation>& records() const { return records_; }
    const Observation* find(const UnitId& unit, int year) const;
    bool has_unit(const UnitId& unit) const { return index_.count(unit) != 0; }
    std::vector<UnitId> units() const;
    // Years in `period` for which `unit` has no record.
    std::vector<int> missing_years(const UnitId& unit, const PeriodRange& period) const;
    bool covers(const UnitId& unit, const PeriodRange& period) const {
        return missing_years(unit, period).empty();
    }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

private:
    std::vector<Observation> records_;
    std::map<UnitId, std::map<int, std::size_t>> index_;
};

struct StudyDesign {
    UnitId treated;
    UnitSet lower_controls;
    UnitSet upper_controls;
    PeriodRange prestudy;
    PeriodRange before;
    PeriodRange after;
};

struct PeriodSummary {
    double mean = 0.0;
    std::optional<double> se;  // absent when any contributing record lacks an SE
    double total_weight = 0.0;  // person-years
};

struct ConfInterval {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;

    bool contains(double x) const { return lower <= x && x <= upper; }
    bool contains(const ConfInterval& other) const {
        return lower <= other.lower && other.upper <= upper;
    }
    double width() const { return upper - lower; }
};

// A difference-in-differences estimate with its percent-change companion.
struct EffectEstimate {
    double point = 0.0;
    double se = 0.0;
    ConfInterval ci;
    double pct_point = 0.0;
    ConfInterval pct_ci;     // endpoint-scaled
    double pct_se = 0.0;     // delta method
    double denom = 0.0;      // counterfactual after-period mean of the treated
};

struct DiffWithCi {
    double point = 0.0;
    double se = 0.0;
    ConfInterval ci;
};

struct OrderingReport {
    DiffWithCi diff_uc_minus_t;
    DiffWithCi diff_t_minus_lc;
    PeriodRange period;
    // Point estimates of the two gaps are both non-negative.
    bool ordered = true;
    // Both gap CIs exclude zero from below.
    bool significant = false;
};

enum class Pattern { iii, iv };

struct PatternTestReport {
    int split_year = 0;
    Pattern pattern = Pattern::iii;
    double p_a = 0.5;
    double p_b = 0.5;
    double iu_pvalue = 0.5;
    bool evidence = false;
};

struct ArmSummaries {
    PeriodSummary treated_before;
    PeriodSummary treated_after;
    PeriodSummary control_before;
    PeriodSummary control_after;
};

struct BracketReport {
    EffectEstimate est_lower_ctrl;
    EffectEstimate est_upper_ctrl;
    ArmSummaries lower_cells;
    ArmSummaries upper_cells;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    ConfInterval minmax_ci;
    ConfInterval minmax_pct_ci;
    OrderingReport ordering;
    // Pooled-controls estimate; only valid under parallel trends.
    std::optional<EffectEstimate> est_pooled;
    std::optional<ArmSummaries> pooled_cells;
    std::vector<PatternTestReport> diagnostics;
};

}  // namespace bracket
