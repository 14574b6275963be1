#pragma once
// Placebo study: rerun the bracketing construction for every unit using its
// neighbours as candidate controls, then rank the treated unit's estimates.

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "bracket/types.hpp"

namespace bracket {

class AdjacencyGraph {
public:
    AdjacencyGraph() = default;

    // Throws InvalidPanel on self-edges. Duplicate edges are merged.
    static AdjacencyGraph from_edges(const std::vector<std::pair<UnitId, UnitId>>& edges);

    UnitSet neighbors(const UnitId& unit) const;
    // Canonical edge list, each pair ordered (a < b).
    std::vector<std::pair<UnitId, UnitId>> edges() const;
    std::size_t edge_count() const;

private:
    std::map<UnitId, UnitSet> adj_;
};

enum class ExclusionReason { NoLowerNeighbors, NoUpperNeighbors, MissingData, ExplicitExclusion };
enum class Arm { lc, uc };

std::string_view to_string(ExclusionReason reason);
std::string_view to_string(Arm arm);

struct PlaceboResult {
    UnitId unit;
    std::optional<double> beta_lc;
    std::optional<double> beta_uc;
    std::optional<ExclusionReason> excluded_reason;  // set iff neither arm is available
    UnitSet lower;
    UnitSet upper;

    std::optional<double> arm(Arm a) const { return a == Arm::lc ? beta_lc : beta_uc; }
};

// One result per panel unit, sorted by unit id. Per-unit data problems become
// exclusions; the study itself never aborts on them.
std::vector<PlaceboResult> run_placebo_study(const PanelDataset& panel,
                                             const AdjacencyGraph& adjacency,
                                             const PeriodRange& prestudy,
                                             const PeriodRange& before,
                                             const PeriodRange& after,
                                             const UnitSet& exclusions);

struct RankResult {
    double estimate = 0.0;
    std::size_t n_total = 0;
    std::size_t n_strictly_greater = 0;
    std::size_t rank = 1;
    std::vector<UnitId> greater_units;
};

// Counts units whose arm estimate strictly exceeds `unit`'s. With `subset`,
// only units in the subset are compared. Throws ArmUnavailable.
RankResult rank_effect(const std::vector<PlaceboResult>& results, const UnitId& unit, Arm arm,
                       const std::optional<UnitSet>& subset = std::nullopt);

struct HistogramBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
};

// Left-closed bins of width bin_width anchored at 0, spanning the data range.
// Throws OutOfDomain for bin_width <= 0.
std::vector<HistogramBin> histogram_export(const std::vector<PlaceboResult>& results, Arm arm,
                                           double bin_width);

}  // namespace bracket
