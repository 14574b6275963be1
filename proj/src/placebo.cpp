#include "bracket/placebo.hpp"

#include <algorithm>
#include <cmath>

#include "bracket/bracketing.hpp"
#include "bracket/errors.hpp"
#include "bracket/estimation.hpp"

namespace bracket {

std::string_view to_string(ExclusionReason reason) {
    switch (reason) {
        case ExclusionReason::NoLowerNeighbors: return "NoLowerNeighbors";
        case ExclusionReason::NoUpperNeighbors: return "NoUpperNeighbors";
        case ExclusionReason::MissingData: return "MissingData";
        case ExclusionReason::ExplicitExclusion: return "ExplicitExclusion";
    }
    return "Unknown";
}

std::string_view to_string(Arm arm) { return arm == Arm::lc ? "lc" : "uc"; }

AdjacencyGraph AdjacencyGraph::from_edges(const std::vector<std::pair<UnitId, UnitId>>& edges) {
    AdjacencyGraph g;
    for (const auto& [a, b] : edges) {
        if (a == b) throw Error(Errc::InvalidPanel, "self-edge on " + a);
        g.adj_[a].insert(b);
        g.adj_[b].insert(a);
    }
    return g;
}

UnitSet AdjacencyGraph::neighbors(const UnitId& unit) const {
    auto it = adj_.find(unit);
    return it == adj_.end() ? UnitSet{} : it->second;
}

std::vector<std::pair<UnitId, UnitId>> AdjacencyGraph::edges() const {
    std::vector<std::pair<UnitId, UnitId>> out;
    for (const auto& [a, ns] : adj_) {
        for (const auto& b : ns) {
            if (a < b) out.emplace_back(a, b);
        }
    }
    return out;
}

std::size_t AdjacencyGraph::edge_count() const { return edges().size(); }

std::vector<PlaceboResult> run_placebo_study(const PanelDataset& panel,
                                             const AdjacencyGraph& adjacency,
                                             const PeriodRange& prestudy,
                                             const PeriodRange& before,
                                             const PeriodRange& after,
                                             const UnitSet& exclusions) {
    auto complete = [&](const UnitId& u) {
        return panel.covers(u, prestudy) && panel.covers(u, before) && panel.covers(u, after);
    };

    std::vector<PlaceboResult> results;
    for (const auto& unit : panel.units()) {
        PlaceboResult r;
        r.unit = unit;
        if (exclusions.count(unit)) {
            r.excluded_reason = ExclusionReason::ExplicitExclusion;
        } else if (!complete(unit)) {
            r.excluded_reason = ExclusionReason::MissingData;
        } else {
            UnitSet candidates;
            for (const auto& n : adjacency.neighbors(unit)) {
                if (!exclusions.count(n) && panel.has_unit(n) && complete(n)) candidates.insert(n);
            }
            const ControlGroups g = classify_candidates(panel, unit, candidates, prestudy);
            r.lower = g.lower;
            r.upper = g.upper;
            if (!g.lower.empty()) {
                const ArmSummaries c = arm_summaries(panel, unit, g.lower, before, after);
                r.beta_lc = did_point(c.treated_before, c.treated_after, c.control_before,
                                      c.control_after);
            }
            if (!g.upper.empty()) {
                const ArmSummaries c = arm_summaries(panel, unit, g.upper, before, after);
                r.beta_uc = did_point(c.treated_before, c.treated_after, c.control_before,
                                      c.control_after);
            }
            if (!r.beta_lc && !r.beta_uc) {
                r.excluded_reason = ExclusionReason::NoLowerNeighbors;
            }
        }
        results.push_back(std::move(r));
    }
    return results;
}

RankResult rank_effect(const std::vector<PlaceboResult>& results, const UnitId& unit, Arm arm,
                       const std::optional<UnitSet>& subset) {
    auto self = std::find_if(results.begin(), results.end(),
                             [&](const PlaceboResult& r) { return r.unit == unit; });
    if (self == results.end() || !self->arm(arm)) {
        throw Error(Errc::ArmUnavailable, unit + " has no " + std::string(to_string(arm)) +
                                              " placebo estimate");
    }
    RankResult out;
    out.estimate = *self->arm(arm);
    out.n_total = 1;
    for (const auto& r : results) {
        if (r.unit == unit || !r.arm(arm)) continue;
        if (subset && !subset->count(r.unit)) continue;
        ++out.n_total;
        if (*r.arm(arm) > out.estimate) {
            ++out.n_strictly_greater;
            out.greater_units.push_back(r.unit);
        }
    }
    out.rank = out.n_strictly_greater + 1;
    return out;
}

std::vector<HistogramBin> histogram_export(const std::vector<PlaceboResult>& results, Arm arm,
                                           double bin_width) {
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
        throw Error(Errc::OutOfDomain, "bin width must be positive");
    }
    auto bin_of = [bin_width](double x) {
        auto k = static_cast<long long>(std::floor(x / bin_width));
        // Guard against x / w rounding across a bin edge.
        if (static_cast<double>(k + 1) * bin_width <= x) ++k;
        if (static_cast<double>(k) * bin_width > x) --k;
        return k;
    };

    std::vector<long long> keys;
    for (const auto& r : results) {
        if (auto v = r.arm(arm)) keys.push_back(bin_of(*v));
    }
    if (keys.empty()) return {};
    const auto [lo, hi] = std::minmax_element(keys.begin(), keys.end());
    std::vector<HistogramBin> bins;
    for (long long k = *lo; k <= *hi; ++k) {
        bins.push_back({static_cast<double>(k) * bin_width, static_cast<double>(k + 1) * bin_width, 0});
    }
    for (long long k : keys) ++bins[static_cast<std::size_t>(k - *lo)].count;
    return bins;
}

}  // namespace bracket
