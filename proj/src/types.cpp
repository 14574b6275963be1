#include "bracket/types.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "bracket/errors.hpp"
#include "bracket/estimation.hpp"

namespace bracket {

PeriodRange PeriodRange::make(int start_year, int end_year) {
    if (start_year > end_year) {
        throw Error(Errc::OutOfDomain, "period start " + std::to_string(start_year) +
                                           " is after end " + std::to_string(end_year));
    }
    return PeriodRange{start_year, end_year};
}

std::string PeriodRange::to_string() const {
    return std::to_string(start_year) + "-" + std::to_string(end_year);
}

PanelDataset PanelDataset::from_records(std::vector<Observation> records) {
    for (auto& r : records) {
        const std::string where = r.unit + " " + std::to_string(r.year);
        if (r.unit.empty()) throw Error(Errc::InvalidPanel, "empty unit id");
        if (!std::isfinite(r.rate) || r.rate < 0.0)
            throw Error(Errc::InvalidPanel, "rate must be finite and >= 0 (" + where + ")");
        if (r.se && (!std::isfinite(*r.se) || *r.se < 0.0))
            throw Error(Errc::InvalidPanel, "se must be finite and >= 0 (" + where + ")");
        if (r.deaths && *r.deaths < 0)
            throw Error(Errc::InvalidPanel, "deaths must be >= 0 (" + where + ")");
        if (r.population <= 0)
            throw Error(Errc::InvalidPanel, "population must be > 0 (" + where + ")");
        if (!r.se && r.deaths) r.se = poisson_rate_se(*r.deaths, r.population);
    }
    std::sort(records.begin(), records.end(), [](const Observation& a, const Observation& b) {
        return std::tie(a.unit, a.year) < std::tie(b.unit, b.year);
    });
    PanelDataset panel;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto [it, inserted] = panel.index_[records[i].unit].emplace(records[i].year, i);
        if (!inserted) {
            throw Error(Errc::InvalidPanel, "duplicate record for " + records[i].unit + " " +
                                                std::to_string(records[i].year));
        }
    }
    panel.records_ = std::move(records);
    return panel;
}

const Observation* PanelDataset::find(const UnitId& unit, int year) const {
    auto u = index_.find(unit);
    if (u == index_.end()) return nullptr;
    auto y = u->second.find(year);
    if (y == u->second.end()) return nullptr;
    return &records_[y->second];
}

std::vector<UnitId> PanelDataset::units() const {
    std::vector<UnitId> out;
    out.reserve(index_.size());
    for (const auto& [unit, _] : index_) out.push_back(unit);
    return out;
}

std::vector<int> PanelDataset::missing_years(const UnitId& unit, const PeriodRange& period) const {
    std::vector<int> out;
    auto u = index_.find(unit);
    for (int y = period.start_year; y <= period.end_year; ++y) {
        if (u == index_.end() || u->second.count(y) == 0) out.push_back(y);
    }
    return out;
}

}  // namespace bracket
