#include "bracket/validate.hpp"

#include <algorithm>

namespace bracket {

std::string_view to_string(ViolationCode code) {
    switch (code) {
        case ViolationCode::PeriodOrder: return "PeriodOrder";
        case ViolationCode::PeriodOverlap: return "PeriodOverlap";
        case ViolationCode::TreatedInControls: return "TreatedInControls";
        case ViolationCode::ControlsOverlap: return "ControlsOverlap";
        case ViolationCode::EmptyLowerControls: return "EmptyLowerControls";
        case ViolationCode::EmptyUpperControls: return "EmptyUpperControls";
        case ViolationCode::MissingUnitYears: return "MissingUnitYears";
    }
    return "Unknown";
}

namespace {

std::string join_years(const std::vector<int>& years) {
    std::string out;
    for (int y : years) {
        if (!out.empty()) out += ",";
        out += std::to_string(y);
    }
    return out;
}

}  // namespace

std::vector<Violation> validate_design(const PanelDataset& panel, const StudyDesign& design) {
    std::vector<Violation> out;

    const std::pair<const char*, const PeriodRange*> periods[] = {
        {"prestudy", &design.prestudy}, {"before", &design.before}, {"after", &design.after}};
    for (const auto& [name, p] : periods) {
        if (p->start_year > p->end_year)
            out.push_back({ViolationCode::PeriodOrder, "", std::string(name) + " " + p->to_string()});
    }
    if (design.prestudy.end_year >= design.before.start_year)
        out.push_back({ViolationCode::PeriodOverlap, "", "prestudy/before"});
    if (design.before.end_year >= design.after.start_year)
        out.push_back({ViolationCode::PeriodOverlap, "", "before/after"});

    if (design.lower_controls.count(design.treated) || design.upper_controls.count(design.treated))
        out.push_back({ViolationCode::TreatedInControls, design.treated, ""});

    std::vector<UnitId> shared;
    std::set_intersection(design.lower_controls.begin(), design.lower_controls.end(),
                          design.upper_controls.begin(), design.upper_controls.end(),
                          std::back_inserter(shared));
    for (const auto& u : shared) out.push_back({ViolationCode::ControlsOverlap, u, ""});

    if (design.lower_controls.empty()) out.push_back({ViolationCode::EmptyLowerControls, "", ""});
    if (design.upper_controls.empty()) out.push_back({ViolationCode::EmptyUpperControls, "", ""});

    UnitSet all = design.lower_controls;
    all.insert(design.upper_controls.begin(), design.upper_controls.end());
    all.insert(design.treated);
    for (const auto& unit : all) {
        std::vector<int> missing;
        for (const auto& [_, p] : periods) {
            if (p->start_year > p->end_year) continue;
            auto m = panel.missing_years(unit, *p);
            missing.insert(missing.end(), m.begin(), m.end());
        }
        std::sort(missing.begin(), missing.end());
        missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
        if (!missing.empty())
            out.push_back({ViolationCode::MissingUnitYears, unit, join_years(missing)});
    }
    return out;
}

}  // namespace bracket
