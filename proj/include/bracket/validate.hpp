#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bracket/types.hpp"

namespace bracket {

enum class ViolationCode {
    PeriodOrder,        // a period has start > end
    PeriodOverlap,      // periods not strictly increasing
    TreatedInControls,
    ControlsOverlap,
    EmptyLowerControls,
    EmptyUpperControls,
    MissingUnitYears,
};

std::string_view to_string(ViolationCode code);

struct Violation {
    ViolationCode code;
    std::string unit;  // empty unless unit-specific
    std::string detail;

    bool operator==(const Violation&) const = default;
};

// Returns every violated design/panel invariant; an empty result means the
// design can be analyzed. Output order is canonical.
std::vector<Violation> validate_design(const PanelDataset& panel, const StudyDesign& design);

}  // namespace bracket
