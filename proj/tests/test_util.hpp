#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "bracket/types.hpp"

namespace test_util {

inline std::filesystem::path data_dir() { return BRACKET_DATA_DIR; }

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("bracket_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline bracket::Observation obs(const std::string& unit, int year, double rate, double se,
                                std::int64_t pop = 1000000) {
    bracket::Observation o;
    o.unit = unit;
    o.year = year;
    o.rate = rate;
    o.se = se;
    o.population = pop;
    return o;
}

// One unit with a constant rate over [first, last].
inline void add_flat(std::vector<bracket::Observation>& recs, const std::string& unit, int first,
                     int last, double rate, double se = 0.1, std::int64_t pop = 1000000) {
    for (int y = first; y <= last; ++y) recs.push_back(obs(unit, y, rate, se, pop));
}

inline bracket::StudyDesign design(const std::string& treated, bracket::UnitSet lower,
                                   bracket::UnitSet upper) {
    bracket::StudyDesign d;
    d.treated = treated;
    d.lower_controls = std::move(lower);
    d.upper_controls = std::move(upper);
    d.prestudy = {1994, 1998};
    d.before = {1999, 2007};
    d.after = {2008, 2016};
    return d;
}

inline bracket::PeriodSummary cell(double mean, double se) {
    return bracket::PeriodSummary{mean, se, 1.0};
}

}  // namespace test_util
