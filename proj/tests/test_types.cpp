#include <algorithm>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "bracket/errors.hpp"
#include "bracket/estimation.hpp"
#include "bracket/validate.hpp"
#include "test_util.hpp"

using namespace bracket;
using test_util::add_flat;
using test_util::obs;

namespace {

std::vector<Observation> three_unit_records() {
    std::vector<Observation> r;
    add_flat(r, "T", 1994, 2016, 5.0);
    add_flat(r, "L", 1994, 2016, 2.0);
    add_flat(r, "U", 1994, 2016, 8.0);
    return r;
}

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no exception";
    return Errc::InvariantViolation;
}

}  // namespace

TEST(PeriodRange, MakeAndContains) {
    const auto p = PeriodRange::make(1999, 2007);
    EXPECT_EQ(p.length(), 9);
    EXPECT_TRUE(p.contains(1999));
    EXPECT_TRUE(p.contains(2007));
    EXPECT_FALSE(p.contains(2008));
    EXPECT_EQ(p.to_string(), "1999-2007");
    EXPECT_EQ(code_of([] { PeriodRange::make(2000, 1999); }), Errc::OutOfDomain);
}

TEST(Panel, CanonicalOrderAndLookup) {
    auto recs = three_unit_records();
    std::reverse(recs.begin(), recs.end());
    const auto panel = PanelDataset::from_records(recs);
    EXPECT_EQ(panel.units(), (std::vector<UnitId>{"L", "T", "U"}));
    EXPECT_EQ(panel.records().front().unit, "L");
    EXPECT_EQ(panel.records().front().year, 1994);
    ASSERT_NE(panel.find("U", 2000), nullptr);
    EXPECT_EQ(panel.find("U", 2000)->rate, 8.0);
    EXPECT_EQ(panel.find("U", 2017), nullptr);
    EXPECT_TRUE(panel.covers("T", {1994, 2016}));
    EXPECT_EQ(panel.missing_years("T", {2015, 2018}), (std::vector<int>{2017, 2018}));
}

TEST(Panel, RejectsBadRecords) {
    auto dup = three_unit_records();
    dup.push_back(dup.front());
    EXPECT_EQ(code_of([&] { PanelDataset::from_records(dup); }), Errc::InvalidPanel);
    EXPECT_EQ(code_of([] { PanelDataset::from_records({obs("A", 2000, -1.0, 0.1)}); }), Errc::InvalidPanel);
    EXPECT_EQ(code_of([] { PanelDataset::from_records({obs("A", 2000, 1.0, -0.1)}); }), Errc::InvalidPanel);
    EXPECT_EQ(code_of([] { PanelDataset::from_records({obs("A", 2000, 1.0, 0.1, 0)}); }), Errc::InvalidPanel);
    auto o = obs("A", 2000, 1.0, 0.1);
    o.deaths = -3;
    EXPECT_EQ(code_of([&] { PanelDataset::from_records({o}); }), Errc::InvalidPanel);
}

TEST(Panel, DerivesSeFromDeaths) {
    Observation o;
    o.unit = "A";
    o.year = 2000;
    o.rate = 5.0;
    o.deaths = 250;
    o.population = 5000000;
    const auto panel = PanelDataset::from_records({o});
    ASSERT_TRUE(panel.records()[0].se.has_value());
    EXPECT_DOUBLE_EQ(*panel.records()[0].se, std::sqrt(250.0) / 5000000.0 * 1e5);
}

TEST(Validate, CleanDesignHasNoViolations) {
    const auto panel = PanelDataset::from_records(three_unit_records());
    EXPECT_TRUE(validate_design(panel, test_util::design("T", {"L"}, {"U"})).empty());
}

TEST(Validate, ReportsEveryViolation) {
    auto recs = three_unit_records();
    recs.erase(std::remove_if(recs.begin(), recs.end(),
                              [](const Observation& o) { return o.unit == "L" && (o.year == 2001 || o.year == 2010); }),
               recs.end());
    const auto panel = PanelDataset::from_records(recs);
    auto d = test_util::design("T", {"L", "T", "U"}, {"U"});
    d.before = {1998, 2008};
    const auto v = validate_design(panel, d);
    auto has = [&](ViolationCode c) {
        return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.code == c; });
    };
    EXPECT_TRUE(has(ViolationCode::PeriodOverlap));
    EXPECT_TRUE(has(ViolationCode::TreatedInControls));
    EXPECT_TRUE(has(ViolationCode::ControlsOverlap));
    EXPECT_TRUE(has(ViolationCode::MissingUnitYears));
    const auto missing = std::find_if(v.begin(), v.end(), [](const Violation& x) {
        return x.code == ViolationCode::MissingUnitYears;
    });
    EXPECT_EQ(missing->unit, "L");
    EXPECT_NE(missing->detail.find("2001"), std::string::npos);
    EXPECT_NE(missing->detail.find("2010"), std::string::npos);

    const auto empty = validate_design(PanelDataset::from_records(three_unit_records()),
                                       test_util::design("T", {}, {}));
    EXPECT_EQ(empty.size(), 2u);
    EXPECT_EQ(empty[0].code, ViolationCode::EmptyLowerControls);
    EXPECT_EQ(empty[1].code, ViolationCode::EmptyUpperControls);
}

TEST(Validate, OrderIndependent) {
    auto recs = three_unit_records();
    recs.erase(recs.begin() + 5);
    const auto d = test_util::design("T", {"L", "X"}, {"U"});
    const auto ref = validate_design(PanelDataset::from_records(recs), d);
    std::mt19937_64 gen(3);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(recs.begin(), recs.end(), gen);
        EXPECT_EQ(validate_design(PanelDataset::from_records(recs), d), ref);
    }
}

TEST(Validate, ValidPanelsAreSummarizable) {
    // Any design that validates can be summarized without error.
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> rate(0.0, 20.0);
    std::uniform_int_distribution<int> pop(1000, 10000000);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Observation> recs;
        for (const char* u : {"A", "B", "C", "D"}) {
            for (int y = 1994; y <= 2016; ++y) recs.push_back(obs(u, y, rate(gen), 0.1, pop(gen)));
        }
        const auto panel = PanelDataset::from_records(recs);
        const auto d = test_util::design("A", {"B"}, {"C", "D"});
        ASSERT_TRUE(validate_design(panel, d).empty());
        EXPECT_NO_THROW(arm_summaries(panel, d.treated, d.lower_controls, d.before, d.after));
        EXPECT_NO_THROW(arm_summaries(panel, d.treated, d.upper_controls, d.before, d.after));
    }
}
