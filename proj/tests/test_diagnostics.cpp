#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bracket/diagnostics.hpp"
#include "bracket/errors.hpp"
#include "bracket/io.hpp"
#include "test_util.hpp"

using namespace bracket;
using test_util::add_flat;

namespace {

// Treated flat at 5; upper climbs 8 -> 10 and lower climbs 2 -> 4 at the split,
// so the upper gap widens and the lower gap narrows.
PanelDataset pattern_iii_panel(double se) {
    std::vector<Observation> r;
    add_flat(r, "T", 1994, 2016, 5.0, se);
    add_flat(r, "U", 1994, 2002, 8.0, se);
    add_flat(r, "U", 2003, 2016, 10.0, se);
    add_flat(r, "L", 1994, 2002, 2.0, se);
    add_flat(r, "L", 2003, 2016, 4.0, se);
    return PanelDataset::from_records(r);
}

PanelDataset random_panel(std::mt19937_64& gen, double se_scale) {
    std::uniform_real_distribution<double> rate(0.0, 10.0), se(0.01, 1.0);
    std::vector<Observation> r;
    for (const char* u : {"T", "L", "U"}) {
        for (int y = 1994; y <= 2016; ++y) r.push_back(test_util::obs(u, y, rate(gen), se_scale * se(gen)));
    }
    return PanelDataset::from_records(r);
}

}  // namespace

TEST(GapChange, HandComputed) {
    const auto panel = pattern_iii_panel(0.1);
    const auto g = gap_change_test(panel, {"U"}, {"T"}, {1999, 2002}, {2003, 2007}, GapDirection::widens);
    EXPECT_NEAR(g.gap_first, 3.0, 1e-12);
    EXPECT_NEAR(g.gap_second, 5.0, 1e-12);
    EXPECT_NEAR(g.change, 2.0, 1e-12);
    // Each cell is an equal-weight mean of n years with se 0.1.
    const double se = std::sqrt(2 * 0.01 / 4 + 2 * 0.01 / 5);
    EXPECT_NEAR(g.se, se, 1e-12);
    EXPECT_NEAR(g.p_value, 0.5 * std::erfc(2.0 / se / std::sqrt(2.0)), 1e-15);
}

TEST(PatternTest, DetectsConstructedPattern) {
    const auto panel = pattern_iii_panel(0.1);
    const auto d = test_util::design("T", {"L"}, {"U"});
    const auto iii = pattern_test(panel, d, 2003, Pattern::iii, 0.05);
    const auto iv = pattern_test(panel, d, 2003, Pattern::iv, 0.05);
    EXPECT_TRUE(iii.evidence);
    EXPECT_FALSE(iv.evidence);
    EXPECT_EQ(iii.iu_pvalue, std::max(iii.p_a, iii.p_b));
    EXPECT_EQ(iii.split_year, 2003);
}

TEST(PatternTest, FlatBeforePeriodGivesHalf) {
    std::vector<Observation> r;
    add_flat(r, "T", 1994, 2016, 5.0);
    add_flat(r, "U", 1994, 2016, 8.0);
    add_flat(r, "L", 1994, 2016, 2.0);
    const auto panel = PanelDataset::from_records(r);
    const auto p = pattern_test(panel, test_util::design("T", {"L"}, {"U"}), 2003, Pattern::iv, 0.05);
    EXPECT_NEAR(p.p_a, 0.5, 1e-12);
    EXPECT_NEAR(p.p_b, 0.5, 1e-12);
    EXPECT_FALSE(p.evidence);
}

TEST(PatternTest, BadSplit) {
    const auto panel = pattern_iii_panel(0.1);
    const auto d = test_util::design("T", {"L"}, {"U"});
    for (int split : {1999, 1998, 2008}) {
        try {
            pattern_test(panel, d, split, Pattern::iii, 0.05);
            FAIL() << split;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::BadSplit);
        }
    }
    EXPECT_NO_THROW(pattern_test(panel, d, 2007, Pattern::iii, 0.05));
}

TEST(PatternTest, ComplementaryProperties) {
    std::mt19937_64 gen(43);
    const auto d = test_util::design("T", {"L"}, {"U"});
    for (int trial = 0; trial < 300; ++trial) {
        const auto panel = random_panel(gen, 1.0);
        const auto w = gap_change_test(panel, {"U"}, {"T"}, {1999, 2002}, {2003, 2007}, GapDirection::widens);
        const auto n = gap_change_test(panel, {"U"}, {"T"}, {1999, 2002}, {2003, 2007}, GapDirection::narrows);
        EXPECT_NEAR(w.p_value + n.p_value, 1.0, 1e-12);
        for (double alpha : {0.01, 0.05, 0.2, 0.49}) {
            const auto iii = pattern_test(panel, d, 2003, Pattern::iii, alpha);
            const auto iv = pattern_test(panel, d, 2003, Pattern::iv, alpha);
            EXPECT_FALSE(iii.evidence && iv.evidence);
            for (double p : {iii.p_a, iii.p_b, iii.iu_pvalue}) {
                EXPECT_GE(p, 0.0);
                EXPECT_LE(p, 1.0);
            }
        }
    }
}

TEST(PatternTest, ShrinkingSeNeverCrossesHalf) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        double prev_a = -1, prev_b = -1;
        bool a_low = false, b_low = false;
        for (double scale : {1.0, 0.5, 0.1, 0.01, 0.001}) {
            std::mt19937_64 gen(seed);  // same means, SEs scaled
            const auto panel = random_panel(gen, scale);
            const auto r = pattern_test(panel, test_util::design("T", {"L"}, {"U"}), 2003, Pattern::iii, 0.05);
            if (prev_a < 0) {
                a_low = r.p_a < 0.5;
                b_low = r.p_b < 0.5;
            } else {
                EXPECT_EQ(r.p_a < 0.5, a_low);
                EXPECT_EQ(r.p_b < 0.5, b_low);
                EXPECT_TRUE(a_low ? r.p_a <= prev_a + 1e-15 : r.p_a >= prev_a - 1e-15);
                EXPECT_TRUE(b_low ? r.p_b <= prev_b + 1e-15 : r.p_b >= prev_b - 1e-15);
            }
            prev_a = r.p_a;
            prev_b = r.p_b;
        }
    }
}

TEST(PatternTest, BundledRegionShowsNoEvidence) {
    const auto panel = parse_panel_csv(test_util::data_dir() / "missouri_region.csv");
    const auto d = test_util::design("Missouri", {"Iowa", "Kansas", "Kentucky", "Nebraska", "Oklahoma"},
                                     {"Arkansas", "Illinois", "Tennessee"});
    EXPECT_FALSE(pattern_test(panel, d, 2003, Pattern::iii, 0.05).evidence);
    EXPECT_FALSE(pattern_test(panel, d, 2003, Pattern::iv, 0.05).evidence);
}

TEST(TrendsTable, RowsAndOrder) {
    const auto panel = pattern_iii_panel(0.1);
    const auto d = test_util::design("T", {"L"}, {"U"});
    const auto rows = relative_trends_table(panel, d, {2001, 2004});
    ASSERT_EQ(rows.size(), 12u);
    EXPECT_EQ(rows[0].group, "treated");
    EXPECT_EQ(rows[1].group, "lower");
    EXPECT_EQ(rows[2].group, "upper");
    EXPECT_EQ(rows[0].period, (PeriodRange{2001, 2001}));
    EXPECT_EQ(rows[11].period, (PeriodRange{2004, 2004}));
    EXPECT_DOUBLE_EQ(rows[11].mean, 10.0);
    ASSERT_TRUE(rows[0].ci_lower.has_value());
    EXPECT_LT(*rows[0].ci_lower, rows[0].mean);

    TrendTableOptions split;
    split.by_year = false;
    split.split_year = 2003;
    split.with_ci = false;
    const auto two = relative_trends_table(panel, d, {1999, 2007}, split);
    ASSERT_EQ(two.size(), 6u);
    EXPECT_EQ(two[0].period, (PeriodRange{1999, 2002}));
    EXPECT_EQ(two[3].period, (PeriodRange{2003, 2007}));
    EXPECT_FALSE(two[0].ci_lower.has_value());
    EXPECT_THROW(relative_trends_table(panel, test_util::design("T", {}, {"U"}), {2001, 2004}), Error);
}
