#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "bracket/app.hpp"
#include "bracket/errors.hpp"
#include "bracket/io.hpp"
#include "bracket/report.hpp"
#include "test_util.hpp"

using namespace bracket;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    args.insert(args.begin(), "bracket");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string cfg(const std::string& name) { return (test_util::data_dir() / "configs" / name).string(); }

}  // namespace

TEST(Json, RejectsNonFinite) {
    EXPECT_THROW(dump_json(nlohmann::json{{"x", NAN}}), Error);
    EXPECT_THROW(dump_json(nlohmann::json{{"x", {1.0, INFINITY}}}), Error);
    EXPECT_EQ(dump_json(nlohmann::json{{"x", 1}}), "{\n  \"x\": 1\n}\n");
}

TEST(Cli, AnalyzeWritesReport) {
    const auto dir = test_util::scratch_dir("cli_analyze");
    const auto r = cli({"analyze", "--config", cfg("group_periods.cfg"), "--out-dir", dir.string(), "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(read_text_file(dir / "bracket_report.json"));
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_EQ(format_fixed(j["est_upper_ctrl"]["point"].get<double>(), 1), "1.3");
    EXPECT_TRUE(j["est_pooled"]["assumes_parallel_trends"].get<bool>());
    for (const auto& c : j["reference_checks"]) EXPECT_TRUE(c["agrees"].get<bool>()) << c.dump();
    EXPECT_TRUE(fs::exists(dir / "bracket_report.csv"));
    EXPECT_TRUE(fs::exists(dir / "summary.txt"));
    EXPECT_NE(r.out.find("Bracket: [0.9, 1.3]"), std::string::npos) << r.out;
}

TEST(Cli, ReferenceMismatchIsFlagged) {
    const auto dir = test_util::scratch_dir("cli_a6");
    const auto r = cli({"analyze", "--config", cfg("after_2008_2013.cfg"), "--out-dir", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(read_text_file(dir / "bracket_report.json"));
    int mismatches = 0;
    for (const auto& c : j["reference_checks"]) {
        if (!c["agrees"].get<bool>()) {
            ++mismatches;
            EXPECT_EQ(c["arm"], "lower");
            EXPECT_EQ(c["field"], "pct_point");
        }
    }
    EXPECT_EQ(mismatches, 1);
    EXPECT_NE(r.out.find("Reference mismatch"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    const auto dir = test_util::scratch_dir("cli_codes");
    auto r = cli({"analyze"});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.err.rfind("error: ConfigError:", 0), 0u) << r.err;
    EXPECT_EQ(cli({"frobnicate"}).code, 2);
    EXPECT_EQ(cli({"simulate", "--scenario", "additive", "--out-dir", dir.string()}).code, 2);
    r = cli({"analyze", "--config", cfg("group_periods.cfg"), "--panel", "/nonexistent.csv", "--out-dir", dir.string()});
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(r.err.rfind("error: FileNotFound:", 0), 0u) << r.err;
    r = cli({"analyze", "--config", cfg("group_periods.cfg"), "--after", "2008-2030", "--out-dir", dir.string()});
    EXPECT_EQ(r.code, 3) << r.err;
    r = cli({"analyze", "--config", cfg("group_periods.cfg"), "--after", "2009-2008", "--out-dir", dir.string()});
    EXPECT_EQ(r.code, 2) << r.err;
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, FlagsOverrideConfig) {
    const auto dir = test_util::scratch_dir("cli_override");
    ASSERT_EQ(cli({"analyze", "--config", cfg("group_periods.cfg"), "--out-dir", dir.string(), "--alpha", "0.1"}).code, 0);
    const auto j = nlohmann::json::parse(read_text_file(dir / "bracket_report.json"));
    EXPECT_EQ(j["alpha"].get<double>(), 0.1);
    EXPECT_NEAR(j["minmax_ci"]["level"].get<double>(), 0.9, 1e-12);
}

TEST(Cli, PlaceboAndDiagnoseOutputs) {
    const auto dir = test_util::scratch_dir("cli_placebo");
    auto r = cli({"placebo", "--config", cfg("region_placebo.cfg"), "--out-dir", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"placebo_results.csv", "placebo_lc.csv", "placebo_uc.csv", "placebo_report.json",
                          "placebo_hist.svg"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    const auto svg = read_text_file(dir / "placebo_hist.svg");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);

    r = cli({"diagnose", "--config", cfg("region_diagnose.cfg"), "--out-dir", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(read_text_file(dir / "pattern_tests.json"));
    ASSERT_EQ(j["tests"].size(), 2u);
    for (const auto& t : j["tests"]) EXPECT_FALSE(t["evidence"].get<bool>());
    const auto trends = read_text_file(dir / "relative_trends.svg");
    EXPECT_NE(trends.find("data-group=\"treated\""), std::string::npos);
    EXPECT_NE(trends.find("data-group=\"lower\""), std::string::npos);
    EXPECT_NE(trends.find("data-group=\"upper\""), std::string::npos);
    const auto csv = read_text_file(dir / "relative_trends.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 9 * 3);
}

TEST(Cli, SimulateSmall) {
    const auto dir = test_util::scratch_dir("cli_sim");
    const auto r = cli({"simulate", "--scenario", "convex_exponential", "--seed", "3", "--reps", "200",
                        "--coverage-reps", "100", "--out-dir", dir.string(), "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(read_text_file(dir / "mc_report.json"));
    EXPECT_EQ(j["report"]["reps"], 200);
    EXPECT_EQ(j["coverage"]["reps"], 100);
    EXPECT_TRUE(fs::exists(dir / "mc_report.csv"));
}
