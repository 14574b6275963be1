#include <cmath>
#include <fstream>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "bracket/config.hpp"
#include "bracket/errors.hpp"
#include "bracket/io.hpp"
#include "test_util.hpp"

using namespace bracket;

namespace {

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no exception";
    return Errc::InvariantViolation;
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(PanelCsv, ParsesOptionalColumns) {
    const auto p = parse_panel_csv_text(
        "unit,year,rate,se,deaths,population\n"
        "A,2000,1.5,0.2,,1000\n"
        "A,2001,2.5,,25,1000000\n"
        "B,2000,0,,,500\n");
    ASSERT_EQ(p.size(), 3u);
    EXPECT_EQ(*p.find("A", 2000)->se, 0.2);
    EXPECT_FALSE(p.find("A", 2000)->deaths.has_value());
    EXPECT_DOUBLE_EQ(*p.find("A", 2001)->se, std::sqrt(25.0) / 1e6 * 1e5);
    EXPECT_FALSE(p.find("B", 2000)->se.has_value());
    EXPECT_NO_THROW(parse_panel_csv_text("unit,year,rate,population\nA,2000,1,10\n"));
}

TEST(PanelCsv, Errors) {
    EXPECT_EQ(code_of([] { parse_panel_csv_text("unit,year,value,population\n"); }), Errc::SchemaError);
    EXPECT_EQ(code_of([] { parse_panel_csv_text("unit,year,rate,population\nA,x,1,10\n"); }), Errc::ParseError);
    EXPECT_EQ(code_of([] { parse_panel_csv_text("unit,year,rate,population\nA,2000,1\n"); }), Errc::ParseError);
    const auto msg = message_of([] { parse_panel_csv_text("unit,year,rate,population\nA,2000,1,10\nA,2001,-2,10\n", "f.csv"); });
    EXPECT_NE(msg.find("f.csv:3"), std::string::npos) << msg;
    EXPECT_EQ(code_of([] { parse_panel_csv("/nonexistent/panel.csv"); }), Errc::FileNotFound);
}

TEST(PanelCsv, RoundTrip) {
    std::mt19937_64 gen(61);
    std::uniform_real_distribution<double> rate(0.0, 100.0), se(0.0, 5.0);
    std::uniform_int_distribution<std::int64_t> pop(1, 40000000), deaths(0, 5000);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Observation> recs;
        for (int u = 0; u < 4; ++u) {
            for (int y = 1990; y < 2000; ++y) {
                Observation o;
                o.unit = "unit " + std::to_string(u);
                o.year = y;
                o.rate = rate(gen);
                if (gen() & 1) o.se = se(gen);
                if (gen() & 1) o.deaths = deaths(gen);
                o.population = pop(gen);
                recs.push_back(o);
            }
        }
        const auto panel = PanelDataset::from_records(recs);
        const auto again = parse_panel_csv_text(write_panel_csv(panel));
        EXPECT_EQ(panel.records(), again.records());
    }
}

TEST(PanelCsv, RefusesUnwritableUnitIds) {
    for (const char* bad : {"a,b", " lead", "trail "}) {
        const auto p = PanelDataset::from_records({test_util::obs(bad, 2000, 1.0, 0.1)});
        EXPECT_EQ(code_of([&] { write_panel_csv(p); }), Errc::InvalidPanel) << bad;
    }
}

TEST(AdjacencyCsv, ParseAndErrors) {
    const auto g = parse_adjacency_csv_text("unit_a,unit_b\nA,B\nB,C\n");
    EXPECT_EQ(g.edge_count(), 2u);
    EXPECT_EQ(code_of([] { parse_adjacency_csv_text("a,b\n"); }), Errc::SchemaError);
    EXPECT_EQ(code_of([] { parse_adjacency_csv_text("unit_a,unit_b\nA\n"); }), Errc::ParseError);
}

TEST(Files, AtomicWriteAndRead) {
    const auto dir = test_util::scratch_dir("io");
    write_file_atomic(dir / "x.txt", "hello\n");
    write_file_atomic(dir / "x.txt", "again\n");
    EXPECT_EQ(read_text_file(dir / "x.txt"), "again\n");
    EXPECT_EQ(code_of([&] { write_file_atomic(dir / "missing" / "x.txt", "x"); }), Errc::IoError);
}

TEST(Format, FixedAndRoundtrip) {
    EXPECT_EQ(format_fixed(1.25, 1), "1.2");
    EXPECT_EQ(format_fixed(-0.04, 1), "0.0");
    EXPECT_EQ(format_fixed(0.8999999999998276, 1), "0.9");
    EXPECT_EQ(std::stod(format_roundtrip(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Config, Grammar) {
    const auto c = KeyValueConfig::parse(
        "# comment\n"
        "\n"
        "  treated =  Missouri  \n"
        "lower_controls = Iowa, Kansas\n"
        "before = 1999-2007\n"
        "alpha=0.1\n"
        "emit_plots = true\n");
    EXPECT_EQ(*c.get("treated"), "Missouri");
    EXPECT_EQ(*c.get_list("lower_controls"), (std::vector<std::string>{"Iowa", "Kansas"}));
    EXPECT_EQ(*c.get_period("before"), (PeriodRange{1999, 2007}));
    EXPECT_EQ(*c.get_double("alpha"), 0.1);
    EXPECT_TRUE(*c.get_bool("emit_plots"));
    EXPECT_EQ(code_of([] { KeyValueConfig::parse("a = 1\na = 2\n"); }), Errc::ConfigError);
    EXPECT_EQ(code_of([] { KeyValueConfig::parse("no equals sign\n"); }), Errc::ConfigError);
    EXPECT_EQ(code_of([] { KeyValueConfig::parse("bad key! = 1\n"); }), Errc::ConfigError);
    EXPECT_EQ(code_of([] { KeyValueConfig::parse("x = abc\n").get_double("x"); }), Errc::ConfigError);
    EXPECT_EQ(code_of([] { KeyValueConfig::parse("x = yes\n").get_bool("x"); }), Errc::ConfigError);
}

TEST(Config, AnalysisResolution) {
    const auto dir = test_util::scratch_dir("cfg");
    std::ofstream(dir / "a.cfg") << "panel = data/p.csv\ntreated = T\ncandidates = neighbors\n"
                                    "after = 2008-2013\nreference.lower.pct_point = 17\n";
    auto kv = KeyValueConfig::load(dir / "a.cfg");
    auto c = resolve_analysis_config(kv);
    EXPECT_EQ(*c.panel_path, (dir / "data/p.csv").lexically_normal());
    EXPECT_TRUE(c.use_neighbors);
    EXPECT_EQ(c.after, (PeriodRange{2008, 2013}));
    EXPECT_EQ(c.before, (PeriodRange{1999, 2007}));
    EXPECT_EQ(c.split_year, 2003);
    ASSERT_EQ(c.references.size(), 1u);
    EXPECT_EQ(c.references[0].arm, "lower");
    kv.set("alpha", "0.01");
    EXPECT_EQ(resolve_analysis_config(kv).alpha, 0.01);
    kv.set("alpha", "1.5");
    EXPECT_EQ(code_of([&] { resolve_analysis_config(kv); }), Errc::ConfigError);

    EXPECT_EQ(code_of([] { resolve_analysis_config(KeyValueConfig::parse("lower_controls = A\n")); }),
              Errc::ConfigError);
    EXPECT_EQ(code_of([] { resolve_analysis_config(KeyValueConfig::parse("tretaed = A\n")); }),
              Errc::ConfigError);
}

TEST(Config, SimulationResolution) {
    EXPECT_EQ(code_of([] { resolve_simulation_config(KeyValueConfig::parse("scenario = additive\n")); }),
              Errc::ConfigError);
    const auto c = resolve_simulation_config(KeyValueConfig::parse(
        "scenario = linear_interaction\nseed = 5\nscenario.gamma = -0.25\nscenario.u_param = 0, 2, 4\n"));
    EXPECT_EQ(c.seed, 5u);
    EXPECT_EQ(c.scenario.gamma, -0.25);
    EXPECT_EQ(c.scenario.u_param[2], 4.0);
    EXPECT_EQ(code_of([] { resolve_simulation_config(KeyValueConfig::parse("scenario = x\nseed = 1\n")); }),
              Errc::InvalidScenario);
}
