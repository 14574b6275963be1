#pragma once
// Key-value configuration files and their resolution into analysis settings.
//
// Grammar (one entry per line):
//   line   := blank | comment | entry
//   comment:= '#' <anything>
//   entry  := key '=' value
//   key    := [A-Za-z0-9_.-]+        (surrounding blanks ignored)
//   value  := <rest of line>         (surrounding blanks ignored)
// Lists are comma-separated; year ranges are written `1994-1998`. Relative
// paths are resolved against the directory holding the config file. A key may
// appear once.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bracket/simulation.hpp"
#include "bracket/types.hpp"

namespace bracket {

class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text, std::string_view source = "<memory>");
    static KeyValueConfig load(const std::filesystem::path& path);

    // Later values replace earlier ones (command-line flags over file values).
    void set(const std::string& key, const std::string& value);

    std::optional<std::string> get(const std::string& key) const;
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::vector<std::string> keys() const;
    const std::filesystem::path& base_dir() const { return base_dir_; }
    void set_base_dir(std::filesystem::path dir) { base_dir_ = std::move(dir); }

    // Typed accessors; throw ConfigError on malformed values.
    std::optional<double> get_double(const std::string& key) const;
    std::optional<long long> get_int(const std::string& key) const;
    std::optional<bool> get_bool(const std::string& key) const;
    std::optional<PeriodRange> get_period(const std::string& key) const;
    std::optional<std::vector<std::string>> get_list(const std::string& key) const;
    std::optional<std::filesystem::path> get_path(const std::string& key) const;

private:
    std::map<std::string, std::string> values_;
    std::filesystem::path base_dir_ = ".";
};

enum class OutputFormat { json, csv };

struct ReferenceValue {
    std::string arm;    // lower | upper | pooled
    std::string field;  // point | pct_point
    double value = 0.0;
};

struct AnalysisConfig {
    std::optional<std::filesystem::path> panel_path;
    std::optional<std::filesystem::path> adjacency_path;
    std::string treated;
    // Candidate controls, or neighbors of the treated unit when use_neighbors.
    std::vector<std::string> candidates;
    bool use_neighbors = false;
    std::optional<UnitSet> lower_controls;  // explicit groups skip construction
    std::optional<UnitSet> upper_controls;
    std::optional<UnitSet> pooled_controls;
    PeriodRange prestudy{1994, 1998};
    PeriodRange before{1999, 2007};
    PeriodRange after{2008, 2016};
    double alpha = 0.05;
    int split_year = 2003;
    UnitSet exclusions;
    std::optional<UnitSet> rank_subset;
    OutputFormat format = OutputFormat::json;
    bool emit_plots = false;
    std::filesystem::path out_dir = ".";
    double hist_bin_width = 0.5;
    std::vector<ReferenceValue> references;
    double reference_point_tol = 0.05;
    double reference_pct_tol = 0.5;
};

AnalysisConfig resolve_analysis_config(const KeyValueConfig& cfg);

struct SimulationConfig {
    Scenario scenario;
    int reps = 1000;
    int coverage_reps = 0;  // 0 disables the coverage experiment
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::optional<double> sc_tau;  // synthetic-control example
    long sc_draws = 1000000;
    OutputFormat format = OutputFormat::json;
    std::filesystem::path out_dir = ".";
};

// Requires `seed`. `scenario` names a builtin; `scenario.<field>` overrides it.
SimulationConfig resolve_simulation_config(const KeyValueConfig& cfg);

}  // namespace bracket
