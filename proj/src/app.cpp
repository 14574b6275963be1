#include "bracket/app.hpp"

#include <filesystem>
#include <ostream>

#include "CLI11.hpp"

#include "bracket/diagnostics.hpp"
#include "bracket/errors.hpp"
#include "bracket/io.hpp"
#include "bracket/report.hpp"
#include "bracket/simulation.hpp"

namespace bracket {

namespace fs = std::filesystem;

StudyDesign resolve_design(const AnalysisConfig& cfg, const PanelDataset& panel,
                           const std::optional<AdjacencyGraph>& adjacency,
                           std::optional<ControlGroups>* construction) {
    if (cfg.treated.empty()) throw Error(Errc::ConfigError, "no treated unit configured");
    StudyDesign d;
    d.treated = cfg.treated;
    d.prestudy = cfg.prestudy;
    d.before = cfg.before;
    d.after = cfg.after;
    if (cfg.lower_controls) {
        d.lower_controls = *cfg.lower_controls;
        d.upper_controls = *cfg.upper_controls;
        return d;
    }
    UnitSet candidates;
    if (cfg.use_neighbors) {
        if (!adjacency) throw Error(Errc::ConfigError, "candidates = neighbors needs an adjacency file");
        candidates = adjacency->neighbors(cfg.treated);
    } else if (!cfg.candidates.empty()) {
        candidates = UnitSet(cfg.candidates.begin(), cfg.candidates.end());
    } else {
        for (const auto& u : panel.units()) candidates.insert(u);
    }
    for (const auto& x : cfg.exclusions) candidates.erase(x);
    candidates.erase(cfg.treated);
    ControlGroups g = construct_control_groups(panel, cfg.treated, candidates, cfg.prestudy);
    d.lower_controls = g.lower;
    d.upper_controls = g.upper;
    if (construction) *construction = std::move(g);
    return d;
}

namespace {

struct CommonFlags {
    std::string config;
    std::string out_dir;
    std::optional<double> alpha;
    std::string format;
    bool emit_plots = false;
    std::string panel;
    std::string adjacency;
    std::string treated;
    std::string candidates;
    std::string lower;
    std::string upper;
    std::string prestudy;
    std::string before;
    std::string after;
    std::optional<int> split_year;
    std::string exclusions;
    std::optional<double> bin_width;
    // simulate
    std::string scenario;
    std::optional<long long> seed;
    std::optional<long long> reps;
    std::optional<long long> coverage_reps;
    std::optional<double> sc_tau;
    std::optional<long long> sc_draws;
};

KeyValueConfig merged_config(const CommonFlags& f) {
    KeyValueConfig cfg;
    if (!f.config.empty()) cfg = KeyValueConfig::load(f.config);
    auto set_if = [&](const char* key, const std::string& v) {
        if (!v.empty()) cfg.set(key, v);
    };
    auto set_path = [&](const char* key, const std::string& v) {
        // Flag paths are relative to the working directory, not the config file.
        if (!v.empty()) cfg.set(key, fs::absolute(v).lexically_normal().string());
    };
    set_path("out_dir", f.out_dir);
    set_path("panel", f.panel);
    set_path("adjacency", f.adjacency);
    set_if("format", f.format);
    set_if("treated", f.treated);
    set_if("candidates", f.candidates);
    set_if("lower_controls", f.lower);
    set_if("upper_controls", f.upper);
    set_if("prestudy", f.prestudy);
    set_if("before", f.before);
    set_if("after", f.after);
    set_if("exclusions", f.exclusions);
    set_if("scenario", f.scenario);
    if (f.emit_plots) cfg.set("emit_plots", "true");
    if (f.alpha) cfg.set("alpha", format_roundtrip(*f.alpha));
    if (f.split_year) cfg.set("split_year", std::to_string(*f.split_year));
    if (f.bin_width) cfg.set("hist_bin_width", format_roundtrip(*f.bin_width));
    if (f.seed) cfg.set("seed", std::to_string(*f.seed));
    if (f.reps) cfg.set("reps", std::to_string(*f.reps));
    if (f.coverage_reps) cfg.set("coverage_reps", std::to_string(*f.coverage_reps));
    if (f.sc_tau) cfg.set("sc.tau", format_roundtrip(*f.sc_tau));
    if (f.sc_draws) cfg.set("sc.draws", std::to_string(*f.sc_draws));
    return cfg;
}

PanelDataset load_panel(const AnalysisConfig& c) {
    if (!c.panel_path) throw Error(Errc::ConfigError, "no panel file configured");
    return parse_panel_csv(*c.panel_path);
}

std::optional<AdjacencyGraph> load_adjacency(const AnalysisConfig& c, bool required) {
    if (!c.adjacency_path) {
        if (required) throw Error(Errc::ConfigError, "no adjacency file configured");
        return std::nullopt;
    }
    return parse_adjacency_csv(*c.adjacency_path);
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

int cmd_analyze(const CommonFlags& f, std::ostream& out) {
    const AnalysisConfig c = resolve_analysis_config(merged_config(f));
    const PanelDataset panel = load_panel(c);
    const auto adjacency = load_adjacency(c, false);
    std::optional<ControlGroups> construction;
    const StudyDesign design = resolve_design(c, panel, adjacency, &construction);

    AnalysisOptions opts;
    opts.pooled_controls = c.pooled_controls;
    opts.split_year = c.split_year;
    const BracketReport report = full_analysis(panel, design, c.alpha, opts);

    AnalysisContext ctx;
    ctx.design = design;
    ctx.alpha = c.alpha;
    ctx.panel_source = c.panel_path->filename().string();
    ctx.construction = construction;
    ctx.reference_checks =
        check_references(report, c.references, c.reference_point_tol, c.reference_pct_tol);

    ensure_dir(c.out_dir);
    write_file_atomic(c.out_dir / "bracket_report.json", dump_json(bracket_report_json(report, ctx)));
    if (c.format == OutputFormat::csv) {
        write_file_atomic(c.out_dir / "bracket_report.csv", bracket_report_csv(report));
    }
    const std::string summary = bracket_summary_text(report, ctx);
    write_file_atomic(c.out_dir / "summary.txt", summary);
    if (c.emit_plots) {
        TrendTableOptions t;
        t.alpha = c.alpha;
        const auto rows = relative_trends_table(panel, design, {design.before.start_year, design.after.end_year}, t);
        write_file_atomic(c.out_dir / "trends.svg", trends_svg(rows, "Relative trends, before and after"));
    }
    out << summary;
    return kExitOk;
}

int cmd_placebo(const CommonFlags& f, std::ostream& out) {
    const AnalysisConfig c = resolve_analysis_config(merged_config(f));
    const auto adjacency = load_adjacency(c, true);
    const PanelDataset panel = load_panel(c);
    const auto results = run_placebo_study(panel, *adjacency, c.prestudy, c.before, c.after, c.exclusions);

    std::optional<RankResult> rank_lc, rank_uc;
    nlohmann::json extra = nlohmann::json::object();
    if (!c.treated.empty()) {
        auto safe_rank = [&](Arm arm, const std::optional<UnitSet>& subset) -> std::optional<RankResult> {
            try {
                return rank_effect(results, c.treated, arm, subset);
            } catch (const Error& e) {
                if (e.code() != Errc::ArmUnavailable) throw;
                return std::nullopt;
            }
        };
        rank_lc = safe_rank(Arm::lc, std::nullopt);
        rank_uc = safe_rank(Arm::uc, std::nullopt);
        if (c.rank_subset) {
            for (Arm arm : {Arm::lc, Arm::uc}) {
                auto r = safe_rank(arm, c.rank_subset);
                extra[std::string("rank_subset_") + std::string(to_string(arm))] =
                    r ? nlohmann::json{{"n_total", r->n_total},
                                       {"n_strictly_greater", r->n_strictly_greater},
                                       {"rank", r->rank},
                                       {"greater_units", r->greater_units}}
                      : nlohmann::json(nullptr);
            }
        }
    }

    const auto bins_lc = histogram_export(results, Arm::lc, c.hist_bin_width);
    const auto bins_uc = histogram_export(results, Arm::uc, c.hist_bin_width);
    nlohmann::json report = placebo_report_json(results, rank_lc, rank_uc, c.treated);
    for (auto it = extra.begin(); it != extra.end(); ++it) report[it.key()] = it.value();

    ensure_dir(c.out_dir);
    write_file_atomic(c.out_dir / "placebo_results.csv", placebo_results_csv(results));
    write_file_atomic(c.out_dir / "placebo_lc.csv", histogram_csv(bins_lc));
    write_file_atomic(c.out_dir / "placebo_uc.csv", histogram_csv(bins_uc));
    write_file_atomic(c.out_dir / "placebo_report.json", dump_json(report));
    if (c.emit_plots) {
        write_file_atomic(c.out_dir / "placebo_hist.svg",
                          placebo_histogram_svg(bins_lc, bins_uc,
                                                rank_lc ? std::optional(rank_lc->estimate) : std::nullopt,
                                                rank_uc ? std::optional(rank_uc->estimate) : std::nullopt));
    }
    out << "placebo: " << report["n_with_lc"].get<std::size_t>() << " units with lower-control estimates, "
        << report["n_with_uc"].get<std::size_t>() << " with upper-control estimates\n";
    if (rank_lc) out << c.treated << " lc rank " << rank_lc->rank << " of " << rank_lc->n_total << "\n";
    if (rank_uc) out << c.treated << " uc rank " << rank_uc->rank << " of " << rank_uc->n_total << "\n";
    return kExitOk;
}

int cmd_diagnose(const CommonFlags& f, std::ostream& out) {
    const AnalysisConfig c = resolve_analysis_config(merged_config(f));
    const PanelDataset panel = load_panel(c);
    const auto adjacency = load_adjacency(c, false);
    const StudyDesign design = resolve_design(c, panel, adjacency);

    const auto iii = pattern_test(panel, design, c.split_year, Pattern::iii, c.alpha);
    const auto iv = pattern_test(panel, design, c.split_year, Pattern::iv, c.alpha);
    TrendTableOptions t;
    t.alpha = c.alpha;
    const auto rows = relative_trends_table(panel, design, design.before, t);

    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "pattern_tests";
    j["alpha"] = c.alpha;
    j["treated"] = design.treated;
    j["lower_controls"] = design.lower_controls;
    j["upper_controls"] = design.upper_controls;
    j["tests"] = nlohmann::json::array({to_json(iii), to_json(iv)});

    ensure_dir(c.out_dir);
    write_file_atomic(c.out_dir / "pattern_tests.json", dump_json(j));
    write_file_atomic(c.out_dir / "relative_trends.csv", trends_csv(rows));
    if (c.emit_plots) {
        write_file_atomic(c.out_dir / "relative_trends.svg",
                          trends_svg(rows, "Relative trends in the before period"));
    }
    for (const auto& p : {iii, iv}) {
        out << "pattern (" << to_string(p.pattern) << "): p_a=" << format_fixed(p.p_a, 4)
            << " p_b=" << format_fixed(p.p_b, 4) << " evidence=" << (p.evidence ? "true" : "false") << "\n";
    }
    return kExitOk;
}

int cmd_simulate(const CommonFlags& f, std::ostream& out) {
    const SimulationConfig c = resolve_simulation_config(merged_config(f));
    McReport mc = c.scenario.time_varying ? time_varying_scenario_check(c.scenario, c.reps, c.seed)
                                          : verify_bracketing(c.scenario, c.reps, c.seed);
    std::optional<CoverageReport> cov;
    if (c.coverage_reps > 0) {
        cov = coverage_experiment(c.scenario, c.coverage_reps, c.alpha, derive_seed(c.seed, 1));
        mc.coverage = cov->coverage;
        mc.coverage_mcse = cov->mcse;
    }
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "mc_report";
    j["seed"] = c.seed;
    j["scenario"] = nlohmann::json{{"name", c.scenario.name},
                                   {"beta", c.scenario.beta},
                                   {"h", std::string(to_string(c.scenario.h))},
                                   {"u_family", std::string(to_string(c.scenario.u_family))},
                                   {"u_param", c.scenario.u_param},
                                   {"u_sd", c.scenario.u_sd},
                                   {"tau", c.scenario.tau},
                                   {"gamma", c.scenario.gamma},
                                   {"eps_sd", c.scenario.eps_sd},
                                   {"n_per_cell", c.scenario.n_per_cell}};
    if (c.scenario.time_varying) {
        j["scenario"]["delta_mean"] = c.scenario.time_varying->delta_mean;
        j["scenario"]["delta_sd"] = c.scenario.time_varying->delta_sd;
    }
    j["report"] = to_json(mc);
    j["coverage"] = cov ? to_json(*cov) : nlohmann::json(nullptr);
    if (c.sc_tau) {
        j["synthetic_control"] = nlohmann::json{
            {"analytic", to_json(synthetic_control_comparison(*c.sc_tau, true, 0, c.seed))},
            {"monte_carlo",
             to_json(synthetic_control_comparison(*c.sc_tau, false, c.sc_draws, derive_seed(c.seed, 2)))}};
    }
    ensure_dir(c.out_dir);
    const std::string text = dump_json(j);
    write_file_atomic(c.out_dir / "mc_report.json", text);
    if (c.format == OutputFormat::csv) write_file_atomic(c.out_dir / "mc_report.csv", mc_report_csv(mc, cov));
    out << text;
    return kExitOk;
}

int exit_code_for(Errc code) {
    switch (category(code)) {
        case ErrorCategory::Config: return kExitConfig;
        case ErrorCategory::Data: return kExitData;
        case ErrorCategory::Internal: return kExitInternal;
    }
    return kExitInternal;
}

void add_design_flags(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--panel", f.panel, "Panel CSV (unit,year,rate[,se][,deaths],population)");
    sub->add_option("--treated", f.treated, "Treated unit id");
    sub->add_option("--candidates", f.candidates, "Candidate controls (comma list) or 'neighbors'");
    sub->add_option("--lower", f.lower, "Explicit lower control group (comma list)");
    sub->add_option("--upper", f.upper, "Explicit upper control group (comma list)");
    sub->add_option("--prestudy", f.prestudy, "Pre-study years, e.g. 1994-1998");
    sub->add_option("--before", f.before, "Before-period years");
    sub->add_option("--after", f.after, "After-period years");
    sub->add_option("--adjacency", f.adjacency, "Adjacency CSV (unit_a,unit_b)");
    sub->add_option("--split-year", f.split_year, "First year of the second before-period part");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bracketed difference-in-differences for comparative interrupted time series"};
    app.require_subcommand(1);
    CommonFlags f;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "Key-value config file; flags override its values");
        sub->add_option("--out-dir", f.out_dir, "Output directory");
        sub->add_option("--alpha", f.alpha, "Significance level");
        sub->add_option("--format", f.format, "json or csv");
        sub->add_flag("--emit-plots", f.emit_plots, "Also write SVG plots");
    };
    auto* analyze = app.add_subcommand("analyze", "Bracketed DiD estimates and min-max CI");
    add_common(analyze);
    add_design_flags(analyze, f);
    auto* placebo = app.add_subcommand("placebo", "Placebo study over all units");
    add_common(placebo);
    add_design_flags(placebo, f);
    placebo->add_option("--exclusions", f.exclusions, "Units to exclude (comma list)");
    placebo->add_option("--bin-width", f.bin_width, "Histogram bin width");
    auto* diagnose = app.add_subcommand("diagnose", "Relative-trends pattern tests");
    add_common(diagnose);
    add_design_flags(diagnose, f);
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of the bracketing property");
    add_common(simulate);
    simulate->add_option("--scenario", f.scenario, "Builtin scenario name");
    simulate->add_option("--seed", f.seed, "Random seed (required)");
    simulate->add_option("--reps", f.reps, "Replications");
    simulate->add_option("--coverage-reps", f.coverage_reps, "Replications for min-max CI coverage");
    simulate->add_option("--sc-tau", f.sc_tau, "Run the synthetic-control example at this tau");
    simulate->add_option("--sc-draws", f.sc_draws, "Monte Carlo draws for the synthetic-control example");

    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: ConfigError: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (*analyze) return cmd_analyze(f, out);
        if (*placebo) return cmd_placebo(f, out);
        if (*diagnose) return cmd_diagnose(f, out);
        if (*simulate) return cmd_simulate(f, out);
    } catch (const Error& e) {
        err << "error: " << e.error_class() << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: InternalError: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}

}  // namespace bracket
