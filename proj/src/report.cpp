#include "bracket/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "bracket/errors.hpp"
#include "bracket/io.hpp"

namespace bracket {

using nlohmann::json;

namespace {

void check_finite(const json& j, const std::string& path) {
    if (j.is_number_float()) {
        if (!std::isfinite(j.get<double>())) {
            throw Error(Errc::InvariantViolation, "non-finite value at " + path);
        }
    } else if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) check_finite(it.value(), path + "." + it.key());
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) check_finite(j[i], path + "[" + std::to_string(i) + "]");
    }
}

json to_json(const PeriodSummary& s) {
    json j{{"mean", s.mean}, {"total_weight", s.total_weight}};
    j["se"] = s.se ? json(*s.se) : json(nullptr);
    return j;
}

json to_json(const ArmSummaries& c) {
    return json{{"treated_before", to_json(c.treated_before)},
                {"treated_after", to_json(c.treated_after)},
                {"control_before", to_json(c.control_before)},
                {"control_after", to_json(c.control_after)}};
}

json to_json(const PeriodRange& p) { return json{{"start_year", p.start_year}, {"end_year", p.end_year}}; }

json to_json(const DiffWithCi& d) {
    return json{{"point", d.point}, {"se", d.se}, {"ci", to_json(d.ci)}};
}

std::string f6(double v) { return format_fixed(v, 6); }
std::string f1(double v) { return format_fixed(v, 1); }
std::string pct0(double v) { return format_fixed(v, 0) + "%"; }

std::string csv_optional(const std::optional<double>& v) { return v ? f6(*v) : ""; }

}  // namespace

std::string dump_json(const json& j) {
    check_finite(j, "$");
    return j.dump(2) + "\n";
}

json to_json(const ConfInterval& ci) {
    return json{{"lower", ci.lower}, {"upper", ci.upper}, {"level", ci.level}};
}

json to_json(const EffectEstimate& e) {
    return json{{"point", e.point},       {"se", e.se},         {"ci", to_json(e.ci)},
                {"pct_point", e.pct_point}, {"pct_ci", to_json(e.pct_ci)},
                {"pct_se_delta", e.pct_se}, {"denom", e.denom}};
}

json to_json(const PatternTestReport& p) {
    return json{{"pattern", std::string(to_string(p.pattern))},
                {"split_year", p.split_year},
                {"p_a", p.p_a},
                {"p_b", p.p_b},
                {"iu_pvalue", p.iu_pvalue},
                {"evidence", p.evidence}};
}

json to_json(const McReport& r) {
    json j{{"scenario", r.scenario},
           {"reps", r.reps},
           {"beta", r.beta},
           {"mean_beta_lc", r.mean_beta_lc},
           {"mcse_lc", r.mcse_lc},
           {"mean_beta_uc", r.mean_beta_uc},
           {"mcse_uc", r.mcse_uc},
           {"expected_beta_lc", r.expected.theta_lc},
           {"expected_beta_uc", r.expected.theta_uc},
           {"bracket_holds", r.bracket_holds},
           {"assumption_violations", r.assumption_violations}};
    j["coverage"] = r.coverage ? json(*r.coverage) : json(nullptr);
    j["coverage_mcse"] = r.coverage_mcse ? json(*r.coverage_mcse) : json(nullptr);
    return j;
}

json to_json(const CoverageReport& r) {
    return json{{"reps", r.reps}, {"alpha", r.alpha}, {"coverage", r.coverage}, {"mcse", r.mcse}};
}

json to_json(const SyntheticControlComparison& c) {
    return json{{"tau", c.tau},
                {"mode", c.analytic ? "analytic" : "monte_carlo"},
                {"draws", c.draws},
                {"w_lower", c.w_lower},
                {"w_upper", c.w_upper},
                {"synthetic_before_mean", c.synthetic_before_mean},
                {"synthetic_after_mean", c.synthetic_after_mean},
                {"counterfactual_after_mean", c.counterfactual_after_mean},
                {"bias", c.bias},
                {"bias_sign", c.bias > 0.0 ? "synthetic_above_counterfactual"
                                           : (c.bias < 0.0 ? "synthetic_below_counterfactual" : "zero")}};
}

std::vector<ReferenceCheck> check_references(const BracketReport& report,
                                             const std::vector<ReferenceValue>& refs,
                                             double point_tol, double pct_tol) {
    std::vector<ReferenceCheck> out;
    for (const auto& ref : refs) {
        const EffectEstimate* e = nullptr;
        if (ref.arm == "lower") e = &report.est_lower_ctrl;
        else if (ref.arm == "upper") e = &report.est_upper_ctrl;
        else if (ref.arm == "pooled" && report.est_pooled) e = &*report.est_pooled;
        if (e == nullptr) continue;
        ReferenceCheck c;
        c.arm = ref.arm;
        c.field = ref.field;
        c.reference = ref.value;
        c.computed = ref.field == "point" ? e->point : e->pct_point;
        c.tolerance = ref.field == "point" ? point_tol : pct_tol;
        c.agrees = std::abs(c.computed - c.reference) <= c.tolerance + 1e-12;
        out.push_back(c);
    }
    return out;
}

json bracket_report_json(const BracketReport& r, const AnalysisContext& ctx) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "bracket_report";
    j["panel"] = ctx.panel_source;
    j["alpha"] = ctx.alpha;
    j["design"] = json{{"treated", ctx.design.treated},
                       {"lower_controls", ctx.design.lower_controls},
                       {"upper_controls", ctx.design.upper_controls},
                       {"prestudy", to_json(ctx.design.prestudy)},
                       {"before", to_json(ctx.design.before)},
                       {"after", to_json(ctx.design.after)}};
    if (ctx.construction) {
        json means = json::object();
        for (const auto& [u, m] : ctx.construction->candidate_means) means[u] = m;
        j["construction"] = json{{"treated_prestudy_mean", ctx.construction->treated_prestudy_mean},
                                 {"candidate_prestudy_means", means},
                                 {"tied", ctx.construction->tied}};
    } else {
        j["construction"] = nullptr;
    }
    j["est_lower_ctrl"] = to_json(r.est_lower_ctrl);
    j["est_upper_ctrl"] = to_json(r.est_upper_ctrl);
    j["cells_lower_ctrl"] = to_json(r.lower_cells);
    j["cells_upper_ctrl"] = to_json(r.upper_cells);
    j["bracket"] = json::array({r.bracket_lo, r.bracket_hi});
    j["minmax_ci"] = to_json(r.minmax_ci);
    j["minmax_pct_ci"] = to_json(r.minmax_pct_ci);
    j["ordering"] = json{{"period", to_json(r.ordering.period)},
                         {"diff_uc_minus_t", to_json(r.ordering.diff_uc_minus_t)},
                         {"diff_t_minus_lc", to_json(r.ordering.diff_t_minus_lc)},
                         {"ordered", r.ordering.ordered},
                         {"significant", r.ordering.significant}};
    if (r.est_pooled) {
        j["est_pooled"] = to_json(*r.est_pooled);
        j["est_pooled"]["assumes_parallel_trends"] = true;
        j["cells_pooled"] = to_json(*r.pooled_cells);
    } else {
        j["est_pooled"] = nullptr;
    }
    j["diagnostics"] = json::array();
    for (const auto& d : r.diagnostics) j["diagnostics"].push_back(to_json(d));
    j["reference_checks"] = json::array();
    for (const auto& c : ctx.reference_checks) {
        j["reference_checks"].push_back(json{{"arm", c.arm},
                                             {"field", c.field},
                                             {"computed", c.computed},
                                             {"reference", c.reference},
                                             {"tolerance", c.tolerance},
                                             {"agrees", c.agrees}});
    }
    return j;
}

std::string bracket_report_csv(const BracketReport& r) {
    std::string out =
        "arm,point,se,ci_lower,ci_upper,pct_point,pct_ci_lower,pct_ci_upper,pct_se_delta,denom\n";
    auto row = [&](const char* arm, const EffectEstimate& e) {
        out += std::string(arm) + "," + f6(e.point) + "," + f6(e.se) + "," + f6(e.ci.lower) + "," +
               f6(e.ci.upper) + "," + f6(e.pct_point) + "," + f6(e.pct_ci.lower) + "," +
               f6(e.pct_ci.upper) + "," + f6(e.pct_se) + "," + f6(e.denom) + "\n";
    };
    if (r.est_pooled) row("pooled", *r.est_pooled);
    row("upper", r.est_upper_ctrl);
    row("lower", r.est_lower_ctrl);
    out += "bracket," + f6(r.bracket_lo) + ",," + f6(r.minmax_ci.lower) + "," + f6(r.minmax_ci.upper) +
           ",," + f6(r.minmax_pct_ci.lower) + "," + f6(r.minmax_pct_ci.upper) + ",,\n";
    return out;
}

std::string bracket_summary_text(const BracketReport& r, const AnalysisContext& ctx) {
    std::ostringstream s;
    const auto& d = ctx.design;
    const int level = static_cast<int>(std::lround(100.0 * (1.0 - ctx.alpha)));
    auto join = [](const UnitSet& u) {
        std::string out;
        for (const auto& x : u) out += (out.empty() ? "" : ", ") + x;
        return out;
    };
    s << "Treated: " << d.treated << "\n"
      << "Periods: prestudy " << d.prestudy.to_string() << ", before " << d.before.to_string()
      << ", after " << d.after.to_string() << "\n"
      << "Lower controls: " << join(d.lower_controls) << "\n"
      << "Upper controls: " << join(d.upper_controls) << "\n\n";
    s << "Control group    Estimate  " << level << "% CI         % change  " << level << "% CI\n";
    auto row = [&](const char* name, const EffectEstimate& e) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-15s  %8s  [%s, %s]  %8s  [%s, %s]\n", name,
                      f1(e.point).c_str(), f1(e.ci.lower).c_str(), f1(e.ci.upper).c_str(),
                      pct0(e.pct_point).c_str(), pct0(e.pct_ci.lower).c_str(),
                      pct0(e.pct_ci.upper).c_str());
        s << buf;
    };
    if (r.est_pooled) row("All controls*", *r.est_pooled);
    row("Upper controls", r.est_upper_ctrl);
    row("Lower controls", r.est_lower_ctrl);
    if (r.est_pooled) s << "* assumes parallel trends\n";
    s << "\nBracket: [" << f1(r.bracket_lo) << ", " << f1(r.bracket_hi) << "]  ("
      << pct0(std::min(r.est_lower_ctrl.pct_point, r.est_upper_ctrl.pct_point)) << " to "
      << pct0(std::max(r.est_lower_ctrl.pct_point, r.est_upper_ctrl.pct_point)) << ")\n";
    s << "Min-max " << level << "% CI: [" << f1(r.minmax_ci.lower) << ", " << f1(r.minmax_ci.upper)
      << "]  ([" << pct0(r.minmax_pct_ci.lower) << ", " << pct0(r.minmax_pct_ci.upper) << "])\n";
    const auto& o = r.ordering;
    s << "\nOrdering over " << o.period.to_string() << ": upper - treated " << f1(o.diff_uc_minus_t.point)
      << " [" << f1(o.diff_uc_minus_t.ci.lower) << ", " << f1(o.diff_uc_minus_t.ci.upper) << "], "
      << "treated - lower " << f1(o.diff_t_minus_lc.point) << " [" << f1(o.diff_t_minus_lc.ci.lower)
      << ", " << f1(o.diff_t_minus_lc.ci.upper) << "]"
      << (o.ordered ? "" : "  ORDERING VIOLATION") << "\n";
    for (const auto& p : r.diagnostics) {
        s << "Pattern (" << to_string(p.pattern) << ") test, split " << p.split_year
          << ": p_a=" << format_fixed(p.p_a, 3) << " p_b=" << format_fixed(p.p_b, 3)
          << " evidence=" << (p.evidence ? "yes" : "no") << "\n";
    }
    for (const auto& c : ctx.reference_checks) {
        if (!c.agrees) {
            s << "Reference mismatch: " << c.arm << " " << c.field << " computed "
              << format_fixed(c.computed, 1) << " vs reference " << format_fixed(c.reference, 1) << "\n";
        }
    }
    return s.str();
}

std::string placebo_results_csv(const std::vector<PlaceboResult>& results) {
    std::string out = "unit,beta_lc,beta_uc,excluded_reason,n_lower,n_upper\n";
    for (const auto& r : results) {
        out += r.unit + "," + csv_optional(r.beta_lc) + "," + csv_optional(r.beta_uc) + ",";
        if (r.excluded_reason) out += std::string(to_string(*r.excluded_reason));
        out += "," + std::to_string(r.lower.size()) + "," + std::to_string(r.upper.size()) + "\n";
    }
    return out;
}

std::string histogram_csv(const std::vector<HistogramBin>& bins) {
    std::string out = "bin_lower,bin_upper,count\n";
    for (const auto& b : bins) out += f6(b.lower) + "," + f6(b.upper) + "," + std::to_string(b.count) + "\n";
    return out;
}

json placebo_report_json(const std::vector<PlaceboResult>& results,
                         const std::optional<RankResult>& rank_lc,
                         const std::optional<RankResult>& rank_uc, const UnitId& treated) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "placebo_report";
    j["treated"] = treated;
    j["results"] = json::array();
    std::size_t n_lc = 0, n_uc = 0;
    for (const auto& r : results) {
        json e{{"unit", r.unit}, {"lower", r.lower}, {"upper", r.upper}};
        e["beta_lc"] = r.beta_lc ? json(*r.beta_lc) : json(nullptr);
        e["beta_uc"] = r.beta_uc ? json(*r.beta_uc) : json(nullptr);
        e["excluded_reason"] =
            r.excluded_reason ? json(std::string(to_string(*r.excluded_reason))) : json(nullptr);
        n_lc += r.beta_lc ? 1 : 0;
        n_uc += r.beta_uc ? 1 : 0;
        j["results"].push_back(e);
    }
    j["n_with_lc"] = n_lc;
    j["n_with_uc"] = n_uc;
    auto rank_json = [](const std::optional<RankResult>& r) -> json {
        if (!r) return nullptr;
        return json{{"estimate", r->estimate},
                    {"n_total", r->n_total},
                    {"n_strictly_greater", r->n_strictly_greater},
                    {"rank", r->rank},
                    {"greater_units", r->greater_units}};
    };
    j["rank_lc"] = rank_json(rank_lc);
    j["rank_uc"] = rank_json(rank_uc);
    return j;
}

namespace {

std::string svg_num(double v) { return format_fixed(v, 2); }

void svg_histogram_panel(std::ostringstream& s, const std::vector<HistogramBin>& bins,
                         std::optional<double> marker, double x0, const char* title) {
    const double w = 360.0, h = 240.0, top = 40.0;
    s << "  <g transform=\"translate(" << svg_num(x0) << ",0)\">\n";
    s << "    <text x=\"" << svg_num(w / 2) << "\" y=\"24\" text-anchor=\"middle\">" << title << "</text>\n";
    s << "    <line x1=\"0\" y1=\"" << svg_num(top + h) << "\" x2=\"" << svg_num(w) << "\" y2=\""
      << svg_num(top + h) << "\" stroke=\"black\"/>\n";
    if (!bins.empty()) {
        double lo = bins.front().lower, hi = bins.back().upper;
        if (marker) {
            lo = std::min(lo, *marker);
            hi = std::max(hi, *marker);
        }
        std::size_t max_count = 1;
        for (const auto& b : bins) max_count = std::max(max_count, b.count);
        auto sx = [&](double x) { return (x - lo) / (hi - lo) * w; };
        for (const auto& b : bins) {
            const double bh = h * static_cast<double>(b.count) / static_cast<double>(max_count);
            s << "    <rect x=\"" << svg_num(sx(b.lower)) << "\" y=\"" << svg_num(top + h - bh)
              << "\" width=\"" << svg_num(sx(b.upper) - sx(b.lower)) << "\" height=\"" << svg_num(bh)
              << "\" fill=\"#9ab\" stroke=\"black\"/>\n";
        }
        if (marker) {
            s << "    <line class=\"marker\" x1=\"" << svg_num(sx(*marker)) << "\" y1=\"" << svg_num(top)
              << "\" x2=\"" << svg_num(sx(*marker)) << "\" y2=\"" << svg_num(top + h)
              << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
        }
        s << "    <text x=\"0\" y=\"" << svg_num(top + h + 18) << "\">" << format_fixed(lo, 2) << "</text>\n";
        s << "    <text x=\"" << svg_num(w) << "\" y=\"" << svg_num(top + h + 18)
          << "\" text-anchor=\"end\">" << format_fixed(hi, 2) << "</text>\n";
    }
    s << "  </g>\n";
}

}  // namespace

std::string placebo_histogram_svg(const std::vector<HistogramBin>& lc,
                                  const std::vector<HistogramBin>& uc,
                                  std::optional<double> marker_lc, std::optional<double> marker_uc) {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"310\" "
         "font-family=\"sans-serif\" font-size=\"12\">\n";
    svg_histogram_panel(s, lc, marker_lc, 20.0, "Placebo estimates, lower controls");
    svg_histogram_panel(s, uc, marker_uc, 420.0, "Placebo estimates, upper controls");
    s << "</svg>\n";
    return s.str();
}

std::string trends_csv(const std::vector<TrendRow>& rows) {
    std::string out = "start_year,end_year,group,mean,ci_lower,ci_upper\n";
    for (const auto& r : rows) {
        out += std::to_string(r.period.start_year) + "," + std::to_string(r.period.end_year) + "," +
               r.group + "," + f6(r.mean) + "," + csv_optional(r.ci_lower) + "," +
               csv_optional(r.ci_upper) + "\n";
    }
    return out;
}

std::string trends_svg(const std::vector<TrendRow>& rows, const std::string& title) {
    const double left = 60, top = 40, w = 600, h = 300;
    std::map<std::string, std::vector<const TrendRow*>> series;
    double ymin = 0, ymax = 1;
    bool first = true;
    double xmin = 0, xmax = 1;
    for (const auto& r : rows) {
        series[r.group].push_back(&r);
        const double lo = r.ci_lower.value_or(r.mean), hi = r.ci_upper.value_or(r.mean);
        const double mid = 0.5 * (r.period.start_year + r.period.end_year);
        if (first) {
            ymin = lo, ymax = hi, xmin = mid, xmax = mid;
            first = false;
        }
        ymin = std::min(ymin, lo), ymax = std::max(ymax, hi);
        xmin = std::min(xmin, mid), xmax = std::max(xmax, mid);
    }
    if (ymax - ymin < 1e-9) ymax = ymin + 1.0;
    if (xmax - xmin < 1e-9) xmax = xmin + 1.0;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * w; };
    auto sy = [&](double y) { return top + h - (y - ymin) / (ymax - ymin) * h; };
    const std::map<std::string, std::string> colors{{"treated", "black"}, {"lower", "red"}, {"upper", "blue"}};

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"400\" "
         "font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "  <text x=\"" << svg_num(left + w / 2) << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n";
    s << "  <line x1=\"" << left << "\" y1=\"" << top + h << "\" x2=\"" << left + w << "\" y2=\"" << top + h
      << "\" stroke=\"black\"/>\n";
    s << "  <line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + h
      << "\" stroke=\"black\"/>\n";
    s << "  <text x=\"" << left - 6 << "\" y=\"" << svg_num(sy(ymin)) << "\" text-anchor=\"end\">"
      << format_fixed(ymin, 1) << "</text>\n";
    s << "  <text x=\"" << left - 6 << "\" y=\"" << svg_num(sy(ymax)) << "\" text-anchor=\"end\">"
      << format_fixed(ymax, 1) << "</text>\n";
    for (const auto& [group, pts] : series) {
        const std::string color = colors.count(group) ? colors.at(group) : "gray";
        s << "  <polyline class=\"series\" data-group=\"" << group << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-dasharray=\"6,4\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double x = 0.5 * (pts[i]->period.start_year + pts[i]->period.end_year);
            s << (i ? " " : "") << svg_num(sx(x)) << "," << svg_num(sy(pts[i]->mean));
        }
        s << "\"/>\n";
        for (const auto* p : pts) {
            if (!p->ci_lower) continue;
            const double x = sx(0.5 * (p->period.start_year + p->period.end_year));
            s << "  <line class=\"ci\" x1=\"" << svg_num(x) << "\" y1=\"" << svg_num(sy(*p->ci_lower))
              << "\" x2=\"" << svg_num(x) << "\" y2=\"" << svg_num(sy(*p->ci_upper)) << "\" stroke=\""
              << color << "\"/>\n";
        }
    }
    s << "  <text x=\"" << left << "\" y=\"" << top + h + 18 << "\">" << format_fixed(xmin, 0) << "</text>\n";
    s << "  <text x=\"" << left + w << "\" y=\"" << top + h + 18 << "\" text-anchor=\"end\">"
      << format_fixed(xmax, 0) << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

std::string mc_report_csv(const McReport& r, const std::optional<CoverageReport>& cov) {
    std::string out =
        "scenario,reps,beta,mean_beta_lc,mcse_lc,mean_beta_uc,mcse_uc,expected_beta_lc,"
        "expected_beta_uc,bracket_holds,coverage,coverage_mcse\n";
    out += r.scenario + "," + std::to_string(r.reps) + "," + f6(r.beta) + "," + f6(r.mean_beta_lc) + "," +
           f6(r.mcse_lc) + "," + f6(r.mean_beta_uc) + "," + f6(r.mcse_uc) + "," +
           f6(r.expected.theta_lc) + "," + f6(r.expected.theta_uc) + "," +
           (r.bracket_holds ? "true" : "false") + "," + (cov ? f6(cov->coverage) : "") + "," +
           (cov ? f6(cov->mcse) : "") + "\n";
    return out;
}

}  // namespace bracket
