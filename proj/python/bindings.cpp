#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bracket/app.hpp"
#include "bracket/bracketing.hpp"
#include "bracket/errors.hpp"
#include "bracket/estimation.hpp"
#include "bracket/io.hpp"
#include "bracket/normal.hpp"
#include "bracket/placebo.hpp"
#include "bracket/report.hpp"
#include "bracket/simulation.hpp"

namespace py = pybind11;
using namespace bracket;

namespace {

using Years = std::pair<int, int>;

PeriodRange period(const Years& y) { return PeriodRange::make(y.first, y.second); }

// Round-trips through the JSON text so Python gets plain dicts and lists.
py::object to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

StudyDesign make_design(const std::string& treated, const UnitSet& lower, const UnitSet& upper,
                        const Years& prestudy, const Years& before, const Years& after) {
    StudyDesign d;
    d.treated = treated;
    d.lower_controls = lower;
    d.upper_controls = upper;
    d.prestudy = period(prestudy);
    d.before = period(before);
    d.after = period(after);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bracketed difference-in-differences estimation";

    // Held for the life of the process; never destroyed at interpreter exit.
    static PyObject* exc = py::exception<Error>(m, "BracketError", PyExc_RuntimeError).release().ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object inst = py::reinterpret_borrow<py::object>(exc)(std::string(e.error_class()) + ": " + e.what());
            inst.attr("error_class") = std::string(e.error_class());
            PyErr_SetObject(exc, inst.ptr());
        }
    });

    py::class_<PanelDataset>(m, "Panel")
        .def_static("from_csv", [](const std::filesystem::path& p) { return parse_panel_csv(p); })
        .def_static("from_csv_text", [](const std::string& t) { return parse_panel_csv_text(t); })
        .def("units", &PanelDataset::units)
        .def("to_csv", &write_panel_csv)
        .def("__len__", &PanelDataset::size);

    m.def("normal_quantile", &normal_quantile, py::arg("p"));
    m.def("bracket_bounds", [](double lc, double uc) {
        auto b = bracket_bounds(lc, uc);
        return std::make_pair(b.lo, b.hi);
    });
    m.def(
        "minmax_ci",
        [](std::pair<double, double> lc, std::pair<double, double> uc, double level) {
            auto ci = minmax_ci({lc.first, lc.second, level}, {uc.first, uc.second, level});
            return std::make_pair(ci.lower, ci.upper);
        },
        py::arg("ci_lc"), py::arg("ci_uc"), py::arg("level") = 0.95);

    m.def(
        "construct_control_groups",
        [](const PanelDataset& panel, const std::string& treated, const UnitSet& candidates,
           const Years& prestudy) {
            auto g = construct_control_groups(panel, treated, candidates, period(prestudy));
            py::dict d;
            d["lower"] = g.lower;
            d["upper"] = g.upper;
            d["tied"] = g.tied;
            d["treated_prestudy_mean"] = g.treated_prestudy_mean;
            d["candidate_means"] = g.candidate_means;
            return d;
        },
        py::arg("panel"), py::arg("treated"), py::arg("candidates"),
        py::arg("prestudy") = Years{1994, 1998});

    m.def(
        "analyze",
        [](const PanelDataset& panel, const std::string& treated, const UnitSet& lower,
           const UnitSet& upper, const Years& prestudy, const Years& before, const Years& after,
           double alpha, std::optional<UnitSet> pooled, std::optional<int> split_year) {
            AnalysisContext ctx;
            ctx.design = make_design(treated, lower, upper, prestudy, before, after);
            ctx.alpha = alpha;
            ctx.panel_source = "<python>";
            AnalysisOptions opts;
            opts.pooled_controls = pooled;
            opts.split_year = split_year;
            const auto report = full_analysis(panel, ctx.design, alpha, opts);
            return to_py(bracket_report_json(report, ctx));
        },
        py::arg("panel"), py::arg("treated"), py::arg("lower"), py::arg("upper"),
        py::arg("prestudy") = Years{1994, 1998}, py::arg("before") = Years{1999, 2007},
        py::arg("after") = Years{2008, 2016}, py::arg("alpha") = 0.05, py::arg("pooled") = py::none(),
        py::arg("split_year") = py::none());

    m.def(
        "placebo",
        [](const PanelDataset& panel, const std::filesystem::path& adjacency, const Years& prestudy,
           const Years& before, const Years& after, const UnitSet& exclusions) {
            const auto graph = parse_adjacency_csv(adjacency);
            const auto results = run_placebo_study(panel, graph, period(prestudy), period(before),
                                                   period(after), exclusions);
            py::list out;
            for (const auto& r : results) {
                py::dict d;
                d["unit"] = r.unit;
                d["beta_lc"] = r.beta_lc;
                d["beta_uc"] = r.beta_uc;
                d["excluded_reason"] =
                    r.excluded_reason ? py::object(py::str(std::string(to_string(*r.excluded_reason))))
                                      : py::object(py::none());
                d["lower"] = r.lower;
                d["upper"] = r.upper;
                out.append(d);
            }
            return out;
        },
        py::arg("panel"), py::arg("adjacency"), py::arg("prestudy") = Years{1994, 1998},
        py::arg("before") = Years{1999, 2007}, py::arg("after") = Years{2008, 2016},
        py::arg("exclusions") = UnitSet{});

    m.def("scenario_names", &builtin_scenario_names);
    m.def(
        "simulate",
        [](const std::string& scenario, int reps, std::uint64_t seed) {
            const Scenario s = builtin_scenario(scenario);
            const McReport r = s.time_varying ? time_varying_scenario_check(s, reps, seed)
                                              : verify_bracketing(s, reps, seed);
            return to_py(to_json(r));
        },
        py::arg("scenario"), py::arg("reps"), py::arg("seed"));
    m.def(
        "coverage",
        [](const std::string& scenario, int reps, double alpha, std::uint64_t seed) {
            return to_py(to_json(coverage_experiment(builtin_scenario(scenario), reps, alpha, seed)));
        },
        py::arg("scenario"), py::arg("reps"), py::arg("alpha") = 0.05, py::arg("seed"));
    m.def(
        "synthetic_control",
        [](double tau, bool analytic, long draws, std::uint64_t seed) {
            return to_py(to_json(synthetic_control_comparison(tau, analytic, draws, seed)));
        },
        py::arg("tau"), py::arg("analytic") = true, py::arg("draws") = 0, py::arg("seed") = 0);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<std::string> argv{"bracket"};
            argv.insert(argv.end(), args.begin(), args.end());
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = run_cli(argv, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
