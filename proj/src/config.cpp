#include "bracket/config.hpp"

#include <algorithm>
#include <charconv>
#include <regex>

#include "bracket/errors.hpp"
#include "bracket/io.hpp"

namespace bracket {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool valid_key(const std::string& key) {
    static const std::regex re("[A-Za-z0-9_.-]+");
    return std::regex_match(key, re);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
    throw Error(Errc::ConfigError, "config key '" + key + "': expected " + what + ", got '" + value + "'");
}

UnitSet to_set(const std::vector<std::string>& v) { return UnitSet(v.begin(), v.end()); }


void reject_unknown(const KeyValueConfig& cfg, std::initializer_list<std::string_view> allowed) {
    for (const auto& k : cfg.keys()) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) throw Error(Errc::ConfigError, "unknown config key '" + k + "'");
    }
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string_view source) {
    KeyValueConfig cfg;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        const std::string where = std::string(source) + ":" + std::to_string(line_no);
        if (eq == std::string::npos) throw Error(Errc::ConfigError, where + ": expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (!valid_key(key)) throw Error(Errc::ConfigError, where + ": invalid key '" + key + "'");
        if (!cfg.values_.emplace(key, value).second) {
            throw Error(Errc::ConfigError, where + ": duplicate key '" + key + "'");
        }
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const Error&) {
        throw Error(Errc::ConfigError, "cannot read config " + path.string());
    }
    KeyValueConfig cfg = parse(text, path.string());
    cfg.base_dir_ = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
    return cfg;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    if (!valid_key(key)) throw Error(Errc::ConfigError, "invalid key '" + key + "'");
    values_[key] = value;
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> KeyValueConfig::keys() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : values_) out.push_back(k);
    return out;
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    double x{};
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), x);
    if (v->empty() || ec != std::errc{} || ptr != v->data() + v->size()) bad_value(key, *v, "a number");
    return x;
}

std::optional<long long> KeyValueConfig::get_int(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    long long x{};
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), x);
    if (v->empty() || ec != std::errc{} || ptr != v->data() + v->size()) bad_value(key, *v, "an integer");
    return x;
}

std::optional<bool> KeyValueConfig::get_bool(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    if (*v == "true") return true;
    if (*v == "false") return false;
    bad_value(key, *v, "true or false");
}

std::optional<PeriodRange> KeyValueConfig::get_period(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    static const std::regex re(R"(\s*(\d{1,4})\s*-\s*(\d{1,4})\s*)");
    std::smatch m;
    if (!std::regex_match(*v, m, re)) bad_value(key, *v, "a year range like 1999-2007");
    const int a = std::stoi(m[1].str());
    const int b = std::stoi(m[2].str());
    if (a > b) bad_value(key, *v, "start <= end");
    return PeriodRange{a, b};
}

std::optional<std::vector<std::string>> KeyValueConfig::get_list(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    std::vector<std::string> out;
    if (v->empty()) return out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = v->find(',', pos);
        std::string item = trim(std::string_view(*v).substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (item.empty()) bad_value(key, *v, "a comma-separated list without empty items");
        out.push_back(std::move(item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::optional<std::filesystem::path> KeyValueConfig::get_path(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    std::filesystem::path p(*v);
    if (p.is_relative()) p = base_dir_ / p;
    return p.lexically_normal();
}

AnalysisConfig resolve_analysis_config(const KeyValueConfig& cfg) {
    reject_unknown(cfg,
                   {"panel", "adjacency", "treated", "candidates", "lower_controls", "upper_controls",
                    "pooled_controls", "prestudy", "before", "after", "alpha", "split_year",
                    "exclusions", "rank_subset", "format", "emit_plots", "out_dir", "hist_bin_width",
                    "reference.point_tolerance", "reference.pct_tolerance", "reference.lower.point",
                    "reference.lower.pct_point", "reference.upper.point", "reference.upper.pct_point",
                    "reference.pooled.point", "reference.pooled.pct_point"});
    AnalysisConfig c;
    c.panel_path = cfg.get_path("panel");
    c.adjacency_path = cfg.get_path("adjacency");
    c.treated = cfg.get("treated").value_or("");
    if (auto cand = cfg.get("candidates")) {
        if (*cand == "neighbors") {
            c.use_neighbors = true;
        } else {
            c.candidates = *cfg.get_list("candidates");
        }
    }
    if (auto v = cfg.get_list("lower_controls")) c.lower_controls = to_set(*v);
    if (auto v = cfg.get_list("upper_controls")) c.upper_controls = to_set(*v);
    if (c.lower_controls.has_value() != c.upper_controls.has_value()) {
        throw Error(Errc::ConfigError, "lower_controls and upper_controls must be given together");
    }
    if (auto pooled = cfg.get("pooled_controls")) {
        if (*pooled == "none") {
            c.pooled_controls = UnitSet{};
        } else if (*pooled != "union") {
            c.pooled_controls = to_set(*cfg.get_list("pooled_controls"));
        }
    }
    if (auto p = cfg.get_period("prestudy")) c.prestudy = *p;
    if (auto p = cfg.get_period("before")) c.before = *p;
    if (auto p = cfg.get_period("after")) c.after = *p;
    if (auto a = cfg.get_double("alpha")) {
        if (!(*a > 0.0 && *a < 1.0)) bad_value("alpha", *cfg.get("alpha"), "a value in (0, 1)");
        c.alpha = *a;
    }
    if (auto s = cfg.get_int("split_year")) c.split_year = static_cast<int>(*s);
    if (auto v = cfg.get_list("exclusions")) c.exclusions = to_set(*v);
    if (auto v = cfg.get_list("rank_subset")) c.rank_subset = to_set(*v);
    if (auto f = cfg.get("format")) {
        if (*f == "json") c.format = OutputFormat::json;
        else if (*f == "csv") c.format = OutputFormat::csv;
        else bad_value("format", *f, "json or csv");
    }
    if (auto b = cfg.get_bool("emit_plots")) c.emit_plots = *b;
    if (auto o = cfg.get_path("out_dir")) c.out_dir = *o;
    if (auto w = cfg.get_double("hist_bin_width")) {
        if (!(*w > 0.0)) bad_value("hist_bin_width", *cfg.get("hist_bin_width"), "a positive width");
        c.hist_bin_width = *w;
    }
    if (auto t = cfg.get_double("reference.point_tolerance")) c.reference_point_tol = *t;
    if (auto t = cfg.get_double("reference.pct_tolerance")) c.reference_pct_tol = *t;
    for (const auto& arm : {"lower", "upper", "pooled"}) {
        for (const auto& field : {"point", "pct_point"}) {
            const std::string key = std::string("reference.") + arm + "." + field;
            if (auto v = cfg.get_double(key)) c.references.push_back({arm, field, *v});
        }
    }
    return c;
}

SimulationConfig resolve_simulation_config(const KeyValueConfig& cfg) {
    reject_unknown(cfg, {"scenario", "seed", "reps", "coverage_reps", "alpha", "sc.tau", "sc.draws",
                         "format", "out_dir", "emit_plots", "scenario.beta", "scenario.u_family",
                         "scenario.u_param", "scenario.u_sd", "scenario.h", "scenario.tau", "scenario.gamma",
                         "scenario.eps_sd", "scenario.n_per_cell", "scenario.delta_mean", "scenario.delta_sd"});
    SimulationConfig c;
    c.scenario = builtin_scenario(cfg.get("scenario").value_or("linear_interaction"));
    Scenario& s = c.scenario;
    auto triple = [&](const std::string& key) -> std::optional<std::array<double, 3>> {
        auto v = cfg.get_list(key);
        if (!v) return std::nullopt;
        if (v->size() != 3) bad_value(key, *cfg.get(key), "three comma-separated numbers");
        std::array<double, 3> out{};
        for (std::size_t i = 0; i < 3; ++i) {
            auto [ptr, ec] = std::from_chars((*v)[i].data(), (*v)[i].data() + (*v)[i].size(), out[i]);
            if (ec != std::errc{} || ptr != (*v)[i].data() + (*v)[i].size())
                bad_value(key, *cfg.get(key), "three comma-separated numbers");
        }
        return out;
    };
    if (auto v = cfg.get_double("scenario.beta")) s.beta = *v;
    if (auto v = cfg.get("scenario.u_family")) {
        if (*v == "normal") s.u_family = UFamily::normal;
        else if (*v == "exponential") s.u_family = UFamily::exponential;
        else bad_value("scenario.u_family", *v, "normal or exponential");
    }
    if (auto v = triple("scenario.u_param")) s.u_param = *v;
    if (auto v = cfg.get_double("scenario.u_sd")) s.u_sd = *v;
    if (auto v = cfg.get("scenario.h")) {
        if (*v == "additive") s.h = HFunction::additive;
        else if (*v == "linear_interaction") s.h = HFunction::linear_interaction;
        else if (*v == "convex_after") s.h = HFunction::convex_after;
        else bad_value("scenario.h", *v, "additive, linear_interaction or convex_after");
    }
    if (auto v = cfg.get_double("scenario.tau")) s.tau = *v;
    if (auto v = cfg.get_double("scenario.gamma")) s.gamma = *v;
    if (auto v = cfg.get_double("scenario.eps_sd")) s.eps_sd = *v;
    if (auto v = cfg.get_int("scenario.n_per_cell")) s.n_per_cell = static_cast<int>(*v);
    if (auto v = triple("scenario.delta_mean")) {
        if (!s.time_varying) s.time_varying = TimeVarying{};
        s.time_varying->delta_mean = *v;
    }
    if (auto v = cfg.get_double("scenario.delta_sd")) {
        if (!s.time_varying) s.time_varying = TimeVarying{};
        s.time_varying->delta_sd = *v;
    }
    s.validate();

    auto seed = cfg.get_int("seed");
    if (!seed) throw Error(Errc::ConfigError, "simulate requires an explicit seed");
    if (*seed < 0) bad_value("seed", *cfg.get("seed"), "a non-negative integer");
    c.seed = static_cast<std::uint64_t>(*seed);
    if (auto v = cfg.get_int("reps")) {
        if (*v < 1) bad_value("reps", *cfg.get("reps"), "reps >= 1");
        c.reps = static_cast<int>(*v);
    }
    if (auto v = cfg.get_int("coverage_reps")) {
        if (*v != 0 && *v < 100) bad_value("coverage_reps", *cfg.get("coverage_reps"), "0 or >= 100");
        c.coverage_reps = static_cast<int>(*v);
    }
    if (auto a = cfg.get_double("alpha")) {
        if (!(*a > 0.0 && *a < 1.0)) bad_value("alpha", *cfg.get("alpha"), "a value in (0, 1)");
        c.alpha = *a;
    }
    c.sc_tau = cfg.get_double("sc.tau");
    if (auto v = cfg.get_int("sc.draws")) c.sc_draws = static_cast<long>(*v);
    if (auto f = cfg.get("format")) {
        if (*f == "json") c.format = OutputFormat::json;
        else if (*f == "csv") c.format = OutputFormat::csv;
        else bad_value("format", *f, "json or csv");
    }
    if (auto o = cfg.get_path("out_dir")) c.out_dir = *o;
    return c;
}

}  // namespace bracket
