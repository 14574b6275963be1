#include "bracket/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "bracket/bracketing.hpp"
#include "bracket/errors.hpp"
#include "bracket/estimation.hpp"

namespace bracket {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

// Marsaglia polar method.
double Rng::normal(double mean, double sd) {
    if (spare_) {
        const double z = *spare_;
        spare_.reset();
        return mean + sd * z;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    return mean + sd * u * f;
}

double Rng::exponential(double scale) { return -scale * std::log1p(-uniform()); }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

std::string_view to_string(HFunction h) {
    switch (h) {
        case HFunction::additive: return "additive";
        case HFunction::linear_interaction: return "linear_interaction";
        case HFunction::convex_after: return "convex_after";
    }
    return "unknown";
}

std::string_view to_string(UFamily f) { return f == UFamily::normal ? "normal" : "exponential"; }

void Scenario::validate() const {
    auto fail = [this](const std::string& why) {
        throw Error(Errc::InvalidScenario, "scenario " + name + ": " + why);
    };
    const std::array<double, 6> finite_check{beta, u_sd, tau, gamma, eps_sd, u_param[0]};
    for (double v : finite_check)
        if (!std::isfinite(v)) fail("non-finite parameter");
    if (!(u_param[kLower] <= u_param[kTreated] && u_param[kTreated] <= u_param[kUpper]))
        fail("confounder parameters must satisfy lower <= treated <= upper");
    if (u_family == UFamily::normal && u_sd < 0.0) fail("u_sd must be >= 0");
    if (u_family == UFamily::exponential) {
        if (u_param[kLower] <= 0.0) fail("exponential scales must be > 0");
        if (h == HFunction::convex_after && u_param[kUpper] >= 1.0)
            fail("exponential scales must be < 1 for a finite mean of exp(U)");
    }
    if (eps_sd < 0.0) fail("eps_sd must be >= 0");
    if (n_per_cell <= 0) fail("n_per_cell must be > 0");
    if (time_varying && time_varying->delta_sd < 0.0) fail("delta_sd must be >= 0");
}

Scenario builtin_scenario(std::string_view name) {
    Scenario s;
    s.name = std::string(name);
    if (name == "additive") {
        s.h = HFunction::additive;
        s.tau = 0.5;
    } else if (name == "linear_interaction") {
        s.gamma = 0.5;
    } else if (name == "linear_interaction_neg") {
        s.gamma = -0.5;
    } else if (name == "convex_time_varying") {
        s.h = HFunction::convex_after;
        s.u_param = {0.0, 0.5, 1.0};
        s.u_sd = 0.5;
        s.time_varying = TimeVarying{{0.0, 0.1, 0.2}, 0.1};
    } else if (name == "convex_exponential") {
        s.h = HFunction::convex_after;
        s.u_family = UFamily::exponential;
        s.u_param = {0.2, 0.35, 0.45};
    } else if (name == "time_varying_violation") {
        s.h = HFunction::convex_after;
        s.u_param = {0.0, 0.5, 1.0};
        s.u_sd = 0.5;
        s.time_varying = TimeVarying{{-1.0, 1.0, -1.0}, 0.1};
    } else {
        throw Error(Errc::InvalidScenario, "unknown scenario '" + std::string(name) + "'");
    }
    return s;
}

std::vector<std::string> builtin_scenario_names() {
    return {"additive", "linear_interaction", "linear_interaction_neg", "convex_time_varying",
            "convex_exponential", "time_varying_violation"};
}

ArmSummaries SyntheticPanel::arm(Group control) const {
    return ArmSummaries{cells[kTreated][0], cells[kTreated][1], cells[control][0],
                        cells[control][1]};
}

namespace {

double h_value(const Scenario& s, double u, int period) {
    switch (s.h) {
        case HFunction::additive: return u + s.tau * period;
        case HFunction::linear_interaction: return u * (1.0 + s.gamma * period);
        case HFunction::convex_after: return period == 0 ? u : std::exp(u);
    }
    return 0.0;
}

double draw_u(const Scenario& s, Rng& rng, Group g) {
    return s.u_family == UFamily::normal ? rng.normal(s.u_param[g], s.u_sd)
                                         : rng.exponential(s.u_param[g]);
}

PeriodSummary summarize(const std::vector<double>& y) {
    const double n = static_cast<double>(y.size());
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    const double se = y.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return PeriodSummary{mean, se, n};
}

struct Moments {
    double mean = 0.0;
    double mcse = 0.0;
};

Moments moments(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sd = x.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return {mean, sd / std::sqrt(n)};
}

// Runs body(rep) for every replication across threads; writes are per-index so
// results do not depend on scheduling.
template <class Body>
void for_each_rep(int reps, Body body) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int workers = static_cast<int>(std::min<unsigned>(hw, 8u));
    if (workers <= 1 || reps < 64) {
        for (int r = 0; r < reps; ++r) body(r);
        return;
    }
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([=, &body] {
            for (int r = w; r < reps; r += workers) body(r);
        });
    }
}

double mean_exp_u(const Scenario& s, Group g) {
    if (s.u_family == UFamily::normal) return std::exp(s.u_param[g] + 0.5 * s.u_sd * s.u_sd);
    return 1.0 / (1.0 - s.u_param[g]);
}

}  // namespace

SyntheticPanel generate_panel(const Scenario& scenario, std::uint64_t seed) {
    scenario.validate();
    SyntheticPanel panel;
    std::vector<double> y0(static_cast<std::size_t>(scenario.n_per_cell));
    std::vector<double> y1(y0.size());
    for (Group g : {kLower, kTreated, kUpper}) {
        Rng rng(derive_seed(seed, g));
        const double effect = g == kTreated ? scenario.beta : 0.0;
        for (std::size_t i = 0; i < y0.size(); ++i) {
            // U is drawn once per unit and reused in both periods.
            const double u0 = draw_u(scenario, rng, g);
            double u1 = u0;
            if (scenario.time_varying) {
                u1 += rng.normal(scenario.time_varying->delta_mean[g],
                                 scenario.time_varying->delta_sd);
            }
            const double e0 = scenario.eps_sd > 0.0 ? rng.normal(0.0, scenario.eps_sd) : 0.0;
            const double e1 = scenario.eps_sd > 0.0 ? rng.normal(0.0, scenario.eps_sd) : 0.0;
            y0[i] = h_value(scenario, u0, 0) + e0;
            y1[i] = h_value(scenario, u1, 1) + effect + e1;
        }
        panel.cells[g][0] = summarize(y0);
        panel.cells[g][1] = summarize(y1);
    }
    return panel;
}

ArmExpectations expected_arm_values(const Scenario& s) {
    s.validate();
    auto delta_mean = [&](Group g) { return s.time_varying ? s.time_varying->delta_mean[g] : 0.0; };
    auto delta_sd = [&]() { return s.time_varying ? s.time_varying->delta_sd : 0.0; };
    // E[h(U1, 1) - h(U0, 0) | g]
    auto time_effect = [&](Group g) {
        const double m = s.u_param[g];  // E[U0] for both families
        const double d = delta_mean(g);
        switch (s.h) {
            case HFunction::additive: return d + s.tau;
            case HFunction::linear_interaction: return (1.0 + s.gamma) * (m + d) - m;
            case HFunction::convex_after:
                return mean_exp_u(s, g) * std::exp(d + 0.5 * delta_sd() * delta_sd()) - m;
        }
        return 0.0;
    };
    const double t = time_effect(kTreated);
    return ArmExpectations{s.beta + t - time_effect(kLower), s.beta + t - time_effect(kUpper)};
}

McReport verify_bracketing(const Scenario& scenario, int reps, std::uint64_t seed) {
    scenario.validate();
    if (reps < 1) throw Error(Errc::OutOfDomain, "reps must be >= 1");
    std::vector<double> lc(static_cast<std::size_t>(reps));
    std::vector<double> uc(lc.size());
    for_each_rep(reps, [&](int r) {
        const SyntheticPanel p = generate_panel(scenario, derive_seed(seed, static_cast<std::uint64_t>(r)));
        const auto& t = p.cells[kTreated];
        lc[static_cast<std::size_t>(r)] = did_point(t[0], t[1], p.cells[kLower][0], p.cells[kLower][1]);
        uc[static_cast<std::size_t>(r)] = did_point(t[0], t[1], p.cells[kUpper][0], p.cells[kUpper][1]);
    });
    const Moments m_lc = moments(lc);
    const Moments m_uc = moments(uc);

    McReport rep;
    rep.scenario = scenario.name;
    rep.reps = reps;
    rep.beta = scenario.beta;
    rep.mean_beta_lc = m_lc.mean;
    rep.mcse_lc = m_lc.mcse;
    rep.mean_beta_uc = m_uc.mean;
    rep.mcse_uc = m_uc.mcse;
    rep.expected = expected_arm_values(scenario);
    const double lo = std::min(m_lc.mean - 3.0 * m_lc.mcse, m_uc.mean - 3.0 * m_uc.mcse);
    const double hi = std::max(m_lc.mean + 3.0 * m_lc.mcse, m_uc.mean + 3.0 * m_uc.mcse);
    rep.bracket_holds = lo <= scenario.beta && scenario.beta <= hi;
    return rep;
}

CoverageReport coverage_experiment(const Scenario& scenario, int reps, double alpha,
                                   std::uint64_t seed) {
    scenario.validate();
    if (reps < 100) throw Error(Errc::OutOfDomain, "coverage experiment needs reps >= 100");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::OutOfDomain, "alpha must lie in (0, 1)");
    std::vector<char> hit(static_cast<std::size_t>(reps), 0);
    for_each_rep(reps, [&](int r) {
        const SyntheticPanel p = generate_panel(scenario, derive_seed(seed, static_cast<std::uint64_t>(r)));
        auto arm_ci = [&](Group g) {
            const ArmSummaries c = p.arm(g);
            const double point = did_point(c.treated_before, c.treated_after, c.control_before,
                                           c.control_after);
            const double se = did_se(c.treated_before, c.treated_after, c.control_before,
                                     c.control_after);
            return wald_ci(point, se, alpha);
        };
        const ConfInterval ci = minmax_ci(arm_ci(kLower), arm_ci(kUpper));
        hit[static_cast<std::size_t>(r)] = ci.contains(scenario.beta) ? 1 : 0;
    });
    double covered = 0.0;
    for (char h : hit) covered += h;
    CoverageReport out;
    out.reps = reps;
    out.alpha = alpha;
    out.coverage = covered / reps;
    out.mcse = std::sqrt(out.coverage * (1.0 - out.coverage) / reps);
    return out;
}

McReport time_varying_scenario_check(const Scenario& scenario, int reps, std::uint64_t seed) {
    if (!scenario.time_varying) {
        throw Error(Errc::InvalidScenario, "scenario " + scenario.name + " has no time-varying part");
    }
    McReport rep = verify_bracketing(scenario, reps, seed);
    const auto& d = scenario.time_varying->delta_mean;
    if (!(d[kLower] <= d[kTreated] && d[kTreated] <= d[kUpper])) {
        rep.assumption_violations.emplace_back("DeltaOrdering");
    }
    if (scenario.h == HFunction::linear_interaction && scenario.gamma < 0.0) {
        // Sufficient conditions cover the increasing-differences case only.
        rep.assumption_violations.emplace_back("DecreasingDifferences");
    }
    return rep;
}

SyntheticControlComparison synthetic_control_comparison(double tau, bool analytic, long draws,
                                                        std::uint64_t seed) {
    constexpr double kLowerScale = 0.2;
    constexpr double kUpperScale = 0.5;
    if (!(tau > kLowerScale && tau < kUpperScale)) {
        throw Error(Errc::OutOfDomain, "tau must lie in (0.2, 0.5)");
    }
    SyntheticControlComparison c;
    c.tau = tau;
    c.analytic = analytic;
    // Convex weights matching the treated before-period mean tau.
    c.w_lower = (kUpperScale - tau) / (kUpperScale - kLowerScale);
    c.w_upper = (tau - kLowerScale) / (kUpperScale - kLowerScale);

    if (analytic) {
        c.synthetic_before_mean = c.w_lower * kLowerScale + c.w_upper * kUpperScale;
        c.synthetic_after_mean = c.w_lower / (1.0 - kLowerScale) + c.w_upper / (1.0 - kUpperScale);
        c.counterfactual_after_mean = 1.0 / (1.0 - tau);
    } else {
        if (draws < 1) throw Error(Errc::OutOfDomain, "draws must be >= 1");
        c.draws = draws;
        auto sample = [&](double scale, std::uint64_t stream, double& mean_u, double& mean_exp) {
            Rng rng(derive_seed(seed, stream));
            double su = 0.0, se = 0.0;
            for (long i = 0; i < draws; ++i) {
                const double u = rng.exponential(scale);
                su += u;
                se += std::exp(u);
            }
            mean_u = su / static_cast<double>(draws);
            mean_exp = se / static_cast<double>(draws);
        };
        double lu, le, uu, ue, tu, te;
        sample(kLowerScale, 0, lu, le);
        sample(kUpperScale, 1, uu, ue);
        sample(tau, 2, tu, te);
        c.synthetic_before_mean = c.w_lower * lu + c.w_upper * uu;
        c.synthetic_after_mean = c.w_lower * le + c.w_upper * ue;
        c.counterfactual_after_mean = te;
    }
    c.bias = c.synthetic_after_mean - c.counterfactual_after_mean;
    return c;
}

}  // namespace bracket
