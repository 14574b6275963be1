#pragma once
// Monte Carlo checks of the bracketing property and of min-max CI coverage
// under parametric scenarios, plus the two-group synthetic-control example.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "bracket/types.hpp"

namespace bracket {

// Portable generator: mt19937_64 words mapped to doubles with our own
// transforms, so draws do not depend on the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();  // [0, 1)
    double normal(double mean, double sd);
    double exponential(double scale);

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

enum class HFunction {
    additive,            // h = U + tau * p
    linear_interaction,  // h = U * (1 + gamma * p)
    convex_after,        // h(U, 0) = U, h(U, 1) = exp(U)
};
enum class UFamily { normal, exponential };

std::string_view to_string(HFunction h);
std::string_view to_string(UFamily f);

enum Group : std::size_t { kLower = 0, kTreated = 1, kUpper = 2 };

// Per-group shift U1 - U0 ~ Normal(delta_mean[g], delta_sd), drawn
// independently of U0.
struct TimeVarying {
    std::array<double, 3> delta_mean{0.0, 0.0, 0.0};
    double delta_sd = 0.0;
};

struct Scenario {
    std::string name = "custom";
    double beta = 1.0;
    UFamily u_family = UFamily::normal;
    // Normal means or exponential scales, ordered lower <= treated <= upper.
    std::array<double, 3> u_param{0.0, 1.0, 2.0};
    double u_sd = 1.0;  // normal family only
    HFunction h = HFunction::linear_interaction;
    double tau = 0.0;    // additive time effect
    double gamma = 0.5;  // linear interaction slope
    double eps_sd = 1.0;
    int n_per_cell = 200;
    std::optional<TimeVarying> time_varying;

    // Throws InvalidScenario.
    void validate() const;
};

// Named scenarios shipped with the CLI: additive, linear_interaction,
// linear_interaction_neg, convex_time_varying, convex_exponential and
// time_varying_violation (deltas out of order, so the bracket can fail).
Scenario builtin_scenario(std::string_view name);
std::vector<std::string> builtin_scenario_names();

// cells[group][period], period 0 = before, 1 = after.
struct SyntheticPanel {
    std::array<std::array<PeriodSummary, 2>, 3> cells;

    ArmSummaries arm(Group control) const;
};

SyntheticPanel generate_panel(const Scenario& scenario, std::uint64_t seed);

struct ArmExpectations {
    double theta_lc = 0.0;
    double theta_uc = 0.0;
};

// Closed-form expectations of the two DiD estimators.
ArmExpectations expected_arm_values(const Scenario& scenario);

struct McReport {
    std::string scenario;
    int reps = 0;
    double beta = 0.0;
    double mean_beta_lc = 0.0;
    double mcse_lc = 0.0;
    double mean_beta_uc = 0.0;
    double mcse_uc = 0.0;
    bool bracket_holds = false;
    ArmExpectations expected;
    std::optional<double> coverage;
    std::optional<double> coverage_mcse;
    std::vector<std::string> assumption_violations;
};

McReport verify_bracketing(const Scenario& scenario, int reps, std::uint64_t seed);

struct CoverageReport {
    int reps = 0;
    double alpha = 0.05;
    double coverage = 0.0;
    double mcse = 0.0;
};

// Fraction of replications whose min-max CI contains beta. Requires reps >= 100.
CoverageReport coverage_experiment(const Scenario& scenario, int reps, double alpha,
                                   std::uint64_t seed);

// verify_bracketing for scenarios with time-varying confounders. Deltas out of
// order are reported in assumption_violations, not thrown.
McReport time_varying_scenario_check(const Scenario& scenario, int reps, std::uint64_t seed);

struct SyntheticControlComparison {
    double tau = 0.0;
    bool analytic = true;
    long draws = 0;
    double w_lower = 0.0;
    double w_upper = 0.0;
    double synthetic_before_mean = 0.0;
    double synthetic_after_mean = 0.0;
    double counterfactual_after_mean = 0.0;
    double bias = 0.0;  // synthetic - counterfactual
};

// Exponential U with scales 0.2 (lower), 0.5 (upper), tau (treated);
// h(U, 0) = U, h(U, 1) = exp(U). Throws OutOfDomain unless 0.2 < tau < 0.5.
SyntheticControlComparison synthetic_control_comparison(double tau, bool analytic, long draws,
                                                        std::uint64_t seed);

}  // namespace bracket
