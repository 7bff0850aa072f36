#pragma once

#include "eslab/model.hpp"
#include "eslab/optimizer.hpp"
#include "eslab/scenario.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace eslab {

/// Shared knobs of every Monte Carlo routine. Results depend on `seed` only;
/// `workers` changes wall time, never output.
struct ExperimentOptions {
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

/// Seed of trial `trial` at grid point (N, T).
std::uint64_t trial_seed(std::uint64_t master, std::size_t n_assets, std::size_t n_periods, std::size_t trial) noexcept;

/// Optimizes one generated sample (budget N) and reports whether it has no
/// finite optimum. For variance the Degenerate status counts as infeasible.
bool trial_infeasible(const RiskSpec& spec, const GeneratorSpec& gen, std::size_t n_assets, std::size_t n_periods,
                      std::uint64_t seed);

struct ProbabilityEstimate {
    double probability = 0.0;
    /// 95% Wilson score interval.
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t infeasible = 0;
    std::size_t trials = 0;

    double standard_error() const noexcept;
};

/// 95% Wilson interval for k successes out of n.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n);

ProbabilityEstimate infeasibility_probability(const RiskSpec& spec, const GeneratorSpec& gen, std::size_t n_assets,
                                              std::size_t n_periods, std::size_t trials,
                                              const ExperimentOptions& options = {});

struct PhasePoint {
    double alpha = 0.0;
    double critical_ratio = 0.0;
    double ci_halfwidth = 0.0;
    std::size_t n_assets = 0;
    std::size_t trials_per_T = 0;
    /// Every (T, probability) evaluated while locating the crossing, ascending in T.
    std::vector<std::pair<std::size_t, double>> probes;
    bool failed = false;
    std::string error;
};

/// N/T at which the infeasibility probability crosses 1/2. T grows geometrically
/// from N until the probability falls below 1/2, integer bisection narrows the
/// bracket to adjacent T, and a line fitted to p(N/T) over a few T around the
/// bracket gives the crossing. Throws DomainError for N < 8 and Error when no
/// crossing exists for T in [N, 100 N].
PhasePoint locate_critical_ratio(const RiskSpec& spec, const GeneratorSpec& gen, std::size_t n_assets,
                                 std::size_t trials, const ExperimentOptions& options = {});

/// locate_critical_ratio for each alpha, sorted by alpha. A point whose search
/// fails is kept with failed = true and the message in `error`.
std::vector<PhasePoint> trace_phase_line(Measure measure, const GeneratorSpec& gen, std::vector<double> alphas,
                                         std::size_t n_assets, std::size_t trials,
                                         const ExperimentOptions& options = {});

struct ErrorEstimate {
    /// Mean of q0 = |w_hat|_2 / |w_true|_2 over feasible trials.
    double mean_q0 = 0.0;
    double standard_error = 0.0;
    std::size_t feasible = 0;
    std::size_t discarded = 0;
};

/// Throws DomainError when more than half of the trials are infeasible.
ErrorEstimate estimation_error(const RiskSpec& spec, const GeneratorSpec& gen, std::size_t n_assets,
                               std::size_t n_periods, std::size_t trials, const ExperimentOptions& options = {});

struct PowerLawFit {
    double exponent = 0.0;
    double exponent_stderr = 0.0;
    double log_prefactor = 0.0;
};

/// OLS of log y on log x. Needs >= 5 positive points with max x / min x >= 10.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingPoint {
    /// critical_ratio - N/T for the integer T actually used.
    double distance = 0.0;
    std::size_t n_periods = 0;
    double q0 = 0.0;
    double q0_stderr = 0.0;
    std::size_t discarded = 0;
};

struct ScalingFit {
    RiskSpec spec = RiskSpec::variance();
    double critical_ratio = 0.0;
    std::vector<ScalingPoint> points;
    double exponent = 0.0;
    double exponent_stderr = 0.0;
};

/// Estimation error at T = floor(N / (critical_ratio - distance)) for each grid
/// distance, so the realized distance does not exceed the requested one (one
/// more period is used when the floor would land on the transition). Then the
/// power-law fit q0 ~ distance^exponent. Grid points that are not strictly
/// subcritical or whose estimate is refused are dropped; the fit needs five
/// survivors spanning a decade.
ScalingFit fit_exponent(const RiskSpec& spec, const GeneratorSpec& gen, double critical_ratio,
                        std::size_t n_assets, const std::vector<double>& distances, std::size_t trials,
                        const ExperimentOptions& options = {});

/// CSV tables; numbers carry 12 significant digits.
std::string phase_csv(const std::vector<PhasePoint>& points);
std::string scaling_csv(const ScalingFit& fit);
std::string probability_csv(const RiskSpec& spec, std::size_t n_assets, std::size_t n_periods,
                            const ProbabilityEstimate& estimate);

/// JSON objects for the same results (embedded by the CLI into its envelope).
std::string phase_json(const std::vector<PhasePoint>& points);
std::string scaling_json(const ScalingFit& fit);
std::string probability_json(const ProbabilityEstimate& estimate);

}  // namespace eslab
