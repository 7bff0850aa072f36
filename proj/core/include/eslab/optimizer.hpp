#pragma once

#include "eslab/model.hpp"
#include "eslab/simplex.hpp"

#include <optional>
#include <string>

namespace eslab {

/// Threshold separating strict dominance from numerically tied columns, at max-norm 1.
inline constexpr double kDominanceTolerance = 1e-9;
/// Relative eigenvalue floor below which a (projected) covariance counts as singular.
inline constexpr double kSingularRatio = 1e-10;

enum class OptimizationStatus {
    Feasible,
    /// The risk measure decreases without bound along `direction`.
    UnboundedBelow,
    /// Variance only: the covariance has a zero-risk flat direction (N >= T).
    Degenerate,
};

std::string_view status_name(OptimizationStatus s) noexcept;

struct OptimizationOutcome {
    OptimizationStatus status;
    RiskSpec spec;
    /// Feasible only.
    std::optional<Portfolio> portfolio;
    /// Feasible only. With an l1 penalty this is the penalized objective.
    double risk_value = 0.0;
    /// Feasible l1-penalized ES only: the ES of the portfolio without the penalty.
    std::optional<double> raw_risk;
    /// UnboundedBelow / Degenerate only: zero-sum (or flat) direction, max-norm 1.
    Vector direction;

    bool feasible() const noexcept { return status == OptimizationStatus::Feasible; }
};

struct OptimizeOptions {
    /// On an unbounded LP, replace the raw simplex ray by the steepest descent
    /// direction of the measure within the unit box (one extra LP).
    bool refine_certificate = true;
};

/// Rockafellar-Uryasev LP over x = (w[0..N), v, u[0..T)):
///   min v + sum_t u_t / ((1 - alpha) T)
///   s.t. u_t + w.r_t + v >= 0,  sum w = budget,  u >= 0,  w and v free.
LinearProgram build_es_lp(const ReturnSample& sample, double alpha, double budget);

/// Minimax LP over x = (w[0..N), m): min m s.t. m + w.r_t >= 0, sum w = budget.
LinearProgram build_maximal_loss_lp(const ReturnSample& sample, double budget);

/// Minimum historical ES under the budget. Requires 0 < alpha < 1, budget != 0.
OptimizationOutcome optimize_es(const ReturnSample& sample, double alpha, double budget,
                                const OptimizeOptions& options = {});

/// Minimum maximal loss under the budget. Requires budget != 0.
OptimizationOutcome optimize_maximal_loss(const ReturnSample& sample, double budget,
                                          const OptimizeOptions& options = {});

/// Searches for a zero-sum d with d.r_t >= 0 for every t and d.r_t > 0 for some t:
/// max sum_t d.r_t s.t. d.r_t >= 0, sum d = 0, -1 <= d_i <= 1. Requires N >= 2.
OptimizationOutcome detect_dominance(const ReturnSample& sample);

/// Minimum-variance portfolio on the budget hyperplane. Degenerate when the
/// covariance, or its restriction to zero-sum directions, is singular.
OptimizationOutcome optimize_variance(const ReturnSample& sample, double budget);
OptimizationOutcome optimize_variance(const Matrix& covariance, double budget);

/// Minimum of -mu.w + c sqrt(w' Sigma w) under the budget. Unbounded iff some
/// zero-sum direction has mu.d / sqrt(d' Sigma d) > c, or mu.d > 0 with zero variance.
OptimizationOutcome optimize_parametric(const ReturnSample& sample, const RiskSpec& spec, double budget);
OptimizationOutcome optimize_parametric(const Vector& mean, const Matrix& covariance, const RiskSpec& spec,
                                        double budget);

/// Dispatches on spec.measure(). HistoricalVaR is not optimizable (throws DomainError).
OptimizationOutcome optimize(const ReturnSample& sample, const RiskSpec& spec, double budget,
                             const OptimizeOptions& options = {});

/// Largest ratio mu.d / sqrt(d' Sigma d) over zero-sum directions with positive
/// variance (the bound c(alpha) must exceed for a parametric optimum to exist).
double max_zero_sum_ratio(const Vector& mean, const Matrix& covariance);

/// Orthonormal basis (N x (N-1)) of the zero-sum subspace.
Matrix zero_sum_basis(std::size_t n);

/// d.r_t >= -tol for all t, |sum d| <= tol, max_t d.r_t > tol, at max-norm 1.
bool is_dominance_direction(const ReturnSample& sample, const Vector& direction,
                            double tol = kDominanceTolerance);

/// The measure's recession slope along d (sum d = 0, max-norm 1) is below -tol.
/// ES: historical_es of d's losses; maximal loss: max_t -d.r_t; parametric:
/// -mu.d + c sqrt(d' Sigma d).
bool is_descent_direction(const ReturnSample& sample, const RiskSpec& spec, const Vector& direction,
                          double tol = kDominanceTolerance);

/// {"status", "weights" | "direction", "risk_value"?, "raw_risk"?, "alpha", "measure"}
std::string to_json(const OptimizationOutcome& outcome);

}  // namespace eslab
