#pragma once

#include "eslab/optimizer.hpp"

#include <string>
#include <string_view>

namespace eslab {

enum class RegularizerKind { None, L1Penalty, CovShrinkage };

/// L1Penalty applies to historical ES and maximal loss (strength = lambda >= 0);
/// CovShrinkage to variance and the parametric measures (strength = delta in [0, 1]).
/// Strength 0 reproduces the unregularized problem.
struct RegularizerSpec {
    RegularizerKind kind = RegularizerKind::None;
    double strength = 0.0;

    /// "none", "l1:<lambda>", "shrink:<delta>".
    static RegularizerSpec parse(std::string_view text);
    void validate() const;
};

std::string to_string(const RegularizerSpec& spec);

/// (1 - delta) Sigma + delta (tr Sigma / N) I. Throws DomainError for an
/// asymmetric input (max |Sigma - Sigma'| > 1e-9) or delta outside [0, 1].
Matrix shrink_covariance(const Matrix& covariance, double delta);

/// Rewrites a program whose first n_assets variables are free weights in split
/// form w = w+ - w-, w+- >= 0, adding lambda * sum(w+ + w-) to the objective.
/// Variable order becomes (w+[0..N), w-[0..N), remaining variables).
LinearProgram split_weights_with_penalty(const LinearProgram& lp, std::size_t n_assets, double lambda);

/// Minimum of ES + lambda * ||w||_1 under the budget. lambda == 0 runs exactly
/// optimize_es. Feasible outcomes report the penalized objective as risk_value
/// and the plain ES in raw_risk.
OptimizationOutcome optimize_es_l1(const ReturnSample& sample, double alpha, double budget, double lambda,
                                   const OptimizeOptions& options = {});

/// Same for maximal loss.
OptimizationOutcome optimize_maximal_loss_l1(const ReturnSample& sample, double budget, double lambda,
                                             const OptimizeOptions& options = {});

/// Smallest lambda (to 1e-4 relative) at which optimize_es_l1 is Feasible; 0 when
/// the plain problem is already bounded. Bisection on [0, max|r|]: along any
/// direction ES decreases at most at rate max|r| per unit of l1 norm.
double critical_lambda(const ReturnSample& sample, double alpha, double budget);

/// Dispatch for a measure plus regularizer; throws DomainError for mismatched pairs.
OptimizationOutcome optimize_regularized(const ReturnSample& sample, const RiskSpec& spec, double budget,
                                         const RegularizerSpec& reg, const OptimizeOptions& options = {});

}  // namespace eslab
