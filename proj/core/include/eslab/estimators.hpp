#pragma once

#include "eslab/model.hpp"

namespace eslab {

/// Gaussian constants for the parametric measures at confidence alpha:
/// var_factor = Phi^-1(alpha), es_factor = phi(var_factor) / (1 - alpha).
struct GaussianTailFactor {
    double alpha;
    double var_factor;
    double es_factor;
};

/// Requires alpha in (0.5, 1).
GaussianTailFactor gaussian_tail_factors(double alpha);

/// Tail factor c(alpha) of a parametric measure (es_factor or var_factor).
double parametric_factor(const RiskSpec& spec);

/// Number of tail observations (1 - alpha) T. May be fractional.
double tail_size(double alpha, std::size_t n_periods);

/// Historical Expected Shortfall: the minimum over v of the Rockafellar-Uryasev
/// functional v + sum_t max(L_t - v, 0) / ((1 - alpha) T). For k = (1 - alpha) T
/// this is the mean of the k largest losses, the floor(k)-th order statistic
/// carrying the fractional weight when k is not an integer.
double historical_es(const LossSeries& losses, double alpha);
double historical_es(const ReturnSample& sample, const Portfolio& portfolio, double alpha);

/// The ceil((1 - alpha) T)-th largest loss.
double historical_var(const LossSeries& losses, double alpha);
double historical_var(const ReturnSample& sample, const Portfolio& portfolio, double alpha);

double maximal_loss(const LossSeries& losses);
double maximal_loss(const ReturnSample& sample, const Portfolio& portfolio);

/// Column means of the returns.
Vector sample_mean(const ReturnSample& sample);
/// Mean-subtracted covariance with divisor T - 1. Throws DomainError for T < 2.
Matrix sample_covariance(const ReturnSample& sample);

/// -mu.w + c(alpha) sqrt(w' Sigma w) with sample moments; spec must be parametric.
double parametric_risk(const ReturnSample& sample, const Portfolio& portfolio, const RiskSpec& spec);
/// Same quantity from precomputed moments.
double parametric_risk(const Vector& mean, const Matrix& cov, const Vector& weights, double factor);

/// w' Sigma w. Throws DomainError for T < 2.
double variance_risk(const ReturnSample& sample, const Portfolio& portfolio);

/// Dispatches on spec.measure().
double evaluate_risk(const ReturnSample& sample, const Portfolio& portfolio, const RiskSpec& spec);

}  // namespace eslab
