#include "eslab/estimators.hpp"

#include "eslab/error.hpp"
#include "eslab/normal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace eslab {
namespace {

void require_open_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
}

void require_two_periods(const ReturnSample& sample) {
    if (sample.n_periods() < 2) {
        throw DomainError("covariance needs T >= 2, got T=" + std::to_string(sample.n_periods()));
    }
}

}  // namespace

GaussianTailFactor gaussian_tail_factors(double alpha) {
    if (!(alpha > 0.5 && alpha < 1.0)) {
        throw DomainError("Gaussian tail factors need alpha in (0.5, 1), got " + std::to_string(alpha));
    }
    const double z = normal_quantile(alpha);
    return {alpha, z, normal_pdf(z) / (1.0 - alpha)};
}

double parametric_factor(const RiskSpec& spec) {
    const auto f = gaussian_tail_factors(spec.alpha());
    switch (spec.measure()) {
        case Measure::ParametricES: return f.es_factor;
        case Measure::ParametricVaR: return f.var_factor;
        default: throw DomainError("parametric factor requested for a non-parametric measure");
    }
}

double tail_size(double alpha, std::size_t n_periods) {
    return (1.0 - alpha) * static_cast<double>(n_periods);
}

double historical_es(const LossSeries& losses, double alpha) {
    require_open_alpha(alpha);
    const auto T = static_cast<std::size_t>(losses.losses.size());
    const double k = tail_size(alpha, T);
    const auto whole = std::min(static_cast<std::size_t>(std::floor(k)), T);
    const double frac = k - static_cast<double>(whole);

    std::vector<double> sorted(losses.losses.data(), losses.losses.data() + T);
    const auto n_needed = std::min(whole + 1, T);
    std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n_needed),
                      sorted.end(), std::greater<>());

    double sum = 0.0;
    for (std::size_t i = 0; i < whole; ++i) {
        sum += sorted[i];
    }
    if (whole < T && frac > 0.0) {
        sum += frac * sorted[whole];
    }
    return sum / k;
}

double historical_es(const ReturnSample& sample, const Portfolio& portfolio, double alpha) {
    return historical_es(loss_series(sample, portfolio), alpha);
}

double historical_var(const LossSeries& losses, double alpha) {
    require_open_alpha(alpha);
    const auto T = static_cast<std::size_t>(losses.losses.size());
    // Guard against (1 - alpha) T landing a hair above an integer.
    const double k = tail_size(alpha, T);
    auto rank = static_cast<std::size_t>(std::ceil(k - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, T);
    std::vector<double> sorted(losses.losses.data(), losses.losses.data() + T);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                     sorted.end(), std::greater<>());
    return sorted[rank - 1];
}

double historical_var(const ReturnSample& sample, const Portfolio& portfolio, double alpha) {
    return historical_var(loss_series(sample, portfolio), alpha);
}

double maximal_loss(const LossSeries& losses) { return losses.losses.maxCoeff(); }

double maximal_loss(const ReturnSample& sample, const Portfolio& portfolio) {
    return maximal_loss(loss_series(sample, portfolio));
}

Vector sample_mean(const ReturnSample& sample) { return sample.returns().colwise().mean(); }

Matrix sample_covariance(const ReturnSample& sample) {
    require_two_periods(sample);
    const Matrix centered = sample.returns().rowwise() - sample.returns().colwise().mean();
    Matrix cov = (centered.transpose() * centered) / static_cast<double>(sample.n_periods() - 1);
    return 0.5 * (cov + cov.transpose());
}

double parametric_risk(const Vector& mean, const Matrix& cov, const Vector& weights, double factor) {
    const double var = std::max(0.0, weights.dot(cov * weights));
    return -mean.dot(weights) + factor * std::sqrt(var);
}

double parametric_risk(const ReturnSample& sample, const Portfolio& portfolio, const RiskSpec& spec) {
    if (!spec.is_parametric()) {
        throw DomainError("parametric_risk needs param-es or param-var");
    }
    require_two_periods(sample);
    if (portfolio.size() != sample.n_assets()) {
        throw DimensionError("portfolio size vs sample assets", sample.n_assets(), portfolio.size());
    }
    return parametric_risk(sample_mean(sample), sample_covariance(sample), portfolio.weights(),
                           parametric_factor(spec));
}

double variance_risk(const ReturnSample& sample, const Portfolio& portfolio) {
    require_two_periods(sample);
    if (portfolio.size() != sample.n_assets()) {
        throw DimensionError("portfolio size vs sample assets", sample.n_assets(), portfolio.size());
    }
    const Vector& w = portfolio.weights();
    return std::max(0.0, w.dot(sample_covariance(sample) * w));
}

double evaluate_risk(const ReturnSample& sample, const Portfolio& portfolio, const RiskSpec& spec) {
    switch (spec.measure()) {
        case Measure::HistoricalES: return historical_es(sample, portfolio, spec.alpha());
        case Measure::HistoricalVaR: return historical_var(sample, portfolio, spec.alpha());
        case Measure::MaximalLoss: return maximal_loss(sample, portfolio);
        case Measure::ParametricES:
        case Measure::ParametricVaR: return parametric_risk(sample, portfolio, spec);
        case Measure::Variance: return variance_risk(sample, portfolio);
    }
    throw DomainError("unknown measure");
}

}  // namespace eslab
