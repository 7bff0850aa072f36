#include "eslab/model.hpp"

#include "eslab/error.hpp"

#include <cmath>
#include <string>

namespace eslab {

ReturnSample::ReturnSample(Matrix returns) : returns_(std::move(returns)) {
    if (returns_.rows() < 1 || returns_.cols() < 1) {
        throw DomainError("return sample needs T >= 1 and N >= 1, got T=" +
                          std::to_string(returns_.rows()) + " N=" + std::to_string(returns_.cols()));
    }
    if (!returns_.allFinite()) {
        throw DomainError("return sample contains non-finite entries");
    }
}

double ReturnSample::aspect_ratio() const noexcept {
    return static_cast<double>(n_assets()) / static_cast<double>(n_periods());
}

Portfolio::Portfolio(Vector weights) : weights_(std::move(weights)), budget_(weights_.sum()) {
    if (!weights_.allFinite()) {
        throw DomainError("portfolio weights must be finite");
    }
}

Portfolio::Portfolio(Vector weights, double budget) : weights_(std::move(weights)), budget_(budget) {
    if (!weights_.allFinite() || !std::isfinite(budget_)) {
        throw DomainError("portfolio weights must be finite");
    }
    const double sum = weights_.sum();
    if (std::abs(sum - budget_) > kBudgetTolerance) {
        throw DomainError("portfolio weights sum to " + std::to_string(sum) + ", budget is " +
                          std::to_string(budget_));
    }
}

Portfolio Portfolio::equal_weight(std::size_t n_assets) {
    return Portfolio(Vector::Ones(static_cast<Eigen::Index>(n_assets)), static_cast<double>(n_assets));
}

RiskSpec::RiskSpec(Measure measure, double alpha) : measure_(measure), alpha_(alpha) {
    if (measure_ == Measure::Variance) {
        return;
    }
    if (!(alpha_ > 0.0 && alpha_ <= 1.0)) {
        throw DomainError("alpha must lie in (0, 1], got " + std::to_string(alpha_));
    }
    if (alpha_ == 1.0 && measure_ != Measure::MaximalLoss) {
        throw DomainError("alpha = 1 is only meaningful for maximal loss");
    }
    if (is_parametric() && alpha_ <= 0.5) {
        throw DomainError("parametric measures need alpha in (0.5, 1), got " + std::to_string(alpha_));
    }
}

std::string_view measure_name(Measure m) noexcept {
    switch (m) {
        case Measure::HistoricalES: return "hist-es";
        case Measure::HistoricalVaR: return "hist-var";
        case Measure::MaximalLoss: return "maxloss";
        case Measure::ParametricES: return "param-es";
        case Measure::ParametricVaR: return "param-var";
        case Measure::Variance: return "variance";
    }
    return "unknown";
}

Measure parse_measure(std::string_view token) {
    for (Measure m : {Measure::HistoricalES, Measure::HistoricalVaR, Measure::MaximalLoss,
                      Measure::ParametricES, Measure::ParametricVaR, Measure::Variance}) {
        if (measure_name(m) == token) {
            return m;
        }
    }
    throw ParseError("unknown measure '" + std::string(token) + "'");
}

LossSeries loss_series(const ReturnSample& sample, const Vector& weights) {
    if (static_cast<std::size_t>(weights.size()) != sample.n_assets()) {
        throw DimensionError("portfolio size vs sample assets", sample.n_assets(),
                             static_cast<std::size_t>(weights.size()));
    }
    return LossSeries{-(sample.returns() * weights)};
}

LossSeries loss_series(const ReturnSample& sample, const Portfolio& portfolio) {
    return loss_series(sample, portfolio.weights());
}

Portfolio normalize_budget(const Portfolio& portfolio, double new_budget) {
    const double sum = portfolio.weights().sum();
    if (sum == 0.0) {
        throw DomainError("cannot rescale a zero-sum weight vector to a budget");
    }
    if (new_budget == 0.0) {
        throw DomainError("target budget must be nonzero");
    }
    Vector scaled = portfolio.weights() * (new_budget / sum);
    // Absorb rounding so the budget identity holds to machine precision.
    scaled.array() += (new_budget - scaled.sum()) / static_cast<double>(scaled.size());
    return Portfolio(std::move(scaled), new_budget);
}

}  // namespace eslab
