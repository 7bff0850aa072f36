#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>

namespace eslab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Absolute tolerance on the budget identity sum(weights) == budget.
inline constexpr double kBudgetTolerance = 1e-9;

/// A T x N matrix of per-period asset returns (row t = period, column i = asset).
/// Immutable after construction.
class ReturnSample {
  public:
    explicit ReturnSample(Matrix returns);

    const Matrix& returns() const noexcept { return returns_; }
    std::size_t n_assets() const noexcept { return static_cast<std::size_t>(returns_.cols()); }
    std::size_t n_periods() const noexcept { return static_cast<std::size_t>(returns_.rows()); }

    /// N / T.
    double aspect_ratio() const noexcept;

  private:
    Matrix returns_;
};

/// Portfolio weights together with the budget they sum to.
class Portfolio {
  public:
    /// Budget taken as the sum of the weights.
    explicit Portfolio(Vector weights);
    /// Throws DomainError when sum(weights) differs from budget by more than kBudgetTolerance.
    Portfolio(Vector weights, double budget);

    /// Equal-weight portfolio w_i = 1, budget N.
    static Portfolio equal_weight(std::size_t n_assets);

    const Vector& weights() const noexcept { return weights_; }
    double budget() const noexcept { return budget_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.size()); }

  private:
    Vector weights_;
    double budget_;
};

enum class Measure { HistoricalES, HistoricalVaR, MaximalLoss, ParametricES, ParametricVaR, Variance };

/// Which risk measure to evaluate and at what confidence level.
///
/// alpha is the confidence level: tail estimators average the worst (1 - alpha) T
/// losses. alpha == 1 is accepted only for MaximalLoss; Variance ignores alpha.
class RiskSpec {
  public:
    RiskSpec(Measure measure, double alpha);

    static RiskSpec maximal_loss() { return {Measure::MaximalLoss, 1.0}; }
    static RiskSpec variance() { return {Measure::Variance, 1.0}; }

    Measure measure() const noexcept { return measure_; }
    double alpha() const noexcept { return alpha_; }

    bool is_parametric() const noexcept {
        return measure_ == Measure::ParametricES || measure_ == Measure::ParametricVaR;
    }

  private:
    Measure measure_;
    double alpha_;
};

/// CLI token for a measure ("hist-es", "maxloss", ...).
std::string_view measure_name(Measure m) noexcept;
/// Inverse of measure_name; throws ParseError on unknown tokens.
Measure parse_measure(std::string_view token);

/// Per-period losses of a portfolio, losses[t] = -(w . r_t). Positive is bad.
struct LossSeries {
    Vector losses;
};

/// Throws DimensionError when the portfolio and sample disagree on N.
LossSeries loss_series(const ReturnSample& sample, const Portfolio& portfolio);
LossSeries loss_series(const ReturnSample& sample, const Vector& weights);

/// Rescales weights so they sum to new_budget. Throws DomainError for a zero
/// current sum (directions cannot be rescaled) or a zero target.
Portfolio normalize_budget(const Portfolio& portfolio, double new_budget);

inline double aspect_ratio(const ReturnSample& sample) noexcept { return sample.aspect_ratio(); }

}  // namespace eslab
