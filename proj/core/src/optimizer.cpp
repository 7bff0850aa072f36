#include "eslab/optimizer.hpp"

#include "eslab/error.hpp"
#include "eslab/estimators.hpp"

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <cmath>
#include <string>

namespace eslab {
namespace {

using Index = Eigen::Index;

void require_budget(double budget) {
    if (budget == 0.0 || !std::isfinite(budget)) {
        throw DomainError("budget must be finite and nonzero");
    }
}

void require_open_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
}

Vector unit_max_norm(const Vector& d) {
    const double norm = d.lpNorm<Eigen::Infinity>();
    return norm > 0.0 ? Vector(d / norm) : d;
}

/// Portfolio summing to the budget; rounding of very large weights may leave a
/// residual above kBudgetTolerance, in which case the realized sum is the budget.
Portfolio budget_portfolio(Vector w, double budget) {
    w.array() += (budget - w.sum()) / static_cast<double>(w.size());
    if (std::abs(w.sum() - budget) <= kBudgetTolerance) {
        return Portfolio(std::move(w), budget);
    }
    return Portfolio(std::move(w));
}

OptimizationOutcome feasible(const RiskSpec& spec, Portfolio p, double risk) {
    OptimizationOutcome out{OptimizationStatus::Feasible, spec, std::move(p), risk, std::nullopt, Vector()};
    return out;
}

OptimizationOutcome unbounded(const RiskSpec& spec, const Vector& d,
                              OptimizationStatus status = OptimizationStatus::UnboundedBelow) {
    return OptimizationOutcome{status, spec, std::nullopt, 0.0, std::nullopt, unit_max_norm(d)};
}

/// Rows u_t + dir.r_t + v >= 0 over x = (dir[0..N), v, u[0..T)) and the RU objective.
LinearProgram ru_program(const ReturnSample& sample, double alpha) {
    const auto N = static_cast<Index>(sample.n_assets());
    const auto T = static_cast<Index>(sample.n_periods());
    const Index n = N + 1 + T;
    LinearProgram lp;
    lp.objective = Vector::Zero(n);
    lp.objective(N) = 1.0;
    lp.objective.tail(T).setConstant(1.0 / tail_size(alpha, sample.n_periods()));
    lp.constraints = Matrix::Zero(T + 1, n);
    lp.constraints.block(0, 0, T, N) = sample.returns();
    lp.constraints.col(N).head(T).setOnes();
    for (Index t = 0; t < T; ++t) {
        lp.constraints(t, N + 1 + t) = 1.0;
    }
    lp.constraints.row(T).head(N).setOnes();
    lp.rhs = Vector::Zero(T + 1);
    lp.relations.assign(static_cast<std::size_t>(T), Relation::GreaterEqual);
    lp.relations.push_back(Relation::Equal);
    lp.lower = Vector::Constant(n, -kInf);
    lp.lower.tail(T).setZero();
    lp.upper = Vector::Constant(n, kInf);
    return lp;
}

LinearProgram minimax_program(const ReturnSample& sample) {
    const auto N = static_cast<Index>(sample.n_assets());
    const auto T = static_cast<Index>(sample.n_periods());
    LinearProgram lp = LinearProgram::free(static_cast<std::size_t>(N + 1));
    lp.objective(N) = 1.0;
    lp.constraints = Matrix::Zero(T + 1, N + 1);
    lp.constraints.block(0, 0, T, N) = sample.returns();
    lp.constraints.col(N).head(T).setOnes();
    lp.constraints.row(T).head(N).setOnes();
    lp.rhs = Vector::Zero(T + 1);
    lp.relations.assign(static_cast<std::size_t>(T), Relation::GreaterEqual);
    lp.relations.push_back(Relation::Equal);
    return lp;
}

/// Turns a program with a budget row into its steepest-direction counterpart:
/// budget rhs 0 and the first N variables confined to [-1, 1].
LinearProgram unit_box_direction_program(LinearProgram lp, Index n_assets) {
    lp.rhs(lp.rhs.size() - 1) = 0.0;
    lp.lower.head(n_assets).setConstant(-1.0);
    lp.upper.head(n_assets).setConstant(1.0);
    return lp;
}

/// Certificate for an unbounded budget program: the steepest unit-box direction
/// when requested and informative, otherwise the simplex ray's weight part.
Vector certificate_direction(const LinearProgram& budget_lp, const LpOutcome& result, Index n_assets,
                             const OptimizeOptions& options) {
    const Vector ray_part = result.ray.head(n_assets);
    if (!options.refine_certificate) {
        return ray_part;
    }
    const LinearProgram steep = unit_box_direction_program(budget_lp, n_assets);
    const LpOutcome refined = solve(steep);
    if (refined.status == LpStatus::Optimal && refined.objective_value < -kDominanceTolerance) {
        return refined.solution.head(n_assets);
    }
    return ray_part;
}

}  // namespace

std::string_view status_name(OptimizationStatus s) noexcept {
    switch (s) {
        case OptimizationStatus::Feasible: return "feasible";
        case OptimizationStatus::UnboundedBelow: return "unbounded_below";
        case OptimizationStatus::Degenerate: return "degenerate";
    }
    return "unknown";
}

LinearProgram build_es_lp(const ReturnSample& sample, double alpha, double budget) {
    require_open_alpha(alpha);
    LinearProgram lp = ru_program(sample, alpha);
    lp.rhs(lp.rhs.size() - 1) = budget;
    return lp;
}

LinearProgram build_maximal_loss_lp(const ReturnSample& sample, double budget) {
    LinearProgram lp = minimax_program(sample);
    lp.rhs(lp.rhs.size() - 1) = budget;
    return lp;
}

OptimizationOutcome optimize_es(const ReturnSample& sample, double alpha, double budget,
                                const OptimizeOptions& options) {
    require_open_alpha(alpha);
    require_budget(budget);
    const RiskSpec spec(Measure::HistoricalES, alpha);
    const auto N = static_cast<Index>(sample.n_assets());
    const LinearProgram lp = build_es_lp(sample, alpha, budget);
    const LpOutcome result = solve(lp);
    switch (result.status) {
        case LpStatus::Optimal:
            return feasible(spec, budget_portfolio(result.solution.head(N), budget), result.objective_value);
        case LpStatus::Unbounded:
            return unbounded(spec, certificate_direction(lp, result, N, options));
        case LpStatus::Infeasible: break;
    }
    throw NumericalError("ES program reported infeasible; the budget row is always satisfiable");
}

OptimizationOutcome optimize_maximal_loss(const ReturnSample& sample, double budget,
                                          const OptimizeOptions& options) {
    require_budget(budget);
    const RiskSpec spec = RiskSpec::maximal_loss();
    const auto N = static_cast<Index>(sample.n_assets());
    const LinearProgram lp = build_maximal_loss_lp(sample, budget);
    const LpOutcome result = solve(lp);
    switch (result.status) {
        case LpStatus::Optimal:
            return feasible(spec, budget_portfolio(result.solution.head(N), budget), result.objective_value);
        case LpStatus::Unbounded:
            return unbounded(spec, certificate_direction(lp, result, N, options));
        case LpStatus::Infeasible: break;
    }
    throw NumericalError("minimax program reported infeasible; the budget row is always satisfiable");
}

OptimizationOutcome detect_dominance(const ReturnSample& sample) {
    const auto N = static_cast<Index>(sample.n_assets());
    const auto T = static_cast<Index>(sample.n_periods());
    if (N < 2) {
        throw DomainError("dominance needs N >= 2 (no zero-sum direction exists for one asset)");
    }
    LinearProgram lp = LinearProgram::free(static_cast<std::size_t>(N));
    lp.objective = -sample.returns().colwise().sum().transpose();
    lp.constraints = Matrix::Zero(T + 1, N);
    lp.constraints.topRows(T) = sample.returns();
    lp.constraints.row(T).setOnes();
    lp.rhs = Vector::Zero(T + 1);
    lp.relations.assign(static_cast<std::size_t>(T), Relation::GreaterEqual);
    lp.relations.push_back(Relation::Equal);
    lp.lower.setConstant(-1.0);
    lp.upper.setConstant(1.0);

    const RiskSpec spec = RiskSpec::maximal_loss();
    const LpOutcome result = solve(lp);
    if (result.status != LpStatus::Optimal) {
        throw NumericalError("dominance program is bounded and feasible (d = 0) but did not solve");
    }
    const Vector d = unit_max_norm(result.solution);
    if (-result.objective_value > kDominanceTolerance && is_dominance_direction(sample, d)) {
        return unbounded(spec, d);
    }
    return feasible(spec, Portfolio::equal_weight(static_cast<std::size_t>(N)), 0.0);
}

Matrix zero_sum_basis(std::size_t n) {
    const auto N = static_cast<Index>(n);
    if (N < 2) {
        return Matrix(N, 0);
    }
    const Vector ones = Vector::Ones(N);
    Eigen::HouseholderQR<Matrix> qr(ones);
    const Matrix q = qr.householderQ();
    return q.rightCols(N - 1);
}

OptimizationOutcome optimize_variance(const ReturnSample& sample, double budget) {
    return optimize_variance(sample_covariance(sample), budget);
}

OptimizationOutcome optimize_variance(const Matrix& cov, double budget) {
    require_budget(budget);
    const RiskSpec spec = RiskSpec::variance();
    const Index N = cov.rows();
    if (N == 1) {
        Vector w = Vector::Constant(1, budget);
        const double risk = cov(0, 0) * budget * budget;
        return feasible(spec, Portfolio(std::move(w), budget), risk);
    }

    Eigen::SelfAdjointEigenSolver<Matrix> full(cov);
    const Vector& full_eig = full.eigenvalues();
    const double full_max = full_eig.maxCoeff();
    const Matrix Q = zero_sum_basis(static_cast<std::size_t>(N));
    const Matrix S = Q.transpose() * cov * Q;
    Eigen::SelfAdjointEigenSolver<Matrix> proj(S);
    const Vector& lam = proj.eigenvalues();
    const double lam_max = lam.maxCoeff();

    if (!(lam_max > 0.0) || lam(0) < kSingularRatio * lam_max) {
        return unbounded(spec, Q * proj.eigenvectors().col(0), OptimizationStatus::Degenerate);
    }
    if (!(full_max > 0.0) || full_eig(0) < kSingularRatio * full_max) {
        return unbounded(spec, full.eigenvectors().col(0), OptimizationStatus::Degenerate);
    }

    const Vector w0 = Vector::Constant(N, budget / static_cast<double>(N));
    const Vector rhs = Q.transpose() * (cov * w0);
    const Matrix& V = proj.eigenvectors();
    const Vector z = -(V * ((V.transpose() * rhs).array() / lam.array()).matrix());
    Portfolio p = budget_portfolio(w0 + Q * z, budget);
    const double risk = std::max(0.0, p.weights().dot(cov * p.weights()));
    return feasible(spec, std::move(p), risk);
}

double max_zero_sum_ratio(const Vector& mean, const Matrix& cov) {
    const Index N = cov.rows();
    if (N < 2) {
        return 0.0;
    }
    const Matrix Q = zero_sum_basis(static_cast<std::size_t>(N));
    Eigen::SelfAdjointEigenSolver<Matrix> proj(Q.transpose() * cov * Q);
    const Vector& lam = proj.eigenvalues();
    const double lam_max = lam.maxCoeff();
    const Vector g = proj.eigenvectors().transpose() * (Q.transpose() * mean);
    double s2 = 0.0;
    for (Index k = 0; k < lam.size(); ++k) {
        if (lam_max > 0.0 && lam(k) >= kSingularRatio * lam_max) {
            s2 += g(k) * g(k) / lam(k);
        }
    }
    return std::sqrt(s2);
}

OptimizationOutcome optimize_parametric(const ReturnSample& sample, const RiskSpec& spec, double budget) {
    return optimize_parametric(sample_mean(sample), sample_covariance(sample), spec, budget);
}

OptimizationOutcome optimize_parametric(const Vector& mean, const Matrix& cov, const RiskSpec& spec,
                                        double budget) {
    if (!spec.is_parametric()) {
        throw DomainError("optimize_parametric needs param-es or param-var");
    }
    require_budget(budget);
    const double c = parametric_factor(spec);
    const Index N = cov.rows();
    if (N == 1) {
        Vector w = Vector::Constant(1, budget);
        const double risk = parametric_risk(mean, cov, w, c);
        return feasible(spec, Portfolio(std::move(w), budget), risk);
    }

    const Matrix Q = zero_sum_basis(static_cast<std::size_t>(N));
    Eigen::SelfAdjointEigenSolver<Matrix> proj(Q.transpose() * cov * Q);
    const Vector& lam = proj.eigenvalues();
    const Matrix& V = proj.eigenvectors();
    const double lam_max = lam.maxCoeff();
    const Vector g = V.transpose() * (Q.transpose() * mean);

    // Zero-variance zero-sum directions with drift: risk falls linearly, unboundedly.
    Index worst_null = -1;
    for (Index k = 0; k < lam.size(); ++k) {
        const bool null = !(lam_max > 0.0) || lam(k) < kSingularRatio * lam_max;
        if (null && std::abs(g(k)) > kDominanceTolerance &&
            (worst_null < 0 || std::abs(g(k)) > std::abs(g(worst_null)))) {
            worst_null = k;
        }
    }
    if (worst_null >= 0) {
        const double sign = g(worst_null) > 0.0 ? 1.0 : -1.0;
        return unbounded(spec, sign * (Q * V.col(worst_null)));
    }

    // Pseudo-inverse on the positive eigenspace.
    Vector inv_lam = Vector::Zero(lam.size());
    for (Index k = 0; k < lam.size(); ++k) {
        if (lam_max > 0.0 && lam(k) >= kSingularRatio * lam_max) {
            inv_lam(k) = 1.0 / lam(k);
        }
    }
    const Vector sharpe_z = V * (inv_lam.array() * g.array()).matrix();  // S^+ m
    const double s2 = g.dot((inv_lam.array() * g.array()).matrix());
    if (s2 > c * c) {
        return unbounded(spec, Q * sharpe_z);
    }

    const Vector w0 = Vector::Constant(N, budget / static_cast<double>(N));
    const Vector b = Q.transpose() * (cov * w0);
    const Vector bv = V.transpose() * b;
    const Vector center = -(V * (inv_lam.array() * bv.array()).matrix());
    const double v0 = std::max(0.0, w0.dot(cov * w0) - bv.dot((inv_lam.array() * bv.array()).matrix()));
    const double gap = c * c - s2;
    Vector z = center;
    if (v0 > 0.0 && s2 > 0.0) {
        if (!(gap > 0.0)) {
            throw NumericalError("parametric optimum sits exactly on the feasibility boundary");
        }
        z += (std::sqrt(v0) / std::sqrt(gap)) * sharpe_z;
    }
    Vector w = w0 + Q * z;
    if (!w.allFinite()) {
        throw NumericalError("parametric optimum is not finite");
    }
    Portfolio p = budget_portfolio(std::move(w), budget);
    const double risk = parametric_risk(mean, cov, p.weights(), c);
    return feasible(spec, std::move(p), risk);
}

OptimizationOutcome optimize(const ReturnSample& sample, const RiskSpec& spec, double budget,
                             const OptimizeOptions& options) {
    switch (spec.measure()) {
        case Measure::HistoricalES: return optimize_es(sample, spec.alpha(), budget, options);
        case Measure::MaximalLoss: return optimize_maximal_loss(sample, budget, options);
        case Measure::ParametricES:
        case Measure::ParametricVaR: return optimize_parametric(sample, spec, budget);
        case Measure::Variance: return optimize_variance(sample, budget);
        case Measure::HistoricalVaR: break;
    }
    throw DomainError("historical VaR is not convex and has no LP optimizer here");
}

bool is_dominance_direction(const ReturnSample& sample, const Vector& direction, double tol) {
    if (static_cast<std::size_t>(direction.size()) != sample.n_assets()) {
        return false;
    }
    const double norm = direction.lpNorm<Eigen::Infinity>();
    if (!(norm > 0.0) || !direction.allFinite()) {
        return false;
    }
    const Vector d = direction / norm;
    const Vector gains = sample.returns() * d;
    return std::abs(d.sum()) <= tol && gains.minCoeff() >= -tol && gains.maxCoeff() > tol;
}

bool is_descent_direction(const ReturnSample& sample, const RiskSpec& spec, const Vector& direction,
                          double tol) {
    if (static_cast<std::size_t>(direction.size()) != sample.n_assets() || !direction.allFinite()) {
        return false;
    }
    const double norm = direction.lpNorm<Eigen::Infinity>();
    if (!(norm > 0.0)) {
        return false;
    }
    const Vector d = direction / norm;
    if (std::abs(d.sum()) > tol) {
        return false;
    }
    switch (spec.measure()) {
        case Measure::HistoricalES: return historical_es(loss_series(sample, d), spec.alpha()) < -tol;
        case Measure::MaximalLoss: return maximal_loss(loss_series(sample, d)) < -tol;
        case Measure::ParametricES:
        case Measure::ParametricVaR:
            return parametric_risk(sample_mean(sample), sample_covariance(sample), d, parametric_factor(spec)) <
                   -tol;
        case Measure::Variance:
        case Measure::HistoricalVaR: break;
    }
    return false;
}

std::string to_json(const OptimizationOutcome& outcome) {
    nlohmann::json doc;
    doc["status"] = status_name(outcome.status);
    doc["measure"] = measure_name(outcome.spec.measure());
    doc["alpha"] = outcome.spec.alpha();
    if (outcome.portfolio) {
        const Vector& w = outcome.portfolio->weights();
        doc["weights"] = std::vector<double>(w.data(), w.data() + w.size());
        doc["budget"] = outcome.portfolio->budget();
        doc["risk_value"] = outcome.risk_value;
        if (outcome.raw_risk) {
            doc["raw_risk"] = *outcome.raw_risk;
        }
    } else {
        const Vector& d = outcome.direction;
        doc["direction"] = std::vector<double>(d.data(), d.data() + d.size());
    }
    return doc.dump();
}

}  // namespace eslab
