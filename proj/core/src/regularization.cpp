#include "eslab/regularization.hpp"

#include "eslab/error.hpp"
#include "eslab/estimators.hpp"
#include "eslab/sample_io.hpp"

#include <charconv>
#include <cmath>

namespace eslab {
namespace {

using Index = Eigen::Index;

double parse_strength(std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError("regularizer: bad strength '" + std::string(text) + "'");
    }
    return v;
}

OptimizationOutcome penalized_budget_program(const LinearProgram& plain, const RiskSpec& spec,
                                             const ReturnSample& sample, double budget, double lambda,
                                             const OptimizeOptions& options) {
    const auto N = static_cast<Index>(sample.n_assets());
    const LinearProgram lp = split_weights_with_penalty(plain, sample.n_assets(), lambda);
    const LpOutcome result = solve(lp);
    if (result.status == LpStatus::Optimal) {
        Vector w = result.solution.head(N) - result.solution.segment(N, N);
        w.array() += (budget - w.sum()) / static_cast<double>(N);
        Portfolio p = std::abs(w.sum() - budget) <= kBudgetTolerance ? Portfolio(w, budget) : Portfolio(w);
        const double raw = evaluate_risk(sample, p, spec);
        OptimizationOutcome out{OptimizationStatus::Feasible, spec, std::move(p), result.objective_value, raw,
                                Vector()};
        return out;
    }
    if (result.status != LpStatus::Unbounded) {
        throw NumericalError("penalized program reported infeasible; the budget row is always satisfiable");
    }
    Vector d = result.ray.head(N) - result.ray.segment(N, N);
    if (options.refine_certificate) {
        // Steepest penalized descent inside the unit box.
        LinearProgram steep = lp;
        steep.rhs(steep.rhs.size() - 1) = 0.0;
        steep.upper.head(2 * N).setConstant(1.0);
        const LpOutcome refined = solve(steep);
        if (refined.status == LpStatus::Optimal && refined.objective_value < -kDominanceTolerance) {
            d = refined.solution.head(N) - refined.solution.segment(N, N);
        }
    }
    const double norm = d.lpNorm<Eigen::Infinity>();
    if (norm > 0.0) {
        d /= norm;
    }
    return OptimizationOutcome{OptimizationStatus::UnboundedBelow, spec, std::nullopt, 0.0, std::nullopt, d};
}

}  // namespace

RegularizerSpec RegularizerSpec::parse(std::string_view text) {
    RegularizerSpec spec;
    if (text == "none") {
        return spec;
    }
    if (text.starts_with("l1:")) {
        spec.kind = RegularizerKind::L1Penalty;
        spec.strength = parse_strength(text.substr(3));
    } else if (text.starts_with("shrink:")) {
        spec.kind = RegularizerKind::CovShrinkage;
        spec.strength = parse_strength(text.substr(7));
    } else {
        throw ParseError("unknown regularizer '" + std::string(text) + "' (expected none, l1:<lambda>, shrink:<delta>)");
    }
    spec.validate();
    return spec;
}

void RegularizerSpec::validate() const {
    switch (kind) {
        case RegularizerKind::None: break;
        case RegularizerKind::L1Penalty:
            if (!(strength >= 0.0) || !std::isfinite(strength)) {
                throw DomainError("l1 penalty needs lambda >= 0");
            }
            break;
        case RegularizerKind::CovShrinkage:
            if (!(strength >= 0.0 && strength <= 1.0)) {
                throw DomainError("shrinkage needs delta in [0, 1]");
            }
            break;
    }
}

std::string to_string(const RegularizerSpec& spec) {
    switch (spec.kind) {
        case RegularizerKind::None: return "none";
        case RegularizerKind::L1Penalty: return "l1:" + format_roundtrip(spec.strength);
        case RegularizerKind::CovShrinkage: return "shrink:" + format_roundtrip(spec.strength);
    }
    return "none";
}

Matrix shrink_covariance(const Matrix& cov, double delta) {
    if (cov.rows() != cov.cols()) {
        throw DimensionError("covariance must be square", static_cast<std::size_t>(cov.rows()),
                             static_cast<std::size_t>(cov.cols()));
    }
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw DomainError("shrinkage delta must lie in [0, 1], got " + std::to_string(delta));
    }
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
        throw DomainError("covariance is not symmetric");
    }
    const auto N = cov.rows();
    const double level = cov.trace() / static_cast<double>(N);
    Matrix out = (1.0 - delta) * cov;
    out.diagonal().array() += delta * level;
    return out;
}

LinearProgram split_weights_with_penalty(const LinearProgram& lp, std::size_t n_assets, double lambda) {
    const auto N = static_cast<Index>(n_assets);
    const auto n = static_cast<Index>(lp.n_variables());
    const auto m = static_cast<Index>(lp.n_constraints());
    const Index rest = n - N;
    LinearProgram out;
    out.objective.resize(n + N);
    out.objective.head(N) = lp.objective.head(N).array() + lambda;
    out.objective.segment(N, N) = -lp.objective.head(N).array() + lambda;
    out.objective.tail(rest) = lp.objective.tail(rest);
    out.constraints.resize(m, n + N);
    out.constraints.leftCols(N) = lp.constraints.leftCols(N);
    out.constraints.middleCols(N, N) = -lp.constraints.leftCols(N);
    out.constraints.rightCols(rest) = lp.constraints.rightCols(rest);
    out.rhs = lp.rhs;
    out.relations = lp.relations;
    out.lower.resize(n + N);
    out.upper.resize(n + N);
    out.lower.head(2 * N).setZero();
    out.upper.head(2 * N).setConstant(kInf);
    out.lower.tail(rest) = lp.lower.tail(rest);
    out.upper.tail(rest) = lp.upper.tail(rest);
    return out;
}

OptimizationOutcome optimize_es_l1(const ReturnSample& sample, double alpha, double budget, double lambda,
                                   const OptimizeOptions& options) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("l1 penalty lambda must be >= 0");
    }
    if (lambda == 0.0) {
        return optimize_es(sample, alpha, budget, options);
    }
    if (budget == 0.0) {
        throw DomainError("budget must be nonzero");
    }
    return penalized_budget_program(build_es_lp(sample, alpha, budget), RiskSpec(Measure::HistoricalES, alpha),
                                    sample, budget, lambda, options);
}

OptimizationOutcome optimize_maximal_loss_l1(const ReturnSample& sample, double budget, double lambda,
                                             const OptimizeOptions& options) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("l1 penalty lambda must be >= 0");
    }
    if (lambda == 0.0) {
        return optimize_maximal_loss(sample, budget, options);
    }
    if (budget == 0.0) {
        throw DomainError("budget must be nonzero");
    }
    return penalized_budget_program(build_maximal_loss_lp(sample, budget), RiskSpec::maximal_loss(), sample,
                                    budget, lambda, options);
}

double critical_lambda(const ReturnSample& sample, double alpha, double budget) {
    const OptimizeOptions status_only{false};
    if (optimize_es(sample, alpha, budget, status_only).feasible()) {
        return 0.0;
    }
    double hi = sample.returns().cwiseAbs().maxCoeff();
    for (int guard = 0; !optimize_es_l1(sample, alpha, budget, hi, status_only).feasible(); ++guard) {
        if (guard > 60) {
            throw NumericalError("no feasible l1 penalty found");
        }
        hi *= 2.0;
    }
    double lo = 0.0;
    while (hi - lo > 1e-4 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (optimize_es_l1(sample, alpha, budget, mid, status_only).feasible()) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

OptimizationOutcome optimize_regularized(const ReturnSample& sample, const RiskSpec& spec, double budget,
                                         const RegularizerSpec& reg, const OptimizeOptions& options) {
    reg.validate();
    switch (reg.kind) {
        case RegularizerKind::None: return optimize(sample, spec, budget, options);
        case RegularizerKind::L1Penalty:
            if (spec.measure() == Measure::HistoricalES) {
                return optimize_es_l1(sample, spec.alpha(), budget, reg.strength, options);
            }
            if (spec.measure() == Measure::MaximalLoss) {
                return optimize_maximal_loss_l1(sample, budget, reg.strength, options);
            }
            throw DomainError("l1 penalty applies to hist-es and maxloss only");
        case RegularizerKind::CovShrinkage: {
            const Matrix cov = shrink_covariance(sample_covariance(sample), reg.strength);
            if (spec.measure() == Measure::Variance) {
                return optimize_variance(cov, budget);
            }
            if (spec.is_parametric()) {
                return optimize_parametric(sample_mean(sample), cov, spec, budget);
            }
            throw DomainError("covariance shrinkage applies to variance and parametric measures only");
        }
    }
    throw DomainError("unknown regularizer");
}

}  // namespace eslab
