#include "eslab/error.hpp"
#include "eslab/estimators.hpp"
#include "eslab/regularization.hpp"
#include "eslab/rng.hpp"
#include "eslab/scenario.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace eslab;

namespace {

ReturnSample two_asset_margins(std::initializer_list<double> margins) {
    // Asset 1 beats asset 2 by the given margin each period; base returns vary.
    Matrix r(static_cast<Eigen::Index>(margins.size()), 2);
    Eigen::Index t = 0;
    for (const double m : margins) {
        const double base = 0.01 * static_cast<double>((t * 7) % 5) - 0.02;
        r(t, 1) = base;
        r(t, 0) = base + m;
        ++t;
    }
    return ReturnSample(r);
}

// -min { ES_alpha(d) : sum d = 0, |d|_1 <= 1 } through its own LP over
// (d+, d-, v, u): the rate at which ES can fall per unit of l1 norm.
double steepest_l1_rate(const ReturnSample& s, double alpha) {
    const auto N = static_cast<Eigen::Index>(s.n_assets());
    const auto T = static_cast<Eigen::Index>(s.n_periods());
    const Eigen::Index n = 2 * N + 1 + T;
    LinearProgram lp = LinearProgram::nonnegative(static_cast<std::size_t>(n));
    lp.lower(2 * N) = -kInf;
    lp.objective(2 * N) = 1.0;
    lp.objective.tail(T).setConstant(1.0 / ((1.0 - alpha) * static_cast<double>(T)));
    for (Eigen::Index t = 0; t < T; ++t) {
        Vector a = Vector::Zero(n);
        a.head(N) = s.returns().row(t).transpose();
        a.segment(N, N) = -s.returns().row(t).transpose();
        a(2 * N) = 1.0;
        a(2 * N + 1 + t) = 1.0;
        lp.add_row(a, Relation::GreaterEqual, 0.0);
    }
    Vector sum = Vector::Zero(n);
    sum.head(N).setOnes();
    sum.segment(N, N).setConstant(-1.0);
    lp.add_row(sum, Relation::Equal, 0.0);
    Vector l1 = Vector::Zero(n);
    l1.head(2 * N).setOnes();
    lp.add_row(l1, Relation::LessEqual, 1.0);
    const LpOutcome out = solve(lp);
    EXPECT_EQ(out.status, LpStatus::Optimal);
    return std::max(0.0, -out.objective_value);
}

}  // namespace

TEST(ShrinkCovariance, Examples) {
    Matrix sigma(2, 2);
    sigma << 2, 0, 0, 0;
    const Matrix half = shrink_covariance(sigma, 0.5);
    EXPECT_DOUBLE_EQ(half(0, 0), 1.5);
    EXPECT_DOUBLE_EQ(half(1, 1), 0.5);
    EXPECT_DOUBLE_EQ(half(0, 1), 0.0);
    EXPECT_EQ(shrink_covariance(sigma, 0.0), sigma);
    EXPECT_EQ(shrink_covariance(sigma, 1.0), Matrix::Identity(2, 2));
}

TEST(ShrinkCovariance, TraceAndEigenvalueFloor) {
    const ReturnSample s = generate(GeneratorSpec::gaussian(1.0, 3), 12, 8);
    const Matrix cov = sample_covariance(s);
    const double level = cov.trace() / 12.0;
    for (double d : {0.0, 0.01, 0.3, 0.77, 1.0}) {
        const Matrix sh = shrink_covariance(cov, d);
        EXPECT_NEAR(sh.trace(), cov.trace(), 1e-12);
        EXPECT_LT((sh - sh.transpose()).cwiseAbs().maxCoeff(), 1e-15);
        const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(sh).eigenvalues()(0);
        EXPECT_GE(min_eig, d * level - 1e-12);
    }
}

TEST(ShrinkCovariance, Errors) {
    Matrix a(2, 2);
    a << 1, 0.5, 0.4, 1;
    EXPECT_THROW(shrink_covariance(a, 0.1), DomainError);
    EXPECT_THROW(shrink_covariance(Matrix::Identity(2, 2), 1.5), DomainError);
    EXPECT_THROW(shrink_covariance(Matrix::Identity(2, 2), -0.1), DomainError);
    EXPECT_THROW(shrink_covariance(Matrix::Zero(2, 3), 0.1), DimensionError);
}

TEST(ShrinkCovariance, VarianceNeverDegenerate) {
    for (std::size_t T : {2u, 5u, 20u, 60u}) {
        const ReturnSample s = generate(GeneratorSpec::gaussian(1.0, T), 20, T);
        EXPECT_EQ(optimize_regularized(s, RiskSpec::variance(), 20.0, RegularizerSpec::parse("none")).status ==
                      OptimizationStatus::Degenerate,
                  T <= 20);
        for (double d : {0.01, 0.1, 0.5, 1.0}) {
            const RegularizerSpec reg{RegularizerKind::CovShrinkage, d};
            EXPECT_TRUE(optimize_regularized(s, RiskSpec::variance(), 20.0, reg).feasible()) << T << ' ' << d;
        }
    }
}

TEST(OptimizeEsL1, ZeroPenaltyIsPlainEs) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ReturnSample s = generate(GeneratorSpec::gaussian(0.01, seed), 5, 12 + seed);
        const OptimizationOutcome a = optimize_es(s, 0.8, 5.0);
        const OptimizationOutcome b = optimize_es_l1(s, 0.8, 5.0, 0.0);
        ASSERT_EQ(a.status, b.status);
        if (a.feasible()) {
            EXPECT_EQ(a.portfolio->weights(), b.portfolio->weights());
            EXPECT_EQ(a.risk_value, b.risk_value);
        } else {
            EXPECT_EQ(a.direction, b.direction);
        }
    }
    EXPECT_THROW(optimize_es_l1(generate(GeneratorSpec::gaussian(), 2, 5), 0.8, 2.0, -1.0), DomainError);
}

TEST(OptimizeEsL1, PenalizedObjectiveAndRawEs) {
    const ReturnSample s = generate(GeneratorSpec::gaussian(0.01, 9), 4, 50);
    const double lambda = 0.002;
    const OptimizationOutcome out = optimize_es_l1(s, 0.9, 4.0, lambda);
    ASSERT_TRUE(out.feasible());
    ASSERT_TRUE(out.raw_risk.has_value());
    const Vector& w = out.portfolio->weights();
    EXPECT_NEAR(*out.raw_risk, historical_es(s, *out.portfolio, 0.9), 1e-12);
    EXPECT_NEAR(out.risk_value, *out.raw_risk + lambda * w.lpNorm<1>(), 1e-7);
    // Never above the penalized objective of the plain ES optimum.
    const OptimizationOutcome plain = optimize_es(s, 0.9, 4.0);
    EXPECT_LE(out.risk_value, plain.risk_value + lambda * plain.portfolio->weights().lpNorm<1>() + 1e-9);
}

TEST(OptimizeEsL1, HeavyPenaltyReachesMinimumL1Portfolio) {
    const ReturnSample s = generate(GeneratorSpec::gaussian(1.0, 4), 3, 20);
    // min sum |w| s.t. sum w = 3 as its own LP over (w+, w-).
    LinearProgram lp = LinearProgram::nonnegative(6);
    lp.objective.setOnes();
    Vector row(6);
    row << 1, 1, 1, -1, -1, -1;
    lp.add_row(row, Relation::Equal, 3.0);
    const LpOutcome l1 = solve(lp);
    ASSERT_EQ(l1.status, LpStatus::Optimal);
    const OptimizationOutcome out = optimize_es_l1(s, 0.9, 3.0, 1e6);
    ASSERT_TRUE(out.feasible());
    EXPECT_NEAR(out.portfolio->weights().lpNorm<1>(), l1.objective_value, 1e-9);
    EXPECT_GE(out.portfolio->weights().minCoeff(), -1e-12);
}

TEST(OptimizeEsL1, DominanceSampleHasThreshold) {
    const ReturnSample s(oracle::dominance_returns(31, 3, 15));
    ASSERT_FALSE(optimize_es(s, 0.75, 3.0).feasible());
    const double lstar = critical_lambda(s, 0.75, 3.0);
    ASSERT_GT(lstar, 0.0);
    const OptimizationOutcome below = optimize_es_l1(s, 0.75, 3.0, 0.5 * lstar);
    ASSERT_EQ(below.status, OptimizationStatus::UnboundedBelow);
    // Penalized slope along the certificate is negative.
    const Vector& d = below.direction;
    EXPECT_LT(historical_es(loss_series(s, d), 0.75) + 0.5 * lstar * d.lpNorm<1>(), 0.0);
    EXPECT_TRUE(optimize_es_l1(s, 0.75, 3.0, lstar).feasible());
    EXPECT_TRUE(optimize_es_l1(s, 0.75, 3.0, 2.0 * lstar).feasible());
}

TEST(CriticalLambda, FeasibleSampleIsZero) {
    const ReturnSample s = generate(GeneratorSpec::gaussian(0.01, 1), 3, 60);
    ASSERT_TRUE(optimize_es(s, 0.9, 3.0).feasible());
    EXPECT_EQ(critical_lambda(s, 0.9, 3.0), 0.0);
}

TEST(CriticalLambda, TwoAssetRateBalance) {
    // Tail of d = (1, -1) losses at alpha = 0.5 over four periods: the margins
    // 0.01 and 0.02, mean 0.015, against the penalty rate |d|_1 = 2.
    const ReturnSample s = two_asset_margins({0.01, 0.02, 0.03, 0.04});
    EXPECT_NEAR(critical_lambda(s, 0.5, 2.0), 0.0075, 0.0075 * 1e-3);
    // Two periods: the tail is the single smaller margin.
    const ReturnSample short_sample = two_asset_margins({0.01, 0.02});
    EXPECT_NEAR(critical_lambda(short_sample, 0.5, 2.0), 0.005, 0.005 * 1e-3);
}

TEST(CriticalLambda, MatchesSteepestRateOracle) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const ReturnSample s(oracle::dominance_returns(seed, 2 + seed % 4, 6 + seed % 20));
        const double alpha = 0.5 + 0.04 * static_cast<double>(seed % 10);
        const double expected = steepest_l1_rate(s, alpha);
        EXPECT_NEAR(critical_lambda(s, alpha, static_cast<double>(s.n_assets())), expected, 2e-4 * expected)
            << "seed " << seed;
    }
}

TEST(CriticalLambda, PermutationInvariant) {
    const Matrix r = oracle::dominance_returns(8, 4, 12);
    Matrix p(r.rows(), 4);
    p << r.col(2), r.col(0), r.col(3), r.col(1);
    EXPECT_NEAR(critical_lambda(ReturnSample(r), 0.8, 4.0), critical_lambda(ReturnSample(p), 0.8, 4.0), 2e-4 * critical_lambda(ReturnSample(r), 0.8, 4.0));
}

TEST(CriticalLambda, BoundedByLargestReturn) {
    for (std::uint64_t seed = 100; seed < 150; ++seed) {
        const ReturnSample s(oracle::dominance_returns(seed, 3, 10));
        const double bound = s.returns().cwiseAbs().maxCoeff();
        const double l = critical_lambda(s, 0.9, 3.0);
        EXPECT_GT(l, 0.0);
        EXPECT_LE(l, bound);
        EXPECT_TRUE(optimize_es_l1(s, 0.9, 3.0, 2.0 * l).feasible());
        EXPECT_FALSE(optimize_es_l1(s, 0.9, 3.0, 0.5 * l).feasible());
    }
}

TEST(RegularizerSpec, Parse) {
    EXPECT_EQ(RegularizerSpec::parse("none").kind, RegularizerKind::None);
    const RegularizerSpec l1 = RegularizerSpec::parse("l1:0.25");
    EXPECT_EQ(l1.kind, RegularizerKind::L1Penalty);
    EXPECT_DOUBLE_EQ(l1.strength, 0.25);
    const RegularizerSpec sh = RegularizerSpec::parse("shrink:0.1");
    EXPECT_EQ(sh.kind, RegularizerKind::CovShrinkage);
    EXPECT_EQ(to_string(sh), "shrink:0.1");
    EXPECT_THROW(RegularizerSpec::parse("shrink:2"), DomainError);
    EXPECT_THROW(RegularizerSpec::parse("l1:-1"), DomainError);
    EXPECT_THROW(RegularizerSpec::parse("l2:1"), ParseError);
    EXPECT_THROW(RegularizerSpec::parse("l1:abc"), ParseError);
}

TEST(RegularizerSpec, MeasurePairing) {
    const ReturnSample s = generate(GeneratorSpec::gaussian(0.01, 2), 3, 30);
    EXPECT_THROW(optimize_regularized(s, RiskSpec::variance(), 3.0, RegularizerSpec::parse("l1:0.1")), DomainError);
    EXPECT_THROW(optimize_regularized(s, RiskSpec(Measure::HistoricalES, 0.9), 3.0, RegularizerSpec::parse("shrink:0.1")),
                 DomainError);
    EXPECT_TRUE(optimize_regularized(s, RiskSpec::maximal_loss(), 3.0, RegularizerSpec::parse("l1:0.1")).feasible());
    EXPECT_TRUE(
        optimize_regularized(s, RiskSpec(Measure::ParametricES, 0.95), 3.0, RegularizerSpec::parse("shrink:0.2")).feasible());
}
