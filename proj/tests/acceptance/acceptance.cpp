// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every selected criterion passes. Optional arguments select criteria by number.

#include "cli.hpp"

#include "eslab/error.hpp"
#include "eslab/estimators.hpp"
#include "eslab/experiments.hpp"
#include "eslab/optimizer.hpp"
#include "eslab/regularization.hpp"
#include "eslab/rng.hpp"
#include "eslab/scenario.hpp"
#include "eslab/simplex.hpp"

#include "support/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace eslab;

namespace {

// Pinned tolerances.
constexpr double kMinimaxLow = 0.48;
constexpr double kMinimaxHigh = 0.52;
constexpr std::size_t kSmallCaseTrials = 1'000'000;
constexpr double kSmallCaseSigmas = 3.0;
constexpr std::size_t kBruteForcePerCell = 400;
constexpr double kVarianceExponentTol = 0.05;
constexpr double kUniversalExponentTol = 0.15;
constexpr double kParametricLow = 0.9;
constexpr double kParametricHigh = 1.05;
constexpr double kSquareFrequency = 0.99;
constexpr double kAnalyticLambdaRel = 1e-3;
constexpr double kCoherenceTol = 1e-7;
constexpr double kVertexTol = 1e-7;

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            detail << "FIRST FAILURE: " << what << "; ";
        }
        pass = pass && ok;
    }
};

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "eslab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> csv_rows(const std::string& text) {
    std::vector<std::string> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.front() != '#') rows.push_back(line);
    }
    return rows;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string item; std::getline(ss, item, ',');) f.push_back(item);
    return f;
}

ReturnSample gaussian(std::uint64_t seed, std::size_t n, std::size_t t) {
    return generate(GeneratorSpec::gaussian(1.0, seed), n, t);
}

// 1. Minimax endpoint through the command-line tool.
void minimax_endpoint(Verdict& v) {
    const auto r = run_cli({"phase", "--measure", "maxloss", "--n", "100", "--trials", "400", "--workers", "1"});
    v.require(r.code == 0, "exit code " + std::to_string(r.code) + " " + r.err);
    const auto rows = csv_rows(r.out);
    v.require(rows.size() == 2, "expected one phase row");
    if (rows.size() != 2) return;
    const auto f = split(rows[1]);
    const double rc = std::stod(f.at(1));
    v.detail << "critical_ratio=" << rc << " ci=" << f.at(2) << " range=[" << kMinimaxLow << ", " << kMinimaxHigh
             << "]";
    v.require(rc >= kMinimaxLow && rc <= kMinimaxHigh, "critical ratio out of range");
}

// 2. Exact small case and brute-force dominance agreement.
void small_case_oracle(Verdict& v) {
    double worst = 0.0;
    for (std::size_t T = 2; T <= 10; ++T) {
        const double exact = std::ldexp(1.0, 1 - static_cast<int>(T));
        const auto est = infeasibility_probability(RiskSpec::maximal_loss(), GeneratorSpec::gaussian(), 2, T,
                                                   kSmallCaseTrials, ExperimentOptions{T, 1});
        const double sigma = std::sqrt(exact * (1.0 - exact) / static_cast<double>(kSmallCaseTrials));
        const double z = std::abs(est.probability - exact) / sigma;
        worst = std::max(worst, z);
        v.require(z <= kSmallCaseSigmas, "N=2 T=" + std::to_string(T) + " off by " + std::to_string(z) + " sigma");
    }
    std::size_t samples = 0;
    std::size_t dominated = 0;
    std::size_t mismatches = 0;
    for (const std::size_t N : {3, 4}) {
        for (std::size_t T = 2; T <= 12; ++T) {
            for (std::size_t i = 0; i < kBruteForcePerCell; ++i) {
                const ReturnSample s = gaussian(trial_seed(99, N, T, i), N, T);
                const bool optimizer_says = !optimize_maximal_loss(s, static_cast<double>(N), {false}).feasible();
                // Naive check: a dominating pair, or the best zero-sum direction in the
                // unit box, found by enumerating every vertex, has a positive total gain.
                bool naive = oracle::has_pairwise_dominance(s.returns());
                if (!naive) {
                    LinearProgram lp = LinearProgram::free(N);
                    lp.lower.setConstant(-1.0);
                    lp.upper.setConstant(1.0);
                    lp.objective = -s.returns().colwise().sum().transpose();
                    for (Eigen::Index t = 0; t < s.returns().rows(); ++t) {
                        lp.add_row(s.returns().row(t).transpose(), Relation::GreaterEqual, 0.0);
                    }
                    lp.add_row(Vector::Ones(static_cast<Eigen::Index>(N)), Relation::Equal, 0.0);
                    const auto best = oracle::vertex_enumeration(lp);
                    naive = best && *best < -1e-9;
                }
                ++samples;
                dominated += naive ? 1 : 0;
                if (naive != optimizer_says) {
                    ++mismatches;
                }
            }
        }
    }
    v.require(mismatches == 0, std::to_string(mismatches) + " status mismatches");
    v.detail << "N=2 worst deviation " << worst << " sigma (limit " << kSmallCaseSigmas << ", " << kSmallCaseTrials
             << " trials per T); brute force " << samples << " samples, " << dominated << " dominated, "
             << mismatches << " mismatches";
}

// 3. Divergence exponent of the estimation error.
void divergence_exponent(Verdict& v) {
    const std::vector<double> grid{0.05, 0.1, 0.2, 0.3, 0.5};
    const ExperimentOptions opts{3, 1};
    struct Case {
        const char* name;
        GeneratorSpec gen;
        double tol;
    };
    const Case cases[] = {{"variance/gauss", GeneratorSpec::gaussian(), kVarianceExponentTol},
                          {"variance/t4", GeneratorSpec::student_t(4.0), kUniversalExponentTol},
                          {"variance/garch", GeneratorSpec::garch(0.05, 0.1, 0.85), kUniversalExponentTol}};
    for (const auto& c : cases) {
        const ScalingFit fit = fit_exponent(RiskSpec::variance(), c.gen, 1.0, 50, grid, 400, opts);
        v.detail << c.name << " " << fit.exponent << "+-" << fit.exponent_stderr << "; ";
        v.require(std::abs(fit.exponent + 0.5) <= c.tol, std::string(c.name) + " exponent");
    }
    const RiskSpec es(Measure::HistoricalES, 0.9);
    const PhasePoint line = locate_critical_ratio(es, GeneratorSpec::gaussian(), 100, 200, opts);
    const std::vector<double> es_grid{0.02, 0.03, 0.045, 0.07, 0.1, 0.15, 0.22, 0.3};
    const ScalingFit fit = fit_exponent(es, GeneratorSpec::gaussian(), line.critical_ratio, 100, es_grid, 200, opts);
    v.detail << "hist-es(0.9) rc=" << line.critical_ratio << " exponent " << fit.exponent << "+-"
             << fit.exponent_stderr << " over " << fit.points.size() << " points";
    v.require(std::abs(fit.exponent + 0.5) <= kUniversalExponentTol, "hist-es exponent");
}

// 4. Parametric endpoint.
void parametric_endpoint(Verdict& v) {
    for (const Measure m : {Measure::ParametricES, Measure::ParametricVaR}) {
        const RiskSpec spec(m, 0.999);
        const PhasePoint p = locate_critical_ratio(spec, GeneratorSpec::gaussian(), 100, 400, ExperimentOptions{4, 1});
        v.detail << measure_name(m) << " rc=" << p.critical_ratio << "+-" << p.ci_halfwidth << "; ";
        v.require(p.critical_ratio >= kParametricLow && p.critical_ratio <= kParametricHigh,
                  std::string(measure_name(m)) + " critical ratio");
        const auto sq = infeasibility_probability(spec, GeneratorSpec::gaussian(), 22, 20, 1000, ExperimentOptions{4, 1});
        v.detail << "N=T+2 frequency " << sq.probability << "; ";
        v.require(sq.probability > kSquareFrequency, std::string(measure_name(m)) + " N=T+2 frequency");
    }
}

struct DominanceCase {
    ReturnSample sample;
    double alpha;
};

DominanceCase dominance_case(std::size_t k) {
    SplitMix64 u(substream_seed(555, k));
    const std::size_t N = 2 + u() % 9;
    const std::size_t T = N + u() % 60;
    const std::size_t winner = u() % N;
    const std::size_t loser = (winner + 1 + u() % (N - 1)) % N;
    const double alpha = 0.5 + 0.49 * u.uniform_open();
    return {ReturnSample(oracle::dominance_returns(substream_seed(556, k), N, T, winner, loser)), alpha};
}

// 5. Instability mechanism along the certificate.
void instability_mechanism(Verdict& v) {
    std::size_t failures = 0;
    double largest_final = -1e300;
    for (std::size_t k = 0; k < 1000; ++k) {
        const auto [s, alpha] = dominance_case(k);
        const double B = static_cast<double>(s.n_assets());
        const OptimizationOutcome o = optimize_es(s, alpha, B);
        if (o.status != OptimizationStatus::UnboundedBelow) {
            ++failures;
            continue;
        }
        const Vector w = Vector::Ones(static_cast<Eigen::Index>(s.n_assets()));
        double prev = 0.0;
        bool ok = true;
        for (const double gamma : {1.0, 10.0, 100.0}) {
            const double es = historical_es(loss_series(s, Vector(w + gamma * o.direction)), alpha);
            if (gamma > 1.0 && !(es < prev)) ok = false;
            prev = es;
        }
        largest_final = std::max(largest_final, prev);
        if (!(prev < 0.0)) ok = false;
        failures += ok ? 0 : 1;
    }
    v.detail << "1000 samples, " << failures << " failures, max ES(w+100d)=" << largest_final;
    v.require(failures == 0, "instability property");
}

// 6. Regularization remedy.
void regularization_remedy(Verdict& v) {
    std::size_t failures = 0;
    for (std::size_t k = 0; k < 1000; ++k) {
        const auto [s, alpha] = dominance_case(k);
        const double B = static_cast<double>(s.n_assets());
        const double lambda = critical_lambda(s, alpha, B);
        const bool ok = std::isfinite(lambda) && lambda > 0.0 &&
                        optimize_es_l1(s, alpha, B, 2.0 * lambda, {false}).feasible();
        failures += ok ? 0 : 1;
    }
    v.detail << "1000 samples, " << failures << " failures; ";
    v.require(failures == 0, "2 lambda* feasibility");

    // Two assets, asset 0 beats asset 1 by a margin each period; d = (1, -1).
    const std::vector<double> margins{0.01, 0.02, 0.03, 0.04};
    Matrix r(4, 2);
    for (Eigen::Index t = 0; t < 4; ++t) {
        r(t, 1) = 0.01 * static_cast<double>((t * 7) % 5) - 0.02;
        r(t, 0) = r(t, 1) + margins[static_cast<std::size_t>(t)];
    }
    const double alpha = 0.5;
    const auto tail = static_cast<std::size_t>(std::llround((1.0 - alpha) * 4.0));
    double mean_tail_margin = 0.0;
    for (std::size_t i = 0; i < tail; ++i) mean_tail_margin += margins[i] / static_cast<double>(tail);
    const double expected = mean_tail_margin / 2.0;
    const double got = critical_lambda(ReturnSample(r), alpha, 2.0);
    v.detail << "analytic lambda*=" << got << " expected " << expected;
    v.require(std::abs(got - expected) <= kAnalyticLambdaRel * expected, "analytic lambda*");
}

// 7. Estimator/optimizer coherence and simplex cross-checks.
void coherence(Verdict& v) {
    SplitMix64 u(77);
    std::size_t feasible = 0;
    std::size_t draws = 0;
    double worst = 0.0;
    std::size_t bad_certificates = 0;
    std::size_t solves = 0;
    while (feasible < 1000) {
        const std::size_t N = 2 + u() % 19;
        const std::size_t T = std::min<std::size_t>(200, 3 * N + u() % 150);
        const std::size_t tail = 1 + u() % (T / 2);
        const double alpha = 1.0 - static_cast<double>(tail) / static_cast<double>(T);
        const ReturnSample s = gaussian(substream_seed(78, draws++), N, T);
        const double B = static_cast<double>(N);
        const LinearProgram lp = build_es_lp(s, alpha, B);
        const LpOutcome raw = solve(lp);
        ++solves;
        bad_certificates += verify_certificate(lp, raw) ? 0 : 1;
        const OptimizationOutcome o = optimize_es(s, alpha, B, {false});
        if (!o.feasible()) continue;
        ++feasible;
        const LossSeries losses = loss_series(s, *o.portfolio);
        const double sorted = historical_es(losses, alpha);
        const double kinks = oracle::es_by_candidates(losses.losses, alpha);
        const double scale = std::max(1.0, std::abs(sorted));
        worst = std::max({worst, std::abs(o.risk_value - sorted) / scale, std::abs(sorted - kinks) / scale});
    }
    v.detail << feasible << " feasible of " << draws << ", worst gap " << worst << "; ";
    v.require(worst <= kCoherenceTol, "LP optimum vs sort-based ES");

    SplitMix64 lu(2718);
    NormalSampler g(2719);
    std::size_t vertex_mismatch = 0;
    std::size_t compared = 0;
    for (int rep = 0; rep < 3000; ++rep) {
        const int n = 1 + static_cast<int>(lu() % 3);
        const int m = static_cast<int>(lu() % 6);
        LinearProgram lp = oracle::random_boxed_lp(lu, g, n, m, rep % 2 == 0);
        const auto expected = oracle::vertex_enumeration(lp);
        const LpOutcome out = solve(lp);
        ++solves;
        bad_certificates += verify_certificate(lp, out) ? 0 : 1;
        ++compared;
        const bool match = expected ? out.status == LpStatus::Optimal &&
                                          std::abs(out.objective_value - *expected) <=
                                              kVertexTol * std::max(1.0, std::abs(*expected))
                                    : out.status == LpStatus::Infeasible;
        vertex_mismatch += match ? 0 : 1;
        // Drop the upper bounds to exercise unbounded outcomes as well.
        lp.upper.setConstant(kInf);
        const LpOutcome open = solve(lp);
        ++solves;
        bad_certificates += verify_certificate(lp, open) ? 0 : 1;
    }
    v.detail << compared << " random LPs vs vertex enumeration, " << vertex_mismatch << " mismatches; " << solves
             << " solves, " << bad_certificates << " failed certificates";
    v.require(vertex_mismatch == 0, "vertex enumeration");
    v.require(bad_certificates == 0, "certificates");
}

// 8. Determinism across worker counts.
void determinism(Verdict& v) {
    const std::vector<std::vector<std::string>> runs{
        {"phase", "--measure", "hist-es", "--alphas", "0.8,0.9", "--n", "12", "--trials", "150", "--seed", "21"},
        {"scaling", "--measure", "variance", "--n", "20", "--trials", "60", "--distances", "0.05,0.1,0.2,0.3,0.5",
         "--seed", "22"},
        {"probability", "--measure", "maxloss", "--n", "20", "--t", "40", "--trials", "2000", "--seed", "23"},
        {"probability", "--measure", "param-var", "--alpha", "0.99", "--n", "30", "--t", "40", "--trials", "500",
         "--seed", "24", "--gen", "garch:0.05,0.1,0.85"},
    };
    std::size_t identical = 0;
    for (const auto& base : runs) {
        std::string first;
        bool same = true;
        for (const char* workers : {"1", "2", "4"}) {
            auto args = base;
            args.insert(args.end(), {"--workers", workers});
            const auto r = run_cli(args);
            v.require(r.code == 0, base[0] + " failed: " + r.err);
            if (first.empty()) first = r.out;
            same = same && r.out == first;
        }
        identical += same ? 1 : 0;
        v.require(same, base[0] + " output differs across worker counts");
    }
    v.detail << identical << " of " << runs.size() << " experiments byte-identical at 1, 2 and 4 workers";
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria{
        {"minimax endpoint", minimax_endpoint},
        {"exact small-case oracle", small_case_oracle},
        {"divergence exponent", divergence_exponent},
        {"parametric endpoint", parametric_endpoint},
        {"instability mechanism", instability_mechanism},
        {"regularization remedy", regularization_remedy},
        {"estimator/optimizer coherence", coherence},
        {"determinism", determinism},
    };
    std::set<std::size_t> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::stoul(argv[i]));

    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const std::size_t id = i + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(v);
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %zu %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first,
                    v.detail.str().c_str(), secs);
        std::fflush(stdout);
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
