#include "eslab/experiments.hpp"

#include "eslab/error.hpp"
#include "eslab/parallel.hpp"
#include "eslab/rng.hpp"
#include "eslab/sample_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace eslab {
namespace {

constexpr double kZ95 = 1.959963984540054;

ReturnSample draw(const GeneratorSpec& gen, std::size_t n_assets, std::size_t n_periods, std::uint64_t seed) {
    GeneratorSpec g = gen;
    g.seed = seed;
    return generate(g, n_assets, n_periods);
}

OptimizationOutcome solve_trial(const RiskSpec& spec, const ReturnSample& sample) {
    return optimize(sample, spec, static_cast<double>(sample.n_assets()), OptimizeOptions{false});
}

std::string num(double v) { return format_significant(v, 12); }

}  // namespace

std::uint64_t trial_seed(std::uint64_t master, std::size_t n_assets, std::size_t n_periods, std::size_t trial) noexcept {
    return substream_seed(substream_seed(substream_seed(master, n_assets), n_periods), trial);
}

bool trial_infeasible(const RiskSpec& spec, const GeneratorSpec& gen, std::size_t n_assets, std::size_t n_periods,
                      std::uint64_t seed) {
    if (n_assets == 1) {
        return false;
    }
    return !solve_trial(spec, draw(gen, n_assets, n_periods, seed)).feasible();
}

double ProbabilityEstimate::standard_error() const noexcept {
    if (trials == 0) {
        return 0.0;
    }
    return std::sqrt(probability * (1.0 - probability) / static_cast<double>(trials));
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n) {
    if (n == 0) {
        return {0.0, 1.0};
    }
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = kZ95 * kZ95;
    const double centre = (p + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
    const double half = kZ95 * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / (1.0 + z2 / nn);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

ProbabilityEstimate infeasibility_probability(const RiskSpec& spec, const GeneratorSpec& gen, std::size_t n_assets,
                                              std::size_t n_periods, std::size_t trials,
                                              const ExperimentOptions& options) {
    if (trials < 1) {
        throw DomainError("infeasibility_probability needs trials >= 1");
    }
    if (spec.measure() == Measure::HistoricalVaR) {
        throw DomainError("historical VaR is not optimizable");
    }
    gen.validate();
    ProbabilityEstimate est;
    est.trials = trials;
    if (n_assets > 1) {
        const auto flags = parallel_map(trials, options.workers, [&](std::size_t i) -> char {
            return trial_infeasible(spec, gen, n_assets, n_periods, trial_seed(options.seed, n_assets, n_periods, i));
        });
        est.infeasible = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), char{1}));
    }
    est.probability = static_cast<double>(est.infeasible) / static_cast<double>(trials);
    std::tie(est.ci_low, est.ci_high) = wilson_interval(est.infeasible, trials);
    return est;
}

PhasePoint locate_critical_ratio(const RiskSpec& spec, const GeneratorSpec& gen, std::size_t n_assets,
                                 std::size_t trials, const ExperimentOptions& options) {
    if (n_assets < 8) {
        throw DomainError("locate_critical_ratio needs N >= 8");
    }
    const std::size_t t_max = 100 * n_assets;
    std::map<std::size_t, double> probes;
    auto p_at = [&](std::size_t T) {
        auto it = probes.find(T);
        if (it == probes.end()) {
            it = probes.emplace(T, infeasibility_probability(spec, gen, n_assets, T, trials, options).probability)
                     .first;
        }
        return it->second;
    };
    auto bracket_failure = [&](const std::string& why) {
        return Error("bracket failure: " + why + " (" + std::string(measure_name(spec.measure())) +
                     ", alpha=" + num(spec.alpha()) + ", N=" + std::to_string(n_assets) + ")");
    };

    std::size_t lo = n_assets;
    if (p_at(lo) < 0.5) {
        throw bracket_failure("infeasibility probability already below 1/2 at T = N");
    }
    std::size_t hi = lo;
    while (p_at(hi) >= 0.5) {
        lo = hi;
        if (hi == t_max) {
            throw bracket_failure("infeasibility probability still >= 1/2 at T = 100 N");
        }
        hi = std::min(2 * hi, t_max);
    }
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        (p_at(mid) >= 0.5 ? lo : hi) = mid;
    }

    // Local linear fit of p against N/T around the bracket.
    const std::size_t from = std::max(n_assets, lo >= 3 ? lo - 3 : 0);
    const std::size_t to = std::min(t_max, hi + 3);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t used = 0;
    for (std::size_t T = from; T <= to; ++T) {
        const double p = p_at(T);
        if (p <= 0.02 || p >= 0.98) {
            continue;
        }
        const double x = static_cast<double>(n_assets) / static_cast<double>(T);
        sx += x;
        sy += p;
        sxx += x * x;
        sxy += x * p;
        ++used;
    }
    const double n_d = static_cast<double>(n_assets);
    const double r_lo = n_d / static_cast<double>(lo);  // p >= 1/2 side
    const double r_hi = n_d / static_cast<double>(hi);
    PhasePoint point;
    point.alpha = spec.alpha();
    point.n_assets = n_assets;
    point.trials_per_T = trials;
    double ratio = 0.0;
    double half = 0.0;
    const double u = static_cast<double>(used);
    const double sxx_c = used > 0 ? sxx - sx * sx / u : 0.0;
    const double slope = used >= 2 && sxx_c > 0.0 ? (sxy - sx * sy / u) / sxx_c : 0.0;
    if (slope > 0.0) {
        ratio = sx / u + (0.5 - sy / u) / slope;
        ratio = std::clamp(ratio, r_hi, r_lo);
        half = kZ95 * std::sqrt(0.25 / (static_cast<double>(trials) * u)) / slope;
    } else {
        // Transition sharper than one step in T: interpolate across the bracket.
        const double p_lo = p_at(lo);
        const double p_hi = p_at(hi);
        const double f = p_lo > p_hi ? (p_lo - 0.5) / (p_lo - p_hi) : 0.5;
        ratio = r_lo + f * (r_hi - r_lo);
        half = 0.0;
    }
    point.critical_ratio = ratio;
    point.ci_halfwidth = std::max(half, 0.5 * (r_lo - r_hi));
    point.probes.assign(probes.begin(), probes.end());
    return point;
}

std::vector<PhasePoint> trace_phase_line(Measure measure, const GeneratorSpec& gen, std::vector<double> alphas,
                                         std::size_t n_assets, std::size_t trials, const ExperimentOptions& options) {
    std::sort(alphas.begin(), alphas.end());
    std::vector<PhasePoint> line;
    line.reserve(alphas.size());
    for (const double alpha : alphas) {
        const RiskSpec spec(measure, alpha);
        try {
            line.push_back(locate_critical_ratio(spec, gen, n_assets, trials, options));
        } catch (const Error& e) {
            PhasePoint failed;
            failed.alpha = alpha;
            failed.n_assets = n_assets;
            failed.trials_per_T = trials;
            failed.failed = true;
            failed.error = e.what();
            line.push_back(std::move(failed));
        }
    }
    return line;
}

ErrorEstimate estimation_error(const RiskSpec& spec, const GeneratorSpec& gen, std::size_t n_assets,
                               std::size_t n_periods, std::size_t trials, const ExperimentOptions& options) {
    if (trials < 1) {
        throw DomainError("estimation_error needs trials >= 1");
    }
    gen.validate();
    // q0 per trial, or NaN for a discarded (infeasible) draw.
    const auto q = parallel_map(trials, options.workers, [&](std::size_t i) {
        const ReturnSample sample = draw(gen, n_assets, n_periods, trial_seed(options.seed, n_assets, n_periods, i));
        const OptimizationOutcome out = solve_trial(spec, sample);
        if (!out.feasible()) {
            return std::nan("");
        }
        return out.portfolio->weights().norm() / std::sqrt(static_cast<double>(n_assets));
    });
    ErrorEstimate est;
    double sum = 0.0;
    double sum2 = 0.0;
    for (const double v : q) {
        if (std::isnan(v)) {
            ++est.discarded;
            continue;
        }
        ++est.feasible;
        sum += v;
        sum2 += v * v;
    }
    if (2 * est.discarded > trials) {
        throw DomainError("too close to critical: " + std::to_string(est.discarded) + " of " +
                          std::to_string(trials) + " samples infeasible at N=" + std::to_string(n_assets) +
                          ", T=" + std::to_string(n_periods));
    }
    const double n = static_cast<double>(est.feasible);
    est.mean_q0 = sum / n;
    if (est.feasible > 1) {
        const double var = std::max(0.0, (sum2 - n * est.mean_q0 * est.mean_q0) / (n - 1.0));
        est.standard_error = std::sqrt(var / n);
    }
    return est;
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw DimensionError("fit_power_law: x and y differ in length", x.size(), y.size());
    }
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    const std::size_t n = lx.size();
    if (n < 5) {
        throw DomainError("fit underdetermined: " + std::to_string(n) + " valid points, need 5");
    }
    const auto [mn, mx] = std::minmax_element(lx.begin(), lx.end());
    if (*mx - *mn < std::log(10.0) - 1e-12) {
        throw DomainError("fit underdetermined: distances span less than one decade");
    }
    const double nd = static_cast<double>(n);
    double mxv = 0.0, myv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mxv += lx[i];
        myv += ly[i];
    }
    mxv /= nd;
    myv /= nd;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mxv) * (lx[i] - mxv);
        sxy += (lx[i] - mxv) * (ly[i] - myv);
    }
    PowerLawFit fit;
    fit.exponent = sxy / sxx;
    fit.log_prefactor = myv - fit.exponent * mxv;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - fit.log_prefactor - fit.exponent * lx[i];
        rss += r * r;
    }
    fit.exponent_stderr = std::sqrt(rss / (nd - 2.0) / sxx);
    return fit;
}

ScalingFit fit_exponent(const RiskSpec& spec, const GeneratorSpec& gen, double critical_ratio,
                        std::size_t n_assets, const std::vector<double>& distances, std::size_t trials,
                        const ExperimentOptions& options) {
    if (!(critical_ratio > 0.0)) {
        throw DomainError("fit_exponent needs a located critical ratio > 0");
    }
    ScalingFit fit;
    fit.spec = spec;
    fit.critical_ratio = critical_ratio;
    std::vector<double> dist;
    std::vector<double> err;
    for (const double d : distances) {
        const double target = critical_ratio - d;
        if (!(d > 0.0) || !(target > 0.0)) {
            continue;
        }
        // Largest T not farther from the transition than asked, unless that reaches it.
        auto T = static_cast<std::size_t>(std::floor(static_cast<double>(n_assets) / target));
        if (T == 0 || critical_ratio - static_cast<double>(n_assets) / static_cast<double>(T) <= 0.0) {
            ++T;
        }
        const double actual = critical_ratio - static_cast<double>(n_assets) / static_cast<double>(T);
        if (!(actual > 0.0) || T < 2) {
            continue;
        }
        try {
            const ErrorEstimate e = estimation_error(spec, gen, n_assets, T, trials, options);
            fit.points.push_back(ScalingPoint{actual, T, e.mean_q0, e.standard_error, e.discarded});
            dist.push_back(actual);
            err.push_back(e.mean_q0);
        } catch (const DomainError&) {
            // Too close to the transition for a conditional average.
        }
    }
    const PowerLawFit law = fit_power_law(dist, err);
    fit.exponent = law.exponent;
    fit.exponent_stderr = law.exponent_stderr;
    return fit;
}

std::string phase_csv(const std::vector<PhasePoint>& points) {
    std::ostringstream out;
    out << "alpha,critical_ratio,ci,N,trials,status\n";
    for (const auto& p : points) {
        out << num(p.alpha) << ',';
        if (p.failed) {
            out << ",," << p.n_assets << ',' << p.trials_per_T << ",bracket_failure\n";
        } else {
            out << num(p.critical_ratio) << ',' << num(p.ci_halfwidth) << ',' << p.n_assets << ','
                << p.trials_per_T << ",ok\n";
        }
    }
    return out.str();
}

std::string scaling_csv(const ScalingFit& fit) {
    std::ostringstream out;
    out << "distance,T,q0,stderr,discarded\n";
    for (const auto& p : fit.points) {
        out << num(p.distance) << ',' << p.n_periods << ',' << num(p.q0) << ',' << num(p.q0_stderr) << ','
            << p.discarded << '\n';
    }
    out << "# exponent=" << num(fit.exponent) << " stderr=" << num(fit.exponent_stderr)
        << " critical_ratio=" << num(fit.critical_ratio) << '\n';
    return out.str();
}

std::string probability_csv(const RiskSpec& spec, std::size_t n_assets, std::size_t n_periods,
                            const ProbabilityEstimate& e) {
    std::ostringstream out;
    out << "measure,alpha,N,T,trials,infeasible,probability,ci_low,ci_high\n";
    out << measure_name(spec.measure()) << ',' << num(spec.alpha()) << ',' << n_assets << ',' << n_periods << ','
        << e.trials << ',' << e.infeasible << ',' << num(e.probability) << ',' << num(e.ci_low) << ','
        << num(e.ci_high) << '\n';
    return out.str();
}

std::string phase_json(const std::vector<PhasePoint>& points) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : points) {
        nlohmann::ordered_json j;
        j["alpha"] = p.alpha;
        j["N"] = p.n_assets;
        j["trials"] = p.trials_per_T;
        if (p.failed) {
            j["status"] = "bracket_failure";
            j["error"] = p.error;
        } else {
            j["status"] = "ok";
            j["critical_ratio"] = p.critical_ratio;
            j["ci"] = p.ci_halfwidth;
            nlohmann::ordered_json probes = nlohmann::ordered_json::array();
            for (const auto& [T, prob] : p.probes) {
                probes.push_back({{"T", T}, {"probability", prob}});
            }
            j["probes"] = std::move(probes);
        }
        arr.push_back(std::move(j));
    }
    return arr.dump();
}

std::string scaling_json(const ScalingFit& fit) {
    nlohmann::ordered_json j;
    j["measure"] = measure_name(fit.spec.measure());
    j["alpha"] = fit.spec.alpha();
    j["critical_ratio"] = fit.critical_ratio;
    j["exponent"] = fit.exponent;
    j["stderr"] = fit.exponent_stderr;
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const auto& p : fit.points) {
        pts.push_back({{"distance", p.distance},
                       {"T", p.n_periods},
                       {"q0", p.q0},
                       {"stderr", p.q0_stderr},
                       {"discarded", p.discarded}});
    }
    j["points"] = std::move(pts);
    return j.dump();
}

std::string probability_json(const ProbabilityEstimate& e) {
    nlohmann::ordered_json j;
    j["trials"] = e.trials;
    j["infeasible"] = e.infeasible;
    j["probability"] = e.probability;
    j["ci_low"] = e.ci_low;
    j["ci_high"] = e.ci_high;
    return j.dump();
}

}  // namespace eslab
