#include "cli.hpp"

#include "eslab/error.hpp"
#include "eslab/estimators.hpp"
#include "eslab/experiments.hpp"
#include "eslab/optimizer.hpp"
#include "eslab/parallel.hpp"
#include "eslab/sample_io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

namespace eslab::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kVersion = "0.1.0";

std::string num(double v) { return format_significant(v, 12); }

std::string join(const std::vector<double>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        s += (i ? "," : "") + format_roundtrip(values[i]);
    }
    return s;
}

double parse_number(std::string_view text, std::string_view what) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw ParseError(std::string(what) + ": not a number: '" + std::string(text) + "'");
    }
    return v;
}

bool is_experiment(Command c) {
    return c == Command::Phase || c == Command::Scaling || c == Command::Probability;
}

ReturnSample obtain_sample(const RunConfig& c) {
    if (c.input) {
        return load_sample(*c.input);
    }
    GeneratorSpec g = *c.generator;
    g.seed = c.seed;
    return generate(g, c.n_assets, c.n_periods);
}

ExperimentOptions experiment_options(const RunConfig& c) { return ExperimentOptions{c.seed, c.workers}; }

/// Result of one command before it is wrapped with provenance.
struct Artifact {
    std::string csv;
    ordered_json json;
    int exit_code = kExitOk;
    std::string diagnostic;
};

Artifact do_estimate(const RunConfig& c) {
    const ReturnSample sample = obtain_sample(c);
    const Portfolio p = parse_weights(c.weights, sample.n_assets());
    const RiskSpec spec = c.risk_spec();
    const double risk = evaluate_risk(sample, p, spec);
    Artifact a;
    a.csv = "measure,alpha,N,T,budget,risk\n" + std::string(measure_name(spec.measure())) + ',' + num(spec.alpha()) +
            ',' + std::to_string(sample.n_assets()) + ',' + std::to_string(sample.n_periods()) + ',' +
            num(p.budget()) + ',' + num(risk) + '\n';
    a.json = {{"measure", measure_name(spec.measure())}, {"alpha", spec.alpha()}, {"N", sample.n_assets()},
              {"T", sample.n_periods()},                 {"budget", p.budget()},  {"risk", risk}};
    return a;
}

Artifact do_optimize(const RunConfig& c) {
    const ReturnSample sample = obtain_sample(c);
    const double budget = c.budget.value_or(static_cast<double>(sample.n_assets()));
    const OptimizationOutcome o = optimize_regularized(sample, c.risk_spec(), budget, c.reg);
    Artifact a;
    a.json = ordered_json::parse(to_json(o));
    std::ostringstream csv;
    csv << "# status=" << status_name(o.status);
    if (o.feasible()) {
        csv << " risk_value=" << num(o.risk_value);
        if (o.raw_risk) {
            csv << " raw_risk=" << num(*o.raw_risk);
        }
        csv << " budget=" << num(o.portfolio->budget()) << "\nasset,weight\n";
        const Vector& w = o.portfolio->weights();
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            csv << i << ',' << num(w(i)) << '\n';
        }
    } else {
        csv << "\nasset,direction\n";
        for (Eigen::Index i = 0; i < o.direction.size(); ++i) {
            csv << i << ',' << num(o.direction(i)) << '\n';
        }
    }
    a.csv = csv.str();
    if (o.status == OptimizationStatus::UnboundedBelow) {
        a.exit_code = kExitUnbounded;
        a.diagnostic = "optimization unbounded below: the sample admits a dominating zero-sum direction";
    }
    return a;
}

Artifact do_phase(const RunConfig& c) {
    std::vector<double> alphas = c.alphas.empty() ? std::vector<double>{c.alpha} : c.alphas;
    if (c.measure == Measure::MaximalLoss) {
        alphas = {1.0};
    }
    GeneratorSpec gen = *c.generator;
    const auto line = trace_phase_line(c.measure, gen, alphas, c.n_assets, c.trials, experiment_options(c));
    Artifact a;
    a.csv = phase_csv(line);
    a.json = ordered_json::parse(phase_json(line));
    for (const auto& p : line) {
        if (p.failed) {
            a.exit_code = kExitError;
            a.diagnostic += (a.diagnostic.empty() ? "" : "\n") + p.error;
        }
    }
    return a;
}

Artifact do_scaling(const RunConfig& c) {
    const RiskSpec spec = c.risk_spec();
    double rc = 0.0;
    if (c.critical_ratio) {
        rc = *c.critical_ratio;
    } else if (spec.measure() == Measure::Variance) {
        rc = 1.0;  // the covariance matrix turns singular at T = N
    } else {
        rc = locate_critical_ratio(spec, *c.generator, c.n_assets, c.trials, experiment_options(c)).critical_ratio;
    }
    const ScalingFit fit = fit_exponent(spec, *c.generator, rc, c.n_assets, c.distances, c.trials, experiment_options(c));
    return Artifact{scaling_csv(fit), ordered_json::parse(scaling_json(fit)), kExitOk, {}};
}

Artifact do_probability(const RunConfig& c) {
    const RiskSpec spec = c.risk_spec();
    const auto est =
        infeasibility_probability(spec, *c.generator, c.n_assets, c.n_periods, c.trials, experiment_options(c));
    return Artifact{probability_csv(spec, c.n_assets, c.n_periods, est), ordered_json::parse(probability_json(est)),
                    kExitOk, {}};
}

Artifact do_generate(const RunConfig& c) {
    const ReturnSample sample = obtain_sample(c);
    std::ostringstream csv;
    write_sample_csv(csv, sample);
    return Artifact{csv.str(), ordered_json::parse(sample_to_json(sample)), kExitOk, {}};
}

std::string render(const RunConfig& c, const Artifact& a) {
    const auto cfg = describe(c);
    if (c.output == OutputFormat::Json) {
        ordered_json env;
        env["tool"] = "eslab";
        env["version"] = kVersion;
        env["command"] = command_name(c.command);
        env["seed"] = c.seed;
        ordered_json conf = ordered_json::object();
        for (const auto& [k, v] : cfg) {
            conf[k] = v;
        }
        env["config"] = std::move(conf);
        env["result"] = a.json;
        return env.dump(2) + '\n';
    }
    std::string s = "# eslab " + std::string(kVersion) + "\n";
    for (const auto& [k, v] : cfg) {
        s += "# " + k + '=' + v + '\n';
    }
    return s + a.csv;
}

}  // namespace

std::string_view command_name(Command c) noexcept {
    switch (c) {
        case Command::Estimate: return "estimate";
        case Command::Optimize: return "optimize";
        case Command::Phase: return "phase";
        case Command::Scaling: return "scaling";
        case Command::Probability: return "probability";
        case Command::Generate: return "generate";
    }
    return "unknown";
}

Command parse_command(std::string_view token) {
    for (const Command c : {Command::Estimate, Command::Optimize, Command::Phase, Command::Scaling,
                            Command::Probability, Command::Generate}) {
        if (command_name(c) == token) {
            return c;
        }
    }
    throw ParseError("unknown command '" + std::string(token) + "'");
}

RiskSpec RunConfig::risk_spec() const {
    if (measure == Measure::MaximalLoss) {
        return RiskSpec::maximal_loss();
    }
    if (measure == Measure::Variance) {
        return RiskSpec::variance();
    }
    return RiskSpec(measure, alpha);
}

void RunConfig::resolve() {
    if (generator && input) {
        throw DomainError("give either --gen or --input, not both");
    }
    if (input && (is_experiment(command) || command == Command::Generate)) {
        throw DomainError(std::string(command_name(command)) + " draws its own samples; --input is not accepted");
    }
    if (!input && !generator) {
        generator = GeneratorSpec::gaussian();
    }
    if (workers == 0) {
        throw DomainError("--workers must be >= 1");
    }
    const bool draws = !input;
    if (draws && n_assets == 0) {
        throw DomainError("--n is required");
    }
    if (draws && n_periods == 0 && command != Command::Phase && command != Command::Scaling) {
        throw DomainError("--t is required");
    }
    if (command == Command::Scaling && distances.empty()) {
        throw DomainError("scaling needs --distances");
    }
    if (command != Command::Generate) {
        (void)risk_spec();
    }
}

std::vector<std::pair<std::string, std::string>> describe(const RunConfig& c) {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("command", std::string(command_name(c.command)));
    if (c.command != Command::Generate) {
        kv.emplace_back("measure", std::string(measure_name(c.measure)));
        if (c.command == Command::Phase && !c.alphas.empty()) {
            kv.emplace_back("alphas", join(c.alphas));
        } else {
            kv.emplace_back("alpha", format_roundtrip(c.risk_spec().alpha()));
        }
    }
    if (c.input) {
        kv.emplace_back("input", c.input->string());
    } else {
        kv.emplace_back("gen", to_string(*c.generator));
        kv.emplace_back("n", std::to_string(c.n_assets));
        if (c.n_periods > 0) {
            kv.emplace_back("t", std::to_string(c.n_periods));
        }
    }
    if (is_experiment(c.command)) {
        kv.emplace_back("trials", std::to_string(c.trials));
    }
    if (c.command == Command::Estimate) {
        kv.emplace_back("weights", c.weights);
    }
    if (c.command == Command::Optimize) {
        kv.emplace_back("budget", c.budget ? format_roundtrip(*c.budget) : "auto");
        kv.emplace_back("reg", to_string(c.reg));
    }
    if (c.command == Command::Scaling) {
        kv.emplace_back("distances", join(c.distances));
        if (c.critical_ratio) {
            kv.emplace_back("critical", format_roundtrip(*c.critical_ratio));
        }
    }
    kv.emplace_back("seed", std::to_string(c.seed));
    kv.emplace_back("output", c.output == OutputFormat::Json ? "json" : "csv");
    return kv;
}

Portfolio parse_weights(std::string_view argument, std::size_t n_assets) {
    if (argument == "equal") {
        return Portfolio::equal_weight(n_assets);
    }
    std::vector<double> w;
    std::size_t start = 0;
    while (true) {
        const auto comma = argument.find(',', start);
        w.push_back(parse_number(argument.substr(start, comma - start), "weights"));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    if (w.size() == 1) {
        w.assign(n_assets, w.front());
    }
    if (w.size() != n_assets) {
        throw DimensionError("weights: expected N = " + std::to_string(n_assets) + " entries", n_assets, w.size());
    }
    return Portfolio(Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size())));
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        Artifact a;
        switch (config.command) {
            case Command::Estimate: a = do_estimate(config); break;
            case Command::Optimize: a = do_optimize(config); break;
            case Command::Phase: a = do_phase(config); break;
            case Command::Scaling: a = do_scaling(config); break;
            case Command::Probability: a = do_probability(config); break;
            case Command::Generate: a = do_generate(config); break;
        }
        const std::string text = render(config, a);
        if (config.out_path) {
            std::ofstream file(*config.out_path, std::ios::binary);
            if (!(file << text)) {
                throw Error("cannot write " + config.out_path->string());
            }
        } else {
            out << text;
        }
        if (!a.diagnostic.empty()) {
            err << a.diagnostic << '\n';
        }
        return a.exit_code;
    } catch (const ParseError& e) {
        err << "error: malformed input: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return kExitError;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Expected Shortfall instability lab: estimate, optimize and run phase experiments", "eslab"};
    app.set_config("--config", "", "flat key=value file; flags on the command line win");
    app.set_version_flag("--version", std::string(kVersion));

    RunConfig c;
    std::string command;
    std::string measure = "hist-es";
    std::string gen;
    std::string input;
    std::string budget = "auto";
    std::string reg = "none";
    std::string output = "csv";
    std::string out_path;
    std::string alphas;
    std::string distances;
    double critical = 0.0;
    c.workers = default_workers();

    app.add_option("command", command, "estimate | optimize | phase | scaling | probability | generate")->required();
    app.add_option("--measure", measure, "hist-es | hist-var | maxloss | param-es | param-var | variance");
    app.add_option("--alpha", c.alpha, "confidence level");
    app.add_option("--alphas", alphas, "comma-separated alpha grid (phase)");
    app.add_option("--n", c.n_assets, "number of assets");
    app.add_option("--t", c.n_periods, "number of periods");
    app.add_option("--trials", c.trials, "Monte Carlo trials per grid point");
    app.add_option("--gen", gen, "gauss | t:<nu> | garch:<omega>,<a>,<b>, optional :scale=<s>");
    app.add_option("--input", input, "returns file (CSV, or .json)");
    app.add_option("--weights", c.weights, "equal | <scalar> | comma list of N weights");
    app.add_option("--budget", budget, "auto (= N) or a number");
    app.add_option("--reg", reg, "none | l1:<lambda> | shrink:<delta>");
    app.add_option("--seed", c.seed, "master seed");
    app.add_option("--workers", c.workers, "worker threads (results do not depend on it)");
    app.add_option("--output", output, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", out_path, "write to this file instead of standard output");
    app.add_option("--distances", distances, "comma-separated distances from the critical ratio (scaling)");
    auto* crit = app.add_option("--critical", critical, "known critical ratio (scaling); located when absent");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    try {
        c.command = parse_command(command);
        c.measure = parse_measure(measure);
        if (!gen.empty()) {
            c.generator = parse_generator(gen);
        }
        if (!input.empty()) {
            c.input = input;
        }
        if (budget != "auto") {
            c.budget = parse_number(budget, "budget");
        }
        c.reg = RegularizerSpec::parse(reg);
        c.output = output == "json" ? OutputFormat::Json : OutputFormat::Csv;
        if (!out_path.empty()) {
            c.out_path = out_path;
        }
        const auto grid = [](const std::string& text, std::string_view what) {
            std::vector<double> v;
            std::stringstream ss(text);
            for (std::string item; std::getline(ss, item, ',');) {
                v.push_back(parse_number(item, what));
            }
            return v;
        };
        c.alphas = grid(alphas, "alphas");
        c.distances = grid(distances, "distances");
        if (crit->count() > 0) {
            c.critical_ratio = critical;
        }
        c.resolve();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return run(c, out, err);
}

}  // namespace eslab::cli
