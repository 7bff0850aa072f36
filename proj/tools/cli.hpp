#pragma once

#include "eslab/model.hpp"
#include "eslab/regularization.hpp"
#include "eslab/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eslab::cli {

enum class Command { Estimate, Optimize, Phase, Scaling, Probability, Generate };
enum class OutputFormat { Csv, Json };

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
/// A single-sample optimization came back unbounded below.
inline constexpr int kExitUnbounded = 2;

std::string_view command_name(Command c) noexcept;
Command parse_command(std::string_view token);

struct RunConfig {
    Command command = Command::Estimate;
    Measure measure = Measure::HistoricalES;
    double alpha = 0.95;
    /// Grid for `phase`; empty means {alpha}.
    std::vector<double> alphas;
    /// Exactly one of generator / input is set after resolve().
    std::optional<GeneratorSpec> generator;
    std::optional<std::filesystem::path> input;
    std::size_t n_assets = 0;
    std::size_t n_periods = 0;
    std::size_t trials = 1000;
    std::string weights = "equal";
    /// nullopt is "auto", i.e. budget N.
    std::optional<double> budget;
    RegularizerSpec reg;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    OutputFormat output = OutputFormat::Csv;
    std::optional<std::filesystem::path> out_path;
    /// `scaling` only.
    std::vector<double> distances;
    std::optional<double> critical_ratio;

    RiskSpec risk_spec() const;
    /// Fills the default generator and checks that the fields fit the command.
    /// Throws DomainError with a usage message.
    void resolve();
};

/// The resolved configuration as flat key=value lines, in config-file syntax.
/// The worker count is left out: it never changes results.
std::vector<std::pair<std::string, std::string>> describe(const RunConfig& config);

/// "equal" (w_i = 1), a scalar repeated N times, or a comma list of N weights.
/// The budget is the sum of the weights.
Portfolio parse_weights(std::string_view argument, std::size_t n_assets);

/// Executes a resolved config, writing the artifact to `out` (or config.out_path)
/// and diagnostics to `err`. Returns the process exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (flags, optional --config file; flags win) and calls run().
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace eslab::cli
