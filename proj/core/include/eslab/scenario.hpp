#pragma once

#include "eslab/model.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace eslab {

enum class GeneratorKind { GaussianIID, StudentT, Garch11 };

/// Synthetic return process. Every asset is an independent copy of the same
/// univariate process, drawn from its own seeded stream.
struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::GaussianIID;
    /// StudentT degrees of freedom, > 2.
    double nu = 4.0;
    /// Garch11 parameters: omega > 0, a >= 0, b >= 0, a + b < 1.
    double omega = 0.05;
    double garch_a = 0.1;
    double garch_b = 0.85;
    /// Standard deviation multiplier, > 0.
    double scale = 1.0;
    std::uint64_t seed = 0;

    static GeneratorSpec gaussian(double scale = 1.0, std::uint64_t seed = 0);
    static GeneratorSpec student_t(double nu, double scale = 1.0, std::uint64_t seed = 0);
    static GeneratorSpec garch(double omega, double a, double b, double scale = 1.0, std::uint64_t seed = 0);

    /// Throws DomainError naming the violated constraint.
    void validate() const;

    /// Per-period variance of every asset (scale^2 times the process variance).
    double unconditional_variance() const noexcept;
};

/// Periods simulated and discarded before a GARCH path is recorded.
inline constexpr std::size_t kGarchBurnIn = 50;

struct GenerateHooks {
    /// Negate every standard normal draw (sign-symmetry checks).
    bool negate_normals = false;
};

/// T x N sample. Column i comes from the stream substream_seed(spec.seed, i), so
/// the output is a pure function of (spec, N, T).
///   GaussianIID: scale * z.
///   StudentT:    scale * t_nu / sqrt(nu / (nu - 2)), unit variance before scaling.
///   Garch11:     scale * eps_t, eps_t = sigma_t z_t,
///                sigma_t^2 = omega + a eps_{t-1}^2 + b sigma_{t-1}^2,
///                started at the stationary variance, first kGarchBurnIn periods dropped.
ReturnSample generate(const GeneratorSpec& spec, std::size_t n_assets, std::size_t n_periods,
                      GenerateHooks hooks = {});

/// "gauss", "t:<nu>", "garch" or "garch:<omega>,<a>,<b>", each optionally
/// followed by ":scale=<s>". Throws ParseError / DomainError.
GeneratorSpec parse_generator(std::string_view text);
std::string to_string(const GeneratorSpec& spec);

}  // namespace eslab
