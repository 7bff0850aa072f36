#include "eslab/scenario.hpp"

#include "eslab/error.hpp"
#include "eslab/rng.hpp"
#include "eslab/sample_io.hpp"

#include <charconv>
#include <cmath>
#include <vector>

namespace eslab {

GeneratorSpec GeneratorSpec::gaussian(double scale, std::uint64_t seed) {
    GeneratorSpec s;
    s.kind = GeneratorKind::GaussianIID;
    s.scale = scale;
    s.seed = seed;
    return s;
}

GeneratorSpec GeneratorSpec::student_t(double nu, double scale, std::uint64_t seed) {
    GeneratorSpec s;
    s.kind = GeneratorKind::StudentT;
    s.nu = nu;
    s.scale = scale;
    s.seed = seed;
    return s;
}

GeneratorSpec GeneratorSpec::garch(double omega, double a, double b, double scale, std::uint64_t seed) {
    GeneratorSpec s;
    s.kind = GeneratorKind::Garch11;
    s.omega = omega;
    s.garch_a = a;
    s.garch_b = b;
    s.scale = scale;
    s.seed = seed;
    return s;
}

void GeneratorSpec::validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw DomainError("generator scale must be > 0");
    }
    switch (kind) {
        case GeneratorKind::GaussianIID: break;
        case GeneratorKind::StudentT:
            if (!(nu > 2.0) || !std::isfinite(nu)) {
                throw DomainError("Student-t needs nu > 2 (finite variance), got nu=" + std::to_string(nu));
            }
            break;
        case GeneratorKind::Garch11:
            if (!(omega > 0.0)) {
                throw DomainError("GARCH(1,1) needs omega > 0");
            }
            if (!(garch_a >= 0.0) || !(garch_b >= 0.0)) {
                throw DomainError("GARCH(1,1) needs a >= 0 and b >= 0");
            }
            if (!(garch_a + garch_b < 1.0)) {
                throw DomainError("GARCH(1,1) needs a + b < 1 (covariance stationarity)");
            }
            break;
    }
}

double GeneratorSpec::unconditional_variance() const noexcept {
    const double s2 = scale * scale;
    if (kind == GeneratorKind::Garch11) {
        return s2 * omega / (1.0 - garch_a - garch_b);
    }
    return s2;
}

ReturnSample generate(const GeneratorSpec& spec, std::size_t n_assets, std::size_t n_periods,
                      GenerateHooks hooks) {
    spec.validate();
    if (n_assets < 1 || n_periods < 1) {
        throw DomainError("generate needs N >= 1 and T >= 1");
    }
    Matrix r(static_cast<Eigen::Index>(n_periods), static_cast<Eigen::Index>(n_assets));
    for (std::size_t i = 0; i < n_assets; ++i) {
        NormalSampler normal(substream_seed(spec.seed, i), hooks.negate_normals);
        auto col = r.col(static_cast<Eigen::Index>(i));
        switch (spec.kind) {
            case GeneratorKind::GaussianIID:
                for (std::size_t t = 0; t < n_periods; ++t) {
                    col(static_cast<Eigen::Index>(t)) = spec.scale * normal();
                }
                break;
            case GeneratorKind::StudentT: {
                const double unit = std::sqrt((spec.nu - 2.0) / spec.nu);
                for (std::size_t t = 0; t < n_periods; ++t) {
                    const double z = normal();
                    const double chi2 = 2.0 * normal.gamma(0.5 * spec.nu);
                    col(static_cast<Eigen::Index>(t)) = spec.scale * unit * z / std::sqrt(chi2 / spec.nu);
                }
                break;
            }
            case GeneratorKind::Garch11: {
                double var = spec.omega / (1.0 - spec.garch_a - spec.garch_b);
                double eps = 0.0;
                for (std::size_t t = 0; t < kGarchBurnIn + n_periods; ++t) {
                    if (t > 0) {
                        var = spec.omega + spec.garch_a * eps * eps + spec.garch_b * var;
                    }
                    eps = std::sqrt(var) * normal();
                    if (t >= kGarchBurnIn) {
                        col(static_cast<Eigen::Index>(t - kGarchBurnIn)) = spec.scale * eps;
                    }
                }
                break;
            }
        }
    }
    return ReturnSample(std::move(r));
}

namespace {

double parse_number(std::string_view text, std::string_view what) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError("generator: bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
        if (pos == std::string_view::npos) {
            return parts;
        }
        start = pos + 1;
    }
}

}  // namespace

GeneratorSpec parse_generator(std::string_view text) {
    auto parts = split(text, ':');
    GeneratorSpec spec;
    if (parts.size() > 1 && parts.back().starts_with("scale=")) {
        spec.scale = parse_number(parts.back().substr(6), "scale");
        parts.pop_back();
    }
    const auto kind = parts.front();
    if (kind == "gauss" && parts.size() == 1) {
        spec.kind = GeneratorKind::GaussianIID;
    } else if (kind == "t" && parts.size() <= 2) {
        spec.kind = GeneratorKind::StudentT;
        if (parts.size() == 2) {
            spec.nu = parse_number(parts[1], "nu");
        }
    } else if (kind == "garch" && parts.size() <= 2) {
        spec.kind = GeneratorKind::Garch11;
        if (parts.size() == 2) {
            const auto p = split(parts[1], ',');
            if (p.size() != 3) {
                throw ParseError("generator: garch takes omega,a,b");
            }
            spec.omega = parse_number(p[0], "omega");
            spec.garch_a = parse_number(p[1], "a");
            spec.garch_b = parse_number(p[2], "b");
        }
    } else {
        throw ParseError("unknown generator '" + std::string(text) +
                         "' (expected gauss, t:<nu>, garch:<omega>,<a>,<b>)");
    }
    spec.validate();
    return spec;
}

std::string to_string(const GeneratorSpec& spec) {
    std::string s;
    switch (spec.kind) {
        case GeneratorKind::GaussianIID: s = "gauss"; break;
        case GeneratorKind::StudentT: s = "t:" + format_roundtrip(spec.nu); break;
        case GeneratorKind::Garch11:
            s = "garch:" + format_roundtrip(spec.omega) + "," + format_roundtrip(spec.garch_a) + "," +
                format_roundtrip(spec.garch_b);
            break;
    }
    if (spec.scale != 1.0) {
        s += ":scale=" + format_roundtrip(spec.scale);
    }
    return s;
}

}  // namespace eslab
