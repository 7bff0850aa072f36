#include "eslab/rng.hpp"

#include <cmath>

namespace eslab {

double NormalSampler::operator()() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return sign_ * spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * engine_.uniform_open() - 1.0;
        v = 2.0 * engine_.uniform_open() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return sign_ * u * f;
}

double NormalSampler::gamma(double shape) noexcept {
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a + 1) * U^(1/a)
        const double g = gamma(shape + 1.0);
        return g * std::pow(engine_.uniform_open(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x = 0.0;
        double v = 0.0;
        do {
            // Unsigned draw: the gamma variate must not depend on the negation hook.
            x = sign_ * (*this)();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = engine_.uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) {
            return d * v;
        }
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

}  // namespace eslab
