#pragma once

#include <cmath>
#include <stdexcept>

namespace hnp3 {

/// Exponential triggering kernel exp(-beta * (t - t_s)).
inline double kernel_eval(double beta, double t, double t_s) {
    if (t < t_s) {
        throw std::domain_error("kernel_eval: t must not precede the source time");
    }
    return std::exp(-beta * (t - t_s));
}

/// Integral of the kernel of a source at t_s over [a, b], clipped to the
/// kernel's support: int_{max(a,t_s)}^{b} exp(-beta (tau - t_s)) dtau.
/// b may be +infinity.
inline double kernel_integral(double beta, double t_s, double a, double b) {
    if (a > b) {
        throw std::domain_error("kernel_integral: interval start exceeds end");
    }
    const double lo = a > t_s ? a : t_s;
    if (lo >= b) return 0.0;
    const double upper = std::isinf(b) ? 0.0 : std::exp(-beta * (b - t_s));
    return (std::exp(-beta * (lo - t_s)) - upper) / beta;
}

}  // namespace hnp3
