#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace lossrj::density {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

inline double normal_log_pdf(double x, double mean, double variance) {
    const double d = x - mean;
    return -kLogSqrt2Pi - 0.5 * std::log(variance) - 0.5 * d * d / variance;
}

inline double normal_log_pdf_precision(double x, double mean, double precision) {
    const double d = x - mean;
    return -kLogSqrt2Pi + 0.5 * std::log(precision) - 0.5 * precision * d * d;
}

/// Gamma with density proportional to x^(shape-1) exp(-rate x).
inline double gamma_log_pdf(double x, double shape, double rate) {
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

} // namespace lossrj::density
