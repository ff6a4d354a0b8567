#pragma once

#include "lossrj/model.hpp"
#include "lossrj/rng.hpp"
#include "lossrj/series.hpp"

#include <Eigen/Core>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cmath>
#include <numeric>
#include <vector>

namespace lossrj::testing {

/// Adaptive Gauss-Kronrod on [a, b], tight tolerance.
template <class F>
double integrate(F&& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

/// Mean and variance of the density proportional to exp(logf(x) - logf(x0))
/// on [a, b].
template <class F>
std::array<double, 3> moments(F&& logf, double x0, double a, double b) {
    const double l0 = logf(x0);
    const double z = integrate([&](double x) { return std::exp(logf(x) - l0); }, a, b);
    const double m = integrate([&](double x) { return x * std::exp(logf(x) - l0); }, a, b) / z;
    const double v =
        integrate([&](double x) { return (x - m) * (x - m) * std::exp(logf(x) - l0); }, a, b) / z;
    return {m, v, std::log(z) + l0};
}

/// n ratios near 0.03 with exposures in (0.3, 3).
inline ObservationSeries random_series(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> years(n);
    std::vector<double> ratios(n), exposures(n);
    for (std::size_t j = 0; j < n; ++j) {
        years[j] = static_cast<int>(j) + 1;
        ratios[j] = 0.03 + 0.01 * rng.normal();
        exposures[j] = std::exp(rng.uniform(std::log(0.3), std::log(3.0)));
    }
    return ObservationSeries::from_ratios(years, ratios, exposures);
}

/// A state with O(1) coordinates and moderate precisions so that every
/// conditional is well spread.
inline ParamState random_state(ModelId model, std::size_t n, Rng& rng) {
    ParamState s;
    s.alpha0 = rng.normal(0.0, 0.5);
    s.rho = rng.uniform(-0.5, 1.5);
    s.eta = rng.normal(0.0, 0.5);
    s.sigma = std::exp(rng.uniform(std::log(0.5), std::log(50.0)));
    s.tau = std::exp(rng.uniform(std::log(0.5), std::log(50.0)));
    s.alpha.resize(n);
    for (auto& a : s.alpha) a = rng.normal(0.03, 0.3);
    return specialize(s, model);
}

/// Sup over a 512-point grid on mean +- 8 sd of the relative difference between
/// a closed-form density and the normalized slice x -> exp(log_joint) through
/// `state`. `set` writes x into the coordinate; `positive` clips the range at 0.
template <class Set, class LogPdf>
double slice_sup_error(const ParamState& state, const ObservationSeries& data, const PriorConfig& priors,
                       Set&& set, double mean, double sd, LogPdf&& log_pdf, bool positive = false) {
    auto lj = [&](double x) {
        ParamState s = state;
        set(s, x);
        return log_joint(s, data, priors);
    };
    auto clip = [&](double x) { return positive ? std::max(x, 1e-300) : x; };
    const double l0 = lj(mean);
    const double z = integrate([&](double x) { return std::exp(lj(x) - l0); }, clip(mean - 20 * sd),
                               mean + 20 * sd);
    const double log_z = std::log(z) + l0;
    const double lo = clip(mean - 8 * sd), hi = mean + 8 * sd;
    double worst = 0.0;
    for (int i = 0; i < 512; ++i) {
        const double x = lo + (hi - lo) * (i + 0.5) / 512.0;
        worst = std::max(worst, std::abs(std::expm1(lj(x) - log_z - log_pdf(x))));
    }
    return worst;
}

// Per-factor log posterior written out independently of log_joint.
inline double reference_log_joint(const ParamState& s, const ObservationSeries& d, const PriorConfig& p) {
    const double pi = 3.14159265358979323846;
    auto lnorm = [&](double x, double m, double var) {
        return -0.5 * std::log(2 * pi * var) - 0.5 * (x - m) * (x - m) / var;
    };
    auto lgam = [](double x, double a, double b) {
        return a * std::log(b) - std::lgamma(a) + (a - 1) * std::log(x) - b * x;
    };
    double lp = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) lp += lnorm(d.ratio(j), s.alpha[j], 1.0 / (s.sigma * d.exposure(j)));
    const double rho = s.model == ModelId::M2 ? 1.0 : (s.model == ModelId::M3 ? 0.0 : s.rho);
    const double eta = s.model == ModelId::M2 ? 0.0 : s.eta;
    double prev = s.model == ModelId::M3 ? 0.0 : s.alpha0;
    for (double a : s.alpha) {
        lp += lnorm(a, rho * prev + (1 - rho) * eta, 1.0 / s.tau);
        prev = a;
    }
    lp += lgam(s.sigma, p.a1, p.b1) + lgam(s.tau, p.a2, p.b2);
    if (s.model != ModelId::M3) lp += lnorm(s.alpha0, 0, 1);
    if (s.model == ModelId::M1) lp += lnorm(s.rho, 0, 1);
    if (s.model != ModelId::M2) lp += lnorm(s.eta, 0, 1);
    return lp + std::log(p.model_prior[model_index(s.model)]);
}

template <class F>
Eigen::Vector3d fd_gradient(F&& f, const Eigen::Vector3d& x, double h) {
    Eigen::Vector3d g;
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector3d a = x, b = x;
        a[i] += h;
        b[i] -= h;
        g[i] = (f(a) - f(b)) / (2 * h);
    }
    return g;
}

template <class F>
Eigen::Matrix3d fd_hessian(F&& f, const Eigen::Vector3d& x, double h) {
    Eigen::Matrix3d out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            auto at = [&](double si, double sj) {
                Eigen::Vector3d y = x;
                y[i] += si * h;
                y[j] += sj * h;
                return f(y);
            };
            out(i, j) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h * h);
        }
    }
    return out;
}

inline double sum(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0); }

} // namespace lossrj::testing
