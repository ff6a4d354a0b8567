#include "lossrj/conditionals.hpp"

#include "lossrj/density.hpp"

#include <cmath>
#include <stdexcept>

namespace lossrj {

double GammaParams::log_pdf(double x) const { return density::gamma_log_pdf(x, shape, rate); }

double NormalParams::sd() const { return std::sqrt(variance); }

double NormalParams::log_pdf(double x) const { return density::normal_log_pdf(x, mean, variance); }

GammaParams sigma_conditional(const ParamState& state, const ObservationSeries& data,
                              const PriorConfig& priors) {
    const double n = static_cast<double>(data.size());
    return {priors.a1 + 0.5 * n, priors.b1 + data_sum_of_squares(state.alpha, data)};
}

GammaParams tau_conditional(const ParamState& state, const ObservationSeries& data,
                            const PriorConfig& priors) {
    const double n = static_cast<double>(data.size());
    return {priors.a2 + 0.5 * n,
            priors.b2 + process_sum_of_squares(state.process_alpha0(), state.alpha,
                                               state.process_rho(), state.process_eta())};
}

NormalParams rho_conditional(const ParamState& state, const ObservationSeries& /*data*/,
                             const PriorConfig& /*priors*/) {
    if (!rho_free(state.model)) {
        throw std::invalid_argument("rho is fixed in " + std::string(model_name(state.model)));
    }
    const double eta = state.eta;
    double prev = state.alpha0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (double a : state.alpha) {
        const double x = eta - prev;
        sxx += x * x;
        sxy += (eta - a) * x;
        prev = a;
    }
    const double precision = 1.0 + state.tau * sxx;
    return {state.tau * sxy / precision, 1.0 / precision};
}

NormalParams eta_conditional(const ParamState& state, const ObservationSeries& /*data*/,
                             const PriorConfig& /*priors*/) {
    if (!has_eta(state.model)) {
        throw std::invalid_argument("eta is absent in " + std::string(model_name(state.model)));
    }
    const double rho = state.process_rho();
    const double n = static_cast<double>(state.alpha.size());
    double prev = state.process_alpha0();
    double s = 0.0;
    for (double a : state.alpha) {
        s += a - rho * prev;
        prev = a;
    }
    const double one_minus = 1.0 - rho;
    const double precision = 1.0 + n * state.tau * one_minus * one_minus;
    return {state.tau * one_minus * s / precision, 1.0 / precision};
}

NormalParams alpha_conditional(std::size_t j, const ParamState& state, const ObservationSeries& data,
                               const PriorConfig& /*priors*/) {
    const std::size_t n = state.alpha.size();
    if (j > n) throw std::out_of_range("alpha index " + std::to_string(j) + " > n");
    const double rho = state.process_rho();
    const double drift = (1.0 - rho) * state.process_eta();
    const double tau = state.tau;
    const auto& alpha = state.alpha;

    if (j == 0) {
        if (!has_alpha0(state.model)) throw std::invalid_argument("alpha0 is absent in M3");
        const double precision = 1.0 + rho * rho * tau;
        return {rho * tau * (alpha[0] - drift) / precision, 1.0 / precision};
    }

    const double prev = j == 1 ? state.process_alpha0() : alpha[j - 2];
    const double obs_precision = state.sigma * data.exposure(j - 1);
    double precision = tau + obs_precision;
    double weighted = tau * (rho * prev + drift) + obs_precision * data.ratio(j - 1);
    if (j < n) {
        precision += rho * rho * tau;
        weighted += rho * tau * (alpha[j] - drift);
    }
    return {weighted / precision, 1.0 / precision};
}

} // namespace lossrj
