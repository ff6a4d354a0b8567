#include "lossrj/model.hpp"

#include "lossrj/density.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace lossrj {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool same_bits(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

} // namespace

std::string_view model_name(ModelId m) {
    switch (m) {
    case ModelId::M1: return "M1";
    case ModelId::M2: return "M2";
    case ModelId::M3: return "M3";
    }
    return "?";
}

ModelId parse_model(std::string_view text) {
    if (text == "m1" || text == "M1" || text == "1") return ModelId::M1;
    if (text == "m2" || text == "M2" || text == "2") return ModelId::M2;
    if (text == "m3" || text == "M3" || text == "3") return ModelId::M3;
    throw InputError("unknown model '" + std::string(text) + "' (expected m1, m2 or m3)");
}

void PriorConfig::validate() const {
    if (!(a1 > 0 && b1 > 0 && a2 > 0 && b2 > 0)) {
        throw InputError("gamma prior shape/rate values must all be positive");
    }
    double total = 0.0;
    for (double p : model_prior) {
        if (!(p >= 0.0)) throw InputError("model prior probabilities must be nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw InputError("model prior must sum to 1");
    }
}

std::size_t ParamState::free_dimension() const {
    return alpha.size() + (model == ModelId::M1 ? 5 : 3);
}

double ParamState::process_rho() const {
    switch (model) {
    case ModelId::M1: return rho;
    case ModelId::M2: return 1.0;
    case ModelId::M3: return 0.0;
    }
    return rho;
}

double ParamState::process_eta() const { return has_eta(model) ? eta : 0.0; }

double ParamState::process_alpha0() const { return has_alpha0(model) ? alpha0 : 0.0; }

bool ParamState::operator==(const ParamState& other) const {
    if (model != other.model || alpha.size() != other.alpha.size()) return false;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        if (!same_bits(alpha[j], other.alpha[j])) return false;
    }
    return same_bits(alpha0, other.alpha0) && same_bits(rho, other.rho) &&
           same_bits(eta, other.eta) && same_bits(sigma, other.sigma) &&
           same_bits(tau, other.tau);
}

ParamState specialize(ParamState state, ModelId model) {
    state.model = model;
    switch (model) {
    case ModelId::M1: break;
    case ModelId::M2:
        state.rho = 1.0;
        state.eta = kAbsent;
        break;
    case ModelId::M3:
        state.rho = 0.0;
        state.alpha0 = kAbsent;
        break;
    }
    return state;
}

void validate_state(const ParamState& state, std::size_t n) {
    if (state.alpha.size() != n) {
        throw std::invalid_argument("state has " + std::to_string(state.alpha.size()) +
                                    " alpha values, data has " + std::to_string(n));
    }
    for (double a : state.alpha) {
        if (!std::isfinite(a)) throw std::invalid_argument("non-finite alpha value");
    }
    if (has_alpha0(state.model) && !std::isfinite(state.alpha0)) {
        throw std::invalid_argument("alpha0 must be finite for " + std::string(model_name(state.model)));
    }
    if (has_eta(state.model) && !std::isfinite(state.eta)) {
        throw std::invalid_argument("eta must be finite for " + std::string(model_name(state.model)));
    }
    if (state.model == ModelId::M1 && !std::isfinite(state.rho)) {
        throw std::invalid_argument("rho must be finite for M1");
    }
    if (state.model == ModelId::M2 && state.rho != 1.0) {
        throw std::invalid_argument("M2 requires rho == 1");
    }
    if (state.model == ModelId::M3 && state.rho != 0.0) {
        throw std::invalid_argument("M3 requires rho == 0");
    }
}

std::vector<std::string> free_parameter_names(ModelId model, std::size_t n) {
    std::vector<std::string> names;
    if (has_alpha0(model)) names.emplace_back("alpha0");
    for (std::size_t j = 1; j <= n; ++j) names.push_back("alpha" + std::to_string(j));
    if (rho_free(model)) names.emplace_back("rho");
    if (has_eta(model)) names.emplace_back("eta");
    names.emplace_back("sigma");
    names.emplace_back("tau");
    return names;
}

std::vector<std::string> all_parameter_names(std::size_t n) {
    std::vector<std::string> names{"alpha0"};
    for (std::size_t j = 1; j <= n; ++j) names.push_back("alpha" + std::to_string(j));
    names.insert(names.end(), {"rho", "eta", "sigma", "tau"});
    return names;
}

std::optional<double> parameter_value(const ParamState& state, std::string_view name) {
    if (name == "alpha0") {
        if (!has_alpha0(state.model)) return std::nullopt;
        return state.alpha0;
    }
    if (name == "rho") return state.process_rho();
    if (name == "eta") {
        if (!has_eta(state.model)) return std::nullopt;
        return state.eta;
    }
    if (name == "sigma") {
        if (std::isnan(state.sigma)) return std::nullopt;
        return state.sigma;
    }
    if (name == "tau") {
        if (std::isnan(state.tau)) return std::nullopt;
        return state.tau;
    }
    if (name.starts_with("alpha")) {
        std::size_t j = 0;
        for (char c : name.substr(5)) {
            if (c < '0' || c > '9') return std::nullopt;
            j = j * 10 + static_cast<std::size_t>(c - '0');
        }
        if (j >= 1 && j <= state.alpha.size()) return state.alpha[j - 1];
    }
    return std::nullopt;
}

double data_sum_of_squares(std::span<const double> alpha, const ObservationSeries& data) {
    double s = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        const double d = data.ratio(j) - alpha[j];
        s += data.exposure(j) * d * d;
    }
    return 0.5 * s;
}

double process_sum_of_squares(double alpha0, std::span<const double> alpha, double rho, double eta) {
    double s = 0.0;
    double prev = alpha0;
    const double drift = (1.0 - rho) * eta;
    for (double a : alpha) {
        const double e = a - rho * prev - drift;
        s += e * e;
        prev = a;
    }
    return 0.5 * s;
}

double log_joint(const ParamState& state, const ObservationSeries& data, const PriorConfig& priors) {
    if (!(state.sigma > 0.0) || !(state.tau > 0.0)) return kNegInf;
    using namespace density;
    const std::size_t n = data.size();

    double lp = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        lp += normal_log_pdf_precision(data.ratio(j), state.alpha[j],
                                       state.sigma * data.exposure(j));
    }

    const double rho = state.process_rho();
    const double drift = (1.0 - rho) * state.process_eta();
    double prev = state.process_alpha0();
    for (std::size_t j = 0; j < n; ++j) {
        lp += normal_log_pdf_precision(state.alpha[j], rho * prev + drift, state.tau);
        prev = state.alpha[j];
    }

    lp += gamma_log_pdf(state.sigma, priors.a1, priors.b1);
    lp += gamma_log_pdf(state.tau, priors.a2, priors.b2);
    if (has_alpha0(state.model)) lp += normal_log_pdf(state.alpha0, 0.0, 1.0);
    if (rho_free(state.model)) lp += normal_log_pdf(state.rho, 0.0, 1.0);
    if (has_eta(state.model)) lp += normal_log_pdf(state.eta, 0.0, 1.0);
    lp += std::log(priors.model_prior[model_index(state.model)]);
    return lp;
}

double log_marginal_target(double alpha0, std::span<const double> alpha, double rho, double eta,
                           const ObservationSeries& data, const PriorConfig& priors) {
    using namespace density;
    const double half_n = 0.5 * static_cast<double>(alpha.size());
    return normal_log_pdf(rho, 0.0, 1.0) + normal_log_pdf(eta, 0.0, 1.0) +
           normal_log_pdf(alpha0, 0.0, 1.0) -
           (priors.a1 + half_n) * std::log(priors.b1 + data_sum_of_squares(alpha, data)) -
           (priors.a2 + half_n) *
               std::log(priors.b2 + process_sum_of_squares(alpha0, alpha, rho, eta));
}

double log_marginal_target(const ParamState& state, const ObservationSeries& data,
                           const PriorConfig& priors) {
    return log_marginal_target(state.alpha0, state.alpha, state.rho, state.eta, data, priors);
}

} // namespace lossrj
