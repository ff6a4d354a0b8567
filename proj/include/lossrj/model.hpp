#pragma once

#include "lossrj/series.hpp"

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lossrj {

/// The three nested models.
///   M1: full model, rho and eta free.
///   M2: rho == 1, no eta (random walk).
///   M3: rho == 0, no alpha0 (random effects around eta).
enum class ModelId { M1 = 1, M2 = 2, M3 = 3 };

inline constexpr std::array<ModelId, 3> kAllModels{ModelId::M1, ModelId::M2, ModelId::M3};

constexpr std::size_t model_index(ModelId m) { return static_cast<std::size_t>(m) - 1; }
constexpr ModelId model_from_index(std::size_t i) { return static_cast<ModelId>(i + 1); }
constexpr bool has_alpha0(ModelId m) { return m != ModelId::M3; }
constexpr bool has_eta(ModelId m) { return m != ModelId::M2; }
constexpr bool rho_free(ModelId m) { return m == ModelId::M1; }

std::string_view model_name(ModelId m);
/// Accepts "m1", "M1" or "1" (and likewise for 2, 3).
ModelId parse_model(std::string_view text);

inline constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

/// Gamma(shape, rate) priors on the precisions sigma and tau, and the prior
/// over models. The N(0,1) priors on alpha0, rho and eta are fixed.
struct PriorConfig {
    double a1 = 0.001;
    double b1 = 0.001;
    double a2 = 0.001;
    double b2 = 0.001;
    std::array<double, 3> model_prior{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

    void validate() const;
};

/// Parameter vector for one model, precision-parameterized.
///
/// Fields that do not exist in the current model hold kAbsent (NaN): alpha0 in
/// M3, eta in M2. rho holds its fixed value (1 in M2, 0 in M3).
struct ParamState {
    ModelId model = ModelId::M1;
    double alpha0 = 0.0;
    std::vector<double> alpha;
    double rho = 0.0;
    double eta = 0.0;
    double sigma = 1.0;
    double tau = 1.0;

    /// n+5 for M1, n+3 for M2 and M3.
    std::size_t free_dimension() const;

    // Values entering the alpha-process mean rho*alpha_{j-1} + (1-rho)*eta.
    // A missing coordinate contributes 0 since its coefficient vanishes.
    double process_rho() const;
    double process_eta() const;
    double process_alpha0() const;

    bool operator==(const ParamState&) const;
};

/// Sets the fixed/absent fields to the canonical values for `model`.
ParamState specialize(ParamState state, ModelId model);

/// Throws std::invalid_argument when the state does not match n or its model.
void validate_state(const ParamState& state, std::size_t n);

std::vector<std::string> free_parameter_names(ModelId model, std::size_t n);
/// All names that can appear in a chain: alpha0, alpha1..alphan, rho, eta, sigma, tau.
std::vector<std::string> all_parameter_names(std::size_t n);

/// Value of a named parameter; nullopt when the parameter does not exist in
/// the state's model. rho is reported (at its fixed value) for every model.
std::optional<double> parameter_value(const ParamState& state, std::string_view name);

/// Unnormalized log posterior including log p(M). Every factor is a properly
/// normalized density so values can be compared across models. Returns -inf
/// for sigma <= 0 or tau <= 0.
double log_joint(const ParamState& state, const ObservationSeries& data, const PriorConfig& priors);

/// log of the posterior with sigma and tau integrated out, up to an additive
/// constant: log N(rho)+log N(eta)+log N(alpha0)
///   - (a1+n/2) log(b1 + 1/2 sum E_j (alpha_j-R_j)^2)
///   - (a2+n/2) log(b2 + 1/2 sum (alpha_j - rho alpha_{j-1} - (1-rho) eta)^2).
double log_marginal_target(double alpha0, std::span<const double> alpha, double rho, double eta,
                           const ObservationSeries& data, const PriorConfig& priors);
double log_marginal_target(const ParamState& state, const ObservationSeries& data,
                           const PriorConfig& priors);

/// 1/2 sum E_j (R_j - alpha_j)^2
double data_sum_of_squares(std::span<const double> alpha, const ObservationSeries& data);
/// 1/2 sum (alpha_j - rho alpha_{j-1} - (1-rho) eta)^2
double process_sum_of_squares(double alpha0, std::span<const double> alpha, double rho, double eta);

} // namespace lossrj
