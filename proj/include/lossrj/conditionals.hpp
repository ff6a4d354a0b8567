#pragma once

#include "lossrj/model.hpp"

#include <cstddef>

namespace lossrj {

/// Density proportional to x^(shape-1) exp(-rate x).
struct GammaParams {
    double shape = 1.0;
    double rate = 1.0;

    double mean() const { return shape / rate; }
    double variance() const { return shape / (rate * rate); }
    double log_pdf(double x) const;
};

struct NormalParams {
    double mean = 0.0;
    double variance = 1.0;

    double sd() const;
    double log_pdf(double x) const;
};

// Full conditionals. M2 and M3 are handled by substituting rho = 1 (resp. 0)
// into the M1 expressions; absent parameters never enter.

GammaParams sigma_conditional(const ParamState& state, const ObservationSeries& data,
                              const PriorConfig& priors);

GammaParams tau_conditional(const ParamState& state, const ObservationSeries& data,
                            const PriorConfig& priors);

/// M1 only: rho is fixed in the other models.
NormalParams rho_conditional(const ParamState& state, const ObservationSeries& data,
                             const PriorConfig& priors);

/// M1 and M3.
NormalParams eta_conditional(const ParamState& state, const ObservationSeries& data,
                             const PriorConfig& priors);

/// j = 0 is alpha0 (not available in M3); j = 1..n are the latent levels.
/// Throws std::out_of_range for j > n and std::invalid_argument for j = 0 under M3.
NormalParams alpha_conditional(std::size_t j, const ParamState& state, const ObservationSeries& data,
                               const PriorConfig& priors);

} // namespace lossrj
