#pragma once

#include "lossrj/chain.hpp"
#include "lossrj/model.hpp"
#include "lossrj/rng.hpp"

#include <optional>

namespace lossrj {

struct SweepOptions {
    /// When false, sigma and tau are held at their current values.
    bool update_precisions = true;
};

/// One systematic scan in the fixed order alpha0, alpha1..alphan, rho, eta,
/// sigma, tau, skipping what the state's model does not have.
ParamState gibbs_sweep(const ParamState& state, const ObservationSeries& data,
                       const PriorConfig& priors, Rng& rng, const SweepOptions& options = {});

/// In-place form of gibbs_sweep.
void gibbs_update(ParamState& state, const ObservationSeries& data, const PriorConfig& priors,
                  Rng& rng, const SweepOptions& options = {});

/// alpha_j = eta = mean(R), rho = 0.5, sigma = tau = 1, alpha0 = mean(R),
/// then specialized to `model`.
ParamState default_init(ModelId model, const ObservationSeries& data);

ChainRecord run_gibbs(ModelId model, const ObservationSeries& data, const PriorConfig& priors,
                      const ChainConfig& config, std::optional<ParamState> init = std::nullopt,
                      const SweepOptions& options = {});

} // namespace lossrj
