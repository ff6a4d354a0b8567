#pragma once

#include "lossrj/chain.hpp"
#include "lossrj/model.hpp"
#include "lossrj/rjmcmc.hpp"
#include "lossrj/rng.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace lossrj {

struct SimulationSpec {
    ModelId model = ModelId::M1;
    /// alpha is ignored (it is simulated); the model's fixed values are applied.
    ParamState true_params;
    std::vector<double> exposures;
    /// First year label of the simulated rows.
    int first_year = 1;
    std::uint64_t seed = 1;

    void validate() const;
    std::size_t n() const { return exposures.size(); }
};

struct SimulatedData {
    ObservationSeries series;
    /// The generating state, including the realized alpha path.
    ParamState truth;
};

/// Simulates the alpha process forward from alpha0 (M3: around eta) and then
/// R_j ~ N(alpha_j, 1 / (sigma E_j)).
SimulatedData simulate_dataset(const SimulationSpec& spec);

/// Exposures scale * 10^U with U ~ Uniform(-1/2, 1/2), drawn from `seed`.
std::vector<double> default_exposures(std::size_t n, double scale, std::uint64_t seed);

/// n = 7, sigma = tau = 1000, eta = 0.03, alpha0 = 0.03; rho = 0.5 for M1.
SimulationSpec standard_preset(ModelId model, std::uint64_t seed);

std::string truth_to_json(const SimulatedData& data);

struct RecoveryConfig {
    std::size_t replications = 20;
    ChainConfig chain{20000, 2000, 1, 1};
    RjSettings settings{};
    PriorConfig priors{};
    /// Pilot runs used when settings.scheme is vanilla.
    PilotConfig pilot{};
    double hpd_level = 0.95;
};

struct RecoveryReport {
    ModelId true_model = ModelId::M1;
    std::size_t replications = 0;
    std::array<std::size_t, 3> argmax_counts{};
    /// Coverage of the 95% HPD for each true scalar parameter of the model,
    /// evaluated on the draws from the true model (the count is over
    /// replications where that model was visited).
    std::vector<std::string> coverage_names;
    std::vector<std::size_t> covered;
    std::vector<std::size_t> evaluated;
    std::vector<std::array<double, 3>> model_probabilities;
};

/// Replication r simulates with seed derive_seed(spec.seed, 2r) and runs the
/// sampler with derive_seed(spec.seed, 2r + 1). Throws InputError for zero
/// replications.
RecoveryReport recovery_study(const SimulationSpec& spec, const RecoveryConfig& config);

std::string recovery_to_json(const RecoveryReport& report);

} // namespace lossrj
