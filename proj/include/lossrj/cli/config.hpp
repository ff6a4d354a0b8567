#pragma once

#include "lossrj/model.hpp"
#include "lossrj/rjmcmc.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace lossrj::cli {

using nlohmann::json;

struct SamplerSection {
    std::size_t iterations = 1000000;
    std::size_t burn_in = 1000;
    std::size_t thin = 1;
    std::uint64_t seed = 1;
    std::size_t chains = 3;
    std::size_t workers = 1;
};

struct MarginalSection {
    double target_rho = 0.27;
    double target_eta = 0.15;
    double target_alpha0 = 0.29;
    std::size_t gibbs_pilot_iterations = 5000;
    std::size_t tuning_batches = 100;
    std::size_t batch_size = 100;
    double kappa = 0.5;
};

struct SimulateSection {
    ModelId model = ModelId::M2;
    std::size_t n = 7;
    double sigma = 1000.0;
    double tau = 1000.0;
    double rho = 0.5;
    double eta = 0.03;
    double alpha0 = 0.03;
    double exposure_scale = 1.0;
    std::uint64_t seed = 1;
    std::size_t replications = 20;
};

struct RunConfig {
    std::filesystem::path data;
    std::filesystem::path output = "out";
    /// Directory of chain_<k>.csv files read by `diagnose`.
    std::filesystem::path input;
    ModelId model = ModelId::M1;
    PriorConfig priors;
    SamplerSection sampler;
    MoveSpec moves;
    Scheme scheme = Scheme::Efficient;
    std::size_t pilot_iterations = 20000;
    std::size_t pilot_burn_in = 2000;
    MarginalSection marginal;
    SimulateSection simulate;
    std::size_t checkpoint_every = 1000;
    std::string ks_param;
    double hpd_level = 0.95;
};

/// Default configuration tree. Every leaf key is unique across sections and
/// doubles as the name of a command-line flag.
json default_config_json();

/// Leaf key -> JSON pointer into the configuration tree.
std::map<std::string, json::json_pointer> config_leaves();

/// Overlays `overlay` onto `base`; keys unknown to the defaults are rejected.
/// A manifest (an object with "command" and "config") contributes its "config".
void merge_config(json& base, const json& overlay);

/// Parses a flag value for the leaf at `ptr`, using the default's type.
json parse_flag_value(const json& defaults, const json::json_pointer& ptr, const std::string& text);

/// Converts and validates the tree. Throws InputError.
RunConfig config_from_json(const json& tree);

json read_json_file(const std::filesystem::path& path);

} // namespace lossrj::cli
