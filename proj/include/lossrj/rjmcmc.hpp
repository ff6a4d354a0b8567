#pragma once

#include "lossrj/chain.hpp"
#include "lossrj/conditionals.hpp"
#include "lossrj/efficient.hpp"
#include "lossrj/gibbs.hpp"
#include "lossrj/model.hpp"
#include "lossrj/rng.hpp"

#include <Eigen/Core>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lossrj {

enum class Scheme { Vanilla, Efficient };

std::string_view scheme_name(Scheme s);
Scheme parse_scheme(std::string_view text);

using Matrix3 = std::array<std::array<double, 3>, 3>;

struct MoveSpec {
    double between_move_prob = 0.5;
    /// r[i][j]: probability of proposing model j+1 when at model i+1.
    Matrix3 r{{{0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}}};

    /// Probability in [0,1]; off-diagonal entries nonnegative and summing to 1
    /// per row; diagonal zero.
    void validate() const;
    double prob(ModelId from, ModelId to) const { return r[model_index(from)][model_index(to)]; }
};

/// Fixed Gaussian laws of the vanilla scheme: alpha0, rho, eta of M1, alpha0
/// of M2 and eta of M3.
struct VanillaProposalSpec {
    NormalParams alpha0{};
    NormalParams rho{};
    NormalParams eta{};
    NormalParams alpha0_m2{};
    NormalParams eta_m3{};

    void validate() const;
    bool operator==(const VanillaProposalSpec&) const;
};

std::string vanilla_spec_to_json(const VanillaProposalSpec& spec);
VanillaProposalSpec vanilla_spec_from_json(std::string_view text);

/// log A for the move from -> to:
///   [log_joint(to) - log_joint(from)] + [log r(to,from) - log r(from,to)]
///   + q_reverse_logpdf - q_forward_logpdf.
/// Throws std::logic_error unless the models differ and alpha, sigma, tau agree.
double jump_log_accept(const ParamState& from, const ParamState& to, double q_forward_logpdf,
                       double q_reverse_logpdf, const MoveSpec& moves, const ObservationSeries& data,
                       const PriorConfig& priors);

/// Proposal laws of the auxiliary coordinates for a jump between `a` and `b`
/// at the given shared parameters. `block` is the law of M1's (alpha0, rho,
/// eta) and is only built when one of the models is M1.
struct JumpLaws {
    EfficientProposal block;
    NormalParams alpha0_m2;
    NormalParams eta_m3;
};

JumpLaws jump_laws(ModelId a, ModelId b, Scheme scheme, const std::optional<VanillaProposalSpec>& spec,
                   std::span<const double> alpha, double tau);

struct JumpDensities {
    double forward = 0.0;
    double reverse = 0.0;
    bool fallback_used = false;
};

/// Densities of the coordinates created (forward) and discarded (reverse) by
/// the move from -> to.
JumpDensities jump_densities(const ParamState& from, const ParamState& to, Scheme scheme,
                             const std::optional<VanillaProposalSpec>& spec);

/// Standard-normal inputs that fix a jump's candidate: `block` is mapped
/// through the M1 block law, `scalar` through the sub-model law.
struct JumpDraws {
    Eigen::Vector3d block = Eigen::Vector3d::Zero();
    double scalar = 0.0;
};

struct JumpProposal {
    ParamState candidate;
    JumpDensities densities;
};

JumpProposal propose_jump(const ParamState& from, ModelId target, Scheme scheme,
                          const std::optional<VanillaProposalSpec>& spec, const JumpDraws& draws);
JumpProposal propose_jump(const ParamState& from, ModelId target, Scheme scheme,
                          const std::optional<VanillaProposalSpec>& spec, Rng& rng);

struct PilotConfig {
    ChainConfig chain{20000, 2000, 1, 1};
};

struct PilotResult {
    VanillaProposalSpec spec;
    /// Per-model Gibbs runs, indexed by model_index.
    std::array<ChainRecord, 3> chains;
    std::vector<std::string> warnings;
};

/// Mean and variance of `values`, variance floored at 1e-8 (a warning naming
/// `what` is appended when the floor applies).
NormalParams moment_match(std::span<const double> values, std::string_view what,
                          std::vector<std::string>& warnings);

PilotResult pilot_tune(const ObservationSeries& data, const PriorConfig& priors, const PilotConfig& pilot);

struct RjSettings {
    MoveSpec moves{};
    Scheme scheme = Scheme::Efficient;
    std::optional<VanillaProposalSpec> vanilla;
    SweepOptions sweep{};

    void validate() const;
};

struct StepEvent {
    bool attempted = false;
    ModelId from = ModelId::M1;
    ModelId to = ModelId::M1;
    bool accepted = false;
    /// An efficient M1 block law was built for this move.
    bool block_used = false;
    bool fallback_used = false;
    double log_accept = 0.0;
};

struct RjStats {
    Matrix3 proposed_count{};
    Matrix3 accepted_count{};
    /// Efficient M1 block proposals actually built, and how many used the fallback.
    std::size_t block_proposals = 0;
    std::size_t fallbacks = 0;

    void record(const StepEvent& e);
    /// NaN when the move was never proposed.
    double acceptance_rate(ModelId from, ModelId to) const;
    double fallback_rate() const;
};

/// Within-model Gibbs sweep, then with probability between_move_prob a jump to
/// a model drawn from r.
StepEvent rj_step(ParamState& state, const ObservationSeries& data, const PriorConfig& priors,
                  const RjSettings& settings, Rng& rng);

struct RjResult {
    ChainRecord chain;
    RjStats stats;
};

/// Starts from default_init(M1) unless `init` is given.
RjResult run_rj(const ObservationSeries& data, const PriorConfig& priors, const ChainConfig& config,
                const RjSettings& settings, std::optional<ParamState> init = std::nullopt);

/// Visit frequencies of M1, M2, M3.
std::array<double, 3> model_probabilities(const ChainRecord& chain);
std::array<double, 3> model_probabilities(std::span<const ModelId> models);

struct TransitionMatrix {
    Matrix3 counts{};
    /// Row i is nullopt when model i+1 has no outgoing transitions.
    std::array<std::optional<std::array<double, 3>>, 3> rows;
};

/// Throws std::invalid_argument for fewer than two samples.
TransitionMatrix empirical_transition_matrix(std::span<const ModelId> models);
TransitionMatrix empirical_transition_matrix(const ChainRecord& chain);

} // namespace lossrj
