#pragma once

#include "lossrj/chain.hpp"
#include "lossrj/model.hpp"
#include "lossrj/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <optional>

namespace lossrj {

enum class ScalarParam { Rho, Eta, Alpha0 };

struct TargetRates {
    double rho = 0.27;
    double eta = 0.15;
    double alpha0 = 0.29;
    /// Only reported; the block covariance comes from the pilot unscaled.
    double alpha = 0.15;

    double of(ScalarParam p) const;
};

/// Proposal settings of the random-walk sampler on the precision-integrated
/// M1 posterior. Scalars use Uniform(x - w, x + w); the alpha block uses
/// N(alpha, alpha_cov).
class RwTuning {
public:
    /// Throws InputError if a width is not positive or alpha_cov is not
    /// symmetric positive definite.
    RwTuning(double width_rho, double width_eta, double width_alpha0, Eigen::MatrixXd alpha_cov,
             TargetRates targets = {});

    double width(ScalarParam p) const;
    void set_width(ScalarParam p, double w);
    const Eigen::MatrixXd& alpha_cov() const { return alpha_cov_; }
    /// Lower Cholesky factor of alpha_cov.
    const Eigen::MatrixXd& alpha_chol() const { return chol_; }
    const TargetRates& targets() const { return targets_; }
    bool diagonal_fallback() const { return diagonal_fallback_; }
    void mark_diagonal_fallback() { diagonal_fallback_ = true; }

private:
    double width_rho_;
    double width_eta_;
    double width_alpha0_;
    Eigen::MatrixXd alpha_cov_;
    Eigen::MatrixXd chol_;
    TargetRates targets_;
    bool diagonal_fallback_ = false;
};

/// One uniform random-walk Metropolis update of a scalar of the M1 state.
/// sigma and tau in the state are ignored.
bool rw_scalar_update(ScalarParam which, ParamState& state, const RwTuning& tuning,
                      const ObservationSeries& data, const PriorConfig& priors, Rng& rng);

bool rw_block_update_alpha(ParamState& state, const RwTuning& tuning, const ObservationSeries& data,
                           const PriorConfig& priors, Rng& rng);

struct AdaptationSchedule {
    std::size_t batch_size = 100;
    std::size_t batches = 100;
    double kappa = 0.5;
};

/// width * exp(kappa / sqrt(batch) * (rate - target)), batch counted from 1.
inline double adapted_width(double width, double rate, double target, double kappa,
                            std::size_t batch) {
    return width * std::exp(kappa / std::sqrt(static_cast<double>(batch)) * (rate - target));
}

/// Adapts the half-width of a uniform random walk on a 1-D log density.
/// Returns the final width; `x` is left at the last chain position.
template <class LogDensity>
double adapt_rw_width(LogDensity&& log_density, double& x, double width, double target,
                      const AdaptationSchedule& schedule, Rng& rng) {
    double lx = log_density(x);
    for (std::size_t b = 1; b <= schedule.batches; ++b) {
        std::size_t accepted = 0;
        for (std::size_t i = 0; i < schedule.batch_size; ++i) {
            const double y = rng.uniform(x - width, x + width);
            const double ly = log_density(y);
            if (std::log(rng.uniform()) < ly - lx) {
                x = y;
                lx = ly;
                ++accepted;
            }
        }
        const double rate = static_cast<double>(accepted) / static_cast<double>(schedule.batch_size);
        width = adapted_width(width, rate, target, schedule.kappa, b);
    }
    return width;
}

struct MarginalPilotConfig {
    /// Length of the M1 Gibbs run whose alpha covariance seeds the block proposal.
    std::size_t gibbs_iterations = 5000;
    std::size_t gibbs_burn_in = 1000;
    AdaptationSchedule schedule{};
    /// Starting half-widths; unset means twice the pilot posterior sd.
    std::optional<double> initial_width_rho;
    std::optional<double> initial_width_eta;
    std::optional<double> initial_width_alpha0;
    TargetRates targets{};
    std::uint64_t seed = 1;
};

/// Covariance from the samples (rows are draws). Falls back to the diagonal of
/// the sample variances, floored at 1e-8, when the full matrix is not PD.
/// `fallback` reports whether the fallback was used.
Eigen::MatrixXd pilot_covariance(const Eigen::MatrixXd& draws, bool& fallback);

RwTuning tune_widths(const ObservationSeries& data, const PriorConfig& priors,
                     const MarginalPilotConfig& pilot);

struct MarginalRates {
    double rho = 0.0;
    double eta = 0.0;
    double alpha0 = 0.0;
    double alpha = 0.0;
};

struct MarginalResult {
    ChainRecord chain;
    /// Acceptance rates over all iterations of the run, burn-in included.
    MarginalRates rates;
};

/// One iteration updates the alpha block, then alpha0, rho, eta.
/// Snapshots carry sigma = tau = kAbsent.
MarginalResult run_marginal(const ObservationSeries& data, const PriorConfig& priors,
                            const ChainConfig& config, const RwTuning& tuning,
                            std::optional<ParamState> init = std::nullopt);

} // namespace lossrj
