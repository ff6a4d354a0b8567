#include "lossrj/marginal.hpp"

#include "lossrj/gibbs.hpp"
#include "lossrj/stats.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <stdexcept>

namespace lossrj {

double TargetRates::of(ScalarParam p) const {
    switch (p) {
    case ScalarParam::Rho: return rho;
    case ScalarParam::Eta: return eta;
    case ScalarParam::Alpha0: return alpha0;
    }
    return 0.0;
}

RwTuning::RwTuning(double width_rho, double width_eta, double width_alpha0,
                   Eigen::MatrixXd alpha_cov, TargetRates targets)
    : width_rho_(width_rho), width_eta_(width_eta), width_alpha0_(width_alpha0),
      alpha_cov_(std::move(alpha_cov)), targets_(targets) {
    if (!(width_rho_ > 0.0) || !(width_eta_ > 0.0) || !(width_alpha0_ > 0.0)) {
        throw InputError("random-walk widths must be positive");
    }
    if (alpha_cov_.rows() == 0 || alpha_cov_.rows() != alpha_cov_.cols()) {
        throw InputError("alpha covariance must be a nonempty square matrix");
    }
    const double scale = alpha_cov_.cwiseAbs().maxCoeff();
    if (!((alpha_cov_ - alpha_cov_.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale)) {
        throw InputError("alpha covariance must be symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(alpha_cov_);
    if (llt.info() != Eigen::Success) throw InputError("alpha covariance must be positive definite");
    chol_ = llt.matrixL();
}

double RwTuning::width(ScalarParam p) const {
    switch (p) {
    case ScalarParam::Rho: return width_rho_;
    case ScalarParam::Eta: return width_eta_;
    case ScalarParam::Alpha0: return width_alpha0_;
    }
    return 0.0;
}

void RwTuning::set_width(ScalarParam p, double w) {
    if (!(w > 0.0)) throw InputError("random-walk widths must be positive");
    switch (p) {
    case ScalarParam::Rho: width_rho_ = w; break;
    case ScalarParam::Eta: width_eta_ = w; break;
    case ScalarParam::Alpha0: width_alpha0_ = w; break;
    }
}

namespace {

double& coordinate(ParamState& s, ScalarParam p) {
    switch (p) {
    case ScalarParam::Rho: return s.rho;
    case ScalarParam::Eta: return s.eta;
    case ScalarParam::Alpha0: break;
    }
    return s.alpha0;
}

void run_sweep(ParamState& state, const RwTuning& tuning, const ObservationSeries& data,
               const PriorConfig& priors, Rng& rng, std::array<std::size_t, 4>& accepted) {
    accepted[0] += rw_block_update_alpha(state, tuning, data, priors, rng);
    accepted[1] += rw_scalar_update(ScalarParam::Alpha0, state, tuning, data, priors, rng);
    accepted[2] += rw_scalar_update(ScalarParam::Rho, state, tuning, data, priors, rng);
    accepted[3] += rw_scalar_update(ScalarParam::Eta, state, tuning, data, priors, rng);
}

ParamState marginal_state(ParamState s) {
    s = specialize(std::move(s), ModelId::M1);
    s.sigma = kAbsent;
    s.tau = kAbsent;
    return s;
}

} // namespace

bool rw_scalar_update(ScalarParam which, ParamState& state, const RwTuning& tuning,
                      const ObservationSeries& data, const PriorConfig& priors, Rng& rng) {
    double& x = coordinate(state, which);
    const double current = x;
    const double before = log_marginal_target(state, data, priors);
    const double w = tuning.width(which);
    x = rng.uniform(current - w, current + w);
    const double after = log_marginal_target(state, data, priors);
    if (std::log(rng.uniform()) < after - before) return true;
    x = current;
    return false;
}

bool rw_block_update_alpha(ParamState& state, const RwTuning& tuning, const ObservationSeries& data,
                           const PriorConfig& priors, Rng& rng) {
    const auto n = static_cast<Eigen::Index>(state.alpha.size());
    if (tuning.alpha_chol().rows() != n) throw std::invalid_argument("alpha covariance size mismatch");
    const double before = log_marginal_target(state, data, priors);
    const Eigen::VectorXd step = tuning.alpha_chol() * standard_normal_vector(rng, n);
    std::vector<double> proposal = state.alpha;
    for (Eigen::Index j = 0; j < n; ++j) proposal[j] += step[j];
    const double after = log_marginal_target(state.alpha0, proposal, state.rho, state.eta, data, priors);
    if (std::log(rng.uniform()) < after - before) {
        state.alpha = std::move(proposal);
        return true;
    }
    return false;
}

Eigen::MatrixXd pilot_covariance(const Eigen::MatrixXd& draws, bool& fallback) {
    fallback = false;
    const Eigen::Index d = draws.cols();
    const auto m = static_cast<double>(draws.rows());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    if (draws.rows() >= 2) {
        const Eigen::MatrixXd centered = draws.rowwise() - draws.colwise().mean();
        cov = centered.transpose() * centered / (m - 1.0);
    }
    bool full_ok = false;
    if (cov.cwiseAbs().maxCoeff() > 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
        const auto& ev = eig.eigenvalues();
        full_ok = ev.minCoeff() > 1e-12 * ev.maxCoeff();
    }
    if (full_ok) return cov;
    fallback = true;
    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) diag(j, j) = std::max(cov(j, j), 1e-8);
    return diag;
}

RwTuning tune_widths(const ObservationSeries& data, const PriorConfig& priors,
                     const MarginalPilotConfig& pilot) {
    ChainConfig gibbs_cfg;
    gibbs_cfg.iterations = pilot.gibbs_iterations + pilot.gibbs_burn_in;
    gibbs_cfg.burn_in = pilot.gibbs_burn_in;
    gibbs_cfg.seed = derive_seed(pilot.seed, 0);
    const ChainRecord gibbs = run_gibbs(ModelId::M1, data, priors, gibbs_cfg);

    const auto n = static_cast<Eigen::Index>(data.size());
    Eigen::MatrixXd draws(static_cast<Eigen::Index>(gibbs.size()), n);
    for (std::size_t i = 0; i < gibbs.size(); ++i) {
        for (Eigen::Index j = 0; j < n; ++j) draws(static_cast<Eigen::Index>(i), j) = gibbs.samples[i].state.alpha[j];
    }
    auto start = [&](const std::optional<double>& given, const char* name) {
        if (given) return *given;
        const double sd = std::sqrt(stats::variance(gibbs.trace(name)));
        return sd > 0.0 ? 2.0 * sd : 0.01;
    };
    bool fallback = false;
    RwTuning tuning(start(pilot.initial_width_rho, "rho"), start(pilot.initial_width_eta, "eta"),
                    start(pilot.initial_width_alpha0, "alpha0"), pilot_covariance(draws, fallback), pilot.targets);
    if (fallback) tuning.mark_diagonal_fallback();

    ParamState state = marginal_state(gibbs.samples.back().state);
    Rng rng(derive_seed(pilot.seed, 1));
    const auto& sched = pilot.schedule;
    for (std::size_t b = 1; b <= sched.batches; ++b) {
        std::array<std::size_t, 4> accepted{};
        for (std::size_t i = 0; i < sched.batch_size; ++i) run_sweep(state, tuning, data, priors, rng, accepted);
        const auto bs = static_cast<double>(sched.batch_size);
        const std::array<std::pair<ScalarParam, std::size_t>, 3> scalars{
            {{ScalarParam::Alpha0, accepted[1]}, {ScalarParam::Rho, accepted[2]}, {ScalarParam::Eta, accepted[3]}}};
        for (const auto& [p, count] : scalars) {
            tuning.set_width(p, adapted_width(tuning.width(p), static_cast<double>(count) / bs,
                                              pilot.targets.of(p), sched.kappa, b));
        }
    }
    return tuning;
}

MarginalResult run_marginal(const ObservationSeries& data, const PriorConfig& priors,
                            const ChainConfig& config, const RwTuning& tuning,
                            std::optional<ParamState> init) {
    config.validate();
    ParamState state = marginal_state(init ? *init : default_init(ModelId::M1, data));
    if (state.alpha.size() != data.size()) throw std::invalid_argument("initial state has wrong length");

    Rng rng(config.seed);
    MarginalResult result;
    result.chain.n = data.size();
    result.chain.samples.reserve(config.retained_count());
    std::array<std::size_t, 4> accepted{};
    for (std::size_t it = 1; it <= config.iterations; ++it) {
        run_sweep(state, tuning, data, priors, rng, accepted);
        if (config.retains(it)) result.chain.samples.push_back({it, state});
    }
    const auto total = static_cast<double>(config.iterations);
    result.rates = {static_cast<double>(accepted[2]) / total, static_cast<double>(accepted[3]) / total,
                    static_cast<double>(accepted[1]) / total, static_cast<double>(accepted[0]) / total};
    return result;
}

} // namespace lossrj
