#include "lossrj/gibbs.hpp"

#include "lossrj/conditionals.hpp"

#include <cmath>

namespace lossrj {

namespace {

double draw(const NormalParams& p, Rng& rng) { return p.mean + std::sqrt(p.variance) * rng.normal(); }

double draw(const GammaParams& p, Rng& rng) { return rng.gamma(p.shape, p.rate); }

} // namespace

void gibbs_update(ParamState& state, const ObservationSeries& data, const PriorConfig& priors,
                  Rng& rng, const SweepOptions& options) {
    const std::size_t n = state.alpha.size();
    if (has_alpha0(state.model)) state.alpha0 = draw(alpha_conditional(0, state, data, priors), rng);
    for (std::size_t j = 1; j <= n; ++j) {
        state.alpha[j - 1] = draw(alpha_conditional(j, state, data, priors), rng);
    }
    if (rho_free(state.model)) state.rho = draw(rho_conditional(state, data, priors), rng);
    if (has_eta(state.model)) state.eta = draw(eta_conditional(state, data, priors), rng);
    if (options.update_precisions) {
        state.sigma = draw(sigma_conditional(state, data, priors), rng);
        state.tau = draw(tau_conditional(state, data, priors), rng);
    }
}

ParamState gibbs_sweep(const ParamState& state, const ObservationSeries& data,
                       const PriorConfig& priors, Rng& rng, const SweepOptions& options) {
    ParamState next = state;
    gibbs_update(next, data, priors, rng, options);
    return next;
}

ParamState default_init(ModelId model, const ObservationSeries& data) {
    const double m = data.mean_ratio();
    ParamState s;
    s.model = ModelId::M1;
    s.alpha0 = m;
    s.alpha.assign(data.size(), m);
    s.rho = 0.5;
    s.eta = m;
    s.sigma = 1.0;
    s.tau = 1.0;
    return specialize(std::move(s), model);
}

ChainRecord run_gibbs(ModelId model, const ObservationSeries& data, const PriorConfig& priors,
                      const ChainConfig& config, std::optional<ParamState> init,
                      const SweepOptions& options) {
    config.validate();
    ParamState state = init ? specialize(*init, model) : default_init(model, data);
    validate_state(state, data.size());

    Rng rng(config.seed);
    ChainRecord record;
    record.n = data.size();
    record.samples.reserve(config.retained_count());
    for (std::size_t it = 1; it <= config.iterations; ++it) {
        gibbs_update(state, data, priors, rng, options);
        if (config.retains(it)) record.samples.push_back({it, state});
    }
    return record;
}

} // namespace lossrj
