#include "lossrj/rjmcmc.hpp"

#include <json.hpp>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lossrj {

std::string_view scheme_name(Scheme s) { return s == Scheme::Vanilla ? "vanilla" : "efficient"; }

Scheme parse_scheme(std::string_view text) {
    if (text == "vanilla") return Scheme::Vanilla;
    if (text == "efficient") return Scheme::Efficient;
    throw InputError("unknown scheme '" + std::string(text) + "' (expected vanilla or efficient)");
}

void MoveSpec::validate() const {
    if (!(between_move_prob >= 0.0 && between_move_prob <= 1.0)) {
        throw InputError("between_move_prob must lie in [0, 1]");
    }
    for (std::size_t i = 0; i < 3; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            if (i == j) {
                if (r[i][j] != 0.0) throw InputError("r must have a zero diagonal");
                continue;
            }
            if (!(r[i][j] >= 0.0)) throw InputError("r entries must be nonnegative");
            sum += r[i][j];
        }
        if (std::abs(sum - 1.0) > 1e-12) throw InputError("each row of r must sum to 1");
    }
}

void VanillaProposalSpec::validate() const {
    for (const auto* p : {&alpha0, &rho, &eta, &alpha0_m2, &eta_m3}) {
        if (!(p->variance > 0.0) || !std::isfinite(p->mean)) {
            throw InputError("vanilla proposal variances must be positive and means finite");
        }
    }
}

bool VanillaProposalSpec::operator==(const VanillaProposalSpec& o) const {
    auto same = [](const NormalParams& a, const NormalParams& b) {
        return a.mean == b.mean && a.variance == b.variance;
    };
    return same(alpha0, o.alpha0) && same(rho, o.rho) && same(eta, o.eta) &&
           same(alpha0_m2, o.alpha0_m2) && same(eta_m3, o.eta_m3);
}

namespace {

using nlohmann::json;

json to_json(const NormalParams& p) { return {{"mean", p.mean}, {"variance", p.variance}}; }

NormalParams normal_from_json(const json& j) {
    return {j.at("mean").get<double>(), j.at("variance").get<double>()};
}

} // namespace

std::string vanilla_spec_to_json(const VanillaProposalSpec& spec) {
    json j = {{"alpha0", to_json(spec.alpha0)},       {"rho", to_json(spec.rho)},
              {"eta", to_json(spec.eta)},             {"alpha0_m2", to_json(spec.alpha0_m2)},
              {"eta_m3", to_json(spec.eta_m3)}};
    return j.dump(2);
}

VanillaProposalSpec vanilla_spec_from_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        VanillaProposalSpec s;
        s.alpha0 = normal_from_json(j.at("alpha0"));
        s.rho = normal_from_json(j.at("rho"));
        s.eta = normal_from_json(j.at("eta"));
        s.alpha0_m2 = normal_from_json(j.at("alpha0_m2"));
        s.eta_m3 = normal_from_json(j.at("eta_m3"));
        return s;
    } catch (const json::exception& e) {
        throw InputError(std::string("vanilla proposal json: ") + e.what());
    }
}

double jump_log_accept(const ParamState& from, const ParamState& to, double q_forward_logpdf,
                       double q_reverse_logpdf, const MoveSpec& moves, const ObservationSeries& data,
                       const PriorConfig& priors) {
    if (from.model == to.model) throw std::logic_error("jump must change the model");
    if (from.alpha != to.alpha || from.sigma != to.sigma || from.tau != to.tau) {
        throw std::logic_error("shared parameters must be kept fixed across a jump");
    }
    const double target = log_joint(to, data, priors) - log_joint(from, data, priors);
    const double move = std::log(moves.prob(to.model, from.model)) - std::log(moves.prob(from.model, to.model));
    return target + move + (q_reverse_logpdf - q_forward_logpdf);
}

JumpLaws jump_laws(ModelId a, ModelId b, Scheme scheme, const std::optional<VanillaProposalSpec>& spec,
                   std::span<const double> alpha, double tau) {
    JumpLaws laws;
    if (scheme == Scheme::Vanilla) {
        if (!spec) throw std::invalid_argument("vanilla scheme requires a proposal spec");
        laws.alpha0_m2 = spec->alpha0_m2;
        laws.eta_m3 = spec->eta_m3;
        auto& blk = laws.block;
        blk.mu = {spec->alpha0.mean, spec->rho.mean, spec->eta.mean};
        const Eigen::Vector3d var(spec->alpha0.variance, spec->rho.variance, spec->eta.variance);
        blk.sigma = var.asDiagonal();
        blk.precision = var.cwiseInverse().asDiagonal();
        return laws;
    }
    laws.alpha0_m2 = reduced_proposal(ModelId::M2, alpha, tau);
    laws.eta_m3 = reduced_proposal(ModelId::M3, alpha, tau);
    if (a == ModelId::M1 || b == ModelId::M1) {
        const ModelId sub = a == ModelId::M1 ? b : a;
        laws.block = efficient_proposal_full(alpha, tau, primary_centering(sub, alpha, tau), sub);
    }
    return laws;
}

namespace {

Eigen::Vector3d block_of(const ParamState& s) { return {s.alpha0, s.rho, s.eta}; }

double sub_log_pdf(const JumpLaws& laws, const ParamState& s) {
    return s.model == ModelId::M2 ? laws.alpha0_m2.log_pdf(s.alpha0) : laws.eta_m3.log_pdf(s.eta);
}

// Density of the coordinates that `s` has and the other endpoint lacks.
double own_log_pdf(const JumpLaws& laws, const ParamState& s) {
    return s.model == ModelId::M1 ? laws.block.log_pdf(block_of(s)) : sub_log_pdf(laws, s);
}

JumpDensities densities_from(const JumpLaws& laws, const ParamState& from, const ParamState& to,
                             Scheme scheme) {
    JumpDensities d;
    d.forward = own_log_pdf(laws, to);
    d.reverse = own_log_pdf(laws, from);
    d.fallback_used = scheme == Scheme::Efficient &&
                      (from.model == ModelId::M1 || to.model == ModelId::M1) && laws.block.fallback_used;
    return d;
}

} // namespace

JumpDensities jump_densities(const ParamState& from, const ParamState& to, Scheme scheme,
                             const std::optional<VanillaProposalSpec>& spec) {
    const JumpLaws laws = jump_laws(from.model, to.model, scheme, spec, from.alpha, from.tau);
    return densities_from(laws, from, to, scheme);
}

JumpProposal propose_jump(const ParamState& from, ModelId target, Scheme scheme,
                          const std::optional<VanillaProposalSpec>& spec, const JumpDraws& draws) {
    if (target == from.model) throw std::logic_error("jump must change the model");
    const JumpLaws laws = jump_laws(from.model, target, scheme, spec, from.alpha, from.tau);
    ParamState to = from;
    to.model = target;
    switch (target) {
    case ModelId::M1: {
        const Eigen::Vector3d x = laws.block.transform(draws.block);
        to.alpha0 = x[0];
        to.rho = x[1];
        to.eta = x[2];
        break;
    }
    case ModelId::M2: to.alpha0 = laws.alpha0_m2.mean + laws.alpha0_m2.sd() * draws.scalar; break;
    case ModelId::M3: to.eta = laws.eta_m3.mean + laws.eta_m3.sd() * draws.scalar; break;
    }
    to = specialize(std::move(to), target);
    JumpDensities d = densities_from(laws, from, to, scheme);
    return {std::move(to), d};
}

JumpProposal propose_jump(const ParamState& from, ModelId target, Scheme scheme,
                          const std::optional<VanillaProposalSpec>& spec, Rng& rng) {
    JumpDraws draws;
    if (target == ModelId::M1) {
        draws.block = {rng.normal(), rng.normal(), rng.normal()};
    } else {
        draws.scalar = rng.normal();
    }
    return propose_jump(from, target, scheme, spec, draws);
}

NormalParams moment_match(std::span<const double> values, std::string_view what,
                          std::vector<std::string>& warnings) {
    if (values.empty()) throw std::invalid_argument("moment_match needs at least one value");
    const auto m = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / m;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    double var = values.size() > 1 ? ss / (m - 1.0) : 0.0;
    if (!(var >= 1e-8)) {
        warnings.push_back("pilot variance of " + std::string(what) + " floored at 1e-8");
        var = 1e-8;
    }
    return {mean, var};
}

PilotResult pilot_tune(const ObservationSeries& data, const PriorConfig& priors, const PilotConfig& pilot) {
    PilotResult result;
    for (ModelId m : kAllModels) {
        ChainConfig cfg = pilot.chain;
        cfg.seed = derive_seed(pilot.chain.seed, model_index(m));
        result.chains[model_index(m)] = run_gibbs(m, data, priors, cfg);
    }
    const auto& c1 = result.chains[0];
    auto& w = result.warnings;
    result.spec.alpha0 = moment_match(c1.trace("alpha0"), "alpha0 (M1)", w);
    result.spec.rho = moment_match(c1.trace("rho"), "rho (M1)", w);
    result.spec.eta = moment_match(c1.trace("eta"), "eta (M1)", w);
    result.spec.alpha0_m2 = moment_match(result.chains[1].trace("alpha0"), "alpha0 (M2)", w);
    result.spec.eta_m3 = moment_match(result.chains[2].trace("eta"), "eta (M3)", w);
    return result;
}

void RjSettings::validate() const {
    moves.validate();
    if (scheme == Scheme::Vanilla) {
        if (!vanilla) throw InputError("vanilla scheme requires pilot-tuned proposals");
        vanilla->validate();
    }
}

void RjStats::record(const StepEvent& e) {
    if (!e.attempted) return;
    const auto i = model_index(e.from), j = model_index(e.to);
    ++proposed_count[i][j];
    if (e.accepted) ++accepted_count[i][j];
    if (e.block_used) {
        ++block_proposals;
        if (e.fallback_used) ++fallbacks;
    }
}

double RjStats::acceptance_rate(ModelId from, ModelId to) const {
    const auto i = model_index(from), j = model_index(to);
    if (proposed_count[i][j] == 0) return std::nan("");
    return accepted_count[i][j] / proposed_count[i][j];
}

double RjStats::fallback_rate() const {
    return block_proposals == 0 ? 0.0 : static_cast<double>(fallbacks) / static_cast<double>(block_proposals);
}

StepEvent rj_step(ParamState& state, const ObservationSeries& data, const PriorConfig& priors,
                  const RjSettings& settings, Rng& rng) {
    gibbs_update(state, data, priors, rng, settings.sweep);
    StepEvent ev;
    ev.from = state.model;
    ev.to = state.model;
    if (!(rng.uniform() < settings.moves.between_move_prob)) return ev;

    const auto& row = settings.moves.r[model_index(state.model)];
    const ModelId target = model_from_index(rng.categorical(row));
    if (target == state.model) return ev;
    ev.attempted = true;
    ev.to = target;

    JumpProposal prop = propose_jump(state, target, settings.scheme, settings.vanilla, rng);
    ev.block_used = settings.scheme == Scheme::Efficient &&
                    (state.model == ModelId::M1 || target == ModelId::M1);
    ev.fallback_used = prop.densities.fallback_used;
    ev.log_accept = jump_log_accept(state, prop.candidate, prop.densities.forward, prop.densities.reverse,
                                    settings.moves, data, priors);
    if (std::log(rng.uniform()) < ev.log_accept) {
        state = std::move(prop.candidate);
        ev.accepted = true;
    }
    return ev;
}

RjResult run_rj(const ObservationSeries& data, const PriorConfig& priors, const ChainConfig& config,
                const RjSettings& settings, std::optional<ParamState> init) {
    config.validate();
    settings.validate();
    ParamState state = init ? *init : default_init(ModelId::M1, data);
    validate_state(state, data.size());

    Rng rng(config.seed);
    RjResult result;
    result.chain.n = data.size();
    result.chain.samples.reserve(config.retained_count());
    for (std::size_t it = 1; it <= config.iterations; ++it) {
        result.stats.record(rj_step(state, data, priors, settings, rng));
        if (config.retains(it)) result.chain.samples.push_back({it, state});
    }
    return result;
}

std::array<double, 3> model_probabilities(std::span<const ModelId> models) {
    if (models.empty()) throw std::invalid_argument("model probabilities need a nonempty chain");
    std::array<std::size_t, 3> counts{};
    for (ModelId m : models) ++counts[model_index(m)];
    const auto total = static_cast<double>(models.size());
    return {counts[0] / total, counts[1] / total, counts[2] / total};
}

std::array<double, 3> model_probabilities(const ChainRecord& chain) {
    const auto seq = chain.model_sequence();
    return model_probabilities(seq);
}

TransitionMatrix empirical_transition_matrix(std::span<const ModelId> models) {
    if (models.size() < 2) throw std::invalid_argument("transition matrix needs at least two samples");
    TransitionMatrix t;
    for (std::size_t k = 1; k < models.size(); ++k) {
        t.counts[model_index(models[k - 1])][model_index(models[k])] += 1.0;
    }
    for (std::size_t i = 0; i < 3; ++i) {
        const double total = t.counts[i][0] + t.counts[i][1] + t.counts[i][2];
        if (total == 0.0) continue;
        t.rows[i] = std::array<double, 3>{t.counts[i][0] / total, t.counts[i][1] / total, t.counts[i][2] / total};
    }
    return t;
}

TransitionMatrix empirical_transition_matrix(const ChainRecord& chain) {
    const auto seq = chain.model_sequence();
    return empirical_transition_matrix(seq);
}

} // namespace lossrj
