#include "lossrj/synthetic.hpp"

#include "lossrj/diagnostics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace lossrj {

void SimulationSpec::validate() const {
    if (exposures.size() < 2) throw InputError("simulation needs at least two exposures");
    for (double e : exposures) {
        if (!(e > 0.0)) throw InputError("simulation exposures must be positive");
    }
    const ParamState t = specialize(true_params, model);
    if (!(t.sigma > 0.0) || !(t.tau > 0.0)) throw InputError("true sigma and tau must be positive");
    if (has_alpha0(model) && !std::isfinite(t.alpha0)) throw InputError("true alpha0 must be finite");
    if (has_eta(model) && !std::isfinite(t.eta)) throw InputError("true eta must be finite");
    if (!std::isfinite(t.rho)) throw InputError("true rho must be finite");
}

SimulatedData simulate_dataset(const SimulationSpec& spec) {
    spec.validate();
    ParamState truth = specialize(spec.true_params, spec.model);
    const std::size_t n = spec.n();
    Rng rng(spec.seed);

    truth.alpha.assign(n, 0.0);
    const double rho = truth.process_rho(), eta = truth.process_eta();
    const double process_sd = 1.0 / std::sqrt(truth.tau);
    double prev = truth.process_alpha0();
    for (std::size_t j = 0; j < n; ++j) {
        truth.alpha[j] = rho * prev + (1.0 - rho) * eta + process_sd * rng.normal();
        prev = truth.alpha[j];
    }
    std::vector<double> ratios(n);
    std::vector<int> years(n);
    for (std::size_t j = 0; j < n; ++j) {
        ratios[j] = truth.alpha[j] + rng.normal() / std::sqrt(truth.sigma * spec.exposures[j]);
        years[j] = spec.first_year + static_cast<int>(j);
    }
    return {ObservationSeries::from_ratios(std::move(years), std::move(ratios), spec.exposures),
            std::move(truth)};
}

std::vector<double> default_exposures(std::size_t n, double scale, std::uint64_t seed) {
    if (!(scale > 0.0)) throw InputError("exposure scale must be positive");
    Rng rng(seed);
    std::vector<double> e(n);
    for (auto& v : e) v = scale * std::pow(10.0, rng.uniform(-0.5, 0.5));
    return e;
}

SimulationSpec standard_preset(ModelId model, std::uint64_t seed) {
    SimulationSpec s;
    s.model = model;
    s.seed = seed;
    s.true_params.model = model;
    s.true_params.alpha0 = 0.03;
    s.true_params.rho = 0.5;
    s.true_params.eta = 0.03;
    s.true_params.sigma = 1000.0;
    s.true_params.tau = 1000.0;
    s.true_params = specialize(s.true_params, model);
    s.exposures = default_exposures(7, 1.0, derive_seed(seed, 99));
    return s;
}

namespace {

using nlohmann::json;

json optional_number(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

} // namespace

std::string truth_to_json(const SimulatedData& data) {
    const auto& t = data.truth;
    json j;
    j["model"] = std::string(model_name(t.model));
    j["alpha0"] = has_alpha0(t.model) ? optional_number(t.alpha0) : json(nullptr);
    j["alpha"] = t.alpha;
    j["rho"] = t.rho;
    j["eta"] = has_eta(t.model) ? optional_number(t.eta) : json(nullptr);
    j["sigma"] = t.sigma;
    j["tau"] = t.tau;
    j["exposures"] = std::vector<double>(data.series.exposures().begin(), data.series.exposures().end());
    return j.dump(2);
}

RecoveryReport recovery_study(const SimulationSpec& spec, const RecoveryConfig& config) {
    if (config.replications == 0) throw InputError("recovery study needs at least one replication");
    spec.validate();
    config.settings.moves.validate();

    RecoveryReport report;
    report.true_model = spec.model;
    report.replications = config.replications;
    for (const auto& name : free_parameter_names(spec.model, spec.n())) {
        if (name.rfind("alpha", 0) == 0 && name != "alpha0") continue;
        report.coverage_names.push_back(name);
    }
    report.covered.assign(report.coverage_names.size(), 0);
    report.evaluated.assign(report.coverage_names.size(), 0);

    for (std::size_t r = 0; r < config.replications; ++r) {
        SimulationSpec rep = spec;
        rep.seed = derive_seed(spec.seed, 2 * r);
        const SimulatedData sim = simulate_dataset(rep);

        RjSettings settings = config.settings;
        ChainConfig chain = config.chain;
        chain.seed = derive_seed(spec.seed, 2 * r + 1);
        if (settings.scheme == Scheme::Vanilla) {
            PilotConfig pilot = config.pilot;
            pilot.chain.seed = derive_seed(chain.seed, 7);
            settings.vanilla = pilot_tune(sim.series, config.priors, pilot).spec;
        }
        const RjResult run = run_rj(sim.series, config.priors, chain, settings);
        const auto probs = model_probabilities(run.chain);
        report.model_probabilities.push_back(probs);
        const auto best = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
        ++report.argmax_counts[best];

        for (std::size_t k = 0; k < report.coverage_names.size(); ++k) {
            const auto& name = report.coverage_names[k];
            const auto values = run.chain.trace_in_model(name, spec.model);
            if (values.size() < 100) continue;
            const HpdResult h = hpd_shortest(values, config.hpd_level);
            const double truth = *parameter_value(sim.truth, name);
            ++report.evaluated[k];
            if (truth >= h.intervals.front().first && truth <= h.intervals.front().second) ++report.covered[k];
        }
    }
    return report;
}

std::string recovery_to_json(const RecoveryReport& report) {
    json j;
    j["true_model"] = std::string(model_name(report.true_model));
    j["replications"] = report.replications;
    j["argmax_counts"] = {{"M1", report.argmax_counts[0]}, {"M2", report.argmax_counts[1]},
                          {"M3", report.argmax_counts[2]}};
    json cov = json::object();
    for (std::size_t k = 0; k < report.coverage_names.size(); ++k) {
        cov[report.coverage_names[k]] = {{"covered", report.covered[k]}, {"evaluated", report.evaluated[k]}};
    }
    j["hpd_coverage"] = cov;
    json probs = json::array();
    for (const auto& p : report.model_probabilities) probs.push_back({p[0], p[1], p[2]});
    j["model_probabilities"] = probs;
    return j.dump(2);
}

} // namespace lossrj
