#include "lossrj/cli/commands.hpp"

#include "lossrj/diagnostics.hpp"
#include "lossrj/format.hpp"
#include "lossrj/gibbs.hpp"
#include "lossrj/marginal.hpp"
#include "lossrj/rjmcmc.hpp"
#include "lossrj/synthetic.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

namespace fs = std::filesystem;

namespace lossrj::cli {

namespace {

class MissingFile : public InputError {
public:
    using InputError::InputError;
};

// Collects outputs in <output>.partial and moves them into place on commit.
class Staging {
public:
    explicit Staging(fs::path output) : final_(std::move(output)) {
        stage_ = final_;
        stage_ += ".partial";
        fs::remove_all(stage_);
        fs::create_directories(stage_);
    }
    Staging(const Staging&) = delete;
    Staging& operator=(const Staging&) = delete;
    ~Staging() {
        if (!committed_) {
            std::error_code ec;
            fs::remove_all(stage_, ec);
        }
    }

    std::ofstream open(const std::string& name) {
        names_.push_back(name);
        std::ofstream out(stage_ / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (stage_ / name).string());
        return out;
    }

    void write(const std::string& name, const std::string& content) {
        auto out = open(name);
        out << content;
        if (content.empty() || content.back() != '\n') out << '\n';
    }

    void commit(json manifest) {
        json hashes = json::object();
        for (const auto& name : names_) hashes[name] = sha256_file(stage_ / name);
        manifest["artifacts"] = hashes;
        write("manifest.json", manifest.dump(2));
        fs::create_directories(final_);
        for (const auto& name : names_) fs::rename(stage_ / name, final_ / name);
        fs::remove_all(stage_);
        committed_ = true;
    }

private:
    fs::path final_;
    fs::path stage_;
    std::vector<std::string> names_;
    bool committed_ = false;
};

template <class R, class F>
std::vector<R> run_parallel(std::size_t count, std::size_t workers, F&& task) {
    std::vector<R> results(count);
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                results[i] = task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t pool = std::min(workers, count);
    std::vector<std::thread> threads;
    for (std::size_t w = 1; w < pool; ++w) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

ObservationSeries load_data(const RunConfig& c) {
    if (c.data.empty()) throw InputError("no data file given (use --data)");
    if (!fs::exists(c.data)) throw MissingFile("data file not found: " + c.data.string());
    return read_series_csv(c.data);
}

ChainConfig chain_config(const RunConfig& c, std::size_t k) {
    return {c.sampler.iterations, c.sampler.burn_in, derive_seed(c.sampler.seed, k), c.sampler.thin};
}

std::string chain_file(std::size_t k) { return "chain_" + std::to_string(k + 1) + ".csv"; }

std::string to_csv(const ChainRecord& chain) {
    std::ostringstream out;
    write_chain_csv(out, chain);
    return out.str();
}

json interval_json(const HpdResult& h) {
    json out = json::array();
    for (const auto& [lo, hi] : h.intervals) out.push_back({lo, hi});
    return out;
}

json summary_json(const ParamSummary& s) {
    return {{"count", s.count}, {"mean", s.mean}, {"sd", s.sd}, {"mc_se", s.mc_se},
            {"hpd", interval_json(s.hpd)}};
}

// Pools per-chain values: moments and HPD over the union, MC error combined
// from the per-chain batch-means errors.
json pooled_summary(const std::vector<std::vector<double>>& per_chain, double level) {
    std::vector<double> all;
    double se2 = 0.0;
    std::size_t used = 0;
    for (const auto& v : per_chain) {
        if (v.empty()) continue;
        all.insert(all.end(), v.begin(), v.end());
        const double se = batch_means_se(v);
        se2 += se * se;
        ++used;
    }
    if (all.empty()) return nullptr;
    ParamSummary s = summarize(all, level);
    s.mc_se = std::sqrt(se2) / static_cast<double>(used);
    return summary_json(s);
}

json parameter_table(const std::vector<ChainRecord>& chains, const std::vector<std::string>& names,
                     ModelId model, double level) {
    json params = json::object();
    for (const auto& name : names) {
        std::vector<std::vector<double>> per_chain;
        for (const auto& c : chains) per_chain.push_back(c.trace_in_model(name, model));
        params[name] = pooled_summary(per_chain, level);
    }
    return params;
}

std::string acf_csv(const ChainRecord& chain, const std::vector<std::string>& names, ModelId model,
                    std::ostream& log) {
    const std::size_t max_lag = std::min<std::size_t>(50, chain.size() > 0 ? chain.size() - 1 : 0);
    std::vector<std::vector<double>> cols;
    for (const auto& name : names) {
        const auto v = chain.trace_in_model(name, model);
        try {
            cols.push_back(v.size() > max_lag ? acf(v, max_lag) : std::vector<double>{});
        } catch (const std::invalid_argument&) {
            log << "warning: acf of " << name << " is undefined (constant trace)\n";
            cols.emplace_back();
        }
    }
    std::ostringstream out;
    out << "lag";
    for (const auto& name : names) out << ',' << name;
    out << '\n';
    for (std::size_t k = 0; k <= max_lag; ++k) {
        out << k;
        for (const auto& col : cols) {
            out << ',';
            if (k < col.size()) out << format_double(col[k]);
        }
        out << '\n';
    }
    return out.str();
}

std::vector<double> pooled_trace(const std::vector<ChainRecord>& chains, const std::string& name, ModelId model) {
    std::vector<double> all;
    for (const auto& c : chains) {
        const auto v = c.trace_in_model(name, model);
        all.insert(all.end(), v.begin(), v.end());
    }
    return all;
}

// Writes density_rho.csv and returns the 90% KDE region, or null without rho draws.
json write_rho_density(Staging& out, const std::vector<ChainRecord>& chains, ModelId model) {
    const auto rho = pooled_trace(chains, "rho", model);
    if (rho.size() < 2) return nullptr;
    const KdeGrid g = kde_density(rho);
    std::ostringstream csv;
    csv << "rho,density\n";
    for (std::size_t i = 0; i < g.x.size(); ++i) csv << format_double(g.x[i]) << ',' << format_double(g.density[i]) << '\n';
    out.write("density_rho.csv", csv.str());
    return interval_json(hpd_kde_region(rho, 0.90));
}

json seeds_json(const RunConfig& c) {
    json s = json::object();
    for (std::size_t k = 0; k < c.sampler.chains; ++k) s["chain_" + std::to_string(k + 1)] = derive_seed(c.sampler.seed, k);
    return s;
}

json base_manifest(const std::string& command, const json& tree, const RunConfig& c) {
    return {{"command", command}, {"config", tree}, {"seeds", seeds_json(c)}};
}

void write_chains(Staging& out, const std::vector<ChainRecord>& chains) {
    for (std::size_t k = 0; k < chains.size(); ++k) out.write(chain_file(k), to_csv(chains[k]));
}

int cmd_fit_gibbs(const RunConfig& c, const json& tree, std::ostream& log) {
    const ObservationSeries data = load_data(c);
    auto chains = run_parallel<ChainRecord>(c.sampler.chains, c.sampler.workers, [&](std::size_t k) {
        return run_gibbs(c.model, data, c.priors, chain_config(c, k));
    });
    Staging out(c.output);
    write_chains(out, chains);
    const auto names = free_parameter_names(c.model, data.size());
    json summary = {{"command", "fit-gibbs"},
                    {"model", std::string(model_name(c.model))},
                    {"n", data.size()},
                    {"chains", chains.size()},
                    {"retained_per_chain", chains.front().size()},
                    {"parameters", parameter_table(chains, names, c.model, c.hpd_level)}};
    if (rho_free(c.model)) summary["rho_hpd90_kde"] = write_rho_density(out, chains, c.model);
    out.write("summary.json", summary.dump(2));
    out.write("acf.csv", acf_csv(chains.front(), names, c.model, log));
    out.commit(base_manifest("fit-gibbs", tree, c));
    return kExitOk;
}

int cmd_fit_marginal(const RunConfig& c, const json& tree, std::ostream& log) {
    const ObservationSeries data = load_data(c);
    MarginalPilotConfig pilot;
    pilot.gibbs_iterations = c.marginal.gibbs_pilot_iterations;
    pilot.gibbs_burn_in = c.marginal.gibbs_pilot_iterations / 5;
    pilot.schedule = {c.marginal.batch_size, c.marginal.tuning_batches, c.marginal.kappa};
    pilot.targets.rho = c.marginal.target_rho;
    pilot.targets.eta = c.marginal.target_eta;
    pilot.targets.alpha0 = c.marginal.target_alpha0;
    pilot.seed = derive_seed(c.sampler.seed, 1000);
    const RwTuning tuning = tune_widths(data, c.priors, pilot);
    if (tuning.diagonal_fallback()) log << "warning: pilot alpha covariance was degenerate; using its diagonal\n";

    auto results = run_parallel<MarginalResult>(c.sampler.chains, c.sampler.workers, [&](std::size_t k) {
        return run_marginal(data, c.priors, chain_config(c, k), tuning);
    });
    std::vector<ChainRecord> chains;
    json rates = json::array();
    for (auto& r : results) {
        rates.push_back({{"alpha", r.rates.alpha}, {"alpha0", r.rates.alpha0}, {"rho", r.rates.rho}, {"eta", r.rates.eta}});
        chains.push_back(std::move(r.chain));
    }
    Staging out(c.output);
    write_chains(out, chains);
    auto names = free_parameter_names(ModelId::M1, data.size());
    std::erase_if(names, [](const std::string& s) { return s == "sigma" || s == "tau"; });
    json summary = {{"command", "fit-marginal"},
                    {"model", "M1"},
                    {"n", data.size()},
                    {"chains", chains.size()},
                    {"retained_per_chain", chains.front().size()},
                    {"parameters", parameter_table(chains, names, ModelId::M1, c.hpd_level)}};
    summary["tuning"] = {{"width_rho", tuning.width(ScalarParam::Rho)},
                         {"width_eta", tuning.width(ScalarParam::Eta)},
                         {"width_alpha0", tuning.width(ScalarParam::Alpha0)},
                         {"targets", {{"rho", c.marginal.target_rho}, {"eta", c.marginal.target_eta},
                                      {"alpha0", c.marginal.target_alpha0}}},
                         {"diagonal_fallback", tuning.diagonal_fallback()},
                         {"acceptance_rates", rates}};
    summary["rho_hpd90_kde"] = write_rho_density(out, chains, ModelId::M1);
    out.write("summary.json", summary.dump(2));
    out.write("acf.csv", acf_csv(chains.front(), names, ModelId::M1, log));
    out.commit(base_manifest("fit-marginal", tree, c));
    return kExitOk;
}

json probabilities_json(const std::array<double, 3>& p) { return {{"M1", p[0]}, {"M2", p[1]}, {"M3", p[2]}}; }

json transition_json(const TransitionMatrix& t) {
    json rows = json::object();
    for (std::size_t i = 0; i < 3; ++i) {
        const std::string key(model_name(model_from_index(i)));
        if (t.rows[i]) {
            rows[key] = {(*t.rows[i])[0], (*t.rows[i])[1], (*t.rows[i])[2]};
        } else {
            rows[key] = "undefined (model has no outgoing transitions)";
        }
    }
    json counts = json::array();
    for (const auto& r : t.counts) counts.push_back({r[0], r[1], r[2]});
    return {{"rows", rows}, {"counts", counts}};
}

TransitionMatrix pooled_transitions(const std::vector<ChainRecord>& chains) {
    TransitionMatrix pooled;
    for (const auto& c : chains) {
        if (c.size() < 2) continue;
        const auto t = empirical_transition_matrix(c);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) pooled.counts[i][j] += t.counts[i][j];
        }
    }
    for (std::size_t i = 0; i < 3; ++i) {
        const double total = pooled.counts[i][0] + pooled.counts[i][1] + pooled.counts[i][2];
        if (total > 0.0) {
            pooled.rows[i] = std::array<double, 3>{pooled.counts[i][0] / total, pooled.counts[i][1] / total,
                                                   pooled.counts[i][2] / total};
        }
    }
    return pooled;
}

json averaged_json(const ModelAveragedSummary& s) {
    json params = json::object();
    for (const auto& p : s.params) {
        json per_model = json::object();
        for (const auto& [m, ps] : p.per_model) per_model[std::string(model_name(m))] = summary_json(ps);
        params[p.name] = {{"model_averaged", summary_json(p.overall)}, {"per_model", per_model}};
    }
    return {{"parameters", params}, {"notes", s.notes}};
}

ChainRecord concatenate(const std::vector<ChainRecord>& chains) {
    ChainRecord all;
    all.n = chains.front().n;
    for (const auto& c : chains) all.samples.insert(all.samples.end(), c.samples.begin(), c.samples.end());
    return all;
}

std::string diag_csv(const std::vector<ChainRecord>& chains, std::size_t every, const std::string& ks_param) {
    std::vector<std::vector<ModelId>> seqs;
    std::size_t shortest = chains.front().size();
    for (const auto& c : chains) {
        seqs.push_back(c.model_sequence());
        shortest = std::min(shortest, c.size());
    }
    const auto checkpoints = default_checkpoints(shortest, every);
    const DiagnosticTrace d = convergence_diagnostics(seqs, checkpoints);
    std::vector<TestPoint> param_ks;
    if (!ks_param.empty()) {
        std::vector<std::vector<double>> traces;
        for (const auto& c : chains) traces.push_back(c.trace(ks_param));
        param_ks = ks_convergence(traces, checkpoints);
    }
    std::ostringstream out;
    out << "checkpoint,statistic,value,p_value\n";
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        out << checkpoints[k] << ",chisq," << format_double(d.chisq[k].statistic) << ','
            << format_double(d.chisq[k].p_value) << '\n';
        out << checkpoints[k] << ",ks_model," << format_double(d.ks[k].statistic) << ','
            << format_double(d.ks[k].p_value) << '\n';
        if (!param_ks.empty()) {
            out << checkpoints[k] << ",ks_" << ks_param << ',' << format_double(param_ks[k].statistic) << ','
                << format_double(param_ks[k].p_value) << '\n';
        }
    }
    return out.str();
}

void check_ks_param(const RunConfig& c, std::size_t n) {
    if (c.ks_param.empty()) return;
    const auto names = all_parameter_names(n);
    if (std::find(names.begin(), names.end(), c.ks_param) == names.end()) {
        throw InputError("unknown ks_param '" + c.ks_param + "'");
    }
}

// Shared by rj and diagnose: model probabilities, averaged summaries,
// transition matrices and, for several chains, diag.csv.
void write_trans_dimensional(Staging& out, json& summary, const std::vector<ChainRecord>& chains,
                             const RunConfig& c) {
    const ChainRecord all = concatenate(chains);
    summary["model_probabilities"] = probabilities_json(model_probabilities(all));
    json per_chain = json::array();
    json per_chain_t = json::array();
    for (const auto& ch : chains) {
        per_chain.push_back(probabilities_json(model_probabilities(ch)));
        if (ch.size() >= 2) per_chain_t.push_back(transition_json(empirical_transition_matrix(ch)));
    }
    summary["model_probabilities_per_chain"] = per_chain;
    summary["model_averaged"] = averaged_json(model_averaged_summary(all, c.hpd_level));
    out.write("transition_matrix.json",
              json{{"pooled", transition_json(pooled_transitions(chains))}, {"per_chain", per_chain_t}}.dump(2));
    if (chains.size() >= 2) out.write("diag.csv", diag_csv(chains, c.checkpoint_every, c.ks_param));
}

json pilot_summary_json(const ChainRecord& chain, ModelId m, std::size_t n, double level) {
    json params = json::object();
    for (const auto& name : free_parameter_names(m, n)) {
        params[name] = summary_json(summarize(chain.trace_in_model(name, m), level));
    }
    return {{"model", std::string(model_name(m))}, {"retained", chain.size()}, {"parameters", params}};
}

int cmd_rj(const RunConfig& c, const json& tree, std::ostream& log) {
    const ObservationSeries data = load_data(c);
    check_ks_param(c, data.size());
    RjSettings settings;
    settings.moves = c.moves;
    settings.scheme = c.scheme;
    std::optional<PilotResult> pilot;
    if (c.scheme == Scheme::Vanilla) {
        PilotConfig pc;
        pc.chain = {c.pilot_iterations + c.pilot_burn_in, c.pilot_burn_in, derive_seed(c.sampler.seed, 2000), 1};
        pilot = pilot_tune(data, c.priors, pc);
        for (const auto& w : pilot->warnings) log << "warning: " << w << '\n';
        settings.vanilla = pilot->spec;
    }
    auto results = run_parallel<RjResult>(c.sampler.chains, c.sampler.workers, [&](std::size_t k) {
        return run_rj(data, c.priors, chain_config(c, k), settings);
    });

    std::vector<ChainRecord> chains;
    RjStats stats;
    for (auto& r : results) {
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                stats.proposed_count[i][j] += r.stats.proposed_count[i][j];
                stats.accepted_count[i][j] += r.stats.accepted_count[i][j];
            }
        }
        stats.block_proposals += r.stats.block_proposals;
        stats.fallbacks += r.stats.fallbacks;
        chains.push_back(std::move(r.chain));
    }

    Staging out(c.output);
    write_chains(out, chains);
    json summary = {{"command", "rj"},
                    {"scheme", std::string(scheme_name(c.scheme))},
                    {"n", data.size()},
                    {"chains", chains.size()},
                    {"retained_per_chain", chains.front().size()}};
    json moves = json::object();
    for (ModelId a : kAllModels) {
        for (ModelId b : kAllModels) {
            if (a == b) continue;
            const auto i = model_index(a), j = model_index(b);
            moves[std::string(model_name(a)) + "->" + std::string(model_name(b))] = {
                {"proposed", stats.proposed_count[i][j]},
                {"accepted", stats.accepted_count[i][j]},
                {"rate", stats.acceptance_rate(a, b)}};
        }
    }
    summary["moves"] = moves;
    summary["fallback"] = {{"block_proposals", stats.block_proposals},
                           {"fallbacks", stats.fallbacks},
                           {"rate", stats.fallback_rate()}};
    write_trans_dimensional(out, summary, chains, c);
    summary["rho_hpd90_kde"] = write_rho_density(out, chains, ModelId::M1);
    if (pilot) {
        for (ModelId m : kAllModels) {
            out.write("pilot_" + std::string(model_name(m)) + ".json",
                      pilot_summary_json(pilot->chains[model_index(m)], m, data.size(), c.hpd_level).dump(2));
        }
        out.write("vanilla_spec.json", vanilla_spec_to_json(pilot->spec));
    }
    out.write("summary.json", summary.dump(2));
    json manifest = base_manifest("rj", tree, c);
    if (pilot) manifest["seeds"]["pilot"] = derive_seed(c.sampler.seed, 2000);
    out.commit(manifest);
    return kExitOk;
}

SimulationSpec simulation_spec(const RunConfig& c) {
    const auto& s = c.simulate;
    SimulationSpec spec;
    spec.model = s.model;
    spec.seed = s.seed;
    spec.true_params.model = s.model;
    spec.true_params.alpha0 = s.alpha0;
    spec.true_params.rho = s.rho;
    spec.true_params.eta = s.eta;
    spec.true_params.sigma = s.sigma;
    spec.true_params.tau = s.tau;
    spec.true_params = specialize(spec.true_params, s.model);
    spec.exposures = default_exposures(s.n, s.exposure_scale, derive_seed(s.seed, 99));
    return spec;
}

int cmd_simulate(const RunConfig& c, const json& tree, std::ostream&) {
    const SimulatedData sim = simulate_dataset(simulation_spec(c));
    Staging out(c.output);
    std::ostringstream csv;
    write_series_csv(csv, sim.series);
    out.write("data.csv", csv.str());
    out.write("truth.json", truth_to_json(sim));
    json manifest = {{"command", "simulate"}, {"config", tree}, {"seeds", {{"simulation", c.simulate.seed}}}};
    out.commit(manifest);
    return kExitOk;
}

int cmd_recovery(const RunConfig& c, const json& tree, std::ostream&) {
    const SimulationSpec spec = simulation_spec(c);
    RecoveryConfig rc;
    rc.replications = c.simulate.replications;
    if (rc.replications == 0) throw InputError("replications must be at least 1");
    rc.chain = {c.sampler.iterations, c.sampler.burn_in, c.sampler.seed, c.sampler.thin};
    rc.settings.moves = c.moves;
    rc.settings.scheme = c.scheme;
    rc.priors = c.priors;
    rc.pilot.chain = {c.pilot_iterations + c.pilot_burn_in, c.pilot_burn_in, 1, 1};
    rc.hpd_level = c.hpd_level;
    const RecoveryReport report = recovery_study(spec, rc);
    Staging out(c.output);
    out.write("recovery.json", recovery_to_json(report));
    json seeds = json::object();
    for (std::size_t r = 0; r < rc.replications; ++r) {
        seeds["replication_" + std::to_string(r + 1)] = {{"simulation", derive_seed(spec.seed, 2 * r)},
                                                         {"sampler", derive_seed(spec.seed, 2 * r + 1)}};
    }
    out.commit({{"command", "recovery"}, {"config", tree}, {"seeds", seeds}});
    return kExitOk;
}

int cmd_diagnose(const RunConfig& c, const json& tree, std::ostream&) {
    if (c.input.empty()) throw InputError("no input directory given (use --input)");
    if (!fs::is_directory(c.input)) throw MissingFile("input directory not found: " + c.input.string());
    std::vector<ChainRecord> chains;
    for (std::size_t k = 0;; ++k) {
        const fs::path p = c.input / chain_file(k);
        if (!fs::exists(p)) break;
        std::ifstream in(p);
        chains.push_back(read_chain_csv(in));
    }
    if (chains.empty()) throw MissingFile("no chain_<k>.csv files in " + c.input.string());
    for (const auto& ch : chains) {
        if (ch.empty()) throw InputError("empty chain file");
        if (ch.n != chains.front().n) throw InputError("chains have different lengths of alpha");
    }
    check_ks_param(c, chains.front().n);
    Staging out(c.output);
    json summary = {{"command", "diagnose"}, {"chains", chains.size()}};
    write_trans_dimensional(out, summary, chains, c);
    out.write("summary.json", summary.dump(2));
    out.commit({{"command", "diagnose"}, {"config", tree}, {"seeds", json::object()}});
    return kExitOk;
}

} // namespace

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

int run_command(const std::string& command, const json& tree, std::ostream& log) {
    try {
        const RunConfig c = config_from_json(tree);
        if (command == "fit-gibbs") return cmd_fit_gibbs(c, tree, log);
        if (command == "fit-marginal") return cmd_fit_marginal(c, tree, log);
        if (command == "rj") return cmd_rj(c, tree, log);
        if (command == "simulate") return cmd_simulate(c, tree, log);
        if (command == "recovery") return cmd_recovery(c, tree, log);
        if (command == "diagnose") return cmd_diagnose(c, tree, log);
        log << "error: unknown command '" << command << "'\n";
        return kExitInput;
    } catch (const InputError& e) {
        log << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Bayesian loss-ratio models with reversible-jump model choice"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "JSON configuration or manifest");

    const json defaults = default_config_json();
    const auto leaves = config_leaves();
    std::map<std::string, std::string> flag_values;
    for (const auto& [leaf, ptr] : leaves) {
        app.add_option("--" + leaf, flag_values[leaf], "overrides " + ptr.to_string());
    }
    const std::vector<std::pair<std::string, std::string>> commands{
        {"fit-gibbs", "Gibbs sampler for one model (--model m1|m2|m3)"},
        {"fit-marginal", "random-walk sampler with sigma and tau integrated out"},
        {"rj", "reversible-jump sampler over the three models (--scheme vanilla|efficient)"},
        {"simulate", "simulate a dataset"},
        {"recovery", "repeated simulate-and-fit study"},
        {"diagnose", "summaries and convergence diagnostics for existing chains (--input dir)"}};
    for (const auto& [name, desc] : commands) app.add_subcommand(name, desc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInput;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    json tree = defaults;
    try {
        if (!config_path.empty()) {
            if (!fs::exists(config_path)) throw MissingFile("config file not found: " + config_path);
            merge_config(tree, read_json_file(config_path));
        }
        for (const auto& [leaf, ptr] : leaves) {
            if (app.count("--" + leaf) == 0) continue;
            tree[ptr] = parse_flag_value(defaults, ptr, flag_values[leaf]);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return run_command(command, tree, std::cerr);
}

} // namespace lossrj::cli
