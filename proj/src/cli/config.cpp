#include "lossrj/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>

namespace lossrj::cli {

json default_config_json() {
    const double third = 1.0 / 3.0;
    return {
        {"data", ""},
        {"output", "out"},
        {"input", ""},
        {"model", "m1"},
        {"hpd_level", 0.95},
        {"priors", {{"a1", 0.001}, {"b1", 0.001}, {"a2", 0.001}, {"b2", 0.001},
                    {"model_prior", {third, third, third}}}},
        {"sampler", {{"iterations", 1000000}, {"burn_in", 1000}, {"thin", 1}, {"seed", 1},
                     {"chains", 3}, {"workers", 1}}},
        {"rj", {{"scheme", "efficient"},
                {"between_move_prob", 0.5},
                {"r", {{0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}}},
                {"pilot_iterations", 20000},
                {"pilot_burn_in", 2000}}},
        {"marginal", {{"target_rho", 0.27}, {"target_eta", 0.15}, {"target_alpha0", 0.29},
                      {"gibbs_pilot_iterations", 5000}, {"tuning_batches", 100}, {"batch_size", 100},
                      {"kappa", 0.5}}},
        {"simulate", {{"sim_model", "m2"}, {"n", 7}, {"sigma", 1000.0}, {"tau", 1000.0}, {"rho", 0.5},
                      {"eta", 0.03}, {"alpha0", 0.03}, {"exposure_scale", 1.0}, {"sim_seed", 1},
                      {"replications", 20}}},
        {"diagnostics", {{"checkpoint_every", 1000}, {"ks_param", ""}}},
    };
}

std::map<std::string, json::json_pointer> config_leaves() {
    std::map<std::string, json::json_pointer> out;
    std::function<void(const json&, const json::json_pointer&)> walk = [&](const json& node,
                                                                           const json::json_pointer& at) {
        for (const auto& [key, value] : node.items()) {
            const auto ptr = at / key;
            if (value.is_object()) {
                walk(value, ptr);
            } else {
                out.emplace(key, ptr);
            }
        }
    };
    walk(default_config_json(), json::json_pointer());
    return out;
}

namespace {

void merge_node(json& base, const json& overlay, const std::string& where) {
    if (!overlay.is_object()) throw InputError("config: " + where + " must be an object");
    for (const auto& [key, value] : overlay.items()) {
        if (!base.contains(key)) throw InputError("config: unknown key '" + where + key + "'");
        if (base[key].is_object()) {
            merge_node(base[key], value, where + key + ".");
        } else {
            base[key] = value;
        }
    }
}

template <class T>
T get(const json& tree, const char* ptr) {
    const json::json_pointer p(ptr);
    try {
        return tree.at(p).get<T>();
    } catch (const json::exception&) {
        throw InputError(std::string("config: bad value at ") + ptr);
    }
}

std::size_t get_count(const json& tree, const char* ptr) {
    const json& v = tree.at(json::json_pointer(ptr));
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::size_t>(v.get<long long>());
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && std::floor(d) == d) return static_cast<std::size_t>(d);
    }
    throw InputError(std::string("config: ") + ptr + " must be a nonnegative integer");
}

} // namespace

void merge_config(json& base, const json& overlay) {
    if (overlay.is_object() && overlay.contains("command") && overlay.contains("config")) {
        merge_node(base, overlay.at("config"), "");
        return;
    }
    merge_node(base, overlay, "");
}

json parse_flag_value(const json& defaults, const json::json_pointer& ptr, const std::string& text) {
    const json& def = defaults.at(ptr);
    if (def.is_string()) return text;
    try {
        json v = json::parse(text);
        if (def.is_number() && !v.is_number()) throw InputError("");
        if (def.is_array() && !v.is_array()) throw InputError("");
        return v;
    } catch (const std::exception&) {
        throw InputError("invalid value '" + text + "' for --" + ptr.back());
    }
}

RunConfig config_from_json(const json& t) {
    RunConfig c;
    c.data = get<std::string>(t, "/data");
    c.output = get<std::string>(t, "/output");
    c.input = get<std::string>(t, "/input");
    c.model = parse_model(get<std::string>(t, "/model"));
    c.hpd_level = get<double>(t, "/hpd_level");
    if (!(c.hpd_level > 0.0 && c.hpd_level < 1.0)) throw InputError("config: hpd_level must lie in (0, 1)");
    if (c.output.empty()) throw InputError("config: output must be set");

    c.priors.a1 = get<double>(t, "/priors/a1");
    c.priors.b1 = get<double>(t, "/priors/b1");
    c.priors.a2 = get<double>(t, "/priors/a2");
    c.priors.b2 = get<double>(t, "/priors/b2");
    const auto mp = get<std::vector<double>>(t, "/priors/model_prior");
    if (mp.size() != 3) throw InputError("config: model_prior needs three entries");
    std::copy(mp.begin(), mp.end(), c.priors.model_prior.begin());
    c.priors.validate();

    auto& s = c.sampler;
    s.iterations = get_count(t, "/sampler/iterations");
    s.burn_in = get_count(t, "/sampler/burn_in");
    s.thin = get_count(t, "/sampler/thin");
    s.seed = get_count(t, "/sampler/seed");
    s.chains = get_count(t, "/sampler/chains");
    s.workers = get_count(t, "/sampler/workers");
    ChainConfig{s.iterations, s.burn_in, s.seed, s.thin}.validate();
    if (s.chains == 0) throw InputError("config: chains must be at least 1");
    if (s.workers == 0) throw InputError("config: workers must be at least 1");

    c.scheme = parse_scheme(get<std::string>(t, "/rj/scheme"));
    c.moves.between_move_prob = get<double>(t, "/rj/between_move_prob");
    const auto r = get<std::vector<std::vector<double>>>(t, "/rj/r");
    if (r.size() != 3) throw InputError("config: r must be 3x3");
    for (std::size_t i = 0; i < 3; ++i) {
        if (r[i].size() != 3) throw InputError("config: r must be 3x3");
        for (std::size_t j = 0; j < 3; ++j) c.moves.r[i][j] = r[i][j];
    }
    c.moves.validate();
    c.pilot_iterations = get_count(t, "/rj/pilot_iterations");
    c.pilot_burn_in = get_count(t, "/rj/pilot_burn_in");
    ChainConfig{c.pilot_iterations + c.pilot_burn_in, c.pilot_burn_in, 1, 1}.validate();

    auto& m = c.marginal;
    m.target_rho = get<double>(t, "/marginal/target_rho");
    m.target_eta = get<double>(t, "/marginal/target_eta");
    m.target_alpha0 = get<double>(t, "/marginal/target_alpha0");
    for (double target : {m.target_rho, m.target_eta, m.target_alpha0}) {
        if (!(target > 0.0 && target < 1.0)) throw InputError("config: acceptance targets must lie in (0, 1)");
    }
    m.gibbs_pilot_iterations = get_count(t, "/marginal/gibbs_pilot_iterations");
    if (m.gibbs_pilot_iterations < 2) throw InputError("config: gibbs_pilot_iterations must be at least 2");
    m.tuning_batches = get_count(t, "/marginal/tuning_batches");
    m.batch_size = get_count(t, "/marginal/batch_size");
    if (m.batch_size == 0) throw InputError("config: batch_size must be positive");
    m.kappa = get<double>(t, "/marginal/kappa");
    if (!(m.kappa >= 0.0)) throw InputError("config: kappa must be nonnegative");

    auto& sim = c.simulate;
    sim.model = parse_model(get<std::string>(t, "/simulate/sim_model"));
    sim.n = get_count(t, "/simulate/n");
    sim.sigma = get<double>(t, "/simulate/sigma");
    sim.tau = get<double>(t, "/simulate/tau");
    sim.rho = get<double>(t, "/simulate/rho");
    sim.eta = get<double>(t, "/simulate/eta");
    sim.alpha0 = get<double>(t, "/simulate/alpha0");
    sim.exposure_scale = get<double>(t, "/simulate/exposure_scale");
    sim.seed = get_count(t, "/simulate/sim_seed");
    sim.replications = get_count(t, "/simulate/replications");
    if (sim.n < 2) throw InputError("config: n must be at least 2");
    if (!(sim.sigma > 0.0) || !(sim.tau > 0.0)) throw InputError("config: sigma and tau must be positive");
    if (!(sim.exposure_scale > 0.0)) throw InputError("config: exposure_scale must be positive");

    c.checkpoint_every = get_count(t, "/diagnostics/checkpoint_every");
    if (c.checkpoint_every == 0) throw InputError("config: checkpoint_every must be positive");
    c.ks_param = get<std::string>(t, "/diagnostics/ks_param");
    return c;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError("cannot parse " + path.string() + ": " + e.what());
    }
}

} // namespace lossrj::cli
