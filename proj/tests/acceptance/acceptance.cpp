#include "../support.hpp"

#include "lossrj/cli/commands.hpp"
#include "lossrj/cli/config.hpp"
#include "lossrj/conditionals.hpp"
#include "lossrj/diagnostics.hpp"
#include "lossrj/efficient.hpp"
#include "lossrj/gibbs.hpp"
#include "lossrj/marginal.hpp"
#include "lossrj/rjmcmc.hpp"
#include "lossrj/stats.hpp"
#include "lossrj/synthetic.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace lossrj;
namespace fs = std::filesystem;
namespace lt = lossrj::testing;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& text) {
    std::printf("%s %d: %s\n", ok ? "PASS" : "FAIL", id, text.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

void info(int id, const std::string& text) {
    std::printf("INFO %d: %s\n", id, text.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<int> years_for(std::size_t n) {
    std::vector<int> y(n);
    for (std::size_t j = 0; j < n; ++j) y[j] = static_cast<int>(j) + 1;
    return y;
}

// --- 1 ---------------------------------------------------------------------

void conditional_slices() {
    const auto data = lt::random_series(7, 101);
    PriorConfig p;
    p.a1 = 2.0;
    p.b1 = 0.1;
    p.a2 = 1.0;
    p.b2 = 0.05;
    Rng rng(102);
    double worst = 0.0;
    std::size_t slices = 0;
    auto track = [&](double e) {
        worst = std::max(worst, e);
        ++slices;
    };
    for (ModelId m : kAllModels) {
        for (int k = 0; k < 20; ++k) {
            const auto s = lt::random_state(m, 7, rng);
            const auto g = sigma_conditional(s, data, p);
            track(lt::slice_sup_error(s, data, p, [](ParamState& t, double x) { t.sigma = x; }, g.mean(),
                                      std::sqrt(g.variance()), [&](double x) { return g.log_pdf(x); }, true));
            const auto h = tau_conditional(s, data, p);
            track(lt::slice_sup_error(s, data, p, [](ParamState& t, double x) { t.tau = x; }, h.mean(),
                                      std::sqrt(h.variance()), [&](double x) { return h.log_pdf(x); }, true));
            if (rho_free(m)) {
                const auto r = rho_conditional(s, data, p);
                track(lt::slice_sup_error(s, data, p, [](ParamState& t, double x) { t.rho = x; }, r.mean, r.sd(),
                                          [&](double x) { return r.log_pdf(x); }));
            }
            if (has_eta(m)) {
                const auto e = eta_conditional(s, data, p);
                track(lt::slice_sup_error(s, data, p, [](ParamState& t, double x) { t.eta = x; }, e.mean, e.sd(),
                                          [&](double x) { return e.log_pdf(x); }));
            }
            for (std::size_t j = has_alpha0(m) ? 0 : 1; j <= 7; ++j) {
                const auto a = alpha_conditional(j, s, data, p);
                auto set = [j](ParamState& t, double x) { (j == 0 ? t.alpha0 : t.alpha[j - 1]) = x; };
                track(lt::slice_sup_error(s, data, p, set, a.mean, a.sd(), [&](double x) { return a.log_pdf(x); }));
            }
        }
    }
    report(1, worst < 1e-6,
           fmt("full conditionals vs quadrature slices, %zu slices over 20 states per model, worst sup rel error %.2e "
               "(< 1e-6)",
               slices, worst));
}

// --- 2 ---------------------------------------------------------------------

ParamState prior_draw(ModelId m, std::size_t n, const PriorConfig& p, Rng& rng) {
    ParamState s;
    s.model = m;
    s.alpha0 = rng.normal();
    s.rho = rng.normal();
    s.eta = rng.normal();
    s.sigma = rng.gamma(p.a1, p.b1);
    s.tau = rng.gamma(p.a2, p.b2);
    s = specialize(s, m);
    s.alpha.assign(n, 0.0);
    double prev = s.process_alpha0();
    for (auto& a : s.alpha) {
        a = s.process_rho() * prev + (1.0 - s.process_rho()) * s.process_eta() + rng.normal() / std::sqrt(s.tau);
        prev = a;
    }
    return s;
}

std::vector<double> draw_ratios(const ParamState& s, const std::vector<double>& exposures, Rng& rng) {
    std::vector<double> r(exposures.size());
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = s.alpha[j] + rng.normal() / std::sqrt(s.sigma * exposures[j]);
    return r;
}

double pick(const ParamState& s, const std::string& name) {
    if (name == "alpha0") return s.alpha0;
    if (name == "rho") return s.rho;
    if (name == "eta") return s.eta;
    if (name == "sigma") return s.sigma;
    if (name == "tau") return s.tau;
    if (name == "alpha1") return s.alpha.front();
    return s.alpha.back();
}

void geweke() {
    PriorConfig p;
    p.a1 = p.b1 = p.a2 = p.b2 = 3.0;
    const std::vector<double> exposures{0.5, 1.0, 2.0, 1.0, 1.5};
    const auto years = years_for(exposures.size());
    // Each successive-conditional chain restarts from an exact prior draw and
    // keeps only its last state, so the compared samples are iid.
    const std::size_t draws = 50000, sweeps = 20;
    struct Case {
        ModelId model;
        std::vector<std::string> names;
    };
    const std::vector<Case> cases{{ModelId::M1, {"alpha0", "rho", "eta", "sigma", "tau"}},
                                  {ModelId::M2, {"alpha0", "alpha1", "alphan", "sigma", "tau"}},
                                  {ModelId::M3, {"eta", "alpha1", "alphan", "sigma", "tau"}}};
    bool all_ok = true;
    std::string detail;
    for (const auto& c : cases) {
        Rng rng(derive_seed(202, model_index(c.model)));
        std::vector<std::vector<double>> forward(5), successive(5);
        for (std::size_t i = 0; i < draws; ++i) {
            const auto s = prior_draw(c.model, exposures.size(), p, rng);
            for (std::size_t k = 0; k < 5; ++k) forward[k].push_back(pick(s, c.names[k]));
        }
        for (std::size_t i = 0; i < draws; ++i) {
            auto s = prior_draw(c.model, exposures.size(), p, rng);
            for (std::size_t t = 0; t < sweeps; ++t) {
                const auto data = ObservationSeries::from_ratios(years, draw_ratios(s, exposures, rng), exposures);
                gibbs_update(s, data, p, rng);
            }
            for (std::size_t k = 0; k < 5; ++k) successive[k].push_back(pick(s, c.names[k]));
        }
        int passing = 0;
        detail += std::string(model_name(c.model)) + " [";
        for (std::size_t k = 0; k < 5; ++k) {
            const double pv = stats::ks_two_sample(forward[k], successive[k]).p_value;
            passing += pv > 0.01;
            detail += fmt("%s%s p=%.3f", k ? ", " : "", c.names[k].c_str(), pv);
        }
        detail += fmt("] %d/5; ", passing);
        all_ok = all_ok && passing >= 4;
    }
    // Power check: a sampler run under the wrong tau prior should be caught.
    {
        PriorConfig wrong = p;
        wrong.b2 = 2.0;
        Rng rng(derive_seed(203, 0));
        std::vector<double> forward, successive;
        for (std::size_t i = 0; i < draws; ++i) forward.push_back(prior_draw(ModelId::M1, exposures.size(), p, rng).tau);
        for (std::size_t i = 0; i < draws; ++i) {
            auto s = prior_draw(ModelId::M1, exposures.size(), p, rng);
            for (std::size_t t = 0; t < sweeps; ++t) {
                const auto data = ObservationSeries::from_ratios(years, draw_ratios(s, exposures, rng), exposures);
                gibbs_update(s, data, wrong, rng);
            }
            successive.push_back(s.tau);
        }
        info(2, fmt("same test with the sampler given tau ~ Gamma(3, 2) instead of Gamma(3, 3): tau p = %.1e",
                    stats::ks_two_sample(forward, successive).p_value));
    }
    report(2, all_ok,
           fmt("Geweke prior vs successive-conditional KS, 50k draws each (20 sweeps per restart): %sneed >= 4/5 with p > 0.01",
               detail.c_str()));
}

// --- 3 ---------------------------------------------------------------------

void marginalization_agreement() {
    const auto sim = simulate_dataset(standard_preset(ModelId::M1, 1));
    PriorConfig p;
    const auto gibbs = run_gibbs(ModelId::M1, sim.series, p, ChainConfig{100000, 5000, 301, 1});
    MarginalPilotConfig pc;
    pc.seed = 302;
    const auto tuning = tune_widths(sim.series, p, pc);
    const auto marg = run_marginal(sim.series, p, ChainConfig{100000, 5000, 303, 1}, tuning).chain;
    std::vector<std::string> names;
    for (int j = 1; j <= 7; ++j) names.push_back("alpha" + std::to_string(j));
    names.push_back("rho");
    names.push_back("eta");
    double worst = 0.0;
    std::string worst_name;
    for (const auto& name : names) {
        const auto a = gibbs.trace(name), b = marg.trace(name);
        const double se = std::hypot(batch_means_se(a), batch_means_se(b));
        const double z = std::abs(stats::mean(a) - stats::mean(b)) / se;
        if (z > worst) {
            worst = z;
            worst_name = name;
        }
    }
    report(3, worst < 3.0,
           fmt("Gibbs vs marginal posterior means of alpha1..7, rho, eta at 1e5 iterations: worst |diff| = %.2f "
               "combined MC SEs (%s) (< 3)",
               worst, worst_name.c_str()));
    info(3, fmt("posterior mean rho: Gibbs %.4f, marginal %.4f", stats::mean(gibbs.trace("rho")),
                stats::mean(marg.trace("rho"))));
}

// --- 4 ---------------------------------------------------------------------

void marginal_target_oracle() {
    const auto data = lt::random_series(7, 401);
    PriorConfig p;
    Rng rng(402);
    std::vector<double> dev;
    for (int k = 0; k < 5; ++k) {
        const auto s = lt::random_state(ModelId::M1, 7, rng);
        const double cs = std::log(sigma_conditional(s, data, p).mean());
        const double ct = std::log(tau_conditional(s, data, p).mean());
        auto lj = [&](double ls, double ltau) {
            ParamState t = s;
            t.sigma = std::exp(ls);
            t.tau = std::exp(ltau);
            return log_joint(t, data, p) + ls + ltau;
        };
        const double shift = lj(cs, ct);
        const double z = lt::integrate(
            [&](double ls) {
                return lt::integrate([&](double ltau) { return std::exp(lj(ls, ltau) - shift); }, ct - 15.0, ct + 4.0);
            },
            cs - 15.0, cs + 4.0);
        const double log_z = shift + std::log(z);
        dev.push_back(log_z - log_marginal_target(s.alpha0, s.alpha, s.rho, s.eta, data, p));
    }
    const double mean = stats::mean(dev);
    double worst = 0.0;
    for (double d : dev) worst = std::max(worst, std::abs(d - mean));
    report(4, worst < 1e-4,
           fmt("marginal target vs 2-D (sigma, tau) quadrature over 5 states: max deviation from the common constant "
               "%.2e (< 1e-4)",
               worst));
}

// --- 5 ---------------------------------------------------------------------

std::vector<double> random_path(std::size_t n, double tau, Rng& rng) {
    std::vector<double> a(n);
    const double rho = rng.uniform(-0.5, 1.5), eta = rng.normal(0.03, 0.05);
    double prev = rng.normal(0.03, 0.05);
    for (auto& v : a) {
        v = rho * prev + (1.0 - rho) * eta + rng.normal() / std::sqrt(tau);
        prev = v;
    }
    return a;
}

void stationarity() {
    const auto data = lt::random_series(7, 501);
    PriorConfig p;
    Rng rng(502);
    int pd = 0, fallback = 0;
    double worst_grad = 0.0, worst_hess = 0.0;
    for (int k = 0; k < 4000 && (pd < 20 || fallback < 20); ++k) {
        const double tau = std::exp(rng.uniform(std::log(10.0), std::log(5000.0)));
        const auto alpha = random_path(7, tau, rng);
        const ModelId sub = k % 2 ? ModelId::M2 : ModelId::M3;
        const auto prop = efficient_proposal_full(alpha, tau, primary_centering(sub, alpha, tau), sub);
        int& bucket = prop.fallback_used ? fallback : pd;
        if (bucket >= 20) continue;
        ++bucket;
        ParamState base;
        base.model = ModelId::M1;
        base.alpha = alpha;
        base.sigma = 500.0;
        base.tau = tau;
        ParamState sub_state = base;
        sub_state = specialize(sub_state, sub);
        if (sub == ModelId::M2) {
            sub_state.alpha0 = prop.centering.alpha0;
        } else {
            sub_state.eta = prop.centering.eta;
        }
        // log A for the jump sub -> M1 as a function of the created (alpha0, rho, eta).
        auto log_a = [&](const Eigen::Vector3d& x) {
            ParamState to = base;
            to.alpha0 = x[0];
            to.rho = x[1];
            to.eta = x[2];
            return jump_log_accept(sub_state, to, prop.log_pdf(x), 0.0, MoveSpec{}, data, p);
        };
        const Eigen::Vector3d c = prop.centering.vec();
        const double scale = m1_block_curvature(c, alpha, tau).norm();
        worst_grad = std::max(worst_grad, lt::fd_gradient(log_a, c, 1e-5).norm() / scale);
        worst_hess = std::max(worst_hess, lt::fd_hessian(log_a, c, 1e-4).norm() / scale);
    }
    const bool ok = pd >= 20 && fallback >= 20 && worst_grad < 1e-5 && worst_hess < 1e-5;
    report(5, ok,
           fmt("efficient proposal stationarity of log A21 / log A31 at the centering point, %d PD + %d fallback "
               "cases: worst |grad|/|H| %.2e, worst |Hess|/|H| %.2e (< 1e-5)",
               pd, fallback, worst_grad, worst_hess));
}

// --- 6 ---------------------------------------------------------------------

void reduced_optimality() {
    const auto data = lt::random_series(7, 601);
    PriorConfig p;
    Rng rng(602);
    double worst_mean = 0.0, worst_var = 0.0;
    for (ModelId m : {ModelId::M2, ModelId::M3}) {
        for (int k = 0; k < 20; ++k) {
            auto s = lt::random_state(m, 7, rng);
            const auto q = reduced_proposal(m, s.alpha, s.tau);
            auto lj = [&](double x) {
                ParamState t = s;
                (m == ModelId::M2 ? t.alpha0 : t.eta) = x;
                return log_joint(t, data, p);
            };
            const auto mom = lt::moments(lj, q.mean, q.mean - 30 * q.sd(), q.mean + 30 * q.sd());
            worst_mean = std::max(worst_mean, std::abs(mom[0] - q.mean) / std::max(std::abs(q.mean), q.sd()));
            worst_var = std::max(worst_var, std::abs(mom[1] - q.variance) / q.variance);
        }
    }
    report(6, worst_mean < 1e-8 && worst_var < 1e-8,
           fmt("reduced proposals vs quadrature conditionals over 20 states per sub-model: worst mean rel error %.2e, "
               "variance rel error %.2e (< 1e-8)",
               worst_mean, worst_var));
}

// --- 7 ---------------------------------------------------------------------

double log_normal_evidence(const Eigen::MatrixXd& cov, const Eigen::VectorXd& r) {
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    const Eigen::MatrixXd l = llt.matrixL();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
    return -0.5 * (r.size() * std::log(2.0 * std::numbers::pi) + log_det + r.dot(llt.solve(r)));
}

void analytic_toy() {
    const std::vector<double> ratios{0.3, 0.9, 0.4, 1.2};
    const std::vector<double> exposures{1.0, 2.0, 1.0, 1.5};
    const double sigma = 4.0, tau = 2.0;
    const std::size_t n = ratios.size();
    const auto data = ObservationSeries::from_ratios(years_for(n), ratios, exposures);
    Eigen::MatrixXd c2(n, n), c3(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            c2(i, j) = 1.0 + static_cast<double>(std::min(i, j) + 1) / tau;
            c3(i, j) = 1.0 + (i == j ? 1.0 / tau : 0.0);
        }
        c2(i, i) += 1.0 / (sigma * exposures[i]);
        c3(i, i) += 1.0 / (sigma * exposures[i]);
    }
    const Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(ratios.data(), static_cast<Eigen::Index>(n));
    const double l2 = log_normal_evidence(c2, r), l3 = log_normal_evidence(c3, r);
    const double exact = 1.0 / (1.0 + std::exp(l3 - l2));

    PriorConfig p;
    p.model_prior = {0.0, 0.5, 0.5};
    RjSettings settings;
    settings.moves.r = {{{0.0, 0.5, 0.5}, {0.0, 0.0, 1.0}, {0.0, 1.0, 0.0}}};
    settings.sweep.update_precisions = false;
    auto init = default_init(ModelId::M2, data);
    init.sigma = sigma;
    init.tau = tau;
    const auto run = run_rj(data, p, ChainConfig{1000000, 10000, 701, 1}, settings, init);
    const auto probs = model_probabilities(run.chain);
    report(7, std::abs(probs[1] - exact) < 0.02,
           fmt("RJ on the M2-vs-M3 conjugate toy (sigma, tau fixed), 1e6 iterations: P(M2) visit frequency %.4f vs "
               "exact %.4f (|diff| < 0.02)",
               probs[1], exact));
}

// --- 8 and 9 ---------------------------------------------------------------

struct SchemeRuns {
    RjResult vanilla, efficient;
};

SchemeRuns run_both(const ObservationSeries& data, const PriorConfig& p, std::size_t iterations, std::uint64_t seed) {
    PilotConfig pc;
    pc.chain = ChainConfig{22000, 2000, derive_seed(seed, 1), 1};
    const auto pilot = pilot_tune(data, p, pc);
    RjSettings vanilla;
    vanilla.scheme = Scheme::Vanilla;
    vanilla.vanilla = pilot.spec;
    RjSettings efficient;
    const ChainConfig chain{iterations, 10000, derive_seed(seed, 2), 1};
    return {run_rj(data, p, chain, vanilla), run_rj(data, p, chain, efficient)};
}

void scheme_agreement() {
    const auto sim = simulate_dataset(standard_preset(ModelId::M1, 1));
    const auto runs = run_both(sim.series, PriorConfig{}, 1000000, 801);
    const auto pv = model_probabilities(runs.vanilla.chain), pe = model_probabilities(runs.efficient.chain);
    double worst = 0.0;
    for (std::size_t m = 0; m < 3; ++m) worst = std::max(worst, std::abs(pv[m] - pe[m]));
    report(8, worst < 0.03,
           fmt("vanilla vs efficient model probabilities at 1e6 iterations: (%.3f, %.3f, %.3f) vs (%.3f, %.3f, %.3f), "
               "max |diff| %.4f (< 0.03)",
               pv[0], pv[1], pv[2], pe[0], pe[1], pe[2], worst));
}

void efficiency_improvement() {
    // Slowly trending ratios with a well-determined observation precision.
    std::vector<double> ratios;
    for (int j = 1; j <= 7; ++j) ratios.push_back(0.03 + 0.003 * (j - 3) + 0.001 * (j % 2 ? 1.0 : -1.0));
    const auto data = ObservationSeries::from_ratios(years_for(7), ratios, std::vector<double>(7, 1.0));
    PriorConfig p;
    p.a1 = 50.0;
    p.b1 = 50.0 / 1e5;
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed : {901, 902, 903}) {
        const auto runs = run_both(data, p, 300000, seed);
        const double e32 = runs.efficient.stats.acceptance_rate(ModelId::M3, ModelId::M2);
        const double e23 = runs.efficient.stats.acceptance_rate(ModelId::M2, ModelId::M3);
        const double v32 = runs.vanilla.stats.acceptance_rate(ModelId::M3, ModelId::M2);
        const double v23 = runs.vanilla.stats.acceptance_rate(ModelId::M2, ModelId::M3);
        ok = ok && e32 >= 0.95 && e23 > v23;
        detail += fmt("seed %d: A32 eff %.3f / van %.3f, A23 eff %.3f / van %.3f; ", static_cast<int>(seed), e32, v32,
                      e23, v23);
    }
    report(9, ok, fmt("%srequire efficient A32 >= 0.95 and efficient A23 > vanilla A23", detail.c_str()));
}

// --- 10 --------------------------------------------------------------------

std::array<std::size_t, 3> recovery_counts(ModelId truth, std::size_t n) {
    auto spec = standard_preset(truth, 11);
    spec.exposures = default_exposures(n, 1.0, 5);
    RecoveryConfig cfg;
    cfg.replications = 20;
    cfg.chain = ChainConfig{20000, 2000, 1, 1};
    return recovery_study(spec, cfg).argmax_counts;
}

void simulation_study() {
    const auto m2 = recovery_counts(ModelId::M2, 40);
    const auto m3 = recovery_counts(ModelId::M3, 40);
    report(10, m2[1] >= 16 && m3[2] >= 16,
           fmt("argmax model over 20 replications (n = 40): M2 truth -> M2 in %zu/20, M3 truth -> M3 in %zu/20 "
               "(>= 16)",
               m2[1], m3[2]));
    const auto s2 = recovery_counts(ModelId::M2, 7);
    const auto s3 = recovery_counts(ModelId::M3, 7);
    info(10, fmt("same study at n = 7: M2 -> M2 in %zu/20, M3 -> M3 in %zu/20", s2[1], s3[2]));
}

// --- 11 --------------------------------------------------------------------

void a32_invariance() {
    const auto data = lt::random_series(7, 1101);
    Rng rng(1102);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const auto s = lt::random_state(ModelId::M3, 7, rng);
        double first = 0.0;
        for (int d = 0; d < 2; ++d) {
            const auto prop = propose_jump(s, ModelId::M2, Scheme::Efficient, std::nullopt, rng);
            const double la = jump_log_accept(s, prop.candidate, prop.densities.forward, prop.densities.reverse,
                                              MoveSpec{}, data, PriorConfig{});
            if (d == 0) {
                first = la;
            } else {
                worst = std::max(worst, std::abs(la - first));
            }
        }
    }
    report(11, worst < 1e-10,
           fmt("log A32 across two independent forward draws, 50 states: max |diff| %.2e (< 1e-10)", worst));
}

// --- 12 --------------------------------------------------------------------

void diagnostics_calibration() {
    Rng rng(1201);
    const std::size_t reps = 1000, len = 2000;
    const std::array<double, 3> w{0.5, 0.44, 0.06};
    const std::vector<std::size_t> last{len};
    std::size_t chisq_reject = 0, ks_reject = 0, ks_model_reject = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        std::vector<std::vector<ModelId>> models(2, std::vector<ModelId>(len));
        std::vector<std::vector<double>> traces(2, std::vector<double>(len));
        for (std::size_t c = 0; c < 2; ++c) {
            for (std::size_t i = 0; i < len; ++i) {
                models[c][i] = model_from_index(rng.categorical(w));
                traces[c][i] = rng.normal();
            }
        }
        chisq_reject += chisq_convergence(models, last).front().p_value < 0.05;
        ks_model_reject += ks_convergence(models, last).front().p_value < 0.05;
        ks_reject += ks_convergence(traces, last).front().p_value < 0.05;
    }
    const double rc = static_cast<double>(chisq_reject) / reps, rk = static_cast<double>(ks_reject) / reps;

    const std::vector<std::vector<ModelId>> stuck{std::vector<ModelId>(len, ModelId::M2),
                                                  std::vector<ModelId>(len, ModelId::M3)};
    std::vector<std::vector<double>> split(2, std::vector<double>(len));
    for (std::size_t i = 0; i < len; ++i) {
        split[0][i] = rng.normal();
        split[1][i] = rng.normal() + 1.0;
    }
    const double p_chisq = chisq_convergence(stuck, last).front().p_value;
    const double p_ks = ks_convergence(stuck, last).front().p_value;
    const double p_split = ks_convergence(split, last).front().p_value;
    const bool ok = std::abs(rc - 0.05) <= 0.02 && std::abs(rk - 0.05) <= 0.02 && p_chisq < 1e-6 && p_ks < 1e-6 &&
                    p_split < 1e-6;
    report(12, ok,
           fmt("iid same-law chains, 1000 replications: chi-square rejection %.3f, KS rejection %.3f (0.05 +- 0.02); "
               "stuck chains p = %.1e (chi-square), %.1e (KS model), %.1e (KS shifted trace) (< 1e-6)",
               rc, rk, p_chisq, p_ks, p_split));
    info(12, fmt("KS on the discrete model indicator is conservative: rejection %.3f",
                 static_cast<double>(ks_model_reject) / reps));
}

// --- 13 --------------------------------------------------------------------

void hpd_correctness() {
    Rng rng(1301);
    std::vector<double> x(1000000);
    for (auto& v : x) v = rng.normal();
    const auto h = hpd_shortest(x, 0.95);
    const bool ok_short = h.intervals.size() == 1 && std::abs(h.intervals[0].first + 1.96) <= 0.02 &&
                          std::abs(h.intervals[0].second - 1.96) <= 0.02;
    std::vector<double> mix(100000);
    for (auto& v : mix) v = rng.uniform() < 0.5 ? rng.normal(0.0, 0.1) : rng.normal(1.0, 0.1);
    const auto k = hpd_kde_region(mix, 0.90);
    const bool ok_kde = k.intervals.size() == 2 && k.intervals[0].second < k.intervals[1].first;
    std::string regions;
    for (const auto& [lo, hi] : k.intervals) regions += fmt("[%.3f, %.3f]", lo, hi);
    report(13, ok_short && ok_kde,
           fmt("95%% shortest HPD of 1e6 N(0,1) draws [%.4f, %.4f] (within 0.02 of +-1.960); KDE region at 0.90 on a "
               "bimodal mixture: %zu intervals %s (need 2 disjoint)",
               h.intervals[0].first, h.intervals[0].second, k.intervals.size(), regions.c_str()));
}

// --- 14 --------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void reproducibility() {
    using cli::json;
    const fs::path root = fs::temp_directory_path() / "lossrj_acceptance_repro";
    fs::remove_all(root);
    fs::create_directories(root);
    std::ostringstream log;
    auto tree = [&](const json& overlay) {
        json t = cli::default_config_json();
        cli::merge_config(t, overlay);
        return t;
    };
    bool ok = cli::run_command("simulate", tree({{"output", (root / "sim").string()},
                                                 {"simulate", {{"sim_model", "m1"}, {"sim_seed", 14}}}}),
                               log) == 0;
    const std::string data = (root / "sim" / "data.csv").string();
    const json sampler{{"iterations", 20000}, {"burn_in", 1000}, {"seed", 1401}, {"chains", 2}};
    std::size_t compared = 0;
    for (const std::string cmd : {"rj", "fit-gibbs", "fit-marginal"}) {
        // Same output path both times, so the manifests match too.
        const fs::path out = root / cmd, first = root / (cmd + "_first");
        const auto t = tree({{"data", data}, {"output", out.string()}, {"sampler", sampler}});
        if (cli::run_command(cmd, t, log) != 0) {
            ok = false;
            continue;
        }
        fs::rename(out, first);
        if (cli::run_command(cmd, t, log) != 0) {
            ok = false;
            continue;
        }
        for (const auto& entry : fs::directory_iterator(first)) {
            ok = ok && slurp(entry.path()) == slurp(out / entry.path().filename());
            ++compared;
        }
    }
    fs::remove_all(root);
    report(14, ok && compared > 0,
           fmt("rj, fit-gibbs and fit-marginal run twice with the same config and seed: %zu artifacts compared, "
               "byte-identical: %s",
               compared, ok ? "yes" : "no"));
}

} // namespace

int main() {
    const std::vector<std::function<void()>> criteria{
        conditional_slices, geweke,          marginalization_agreement, marginal_target_oracle, stationarity,
        reduced_optimality, analytic_toy,    scheme_agreement,          efficiency_improvement, simulation_study,
        a32_invariance,     diagnostics_calibration, hpd_correctness, reproducibility};
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i) + 1, false, std::string("threw: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("      (criterion %zu took %.1f s)\n", i + 1, secs);
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of %zu criteria failed (%.1f s)\n", failures, criteria.size(), total);
    return failures == 0 ? 0 : 1;
}
