#include "lossrj/diagnostics.hpp"

#include "lossrj/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lossrj {

HpdResult hpd_shortest(std::span<const double> samples, double level) {
    if (samples.empty()) throw std::invalid_argument("HPD needs samples");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("HPD level must lie in (0, 1)");
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    HpdResult r;
    r.level = level;
    r.method = HpdMethod::ShortestInterval;
    const auto m = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n) - 1e-9));
    if (static_cast<double>(n) * (1.0 - level) < 1.0 || m >= n) {
        r.intervals.push_back({x.front(), x.back()});
        r.warning = "too few samples for the requested level; returning the full range";
        return r;
    }
    std::size_t best = 0;
    double width = x[m] - x[0];
    for (std::size_t k = 1; k + m < n; ++k) {
        const double w = x[k + m] - x[k];
        if (w < width) {
            width = w;
            best = k;
        }
    }
    r.intervals.push_back({x[best], x[best + m]});
    return r;
}

double silverman_bandwidth(std::span<const double> samples) {
    if (samples.size() < 2) return 0.0;
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(x.size() - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, x.size() - 1);
        return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
    };
    const double sd = std::sqrt(stats::variance(x));
    const double iqr = (quantile(0.75) - quantile(0.25)) / 1.34;
    const double spread = iqr > 0.0 ? std::min(sd, iqr) : sd;
    return 0.9 * spread * std::pow(static_cast<double>(x.size()), -0.2);
}

double KdeGrid::at(double v) const {
    if (x.empty() || v < x.front() || v > x.back()) return 0.0;
    const double step = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    const double pos = (v - x.front()) / step;
    const auto i = std::min(static_cast<std::size_t>(pos), x.size() - 2);
    const double f = pos - static_cast<double>(i);
    return density[i] + f * (density[i + 1] - density[i]);
}

KdeGrid kde_density(std::span<const double> samples, double bandwidth, std::size_t grid_points) {
    if (samples.empty()) throw std::invalid_argument("KDE needs samples");
    if (grid_points < 2) throw std::invalid_argument("KDE grid needs at least two points");
    double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(samples);
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    if (!(h > 0.0)) h = 1e-6 * std::max(1.0, std::abs(*mn));

    KdeGrid g;
    g.bandwidth = h;
    const double lo = *mn - 4.0 * h, hi = *mx + 4.0 * h;
    const double step = (hi - lo) / static_cast<double>(grid_points - 1);
    g.x.resize(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i) g.x[i] = lo + step * static_cast<double>(i);

    // Linear binning followed by a direct convolution with the kernel.
    std::vector<double> w(grid_points, 0.0);
    for (double s : samples) {
        const double pos = (s - lo) / step;
        const auto i = std::min(static_cast<std::size_t>(pos), grid_points - 2);
        const double f = pos - static_cast<double>(i);
        w[i] += 1.0 - f;
        w[i + 1] += f;
    }
    std::vector<double> kernel(grid_points);
    const double norm = 1.0 / (static_cast<double>(samples.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t d = 0; d < grid_points; ++d) {
        const double u = static_cast<double>(d) * step / h;
        kernel[d] = norm * std::exp(-0.5 * u * u);
    }
    g.density.assign(grid_points, 0.0);
    for (std::size_t k = 0; k < grid_points; ++k) {
        if (w[k] == 0.0) continue;
        for (std::size_t i = 0; i < grid_points; ++i) {
            g.density[i] += w[k] * kernel[i > k ? i - k : k - i];
        }
    }
    return g;
}

HpdResult hpd_kde_region(std::span<const double> samples, double level, double bandwidth) {
    if (samples.empty()) throw std::invalid_argument("HPD needs samples");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("HPD level must lie in (0, 1)");
    const KdeGrid g = kde_density(samples, bandwidth);
    std::vector<double> dens;
    dens.reserve(samples.size());
    for (double s : samples) dens.push_back(g.at(s));
    const auto k = static_cast<std::size_t>(std::floor((1.0 - level) * static_cast<double>(dens.size())));
    std::nth_element(dens.begin(), dens.begin() + static_cast<std::ptrdiff_t>(std::min(k, dens.size() - 1)),
                     dens.end());
    const double t = dens[std::min(k, dens.size() - 1)];

    HpdResult r;
    r.level = level;
    r.method = HpdMethod::KdeThreshold;
    auto crossing = [&](std::size_t i) {
        const double d0 = g.density[i - 1], d1 = g.density[i];
        return g.x[i - 1] + (t - d0) / (d1 - d0) * (g.x[i] - g.x[i - 1]);
    };
    bool inside = false;
    double start = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        const bool above = g.density[i] >= t;
        if (above && !inside) {
            start = i == 0 ? g.x[0] : crossing(i);
            inside = true;
        } else if (!above && inside) {
            r.intervals.push_back({start, crossing(i)});
            inside = false;
        }
    }
    if (inside) r.intervals.push_back({start, g.x.back()});
    return r;
}

std::vector<double> acf(std::span<const double> samples, std::size_t max_lag) {
    const std::size_t n = samples.size();
    if (max_lag >= n) throw std::invalid_argument("max_lag must be smaller than the sample size");
    const double m = stats::mean(samples);
    double c0 = 0.0;
    for (double v : samples) c0 += (v - m) * (v - m);
    if (!(c0 > 0.0)) throw std::invalid_argument("ACF undefined for a constant series");
    std::vector<double> out(max_lag + 1);
    out[0] = 1.0;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double c = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) c += (samples[t] - m) * (samples[t + k] - m);
        out[k] = c / c0;
    }
    return out;
}

double batch_means_se(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 4) return std::sqrt(stats::variance(samples) / static_cast<double>(std::max<std::size_t>(n, 1)));
    const auto b = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    const std::size_t batches = n / b;
    std::vector<double> means(batches);
    for (std::size_t i = 0; i < batches; ++i) means[i] = stats::mean(samples.subspan(i * b, b));
    return std::sqrt(stats::variance(means) / static_cast<double>(batches));
}

ParamSummary summarize(std::span<const double> samples, double level) {
    ParamSummary s;
    s.count = samples.size();
    s.mean = stats::mean(samples);
    s.sd = std::sqrt(stats::variance(samples));
    s.mc_se = batch_means_se(samples);
    s.hpd = hpd_shortest(samples, level);
    return s;
}

ModelAveragedSummary model_averaged_summary(const ChainRecord& chain, double level) {
    if (chain.empty()) throw std::invalid_argument("summary needs a nonempty chain");
    ModelAveragedSummary out;
    const auto seq = chain.model_sequence();
    std::array<std::size_t, 3> counts{};
    for (ModelId m : seq) ++counts[model_index(m)];
    for (std::size_t i = 0; i < 3; ++i) {
        out.model_probabilities[i] = static_cast<double>(counts[i]) / static_cast<double>(seq.size());
    }
    for (const auto& name : all_parameter_names(chain.n)) {
        AveragedParam p;
        p.name = name;
        std::size_t pooled = 0;
        for (ModelId m : kAllModels) {
            if (counts[model_index(m)] == 0) continue;
            const auto values = chain.trace_in_model(name, m);
            if (values.empty()) continue;
            p.per_model.emplace(m, summarize(values, level));
            pooled += values.size();
        }
        if (pooled == 0) {
            out.notes.push_back(name + " is absent from every visited model");
            continue;
        }
        if (pooled != seq.size()) {
            out.notes.push_back(name + " is averaged over the visited models in which it exists");
        }
        // Pool in chain order so the batch-means error reflects the chain's autocorrelation.
        std::vector<double> ordered;
        ordered.reserve(pooled);
        for (const auto& s : chain.samples) {
            if (auto v = parameter_value(s.state, name)) ordered.push_back(*v);
        }
        p.overall = summarize(ordered, level);
        out.params.push_back(std::move(p));
    }
    return out;
}

std::vector<std::size_t> default_checkpoints(std::size_t length, std::size_t every) {
    if (every == 0) throw std::invalid_argument("checkpoint spacing must be positive");
    std::vector<std::size_t> cps;
    for (std::size_t c = every; c <= length; c += every) cps.push_back(c);
    if (cps.empty() || cps.back() != length) {
        if (length > 0) cps.push_back(length);
    }
    return cps;
}

namespace {

void check_chains(std::size_t num_chains, std::size_t shortest, std::span<const std::size_t> checkpoints) {
    if (num_chains < 2) throw std::invalid_argument("convergence diagnostics need at least two chains");
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] == 0 || checkpoints[i] > shortest) {
            throw std::invalid_argument("checkpoint outside the chains' length");
        }
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
            throw std::invalid_argument("checkpoints must be strictly increasing");
        }
    }
}

// Cumulative model counts of every chain at every checkpoint.
std::vector<std::vector<std::array<double, 3>>> cumulative_counts(
    const std::vector<std::vector<ModelId>>& chains, std::span<const std::size_t> checkpoints) {
    std::size_t shortest = chains.empty() ? 0 : chains.front().size();
    for (const auto& c : chains) shortest = std::min(shortest, c.size());
    check_chains(chains.size(), shortest, checkpoints);
    std::vector<std::vector<std::array<double, 3>>> out(checkpoints.size(),
                                                        std::vector<std::array<double, 3>>(chains.size()));
    for (std::size_t c = 0; c < chains.size(); ++c) {
        std::array<double, 3> acc{};
        std::size_t pos = 0;
        for (std::size_t k = 0; k < checkpoints.size(); ++k) {
            for (; pos < checkpoints[k]; ++pos) acc[model_index(chains[c][pos])] += 1.0;
            out[k][c] = acc;
        }
    }
    return out;
}

double bonferroni(double min_p, std::size_t pairs) {
    return std::min(1.0, min_p * static_cast<double>(pairs));
}

} // namespace

std::vector<TestPoint> chisq_convergence(const std::vector<std::vector<ModelId>>& chains,
                                         std::span<const std::size_t> checkpoints) {
    const auto counts = cumulative_counts(chains, checkpoints);
    std::vector<TestPoint> out;
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        std::vector<std::vector<double>> table;
        for (const auto& row : counts[k]) table.emplace_back(row.begin(), row.end());
        const auto r = stats::chisq_homogeneity(table);
        out.push_back({checkpoints[k], r.statistic, r.p_value});
    }
    return out;
}

std::vector<TestPoint> ks_convergence(const std::vector<std::vector<ModelId>>& chains,
                                      std::span<const std::size_t> checkpoints) {
    const auto counts = cumulative_counts(chains, checkpoints);
    const std::size_t pairs = chains.size() * (chains.size() - 1) / 2;
    std::vector<TestPoint> out;
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        const auto c = checkpoints[k];
        double min_p = 1.0, max_d = 0.0;
        for (std::size_t a = 0; a < chains.size(); ++a) {
            for (std::size_t b = a + 1; b < chains.size(); ++b) {
                const auto& ca = counts[k][a];
                const auto& cb = counts[k][b];
                const double n = static_cast<double>(c);
                const double d = std::max(std::abs(ca[0] - cb[0]) / n,
                                          std::abs((ca[0] + ca[1]) - (cb[0] + cb[1])) / n);
                max_d = std::max(max_d, d);
                min_p = std::min(min_p, stats::ks_p_value(d, c, c));
            }
        }
        out.push_back({c, max_d, bonferroni(min_p, pairs)});
    }
    return out;
}

std::vector<TestPoint> ks_convergence(const std::vector<std::vector<double>>& traces,
                                      std::span<const std::size_t> checkpoints) {
    std::size_t shortest = traces.empty() ? 0 : traces.front().size();
    for (const auto& t : traces) shortest = std::min(shortest, t.size());
    check_chains(traces.size(), shortest, checkpoints);
    const std::size_t pairs = traces.size() * (traces.size() - 1) / 2;
    std::vector<TestPoint> out;
    for (std::size_t c : checkpoints) {
        std::vector<std::vector<double>> sorted;
        bool any_empty = false;
        for (const auto& t : traces) {
            std::vector<double> v;
            for (std::size_t i = 0; i < c; ++i) {
                if (!std::isnan(t[i])) v.push_back(t[i]);
            }
            std::sort(v.begin(), v.end());
            any_empty = any_empty || v.empty();
            sorted.push_back(std::move(v));
        }
        if (any_empty) {
            out.push_back({c, 0.0, 1.0});
            continue;
        }
        double min_p = 1.0, max_d = 0.0;
        for (std::size_t a = 0; a < sorted.size(); ++a) {
            for (std::size_t b = a + 1; b < sorted.size(); ++b) {
                const auto r = stats::ks_two_sample_sorted(sorted[a], sorted[b]);
                max_d = std::max(max_d, r.statistic);
                min_p = std::min(min_p, r.p_value);
            }
        }
        out.push_back({c, max_d, bonferroni(min_p, pairs)});
    }
    return out;
}

DiagnosticTrace convergence_diagnostics(const std::vector<std::vector<ModelId>>& chains,
                                        std::vector<std::size_t> checkpoints) {
    DiagnosticTrace t;
    t.num_chains = chains.size();
    t.chisq = chisq_convergence(chains, checkpoints);
    t.ks = ks_convergence(chains, checkpoints);
    t.checkpoints = std::move(checkpoints);
    return t;
}

} // namespace lossrj
