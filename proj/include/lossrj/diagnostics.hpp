#pragma once

#include "lossrj/chain.hpp"
#include "lossrj/model.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lossrj {

enum class HpdMethod { ShortestInterval, KdeThreshold };

struct HpdResult {
    double level = 0.95;
    /// Disjoint, sorted (lo, hi) pairs.
    std::vector<std::pair<double, double>> intervals;
    HpdMethod method = HpdMethod::ShortestInterval;
    std::optional<std::string> warning;
};

/// Shortest window [x_(k), x_(k+m)] of the sorted samples, m = ceil(level N),
/// leftmost on ties. When N (1 - level) < 1 the whole range is returned with a
/// warning.
HpdResult hpd_shortest(std::span<const double> samples, double level);

double silverman_bandwidth(std::span<const double> samples);

struct KdeGrid {
    std::vector<double> x;
    std::vector<double> density;
    double bandwidth = 0.0;

    /// Linear interpolation; 0 outside the grid.
    double at(double v) const;
};

/// Gaussian KDE on an equally spaced grid spanning the samples +- 4 bandwidths.
/// A nonpositive bandwidth selects Silverman's rule.
KdeGrid kde_density(std::span<const double> samples, double bandwidth = 0.0, std::size_t grid_points = 1024);

/// Superlevel set of the KDE holding `level` of the samples: the threshold is
/// the density value below which a (1 - level) fraction of the samples lie.
HpdResult hpd_kde_region(std::span<const double> samples, double level, double bandwidth = 0.0);

/// Sample ACF with the biased (1/N) normalization, lags 0..max_lag.
/// Throws std::invalid_argument for max_lag >= N or zero variance.
std::vector<double> acf(std::span<const double> samples, std::size_t max_lag);
inline double acf_bound(std::size_t n) { return 1.96 / std::sqrt(static_cast<double>(n)); }

/// Monte Carlo standard error of the mean from floor(sqrt(N)) batches.
double batch_means_se(std::span<const double> samples);

struct ParamSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double sd = 0.0;
    double mc_se = 0.0;
    HpdResult hpd;
};

ParamSummary summarize(std::span<const double> samples, double level = 0.95);

struct AveragedParam {
    std::string name;
    /// Pooled over the samples of every model in which the parameter exists.
    ParamSummary overall;
    std::map<ModelId, ParamSummary> per_model;
};

struct ModelAveragedSummary {
    std::array<double, 3> model_probabilities{};
    std::vector<AveragedParam> params;
    std::vector<std::string> notes;
};

ModelAveragedSummary model_averaged_summary(const ChainRecord& chain, double level = 0.95);

struct TestPoint {
    std::size_t checkpoint = 0;
    double statistic = 0.0;
    double p_value = 1.0;
};

/// `every`, 2 every, ... up to and including `length` (appended when not a multiple).
std::vector<std::size_t> default_checkpoints(std::size_t length, std::size_t every = 1000);

/// Chi-square homogeneity of cumulative model-visit counts per chain.
std::vector<TestPoint> chisq_convergence(const std::vector<std::vector<ModelId>>& chains,
                                         std::span<const std::size_t> checkpoints);

/// Minimum pairwise KS p-value on the cumulative model-indicator CDFs,
/// multiplied by the number of pairs and capped at 1.
std::vector<TestPoint> ks_convergence(const std::vector<std::vector<ModelId>>& chains,
                                      std::span<const std::size_t> checkpoints);

/// Same on a scalar trace per chain; NaN entries (parameter absent) are skipped.
std::vector<TestPoint> ks_convergence(const std::vector<std::vector<double>>& traces,
                                      std::span<const std::size_t> checkpoints);

struct DiagnosticTrace {
    std::vector<std::size_t> checkpoints;
    std::vector<TestPoint> chisq;
    std::vector<TestPoint> ks;
    std::size_t num_chains = 0;
};

/// Both tests on the model indicators. Requires at least two chains and
/// checkpoints not beyond the shortest chain.
DiagnosticTrace convergence_diagnostics(const std::vector<std::vector<ModelId>>& chains,
                                        std::vector<std::size_t> checkpoints);

} // namespace lossrj
