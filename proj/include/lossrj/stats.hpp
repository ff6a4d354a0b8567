#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lossrj::stats {

double mean(std::span<const double> x);
/// Unbiased (n - 1) sample variance; 0 for fewer than two values.
double variance(std::span<const double> x);

/// Upper tail of the chi-square distribution.
double chisq_survival(double x, double df);

/// Q(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2), the limiting
/// tail of sqrt(n) * D.
double kolmogorov_survival(double lambda);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Asymptotic p-value for a KS distance between samples of sizes n and m,
/// with the usual finite-sample correction of the argument.
double ks_p_value(double d, std::size_t n, std::size_t m);

/// Sorts copies of the inputs. Both must be nonempty.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
KsResult ks_two_sample_sorted(std::span<const double> a, std::span<const double> b);

struct ChisqResult {
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 1.0;
};

/// Pearson homogeneity test on a rows x cols table of counts. Rows and columns
/// with zero totals are dropped; with fewer than two of either left the
/// p-value is 1.
ChisqResult chisq_homogeneity(const std::vector<std::vector<double>>& table);

/// Standard normal quantile.
double normal_quantile(double p);

} // namespace lossrj::stats
