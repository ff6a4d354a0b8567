#include "lossrj/stats.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace lossrj::stats {

double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean of an empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

double chisq_survival(double x, double df) {
    if (!(df > 0.0)) return 1.0;
    if (!(x > 0.0)) return 1.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double kolmogorov_survival(double lambda) {
    if (!(lambda > 0.0)) return 1.0;
    if (lambda < 1.0) {
        // Dual series for the CDF converges fast for small lambda.
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double cdf = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double t = 2.0 * k - 1.0;
            cdf += std::exp(-t * t * pi2 / (8.0 * lambda * lambda));
        }
        cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double q = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        q += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-300) break;
    }
    return std::clamp(q, 0.0, 1.0);
}

double ks_p_value(double d, std::size_t n, std::size_t m) {
    const double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
    const double root = std::sqrt(ne);
    return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

KsResult ks_two_sample_sorted(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs two nonempty samples");
    const auto na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return {d, ks_p_value(d, a.size(), b.size())};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return ks_two_sample_sorted(sa, sb);
}

ChisqResult chisq_homogeneity(const std::vector<std::vector<double>>& table) {
    if (table.empty()) return {};
    const std::size_t cols = table.front().size();
    std::vector<double> row_tot, col_tot(cols, 0.0);
    std::vector<std::size_t> rows_kept;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i].size() != cols) throw std::invalid_argument("ragged contingency table");
        const double t = std::accumulate(table[i].begin(), table[i].end(), 0.0);
        if (t > 0.0) {
            rows_kept.push_back(i);
            row_tot.push_back(t);
            for (std::size_t j = 0; j < cols; ++j) col_tot[j] += table[i][j];
        }
    }
    std::vector<std::size_t> cols_kept;
    for (std::size_t j = 0; j < cols; ++j) {
        if (col_tot[j] > 0.0) cols_kept.push_back(j);
    }
    if (rows_kept.size() < 2 || cols_kept.size() < 2) return {};
    const double total = std::accumulate(row_tot.begin(), row_tot.end(), 0.0);
    double stat = 0.0;
    for (std::size_t r = 0; r < rows_kept.size(); ++r) {
        for (std::size_t j : cols_kept) {
            const double expected = row_tot[r] * col_tot[j] / total;
            const double d = table[rows_kept[r]][j] - expected;
            stat += d * d / expected;
        }
    }
    const double df = static_cast<double>((rows_kept.size() - 1) * (cols_kept.size() - 1));
    return {stat, df, chisq_survival(stat, df)};
}

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal_distribution<>(), p); }

} // namespace lossrj::stats
