#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <span>

namespace lossrj {

/// Seedable random stream. All variates are generated from the raw 64-bit
/// engine output by code in this library, so a seed gives the same sequence
/// on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Gamma with density proportional to x^(shape-1) exp(-rate x). Valid for
    /// any shape > 0; shapes below 1 use the boost X = G(shape+1) U^(1/shape)
    /// evaluated in log space.
    double gamma(double shape, double rate);

    /// Index drawn with probabilities proportional to weights (nonnegative).
    std::size_t categorical(std::span<const double> weights);

private:
    double gamma_shape_ge1(double shape);

    std::mt19937_64 engine_;
};

/// Independent per-stream seed from a master seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Draws z ~ N(0, I) of the given dimension.
Eigen::VectorXd standard_normal_vector(Rng& rng, Eigen::Index dim);

} // namespace lossrj
