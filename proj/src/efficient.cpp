#include "lossrj/efficient.hpp"

#include "lossrj/density.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <numeric>
#include <stdexcept>

namespace lossrj {

namespace {

void require_sub_model(ModelId m) {
    if (m == ModelId::M1) throw std::invalid_argument("centering requires a sub-model (M2 or M3)");
}

double alpha_sum(std::span<const double> alpha) { return std::accumulate(alpha.begin(), alpha.end(), 0.0); }

// alpha_{j-1} for j = 1..n with the alpha0 slot given.
double lagged(std::span<const double> alpha, double alpha0, std::size_t j) {
    return j == 1 ? alpha0 : alpha[j - 2];
}

constexpr double kMinPivot = 1e-12;

bool factor_pd(const Eigen::Matrix3d& m, Eigen::Matrix3d& lower) {
    Eigen::LLT<Eigen::Matrix3d> llt(m);
    if (llt.info() != Eigen::Success) return false;
    lower = llt.matrixL();
    return lower.diagonal().minCoeff() > kMinPivot;
}

} // namespace

Centering centering_point(ModelId sub_model, std::span<const double> alpha) {
    require_sub_model(sub_model);
    const double a1 = alpha.front();
    const double an = alpha.back();
    if (sub_model == ModelId::M2) return {an, 1.0, 2.0 * an - a1};
    const auto n = static_cast<double>(alpha.size());
    return {2.0 * n * a1 - 2.0 * alpha_sum(alpha) + an, 0.0, a1};
}

Centering primary_centering(ModelId sub_model, std::span<const double> alpha, double tau) {
    Centering c = centering_point(sub_model, alpha);
    const NormalParams free = reduced_proposal(sub_model, alpha, tau);
    if (sub_model == ModelId::M2) {
        c.alpha0 = free.mean;
    } else {
        c.eta = free.mean;
    }
    return c;
}

double m1_block_log_density(const Eigen::Vector3d& x, std::span<const double> alpha, double tau) {
    const double a0 = x[0], rho = x[1], eta = x[2];
    double ss = 0.0;
    for (std::size_t j = 1; j <= alpha.size(); ++j) {
        const double e = alpha[j - 1] - rho * lagged(alpha, a0, j) - (1.0 - rho) * eta;
        ss += e * e;
    }
    return -0.5 * (a0 * a0 + rho * rho + eta * eta) - 0.5 * tau * ss;
}

Eigen::Vector3d m1_block_gradient(const Eigen::Vector3d& x, std::span<const double> alpha, double tau) {
    const double a0 = x[0], rho = x[1], eta = x[2];
    double e1 = 0.0, s_rho = 0.0, s_eta = 0.0;
    for (std::size_t j = 1; j <= alpha.size(); ++j) {
        const double prev = lagged(alpha, a0, j);
        const double e = alpha[j - 1] - rho * prev - (1.0 - rho) * eta;
        if (j == 1) e1 = e;
        s_rho += e * (eta - prev);
        s_eta += e;
    }
    return {-a0 + tau * rho * e1, -rho - tau * s_rho, -eta + tau * (1.0 - rho) * s_eta};
}

Eigen::Matrix3d m1_block_curvature(const Eigen::Vector3d& x, std::span<const double> alpha, double tau) {
    const double a0 = x[0], rho = x[1], eta = x[2];
    const auto n = static_cast<double>(alpha.size());
    double s22 = 0.0, s23 = 0.0;
    for (std::size_t j = 1; j <= alpha.size(); ++j) {
        const double d = eta - lagged(alpha, a0, j);
        s22 += d * d;
        s23 += (1.0 - 2.0 * rho) * d + eta - alpha[j - 1];
    }
    Eigen::Matrix3d h;
    h(0, 0) = 1.0 + tau * rho * rho;
    h(0, 1) = -tau * (alpha.front() - eta + 2.0 * rho * (eta - a0));
    h(0, 2) = tau * rho * (1.0 - rho);
    h(1, 1) = 1.0 + tau * s22;
    h(1, 2) = -tau * s23;
    h(2, 2) = 1.0 + n * tau * (1.0 - rho) * (1.0 - rho);
    h(1, 0) = h(0, 1);
    h(2, 0) = h(0, 2);
    h(2, 1) = h(1, 2);
    return h;
}

double EfficientProposal::log_pdf(const Eigen::Vector3d& x) const {
    const Eigen::Vector3d d = x - mu;
    Eigen::LLT<Eigen::Matrix3d> llt(precision);
    const Eigen::Matrix3d l = llt.matrixL();
    const double log_det_precision = 2.0 * l.diagonal().array().log().sum();
    return -3.0 * density::kLogSqrt2Pi + 0.5 * log_det_precision - 0.5 * d.dot(precision * d);
}

Eigen::Vector3d EfficientProposal::transform(const Eigen::Vector3d& z) const {
    Eigen::LLT<Eigen::Matrix3d> llt(sigma);
    return mu + llt.matrixL() * z;
}

Eigen::Vector3d EfficientProposal::draw(Rng& rng) const {
    return transform(Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()));
}

EfficientProposal efficient_proposal_full(std::span<const double> alpha, double tau,
                                          const Centering& centering, ModelId sub_model) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    if (alpha.empty()) throw std::invalid_argument("alpha must be nonempty");
    require_sub_model(sub_model);

    EfficientProposal p;
    p.centering = centering;
    Eigen::Vector3d c = centering.vec();
    Eigen::Matrix3d h = m1_block_curvature(c, alpha, tau);
    Eigen::Matrix3d lower;
    if (!factor_pd(h, lower)) {
        p.fallback_used = true;
        p.centering = centering_point(sub_model, alpha);
        c = p.centering.vec();
        h = m1_block_curvature(c, alpha, tau).diagonal().asDiagonal();
    }
    p.precision = h;
    p.sigma = h.inverse();
    p.sigma = 0.5 * (p.sigma + p.sigma.transpose());
    p.mu = c + p.sigma * m1_block_gradient(c, alpha, tau);
    return p;
}

NormalParams reduced_proposal(ModelId model, std::span<const double> alpha, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    if (model == ModelId::M2) {
        const double prec = 1.0 + tau;
        return {tau * alpha.front() / prec, 1.0 / prec};
    }
    if (model == ModelId::M3) {
        const double prec = 1.0 + static_cast<double>(alpha.size()) * tau;
        return {tau * alpha_sum(alpha) / prec, 1.0 / prec};
    }
    throw std::invalid_argument("reduced proposal exists only for M2 and M3");
}

} // namespace lossrj
