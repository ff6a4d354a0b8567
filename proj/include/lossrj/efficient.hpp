#pragma once

#include "lossrj/conditionals.hpp"
#include "lossrj/model.hpp"
#include "lossrj/rng.hpp"

#include <Eigen/Core>

#include <span>

namespace lossrj {

/// Point (alpha0, rho, eta) of M1 at which a jump from a sub-model is centered.
struct Centering {
    double alpha0 = 0.0;
    double rho = 0.0;
    double eta = 0.0;

    Eigen::Vector3d vec() const { return {alpha0, rho, eta}; }
};

/// Centering at which the off-diagonal curvature terms vanish:
///   M2: (alpha_n, 1, 2 alpha_n - alpha_1)
///   M3: (2 n alpha_1 - 2 sum alpha + alpha_n, 0, alpha_1)
/// sub_model must be M2 or M3.
Centering centering_point(ModelId sub_model, std::span<const double> alpha);

/// Default centering tried first. The free coordinate of the sub-model is put
/// at its conditional posterior mean given alpha and tau, the other coordinate
/// at its centering_point value:
///   M2: (tau alpha_1 / (1 + tau), 1, 2 alpha_n - alpha_1)
///   M3: (2 n alpha_1 - 2 sum alpha + alpha_n, 0, tau sum alpha / (1 + n tau))
Centering primary_centering(ModelId sub_model, std::span<const double> alpha, double tau);

/// (alpha0, rho, eta) part of log pi(M1 | alpha, tau) up to a constant:
/// N(0,1) priors plus the alpha-process likelihood.
double m1_block_log_density(const Eigen::Vector3d& x, std::span<const double> alpha, double tau);
Eigen::Vector3d m1_block_gradient(const Eigen::Vector3d& x, std::span<const double> alpha, double tau);
/// Negative Hessian of m1_block_log_density.
Eigen::Matrix3d m1_block_curvature(const Eigen::Vector3d& x, std::span<const double> alpha, double tau);

/// Gaussian proposal for (alpha0, rho, eta) matching the M1 block's first and
/// second derivatives at the centering point.
struct EfficientProposal {
    Eigen::Vector3d mu = Eigen::Vector3d::Zero();
    Eigen::Matrix3d sigma = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d precision = Eigen::Matrix3d::Identity();
    bool fallback_used = false;
    Centering centering;

    double log_pdf(const Eigen::Vector3d& x) const;
    Eigen::Vector3d draw(Rng& rng) const;
    /// mu + L z with L the lower Cholesky factor of sigma.
    Eigen::Vector3d transform(const Eigen::Vector3d& z) const;
};

/// Builds the proposal at `centering`. When the curvature matrix is not
/// positive definite the off-diagonals are dropped and the proposal is rebuilt
/// at centering_point(sub_model, alpha), where they vanish exactly.
EfficientProposal efficient_proposal_full(std::span<const double> alpha, double tau,
                                          const Centering& centering, ModelId sub_model);

/// Conditional posterior of alpha0 under M2 (resp. eta under M3) given alpha and tau.
NormalParams reduced_proposal(ModelId model, std::span<const double> alpha, double tau);

} // namespace lossrj
