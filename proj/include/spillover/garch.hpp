#pragma once

#include "spillover/optimizer.hpp"

#include <Eigen/Dense>

namespace spillover {

/// GARCH(1,1): h_t = omega + alpha * eps_{t-1}^2 + beta * h_{t-1}, eps_t = r_t - mu.
struct GarchParams {
    double mu = 0.0;
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    /// omega > 0, alpha >= 0, beta >= 0, alpha + beta < 1.
    [[nodiscard]] bool valid() const noexcept;
    [[nodiscard]] double persistence() const noexcept { return alpha + beta; }
    [[nodiscard]] double unconditional_variance() const noexcept { return omega / (1.0 - alpha - beta); }
};

struct GarchStdErrors {
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

struct GarchFit {
    GarchParams params;
    GarchStdErrors std_errors;
    Eigen::VectorXd sigma2_path;
    Eigen::VectorXd std_residuals;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
};

/**
 * Conditional variance path. The recursion starts from a presample state in
 * which both eps_0^2 and h_0 equal the sample variance of eps, so that
 * h_1 = omega + (alpha + beta) * s^2 and alpha = beta = 0 gives h_t = omega
 * for every t.
 */
Eigen::VectorXd garch_variance_path(const GarchParams& params, const Eigen::VectorXd& returns);

/// Gaussian log-likelihood sum_t [-0.5 ln 2pi - 0.5 ln h_t - eps_t^2 / (2 h_t)].
double garch_loglik(const GarchParams& params, const Eigen::VectorXd& returns);

/// Two-step fit: mu is the sample mean, (omega, alpha, beta) by maximum likelihood.
GarchFit fit_garch(const Eigen::VectorXd& returns, const MleSettings& settings = {});

}  // namespace spillover
