#pragma once

#include "spillover/garch.hpp"
#include "spillover/market_data.hpp"
#include "spillover/optimizer.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace spillover {

enum class DccDistribution { gaussian, student_t };

std::string to_string(DccDistribution distribution);
DccDistribution parse_distribution(std::string_view text);

struct DccParams {
    double alpha = 0.0;
    double beta = 0.0;
    std::optional<double> nu;  ///< Student-t degrees of freedom
    Eigen::MatrixXd Qbar;      ///< sample correlation of the standardized residuals
};

struct DccStdErrors {
    double alpha = 0.0;
    double beta = 0.0;
    std::optional<double> nu;
};

struct DccFit {
    DccDistribution distribution = DccDistribution::gaussian;
    std::vector<GarchFit> stage1;
    DccParams params;
    DccStdErrors std_errors;
    Eigen::MatrixXd std_residuals;        ///< T x K, stage-1 eta
    std::vector<Eigen::MatrixXd> R_path;
    std::vector<Eigen::MatrixXd> H_path;  ///< D_t R_t D_t
    double loglik_stage2 = 0.0;
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
    std::vector<Date> dates;              ///< empty when fitted from a bare matrix
    std::vector<std::string> markets;
};

struct CorrelationSeries {
    std::vector<Date> dates;
    std::string market_i;
    std::string market_j;
    Eigen::VectorXd rho;
};

/// Pearson correlation matrix of the columns.
Eigen::MatrixXd sample_correlation(const Eigen::MatrixXd& x);

/**
 * Q_1 = Qbar, Q_t = (1 - alpha - beta) Qbar + alpha eta_{t-1} eta_{t-1}' + beta Q_{t-1},
 * R_t = diag(Q_t)^{-1/2} Q_t diag(Q_t)^{-1/2}, with Qbar the sample correlation of eta.
 */
std::vector<Eigen::MatrixXd> dcc_correlation_path(double alpha, double beta, const Eigen::MatrixXd& std_residuals);

/// Gaussian second stage: -0.5 sum_t (K ln 2pi + ln|R_t| + eta_t' R_t^{-1} eta_t).
double dcc_loglik(double alpha, double beta, const Eigen::MatrixXd& std_residuals);

/// Multivariate Student-t second stage with unit-variance scaling (nu > 2).
double tdcc_loglik(double alpha, double beta, double nu, const Eigen::MatrixXd& std_residuals);

/// Two-step DCC(1,1)-GARCH(1,1) with correlation targeting.
DccFit fit_dcc(const Eigen::MatrixXd& returns, DccDistribution distribution, const MleSettings& settings = {},
               const std::vector<std::string>& names = {});
DccFit fit_dcc(const ReturnMatrix& returns, DccDistribution distribution, const MleSettings& settings = {});

CorrelationSeries extract_pair(const DccFit& fit, std::size_t i, std::size_t j);

}  // namespace spillover
