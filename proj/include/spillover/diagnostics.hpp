#pragma once

#include "spillover/test_report.hpp"

#include <Eigen/Dense>

#include <string>

namespace spillover {

/**
 * Cross-period comparison of a dynamic correlation series:
 *
 *   t = (mean_during - mean_pre) / sqrt(var_during / n_during + var_pre / n_pre)
 *
 * so an increase in correlation during the stress period gives t > 0.
 */
struct DccComparison {
    std::string pair;
    double mean_pre = 0.0;
    double mean_during = 0.0;
    double mean_diff = 0.0;
    double t_stat = 0.0;
    std::size_t n_pre = 0;
    std::size_t n_during = 0;
    double sd_pre = 0.0;
    double sd_during = 0.0;
    bool significant_5pct = false;
};

DccComparison dcc_compare(const Eigen::VectorXd& rho_pre, const Eigen::VectorXd& rho_during, std::string pair = {});

/// Lag-j sample autocovariance (1/T normalization, demeaned).
Eigen::MatrixXd sample_autocovariance(const Eigen::MatrixXd& x, Eigen::Index lag);

/// Multivariate portmanteau Q = T^2 sum_j tr(C_j' C_0^{-1} C_j C_0^{-1}) / (T - j), chi^2(K^2 lags).
TestReport hosking_test(const Eigen::MatrixXd& residuals, int lags = 10);

/// Q* = T sum_j tr(C_j' C_0^{-1} C_j C_0^{-1}) + K^2 lags (lags + 1) / (2T), chi^2(K^2 lags).
TestReport li_mcleod_test(const Eigen::MatrixXd& residuals, int lags = 10);

}  // namespace spillover
