#pragma once

#include "spillover/optimizer.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace spillover {

/**
 * Bivariate BEKK(1,1):
 *
 *   H_t = C'C + A' eps_{t-1} eps_{t-1}' A + G' H_{t-1} G,   eps_t = r_t - mu
 *
 * C is lower triangular. Variable 1 is the foreign market and variable 2 the
 * home market, so G(0,1) carries market-1 variance into market 2 (1 -> 2) and
 * G(1,0) carries market-2 variance into market 1 (2 -> 1).
 */
struct BekkParams {
    Eigen::Matrix2d C = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
    Eigen::Vector2d mu = Eigen::Vector2d::Zero();

    static constexpr std::size_t kFreeParameters = 11;

    /// Report order: c11, c12, c22, a11, a21, a12, a22, g11, g21, g12, g22.
    /// "c12" is the off-diagonal entry of the triangular factor, C(1,0).
    [[nodiscard]] std::array<double, kFreeParameters> to_array() const;
    static BekkParams from_array(const std::array<double, kFreeParameters>& values, Eigen::Vector2d mu = {0, 0});
    static const std::array<const char*, kFreeParameters>& names();
};

/// Spectral radius of A (x) A + G (x) G; < 1 means covariance stationary.
double bekk_spectral_radius(const Eigen::Matrix2d& A, const Eigen::Matrix2d& G);

/// Sample moments of the estimation window used to start the recursion.
Eigen::Matrix2d sample_covariance(const Eigen::MatrixX2d& residuals);

/// H_1 is the sample covariance of eps; H_t follows the recursion for t >= 2.
std::vector<Eigen::Matrix2d> bekk_covariance_path(const BekkParams& params, const Eigen::MatrixXd& returns);

/// sum_t -ln(2 pi) - 0.5 ln|H_t| - 0.5 eps_t' H_t^{-1} eps_t.
double bekk_loglik(const BekkParams& params, const Eigen::MatrixXd& returns);

struct BekkFit {
    BekkParams params;
    BekkParams std_errors;  ///< same layout; mu entries unused
    std::array<std::string, BekkParams::kFreeParameters> stars;
    std::vector<Eigen::Matrix2d> H_path;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
};

/// Full BEKK(1,1) by maximum likelihood with mu fixed at the sample means.
BekkFit fit_bekk(const Eigen::MatrixXd& returns, const MleSettings& settings = {});

enum class SpilloverDirection { bidirectional, i_to_j, j_to_i, none };

std::string to_string(SpilloverDirection direction, const std::string& market_i, const std::string& market_j);

struct SpilloverSummary {
    std::string market_i;  ///< variable 1 (foreign)
    std::string market_j;  ///< variable 2 (home)
    double g21 = 0.0, se_g21 = 0.0;  ///< j -> i
    double g12 = 0.0, se_g12 = 0.0;  ///< i -> j
    std::string stars_g21;
    std::string stars_g12;
    SpilloverDirection direction = SpilloverDirection::none;
    double magnitude_pct_i_to_j = 0.0;  ///< 100 |g12| when significant, else 0
    double magnitude_pct_j_to_i = 0.0;  ///< 100 |g21| when significant, else 0
};

SpilloverSummary spillover_summary(const BekkFit& fit, std::string market_i, std::string market_j);

}  // namespace spillover
