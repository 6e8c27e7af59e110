#pragma once

#include "spillover/test_report.hpp"

#include <Eigen/Dense>

#include <optional>

namespace spillover {

/// Asymptotic Dickey-Fuller critical values, constant-only regression.
inline constexpr CriticalValues kDickeyFullerConstant{-3.43, -2.86, -2.57};
/// KPSS level-stationarity critical values.
inline constexpr CriticalValues kKpssLevel{0.739, 0.463, 0.347};

/// Schwert maximum lag, floor(12 (T/100)^{1/4}).
int schwert_max_lag(std::size_t n);
/// Newey-West automatic bandwidth, floor(4 (T/100)^{2/9}).
int newey_west_bandwidth(std::size_t n);

/// Bartlett-kernel long-run variance of a series assumed to have mean zero.
double bartlett_long_run_variance(const Eigen::VectorXd& u, int bandwidth);

/**
 * Augmented Dickey-Fuller t-test with a constant. With `lags` empty the lag
 * order is chosen by AIC from the Schwert maximum down to zero on a common
 * sample, then the regression is re-estimated on all available rows.
 */
TestReport adf_test(const Eigen::VectorXd& series, std::optional<int> lags = std::nullopt);

/// Phillips-Perron Z(t_alpha) with a constant and a Bartlett long-run variance.
TestReport pp_test(const Eigen::VectorXd& series, std::optional<int> bandwidth = std::nullopt);

/// KPSS level-stationarity test.
TestReport kpss_test(const Eigen::VectorXd& series, std::optional<int> bandwidth = std::nullopt);

}  // namespace spillover
