#include "spillover/stationarity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spillover {

namespace {

struct OlsResult {
    Eigen::VectorXd coef;
    Eigen::VectorXd se;
    Eigen::VectorXd resid;
    double ssr = 0.0;
};

OlsResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < k || n <= k) throw std::invalid_argument("regression singular");
    OlsResult r;
    r.coef = qr.solve(y);
    r.resid = y - X * r.coef;
    r.ssr = r.resid.squaredNorm();
    const double s2 = r.ssr / static_cast<double>(n - k);
    const Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
    r.se = (s2 * xtx_inv.diagonal()).cwiseSqrt();
    return r;
}

void check_series(const Eigen::VectorXd& y, int lags) {
    if (lags < 0) throw std::invalid_argument("lags must be non-negative");
    if (y.size() < lags + 10) throw std::invalid_argument("series too short");
    if (!y.allFinite()) throw std::invalid_argument("series contains non-finite values");
    if ((y.array() == y[0]).all()) throw std::invalid_argument("constant series (regression singular)");
}

// Dickey-Fuller regression of dy_t on [1, y_{t-1}, dy_{t-1}, ..., dy_{t-p}]
// using dy rows first..end.
OlsResult df_regression(const Eigen::VectorXd& y, int p, Eigen::Index first) {
    const Eigen::VectorXd dy = y.tail(y.size() - 1) - y.head(y.size() - 1);
    const Eigen::Index nobs = dy.size() - first;
    Eigen::MatrixXd X(nobs, 2 + p);
    for (Eigen::Index r = 0; r < nobs; ++r) {
        const Eigen::Index t = first + r;
        X(r, 0) = 1.0;
        X(r, 1) = y[t];
        for (int j = 1; j <= p; ++j) X(r, 1 + j) = dy[t - j];
    }
    return ols(X, dy.tail(nobs));
}

TestReport unit_root_report(std::string name, double stat, int lags) {
    TestReport r;
    r.test_name = std::move(name);
    r.statistic = stat;
    r.lags_used = lags;
    r.critical_values = kDickeyFullerConstant;
    r.reject_null = stat < r.critical_values.pct5;
    r.decision = r.reject_null ? "stationary" : "non-stationary";
    return r;
}

}  // namespace

int schwert_max_lag(std::size_t n) {
    return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

int newey_west_bandwidth(std::size_t n) {
    return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
}

double bartlett_long_run_variance(const Eigen::VectorXd& u, int bandwidth) {
    const Eigen::Index n = u.size();
    const auto nd = static_cast<double>(n);
    double lrv = u.squaredNorm() / nd;
    for (int j = 1; j <= bandwidth && j < n; ++j) {
        const double gamma = u.tail(n - j).dot(u.head(n - j)) / nd;
        lrv += 2.0 * (1.0 - j / (bandwidth + 1.0)) * gamma;
    }
    return lrv;
}

TestReport adf_test(const Eigen::VectorXd& series, std::optional<int> lags) {
    const int max_lag = lags.value_or(schwert_max_lag(static_cast<std::size_t>(series.size())));
    check_series(series, max_lag);

    int chosen = max_lag;
    if (!lags) {
        double best_aic = std::numeric_limits<double>::infinity();
        for (int p = max_lag; p >= 0; --p) {
            const OlsResult fit = df_regression(series, p, max_lag);
            const auto nobs = static_cast<double>(fit.resid.size());
            const double aic = nobs * std::log(fit.ssr / nobs) + 2.0 * (2.0 + p);
            if (aic < best_aic) {
                best_aic = aic;
                chosen = p;
            }
        }
    }
    const OlsResult fit = df_regression(series, chosen, chosen);
    return unit_root_report("ADF", fit.coef[1] / fit.se[1], chosen);
}

TestReport pp_test(const Eigen::VectorXd& series, std::optional<int> bandwidth) {
    const int l = bandwidth.value_or(newey_west_bandwidth(static_cast<std::size_t>(series.size())));
    check_series(series, l);

    const OlsResult fit = df_regression(series, 0, 0);
    const auto n = static_cast<double>(fit.resid.size());
    const double gamma0 = fit.ssr / n;
    const double s = std::sqrt(fit.ssr / (n - 2.0));
    const double lambda2 = bartlett_long_run_variance(fit.resid, l);
    const double lambda = std::sqrt(lambda2);
    const double t_alpha = fit.coef[1] / fit.se[1];
    const double z_t = std::sqrt(gamma0 / lambda2) * t_alpha - 0.5 * ((lambda2 - gamma0) / lambda) * (n * fit.se[1] / s);
    return unit_root_report("PP", z_t, l);
}

TestReport kpss_test(const Eigen::VectorXd& series, std::optional<int> bandwidth) {
    const int l = bandwidth.value_or(newey_west_bandwidth(static_cast<std::size_t>(series.size())));
    check_series(series, l);

    const Eigen::VectorXd e = series.array() - series.mean();
    const auto n = static_cast<double>(e.size());
    double partial = 0.0;
    double sum_sq = 0.0;
    for (Eigen::Index t = 0; t < e.size(); ++t) {
        partial += e[t];
        sum_sq += partial * partial;
    }
    const double stat = sum_sq / (n * n * bartlett_long_run_variance(e, l));

    TestReport r;
    r.test_name = "KPSS";
    r.statistic = stat;
    r.lags_used = l;
    r.critical_values = kKpssLevel;
    r.reject_null = stat > r.critical_values.pct5;
    r.decision = r.reject_null ? "non-stationary" : "stationary";
    return r;
}

}  // namespace spillover
