#include "spillover/diagnostics.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace spillover {

namespace {

constexpr Eigen::Index kMinComparisonLength = 30;

double sample_variance(const Eigen::VectorXd& x) {
    return (x.array() - x.mean()).square().sum() / static_cast<double>(x.size() - 1);
}

// tr(C_j' C_0^{-1} C_j C_0^{-1}) for j = 1..lags.
std::vector<double> portmanteau_terms(const Eigen::MatrixXd& residuals, int lags) {
    const Eigen::Index T = residuals.rows();
    const Eigen::Index K = residuals.cols();
    if (lags < 1) throw std::invalid_argument("portmanteau tests need lags >= 1");
    if (T <= lags + K) throw std::invalid_argument("too few observations for the requested lags");
    if (!residuals.allFinite()) throw std::invalid_argument("residuals contain non-finite values");

    const Eigen::MatrixXd C0 = sample_autocovariance(residuals, 0);
    Eigen::LDLT<Eigen::MatrixXd> c0(C0);
    if (c0.info() != Eigen::Success || !(c0.vectorD().array() > 1e-14 * C0.trace()).all()) {
        throw std::invalid_argument("singular residual covariance");
    }
    std::vector<double> terms;
    for (int j = 1; j <= lags; ++j) {
        const Eigen::MatrixXd Cj = sample_autocovariance(residuals, j);
        const Eigen::MatrixXd P = c0.solve(Cj);              // C0^{-1} C_j
        const Eigen::MatrixXd Q = c0.solve(Cj.transpose());  // C0^{-1} C_j'
        terms.push_back((P.transpose() * Q.transpose()).trace());
    }
    return terms;
}

TestReport chi_square_report(std::string name, double stat, int lags, Eigen::Index K) {
    const double df = static_cast<double>(K * K * lags);
    const boost::math::chi_squared dist(df);
    TestReport r;
    r.test_name = std::move(name);
    r.statistic = stat;
    r.lags_used = lags;
    r.critical_values = {boost::math::quantile(dist, 0.99), boost::math::quantile(dist, 0.95),
                         boost::math::quantile(dist, 0.90)};
    r.p_value = boost::math::cdf(boost::math::complement(dist, std::max(stat, 0.0)));
    r.reject_null = stat > r.critical_values.pct5;
    r.decision = r.reject_null ? "serial correlation" : "no serial correlation";
    return r;
}

}  // namespace

DccComparison dcc_compare(const Eigen::VectorXd& rho_pre, const Eigen::VectorXd& rho_during, std::string pair) {
    if (rho_pre.size() < kMinComparisonLength || rho_during.size() < kMinComparisonLength) {
        throw std::invalid_argument("each period needs at least 30 correlation observations");
    }
    DccComparison c;
    c.pair = std::move(pair);
    c.n_pre = static_cast<std::size_t>(rho_pre.size());
    c.n_during = static_cast<std::size_t>(rho_during.size());
    c.mean_pre = rho_pre.mean();
    c.mean_during = rho_during.mean();
    c.mean_diff = c.mean_during - c.mean_pre;
    const double var_pre = sample_variance(rho_pre);
    const double var_during = sample_variance(rho_during);
    if ((rho_pre.array() == rho_pre[0]).all() && (rho_during.array() == rho_during[0]).all()) throw std::invalid_argument("zero variance in both periods");
    c.sd_pre = std::sqrt(var_pre);
    c.sd_during = std::sqrt(var_during);
    c.t_stat = c.mean_diff /
               std::sqrt(var_during / static_cast<double>(c.n_during) + var_pre / static_cast<double>(c.n_pre));
    c.significant_5pct = std::abs(c.t_stat) > 1.96;
    return c;
}

Eigen::MatrixXd sample_autocovariance(const Eigen::MatrixXd& x, Eigen::Index lag) {
    const Eigen::Index T = x.rows();
    if (lag < 0 || lag >= T) throw std::invalid_argument("lag out of range");
    const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
    // C_j = (1/T) sum_t c_t c_{t-j}'
    return c.bottomRows(T - lag).transpose() * c.topRows(T - lag) / static_cast<double>(T);
}

TestReport hosking_test(const Eigen::MatrixXd& residuals, int lags) {
    const auto terms = portmanteau_terms(residuals, lags);
    const auto T = static_cast<double>(residuals.rows());
    double q = 0.0;
    for (std::size_t j = 0; j < terms.size(); ++j) q += terms[j] / (T - static_cast<double>(j + 1));
    return chi_square_report("Hosking", T * T * q, lags, residuals.cols());
}

TestReport li_mcleod_test(const Eigen::MatrixXd& residuals, int lags) {
    const auto terms = portmanteau_terms(residuals, lags);
    const auto T = static_cast<double>(residuals.rows());
    const auto K = static_cast<double>(residuals.cols());
    double q = 0.0;
    for (const double term : terms) q += term;
    const double stat = T * q + K * K * lags * (lags + 1.0) / (2.0 * T);
    return chi_square_report("Li-McLeod", stat, lags, residuals.cols());
}

}  // namespace spillover
