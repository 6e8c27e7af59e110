#include "spillover/dcc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spillover {

namespace {

constexpr double kLog2Pi = 1.83787706640934548356;
constexpr double kLogPi = 1.14472988584940017414;
constexpr Eigen::Index kMinFitLength = 250;
constexpr double kNuLower = 2.1;
constexpr double kNuUpper = 200.0;

void check_dcc_inputs(double alpha, double beta, const Eigen::MatrixXd& eta) {
    if (!(alpha >= 0.0 && beta >= 0.0 && alpha + beta < 1.0)) {
        throw std::invalid_argument("DCC parameters need alpha, beta >= 0 and alpha + beta < 1");
    }
    if (eta.rows() < 2 || eta.cols() < 2) throw std::invalid_argument("DCC needs at least 2 rows and 2 columns");
    if (!eta.allFinite()) throw std::invalid_argument("standardized residuals contain non-finite values");
    for (Eigen::Index k = 0; k < eta.cols(); ++k) {
        if ((eta.col(k).array() == eta(0, k)).all()) throw std::invalid_argument("constant residual column");
    }
}

Eigen::MatrixXd normalize(const Eigen::MatrixXd& Q) {
    const Eigen::VectorXd inv_sd = Q.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd R = inv_sd.asDiagonal() * Q * inv_sd.asDiagonal();
    R = (0.5 * (R + R.transpose())).eval().cwiseMax(-1.0).cwiseMin(1.0);
    R.diagonal().setOnes();
    return R;
}

// Runs the Q recursion and hands (t, R_t) to the visitor; stops early if the
// visitor returns false.
template <typename Visitor>
void run_recursion(double alpha, double beta, const Eigen::MatrixXd& Qbar, const Eigen::MatrixXd& eta, Visitor&& visit) {
    const double w = 1.0 - alpha - beta;
    Eigen::MatrixXd Q = Qbar;
    for (Eigen::Index t = 0; t < eta.rows(); ++t) {
        if (t > 0) {
            const Eigen::VectorXd e = eta.row(t - 1).transpose();
            Q = w * Qbar + alpha * e * e.transpose() + beta * Q;
        }
        if (!visit(t, normalize(Q))) return;
    }
}

// Per-observation log-density of eta_t given R_t; nu empty means Gaussian.
double stage2_loglik(double alpha, double beta, std::optional<double> nu, const Eigen::MatrixXd& Qbar,
                     const Eigen::MatrixXd& eta) {
    const auto K = static_cast<double>(eta.cols());
    double t_const = 0.0;
    if (nu) {
        t_const = std::lgamma(0.5 * (*nu + K)) - std::lgamma(0.5 * *nu) - 0.5 * K * (kLogPi + std::log(*nu - 2.0));
    }
    double ll = 0.0;
    bool ok = true;
    run_recursion(alpha, beta, Qbar, eta, [&](Eigen::Index t, const Eigen::MatrixXd& R) {
        Eigen::LLT<Eigen::MatrixXd> llt(R);
        if (llt.info() != Eigen::Success) {
            ok = false;
            return false;
        }
        const Eigen::MatrixXd& L = llt.matrixL();
        const double logdet = 2.0 * L.diagonal().array().log().sum();
        const double quad = llt.matrixL().solve(eta.row(t).transpose()).squaredNorm();
        if (nu) {
            ll += t_const - 0.5 * logdet - 0.5 * (*nu + K) * std::log1p(quad / (*nu - 2.0));
        } else {
            ll += -0.5 * (K * kLog2Pi + logdet + quad);
        }
        return true;
    });
    return ok ? ll : -std::numeric_limits<double>::infinity();
}

}  // namespace

std::string to_string(DccDistribution distribution) {
    return distribution == DccDistribution::gaussian ? "gaussian" : "t";
}

DccDistribution parse_distribution(std::string_view text) {
    if (text == "gaussian" || text == "normal" || text == "dcc") return DccDistribution::gaussian;
    if (text == "t" || text == "student" || text == "tdcc") return DccDistribution::student_t;
    throw std::invalid_argument("unknown DCC distribution '" + std::string(text) + "'");
}

Eigen::MatrixXd sample_correlation(const Eigen::MatrixXd& x) {
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered;
    const Eigen::VectorXd inv_sd = cov.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd R = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
    R = (0.5 * (R + R.transpose())).eval().cwiseMax(-1.0).cwiseMin(1.0);
    R.diagonal().setOnes();
    return R;
}

std::vector<Eigen::MatrixXd> dcc_correlation_path(double alpha, double beta, const Eigen::MatrixXd& std_residuals) {
    check_dcc_inputs(alpha, beta, std_residuals);
    std::vector<Eigen::MatrixXd> path;
    path.reserve(static_cast<std::size_t>(std_residuals.rows()));
    run_recursion(alpha, beta, sample_correlation(std_residuals), std_residuals,
                  [&](Eigen::Index, const Eigen::MatrixXd& R) {
                      if (!R.allFinite()) throw std::domain_error("non-finite DCC recursion");
                      path.push_back(R);
                      return true;
                  });
    return path;
}

double dcc_loglik(double alpha, double beta, const Eigen::MatrixXd& std_residuals) {
    check_dcc_inputs(alpha, beta, std_residuals);
    const double ll = stage2_loglik(alpha, beta, std::nullopt, sample_correlation(std_residuals), std_residuals);
    if (!std::isfinite(ll)) throw std::domain_error("singular correlation matrix in DCC likelihood");
    return ll;
}

double tdcc_loglik(double alpha, double beta, double nu, const Eigen::MatrixXd& std_residuals) {
    check_dcc_inputs(alpha, beta, std_residuals);
    if (!(nu > 2.0)) throw std::invalid_argument("t-DCC needs nu > 2");
    const double ll = stage2_loglik(alpha, beta, nu, sample_correlation(std_residuals), std_residuals);
    if (!std::isfinite(ll)) throw std::domain_error("singular correlation matrix in t-DCC likelihood");
    return ll;
}

DccFit fit_dcc(const Eigen::MatrixXd& returns, DccDistribution distribution, const MleSettings& settings,
               const std::vector<std::string>& names) {
    const Eigen::Index T = returns.rows();
    const Eigen::Index K = returns.cols();
    if (K < 2) throw std::invalid_argument("DCC needs at least two series");
    if (T < kMinFitLength) throw std::invalid_argument("DCC fit needs at least 250 observations");
    if (!names.empty() && names.size() != static_cast<std::size_t>(K)) throw std::invalid_argument("name count mismatch");

    auto label = [&](Eigen::Index k) { return names.empty() ? "column " + std::to_string(k) : names[static_cast<std::size_t>(k)]; };

    DccFit fit;
    fit.distribution = distribution;
    fit.markets = names;
    fit.std_residuals.resize(T, K);
    for (Eigen::Index k = 0; k < K; ++k) {
        if ((returns.col(k).array() == returns(0, k)).all()) {
            throw std::invalid_argument("degenerate market '" + label(k) + "': constant returns");
        }
        GarchFit g = fit_garch(returns.col(k), settings);
        if (!g.converged) throw std::runtime_error("stage-1 GARCH did not converge for market '" + label(k) + "'");
        fit.std_residuals.col(k) = g.std_residuals;
        fit.stage1.push_back(std::move(g));
    }

    const Eigen::MatrixXd& eta = fit.std_residuals;
    const Eigen::MatrixXd Qbar = sample_correlation(eta);
    const bool student = distribution == DccDistribution::student_t;

    MleProblem problem;
    problem.transform.simplex(2);
    if (student) problem.transform.bounded(kNuLower, kNuUpper);
    problem.observations = static_cast<double>(T);
    problem.objective = [&, transform = problem.transform](const Eigen::VectorXd& u) {
        const Eigen::VectorXd x = transform.to_constrained(u);
        const std::optional<double> nu = student ? std::optional<double>(x[2]) : std::nullopt;
        const double ll = stage2_loglik(x[0], x[1], nu, Qbar, eta);
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };
    Eigen::VectorXd start(student ? 3 : 2);
    start[0] = 0.02;
    start[1] = 0.95;
    if (student) start[2] = 8.0;
    problem.initial_points.push_back(start);

    const MleResult mle = maximize(problem, settings);

    fit.params.alpha = mle.params[0];
    fit.params.beta = mle.params[1];
    fit.params.Qbar = Qbar;
    fit.std_errors.alpha = mle.std_errors[0];
    fit.std_errors.beta = mle.std_errors[1];
    if (student) {
        fit.params.nu = mle.params[2];
        fit.std_errors.nu = mle.std_errors[2];
    }
    fit.loglik_stage2 = -mle.neg_loglik;
    fit.converged = mle.converged;
    fit.iterations = mle.iterations;
    fit.gradient_norm = mle.gradient_norm;

    fit.R_path.reserve(static_cast<std::size_t>(T));
    fit.H_path.reserve(static_cast<std::size_t>(T));
    run_recursion(fit.params.alpha, fit.params.beta, Qbar, eta, [&](Eigen::Index t, const Eigen::MatrixXd& R) {
        Eigen::VectorXd sd(K);
        for (Eigen::Index k = 0; k < K; ++k) sd[k] = std::sqrt(fit.stage1[static_cast<std::size_t>(k)].sigma2_path[t]);
        fit.H_path.push_back(sd.asDiagonal() * R * sd.asDiagonal());
        fit.R_path.push_back(R);
        return true;
    });
    return fit;
}

DccFit fit_dcc(const ReturnMatrix& returns, DccDistribution distribution, const MleSettings& settings) {
    DccFit fit = fit_dcc(returns.values, distribution, settings, returns.markets);
    fit.dates = returns.dates;
    return fit;
}

CorrelationSeries extract_pair(const DccFit& fit, std::size_t i, std::size_t j) {
    const std::size_t K = fit.R_path.empty() ? 0 : static_cast<std::size_t>(fit.R_path.front().rows());
    if (i >= K || j >= K) throw std::out_of_range("market index out of range");
    if (i == j) throw std::invalid_argument("a correlation pair needs two distinct markets");

    CorrelationSeries s;
    s.dates = fit.dates;
    s.market_i = fit.markets.empty() ? std::to_string(i) : fit.markets[i];
    s.market_j = fit.markets.empty() ? std::to_string(j) : fit.markets[j];
    s.rho.resize(static_cast<Eigen::Index>(fit.R_path.size()));
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    for (std::size_t t = 0; t < fit.R_path.size(); ++t) {
        s.rho[static_cast<Eigen::Index>(t)] = fit.R_path[t](ii, jj);
    }
    return s;
}

}  // namespace spillover
