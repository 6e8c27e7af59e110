#include "spillover/garch.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spillover {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * ln(2 pi)
constexpr std::size_t kMinLoglikLength = 20;
constexpr std::size_t kMinFitLength = 100;

double presample_variance(const Eigen::VectorXd& eps) { return eps.squaredNorm() / static_cast<double>(eps.size()); }

// Log-likelihood of demeaned residuals; NaN/inf propagate to the caller.
double loglik_of_residuals(double omega, double alpha, double beta, const Eigen::VectorXd& eps, double s2) {
    double h = omega + (alpha + beta) * s2;
    double ll = 0.0;
    const Eigen::Index T = eps.size();
    for (Eigen::Index t = 0; t < T; ++t) {
        if (t > 0) h = omega + alpha * eps[t - 1] * eps[t - 1] + beta * h;
        ll -= kHalfLog2Pi + 0.5 * std::log(h) + 0.5 * eps[t] * eps[t] / h;
    }
    return ll;
}

}  // namespace

bool GarchParams::valid() const noexcept {
    return std::isfinite(mu) && omega > 0.0 && alpha >= 0.0 && beta >= 0.0 && alpha + beta < 1.0;
}

Eigen::VectorXd garch_variance_path(const GarchParams& params, const Eigen::VectorXd& returns) {
    if (!params.valid()) throw std::invalid_argument("GARCH parameters violate omega > 0, alpha, beta >= 0, alpha + beta < 1");
    if (returns.size() == 0) throw std::invalid_argument("empty return series");

    const Eigen::VectorXd eps = returns.array() - params.mu;
    const double s2 = presample_variance(eps);
    Eigen::VectorXd h(eps.size());
    h[0] = params.omega + (params.alpha + params.beta) * s2;
    for (Eigen::Index t = 1; t < eps.size(); ++t) {
        h[t] = params.omega + params.alpha * eps[t - 1] * eps[t - 1] + params.beta * h[t - 1];
    }
    return h;
}

double garch_loglik(const GarchParams& params, const Eigen::VectorXd& returns) {
    if (!params.valid()) throw std::invalid_argument("GARCH parameters violate omega > 0, alpha, beta >= 0, alpha + beta < 1");
    if (static_cast<std::size_t>(returns.size()) < kMinLoglikLength) throw std::invalid_argument("series too short");

    const Eigen::VectorXd eps = returns.array() - params.mu;
    const double ll = loglik_of_residuals(params.omega, params.alpha, params.beta, eps, presample_variance(eps));
    if (!std::isfinite(ll)) throw std::domain_error("non-finite GARCH log-likelihood");
    return ll;
}

GarchFit fit_garch(const Eigen::VectorXd& returns, const MleSettings& settings) {
    if (static_cast<std::size_t>(returns.size()) < kMinFitLength) throw std::invalid_argument("series too short");
    if (!returns.allFinite()) throw std::invalid_argument("return series contains non-finite values");

    const double mu = returns.mean();
    const Eigen::VectorXd eps = returns.array() - mu;
    const double s2 = presample_variance(eps);
    if (!(s2 > 0.0) || (returns.array() == returns[0]).all()) throw std::invalid_argument("constant input");

    MleProblem problem;
    problem.transform.positive().simplex(2);
    problem.observations = static_cast<double>(returns.size());
    problem.objective = [&, transform = problem.transform](const Eigen::VectorXd& u) {
        const Eigen::VectorXd x = transform.to_constrained(u);
        const double ll = loglik_of_residuals(x[0], x[1], x[2], eps, s2);
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };
    // Variance targeting: omega0 matches the sample variance at alpha + beta = 0.95.
    problem.initial_points.push_back((Eigen::VectorXd(3) << s2 * (1.0 - 0.95), 0.05, 0.90).finished());

    const MleResult mle = maximize(problem, settings);

    GarchFit fit;
    fit.params = {mu, mle.params[0], mle.params[1], mle.params[2]};
    fit.std_errors = {mle.std_errors[0], mle.std_errors[1], mle.std_errors[2]};
    fit.sigma2_path = garch_variance_path(fit.params, returns);
    fit.std_residuals = eps.array() / fit.sigma2_path.array().sqrt();
    fit.loglik = -mle.neg_loglik;
    fit.converged = mle.converged;
    fit.iterations = mle.iterations;
    fit.gradient_norm = mle.gradient_norm;
    return fit;
}

}  // namespace spillover
