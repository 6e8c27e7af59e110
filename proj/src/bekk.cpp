#include "spillover/bekk.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spillover {

namespace {

constexpr double kLog2Pi = 1.83787706640934548356;
constexpr double kStationarityMargin = 1e-6;
constexpr Eigen::Index kMinFitLength = 250;

void check_returns(const Eigen::MatrixXd& returns) {
    if (returns.cols() != 2) throw std::invalid_argument("BEKK needs exactly two return columns");
    if (returns.rows() < 2) throw std::invalid_argument("BEKK needs at least two observations");
    if (!returns.allFinite()) throw std::invalid_argument("returns contain non-finite values");
}

// -inf for a singular or non-finite covariance.
double loglik_of_residuals(const BekkParams& p, const Eigen::MatrixX2d& eps, const Eigen::Matrix2d& H1) {
    const Eigen::Matrix2d CC = p.C.transpose() * p.C;
    const Eigen::Matrix2d At = p.A.transpose();
    const Eigen::Matrix2d Gt = p.G.transpose();
    Eigen::Matrix2d H = H1;
    double ll = 0.0;
    for (Eigen::Index t = 0; t < eps.rows(); ++t) {
        if (t > 0) {
            const Eigen::Vector2d v = At * eps.row(t - 1).transpose();
            H = CC + v * v.transpose() + Gt * H * p.G;
        }
        const double det = H(0, 0) * H(1, 1) - H(0, 1) * H(1, 0);
        if (!(det > 0.0) || !(H(0, 0) > 0.0) || !std::isfinite(det)) return -std::numeric_limits<double>::infinity();
        const double e1 = eps(t, 0);
        const double e2 = eps(t, 1);
        const double quad = (H(1, 1) * e1 * e1 - 2.0 * H(0, 1) * e1 * e2 + H(0, 0) * e2 * e2) / det;
        ll -= kLog2Pi + 0.5 * std::log(det) + 0.5 * quad;
    }
    return ll;
}

Eigen::MatrixX2d demean(const Eigen::MatrixXd& returns, const Eigen::Vector2d& mu) {
    Eigen::MatrixX2d eps = returns;
    eps.rowwise() -= mu.transpose();
    return eps;
}

// Lower-triangular L with L'L = M (M symmetric positive definite).
Eigen::Matrix2d reverse_cholesky(const Eigen::Matrix2d& M) {
    Eigen::Matrix2d L = Eigen::Matrix2d::Zero();
    L(1, 1) = std::sqrt(M(1, 1));
    L(1, 0) = M(0, 1) / L(1, 1);
    L(0, 0) = std::sqrt(M(0, 0) - L(1, 0) * L(1, 0));
    return L;
}

}  // namespace

std::array<double, BekkParams::kFreeParameters> BekkParams::to_array() const {
    return {C(0, 0), C(1, 0), C(1, 1), A(0, 0), A(1, 0), A(0, 1), A(1, 1), G(0, 0), G(1, 0), G(0, 1), G(1, 1)};
}

BekkParams BekkParams::from_array(const std::array<double, kFreeParameters>& v, Eigen::Vector2d mu) {
    BekkParams p;
    p.C << v[0], 0.0, v[1], v[2];
    p.A << v[3], v[5], v[4], v[6];
    p.G << v[7], v[9], v[8], v[10];
    p.mu = mu;
    return p;
}

const std::array<const char*, BekkParams::kFreeParameters>& BekkParams::names() {
    static const std::array<const char*, kFreeParameters> n{"c11", "c12", "c22", "a11", "a21", "a12",
                                                            "a22", "g11", "g21", "g12", "g22"};
    return n;
}

double bekk_spectral_radius(const Eigen::Matrix2d& A, const Eigen::Matrix2d& G) {
    Eigen::Matrix4d K;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            K.block<2, 2>(2 * i, 2 * j) = A(i, j) * A + G(i, j) * G;
        }
    }
    if (!K.allFinite()) return std::numeric_limits<double>::infinity();
    Eigen::EigenSolver<Eigen::Matrix4d> solver(K, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::Matrix2d sample_covariance(const Eigen::MatrixX2d& residuals) {
    return residuals.transpose() * residuals / static_cast<double>(residuals.rows());
}

std::vector<Eigen::Matrix2d> bekk_covariance_path(const BekkParams& params, const Eigen::MatrixXd& returns) {
    check_returns(returns);
    if (params.C(0, 1) != 0.0) throw std::invalid_argument("C must be lower triangular");

    const Eigen::MatrixX2d eps = demean(returns, params.mu);
    const Eigen::Matrix2d CC = params.C.transpose() * params.C;
    std::vector<Eigen::Matrix2d> path;
    path.reserve(static_cast<std::size_t>(eps.rows()));
    path.push_back(sample_covariance(eps));
    for (Eigen::Index t = 1; t < eps.rows(); ++t) {
        const Eigen::Vector2d v = params.A.transpose() * eps.row(t - 1).transpose();
        Eigen::Matrix2d H = CC + v * v.transpose() + params.G.transpose() * path.back() * params.G;
        H(1, 0) = H(0, 1) = 0.5 * (H(0, 1) + H(1, 0));
        if (!H.allFinite()) throw std::domain_error("non-finite BEKK covariance (explosive parameters)");
        path.push_back(H);
    }
    return path;
}

double bekk_loglik(const BekkParams& params, const Eigen::MatrixXd& returns) {
    check_returns(returns);
    const Eigen::MatrixX2d eps = demean(returns, params.mu);
    const double ll = loglik_of_residuals(params, eps, sample_covariance(eps));
    if (!std::isfinite(ll)) throw std::domain_error("singular or non-finite BEKK covariance");
    return ll;
}

BekkFit fit_bekk(const Eigen::MatrixXd& returns, const MleSettings& settings) {
    check_returns(returns);
    if (returns.rows() < kMinFitLength) throw std::invalid_argument("BEKK fit needs at least 250 observations");
    for (Eigen::Index k = 0; k < 2; ++k) {
        if ((returns.col(k).array() == returns(0, k)).all()) throw std::invalid_argument("degenerate input: constant column");
    }

    const Eigen::Vector2d mu = returns.colwise().mean().transpose();
    const Eigen::Matrix2d S_raw = sample_covariance(demean(returns, mu));
    if (!(S_raw.determinant() > 0.0)) throw std::invalid_argument("degenerate input: singular sample covariance");

    // The search runs on returns divided by a common scale; C scales with it
    // while A and G are unchanged.
    const double scale = std::sqrt(0.5 * S_raw.trace());
    const Eigen::MatrixX2d eps = demean(returns, mu) / scale;
    const Eigen::Matrix2d S = S_raw / (scale * scale);

    auto unpack = [mu](const Eigen::VectorXd& x) {
        std::array<double, BekkParams::kFreeParameters> v{};
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = x[static_cast<Eigen::Index>(i)];
        return BekkParams::from_array(v, mu);
    };

    MleProblem problem;
    problem.transform.positive().free().positive().free(8);
    problem.observations = static_cast<double>(eps.rows());
    problem.objective = [&, transform = problem.transform](const Eigen::VectorXd& u) {
        const BekkParams p = unpack(transform.to_constrained(u));
        if (!(bekk_spectral_radius(p.A, p.G) < 1.0 - kStationarityMargin)) {
            return std::numeric_limits<double>::infinity();
        }
        const double ll = loglik_of_residuals(p, eps, S);
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };

    // Variance-targeting start: scalar loadings with ARCH 0.05 and GARCH 0.90
    // in variance units, and C'C matching S at that persistence.
    BekkParams start;
    start.C = reverse_cholesky(S * (1.0 - 0.95));
    start.A = Eigen::Matrix2d::Identity() * std::sqrt(0.05);
    start.G = Eigen::Matrix2d::Identity() * std::sqrt(0.90);
    const auto a = start.to_array();
    problem.initial_points.push_back(Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size())));

    const MleResult mle = maximize(problem, settings);

    BekkFit fit;
    fit.params = unpack(mle.params);
    fit.params.C *= scale;
    // (A, G) and (-A, -G) are observationally equivalent.
    if (fit.params.A(0, 0) < 0.0) fit.params.A = -fit.params.A;
    if (fit.params.G(0, 0) < 0.0) fit.params.G = -fit.params.G;

    std::array<double, BekkParams::kFreeParameters> se{};
    for (std::size_t i = 0; i < se.size(); ++i) se[i] = mle.std_errors[static_cast<Eigen::Index>(i)];
    fit.std_errors = BekkParams::from_array(se, {0.0, 0.0});
    fit.std_errors.C *= scale;
    const auto est = fit.params.to_array();
    const auto se_scaled = fit.std_errors.to_array();
    for (std::size_t i = 0; i < se.size(); ++i) {
        fit.stars[i] = (se_scaled[i] > 0.0 && std::isfinite(se_scaled[i])) ? significance_stars(est[i], se_scaled[i]) : "";
    }
    fit.H_path = bekk_covariance_path(fit.params, returns);
    fit.loglik = bekk_loglik(fit.params, returns);
    fit.converged = mle.converged;
    fit.iterations = mle.iterations;
    fit.gradient_norm = mle.gradient_norm;
    return fit;
}

std::string to_string(SpilloverDirection direction, const std::string& market_i, const std::string& market_j) {
    switch (direction) {
        case SpilloverDirection::bidirectional:
            return "bidirectional";
        case SpilloverDirection::i_to_j:
            return market_i + "->" + market_j;
        case SpilloverDirection::j_to_i:
            return market_j + "->" + market_i;
        case SpilloverDirection::none:
            break;
    }
    return "none";
}

SpilloverSummary spillover_summary(const BekkFit& fit, std::string market_i, std::string market_j) {
    if (!fit.converged) throw std::invalid_argument("spillover summary needs a converged BEKK fit");

    SpilloverSummary s;
    s.market_i = std::move(market_i);
    s.market_j = std::move(market_j);
    s.g21 = fit.params.G(1, 0);
    s.se_g21 = fit.std_errors.G(1, 0);
    s.g12 = fit.params.G(0, 1);
    s.se_g12 = fit.std_errors.G(0, 1);
    s.stars_g21 = fit.stars[8];
    s.stars_g12 = fit.stars[9];

    const bool i_to_j = significant_at_5pct(s.g12, s.se_g12);
    const bool j_to_i = significant_at_5pct(s.g21, s.se_g21);
    if (i_to_j && j_to_i) {
        s.direction = SpilloverDirection::bidirectional;
    } else if (i_to_j) {
        s.direction = SpilloverDirection::i_to_j;
    } else if (j_to_i) {
        s.direction = SpilloverDirection::j_to_i;
    }
    s.magnitude_pct_i_to_j = i_to_j ? 100.0 * std::abs(s.g12) : 0.0;
    s.magnitude_pct_j_to_i = j_to_i ? 100.0 * std::abs(s.g21) : 0.0;
    return s;
}

}  // namespace spillover
