#include <catch2/catch_amalgamated.hpp>

#include "spillover/dcc.hpp"
#include "spillover/simulate.hpp"

#include <cmath>

using namespace spillover;
using Catch::Approx;

namespace {

Eigen::MatrixXd gaussian_panel(std::uint64_t seed, std::size_t T, std::size_t K, double rho) {
    SimSpec spec;
    spec.model = SimModel::dcc_garch;
    spec.params = parse_sim_params(SimModel::dcc_garch, "dcc_alpha=0,dcc_beta=0,alpha=0,beta=0,omega=1,rho=" + std::to_string(rho), K);
    spec.T = T;
    spec.K = K;
    spec.seed = seed;
    return simulate(spec).values;
}

ReturnMatrix dcc_returns(std::uint64_t seed, std::size_t T, const std::string& extra = "") {
    SimSpec spec;
    spec.model = SimModel::dcc_garch;
    spec.params = parse_sim_params(SimModel::dcc_garch, "dcc_alpha=0.05,dcc_beta=0.90,rho=0.5" + extra, 3);
    spec.T = T;
    spec.K = 3;
    spec.seed = seed;
    spec.names = {"USA", "UK", "IND"};
    return simulate(spec);
}

}  // namespace

TEST_CASE("distribution names", "[dcc]") {
    CHECK(parse_distribution("tdcc") == DccDistribution::student_t);
    CHECK(parse_distribution("gaussian") == DccDistribution::gaussian);
    CHECK(to_string(DccDistribution::student_t) == "t");
    CHECK_THROWS(parse_distribution("laplace"));
}

TEST_CASE("no dynamics keeps R at the sample correlation", "[dcc]") {
    const Eigen::MatrixXd eta = gaussian_panel(1, 200, 3, 0.4);
    const Eigen::MatrixXd Qbar = sample_correlation(eta);
    for (const auto& R : dcc_correlation_path(0.0, 0.0, eta)) CHECK((R - Qbar).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("recursion matches a direct bivariate implementation", "[dcc]") {
    const Eigen::MatrixXd eta = gaussian_panel(2, 100, 2, 0.3);
    const double a = 0.07, b = 0.88;
    // Independent oracle: Pearson correlation, then the scalar Q recursion.
    const Eigen::VectorXd x = eta.col(0).array() - eta.col(0).mean();
    const Eigen::VectorXd y = eta.col(1).array() - eta.col(1).mean();
    const double qbar = x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
    double q11 = 1.0, q22 = 1.0, q12 = qbar;
    const auto path = dcc_correlation_path(a, b, eta);
    for (Eigen::Index t = 0; t < eta.rows(); ++t) {
        if (t > 0) {
            const double e1 = eta(t - 1, 0), e2 = eta(t - 1, 1);
            q11 = (1 - a - b) + a * e1 * e1 + b * q11;
            q22 = (1 - a - b) + a * e2 * e2 + b * q22;
            q12 = (1 - a - b) * qbar + a * e1 * e2 + b * q12;
        }
        CHECK(path[static_cast<std::size_t>(t)](0, 1) == Approx(q12 / std::sqrt(q11 * q22)).epsilon(1e-12));
    }
}

TEST_CASE("correlation matrices are valid", "[dcc][property]") {
    const Eigen::MatrixXd eta = gaussian_panel(3, 300, 4, 0.6);
    for (const auto& R : dcc_correlation_path(0.1, 0.85, eta)) {
        CHECK(R.diagonal().isOnes(1e-15));
        CHECK(R.isApprox(R.transpose()));
        CHECK(R.cwiseAbs().maxCoeff() <= 1.0);
        CHECK(Eigen::LLT<Eigen::MatrixXd>(R).info() == Eigen::Success);
    }
}

TEST_CASE("independent residuals average to zero correlation", "[dcc]") {
    // Per seed the average tracks the sample correlation, whose sd is 1/sqrt(2000).
    double grand = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Eigen::MatrixXd eta = gaussian_panel(100 + seed, 2000, 2, 0.0);
        double sum = 0.0;
        for (const auto& R : dcc_correlation_path(0.05, 0.90, eta)) sum += R(0, 1);
        CHECK(std::abs(sum / 2000.0) < 4.0 / std::sqrt(2000.0));
        CHECK(sum / 2000.0 == Approx(sample_correlation(eta)(0, 1)).margin(0.005));
        grand += sum / 2000.0 / 20.0;
    }
    CHECK(std::abs(grand) < 0.05);
}

TEST_CASE("perfectly correlated residuals", "[dcc]") {
    Eigen::MatrixXd eta(100, 2);
    eta.col(0) = gaussian_panel(4, 100, 2, 0.0).col(0);
    eta.col(1) = eta.col(0);
    for (const auto& R : dcc_correlation_path(0.05, 0.9, eta)) CHECK(R(0, 1) == Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(dcc_loglik(0.05, 0.9, eta), std::domain_error);
}

TEST_CASE("Gaussian likelihood matches a direct sum", "[dcc]") {
    const Eigen::MatrixXd eta = gaussian_panel(5, 150, 3, 0.2);
    const auto path = dcc_correlation_path(0.04, 0.9, eta);
    double ll = 0.0;
    for (Eigen::Index t = 0; t < eta.rows(); ++t) {
        const Eigen::MatrixXd& R = path[static_cast<std::size_t>(t)];
        const Eigen::VectorXd e = eta.row(t).transpose();
        ll += -0.5 * (3.0 * std::log(2.0 * M_PI) + std::log(R.determinant()) + e.dot(R.inverse() * e));
    }
    CHECK(dcc_loglik(0.04, 0.9, eta) == Approx(ll).epsilon(1e-12));
}

TEST_CASE("uncorrelated residuals without dynamics give the independent Gaussian term", "[dcc]") {
    Eigen::MatrixXd eta = gaussian_panel(8, 300, 2, 0.0);
    eta.rowwise() -= eta.colwise().mean();
    eta.col(1) -= eta.col(1).dot(eta.col(0)) / eta.col(0).squaredNorm() * eta.col(0);
    REQUIRE(std::abs(sample_correlation(eta)(0, 1)) < 1e-14);
    const double expected = -0.5 * (300.0 * 2.0 * std::log(2.0 * M_PI) + eta.squaredNorm());
    CHECK(dcc_loglik(0.0, 0.0, eta) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("likelihood prefers the generating dynamics", "[dcc]") {
    SimSpec spec;
    spec.model = SimModel::dcc_garch;
    spec.params = parse_sim_params(SimModel::dcc_garch, "omega=1,alpha=0,beta=0,dcc_alpha=0.05,dcc_beta=0.9,rho=0.5", 2);
    spec.T = 2000;
    spec.K = 2;
    spec.seed = 12;
    const Eigen::MatrixXd eta = simulate(spec).values;
    CHECK(dcc_loglik(0.05, 0.9, eta) > dcc_loglik(0.0, 0.0, eta));
}

TEST_CASE("t likelihood tends to the Gaussian one", "[dcc]") {
    const Eigen::MatrixXd eta = gaussian_panel(6, 200, 2, 0.5);
    const double g = dcc_loglik(0.03, 0.9, eta);
    CHECK(std::abs(tdcc_loglik(0.03, 0.9, 1e7, eta) - g) < 1e-3);
    CHECK(std::abs(tdcc_loglik(0.03, 0.9, 1e6, eta) / g - 1.0) < 1e-3);
    CHECK(std::abs(tdcc_loglik(0.03, 0.9, 1e3, eta) - g) > std::abs(tdcc_loglik(0.03, 0.9, 1e5, eta) - g));
    CHECK_THROWS(tdcc_loglik(0.03, 0.9, 2.0, eta));
}

TEST_CASE("invalid DCC parameters", "[dcc]") {
    const Eigen::MatrixXd eta = gaussian_panel(7, 50, 2, 0.1);
    CHECK_THROWS(dcc_correlation_path(0.5, 0.5, eta));
    CHECK_THROWS(dcc_correlation_path(-0.1, 0.5, eta));
    CHECK_THROWS(dcc_loglik(0.1, 0.8, eta.leftCols(1)));
}

TEST_CASE("two-step fit", "[dcc][slow]") {
    const ReturnMatrix r = dcc_returns(99, 2000);
    const DccFit fit = fit_dcc(r, DccDistribution::gaussian);
    REQUIRE(fit.converged);
    CHECK(fit.params.alpha + fit.params.beta < 1.0);
    CHECK(std::abs(fit.params.alpha - 0.05) < 4.0 * fit.std_errors.alpha);
    CHECK(std::abs(fit.params.beta - 0.90) < 4.0 * fit.std_errors.beta);
    REQUIRE(fit.R_path.size() == 2000);
    REQUIRE(fit.H_path.size() == 2000);
    CHECK(fit.dates == r.dates);
    CHECK(fit.loglik_stage2 == Approx(dcc_loglik(fit.params.alpha, fit.params.beta, fit.std_residuals)).epsilon(1e-10));

    // H_t = D_t R_t D_t with D_t the stage-1 standard deviations.
    for (std::size_t t : {std::size_t{0}, std::size_t{777}, std::size_t{1999}}) {
        const auto ti = static_cast<Eigen::Index>(t);
        for (Eigen::Index i = 0; i < 3; ++i) {
            for (Eigen::Index j = 0; j < 3; ++j) {
                const double di = std::sqrt(fit.stage1[static_cast<std::size_t>(i)].sigma2_path[ti]);
                const double dj = std::sqrt(fit.stage1[static_cast<std::size_t>(j)].sigma2_path[ti]);
                CHECK(fit.H_path[t](i, j) == Approx(di * dj * fit.R_path[t](i, j)).epsilon(1e-12));
            }
        }
    }

    const CorrelationSeries a = extract_pair(fit, 0, 2);
    const CorrelationSeries b = extract_pair(fit, 2, 0);
    CHECK(a.market_i == "USA");
    CHECK(a.market_j == "IND");
    CHECK((a.rho - b.rho).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.rho.cwiseAbs().maxCoeff() <= 1.0);
    CHECK_THROWS(extract_pair(fit, 1, 1));
    CHECK_THROWS(extract_pair(fit, 0, 3));

}

TEST_CASE("t fit on heavy-tailed data", "[dcc][slow]") {
    const ReturnMatrix r = dcc_returns(41, 2000, ",nu=6");
    const DccFit g = fit_dcc(r, DccDistribution::gaussian);
    const DccFit t = fit_dcc(r, DccDistribution::student_t);
    REQUIRE(t.converged);
    REQUIRE(t.params.nu.has_value());
    REQUIRE(t.std_errors.nu.has_value());
    CHECK(*t.params.nu > 2.1);
    CHECK(*t.params.nu < 20.0);
    CHECK(t.loglik_stage2 > g.loglik_stage2);
    CHECK(t.loglik_stage2 == Approx(tdcc_loglik(t.params.alpha, t.params.beta, *t.params.nu, t.std_residuals)).epsilon(1e-10));
}

TEST_CASE("degenerate DCC input names the market", "[dcc]") {
    ReturnMatrix r = dcc_returns(5, 400);
    r.values.col(1).setConstant(0.001);
    CHECK_THROWS_WITH(fit_dcc(r, DccDistribution::gaussian), Catch::Matchers::ContainsSubstring("UK"));
    CHECK_THROWS(fit_dcc(dcc_returns(5, 100), DccDistribution::gaussian));
}
