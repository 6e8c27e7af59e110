#include <catch2/catch_amalgamated.hpp>

#include "spillover/diagnostics.hpp"
#include "spillover/simulate.hpp"

#include <cmath>

using namespace spillover;
using Catch::Approx;

namespace {

Eigen::VectorXd standardized(std::uint64_t seed, Eigen::Index n) {
    SimSpec spec;
    spec.T = static_cast<std::size_t>(n);
    spec.seed = seed;
    Eigen::VectorXd x = simulate(spec).values.col(0);
    x.array() -= x.mean();
    return x / std::sqrt(x.squaredNorm() / static_cast<double>(n - 1));
}

Eigen::MatrixXd white_noise(std::uint64_t seed, std::size_t T, std::size_t K) {
    SimSpec spec;
    spec.T = T;
    spec.K = K;
    spec.seed = seed;
    return simulate(spec).values;
}

}  // namespace

TEST_CASE("comparison t statistic", "[diagnostics]") {
    const Eigen::VectorXd z = standardized(1, 100);
    const DccComparison same = dcc_compare(z, z, "x");
    CHECK(same.t_stat == 0.0);
    CHECK_FALSE(same.significant_5pct);

    const Eigen::VectorXd during = z.array() + 1.0;
    const DccComparison up = dcc_compare(z, during, "x");
    CHECK(up.t_stat == Approx(1.0 / std::sqrt(0.02)).epsilon(1e-12));
    CHECK(up.t_stat == Approx(7.0711).margin(1e-4));
    CHECK(up.mean_diff == Approx(1.0));
    CHECK(up.significant_5pct);
    CHECK(up.sd_pre == Approx(1.0));

    const DccComparison down = dcc_compare(during, z, "x");
    CHECK(down.t_stat == Approx(-up.t_stat).epsilon(1e-14));

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(100) + 1e-6 * z;
    const Eigen::VectorXd zeros = 1e-6 * standardized(11, 100);
    const DccComparison jump = dcc_compare(zeros, ones);
    CHECK(jump.t_stat == Approx(1e6 * std::sqrt(50.0)).epsilon(1e-6));

    const Eigen::VectorXd shifted_pre = z.array() + 3.0;
    const Eigen::VectorXd shifted_during = during.array() + 3.0;
    CHECK(dcc_compare(shifted_pre, shifted_during).t_stat == Approx(up.t_stat).epsilon(1e-10));
}

TEST_CASE("comparison reproduces a reported mean difference", "[diagnostics]") {
    const Eigen::VectorXd pre = standardized(2, 900) * 0.03 + Eigen::VectorXd::Constant(900, 0.2617);
    const Eigen::VectorXd during = standardized(3, 300) * 0.05 + Eigen::VectorXd::Constant(300, 0.3713);
    CHECK(dcc_compare(pre, during, "USA-IND").mean_diff == Approx(0.1096).margin(1e-12));
}

TEST_CASE("invalid comparisons", "[diagnostics]") {
    const Eigen::VectorXd flat = Eigen::VectorXd::Constant(60, 0.3);
    CHECK_THROWS_WITH(dcc_compare(flat, flat), Catch::Matchers::ContainsSubstring("zero variance"));
    CHECK_THROWS(dcc_compare(standardized(4, 20), standardized(5, 60)));
}

TEST_CASE("autocovariance", "[diagnostics]") {
    const Eigen::MatrixXd x = white_noise(6, 50, 2);
    const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd C2 = sample_autocovariance(x, 2);
    double s = 0.0;
    for (Eigen::Index t = 2; t < 50; ++t) s += c(t, 0) * c(t - 2, 1);
    CHECK(C2(0, 1) == Approx(s / 50.0).epsilon(1e-12));
    CHECK(sample_autocovariance(x, 0).isApprox(sample_autocovariance(x, 0).transpose()));
    CHECK_THROWS(sample_autocovariance(x, 50));
}

TEST_CASE("univariate portmanteau forms", "[diagnostics]") {
    const Eigen::MatrixXd x = white_noise(7, 400, 1);
    const Eigen::VectorXd c = x.col(0).array() - x.col(0).mean();
    const double T = 400.0;
    const double g0 = c.squaredNorm();
    double hosking = 0.0, li = 0.0;
    for (int j = 1; j <= 10; ++j) {
        const double r = c.tail(400 - j).dot(c.head(400 - j)) / g0;
        hosking += r * r / (T - j);
        li += r * r;
    }
    hosking *= T * T;
    li = T * li + 10.0 * 11.0 / (2.0 * T);
    const TestReport h = hosking_test(x, 10);
    CHECK(h.statistic == Approx(hosking).epsilon(1e-10));
    CHECK(li_mcleod_test(x, 10).statistic == Approx(li).epsilon(1e-10));
    CHECK(h.critical_values.pct5 == Approx(18.307038).epsilon(1e-6));
    REQUIRE(h.p_value.has_value());
    CHECK(*h.p_value > 0.0);
    CHECK(*h.p_value < 1.0);
}

TEST_CASE("multivariate portmanteau", "[diagnostics]") {
    const Eigen::MatrixXd x = white_noise(8, 1000, 3);
    const TestReport h = hosking_test(x, 10);
    const TestReport l = li_mcleod_test(x, 10);
    CHECK(h.critical_values.pct5 == Approx(113.1452).epsilon(1e-5));  // chi^2(90)
    CHECK(std::abs(h.statistic / l.statistic - 1.0) < 0.05);

    // Invariant to an invertible affine map of the residuals.
    Eigen::Matrix3d M;
    M << 2.0, 0.3, -0.1, 0.0, 0.5, 0.2, 1.0, 0.0, 1.5;
    const Eigen::MatrixXd y = (x * M.transpose()).rowwise() + Eigen::RowVector3d(1.0, -2.0, 0.5);
    CHECK(hosking_test(y, 10).statistic == Approx(h.statistic).epsilon(1e-8));
    CHECK(li_mcleod_test(y, 10).statistic == Approx(l.statistic).epsilon(1e-8));

    // Strong autocorrelation is detected.
    Eigen::MatrixXd ar = x;
    for (Eigen::Index t = 1; t < ar.rows(); ++t) ar.row(t) += 0.6 * ar.row(t - 1);
    CHECK(hosking_test(ar, 10).reject_null);
    CHECK(hosking_test(ar, 10).decision == "serial correlation");
}

TEST_CASE("invalid portmanteau inputs", "[diagnostics]") {
    const Eigen::MatrixXd x = white_noise(9, 100, 2);
    CHECK_THROWS(hosking_test(x, 0));
    CHECK_THROWS(li_mcleod_test(x.topRows(8), 10));
    Eigen::MatrixXd collinear = x;
    collinear.col(1) = 2.0 * collinear.col(0);
    CHECK_THROWS_WITH(hosking_test(collinear, 5), Catch::Matchers::ContainsSubstring("singular"));
}
