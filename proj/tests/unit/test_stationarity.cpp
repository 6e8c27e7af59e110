#include <catch2/catch_amalgamated.hpp>

#include "spillover/simulate.hpp"
#include "spillover/stationarity.hpp"

#include <cmath>

using namespace spillover;

namespace {

Eigen::VectorXd draw(SimModel model, SimParams params, std::uint64_t seed, std::size_t T = 1000) {
    SimSpec spec;
    spec.model = model;
    spec.params = std::move(params);
    spec.T = T;
    spec.seed = seed;
    return simulate(spec).values.col(0);
}

Eigen::VectorXd white_noise(std::uint64_t seed, std::size_t T = 1000) {
    return draw(SimModel::iid_gaussian, NoiseParams{0.0, 1.0}, seed, T);
}

Eigen::VectorXd random_walk(std::uint64_t seed, std::size_t T = 1000) {
    return draw(SimModel::random_walk, NoiseParams{0.0, 1.0}, seed, T);
}

// Independent OLS via normal equations for the Dickey-Fuller t-ratio.
double df_t_ratio(const Eigen::VectorXd& y, int p) {
    const Eigen::Index n = y.size() - 1 - p;
    Eigen::MatrixXd X(n, 2 + p);
    Eigen::VectorXd dy(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const Eigen::Index t = r + p + 1;
        dy[r] = y[t] - y[t - 1];
        X(r, 0) = 1.0;
        X(r, 1) = y[t - 1];
        for (int j = 1; j <= p; ++j) X(r, 1 + j) = y[t - j] - y[t - j - 1];
    }
    const Eigen::MatrixXd XtX = X.transpose() * X;
    const Eigen::VectorXd b = XtX.ldlt().solve(X.transpose() * dy);
    const Eigen::VectorXd e = dy - X * b;
    const double s2 = e.squaredNorm() / static_cast<double>(n - 2 - p);
    return b[1] / std::sqrt(s2 * XtX.inverse()(1, 1));
}

}  // namespace

TEST_CASE("automatic lag rules", "[stationarity]") {
    CHECK(schwert_max_lag(100) == 12);
    CHECK(schwert_max_lag(1000) == 21);
    CHECK(schwert_max_lag(1832) == 24);
    CHECK(newey_west_bandwidth(100) == 4);
    CHECK(newey_west_bandwidth(1000) == 6);
    CHECK(newey_west_bandwidth(1832) == 7);
}

TEST_CASE("Bartlett long-run variance", "[stationarity]") {
    const Eigen::VectorXd u = (Eigen::VectorXd(6) << 1, -1, 2, 0, -2, 1).finished();
    // gamma0 = 11/6, gamma1 = (-1 - 2 + 0 + 0 - 2) / 6 = -5/6, weight 1 - 1/2
    CHECK(bartlett_long_run_variance(u, 0) == Catch::Approx(11.0 / 6.0));
    CHECK(bartlett_long_run_variance(u, 1) == Catch::Approx(11.0 / 6.0 - 5.0 / 6.0));
}

TEST_CASE("ADF statistic matches an independent regression", "[stationarity]") {
    const Eigen::VectorXd y = draw(SimModel::ar1, Ar1Params{0.0, 0.8, 1.0}, 3, 400);
    for (int p : {0, 2, 5}) {
        const TestReport r = adf_test(y, p);
        CHECK(r.lags_used == p);
        CHECK(r.statistic == Catch::Approx(df_t_ratio(y, p)).epsilon(1e-9));
    }
    const TestReport automatic = adf_test(y);
    CHECK(automatic.lags_used >= 0);
    CHECK(automatic.lags_used <= schwert_max_lag(400));
    CHECK(automatic.test_name == "ADF");
}

TEST_CASE("PP equals the DF t-ratio when the long-run variance is the short-run one", "[stationarity]") {
    const Eigen::VectorXd y = random_walk(8, 500);
    CHECK(pp_test(y, 0).statistic == Catch::Approx(df_t_ratio(y, 0)).epsilon(1e-10));
}

TEST_CASE("KPSS statistic from partial sums", "[stationarity]") {
    const Eigen::VectorXd y = white_noise(4, 200);
    const Eigen::VectorXd e = y.array() - y.mean();
    double s = 0.0, num = 0.0;
    for (Eigen::Index t = 0; t < e.size(); ++t) {
        s += e[t];
        num += s * s;
    }
    const double expected = num / (200.0 * 200.0 * (e.squaredNorm() / 200.0));
    CHECK(kpss_test(y, 0).statistic == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("critical values and decisions", "[stationarity]") {
    const Eigen::VectorXd wn = white_noise(11);
    const TestReport adf = adf_test(wn);
    CHECK(adf.critical_values.pct1 == -3.43);
    CHECK(adf.critical_values.pct5 == -2.86);
    CHECK(adf.critical_values.pct10 == -2.57);
    const TestReport kpss = kpss_test(wn);
    CHECK(kpss.critical_values.pct1 == 0.739);
    CHECK(kpss.critical_values.pct5 == 0.463);
    CHECK(kpss.critical_values.pct10 == 0.347);

    for (std::uint64_t seed = 20; seed < 40; ++seed) {
        for (const Eigen::VectorXd& y : {white_noise(seed, 300), random_walk(seed, 300)}) {
            for (const TestReport& r : {adf_test(y), pp_test(y)}) {
                CHECK(r.reject_null == (r.statistic < r.critical_values.pct5));
                CHECK(r.decision == (r.reject_null ? "stationary" : "non-stationary"));
            }
            const TestReport k = kpss_test(y);
            CHECK(k.reject_null == (k.statistic > k.critical_values.pct5));
            CHECK(k.decision == (k.reject_null ? "non-stationary" : "stationary"));
        }
    }
}

TEST_CASE("white noise is strongly stationary under PP", "[stationarity][montecarlo]") {
    int rejections = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const TestReport r = pp_test(white_noise(100 + seed));
        rejections += r.reject_null;
        CHECK(r.statistic < -15.0);
    }
    CHECK(rejections >= 95);
}

TEST_CASE("statistics are scale and location invariant", "[stationarity][property]") {
    const Eigen::VectorXd y = draw(SimModel::ar1, Ar1Params{0.3, 0.6, 1.0}, 17, 600);
    const Eigen::VectorXd scaled = 37.5 * y;
    const Eigen::VectorXd shifted = y.array() + 12.0;
    for (auto test : {adf_test, pp_test, kpss_test}) {
        const double base = test(y, std::nullopt).statistic;
        CHECK(std::abs(test(scaled, std::nullopt).statistic - base) < 1e-8);
        CHECK(std::abs(test(shifted, std::nullopt).statistic - base) < 1e-8);
    }
}

TEST_CASE("invalid inputs", "[stationarity]") {
    CHECK_THROWS_WITH(adf_test(Eigen::VectorXd::Ones(8), 0), Catch::Matchers::ContainsSubstring("too short"));
    CHECK_THROWS_WITH(adf_test(Eigen::VectorXd::Constant(200, 3.0)), Catch::Matchers::ContainsSubstring("singular"));
    CHECK_THROWS(pp_test(Eigen::VectorXd::Constant(200, 3.0)));
    CHECK_THROWS(kpss_test(Eigen::VectorXd::Constant(200, 3.0)));
    Eigen::VectorXd bad = white_noise(1, 100);
    bad[5] = std::nan("");
    CHECK_THROWS(kpss_test(bad));
    CHECK_THROWS(adf_test(white_noise(1, 100), -1));
}
