#include <catch2/catch_amalgamated.hpp>

#include "spillover/optimizer.hpp"

#include <cmath>
#include <limits>

using namespace spillover;
using Catch::Approx;

namespace {

MleProblem free_problem(std::size_t n, Objective f, Eigen::VectorXd start) {
    MleProblem p;
    p.transform.free(n);
    p.objective = std::move(f);
    p.initial_points.push_back(std::move(start));
    return p;
}

}  // namespace

TEST_CASE("one-dimensional quadratic", "[optimizer]") {
    const auto p = free_problem(1, [](const Eigen::VectorXd& x) { return (x[0] - 2.0) * (x[0] - 2.0); }, Eigen::VectorXd::Zero(1));
    const MleResult r = maximize(p);
    CHECK(r.converged);
    CHECK(r.params[0] == Approx(2.0).margin(1e-6));
    CHECK(r.gradient_norm < 1e-7);
    CHECK(r.neg_loglik < 1e-10);
}

TEST_CASE("Rosenbrock valley", "[optimizer]") {
    const auto rosen = [](const Eigen::VectorXd& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    MleSettings s;
    s.restarts = 0;
    const MleResult r = maximize(free_problem(2, rosen, Eigen::Vector2d(-1.2, 1.0)), s);
    CHECK(r.params[0] == Approx(1.0).margin(1e-4));
    CHECK(r.params[1] == Approx(1.0).margin(1e-4));
}

TEST_CASE("non-finite objectives", "[optimizer]") {
    const auto inf = [](const Eigen::VectorXd&) { return std::numeric_limits<double>::infinity(); };
    CHECK_THROWS_WITH(maximize(free_problem(2, inf, Eigen::Vector2d(0.0, 0.0))),
                      Catch::Matchers::ContainsSubstring("non-finite objective"));
    MleProblem empty;
    empty.transform.free();
    empty.objective = inf;
    CHECK_THROWS(maximize(empty));
}

TEST_CASE("iteration cap is reported, not hidden", "[optimizer]") {
    const auto rosen = [](const Eigen::VectorXd& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    MleSettings s;
    s.max_iterations = 2;
    s.restarts = 0;
    const MleResult r = maximize(free_problem(2, rosen, Eigen::Vector2d(-1.2, 1.0)), s);
    CHECK_FALSE(r.converged);
    CHECK(std::isfinite(r.neg_loglik));
}

TEST_CASE("result never worse than the best start", "[optimizer][property]") {
    const auto bumpy = [](const Eigen::VectorXd& x) { return std::sin(3.0 * x[0]) + 0.1 * x[0] * x[0] + std::cos(2.0 * x[1]) + 0.05 * x[1] * x[1]; };
    for (double a : {-3.0, -1.0, 0.5, 2.5}) {
        const Eigen::Vector2d start(a, -a);
        const MleResult r = maximize(free_problem(2, bumpy, start));
        CHECK(r.neg_loglik <= bumpy(start));
    }
}

TEST_CASE("restarts are reproducible for a fixed seed", "[optimizer]") {
    const auto bumpy = [](const Eigen::VectorXd& x) { return std::sin(3.0 * x[0]) + 0.1 * x[0] * x[0]; };
    const auto p = free_problem(1, bumpy, Eigen::VectorXd::Constant(1, 2.0));
    const MleResult a = maximize(p);
    const MleResult b = maximize(p);
    CHECK(a.params[0] == b.params[0]);
    CHECK(a.neg_loglik == b.neg_loglik);
}

TEST_CASE("finite differences", "[optimizer]") {
    const Objective sq = [](const Eigen::VectorXd& x) { return x[0] * x[0]; };
    CHECK(numerical_gradient(sq, Eigen::VectorXd::Constant(1, 3.0), 1e-5)[0] == Approx(6.0).margin(1e-6));

    const Objective prod = [](const Eigen::VectorXd& x) { return x[0] * x[1]; };
    const Eigen::Vector2d at(2.0, 5.0);
    const Eigen::VectorXd g = numerical_gradient(prod, at, 1e-5);
    CHECK(g[0] == Approx(5.0).margin(1e-6));
    CHECK(g[1] == Approx(2.0).margin(1e-6));
    const Eigen::MatrixXd H = numerical_hessian(prod, at, 1e-4);
    CHECK(H(0, 1) == Approx(1.0).margin(1e-4));
    CHECK(H(1, 0) == Approx(1.0).margin(1e-4));

    const Objective flat = [](const Eigen::VectorXd&) { return 4.2; };
    CHECK(numerical_gradient(flat, at, 1e-5).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(numerical_hessian(flat, at, 1e-4).cwiseAbs().maxCoeff() <= 1e-8);

    const Objective cubic = [](const Eigen::VectorXd& x) { return x[0] * x[0] * x[0] - 2.0 * x[0] * x[1] * x[1] + x[1]; };
    const Eigen::Vector2d p(1.5, -0.7);
    const Eigen::VectorXd gc = numerical_gradient(cubic, p, 1e-6);
    CHECK(gc[0] == Approx(3.0 * 1.5 * 1.5 - 2.0 * 0.49).epsilon(1e-6));
    CHECK(gc[1] == Approx(-4.0 * 1.5 * -0.7 + 1.0).epsilon(1e-6));

    const Objective hole = [](const Eigen::VectorXd& x) { return x[0] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0; };
    CHECK_THROWS_AS(numerical_gradient(hole, Eigen::VectorXd::Zero(1), 1e-5), std::domain_error);
}

TEST_CASE("parameter transforms", "[optimizer]") {
    ParameterTransform t;
    t.free(2).positive().bounded(2.1, 200.0).simplex(2);
    REQUIRE(t.dimension() == 6);
    Eigen::VectorXd x(6);
    x << -0.3, 4.0, 0.002, 7.5, 0.04, 0.93;
    const Eigen::VectorXd u = t.to_unconstrained(x);
    CHECK((t.to_constrained(u) - x).cwiseAbs().maxCoeff() < 1e-10);

    // Analytic Jacobian against central differences of the map.
    const Eigen::MatrixXd J = t.jacobian(u);
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        Eigen::VectorXd up = u, dn = u;
        up[j] += 1e-6;
        dn[j] -= 1e-6;
        const Eigen::VectorXd col = (t.to_constrained(up) - t.to_constrained(dn)) / 2e-6;
        CHECK((col - J.col(j)).cwiseAbs().maxCoeff() < 1e-6);
    }

    // Constraints hold exactly even for extreme unconstrained values.
    Eigen::VectorXd wild(6);
    wild << 1e3, -1e3, -800.0, 900.0, 750.0, 760.0;
    const Eigen::VectorXd y = t.to_constrained(wild);
    CHECK(y[2] >= 0.0);
    CHECK(y[3] >= 2.1);
    CHECK(y[3] <= 200.0);
    CHECK(y[4] + y[5] <= 1.0);
    CHECK(y.allFinite());

    Eigen::VectorXd outside = x;
    outside[4] = 0.5;
    outside[5] = 0.6;
    CHECK_THROWS(t.to_unconstrained(outside));
    outside = x;
    outside[2] = -1.0;
    CHECK_THROWS(t.to_unconstrained(outside));
}

TEST_CASE("standard errors follow the delta method", "[optimizer]") {
    // Gaussian variance with known mean: NLL(v) = n/2 ln v + S/(2v), v = exp(u).
    const double n = 400.0;
    const double S = 913.0;
    MleProblem p;
    p.transform.positive();
    p.observations = n;
    p.objective = [&](const Eigen::VectorXd& u) {
        const double v = std::exp(u[0]);
        return 0.5 * n * std::log(v) + S / (2.0 * v);
    };
    p.initial_points.push_back(Eigen::VectorXd::Constant(1, 1.0));
    const MleResult r = maximize(p);
    const double v_hat = S / n;
    CHECK(r.converged);
    CHECK(r.params[0] == Approx(v_hat).epsilon(1e-7));
    CHECK(r.std_errors[0] == Approx(v_hat * std::sqrt(2.0 / n)).epsilon(1e-4));
}

TEST_CASE("significance stars", "[optimizer]") {
    CHECK(significance_stars(0.803250, 0.0707) == "***");
    CHECK(significance_stars(0.0, 0.3).empty());
    CHECK(significance_stars(0.10, 0.05) == "*");
    CHECK(significance_stars(-0.27, 0.1) == "**");
    CHECK(significance_stars(0.17, 0.1) == ".");
    CHECK(significance_stars(0.16, 0.1).empty());
    CHECK(significant_at_5pct(0.196, 0.1));
    CHECK_FALSE(significant_at_5pct(0.038314383, 0.037));
    CHECK_THROWS(significance_stars(1.0, 0.0));
    CHECK_THROWS(significance_stars(1.0, -0.1));
}
