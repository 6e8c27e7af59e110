#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace spillover {

/**
 * Bijection between an unconstrained search space and the constrained
 * parameter space of a likelihood. Built from consecutive blocks:
 *
 *   free(n)            x = u
 *   positive(n)        x = exp(u)
 *   bounded(lo, hi)    x = lo + (hi - lo) * logistic(u)
 *   simplex(n, total)  x_i = total * exp(u_i) / (1 + sum_j exp(u_j))
 *
 * The simplex block maps onto {x_i > 0, sum x_i < total}, which is how
 * GARCH/DCC persistence constraints such as alpha + beta < 1 are enforced.
 */
class ParameterTransform {
public:
    ParameterTransform& free(std::size_t n = 1);
    ParameterTransform& positive(std::size_t n = 1);
    ParameterTransform& bounded(double lo, double hi);
    ParameterTransform& simplex(std::size_t n, double total = 1.0);

    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }

    [[nodiscard]] Eigen::VectorXd to_constrained(const Eigen::VectorXd& u) const;
    /// Throws std::invalid_argument when x lies outside the constrained set.
    [[nodiscard]] Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& x) const;
    /// d(constrained) / d(unconstrained), evaluated at u.
    [[nodiscard]] Eigen::MatrixXd jacobian(const Eigen::VectorXd& u) const;

private:
    enum class Kind { free, positive, bounded, simplex };
    struct Block {
        Kind kind;
        std::size_t offset;
        std::size_t size;
        double lo;
        double hi;
    };
    ParameterTransform& push(Kind kind, std::size_t n, double lo, double hi);

    std::vector<Block> blocks_;
    std::size_t dimension_ = 0;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct MleProblem {
    /// Negative log-likelihood as a function of the unconstrained vector.
    /// May return +inf (or NaN) to reject a point.
    Objective objective;
    ParameterTransform transform;
    /// Starting vectors in constrained space.
    std::vector<Eigen::VectorXd> initial_points;
    /// Number of observations behind the objective. The search and its
    /// gradient tolerance operate on objective / observations.
    double observations = 1.0;
};

struct MleSettings {
    double tolerance = 1e-7;
    int max_iterations = 2000;
    int restarts = 5;
    std::uint64_t seed = 20210630;
};

struct MleResult {
    Eigen::VectorXd params;       ///< constrained space
    Eigen::VectorXd std_errors;   ///< delta-method, NaN where the Hessian is not invertible
    Eigen::MatrixXd covariance;   ///< constrained space
    Eigen::VectorXd unconstrained;
    double neg_loglik = 0.0;
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;   ///< of objective / observations, unconstrained space
};

MleResult maximize(const MleProblem& problem, const MleSettings& settings = {});

/// Central-difference gradient. Throws if any stencil point is non-finite.
Eigen::VectorXd numerical_gradient(const Objective& f, const Eigen::VectorXd& x, double step = 1e-5);

/// Central-difference Hessian (symmetric). Throws if any stencil point is non-finite.
Eigen::MatrixXd numerical_hessian(const Objective& f, const Eigen::VectorXd& x, double step = 1e-4);

/// "***", "**", "*", "." or "" from a two-sided normal test of estimate / std_error.
std::string significance_stars(double estimate, double std_error);

/// Two-sided 5% significance, |estimate / std_error| >= 1.96.
bool significant_at_5pct(double estimate, double std_error);

}  // namespace spillover
