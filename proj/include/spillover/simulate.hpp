#pragma once

#include "spillover/bekk.hpp"
#include "spillover/garch.hpp"
#include "spillover/market_data.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace spillover {

/**
 * Portable Gaussian stream. Each stream is a std::mt19937_64 seeded with
 * splitmix64(seed + stream_index); every variate consumes exactly one 64-bit
 * draw, mapped to the open unit interval as ((x >> 11) + 0.5) * 2^-53 and
 * through the inverse normal CDF. The draw sequence is therefore fixed by
 * (seed, stream_index) alone.
 */
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint64_t stream_index);

    double uniform();
    double normal();
    /// Chi-square variate with `dof` degrees of freedom, by inversion.
    double chi_square(double dof);

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

enum class SimModel { iid_gaussian, random_walk, ar1, garch11, bekk11, dcc_garch };

std::string to_string(SimModel model);
SimModel parse_sim_model(std::string_view text);

struct NoiseParams {
    double mu = 0.0;
    double sigma = 1.0;
};

struct Ar1Params {
    double mu = 0.0;
    double phi = 0.5;
    double sigma = 1.0;
};

struct GarchSimParams {
    GarchParams garch{0.0, 0.05, 0.10, 0.85};
    std::optional<double> nu;  ///< standardized Student-t innovations when set
};

struct BekkSimParams {
    BekkParams bekk;
    std::optional<double> nu;
};

struct DccSimParams {
    std::vector<GarchParams> garch;  ///< one per column
    double alpha = 0.05;
    double beta = 0.90;
    Eigen::MatrixXd Qbar;            ///< unconditional correlation driving Q_t
    std::optional<double> nu;
};

using SimParams = std::variant<NoiseParams, Ar1Params, GarchSimParams, BekkSimParams, DccSimParams>;

struct SimSpec {
    SimModel model = SimModel::iid_gaussian;
    SimParams params = NoiseParams{};
    std::size_t T = 1000;
    std::size_t K = 1;
    std::uint64_t seed = 1;
    std::size_t burn_in = 500;
    Date start{std::chrono::year{2000}, std::chrono::January, std::chrono::day{1}};
    std::vector<std::string> names;  ///< defaults to x1..xK

    void validate() const;
};

/**
 * Simulated series with consecutive calendar dates starting at `spec.start`.
 * Column k draws its innovations from stream k; a shared Student-t mixing
 * variate, when used, comes from stream K. For random_walk the columns are
 * levels, for every other model they are returns.
 */
ReturnMatrix simulate(const SimSpec& spec);

/**
 * Builds model parameters from "key=value,..." text. Keys:
 *   iid_gaussian, random_walk: mu, sigma
 *   ar1: mu, phi, sigma
 *   garch11: mu, omega, alpha, beta, nu
 *   bekk11: c11, c12, c22, a11, a21, a12, a22, g11, g21, g12, g22, mu1, mu2, nu
 *   dcc_garch: omega, alpha, beta (shared stage-1), dcc_alpha, dcc_beta, rho, nu
 */
SimParams parse_sim_params(SimModel model, std::string_view text, std::size_t K);

struct SampleMoments {
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;         ///< unbiased
    Eigen::VectorXd excess_kurtosis;  ///< m4 / m2^2 - 3
    Eigen::MatrixXd correlation;
};

SampleMoments sample_moments(const Eigen::MatrixXd& x);
SampleMoments sample_moments(const ReturnMatrix& returns);

/// Price levels P_t = P_0 exp(cumulative log return), with one extra leading date.
PricePanel prices_from_returns(const ReturnMatrix& returns, double initial_price = 100.0);

}  // namespace spillover
