#include "spillover/simulate.hpp"

#include "text_util.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <map>
#include <stdexcept>

namespace spillover {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t stream_index)
    : engine_(splitmix64(seed + stream_index)) {}

double GaussianStream::uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

double GaussianStream::normal() { return -M_SQRT2 * boost::math::erfc_inv(2.0 * uniform()); }

double GaussianStream::chi_square(double dof) { return 2.0 * boost::math::gamma_p_inv(0.5 * dof, uniform()); }

std::string to_string(SimModel model) {
    switch (model) {
        case SimModel::iid_gaussian: return "iid_gaussian";
        case SimModel::random_walk: return "random_walk";
        case SimModel::ar1: return "ar1";
        case SimModel::garch11: return "garch11";
        case SimModel::bekk11: return "bekk11";
        case SimModel::dcc_garch: return "dcc_garch";
    }
    return "unknown";
}

SimModel parse_sim_model(std::string_view text) {
    for (const auto m : {SimModel::iid_gaussian, SimModel::random_walk, SimModel::ar1, SimModel::garch11,
                         SimModel::bekk11, SimModel::dcc_garch}) {
        if (text == to_string(m)) return m;
    }
    throw std::invalid_argument("unknown simulation model '" + std::string(text) + "'");
}

namespace {

Eigen::MatrixXd equicorrelation(std::size_t K, double rho) {
    Eigen::MatrixXd R = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K), rho);
    R.diagonal().setOnes();
    return R;
}

bool is_correlation_matrix(const Eigen::MatrixXd& R, std::size_t K) {
    if (R.rows() != static_cast<Eigen::Index>(K) || R.cols() != static_cast<Eigen::Index>(K)) return false;
    if (!R.isApprox(R.transpose()) || !(R.diagonal().array() == 1.0).all()) return false;
    return Eigen::LLT<Eigen::MatrixXd>(R).info() == Eigen::Success;
}

void check_nu(const std::optional<double>& nu) {
    if (nu && !(*nu > 2.0)) throw std::invalid_argument("nu must exceed 2");
}

// Standardized multivariate-t scale factor sqrt((nu - 2) / w), w ~ chi^2(nu).
double t_scale(const std::optional<double>& nu, GaussianStream& mixing) {
    if (!nu) return 1.0;
    return std::sqrt((*nu - 2.0) / mixing.chi_square(*nu));
}

std::vector<GaussianStream> make_streams(const SimSpec& spec) {
    std::vector<GaussianStream> streams;
    for (std::size_t k = 0; k <= spec.K; ++k) streams.emplace_back(spec.seed, k);
    return streams;
}

template <typename T>
const T& params_as(const SimSpec& spec) {
    const T* p = std::get_if<T>(&spec.params);
    if (!p) throw std::invalid_argument("parameters do not match model " + to_string(spec.model));
    return *p;
}

}  // namespace

void SimSpec::validate() const {
    if (T == 0) throw std::invalid_argument("simulation length must be positive");
    if (K == 0) throw std::invalid_argument("simulation dimension must be positive");
    if (!names.empty() && names.size() != K) throw std::invalid_argument("need one name per column");
    switch (model) {
        case SimModel::iid_gaussian:
        case SimModel::random_walk: {
            const auto& p = params_as<NoiseParams>(*this);
            if (!(p.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
            break;
        }
        case SimModel::ar1: {
            const auto& p = params_as<Ar1Params>(*this);
            if (!(p.sigma > 0.0) || !(std::abs(p.phi) < 1.0)) throw std::invalid_argument("ar1 needs sigma > 0, |phi| < 1");
            break;
        }
        case SimModel::garch11: {
            const auto& p = params_as<GarchSimParams>(*this);
            if (!p.garch.valid()) throw std::invalid_argument("invalid GARCH parameters");
            check_nu(p.nu);
            break;
        }
        case SimModel::bekk11: {
            const auto& p = params_as<BekkSimParams>(*this);
            if (K != 2) throw std::invalid_argument("bekk11 is bivariate (K = 2)");
            if (p.bekk.C(0, 1) != 0.0 || !(p.bekk.C(0, 0) >= 0.0) || !(p.bekk.C(1, 1) >= 0.0)) {
                throw std::invalid_argument("C must be lower triangular with non-negative diagonal");
            }
            if (!(bekk_spectral_radius(p.bekk.A, p.bekk.G) < 1.0)) throw std::invalid_argument("BEKK parameters not stationary");
            check_nu(p.nu);
            break;
        }
        case SimModel::dcc_garch: {
            const auto& p = params_as<DccSimParams>(*this);
            if (K < 2) throw std::invalid_argument("dcc_garch needs K >= 2");
            if (p.garch.size() != K) throw std::invalid_argument("dcc_garch needs one GARCH parameter set per column");
            for (const auto& g : p.garch) {
                if (!g.valid()) throw std::invalid_argument("invalid GARCH parameters");
            }
            if (!(p.alpha >= 0.0 && p.beta >= 0.0 && p.alpha + p.beta < 1.0)) {
                throw std::invalid_argument("DCC needs alpha, beta >= 0, alpha + beta < 1");
            }
            if (!is_correlation_matrix(p.Qbar, K)) throw std::invalid_argument("Qbar must be a K x K correlation matrix");
            check_nu(p.nu);
            break;
        }
    }
}

ReturnMatrix simulate(const SimSpec& spec) {
    spec.validate();
    const std::size_t K = spec.K;
    const std::size_t total = spec.T + spec.burn_in;
    auto streams = make_streams(spec);
    auto& mixing = streams[K];

    Eigen::MatrixXd out(static_cast<Eigen::Index>(spec.T), static_cast<Eigen::Index>(K));
    auto emit = [&](std::size_t t, std::size_t k, double v) {
        if (t >= spec.burn_in) out(static_cast<Eigen::Index>(t - spec.burn_in), static_cast<Eigen::Index>(k)) = v;
    };

    switch (spec.model) {
        case SimModel::iid_gaussian: {
            const auto& p = params_as<NoiseParams>(spec);
            for (std::size_t t = 0; t < total; ++t) {
                for (std::size_t k = 0; k < K; ++k) emit(t, k, p.mu + p.sigma * streams[k].normal());
            }
            break;
        }
        case SimModel::random_walk: {
            const auto& p = params_as<NoiseParams>(spec);
            std::vector<double> level(K, 0.0);
            for (std::size_t t = 0; t < total; ++t) {
                for (std::size_t k = 0; k < K; ++k) {
                    level[k] += p.mu + p.sigma * streams[k].normal();
                    emit(t, k, level[k]);
                }
            }
            break;
        }
        case SimModel::ar1: {
            const auto& p = params_as<Ar1Params>(spec);
            std::vector<double> x(K, p.mu);
            for (std::size_t t = 0; t < total; ++t) {
                for (std::size_t k = 0; k < K; ++k) {
                    x[k] = p.mu + p.phi * (x[k] - p.mu) + p.sigma * streams[k].normal();
                    emit(t, k, x[k]);
                }
            }
            break;
        }
        case SimModel::garch11: {
            const auto& p = params_as<GarchSimParams>(spec);
            const auto& g = p.garch;
            std::vector<double> h(K, g.unconditional_variance());
            std::vector<double> eps2(K, g.unconditional_variance());
            for (std::size_t t = 0; t < total; ++t) {
                const double scale = t_scale(p.nu, mixing);
                for (std::size_t k = 0; k < K; ++k) {
                    if (t > 0) h[k] = g.omega + g.alpha * eps2[k] + g.beta * h[k];
                    const double e = std::sqrt(h[k]) * scale * streams[k].normal();
                    eps2[k] = e * e;
                    emit(t, k, g.mu + e);
                }
            }
            break;
        }
        case SimModel::bekk11: {
            const auto& p = params_as<BekkSimParams>(spec);
            const auto& b = p.bekk;
            const Eigen::Matrix2d CC = b.C.transpose() * b.C;
            Eigen::Matrix4d M = Eigen::Matrix4d::Identity();
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) M.block<2, 2>(2 * i, 2 * j) -= b.A(j, i) * b.A.transpose() + b.G(j, i) * b.G.transpose();
            }
            const Eigen::Vector4d vecH = M.partialPivLu().solve(Eigen::Map<const Eigen::Vector4d>(CC.data()));
            Eigen::Matrix2d H = Eigen::Map<const Eigen::Matrix2d>(vecH.data());
            H = (0.5 * (H + H.transpose())).eval();
            Eigen::Vector2d e_prev = Eigen::Vector2d::Zero();
            for (std::size_t t = 0; t < total; ++t) {
                if (t > 0) {
                    const Eigen::Vector2d v = b.A.transpose() * e_prev;
                    H = CC + v * v.transpose() + b.G.transpose() * H * b.G;
                    H = (0.5 * (H + H.transpose())).eval();
                }
                const double scale = t_scale(p.nu, mixing);
                const Eigen::Vector2d z(streams[0].normal(), streams[1].normal());
                const Eigen::Matrix2d L = H.llt().matrixL();
                e_prev = scale * (L * z);
                for (std::size_t k = 0; k < 2; ++k) emit(t, k, b.mu[static_cast<Eigen::Index>(k)] + e_prev[static_cast<Eigen::Index>(k)]);
            }
            break;
        }
        case SimModel::dcc_garch: {
            const auto& p = params_as<DccSimParams>(spec);
            const auto n = static_cast<Eigen::Index>(K);
            Eigen::MatrixXd Q = p.Qbar;
            Eigen::VectorXd eta_prev = Eigen::VectorXd::Zero(n);
            std::vector<double> h(K);
            std::vector<double> eps2(K);
            for (std::size_t k = 0; k < K; ++k) h[k] = eps2[k] = p.garch[k].unconditional_variance();
            Eigen::VectorXd z(n);
            for (std::size_t t = 0; t < total; ++t) {
                if (t > 0) {
                    Q = (1.0 - p.alpha - p.beta) * p.Qbar + p.alpha * eta_prev * eta_prev.transpose() + p.beta * Q;
                    for (std::size_t k = 0; k < K; ++k) {
                        const auto& g = p.garch[k];
                        h[k] = g.omega + g.alpha * eps2[k] + g.beta * h[k];
                    }
                }
                const Eigen::VectorXd inv_sd = Q.diagonal().cwiseSqrt().cwiseInverse();
                const Eigen::MatrixXd R = inv_sd.asDiagonal() * Q * inv_sd.asDiagonal();
                const double scale = t_scale(p.nu, mixing);
                for (std::size_t k = 0; k < K; ++k) z[static_cast<Eigen::Index>(k)] = streams[k].normal();
                const Eigen::MatrixXd L = R.llt().matrixL();
                eta_prev = scale * (L * z);
                for (std::size_t k = 0; k < K; ++k) {
                    const double e = std::sqrt(h[k]) * eta_prev[static_cast<Eigen::Index>(k)];
                    eps2[k] = e * e;
                    emit(t, k, p.garch[k].mu + e);
                }
            }
            break;
        }
    }

    ReturnMatrix r;
    r.values = std::move(out);
    for (std::size_t k = 0; k < K; ++k) r.markets.push_back(spec.names.empty() ? "x" + std::to_string(k + 1) : spec.names[k]);
    std::chrono::sys_days day{spec.start};
    for (std::size_t t = 0; t < spec.T; ++t) {
        r.dates.emplace_back(day);
        day += std::chrono::days{1};
    }
    r.period_tags.assign(spec.T, std::string{});
    return r;
}

SimParams parse_sim_params(SimModel model, std::string_view text, std::size_t K) {
    std::map<std::string, double> kv;
    text = detail::trim(text);
    if (!text.empty()) {
        for (const auto field : detail::split(text, ',')) {
            const auto eq = field.find('=');
            if (eq == std::string_view::npos) throw std::invalid_argument("expected key=value, got '" + std::string(field) + "'");
            const auto value = detail::parse_double(field.substr(eq + 1));
            if (!value) throw std::invalid_argument("bad number in '" + std::string(field) + "'");
            kv[std::string(detail::trim(field.substr(0, eq)))] = *value;
        }
    }
    auto take = [&](const char* key, double fallback) {
        const auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        const double v = it->second;
        kv.erase(it);
        return v;
    };
    auto take_nu = [&]() -> std::optional<double> {
        const auto it = kv.find("nu");
        if (it == kv.end()) return std::nullopt;
        const double v = it->second;
        kv.erase(it);
        return v;
    };

    SimParams params;
    switch (model) {
        case SimModel::iid_gaussian:
        case SimModel::random_walk:
            params = NoiseParams{take("mu", 0.0), take("sigma", 1.0)};
            break;
        case SimModel::ar1:
            params = Ar1Params{take("mu", 0.0), take("phi", 0.5), take("sigma", 1.0)};
            break;
        case SimModel::garch11:
            params = GarchSimParams{{take("mu", 0.0), take("omega", 0.05), take("alpha", 0.10), take("beta", 0.85)}, take_nu()};
            break;
        case SimModel::bekk11: {
            std::array<double, BekkParams::kFreeParameters> v{};
            const std::array<double, BekkParams::kFreeParameters> defaults{0.3, 0.1, 0.25, 0.30, 0.05, 0.05,
                                                                           0.30, 0.90, 0.03, 0.03, 0.90};
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = take(BekkParams::names()[i], defaults[i]);
            const Eigen::Vector2d mu(take("mu1", 0.0), take("mu2", 0.0));
            params = BekkSimParams{BekkParams::from_array(v, mu), take_nu()};
            break;
        }
        case SimModel::dcc_garch: {
            DccSimParams p;
            const GarchParams g{take("mu", 0.0), take("omega", 0.05), take("alpha", 0.10), take("beta", 0.85)};
            p.garch.assign(K, g);
            p.alpha = take("dcc_alpha", 0.05);
            p.beta = take("dcc_beta", 0.90);
            p.Qbar = equicorrelation(K, take("rho", 0.5));
            p.nu = take_nu();
            params = std::move(p);
            break;
        }
    }
    if (!kv.empty()) {
        throw std::invalid_argument("unknown parameter '" + kv.begin()->first + "' for model " + to_string(model));
    }
    return params;
}

SampleMoments sample_moments(const Eigen::MatrixXd& x) {
    if (x.rows() < 4) throw std::invalid_argument("sample moments need at least 4 observations");
    const auto n = static_cast<double>(x.rows());
    SampleMoments m;
    m.mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd c = x.rowwise() - m.mean.transpose();
    const Eigen::ArrayXd m2 = c.array().square().colwise().sum().transpose() / n;
    if ((m2 == 0.0).any()) throw std::invalid_argument("constant column: kurtosis undefined");
    const Eigen::ArrayXd m4 = c.array().square().square().colwise().sum().transpose() / n;
    m.variance = m2 * n / (n - 1.0);
    m.excess_kurtosis = m4 / m2.square() - 3.0;
    const Eigen::MatrixXd cov = c.transpose() * c;
    const Eigen::VectorXd inv_sd = cov.diagonal().cwiseSqrt().cwiseInverse();
    m.correlation = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
    m.correlation = (0.5 * (m.correlation + m.correlation.transpose())).eval();
    m.correlation.diagonal().setOnes();
    return m;
}

SampleMoments sample_moments(const ReturnMatrix& returns) { return sample_moments(returns.values); }

PricePanel prices_from_returns(const ReturnMatrix& returns, double initial_price) {
    if (returns.rows() == 0) throw std::invalid_argument("no returns to cumulate");
    PricePanel panel;
    panel.markets = returns.markets;
    panel.dates.push_back(std::chrono::sys_days{returns.dates.front()} - std::chrono::days{1});
    panel.dates.insert(panel.dates.end(), returns.dates.begin(), returns.dates.end());
    panel.prices.resize(returns.values.rows() + 1, returns.values.cols());
    panel.prices.row(0).setConstant(initial_price);
    for (Eigen::Index t = 0; t < returns.values.rows(); ++t) {
        panel.prices.row(t + 1) = (panel.prices.row(t).array().log() + returns.values.row(t).array()).exp();
    }
    panel.validate();
    return panel;
}

}  // namespace spillover
