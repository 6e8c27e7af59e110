#include "spillover/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

namespace spillover {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double logistic(double u) {
    return u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
}

}  // namespace

// ---------------------------------------------------------------------------
// ParameterTransform

ParameterTransform& ParameterTransform::push(Kind kind, std::size_t n, double lo, double hi) {
    if (n == 0) throw std::invalid_argument("transform block must be non-empty");
    blocks_.push_back({kind, dimension_, n, lo, hi});
    dimension_ += n;
    return *this;
}

ParameterTransform& ParameterTransform::free(std::size_t n) { return push(Kind::free, n, 0.0, 0.0); }

ParameterTransform& ParameterTransform::positive(std::size_t n) { return push(Kind::positive, n, 0.0, 0.0); }

ParameterTransform& ParameterTransform::bounded(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("bounded transform needs lo < hi");
    return push(Kind::bounded, 1, lo, hi);
}

ParameterTransform& ParameterTransform::simplex(std::size_t n, double total) {
    if (!(total > 0.0)) throw std::invalid_argument("simplex total must be positive");
    return push(Kind::simplex, n, 0.0, total);
}

Eigen::VectorXd ParameterTransform::to_constrained(const Eigen::VectorXd& u) const {
    if (static_cast<std::size_t>(u.size()) != dimension_) throw std::invalid_argument("transform dimension mismatch");
    Eigen::VectorXd x(u.size());
    for (const auto& b : blocks_) {
        const auto o = static_cast<Eigen::Index>(b.offset);
        const auto n = static_cast<Eigen::Index>(b.size);
        switch (b.kind) {
            case Kind::free:
                x.segment(o, n) = u.segment(o, n);
                break;
            case Kind::positive:
                x.segment(o, n) = u.segment(o, n).array().exp();
                break;
            case Kind::bounded:
                x[o] = b.lo + (b.hi - b.lo) * logistic(u[o]);
                break;
            case Kind::simplex: {
                // Shift by the largest exponent so exp() never overflows.
                const double m = std::max(0.0, u.segment(o, n).maxCoeff());
                const Eigen::ArrayXd e = (u.segment(o, n).array() - m).exp();
                const double denom = std::exp(-m) + e.sum();
                x.segment(o, n) = b.hi * e / denom;
                break;
            }
        }
    }
    return x;
}

Eigen::VectorXd ParameterTransform::to_unconstrained(const Eigen::VectorXd& x) const {
    if (static_cast<std::size_t>(x.size()) != dimension_) throw std::invalid_argument("transform dimension mismatch");
    Eigen::VectorXd u(x.size());
    for (const auto& b : blocks_) {
        const auto o = static_cast<Eigen::Index>(b.offset);
        const auto n = static_cast<Eigen::Index>(b.size);
        switch (b.kind) {
            case Kind::free:
                u.segment(o, n) = x.segment(o, n);
                break;
            case Kind::positive:
                if (!(x.segment(o, n).array() > 0.0).all()) {
                    throw std::invalid_argument("parameter must be strictly positive");
                }
                u.segment(o, n) = x.segment(o, n).array().log();
                break;
            case Kind::bounded: {
                const double p = (x[o] - b.lo) / (b.hi - b.lo);
                if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("parameter outside its bounds");
                u[o] = std::log(p / (1.0 - p));
                break;
            }
            case Kind::simplex: {
                const double slack = b.hi - x.segment(o, n).sum();
                if (!(x.segment(o, n).array() > 0.0).all() || !(slack > 0.0)) {
                    throw std::invalid_argument("parameters violate the simplex constraint");
                }
                u.segment(o, n) = (x.segment(o, n).array() / slack).log();
                break;
            }
        }
    }
    return u;
}

Eigen::MatrixXd ParameterTransform::jacobian(const Eigen::VectorXd& u) const {
    const Eigen::VectorXd x = to_constrained(u);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(u.size(), u.size());
    for (const auto& b : blocks_) {
        const auto o = static_cast<Eigen::Index>(b.offset);
        const auto n = static_cast<Eigen::Index>(b.size);
        switch (b.kind) {
            case Kind::free:
                J.block(o, o, n, n).setIdentity();
                break;
            case Kind::positive:
                J.block(o, o, n, n) = x.segment(o, n).asDiagonal();
                break;
            case Kind::bounded: {
                const double p = logistic(u[o]);
                J(o, o) = (b.hi - b.lo) * p * (1.0 - p);
                break;
            }
            case Kind::simplex:
                for (Eigen::Index i = 0; i < n; ++i) {
                    for (Eigen::Index j = 0; j < n; ++j) {
                        J(o + i, o + j) = x[o + i] * ((i == j ? 1.0 : 0.0) - x[o + j] / b.hi);
                    }
                }
                break;
        }
    }
    return J;
}

// ---------------------------------------------------------------------------
// Finite differences

Eigen::VectorXd numerical_gradient(const Objective& f, const Eigen::VectorXd& x, double step) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = step * std::max(1.0, std::abs(x[i]));
        xp[i] = x[i] + h;
        const double fp = f(xp);
        xp[i] = x[i] - h;
        const double fm = f(xp);
        xp[i] = x[i];
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            throw std::domain_error("non-finite objective inside the finite-difference stencil");
        }
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Eigen::MatrixXd numerical_hessian(const Objective& f, const Eigen::VectorXd& x, double step) {
    const Eigen::Index n = x.size();
    Eigen::VectorXd h(n);
    for (Eigen::Index i = 0; i < n; ++i) h[i] = step * std::max(1.0, std::abs(x[i]));

    auto eval = [&](const Eigen::VectorXd& p) {
        const double v = f(p);
        if (!std::isfinite(v)) throw std::domain_error("non-finite objective inside the finite-difference stencil");
        return v;
    };

    const double f0 = eval(x);
    Eigen::MatrixXd H(n, n);
    Eigen::VectorXd p = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        p[i] = x[i] + h[i];
        const double fp = eval(p);
        p[i] = x[i] - h[i];
        const double fm = eval(p);
        p[i] = x[i];
        H(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for (Eigen::Index j = 0; j < i; ++j) {
            p[i] = x[i] + h[i];
            p[j] = x[j] + h[j];
            const double fpp = eval(p);
            p[j] = x[j] - h[j];
            const double fpm = eval(p);
            p[i] = x[i] - h[i];
            const double fmm = eval(p);
            p[j] = x[j] + h[j];
            const double fmp = eval(p);
            p[i] = x[i];
            p[j] = x[j];
            H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
        }
    }
    return H;
}

// ---------------------------------------------------------------------------
// Quasi-Newton search

namespace {

constexpr double kGradStep = 1e-5;

struct LocalOptimum {
    Eigen::VectorXd u;
    double f = kInf;
    double gradient_norm = kInf;
    bool converged = false;
    int iterations = 0;
};

// Central differences where possible; one-sided next to a rejected region.
std::optional<Eigen::VectorXd> search_gradient(const Objective& f, const Eigen::VectorXd& u, double f0) {
    Eigen::VectorXd g(u.size());
    Eigen::VectorXd p = u;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double h = kGradStep * std::max(1.0, std::abs(u[i]));
        p[i] = u[i] + h;
        const double fp = f(p);
        p[i] = u[i] - h;
        const double fm = f(p);
        p[i] = u[i];
        const bool okp = std::isfinite(fp);
        const bool okm = std::isfinite(fm);
        if (okp && okm) {
            g[i] = (fp - fm) / (2.0 * h);
        } else if (okp) {
            g[i] = (fp - f0) / h;
        } else if (okm) {
            g[i] = (f0 - fm) / h;
        } else {
            return std::nullopt;
        }
    }
    return g;
}

LocalOptimum bfgs(const Objective& f, const Eigen::VectorXd& start, const MleSettings& settings) {
    const Eigen::Index n = start.size();
    LocalOptimum out;
    out.u = start;
    out.f = f(start);
    if (!std::isfinite(out.f)) return out;

    auto grad = search_gradient(f, start, out.f);
    if (!grad) return out;
    Eigen::VectorXd g = *grad;
    Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);
    bool identity = true;
    bool scaled = false;
    int stalled = 0;

    for (int it = 0; it < settings.max_iterations; ++it) {
        out.iterations = it;
        out.gradient_norm = g.norm();
        if (out.gradient_norm < settings.tolerance) {
            out.converged = true;
            return out;
        }

        Eigen::VectorXd d = -Hinv * g;
        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            Hinv.setIdentity();
            identity = true;
            d = -g;
            slope = g.dot(d);
        }
        const double max_len = identity ? 1.0 : 5.0;
        double step = std::min(1.0, max_len / d.norm());

        bool accepted = false;
        Eigen::VectorXd u_new;
        Eigen::VectorXd g_new;
        double f_new = kInf;
        for (int ls = 0; ls < 60; ++ls) {
            u_new = out.u + step * d;
            f_new = f(u_new);
            if (std::isfinite(f_new) && f_new <= out.f + 1e-4 * step * slope) {
                if (auto gn = search_gradient(f, u_new, f_new)) {
                    g_new = *gn;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (identity) break;
            Hinv.setIdentity();
            identity = true;
            continue;
        }

        const Eigen::VectorXd s = u_new - out.u;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (!scaled) {
                Hinv *= sy / y.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n) - rho * y * s.transpose();
            Hinv = V.transpose() * Hinv * V + rho * s * s.transpose();
            identity = false;
        }

        stalled = (out.f - f_new <= 1e-15 * (1.0 + std::abs(out.f))) ? stalled + 1 : 0;
        out.u = u_new;
        out.f = f_new;
        g = g_new;
        if (stalled >= 20) break;
    }
    out.gradient_norm = g.norm();
    out.converged = out.gradient_norm < settings.tolerance;
    out.iterations = std::min(out.iterations + 1, settings.max_iterations);
    return out;
}

// Newton iterations with the finite-difference Hessian, used to finish a
// quasi-Newton search that stalls short of the gradient tolerance.
void newton_polish(const Objective& f, LocalOptimum& opt, const MleSettings& settings) {
    for (int it = 0; it < 20 && !opt.converged; ++it) {
        Eigen::MatrixXd H;
        try {
            H = numerical_hessian(f, opt.u, 1e-4);
        } catch (const std::domain_error&) {
            return;
        }
        auto g = search_gradient(f, opt.u, opt.f);
        if (!g) return;
        Eigen::LLT<Eigen::MatrixXd> llt(H);
        if (llt.info() != Eigen::Success) return;
        const Eigen::VectorXd d = -llt.solve(*g);

        bool accepted = false;
        double step = 1.0;
        for (int ls = 0; ls < 30 && !accepted; ++ls, step *= 0.5) {
            const Eigen::VectorXd u_new = opt.u + step * d;
            const double f_new = f(u_new);
            if (!std::isfinite(f_new) || f_new > opt.f + 1e-14 * (1.0 + std::abs(opt.f))) continue;
            const auto g_new = search_gradient(f, u_new, f_new);
            if (!g_new || g_new->norm() >= g->norm()) continue;
            opt.u = u_new;
            opt.f = std::min(f_new, opt.f);
            opt.gradient_norm = g_new->norm();
            opt.converged = opt.gradient_norm < settings.tolerance;
            ++opt.iterations;
            accepted = true;
        }
        if (!accepted) return;
    }
}

}  // namespace

MleResult maximize(const MleProblem& problem, const MleSettings& settings) {
    if (problem.initial_points.empty()) throw std::invalid_argument("maximize needs at least one initial point");
    if (!problem.objective) throw std::invalid_argument("maximize needs an objective");
    if (!(problem.observations > 0.0)) throw std::invalid_argument("observations must be positive");

    const double scale = problem.observations;
    const Objective scaled = [&](const Eigen::VectorXd& u) {
        const double v = problem.objective(u);
        return std::isfinite(v) ? v / scale : kInf;
    };

    std::vector<Eigen::VectorXd> starts;
    for (const auto& x : problem.initial_points) starts.push_back(problem.transform.to_unconstrained(x));
    const std::size_t given = starts.size();

    // Restart points: uniform jitter of width +-0.5 around the given starts in
    // the unconstrained space, drawn from a seeded 64-bit Mersenne Twister.
    std::mt19937_64 rng(settings.seed);
    for (int r = 0; r < settings.restarts; ++r) {
        Eigen::VectorXd u = starts[static_cast<std::size_t>(r) % given];
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            u[i] += unit - 0.5;
        }
        starts.push_back(std::move(u));
    }

    LocalOptimum best;
    bool any_finite = false;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        if (!std::isfinite(scaled(starts[s]))) continue;
        any_finite = true;
        LocalOptimum local = bfgs(scaled, starts[s], settings);
        if (!local.converged && std::isfinite(local.f)) newton_polish(scaled, local, settings);
        if (std::isfinite(local.f) && (local.f < best.f || !std::isfinite(best.f))) best = std::move(local);
    }
    if (!any_finite) throw std::runtime_error("non-finite objective at every starting point");
    if (!std::isfinite(best.f)) throw std::runtime_error("non-finite objective");

    MleResult result;
    result.unconstrained = best.u;
    result.params = problem.transform.to_constrained(best.u);
    result.neg_loglik = problem.objective(best.u);
    result.converged = best.converged;
    result.iterations = best.iterations;
    result.gradient_norm = best.gradient_norm;

    const Eigen::Index n = best.u.size();
    result.std_errors = Eigen::VectorXd::Constant(n, kNaN);
    result.covariance = Eigen::MatrixXd::Constant(n, n, kNaN);
    const Objective total = [&](const Eigen::VectorXd& u) { return problem.objective(u); };
    for (const double step : {1e-4, 1e-5}) {
        Eigen::MatrixXd H;
        try {
            H = numerical_hessian(total, best.u, step);
        } catch (const std::domain_error&) {
            continue;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(H);
        if (llt.info() != Eigen::Success) break;
        const Eigen::MatrixXd cov_u = llt.solve(Eigen::MatrixXd::Identity(n, n));
        const Eigen::MatrixXd J = problem.transform.jacobian(best.u);
        result.covariance = J * cov_u * J.transpose();
        result.std_errors = result.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
        break;
    }
    return result;
}

// ---------------------------------------------------------------------------

std::string significance_stars(double estimate, double std_error) {
    if (!(std_error > 0.0)) throw std::invalid_argument("standard error must be positive");
    const double z = std::abs(estimate / std_error);
    if (z >= 3.2905) return "***";
    if (z >= 2.5758) return "**";
    if (z >= 1.9600) return "*";
    if (z >= 1.6449) return ".";
    return "";
}

bool significant_at_5pct(double estimate, double std_error) {
    return std_error > 0.0 && std::abs(estimate / std_error) >= 1.96;
}

}  // namespace spillover
