#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "feecast/error.hpp"

namespace feecast::numerics {

// ---------------------------------------------------------------------------
// Differencing

/// Boundary values retained by `difference` so that `integrate` can rebuild
/// the original series. Seasonal passes run first, then regular passes; each
/// pass keeps the head it consumed (s values per seasonal pass, one per
/// regular pass).
struct DifferenceInfo {
    int d = 0;
    int D = 0;
    std::size_t s = 1;
    std::vector<std::vector<double>> heads;

    [[nodiscard]] std::size_t lost() const noexcept { return static_cast<std::size_t>(d) + static_cast<std::size_t>(D) * s; }
};

inline void check_orders(int d, int D, std::size_t s)
{
    require(d >= 0 && d <= 2 && D >= 0 && D <= 2, ErrorCode::InvalidArgument, "difference orders must be in {0,1,2}");
    require(s >= 1, ErrorCode::InvalidArgument, "season length must be >= 1");
}

inline std::pair<std::vector<double>, DifferenceInfo> difference(std::span<const double> y, int d, int D, std::size_t s)
{
    check_orders(d, D, s);
    DifferenceInfo info{d, D, s, {}};
    require(y.size() > info.lost(), ErrorCode::SeriesTooShort, "series length must exceed d + D*s");
    std::vector<double> cur(y.begin(), y.end());
    auto pass = [&](std::size_t lag) {
        info.heads.emplace_back(cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(lag));
        std::vector<double> next(cur.size() - lag);
        for (std::size_t t = lag; t < cur.size(); ++t) {
            next[t - lag] = cur[t] - cur[t - lag];
        }
        cur = std::move(next);
    };
    for (int i = 0; i < D; ++i) pass(s);
    for (int i = 0; i < d; ++i) pass(1);
    return {std::move(cur), std::move(info)};
}

inline std::vector<double> integrate(std::span<const double> z, const DifferenceInfo& info)
{
    check_orders(info.d, info.D, info.s);
    require(info.heads.size() == static_cast<std::size_t>(info.d + info.D), ErrorCode::ShapeMismatch,
            "difference info does not match its orders");
    std::vector<double> cur(z.begin(), z.end());
    for (std::size_t k = info.heads.size(); k-- > 0;) {
        const auto& head = info.heads[k];
        const std::size_t lag = head.size();
        const bool seasonal = k < static_cast<std::size_t>(info.D);
        require(lag == (seasonal ? info.s : 1), ErrorCode::ShapeMismatch, "retained head has the wrong length");
        std::vector<double> next(cur.size() + lag);
        std::copy(head.begin(), head.end(), next.begin());
        for (std::size_t t = lag; t < next.size(); ++t) {
            next[t] = next[t - lag] + cur[t - lag];
        }
        cur = std::move(next);
    }
    return cur;
}

/// Coefficients c_0..c_L of (1-B)^d (1-B^s)^D, so that
/// z_t = sum_k c_k y_{t-k} with c_0 = 1.
inline std::vector<double> difference_polynomial(int d, int D, std::size_t s)
{
    check_orders(d, D, s);
    std::vector<double> poly{1.0};
    auto multiply = [&](std::size_t lag) {
        std::vector<double> out(poly.size() + lag, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            out[i] += poly[i];
            out[i + lag] -= poly[i];
        }
        poly = std::move(out);
    };
    for (int i = 0; i < D; ++i) multiply(s);
    for (int i = 0; i < d; ++i) multiply(1);
    return poly;
}

/// Applies the differencing polynomial to the tail of `history ++ future`,
/// returning one differenced value per element of `future`.
inline std::vector<double> difference_forward(std::span<const double> history, std::span<const double> future, int d,
                                              int D, std::size_t s)
{
    const auto poly = difference_polynomial(d, D, s);
    const std::size_t L = poly.size() - 1;
    require(history.size() >= L, ErrorCode::SeriesTooShort, "history shorter than differencing span");
    std::vector<double> out(future.size());
    auto at = [&](std::ptrdiff_t idx) {
        // idx counts from the start of `future`; negative reaches into history.
        return idx >= 0 ? future[static_cast<std::size_t>(idx)]
                        : history[history.size() - static_cast<std::size_t>(-idx)];
    };
    for (std::size_t j = 0; j < future.size(); ++j) {
        double acc = 0;
        for (std::size_t k = 0; k <= L; ++k) {
            acc += poly[k] * at(static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(k));
        }
        out[j] = acc;
    }
    return out;
}

/// Inverse of `difference_forward`: continues a series whose last values are
/// `history` using differenced increments `z_future`.
inline std::vector<double> integrate_forward(std::span<const double> history, std::span<const double> z_future, int d,
                                             int D, std::size_t s)
{
    const auto poly = difference_polynomial(d, D, s);
    const std::size_t L = poly.size() - 1;
    require(history.size() >= L, ErrorCode::SeriesTooShort, "history shorter than differencing span");
    std::vector<double> buf(history.end() - static_cast<std::ptrdiff_t>(L), history.end());
    std::vector<double> out(z_future.size());
    for (std::size_t j = 0; j < z_future.size(); ++j) {
        double acc = z_future[j];
        for (std::size_t k = 1; k <= L; ++k) {
            acc -= poly[k] * buf[buf.size() - k];
        }
        buf.push_back(acc);
        out[j] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exponential moving average

inline double ema_factor(std::size_t k)
{
    require(k >= 1, ErrorCode::InvalidArgument, "EMA window must be >= 1");
    return 2.0 / (static_cast<double>(k) + 1.0);
}

/// EMA_t = b*v_t + (1-b)*EMA_{t-1}, b = 2/(k+1), seeded with the first value.
inline double ema(std::span<const double> values, std::size_t k)
{
    require(!values.empty(), ErrorCode::EmptyInput, "EMA of an empty series");
    const double b = ema_factor(k);
    double acc = values.front();
    for (std::size_t t = 1; t < values.size(); ++t) {
        acc = b * values[t] + (1.0 - b) * acc;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Nelder-Mead

struct NelderMeadOptions {
    int max_iter = 2000;
    double ftol = 1e-10; // spread of objective values across the simplex
    double xtol = 1e-8;  // max distance of a vertex from the best vertex
    double initial_step = 0.1;
    int restarts = 0;
    std::uint64_t seed = 42;
};

struct OptimizerResult {
    std::vector<double> argmin;
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    /// Best objective value after each iteration, across restarts.
    std::vector<double> best_trace;
};

using Objective = std::function<double(std::span<const double>)>;

namespace detail {

struct Simplex {
    std::vector<std::vector<double>> x;
    std::vector<double> f;
};

inline double spread_x(const Simplex& s)
{
    double m = 0;
    for (std::size_t j = 1; j < s.x.size(); ++j) {
        for (std::size_t i = 0; i < s.x[0].size(); ++i) {
            m = std::max(m, std::abs(s.x[j][i] - s.x[0][i]));
        }
    }
    return m;
}

} // namespace detail

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5). After the first run converges, `restarts` further runs start
/// from the incumbent with a freshly randomised simplex.
inline OptimizerResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opt = {})
{
    const std::size_t n = x0.size();
    OptimizerResult result;
    result.argmin = x0;
    auto eval = [&](const std::vector<double>& x) {
        ++result.evaluations;
        double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    const double f0 = f(x0);
    ++result.evaluations;
    if (!std::isfinite(f0)) {
        fail(ErrorCode::NonFiniteObjective, "objective is not finite at the starting point");
    }
    result.value = f0;
    if (n == 0) {
        result.converged = true;
        return result;
    }

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.5, 1.5);
    std::bernoulli_distribution coin(0.5);

    bool all_converged = true;
    for (int run = 0; run <= opt.restarts; ++run) {
        detail::Simplex s;
        s.x.push_back(result.argmin);
        s.f.push_back(result.value);
        for (std::size_t i = 0; i < n; ++i) {
            auto v = result.argmin;
            double step = opt.initial_step;
            if (run > 0) {
                step *= unit(rng) * (coin(rng) ? 1.0 : -1.0);
            }
            v[i] += step;
            s.x.push_back(v);
            s.f.push_back(eval(v));
        }

        bool converged = false;
        std::vector<std::size_t> order(n + 1);
        std::vector<double> centroid(n), xr(n), xe(n), xc(n);
        int iter = 0;
        for (; iter < opt.max_iter; ++iter) {
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.f[a] < s.f[b]; });
            detail::Simplex sorted;
            for (auto k : order) {
                sorted.x.push_back(std::move(s.x[k]));
                sorted.f.push_back(s.f[k]);
            }
            s = std::move(sorted);

            if (s.f[0] < result.value) {
                result.value = s.f[0];
                result.argmin = s.x[0];
            }
            result.best_trace.push_back(result.value);

            const double fspread = s.f[n] - s.f[0];
            if (fspread == 0.0 || (fspread <= opt.ftol && detail::spread_x(s) <= opt.xtol)) {
                converged = true;
                break;
            }

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t i = 0; i < n; ++i) centroid[i] += s.x[j][i];
            }
            for (auto& c : centroid) c /= static_cast<double>(n);

            for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + (centroid[i] - s.x[n][i]);
            const double fr = eval(xr);
            if (fr < s.f[0]) {
                for (std::size_t i = 0; i < n; ++i) xe[i] = centroid[i] + 2.0 * (xr[i] - centroid[i]);
                const double fe = eval(xe);
                if (fe < fr) {
                    s.x[n] = xe;
                    s.f[n] = fe;
                } else {
                    s.x[n] = xr;
                    s.f[n] = fr;
                }
            } else if (fr < s.f[n - 1]) {
                s.x[n] = xr;
                s.f[n] = fr;
            } else {
                const bool outside = fr < s.f[n];
                const auto& toward = outside ? xr : s.x[n];
                for (std::size_t i = 0; i < n; ++i) xc[i] = centroid[i] + 0.5 * (toward[i] - centroid[i]);
                const double fc = eval(xc);
                if (fc < (outside ? fr : s.f[n])) {
                    s.x[n] = xc;
                    s.f[n] = fc;
                } else {
                    for (std::size_t j = 1; j <= n; ++j) {
                        for (std::size_t i = 0; i < n; ++i) s.x[j][i] = s.x[0][i] + 0.5 * (s.x[j][i] - s.x[0][i]);
                        s.f[j] = eval(s.x[j]);
                    }
                }
            }
        }
        result.iterations += iter;
        all_converged = all_converged && converged;
    }
    result.converged = all_converged;
    return result;
}

// ---------------------------------------------------------------------------
// Ridge regression

/// Minimises ||y - X b||^2 + lambda ||b||^2 through the normal equations.
inline Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda)
{
    require(X.rows() == y.size(), ErrorCode::LengthMismatch, "design rows differ from target length");
    require(lambda >= 0, ErrorCode::InvalidArgument, "ridge penalty must be >= 0");
    require(X.allFinite() && y.allFinite(), ErrorCode::InvalidArgument, "non-finite values in regression inputs");
    const auto p = X.cols();
    if (p == 0) {
        return Eigen::VectorXd(0);
    }
    Eigen::MatrixXd gram = X.transpose() * X;
    gram.diagonal().array() += lambda;
    const Eigen::VectorXd rhs = X.transpose() * y;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const auto diag = ldlt.vectorD();
    const double scale = std::max(gram.diagonal().cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    if (ldlt.info() != Eigen::Success || (lambda == 0.0 && diag.minCoeff() <= 1e-13 * scale)) {
        fail(ErrorCode::SingularSystem, "normal equations are singular");
    }
    return ldlt.solve(rhs);
}

} // namespace feecast::numerics
