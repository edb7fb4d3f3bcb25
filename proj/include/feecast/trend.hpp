#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "feecast/error.hpp"
#include "feecast/numerics.hpp"

namespace feecast::trend {

/// Piecewise-linear trend plus Fourier seasonality, fit by ridge regression.
struct TrendConfig {
    std::size_t n_changepoints = 25;
    double changepoint_range = 0.8;
    std::size_t fourier_order = 10;
    double period = 144.0;
    double ridge_lambda = 1.0;

    void check() const
    {
        require(changepoint_range > 0 && changepoint_range <= 1, ErrorCode::InvalidArgument,
                "changepoint_range must be in (0, 1]");
        require(period > 0, ErrorCode::InvalidArgument, "season period must be positive");
        require(ridge_lambda >= 0, ErrorCode::InvalidArgument, "ridge penalty must be >= 0");
    }

    [[nodiscard]] std::size_t columns() const noexcept { return 2 + n_changepoints + 2 * fourier_order; }
};

/// Changepoints sit at evenly spaced positions of the first
/// `changepoint_range` share of the training times, excluding the first.
inline std::vector<double> changepoint_locations(std::span<const double> t, const TrendConfig& cfg)
{
    std::vector<double> cps;
    if (cfg.n_changepoints == 0 || t.empty()) return cps;
    const auto hist = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(t.size()) * cfg.changepoint_range)));
    for (std::size_t i = 1; i <= cfg.n_changepoints; ++i) {
        const double pos = static_cast<double>(i) * static_cast<double>(hist - 1) / static_cast<double>(cfg.n_changepoints);
        cps.push_back(t[static_cast<std::size_t>(std::llround(pos))]);
    }
    return cps;
}

/// Affine map of block index onto the unit training span. Trend and hinge
/// columns use scaled time so one ridge penalty is meaningful for all of them;
/// the Fourier terms keep the raw index.
struct TimeScale {
    double origin = 0.0;
    double span = 1.0;

    [[nodiscard]] double operator()(double t) const noexcept { return (t - origin) / span; }
};

inline TimeScale time_scale(std::span<const double> t)
{
    if (t.size() < 2) return {t.empty() ? 0.0 : t.front(), 1.0};
    return {t.front(), t.back() - t.front()};
}

/// Columns: 1, t, (t - c_i)_+ for each changepoint, then sin/cos pairs for
/// harmonics k = 1..K of the season period.
inline Eigen::MatrixXd design_matrix(std::span<const double> t, const TrendConfig& cfg, std::span<const double> changepoints,
                                     const TimeScale& ts = {})
{
    for (std::size_t i = 1; i < t.size(); ++i) {
        require(t[i] > t[i - 1], ErrorCode::InvalidArgument, "time index must be strictly ascending");
    }
    const auto n = static_cast<Eigen::Index>(t.size());
    const auto cols = static_cast<Eigen::Index>(2 + changepoints.size() + 2 * cfg.fourier_order);
    Eigen::MatrixXd M(n, cols);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ti = t[static_cast<std::size_t>(i)];
        Eigen::Index c = 0;
        M(i, c++) = 1.0;
        const double u = ts(ti);
        M(i, c++) = u;
        for (double cp : changepoints) M(i, c++) = ti > cp ? u - ts(cp) : 0.0;
        for (std::size_t k = 1; k <= cfg.fourier_order; ++k) {
            const double arg = 2.0 * std::numbers::pi * static_cast<double>(k) * ti / cfg.period;
            M(i, c++) = std::sin(arg);
            M(i, c++) = std::cos(arg);
        }
    }
    return M;
}

inline Eigen::MatrixXd design_matrix(std::span<const double> t, const TrendConfig& cfg)
{
    const auto cps = changepoint_locations(t, cfg);
    return design_matrix(t, cfg, cps);
}

struct TrendModel {
    TrendConfig cfg;
    std::vector<double> changepoints;
    TimeScale scale;
    Eigen::VectorXd coef;

    [[nodiscard]] double intercept() const { return coef(0) - coef(1) * scale.origin / scale.span; }
    /// Initial growth rate per block.
    [[nodiscard]] double slope() const { return coef(1) / scale.span; }
};

inline TrendModel fit(std::span<const double> y, std::span<const double> t, const TrendConfig& cfg = {})
{
    cfg.check();
    require(y.size() == t.size(), ErrorCode::LengthMismatch, "target and time index lengths differ");
    require(y.size() >= cfg.columns(), ErrorCode::TooFewRows, "fewer observations than design columns");
    TrendModel m;
    m.cfg = cfg;
    m.changepoints = changepoint_locations(t, cfg);
    m.scale = time_scale(t);
    const auto X = design_matrix(t, cfg, m.changepoints, m.scale);
    Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    // Centre so the penalty does not shrink the level.
    const double level = target.mean();
    target.array() -= level;
    m.coef = numerics::ridge_solve(X, target, cfg.ridge_lambda);
    m.coef(0) += level;
    return m;
}

inline std::vector<double> forecast(const TrendModel& m, std::span<const double> t_future)
{
    if (t_future.empty()) return {};
    const Eigen::VectorXd pred = design_matrix(t_future, m.cfg, m.changepoints, m.scale) * m.coef;
    return {pred.data(), pred.data() + pred.size()};
}

inline nlohmann::json to_json(const TrendModel& m)
{
    return {{"model", "trend"},
            {"n_changepoints", m.cfg.n_changepoints},
            {"changepoint_range", m.cfg.changepoint_range},
            {"fourier_order", m.cfg.fourier_order},
            {"period", m.cfg.period},
            {"ridge_lambda", m.cfg.ridge_lambda},
            {"changepoints", m.changepoints},
            {"time_origin", m.scale.origin},
            {"time_span", m.scale.span},
            {"coef", std::vector<double>(m.coef.data(), m.coef.data() + m.coef.size())}};
}

inline TrendModel from_json(const nlohmann::json& j)
{
    TrendModel m;
    m.cfg.n_changepoints = j.at("n_changepoints");
    m.cfg.changepoint_range = j.at("changepoint_range");
    m.cfg.fourier_order = j.at("fourier_order");
    m.cfg.period = j.at("period");
    m.cfg.ridge_lambda = j.at("ridge_lambda");
    m.changepoints = j.at("changepoints").get<std::vector<double>>();
    m.scale = {j.at("time_origin").get<double>(), j.at("time_span").get<double>()};
    const auto c = j.at("coef").get<std::vector<double>>();
    m.coef = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    return m;
}

} // namespace feecast::trend
