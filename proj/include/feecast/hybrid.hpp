#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "feecast/error.hpp"
#include "feecast/features.hpp"
#include "feecast/gbm.hpp"
#include "feecast/numerics.hpp"
#include "feecast/sarimax.hpp"

namespace feecast::hybrid {

/// Weight on the statistical stage: 1 / (1 + exp(ema_es - ema_eg)).
/// Evaluated so that the larger of alpha(a, b) and alpha(b, a) is formed as
/// one minus the smaller, which makes the pair sum to exactly one.
inline double dynamic_weight(double ema_es, double ema_eg)
{
    const double x = ema_es - ema_eg;
    if (x >= 0) return 1.0 / (1.0 + std::exp(x));
    return 1.0 - 1.0 / (1.0 + std::exp(-x));
}

struct HybridConfig {
    sarimax::Order order;
    sarimax::Options sarimax_options;
    gbm::GbmConfig gbm;
    std::size_t rolling_window = 36;
    std::vector<std::size_t> lags = {1, 2, 3, 144};
    std::size_t ema_window = 144;
    std::size_t carry_period = 144;

    void check() const
    {
        require(rolling_window >= 2, ErrorCode::InvalidArgument, "rolling window must be >= 2");
        require(ema_window >= 1 && carry_period >= 1, ErrorCode::InvalidArgument, "EMA window and carry period must be >= 1");
        for (auto l : lags) require(l >= 1, ErrorCode::InvalidArgument, "lags must be >= 1");
    }
};

namespace detail {

inline std::vector<double> shift_one(const std::vector<double>& v)
{
    std::vector<double> out(v.size());
    if (v.empty()) return out;
    out[0] = v[0];
    for (std::size_t i = 1; i < v.size(); ++i) out[i] = v[i - 1];
    return out;
}

inline std::vector<double> shifted_rolling(const std::vector<double>& s, std::size_t w, bool want_mean)
{
    auto rs = features::rolling_stats(s, w);
    features::fill_leading_rolling(s, rs);
    return shift_one(want_mean ? rs.mean : rs.std);
}

} // namespace detail

inline constexpr const char* kStatColumn = "yhat_sarimax";
inline constexpr const char* kResidualColumn = "resid_sarimax_prev";

/// Stage-two design: raw features, the stage-one fit, its residual and the
/// target/residual summaries. Every engineered column at row i reads only rows
/// before i (the first row reuses its own value), so the target of row i
/// never leaks into its features.
inline features::FeatureMatrix build_enhanced(const features::FeatureMatrix& raw, std::span<const double> y_s,
                                              std::span<const double> r_s, std::size_t w, const std::vector<std::size_t>& lags,
                                              const std::string& target_name = std::string(name_of(kTargetColumn)))
{
    const auto n = raw.rows();
    require(y_s.size() == n && r_s.size() == n && static_cast<std::size_t>(raw.y.size()) == n, ErrorCode::LengthMismatch,
            "stage-one series must align with the feature matrix");
    features::FeatureMatrix m = raw;
    const std::vector<double> y(raw.y.data(), raw.y.data() + raw.y.size());
    const std::vector<double> r(r_s.begin(), r_s.end());
    features::append_column(m, {y_s.begin(), y_s.end()}, kStatColumn);
    features::append_column(m, detail::shift_one(r), kResidualColumn);
    if (n == 0) return m;
    features::append_column(m, detail::shifted_rolling(y, w, true), target_name + "_roll_mean_prev");
    features::append_column(m, detail::shifted_rolling(y, w, false), target_name + "_roll_std_prev");
    features::append_column(m, detail::shifted_rolling(r, w, true), "resid_roll_mean_prev");
    features::append_column(m, detail::shifted_rolling(r, w, false), "resid_roll_std_prev");
    for (const auto* src : {&y, &r}) {
        const std::string base = src == &y ? target_name : std::string("resid");
        for (auto lag : lags) {
            if (lag >= n) continue;
            auto col = features::lagged(*src, {lag}).front();
            features::fill_leading_lag(*src, col);
            features::append_column(m, col, base + "_lag" + std::to_string(lag));
        }
    }
    return m;
}

struct HybridState {
    HybridConfig cfg;
    sarimax::SarimaxModel stat;
    gbm::GbmModel boost;
    std::vector<std::string> columns; // stage-two column names
    Eigen::MatrixXd enhanced_tail;    // last carry_period rows of the stage-two design
    std::vector<double> y_s, r_s;     // in-sample stage-one fit and residual
    double ema_es = 0;
    double ema_eg = 0;
    double alpha = 0.5;
};

/// Fits stage one on (y, X), stage two on the enhanced design, and sets the
/// weight from EMAs of the last ema_window absolute in-sample errors.
inline HybridState fit(const features::FeatureMatrix& raw, const HybridConfig& cfg = {})
{
    cfg.check();
    const auto n = raw.rows();
    require(n >= cfg.carry_period, ErrorCode::TooFewRows, "hybrid needs at least one carry period of rows");
    HybridState st;
    st.cfg = cfg;
    const std::vector<double> y(raw.y.data(), raw.y.data() + raw.y.size());
    st.stat = sarimax::fit(y, raw.X, cfg.order, cfg.sarimax_options, raw.columns);
    const auto ins = sarimax::in_sample_predictions(st.stat);
    st.y_s = ins.fitted;
    st.r_s = ins.residuals;

    const auto enh = build_enhanced(raw, st.y_s, st.r_s, cfg.rolling_window, cfg.lags);
    st.columns = enh.columns;
    st.boost = gbm::fit(enh.X, enh.y, cfg.gbm);
    const Eigen::VectorXd y_g = gbm::predict(st.boost, enh.X);

    const std::size_t k = std::min(cfg.ema_window, n);
    std::vector<double> es(k), eg(k);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t i = n - k + j;
        es[j] = std::abs(st.r_s[i]);
        eg[j] = std::abs(y[i] - y_g(static_cast<Eigen::Index>(i)));
    }
    st.ema_es = numerics::ema(es, cfg.ema_window);
    st.ema_eg = numerics::ema(eg, cfg.ema_window);
    st.alpha = dynamic_weight(st.ema_es, st.ema_eg);
    st.enhanced_tail = enh.X.bottomRows(static_cast<Eigen::Index>(cfg.carry_period));
    return st;
}

inline HybridState fit(const Dataset& d, const HybridConfig& cfg = {}) { return fit(features::raw_matrix(d), cfg); }

struct ForecastSeries {
    std::vector<double> combined;
    std::vector<double> statistical;
    std::vector<double> boosted;
    double alpha = 0.5;
};

/// Stage-two rows for the horizon: seasonal carry of the training design,
/// with the stage-one forecast inserted and the unknowable residual set to 0.
inline Eigen::MatrixXd future_design(const HybridState& st, std::span<const double> y_s_future)
{
    const auto H = static_cast<Eigen::Index>(y_s_future.size());
    const auto T = static_cast<std::size_t>(st.enhanced_tail.rows());
    const auto stat_col = static_cast<Eigen::Index>(std::find(st.columns.begin(), st.columns.end(), kStatColumn) - st.columns.begin());
    Eigen::MatrixXd F(H, st.enhanced_tail.cols());
    for (Eigen::Index j = 0; j < H; ++j) {
        F.row(j) = st.enhanced_tail.row(static_cast<Eigen::Index>(features::seasonal_carry_row(T, T, static_cast<std::size_t>(j))));
        F(j, stat_col) = y_s_future[static_cast<std::size_t>(j)];
        F(j, stat_col + 1) = 0.0;
    }
    return F;
}

/// Combines the two stages with the weight frozen at fit time, or with
/// `alpha_override` when given.
inline ForecastSeries forecast(const HybridState& st, long h, std::optional<Eigen::MatrixXd> X_future = std::nullopt,
                               std::optional<double> alpha_override = std::nullopt)
{
    if (h <= 0) fail(ErrorCode::HorizonNonPositive, "forecast horizon must be >= 1");
    ForecastSeries out;
    out.statistical = sarimax::forecast(st.stat, h, X_future);
    Eigen::MatrixXd F = future_design(st, out.statistical);
    if (X_future) {
        require(X_future->rows() == h && X_future->cols() == static_cast<Eigen::Index>(st.stat.n_exog()), ErrorCode::ShapeMismatch,
                "future exogenous matrix must have h rows and one column per regressor");
        F.leftCols(X_future->cols()) = *X_future;
    }
    const Eigen::VectorXd g = gbm::predict(st.boost, F);
    out.boosted.assign(g.data(), g.data() + g.size());
    out.alpha = alpha_override.value_or(st.alpha);
    require(out.alpha >= 0 && out.alpha <= 1, ErrorCode::InvalidArgument, "alpha must be in [0, 1]");
    out.combined.resize(out.statistical.size());
    for (std::size_t j = 0; j < out.combined.size(); ++j) {
        out.combined[j] = out.alpha * out.statistical[j] + (1 - out.alpha) * out.boosted[j];
    }
    return out;
}

inline nlohmann::json to_json(const HybridState& st)
{
    return {{"model", "hybrid"},
            {"sarimax", sarimax::to_json(st.stat)},
            {"gbm", gbm::to_json(st.boost)},
            {"columns", st.columns},
            {"enhanced_tail", sarimax::matrix_to_json(st.enhanced_tail)},
            {"rolling_window", st.cfg.rolling_window},
            {"lags", st.cfg.lags},
            {"ema_window", st.cfg.ema_window},
            {"carry_period", st.cfg.carry_period},
            {"ema_es", st.ema_es},
            {"ema_eg", st.ema_eg},
            {"alpha", st.alpha}};
}

inline HybridState from_json(const nlohmann::json& j)
{
    HybridState st;
    st.stat = sarimax::from_json(j.at("sarimax"));
    st.boost = gbm::from_json(j.at("gbm"));
    st.cfg.order = st.stat.order;
    st.cfg.sarimax_options = st.stat.options;
    st.cfg.gbm = st.boost.cfg;
    st.columns = j.at("columns").get<std::vector<std::string>>();
    st.enhanced_tail = sarimax::matrix_from_json(j.at("enhanced_tail"), static_cast<Eigen::Index>(st.columns.size()));
    st.cfg.rolling_window = j.at("rolling_window");
    st.cfg.lags = j.at("lags").get<std::vector<std::size_t>>();
    st.cfg.ema_window = j.at("ema_window");
    st.cfg.carry_period = j.at("carry_period");
    st.ema_es = j.at("ema_es");
    st.ema_eg = j.at("ema_eg");
    st.alpha = j.at("alpha");
    return st;
}

} // namespace feecast::hybrid
