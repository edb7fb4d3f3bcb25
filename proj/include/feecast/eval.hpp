#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "feecast/dataset.hpp"
#include "feecast/error.hpp"
#include "feecast/features.hpp"
#include "feecast/gbm.hpp"
#include "feecast/hybrid.hpp"
#include "feecast/prep.hpp"
#include "feecast/sarimax.hpp"
#include "feecast/time2vec.hpp"
#include "feecast/trend.hpp"

namespace feecast::eval {

// ---------------------------------------------------------------------------
// Metrics

namespace detail {

inline void check_pair(std::span<const double> y, std::span<const double> yhat)
{
    require(y.size() == yhat.size(), ErrorCode::LengthMismatch, "actual and predicted lengths differ");
    require(!y.empty(), ErrorCode::EmptyInput, "metrics need at least one value");
}

} // namespace detail

inline double mae(std::span<const double> y, std::span<const double> yhat)
{
    detail::check_pair(y, yhat);
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
    return s / static_cast<double>(y.size());
}

inline double rmse(std::span<const double> y, std::span<const double> yhat)
{
    detail::check_pair(y, yhat);
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    return std::sqrt(s / static_cast<double>(y.size()));
}

/// Model RMSE over the RMSE of the lag-1 forecast y_{t-1}, where y_0 is
/// `anchor`, the last actual before the evaluated window.
inline double theils_u(std::span<const double> y, std::span<const double> yhat, double anchor)
{
    detail::check_pair(y, yhat);
    double num = 0, den = 0;
    double prev = anchor;
    for (std::size_t t = 0; t < y.size(); ++t) {
        num += (yhat[t] - y[t]) * (yhat[t] - y[t]);
        den += (y[t] - prev) * (y[t] - prev);
        prev = y[t];
    }
    if (den == 0) fail(ErrorCode::ConstantActuals, "lag-1 benchmark has zero error");
    return std::sqrt(num / den);
}

// ---------------------------------------------------------------------------
// Folds

struct CvFold {
    std::size_t index = 0;
    std::size_t train_end = 0; // training rows are [0, train_end)
    std::size_t test_begin = 0;
    std::size_t test_end = 0;

    [[nodiscard]] std::size_t horizon() const noexcept { return test_end - test_begin; }
    bool operator==(const CvFold&) const = default;
};

inline std::vector<CvFold> expanding_folds(std::size_t n_rows, std::size_t initial, std::size_t step, std::size_t horizon,
                                           std::size_t k_folds)
{
    require(initial >= 1 && horizon >= 1 && k_folds >= 1, ErrorCode::InvalidArgument,
            "initial window, horizon and fold count must be positive");
    require(k_folds == 1 || step >= 1, ErrorCode::InvalidArgument, "step must be positive");
    require(initial + (k_folds - 1) * step + horizon <= n_rows, ErrorCode::InsufficientRows,
            std::to_string(k_folds) + " folds need " + std::to_string(initial + (k_folds - 1) * step + horizon) +
                " rows, have " + std::to_string(n_rows));
    std::vector<CvFold> folds;
    for (std::size_t i = 0; i < k_folds; ++i) {
        const auto end = initial + i * step;
        folds.push_back({i, end, end, end + horizon});
    }
    return folds;
}

/// Initial window that makes the last fold end exactly at `n_rows`.
inline std::size_t fitted_initial(std::size_t n_rows, std::size_t step, std::size_t horizon, std::size_t k_folds)
{
    const auto need = (k_folds - 1) * step + horizon;
    require(n_rows > need, ErrorCode::InsufficientRows, "dataset too short for the requested folds");
    return n_rows - need;
}

// ---------------------------------------------------------------------------
// Models

enum class ModelKind { sarimax, trend, t2v, gbm, hybrid, naive };

inline std::string to_string(ModelKind k)
{
    switch (k) {
    case ModelKind::sarimax: return "sarimax";
    case ModelKind::trend: return "trend";
    case ModelKind::t2v: return "t2v";
    case ModelKind::gbm: return "gbm";
    case ModelKind::hybrid: return "hybrid";
    case ModelKind::naive: return "naive";
    }
    return "unknown";
}

inline ModelKind model_kind_from_string(const std::string& s)
{
    for (auto k : {ModelKind::sarimax, ModelKind::trend, ModelKind::t2v, ModelKind::gbm, ModelKind::hybrid, ModelKind::naive}) {
        if (to_string(k) == s) return k;
    }
    fail(ErrorCode::InvalidArgument, "unknown model '" + s + "'");
}

struct ModelSpec {
    ModelKind kind = ModelKind::sarimax;
    sarimax::Order order;
    sarimax::Options sarimax_options;
    trend::TrendConfig trend;
    t2v::TrainConfig t2v;
    gbm::GbmConfig gbm;
    hybrid::HybridConfig hybrid;
    features::FeatureSpec features;
    std::size_t carry_period = 144;
};

/// A model sees only the training rows it is handed and returns h forecasts
/// for the rows that follow them.
class Forecaster {
public:
    virtual ~Forecaster() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    virtual std::vector<double> fit_forecast(const Dataset& train, std::size_t h) = 0;
    /// Lag-1 benchmark: predictions are the previous realized actual, which the
    /// harness supplies instead of calling fit_forecast.
    [[nodiscard]] virtual bool uses_realized_lag() const { return false; }
};

using ForecasterFactory = std::function<std::unique_ptr<Forecaster>()>;

namespace models {

class Sarimax final : public Forecaster {
public:
    explicit Sarimax(ModelSpec s) : spec_(std::move(s)) {}
    [[nodiscard]] std::string name() const override { return "sarimax"; }
    std::vector<double> fit_forecast(const Dataset& train, std::size_t h) override
    {
        const auto raw = features::raw_matrix(train);
        const std::vector<double> y(raw.y.data(), raw.y.data() + raw.y.size());
        const auto m = sarimax::fit(y, raw.X, spec_.order, spec_.sarimax_options, raw.columns);
        return sarimax::forecast(m, static_cast<long>(h));
    }

private:
    ModelSpec spec_;
};

class Trend final : public Forecaster {
public:
    explicit Trend(ModelSpec s) : spec_(std::move(s)) {}
    [[nodiscard]] std::string name() const override { return "trend"; }
    std::vector<double> fit_forecast(const Dataset& train, std::size_t h) override
    {
        const auto y = train.column(kTargetColumn);
        std::vector<double> t(y.size()), tf(h);
        std::iota(t.begin(), t.end(), 0.0);
        std::iota(tf.begin(), tf.end(), static_cast<double>(y.size()));
        return trend::forecast(trend::fit(y, t, spec_.trend), tf);
    }

private:
    ModelSpec spec_;
};

class Time2Vec final : public Forecaster {
public:
    explicit Time2Vec(ModelSpec s) : spec_(std::move(s)) {}
    [[nodiscard]] std::string name() const override { return "t2v"; }
    std::vector<double> fit_forecast(const Dataset& train, std::size_t h) override
    {
        auto cfg = spec_.t2v;
        cfg.carry_period = spec_.carry_period;
        return t2v::forecast(t2v::train(features::build_matrix(train, spec_.features), cfg), h);
    }

private:
    ModelSpec spec_;
};

/// Standalone boosting learns y[i] from the feature row one carry period
/// earlier, which is the row the seasonal-carry policy supplies at forecast
/// time.
class Gbm final : public Forecaster {
public:
    explicit Gbm(ModelSpec s) : spec_(std::move(s)) {}
    [[nodiscard]] std::string name() const override { return "gbm"; }
    std::vector<double> fit_forecast(const Dataset& train, std::size_t h) override
    {
        const auto m = features::build_matrix(train, spec_.features);
        const auto P = static_cast<Eigen::Index>(spec_.carry_period);
        const auto n = static_cast<Eigen::Index>(m.rows());
        require(n > P, ErrorCode::TooFewRows, "boosting needs more rows than the carry period");
        const Eigen::MatrixXd X = m.X.topRows(n - P);
        const Eigen::VectorXd y = m.y.tail(n - P);
        const auto model = gbm::fit(X, y, spec_.gbm);
        Eigen::MatrixXd F(static_cast<Eigen::Index>(h), m.X.cols());
        for (std::size_t j = 0; j < h; ++j) {
            const auto row = features::seasonal_carry_row(m.rows(), spec_.carry_period, j);
            F.row(static_cast<Eigen::Index>(j)) = m.X.row(static_cast<Eigen::Index>(row));
        }
        const Eigen::VectorXd p = gbm::predict(model, F);
        return {p.data(), p.data() + p.size()};
    }

private:
    ModelSpec spec_;
};

class Hybrid final : public Forecaster {
public:
    explicit Hybrid(ModelSpec s) : spec_(std::move(s)) {}
    [[nodiscard]] std::string name() const override { return "hybrid"; }
    std::vector<double> fit_forecast(const Dataset& train, std::size_t h) override
    {
        return hybrid::forecast(hybrid::fit(train, spec_.hybrid), static_cast<long>(h)).combined;
    }

private:
    ModelSpec spec_;
};

class Naive final : public Forecaster {
public:
    [[nodiscard]] std::string name() const override { return "naive"; }
    std::vector<double> fit_forecast(const Dataset& train, std::size_t h) override
    {
        // Without realized actuals the best lag-1 forecast is a flat line.
        require(!train.empty(), ErrorCode::TooFewRows, "naive forecast needs one training row");
        return std::vector<double>(h, value(train.records.back(), kTargetColumn));
    }
    [[nodiscard]] bool uses_realized_lag() const override { return true; }
};

} // namespace models

inline std::unique_ptr<Forecaster> make_forecaster(const ModelSpec& spec)
{
    switch (spec.kind) {
    case ModelKind::sarimax: return std::make_unique<models::Sarimax>(spec);
    case ModelKind::trend: return std::make_unique<models::Trend>(spec);
    case ModelKind::t2v: return std::make_unique<models::Time2Vec>(spec);
    case ModelKind::gbm: return std::make_unique<models::Gbm>(spec);
    case ModelKind::hybrid: return std::make_unique<models::Hybrid>(spec);
    case ModelKind::naive: return std::make_unique<models::Naive>();
    }
    fail(ErrorCode::InvalidArgument, "unknown model kind");
}

inline ForecasterFactory factory_for(const ModelSpec& spec)
{
    return [spec] { return make_forecaster(spec); };
}

// ---------------------------------------------------------------------------
// Protocol

struct FoldResult {
    CvFold fold;
    std::vector<double> actual;
    std::vector<double> predicted;
    double mae = 0;
    double rmse = 0;
    double theils_u = 0;
};

struct MetricsReport {
    std::string model;
    std::vector<FoldResult> folds;
    double mae = 0;
    double rmse = 0;
    double theils_u = 0;
    double runtime_seconds = 0; // wall clock; kept out of the deterministic outputs
};

struct EvalOptions {
    bool clip = true;
    prep::ClipSpec clip_spec;
    std::vector<Column> clip_columns = prep::default_clip_columns();
};

/// Training slice for a fold: a copy of rows [0, train_end) with clip bounds
/// fitted on exactly those rows.
inline Dataset training_slice(const Dataset& d, std::size_t train_end, const EvalOptions& opt)
{
    Dataset train = d.slice(0, train_end);
    if (opt.clip) train = prep::apply_clip(train, prep::fit_clip(train, opt.clip_spec, opt.clip_columns));
    return train;
}

inline FoldResult run_fold(const ForecasterFactory& factory, const Dataset& d, const CvFold& fold, const EvalOptions& opt = {})
{
    require(fold.test_end <= d.size() && fold.train_end >= 1 && fold.test_begin == fold.train_end, ErrorCode::InvalidArgument,
            "fold outside the dataset");
    FoldResult r;
    r.fold = fold;
    for (std::size_t i = fold.test_begin; i < fold.test_end; ++i) r.actual.push_back(value(d.records[i], kTargetColumn));
    const double anchor = value(d.records[fold.train_end - 1], kTargetColumn);
    auto model = factory();
    if (model->uses_realized_lag()) {
        r.predicted.push_back(anchor);
        for (std::size_t j = 0; j + 1 < r.actual.size(); ++j) r.predicted.push_back(r.actual[j]);
    } else {
        r.predicted = model->fit_forecast(training_slice(d, fold.train_end, opt), fold.horizon());
        require(r.predicted.size() == fold.horizon(), ErrorCode::ShapeMismatch, "model returned the wrong horizon");
    }
    r.mae = mae(r.actual, r.predicted);
    r.rmse = rmse(r.actual, r.predicted);
    r.theils_u = theils_u(r.actual, r.predicted, anchor);
    return r;
}

inline MetricsReport aggregate(std::string model, std::vector<FoldResult> folds)
{
    MetricsReport rep;
    rep.model = std::move(model);
    rep.folds = std::move(folds);
    for (const auto& f : rep.folds) {
        rep.mae += f.mae;
        rep.rmse += f.rmse;
        rep.theils_u += f.theils_u;
    }
    const auto k = static_cast<double>(std::max<std::size_t>(rep.folds.size(), 1));
    rep.mae /= k;
    rep.rmse /= k;
    rep.theils_u /= k;
    return rep;
}

inline MetricsReport run_cv(const ForecasterFactory& factory, const Dataset& d, const std::vector<CvFold>& folds,
                            const EvalOptions& opt = {})
{
    const auto start = std::chrono::steady_clock::now();
    std::vector<FoldResult> results;
    for (const auto& f : folds) results.push_back(run_fold(factory, d, f, opt));
    auto rep = aggregate(factory()->name(), std::move(results));
    rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

/// Trains on everything except the final `test_len` rows and scores those.
inline MetricsReport run_test(const ForecasterFactory& factory, const Dataset& d, std::size_t test_len = 144,
                              const EvalOptions& opt = {})
{
    require(d.size() > test_len && test_len >= 1, ErrorCode::InsufficientRows, "dataset too short for the test split");
    const std::size_t end = d.size() - test_len;
    return run_cv(factory, d, {CvFold{0, end, end, d.size()}}, opt);
}

// ---------------------------------------------------------------------------
// Correlations

struct CorrelationMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd r;
    std::vector<bool> constant; // constant columns get r = 0 off the diagonal
};

/// Pearson r between the feature and target columns over rows where both
/// values are present.
inline CorrelationMatrix correlation_matrix(const Dataset& d)
{
    require(d.size() >= 2, ErrorCode::TooFewRows, "correlation needs at least two rows");
    std::vector<Column> cols = feature_columns();
    cols.push_back(kTargetColumn);
    const auto k = cols.size();
    std::vector<std::vector<double>> v;
    CorrelationMatrix out;
    for (auto c : cols) {
        v.push_back(d.column(c));
        out.names.emplace_back(name_of(c));
    }
    out.r = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    out.constant.assign(k, false);
    for (std::size_t a = 0; a < k; ++a) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double x : v[a]) {
            if (std::isnan(x)) continue;
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        out.constant[a] = !(hi > lo);
    }
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            double r = 0;
            if (!out.constant[a] && !out.constant[b]) {
                double ma = 0, mb = 0;
                std::size_t n = 0;
                for (std::size_t i = 0; i < d.size(); ++i) {
                    if (std::isnan(v[a][i]) || std::isnan(v[b][i])) continue;
                    ma += v[a][i];
                    mb += v[b][i];
                    ++n;
                }
                if (n >= 2) {
                    ma /= static_cast<double>(n);
                    mb /= static_cast<double>(n);
                    double sab = 0, saa = 0, sbb = 0;
                    for (std::size_t i = 0; i < d.size(); ++i) {
                        if (std::isnan(v[a][i]) || std::isnan(v[b][i])) continue;
                        sab += (v[a][i] - ma) * (v[b][i] - mb);
                        saa += (v[a][i] - ma) * (v[a][i] - ma);
                        sbb += (v[b][i] - mb) * (v[b][i] - mb);
                    }
                    if (saa > 0 && sbb > 0) r = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
                }
            }
            out.r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = r;
            out.r(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = r;
        }
    }
    return out;
}

} // namespace feecast::eval
