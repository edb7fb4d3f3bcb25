#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "feecast/dataset.hpp"
#include "feecast/stats.hpp"

namespace feecast::features {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Mempool fee histograms

struct FeeHistogram {
    std::vector<double> bin_edges; // ascending; bin i is [edges[i], edges[i+1])
    std::vector<double> bin_mass;  // one per bin

    [[nodiscard]] std::size_t bins() const noexcept { return bin_mass.size(); }
    [[nodiscard]] double total() const
    {
        double t = 0;
        for (double m : bin_mass) t += m;
        return t;
    }
};

inline std::vector<double> default_bin_edges()
{
    return {0, 1, 2, 3, 5, 8, 12, 20, 50, 100, kInf};
}

/// Counts rates into half-open bins. Rates at or above the last edge land in
/// the final bin, rates below the first edge in the first.
inline FeeHistogram histogram_from_rates(std::span<const double> rates, std::span<const double> edges)
{
    require(edges.size() >= 2, ErrorCode::InvalidArgument, "histogram needs at least two edges");
    for (std::size_t i = 1; i < edges.size(); ++i) {
        require(edges[i] > edges[i - 1], ErrorCode::InvalidArgument, "histogram edges must be strictly ascending");
    }
    FeeHistogram h{{edges.begin(), edges.end()}, std::vector<double>(edges.size() - 1, 0.0)};
    for (double r : rates) {
        if (std::isnan(r)) continue;
        // upper_bound finds the first edge > r; the bin is the one before it.
        auto it = std::upper_bound(edges.begin(), edges.end(), r);
        auto idx = static_cast<std::ptrdiff_t>(it - edges.begin()) - 1;
        idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(h.bins()) - 1);
        h.bin_mass[static_cast<std::size_t>(idx)] += 1.0;
    }
    return h;
}

struct FeeRatios {
    double low = 0;
    double med = 0;
    double high = 0;
};

/// Mass fractions below t_low, in [t_low, t_high) and at or above t_high. A bin
/// is classified by its lower edge; empty histograms give (0, 0, 0).
inline FeeRatios fee_ratios(const FeeHistogram& h, double t_low, double t_high)
{
    require(t_low < t_high, ErrorCode::InvalidArgument, "t_low must be below t_high");
    const double total = h.total();
    if (total <= 0) return {};
    FeeRatios r;
    for (std::size_t i = 0; i < h.bins(); ++i) {
        const double lo = h.bin_edges[i];
        if (lo < t_low) {
            r.low += h.bin_mass[i];
        } else if (lo < t_high) {
            r.med += h.bin_mass[i];
        } else {
            r.high += h.bin_mass[i];
        }
    }
    r.low /= total;
    r.med /= total;
    r.high /= total;
    return r;
}

/// Shannon entropy of the bin distribution normalised by ln(bins).
inline double fee_diversity(const FeeHistogram& h)
{
    const double total = h.total();
    std::size_t nonempty = 0;
    for (double m : h.bin_mass) nonempty += m > 0;
    if (total <= 0 || nonempty <= 1 || h.bins() < 2) return 0.0;
    double H = 0;
    for (double m : h.bin_mass) {
        if (m <= 0) continue;
        const double p = m / total;
        H -= p * std::log(p);
    }
    return std::clamp(H / std::log(static_cast<double>(h.bins())), 0.0, 1.0);
}

/// Summary statistics of per-transaction fee rates. An empty mempool yields
/// all zeros.
struct FeeSummary {
    double min = 0, max = 0, avg = 0, median = 0, p10 = 0, p90 = 0, std = 0;
};

inline FeeSummary summarize_rates(std::span<const double> rates)
{
    if (rates.empty()) return {};
    FeeSummary s;
    s.min = *std::min_element(rates.begin(), rates.end());
    s.max = *std::max_element(rates.begin(), rates.end());
    s.avg = stats::mean(rates);
    s.std = stats::stddev(rates);
    s.median = stats::nearest_rank(rates, 50);
    s.p10 = stats::nearest_rank(rates, 10);
    s.p90 = stats::nearest_rank(rates, 90);
    return s;
}

// ---------------------------------------------------------------------------
// Rolling statistics and lags

struct RollingStats {
    std::vector<double> mean;
    std::vector<double> std;
};

/// Trailing window of w values including the current one; the first w-1
/// entries are NaN.
inline RollingStats rolling_stats(std::span<const double> series, std::size_t w)
{
    require(w >= 2, ErrorCode::InvalidArgument, "rolling window must be >= 2");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    RollingStats out{std::vector<double>(series.size(), nan), std::vector<double>(series.size(), nan)};
    for (std::size_t i = w - 1; i < series.size(); ++i) {
        // Two-pass over the window; w is small and this keeps the constant
        // case exactly zero.
        double m = 0;
        for (std::size_t k = i + 1 - w; k <= i; ++k) m += series[k];
        m /= static_cast<double>(w);
        double v = 0;
        for (std::size_t k = i + 1 - w; k <= i; ++k) v += (series[k] - m) * (series[k] - m);
        out.mean[i] = m;
        out.std[i] = std::sqrt(v / static_cast<double>(w));
    }
    return out;
}

inline std::vector<std::vector<double>> lagged(std::span<const double> series, const std::vector<std::size_t>& lags)
{
    std::vector<std::vector<double>> out;
    for (auto lag : lags) {
        require(lag >= 1, ErrorCode::InvalidArgument, "lags must be >= 1");
        require(lag < series.size(), ErrorCode::LagTooLarge,
                "lag " + std::to_string(lag) + " does not fit a series of length " + std::to_string(series.size()));
        std::vector<double> col(series.size(), std::numeric_limits<double>::quiet_NaN());
        for (std::size_t i = lag; i < series.size(); ++i) col[i] = series[i - lag];
        out.push_back(std::move(col));
    }
    return out;
}

/// Causal replacement for the leading gaps of engineered columns: rolling
/// statistics fall back to an expanding window and lags to the first
/// observation, so row i never reads rows after i.
inline void fill_leading_rolling(std::span<const double> series, RollingStats& rs)
{
    double sum = 0;
    for (std::size_t i = 0; i < series.size() && std::isnan(rs.mean[i]); ++i) {
        sum += series[i];
        const double m = sum / static_cast<double>(i + 1);
        double v = 0;
        for (std::size_t k = 0; k <= i; ++k) v += (series[k] - m) * (series[k] - m);
        rs.mean[i] = m;
        rs.std[i] = std::sqrt(v / static_cast<double>(i + 1));
    }
}

inline void fill_leading_lag(std::span<const double> series, std::vector<double>& col)
{
    for (std::size_t i = 0; i < col.size() && std::isnan(col[i]); ++i) col[i] = series.front();
}

// ---------------------------------------------------------------------------
// Feature matrix

struct FeatureSpec {
    std::size_t rolling_window = 36; // 0 disables rolling statistics
    std::vector<std::size_t> lags = {1, 2, 3, 144};
    std::vector<double> bin_edges = default_bin_edges();
    double t_low = 3;
    double t_high = 12;

    void check() const
    {
        require(rolling_window == 0 || rolling_window >= 2, ErrorCode::InvalidArgument, "rolling window must be >= 2");
        for (auto l : lags) require(l >= 1, ErrorCode::InvalidArgument, "lags must be >= 1");
        require(t_low < t_high, ErrorCode::InvalidArgument, "t_low must be below t_high");
    }
};

struct FeatureMatrix {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> columns;

    [[nodiscard]] std::size_t rows() const noexcept { return static_cast<std::size_t>(X.rows()); }
    [[nodiscard]] std::size_t cols() const noexcept { return static_cast<std::size_t>(X.cols()); }
};

/// Appends `col` as a new column of X.
inline void append_column(FeatureMatrix& m, const std::vector<double>& col, std::string name)
{
    require(col.size() == static_cast<std::size_t>(m.X.rows()), ErrorCode::LengthMismatch, "column length mismatch: " + name);
    m.X.conservativeResize(m.X.rows(), m.X.cols() + 1);
    for (std::size_t i = 0; i < col.size(); ++i) m.X(static_cast<Eigen::Index>(i), m.X.cols() - 1) = col[i];
    m.columns.push_back(std::move(name));
}

/// Raw feature columns of a dataset (canonical order, no timestamp/target).
inline FeatureMatrix raw_matrix(const Dataset& d, Column target = kTargetColumn)
{
    const auto cols = feature_columns();
    FeatureMatrix m;
    m.X.resize(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(cols.size()));
    m.y.resize(static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            m.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value(d.records[i], cols[j]);
        }
        m.y(static_cast<Eigen::Index>(i)) = value(d.records[i], target);
    }
    for (auto c : cols) m.columns.emplace_back(name_of(c));
    return m;
}

/// Raw features, then rolling mean/std of the target, then target lags. Lags
/// that do not fit the series are skipped rather than rejected so short
/// training folds still produce a matrix.
inline FeatureMatrix build_matrix(const Dataset& d, const FeatureSpec& spec, Column target = kTargetColumn)
{
    spec.check();
    FeatureMatrix m = raw_matrix(d, target);
    const auto y = d.column(target);
    if (spec.rolling_window >= 2 && !y.empty()) {
        auto rs = rolling_stats(y, spec.rolling_window);
        fill_leading_rolling(y, rs);
        append_column(m, rs.mean, std::string(name_of(target)) + "_roll_mean");
        append_column(m, rs.std, std::string(name_of(target)) + "_roll_std");
    }
    for (auto lag : spec.lags) {
        if (lag >= y.size()) continue;
        auto col = lagged(y, {lag}).front();
        fill_leading_lag(y, col);
        append_column(m, col, std::string(name_of(target)) + "_lag" + std::to_string(lag));
    }
    return m;
}

/// Row indices used for the "seasonal carry" exogenous policy: future step j
/// (0-based) reuses row T - period + (j mod period).
inline std::size_t seasonal_carry_row(std::size_t T, std::size_t period, std::size_t j)
{
    require(period >= 1 && T >= period, ErrorCode::SeriesTooShort, "history shorter than the carry period");
    return T - period + (j % period);
}

} // namespace feecast::features
