#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <unordered_set>
#include <utility>
#include <vector>

#include "feecast/dataset.hpp"
#include "feecast/stats.hpp"

namespace feecast::prep {

/// Keeps the first record of every block height, preserving order.
inline Dataset dedup(const Dataset& d)
{
    Dataset out;
    out.column_names = d.column_names;
    out.provenance = d.provenance;
    std::unordered_set<std::int64_t> seen;
    for (const auto& r : d.records) {
        if (seen.insert(r.block_height).second) {
            out.records.push_back(r);
        }
    }
    return out;
}

/// Forward fill, then backward fill for any leading gap.
inline void fill_series(std::vector<double>& v)
{
    double last = std::numeric_limits<double>::quiet_NaN();
    for (auto& x : v) {
        if (std::isnan(x)) {
            x = last;
        } else {
            last = x;
        }
    }
    last = std::numeric_limits<double>::quiet_NaN();
    for (auto it = v.rbegin(); it != v.rend(); ++it) {
        if (std::isnan(*it)) {
            *it = last;
        } else {
            last = *it;
        }
    }
}

inline Dataset fill_missing(const Dataset& d)
{
    Dataset out = d;
    if (d.empty()) return out;
    for (std::size_t c = 0; c < kColumnCount; ++c) {
        const auto col = static_cast<Column>(c);
        auto v = d.column(col);
        const bool any_missing = std::any_of(v.begin(), v.end(), [](double x) { return std::isnan(x); });
        if (!any_missing) continue;
        const bool all_missing = std::all_of(v.begin(), v.end(), [](double x) { return std::isnan(x); });
        if (all_missing) {
            fail(ErrorCode::AllMissingColumn, std::string(name_of(col)));
        }
        fill_series(v);
        out.set_column(col, v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Percentile clipping and standardization

struct ClipSpec {
    double lower_pct = 1.0;
    double upper_pct = 99.0;
    std::map<Column, std::pair<double, double>> overrides;

    [[nodiscard]] std::pair<double, double> bounds_for(Column c) const
    {
        auto it = overrides.find(c);
        return it == overrides.end() ? std::pair{lower_pct, upper_pct} : it->second;
    }

    void check() const
    {
        auto ok = [](double lo, double hi) { return lo >= 0 && hi <= 100 && lo < hi; };
        require(ok(lower_pct, upper_pct), ErrorCode::InvalidArgument, "clip percentiles must satisfy 0 <= lower < upper <= 100");
        for (const auto& [c, b] : overrides) {
            require(ok(b.first, b.second), ErrorCode::InvalidArgument,
                    "clip override for " + std::string(name_of(c)) + " is invalid");
        }
    }
};

/// Default clip set: volatile block and mempool measurements. Identifiers,
/// network-wide parameters, bounded ratios and the target are left alone.
inline std::vector<Column> default_clip_columns()
{
    return {Column::block_weight,    Column::block_interval, Column::tx_count,       Column::mempool_size_mb,
            Column::min_fee_rate,    Column::max_fee_rate,   Column::avg_fee_rate,   Column::median_fee_rate,
            Column::fee_rate_10th,   Column::fee_rate_90th,  Column::fee_rate_std};
}

struct ColumnStat {
    double mean = 0;
    double std = 0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
};

/// Statistics fitted on rows [fit_begin, fit_end) of some dataset. Anything
/// applied to rows >= fit_end is leakage-free by construction.
struct ColumnStats {
    std::map<Column, ColumnStat> columns;
    std::size_t fit_begin = 0;
    std::size_t fit_end = 0;
};

namespace detail {

inline std::vector<double> slice_column(const Dataset& d, Column c, std::size_t begin, std::size_t end)
{
    std::vector<double> v;
    v.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) v.push_back(value(d.records[i], c));
    return v;
}

inline std::pair<std::size_t, std::size_t> resolve_range(const Dataset& d, std::optional<std::pair<std::size_t, std::size_t>> rows)
{
    auto range = rows.value_or(std::pair<std::size_t, std::size_t>{0, d.size()});
    require(range.first <= range.second && range.second <= d.size(), ErrorCode::InvalidArgument, "fit range out of bounds");
    return range;
}

} // namespace detail

inline ColumnStats fit_clip(const Dataset& d, const ClipSpec& spec, const std::vector<Column>& columns,
                            std::optional<std::pair<std::size_t, std::size_t>> rows = std::nullopt)
{
    spec.check();
    const auto [begin, end] = detail::resolve_range(d, rows);
    require(end > begin, ErrorCode::EmptyFitSlice, "clip statistics need at least one row");
    ColumnStats stats;
    stats.fit_begin = begin;
    stats.fit_end = end;
    for (auto c : columns) {
        if (c == kTargetColumn || c == Column::timestamp || c == Column::block_height) continue;
        const auto v = detail::slice_column(d, c, begin, end);
        const bool all_nan = std::all_of(v.begin(), v.end(), [](double x) { return std::isnan(x); });
        if (all_nan) continue;
        const auto [lo_pct, hi_pct] = spec.bounds_for(c);
        ColumnStat st;
        st.lower = stats::nearest_rank(v, lo_pct);
        st.upper = stats::nearest_rank(v, hi_pct);
        stats.columns[c] = st;
    }
    return stats;
}

inline Dataset apply_clip(const Dataset& d, const ColumnStats& stats)
{
    Dataset out = d;
    for (auto& r : out.records) {
        for (const auto& [c, st] : stats.columns) {
            if (c == kTargetColumn) continue;
            const double v = value(r, c);
            if (std::isnan(v)) continue;
            set_value(r, c, std::clamp(v, st.lower, st.upper));
        }
    }
    return out;
}

inline ColumnStats fit_standardize(const Dataset& d, const std::vector<Column>& columns,
                                   std::optional<std::pair<std::size_t, std::size_t>> rows = std::nullopt)
{
    const auto [begin, end] = detail::resolve_range(d, rows);
    require(end > begin, ErrorCode::EmptyFitSlice, "standardization statistics need at least one row");
    ColumnStats stats;
    stats.fit_begin = begin;
    stats.fit_end = end;
    for (auto c : columns) {
        if (c == kTargetColumn) continue;
        const auto v = detail::slice_column(d, c, begin, end);
        ColumnStat st;
        st.mean = stats::mean(v);
        st.std = stats::stddev(v);
        stats.columns[c] = st;
    }
    return stats;
}

inline double standardize_value(double x, const ColumnStat& st)
{
    return st.std > 0 ? (x - st.mean) / st.std : 0.0;
}

inline double unstandardize_value(double z, const ColumnStat& st)
{
    return st.std > 0 ? z * st.std + st.mean : st.mean;
}

/// Standardized values are returned in a separate matrix view because the
/// integer-typed record fields cannot hold z-scores. Row i, column j is the
/// z-score of `columns[j]`.
struct StandardizedColumns {
    std::vector<Column> columns;
    std::vector<std::vector<double>> values;
};

inline StandardizedColumns apply_standardize(const Dataset& d, const ColumnStats& stats)
{
    StandardizedColumns out;
    for (const auto& [c, st] : stats.columns) out.columns.push_back(c);
    out.values.assign(d.size(), std::vector<double>(out.columns.size()));
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < out.columns.size(); ++j) {
            out.values[i][j] = standardize_value(value(d.records[i], out.columns[j]), stats.columns.at(out.columns[j]));
        }
    }
    return out;
}

inline Dataset inverse_standardize(const Dataset& like, const StandardizedColumns& z, const ColumnStats& stats)
{
    require(z.values.size() == like.size(), ErrorCode::LengthMismatch, "row count differs");
    Dataset out = like;
    for (std::size_t i = 0; i < like.size(); ++i) {
        for (std::size_t j = 0; j < z.columns.size(); ++j) {
            set_value(out.records[i], z.columns[j], unstandardize_value(z.values[i][j], stats.columns.at(z.columns[j])));
        }
    }
    return out;
}

} // namespace feecast::prep
