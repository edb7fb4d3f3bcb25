#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "feecast/error.hpp"

namespace feecast::stats {

/// Nearest-rank percentile: the smallest value whose rank r satisfies
/// r >= ceil(pct/100 * n), with pct = 0 mapping to the minimum. NaNs are
/// ignored. Every percentile in the library goes through this function.
inline double nearest_rank(std::span<const double> values, double pct)
{
    require(pct >= 0 && pct <= 100, ErrorCode::InvalidArgument, "percentile must be in [0,100]");
    std::vector<double> v;
    v.reserve(values.size());
    for (double x : values) {
        if (!std::isnan(x)) v.push_back(x);
    }
    require(!v.empty(), ErrorCode::EmptyInput, "percentile of an empty sample");
    std::sort(v.begin(), v.end());
    const auto n = static_cast<double>(v.size());
    auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, v.size());
    return v[rank - 1];
}

inline double mean(std::span<const double> v)
{
    require(!v.empty(), ErrorCode::EmptyInput, "mean of an empty sample");
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Population standard deviation (divides by n).
inline double stddev(std::span<const double> v)
{
    const double m = mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

} // namespace feecast::stats
