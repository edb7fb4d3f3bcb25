#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "feecast/error.hpp"

namespace feecast {

/// Canonical column order of the fee dataset. The CSV schema, the numeric
/// matrix view and the correlation analysis all follow this order.
enum class Column : std::size_t {
    timestamp,
    block_height,
    block_weight,
    block_interval,
    block_version,
    tx_count,
    mempool_size_mb,
    min_fee_rate,
    max_fee_rate,
    avg_fee_rate,
    median_fee_rate,
    fee_rate_10th,
    fee_rate_90th,
    fee_rate_std,
    difficulty,
    hash_rate,
    bitcoin_price_usd,
    hist_low_fee_ratio,
    hist_med_fee_ratio,
    hist_high_fee_ratio,
    fee_diversity,
    block_median_fee_rate,
};

inline constexpr std::size_t kColumnCount = 22;

inline constexpr std::array<std::string_view, kColumnCount> kColumnNames = {
    "timestamp",          "block_height",       "block_weight",        "block_interval",
    "block_version",      "tx_count",           "mempool_size_mb",     "min_fee_rate",
    "max_fee_rate",       "avg_fee_rate",       "median_fee_rate",     "fee_rate_10th",
    "fee_rate_90th",      "fee_rate_std",       "difficulty",          "hash_rate",
    "bitcoin_price_usd",  "hist_low_fee_ratio", "hist_med_fee_ratio",  "hist_high_fee_ratio",
    "fee_diversity",      "block_median_fee_rate",
};

inline constexpr Column kTargetColumn = Column::block_median_fee_rate;

constexpr std::size_t index_of(Column c) noexcept { return static_cast<std::size_t>(c); }
constexpr std::string_view name_of(Column c) noexcept { return kColumnNames[index_of(c)]; }

inline std::optional<Column> column_from_name(std::string_view name)
{
    for (std::size_t i = 0; i < kColumnCount; ++i) {
        if (kColumnNames[i] == name) {
            return static_cast<Column>(i);
        }
    }
    return std::nullopt;
}

/// Feature columns in canonical order: everything except timestamp and target.
inline std::vector<Column> feature_columns()
{
    std::vector<Column> cols;
    for (std::size_t i = index_of(Column::block_height); i < index_of(kTargetColumn); ++i) {
        cols.push_back(static_cast<Column>(i));
    }
    return cols;
}

/// Missing values are NaN; timestamp and block height are never missing.
struct FeeRecord {
    std::int64_t timestamp = 0;
    std::int64_t block_height = 0;
    double block_weight = 0;
    double block_interval = 0;
    double block_version = 0;
    double tx_count = 0;
    double mempool_size_mb = 0;
    double min_fee_rate = 0;
    double max_fee_rate = 0;
    double avg_fee_rate = 0;
    double median_fee_rate = 0;
    double fee_rate_10th = 0;
    double fee_rate_90th = 0;
    double fee_rate_std = 0;
    double difficulty = 0;
    double hash_rate = 0;
    double bitcoin_price_usd = 0;
    double hist_low_fee_ratio = 0;
    double hist_med_fee_ratio = 0;
    double hist_high_fee_ratio = 0;
    double fee_diversity = 0;
    double block_median_fee_rate = 0;

    bool operator==(const FeeRecord&) const = default;
};

namespace detail {

using DoubleMember = double FeeRecord::*;

inline constexpr std::array<DoubleMember, kColumnCount> kDoubleMembers = {
    nullptr,
    nullptr,
    &FeeRecord::block_weight,
    &FeeRecord::block_interval,
    &FeeRecord::block_version,
    &FeeRecord::tx_count,
    &FeeRecord::mempool_size_mb,
    &FeeRecord::min_fee_rate,
    &FeeRecord::max_fee_rate,
    &FeeRecord::avg_fee_rate,
    &FeeRecord::median_fee_rate,
    &FeeRecord::fee_rate_10th,
    &FeeRecord::fee_rate_90th,
    &FeeRecord::fee_rate_std,
    &FeeRecord::difficulty,
    &FeeRecord::hash_rate,
    &FeeRecord::bitcoin_price_usd,
    &FeeRecord::hist_low_fee_ratio,
    &FeeRecord::hist_med_fee_ratio,
    &FeeRecord::hist_high_fee_ratio,
    &FeeRecord::fee_diversity,
    &FeeRecord::block_median_fee_rate,
};

} // namespace detail

inline double value(const FeeRecord& r, Column c) noexcept
{
    switch (c) {
    case Column::timestamp: return static_cast<double>(r.timestamp);
    case Column::block_height: return static_cast<double>(r.block_height);
    default: return r.*detail::kDoubleMembers[index_of(c)];
    }
}

inline void set_value(FeeRecord& r, Column c, double v) noexcept
{
    switch (c) {
    case Column::timestamp: r.timestamp = static_cast<std::int64_t>(std::llround(v)); break;
    case Column::block_height: r.block_height = static_cast<std::int64_t>(std::llround(v)); break;
    default: r.*detail::kDoubleMembers[index_of(c)] = v; break;
    }
}

enum class Provenance { live, file, synthetic };

struct Dataset {
    std::vector<FeeRecord> records;
    std::vector<std::string> column_names = std::vector<std::string>(kColumnNames.begin(), kColumnNames.end());
    Provenance provenance = Provenance::file;

    [[nodiscard]] std::size_t size() const noexcept { return records.size(); }
    [[nodiscard]] bool empty() const noexcept { return records.empty(); }

    [[nodiscard]] std::vector<double> column(Column c) const
    {
        std::vector<double> out;
        out.reserve(records.size());
        for (const auto& r : records) {
            out.push_back(value(r, c));
        }
        return out;
    }

    void set_column(Column c, const std::vector<double>& values)
    {
        require(values.size() == records.size(), ErrorCode::LengthMismatch, "column length differs from dataset");
        for (std::size_t i = 0; i < values.size(); ++i) {
            set_value(records[i], c, values[i]);
        }
    }

    /// Rows [begin, end) as a new dataset.
    [[nodiscard]] Dataset slice(std::size_t begin, std::size_t end) const
    {
        require(begin <= end && end <= records.size(), ErrorCode::InvalidArgument, "slice out of range");
        Dataset out;
        out.records.assign(records.begin() + static_cast<std::ptrdiff_t>(begin),
                           records.begin() + static_cast<std::ptrdiff_t>(end));
        out.column_names = column_names;
        out.provenance = provenance;
        return out;
    }
};

// ---------------------------------------------------------------------------
// CSV persistence

/// Shortest decimal that parses back to the same double; NaN is written as an
/// empty field.
inline std::string format_double(double v)
{
    if (std::isnan(v)) {
        return {};
    }
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) {
        fail(ErrorCode::InvalidArgument, "cannot format number");
    }
    return {buf.data(), ptr};
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_double(std::string_view s)
{
    if (s.empty() || s == "nan" || s == "NaN" || s == "NA" || s == "null") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

inline bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

/// Days since 1970-01-01 for a proleptic Gregorian date.
inline std::int64_t days_from_civil(int y, unsigned m, unsigned d)
{
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

/// Integer unix seconds, or an ISO-8601 UTC date-time ("YYYY-MM-DD HH:MM:SS",
/// 'T' separator and fractional seconds / trailing zone designator tolerated).
inline std::optional<std::int64_t> parse_timestamp(std::string_view s)
{
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size()) {
        return v;
    }
    if (auto dv = parse_double(s); dv && std::isfinite(*dv) && std::floor(*dv) == *dv) {
        return static_cast<std::int64_t>(*dv);
    }
    int year = 0;
    unsigned mon = 0, day = 0, hh = 0, mm = 0, ss = 0;
    if (s.size() < 10) return std::nullopt;
    std::string buf(s);
    for (auto& ch : buf) {
        if (ch == 'T') ch = ' ';
    }
    int consumed = 0;
    if (std::sscanf(buf.c_str(), "%d-%u-%u %u:%u:%u%n", &year, &mon, &day, &hh, &mm, &ss, &consumed) < 3) {
        return std::nullopt;
    }
    if (mon < 1 || mon > 12 || day < 1 || day > 31 || hh > 23 || mm > 59 || ss > 60) {
        return std::nullopt;
    }
    return days_from_civil(year, mon, day) * 86400 + static_cast<std::int64_t>(hh) * 3600 + mm * 60 + ss;
}

} // namespace detail

inline std::string csv_header()
{
    std::string out;
    for (std::size_t i = 0; i < kColumnCount; ++i) {
        if (i) out += ',';
        out += kColumnNames[i];
    }
    return out;
}

inline std::string csv_row(const FeeRecord& r)
{
    std::string out = std::to_string(r.timestamp);
    out += ',';
    out += std::to_string(r.block_height);
    for (std::size_t i = 2; i < kColumnCount; ++i) {
        out += ',';
        out += format_double(value(r, static_cast<Column>(i)));
    }
    return out;
}

inline Dataset parse_dataset(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || detail::trim(line).empty()) {
        fail(ErrorCode::EmptyFile, "no header row");
    }
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
        line.erase(0, 3); // UTF-8 BOM
    }
    const auto header = detail::split_commas(line);

    // Canonical columns must appear in canonical relative order; unknown
    // columns anywhere are ignored.
    std::array<std::size_t, kColumnCount> position{};
    std::size_t last_pos = 0;
    bool first = true;
    for (std::size_t c = 0; c < kColumnCount; ++c) {
        std::optional<std::size_t> found;
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j] == kColumnNames[c]) {
                found = j;
                break;
            }
        }
        if (!found) {
            fail(ErrorCode::MissingColumn, std::string(kColumnNames[c]));
        }
        if (!first && *found < last_pos) {
            fail(ErrorCode::MissingColumn, std::string(kColumnNames[c]) + " (out of canonical order)");
        }
        first = false;
        last_pos = *found;
        position[c] = *found;
    }

    Dataset d;
    d.provenance = Provenance::file;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_commas(line);
        FeeRecord r;
        for (std::size_t c = 0; c < kColumnCount; ++c) {
            const std::string where = "row " + std::to_string(row) + ", column " + std::string(kColumnNames[c]);
            if (position[c] >= fields.size()) {
                fail(ErrorCode::MalformedNumber, where + " (short row)");
            }
            const auto field = fields[position[c]];
            if (c == index_of(Column::timestamp)) {
                auto ts = detail::parse_timestamp(field);
                if (!ts) fail(ErrorCode::MalformedNumber, where);
                r.timestamp = *ts;
                continue;
            }
            auto v = detail::parse_double(field);
            if (!v) fail(ErrorCode::MalformedNumber, where);
            if (c == index_of(Column::block_height)) {
                if (!std::isfinite(*v)) fail(ErrorCode::MalformedNumber, where);
                r.block_height = static_cast<std::int64_t>(*v);
                continue;
            }
            set_value(r, static_cast<Column>(c), *v);
        }
        d.records.push_back(r);
        ++row;
    }
    return d;
}

inline Dataset load_dataset(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::IoFailure, "cannot open " + path);
    }
    return parse_dataset(in);
}

inline void write_dataset(const Dataset& d, std::ostream& out)
{
    out << csv_header() << '\n';
    for (const auto& r : d.records) {
        out << csv_row(r) << '\n';
    }
}

inline void save_dataset(const Dataset& d, const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorCode::IoFailure, "cannot open " + path + " for writing");
    }
    write_dataset(d, out);
    out.flush();
    if (!out) {
        fail(ErrorCode::IoFailure, "write failed for " + path);
    }
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    std::size_t row = 0;
    std::string rule;

    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
    [[nodiscard]] std::size_t count(std::string_view rule) const
    {
        std::size_t n = 0;
        for (const auto& v : violations) n += v.rule == rule;
        return n;
    }
};

namespace detail {

inline bool present(double v) { return !std::isnan(v); }

inline bool ordered(double a, double b) { return !present(a) || !present(b) || a <= b; }

} // namespace detail

/// Checks a single record against the per-record invariants. Missing values
/// (NaN) are exempt from every rule they take part in.
inline void validate_record(const FeeRecord& r, std::size_t row, std::vector<Violation>& out)
{
    using detail::present;
    const double rates[] = {r.min_fee_rate, r.max_fee_rate,  r.avg_fee_rate,  r.median_fee_rate,
                            r.fee_rate_10th, r.fee_rate_90th, r.fee_rate_std, r.block_median_fee_rate};
    for (double v : rates) {
        if (present(v) && v < 0) {
            out.push_back({row, "negative_fee"});
            break;
        }
    }
    if (!detail::ordered(r.fee_rate_10th, r.median_fee_rate) || !detail::ordered(r.median_fee_rate, r.fee_rate_90th) ||
        !detail::ordered(r.fee_rate_10th, r.fee_rate_90th)) {
        out.push_back({row, "percentile_order"});
    }
    if (!detail::ordered(r.min_fee_rate, r.avg_fee_rate) || !detail::ordered(r.avg_fee_rate, r.max_fee_rate) ||
        !detail::ordered(r.min_fee_rate, r.max_fee_rate)) {
        out.push_back({row, "min_avg_max_order"});
    }
    const double ratios[] = {r.hist_low_fee_ratio, r.hist_med_fee_ratio, r.hist_high_fee_ratio};
    bool ratios_present = true;
    bool any_nonzero = false;
    for (double v : ratios) {
        ratios_present = ratios_present && present(v);
        if (present(v) && (v < 0 || v > 1)) {
            out.push_back({row, "ratio_range"});
            break;
        }
    }
    if (ratios_present) {
        for (double v : ratios) any_nonzero = any_nonzero || v != 0;
        const double sum = ratios[0] + ratios[1] + ratios[2];
        if (any_nonzero && std::abs(sum - 1.0) > 1e-9) {
            out.push_back({row, "ratio_sum"});
        }
    }
    if (present(r.fee_diversity) && (r.fee_diversity < 0 || r.fee_diversity > 1)) {
        out.push_back({row, "diversity_range"});
    }
}

inline ValidationReport validate(const Dataset& d)
{
    ValidationReport report;
    for (std::size_t i = 0; i < d.records.size(); ++i) {
        const auto& r = d.records[i];
        if (i > 0) {
            const auto& prev = d.records[i - 1];
            if (r.block_height <= prev.block_height) report.violations.push_back({i, "height_monotonic"});
            if (r.timestamp < prev.timestamp) report.violations.push_back({i, "timestamp_monotonic"});
        }
        validate_record(r, i, report.violations);
    }
    return report;
}

} // namespace feecast
