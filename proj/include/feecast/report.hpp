#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "feecast/dataset.hpp"
#include "feecast/error.hpp"
#include "feecast/eval.hpp"

namespace feecast::report {

/// Per-fold rows followed by a "mean" row. Runtime is deliberately absent so
/// identical runs produce identical files.
inline std::string metrics_csv(const eval::MetricsReport& r)
{
    std::ostringstream out;
    out << "model,fold,train_end,test_begin,test_end,mae,rmse,theils_u\n";
    for (const auto& f : r.folds) {
        out << r.model << ',' << f.fold.index << ',' << f.fold.train_end << ',' << f.fold.test_begin << ',' << f.fold.test_end << ','
            << format_double(f.mae) << ',' << format_double(f.rmse) << ',' << format_double(f.theils_u) << '\n';
    }
    out << r.model << ",mean,,,," << format_double(r.mae) << ',' << format_double(r.rmse) << ',' << format_double(r.theils_u) << '\n';
    return out.str();
}

inline nlohmann::ordered_json metrics_json(const eval::MetricsReport& r)
{
    nlohmann::ordered_json folds = nlohmann::ordered_json::array();
    for (const auto& f : r.folds) {
        folds.push_back({{"index", f.fold.index},
                         {"train_end", f.fold.train_end},
                         {"test_begin", f.fold.test_begin},
                         {"test_end", f.fold.test_end},
                         {"mae", f.mae},
                         {"rmse", f.rmse},
                         {"theils_u", f.theils_u}});
    }
    return {{"model", r.model},
            {"folds", std::move(folds)},
            {"aggregate", {{"mae", r.mae}, {"rmse", r.rmse}, {"theils_u", r.theils_u}}}};
}

inline std::string predictions_csv(const eval::MetricsReport& r)
{
    std::ostringstream out;
    out << "fold,row,actual,predicted\n";
    for (const auto& f : r.folds) {
        for (std::size_t j = 0; j < f.actual.size(); ++j) {
            out << f.fold.index << ',' << f.fold.test_begin + j << ',' << format_double(f.actual[j]) << ','
                << format_double(f.predicted[j]) << '\n';
        }
    }
    return out.str();
}

inline std::string forecast_csv(const std::vector<double>& values, std::int64_t first_height)
{
    std::ostringstream out;
    out << "step,block_height,forecast\n";
    for (std::size_t j = 0; j < values.size(); ++j) {
        out << j + 1 << ',' << first_height + static_cast<std::int64_t>(j) << ',' << format_double(values[j]) << '\n';
    }
    return out.str();
}

inline std::string correlation_csv(const eval::CorrelationMatrix& c)
{
    std::ostringstream out;
    out << "column";
    for (const auto& n : c.names) out << ',' << n;
    out << '\n';
    for (std::size_t i = 0; i < c.names.size(); ++i) {
        out << c.names[i];
        for (std::size_t j = 0; j < c.names.size(); ++j) {
            out << ',' << format_double(c.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
        out << '\n';
    }
    return out.str();
}

namespace detail {

inline std::string fixed(double v, int digits = 2)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string escape(const std::string& s)
{
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

} // namespace detail

struct Series {
    std::string label;
    std::vector<double> values;
    std::string color;
};

/// Polyline chart of one or more equally spaced series with a legend.
inline std::string line_plot_svg(const std::string& title, const std::vector<Series>& series, const std::string& x_label = "step",
                                 const std::string& y_label = "sat/vB")
{
    constexpr double W = 800, H = 400, left = 70, right = 20, top = 40, bottom = 50;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t n = 0;
    for (const auto& s : series) {
        n = std::max(n, s.values.size());
        for (double v : s.values) {
            if (!std::isfinite(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(hi >= lo)) lo = 0, hi = 1;
    if (hi == lo) lo -= 1, hi += 1;
    const double pad = (hi - lo) * 0.05;
    lo -= pad;
    hi += pad;
    auto px = [&](std::size_t i) { return left + (n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.5) * (W - left - right); };
    auto py = [&](double v) { return top + (hi - v) / (hi - lo) * (H - top - bottom); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << detail::escape(title) << "</text>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        const double y = py(v);
        svg << "<line x1=\"" << left - 4 << "\" y1=\"" << detail::fixed(y) << "\" x2=\"" << left << "\" y2=\"" << detail::fixed(y)
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << left - 6 << "\" y=\"" << detail::fixed(y + 4) << "\" text-anchor=\"end\">" << detail::fixed(v) << "</text>\n";
    }
    for (int k = 0; k <= 4 && n > 0; ++k) {
        const auto i = static_cast<std::size_t>(std::llround((static_cast<double>(n) - 1) * k / 4.0));
        svg << "<text x=\"" << detail::fixed(px(i)) << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\">" << i + 1 << "</text>\n";
    }
    svg << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << detail::escape(x_label) << "</text>\n";
    svg << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << H / 2 << ")\">"
        << detail::escape(y_label) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        svg << "<polyline fill=\"none\" stroke=\"" << series[s].color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < series[s].values.size(); ++i) {
            if (!std::isfinite(series[s].values[i])) continue;
            svg << (first ? "" : " ") << detail::fixed(px(i)) << ',' << detail::fixed(py(series[s].values[i]));
            first = false;
        }
        svg << "\"/>\n";
        const double ly = top + 14.0 * static_cast<double>(s);
        svg << "<line x1=\"" << W - right - 120 << "\" y1=\"" << ly << "\" x2=\"" << W - right - 100 << "\" y2=\"" << ly << "\" stroke=\""
            << series[s].color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << W - right - 95 << "\" y=\"" << ly + 4 << "\">" << detail::escape(series[s].label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

/// Actual values in blue, predictions in orange.
inline std::string fold_plot_svg(const std::string& model, const eval::FoldResult& f)
{
    return line_plot_svg(model + " fold " + std::to_string(f.fold.index) + " (rows " + std::to_string(f.fold.test_begin) + "-" +
                             std::to_string(f.fold.test_end - 1) + ")",
                         {{"actual", f.actual, "#1f77b4"}, {"predicted", f.predicted, "#ff7f0e"}});
}

/// Diverging blue-white-red heatmap of a correlation matrix.
inline std::string heatmap_svg(const eval::CorrelationMatrix& c, const std::string& title = "Feature correlation")
{
    const auto k = c.names.size();
    constexpr double cell = 26, label = 150, top = 40;
    const double W = label + cell * static_cast<double>(k) + 20;
    const double H = top + label + cell * static_cast<double>(k) + 20;
    auto colour = [](double r) {
        const double t = std::clamp(std::abs(r), 0.0, 1.0);
        const int fade = static_cast<int>(std::lround(255 * (1 - t)));
        char buf[8];
        if (r >= 0) {
            std::snprintf(buf, sizeof buf, "#%02x%02x%02x", 255, fade, fade);
        } else {
            std::snprintf(buf, sizeof buf, "#%02x%02x%02x", fade, fade, 255);
        }
        return std::string(buf);
    };
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H
        << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << detail::escape(title) << "</text>\n";
    const double y0 = top + label;
    for (std::size_t i = 0; i < k; ++i) {
        const double yc = y0 + cell * static_cast<double>(i);
        const double xc = label + cell * static_cast<double>(i);
        svg << "<text x=\"" << label - 4 << "\" y=\"" << detail::fixed(yc + cell * 0.65) << "\" text-anchor=\"end\">"
            << detail::escape(c.names[i]) << "</text>\n";
        svg << "<text x=\"" << detail::fixed(xc + cell * 0.6) << "\" y=\"" << y0 - 4 << "\" transform=\"rotate(-60 "
            << detail::fixed(xc + cell * 0.6) << ' ' << y0 - 4 << ")\">" << detail::escape(c.names[i]) << "</text>\n";
        for (std::size_t j = 0; j < k; ++j) {
            const double r = c.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            svg << "<rect x=\"" << label + cell * static_cast<double>(j) << "\" y=\"" << yc << "\" width=\"" << cell << "\" height=\"" << cell
                << "\" fill=\"" << colour(r) << "\"><title>" << detail::escape(c.names[i]) << " / " << detail::escape(c.names[j]) << ": "
                << detail::fixed(r, 3) << "</title></rect>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
    out << text;
    if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

/// metrics.csv, metrics.json, predictions.csv and one SVG per fold, all
/// prefixed with `prefix` (the model name when empty).
inline std::vector<std::filesystem::path> write_report(const eval::MetricsReport& r, const std::filesystem::path& dir, bool plots = true,
                                                       std::string prefix = {})
{
    if (prefix.empty()) prefix = r.model;
    std::vector<std::filesystem::path> written;
    auto put = [&](const std::string& name, const std::string& text) {
        written.push_back(dir / name);
        write_text(written.back(), text);
    };
    put(prefix + "_metrics.csv", metrics_csv(r));
    put(prefix + "_metrics.json", metrics_json(r).dump(2) + "\n");
    put(prefix + "_predictions.csv", predictions_csv(r));
    if (plots) {
        for (const auto& f : r.folds) put(prefix + "_fold" + std::to_string(f.fold.index) + ".svg", fold_plot_svg(r.model, f));
    }
    return written;
}

} // namespace feecast::report
