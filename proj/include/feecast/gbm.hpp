#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "feecast/error.hpp"

namespace feecast::gbm {

struct GbmConfig {
    std::size_t n_trees = 1000;
    std::size_t max_depth = 8;
    double learning_rate = 0.01;
    std::size_t bins = 64;
    std::size_t min_leaf = 20;
    std::size_t patience = 50;
    double validation_fraction = 0.1; // time-ordered tail held out for early stopping
    std::uint64_t seed = 42;

    void check() const
    {
        require(n_trees > 0 && max_depth > 0 && min_leaf > 0 && patience > 0, ErrorCode::InvalidArgument,
                "tree count, depth, leaf size and patience must be positive");
        require(bins >= 2 && bins <= 256, ErrorCode::InvalidArgument, "bins must be in [2, 256]");
        require(learning_rate > 0 && learning_rate <= 1, ErrorCode::InvalidArgument, "learning rate must be in (0, 1]");
        require(validation_fraction >= 0 && validation_fraction < 1, ErrorCode::InvalidArgument,
                "validation fraction must be in [0, 1)");
    }
};

/// Internal nodes send x[feature] <= threshold left. Leaves have feature -1.
struct Node {
    int feature = -1;
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0;
    double gain = 0;

    [[nodiscard]] bool is_leaf() const noexcept { return feature < 0; }
};

struct Tree {
    std::vector<Node> nodes;

    template <class Row>
    [[nodiscard]] double predict(const Row& x) const
    {
        std::size_t i = 0;
        while (!nodes[i].is_leaf()) {
            const auto& n = nodes[i];
            i = static_cast<std::size_t>(x(n.feature) <= n.threshold ? n.left : n.right);
        }
        return nodes[i].value;
    }
};

struct GbmModel {
    GbmConfig cfg;
    std::size_t n_features = 0;
    double base = 0;
    std::vector<Tree> trees; // already truncated to the early-stopping optimum
    std::vector<double> train_loss; // entry m: loss after m trees (entry 0 = base only)
    std::vector<double> validation_loss;

    [[nodiscard]] std::size_t trees_used() const noexcept { return trees.size(); }
};

namespace detail {

/// Per-feature split candidates. Few distinct values get midpoints between
/// neighbours; otherwise empirical quantiles.
inline std::vector<double> bin_thresholds(std::vector<double> v, std::size_t bins)
{
    std::sort(v.begin(), v.end());
    std::vector<double> uniq;
    for (double x : v) {
        if (uniq.empty() || x != uniq.back()) uniq.push_back(x);
    }
    std::vector<double> thr;
    if (uniq.size() <= bins) {
        for (std::size_t i = 0; i + 1 < uniq.size(); ++i) thr.push_back(uniq[i] + (uniq[i + 1] - uniq[i]) / 2);
        return thr;
    }
    for (std::size_t q = 1; q < bins; ++q) {
        const double x = v[q * v.size() / bins];
        if (x < uniq.back() && (thr.empty() || x > thr.back())) thr.push_back(x);
    }
    return thr;
}

struct BinnedData {
    std::size_t rows = 0;
    std::vector<std::vector<double>> thresholds;
    std::vector<std::uint8_t> codes; // feature-major: codes[f * rows + i]

    [[nodiscard]] std::uint8_t at(std::size_t f, std::size_t i) const { return codes[f * rows + i]; }
};

inline BinnedData bin(const Eigen::MatrixXd& X, std::size_t rows, std::size_t bins)
{
    BinnedData b;
    b.rows = rows;
    const auto F = static_cast<std::size_t>(X.cols());
    b.thresholds.resize(F);
    b.codes.resize(F * rows);
    for (std::size_t f = 0; f < F; ++f) {
        std::vector<double> col(rows);
        for (std::size_t i = 0; i < rows; ++i) col[i] = X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f));
        b.thresholds[f] = bin_thresholds(col, bins);
        const auto& t = b.thresholds[f];
        for (std::size_t i = 0; i < rows; ++i) {
            b.codes[f * rows + i] = static_cast<std::uint8_t>(std::lower_bound(t.begin(), t.end(), col[i]) - t.begin());
        }
    }
    return b;
}

struct Builder {
    const BinnedData& data;
    const std::vector<double>& residual;
    const GbmConfig& cfg;
    Tree tree;

    struct Split {
        int feature = -1;
        std::size_t bin = 0;
        double gain = 0;
    };

    Split best_split(const std::vector<std::size_t>& idx, double sum) const
    {
        const auto n = static_cast<double>(idx.size());
        double ssr = 0;
        for (auto i : idx) ssr += residual[i] * residual[i];
        ssr -= sum * sum / n;
        const double min_gain = 1e-12 * std::max(ssr, 0.0) + 1e-24;
        Split best;
        std::vector<double> hsum;
        std::vector<std::size_t> hcnt;
        for (std::size_t f = 0; f < data.thresholds.size(); ++f) {
            const auto nb = data.thresholds[f].size() + 1;
            if (nb < 2) continue;
            hsum.assign(nb, 0.0);
            hcnt.assign(nb, 0);
            for (auto i : idx) {
                const auto c = data.at(f, i);
                hsum[c] += residual[i];
                ++hcnt[c];
            }
            double sl = 0;
            std::size_t nl = 0;
            for (std::size_t b = 0; b + 1 < nb; ++b) {
                sl += hsum[b];
                nl += hcnt[b];
                const std::size_t nr = idx.size() - nl;
                if (nl < cfg.min_leaf) continue;
                if (nr < cfg.min_leaf) break;
                const double sr = sum - sl;
                const double gain = sl * sl / static_cast<double>(nl) + sr * sr / static_cast<double>(nr) - sum * sum / n;
                if (gain > min_gain && gain > best.gain) best = {static_cast<int>(f), b, gain};
            }
        }
        return best;
    }

    int grow(std::vector<std::size_t> idx, std::size_t depth)
    {
        double sum = 0;
        for (auto i : idx) sum += residual[i];
        const auto id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes.back().value = sum / static_cast<double>(idx.size());
        if (depth >= cfg.max_depth || idx.size() < 2 * cfg.min_leaf) return id;
        const auto s = best_split(idx, sum);
        if (s.feature < 0) return id;
        std::vector<std::size_t> left, right;
        for (auto i : idx) (data.at(static_cast<std::size_t>(s.feature), i) <= s.bin ? left : right).push_back(i);
        idx.clear();
        idx.shrink_to_fit();
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        auto& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = s.feature;
        node.threshold = data.thresholds[static_cast<std::size_t>(s.feature)][s.bin];
        node.left = l;
        node.right = r;
        node.gain = s.gain;
        node.value = 0;
        return id;
    }
};

inline double mse(const std::vector<double>& pred, const Eigen::VectorXd& y, std::size_t begin, std::size_t end)
{
    if (end <= begin) return 0;
    double s = 0;
    for (std::size_t i = begin; i < end; ++i) {
        const double e = y(static_cast<Eigen::Index>(i)) - pred[i];
        s += e * e;
    }
    return s / static_cast<double>(end - begin);
}

} // namespace detail

/// Stagewise squared-error boosting. The last `validation_fraction` of rows
/// never enter training; they only decide when to stop, and the ensemble is
/// cut back to the round with the lowest validation loss.
inline GbmModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GbmConfig& cfg = {})
{
    cfg.check();
    require(X.rows() == y.size(), ErrorCode::LengthMismatch, "feature rows and target length differ");
    const auto n = static_cast<std::size_t>(y.size());
    require(n >= 2 * cfg.min_leaf, ErrorCode::TooFewRows, "need at least 2 * min_leaf rows");
    require(X.allFinite() && y.allFinite(), ErrorCode::InvalidArgument, "GBM inputs must not contain missing values");

    auto n_val = static_cast<std::size_t>(std::floor(cfg.validation_fraction * static_cast<double>(n)));
    if (n - n_val < 2 * cfg.min_leaf) n_val = 0;
    const std::size_t n_train = n - n_val;

    GbmModel m;
    m.cfg = cfg;
    m.n_features = static_cast<std::size_t>(X.cols());
    m.base = y.head(static_cast<Eigen::Index>(n_train)).mean();

    const auto data = detail::bin(X, n_train, cfg.bins);
    std::vector<double> pred(n, m.base);
    std::vector<double> residual(n_train);
    std::vector<std::size_t> all(n_train);
    for (std::size_t i = 0; i < n_train; ++i) all[i] = i;

    m.train_loss.push_back(detail::mse(pred, y, 0, n_train));
    if (n_val) m.validation_loss.push_back(detail::mse(pred, y, n_train, n));
    double best = n_val ? m.validation_loss.back() : m.train_loss.back();
    std::size_t best_round = 0;

    for (std::size_t round = 0; round < cfg.n_trees; ++round) {
        for (std::size_t i = 0; i < n_train; ++i) residual[i] = y(static_cast<Eigen::Index>(i)) - pred[i];
        detail::Builder b{data, residual, cfg, {}};
        b.grow(all, 0);
        if (b.tree.nodes.size() == 1) break; // nothing left to split
        for (std::size_t i = 0; i < n; ++i) pred[i] += cfg.learning_rate * b.tree.predict(X.row(static_cast<Eigen::Index>(i)));
        m.trees.push_back(std::move(b.tree));
        m.train_loss.push_back(detail::mse(pred, y, 0, n_train));
        if (n_val) {
            m.validation_loss.push_back(detail::mse(pred, y, n_train, n));
            if (m.validation_loss.back() < best) {
                best = m.validation_loss.back();
                best_round = m.trees.size();
            } else if (m.trees.size() - best_round >= cfg.patience) {
                break;
            }
        } else {
            best_round = m.trees.size();
        }
    }
    m.trees.resize(best_round);
    m.train_loss.resize(best_round + 1);
    if (n_val) m.validation_loss.resize(best_round + 1);
    return m;
}

inline Eigen::VectorXd predict(const GbmModel& m, const Eigen::MatrixXd& X)
{
    require(static_cast<std::size_t>(X.cols()) == m.n_features, ErrorCode::ShapeMismatch,
            "expected " + std::to_string(m.n_features) + " feature columns, got " + std::to_string(X.cols()));
    Eigen::VectorXd out = Eigen::VectorXd::Constant(X.rows(), m.base);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double s = 0;
        for (const auto& t : m.trees) s += t.predict(X.row(i));
        out(i) += m.cfg.learning_rate * s;
    }
    return out;
}

/// Summed split gain per feature over the retained trees.
inline std::vector<double> feature_importance(const GbmModel& m)
{
    std::vector<double> imp(m.n_features, 0.0);
    for (const auto& t : m.trees) {
        for (const auto& n : t.nodes) {
            if (!n.is_leaf()) imp[static_cast<std::size_t>(n.feature)] += n.gain;
        }
    }
    return imp;
}

inline nlohmann::json to_json(const GbmModel& m)
{
    auto trees = nlohmann::json::array();
    for (const auto& t : m.trees) {
        auto nodes = nlohmann::json::array();
        for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.gain});
        trees.push_back(std::move(nodes));
    }
    return {{"model", "gbm"},
            {"n_trees", m.cfg.n_trees},
            {"max_depth", m.cfg.max_depth},
            {"learning_rate", m.cfg.learning_rate},
            {"bins", m.cfg.bins},
            {"min_leaf", m.cfg.min_leaf},
            {"patience", m.cfg.patience},
            {"validation_fraction", m.cfg.validation_fraction},
            {"n_features", m.n_features},
            {"base", m.base},
            {"train_loss", m.train_loss},
            {"validation_loss", m.validation_loss},
            {"trees", std::move(trees)}};
}

inline GbmModel from_json(const nlohmann::json& j)
{
    GbmModel m;
    m.cfg.n_trees = j.at("n_trees");
    m.cfg.max_depth = j.at("max_depth");
    m.cfg.learning_rate = j.at("learning_rate");
    m.cfg.bins = j.at("bins");
    m.cfg.min_leaf = j.at("min_leaf");
    m.cfg.patience = j.at("patience");
    m.cfg.validation_fraction = j.at("validation_fraction");
    m.n_features = j.at("n_features");
    m.base = j.at("base");
    m.train_loss = j.at("train_loss").get<std::vector<double>>();
    m.validation_loss = j.at("validation_loss").get<std::vector<double>>();
    for (const auto& tj : j.at("trees")) {
        Tree t;
        for (const auto& nj : tj) {
            t.nodes.push_back({nj[0].get<int>(), nj[1].get<double>(), nj[2].get<int>(), nj[3].get<int>(), nj[4].get<double>(), nj[5].get<double>()});
        }
        m.trees.push_back(std::move(t));
    }
    return m;
}

} // namespace feecast::gbm
