#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "feecast/error.hpp"
#include "feecast/features.hpp"

namespace feecast::t2v {

/// Time2Vec embedding of a scalar: element 0 is linear, the rest periodic.
inline Eigen::VectorXd embed(double tau, const Eigen::VectorXd& omega, const Eigen::VectorXd& phase)
{
    require(omega.size() == phase.size() && omega.size() >= 1, ErrorCode::ShapeMismatch, "frequency/phase size mismatch");
    Eigen::VectorXd e(omega.size());
    e(0) = omega(0) * tau + phase(0);
    for (Eigen::Index i = 1; i < omega.size(); ++i) e(i) = std::sin(omega(i) * tau + phase(i));
    return e;
}

struct Architecture {
    std::size_t embed_dim = 64;
    std::size_t n_features = 0;
    std::vector<std::size_t> hidden = {128, 64, 32};

    [[nodiscard]] std::size_t input_dim() const noexcept { return embed_dim + n_features + 1; }

    bool operator==(const Architecture&) const = default;
};

/// A mini-batch in column layout: one sample per column.
struct Batch {
    Eigen::VectorXd tau;
    Eigen::MatrixXd x;      // n_features x B
    Eigen::VectorXd h_frac;
    Eigen::VectorXd target;

    [[nodiscard]] Eigen::Index size() const noexcept { return tau.size(); }
};

/// Embedding + ReLU MLP with a scalar head. All parameters live in one flat
/// vector so the optimiser and gradient checks can treat them uniformly.
class Network {
public:
    Network() = default;

    explicit Network(Architecture arch) : arch_(std::move(arch))
    {
        require(arch_.embed_dim >= 2, ErrorCode::InvalidArgument, "embedding needs a linear and at least one periodic unit");
        require(!arch_.hidden.empty(), ErrorCode::InvalidArgument, "at least one hidden layer is required");
        std::size_t off = 0;
        omega_off_ = off;
        off += arch_.embed_dim;
        phase_off_ = off;
        off += arch_.embed_dim;
        std::size_t in = arch_.input_dim();
        for (auto width : arch_.hidden) {
            layers_.push_back({off, off + width * in, in, width});
            off += width * in + width;
            in = width;
        }
        layers_.push_back({off, off + in, in, 1});
        off += in + 1;
        theta_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(off));
    }

    [[nodiscard]] const Architecture& architecture() const noexcept { return arch_; }
    [[nodiscard]] Eigen::VectorXd& params() noexcept { return theta_; }
    [[nodiscard]] const Eigen::VectorXd& params() const noexcept { return theta_; }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(theta_.size()); }

    [[nodiscard]] auto omega() { return theta_.segment(static_cast<Eigen::Index>(omega_off_), dim(arch_.embed_dim)); }
    [[nodiscard]] auto omega() const { return theta_.segment(static_cast<Eigen::Index>(omega_off_), dim(arch_.embed_dim)); }
    [[nodiscard]] auto phase() { return theta_.segment(static_cast<Eigen::Index>(phase_off_), dim(arch_.embed_dim)); }
    [[nodiscard]] auto phase() const { return theta_.segment(static_cast<Eigen::Index>(phase_off_), dim(arch_.embed_dim)); }

    [[nodiscard]] std::size_t layer_count() const noexcept { return layers_.size(); }

    [[nodiscard]] Eigen::Map<Eigen::MatrixXd> weight(std::size_t l)
    {
        const auto& L = layers_[l];
        return {theta_.data() + L.w_off, dim(L.out), dim(L.in)};
    }
    [[nodiscard]] Eigen::Map<const Eigen::MatrixXd> weight(std::size_t l) const
    {
        const auto& L = layers_[l];
        return {theta_.data() + L.w_off, dim(L.out), dim(L.in)};
    }
    [[nodiscard]] Eigen::Map<Eigen::VectorXd> bias(std::size_t l)
    {
        const auto& L = layers_[l];
        return {theta_.data() + L.b_off, dim(L.out)};
    }
    [[nodiscard]] Eigen::Map<const Eigen::VectorXd> bias(std::size_t l) const
    {
        const auto& L = layers_[l];
        return {theta_.data() + L.b_off, dim(L.out)};
    }

    /// Glorot-uniform weights, zero biases, linear time unit = identity and
    /// periodic frequencies log-spaced over [w_lo, w_hi] (in tau units).
    void initialize(std::uint64_t seed, double w_lo, double w_hi)
    {
        std::mt19937_64 rng(seed);
        theta_.setZero();
        const auto k = arch_.embed_dim;
        omega()(0) = 1.0;
        std::uniform_real_distribution<double> ph(-std::numbers::pi, std::numbers::pi);
        for (std::size_t i = 1; i < k; ++i) {
            const double frac = k > 2 ? static_cast<double>(i - 1) / static_cast<double>(k - 2) : 0.5;
            omega()(dim(i)) = std::exp(std::log(w_lo) + frac * (std::log(w_hi) - std::log(w_lo)));
            phase()(dim(i)) = ph(rng);
        }
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            const auto& L = layers_[l];
            const double limit = std::sqrt(6.0 / static_cast<double>(L.in + L.out));
            std::uniform_real_distribution<double> u(-limit, limit);
            auto W = weight(l);
            for (Eigen::Index c = 0; c < W.cols(); ++c) {
                for (Eigen::Index r = 0; r < W.rows(); ++r) W(r, c) = u(rng);
            }
        }
    }

    /// Input column for one sample: [embed(tau); x; h_frac].
    [[nodiscard]] Eigen::MatrixXd inputs(const Batch& b) const
    {
        check_batch(b);
        const auto k = dim(arch_.embed_dim);
        const auto f = dim(arch_.n_features);
        Eigen::MatrixXd A(k + f + 1, b.size());
        for (Eigen::Index s = 0; s < b.size(); ++s) {
            A(0, s) = omega()(0) * b.tau(s) + phase()(0);
            for (Eigen::Index i = 1; i < k; ++i) A(i, s) = std::sin(omega()(i) * b.tau(s) + phase()(i));
            if (f > 0) A.block(k, s, f, 1) = b.x.col(s);
            A(k + f, s) = b.h_frac(s);
        }
        return A;
    }

    [[nodiscard]] Eigen::VectorXd predict(const Batch& b) const
    {
        Eigen::MatrixXd a = inputs(b);
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            Eigen::MatrixXd z = weight(l) * a;
            z.colwise() += bias(l);
            a = l + 1 < layers_.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
        }
        return a.row(0).transpose();
    }

    /// Mean squared error over the batch.
    [[nodiscard]] double loss(const Batch& b) const { return (predict(b) - b.target).squaredNorm() / static_cast<double>(b.size()); }

    /// Mean squared error and its gradient with respect to every parameter.
    double loss_and_gradient(const Batch& b, Eigen::VectorXd& grad) const
    {
        const auto B = static_cast<double>(b.size());
        std::vector<Eigen::MatrixXd> acts{inputs(b)};
        std::vector<Eigen::MatrixXd> pre;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            Eigen::MatrixXd z = weight(l) * acts.back();
            z.colwise() += bias(l);
            pre.push_back(z);
            acts.push_back(l + 1 < layers_.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z);
        }
        const Eigen::RowVectorXd err = acts.back().row(0) - b.target.transpose();
        const double loss = err.squaredNorm() / B;

        grad = Eigen::VectorXd::Zero(theta_.size());
        Eigen::MatrixXd delta = 2.0 * err / B; // dL/dz for the head
        for (std::size_t l = layers_.size(); l-- > 0;) {
            const auto& L = layers_[l];
            Eigen::Map<Eigen::MatrixXd>(grad.data() + L.w_off, dim(L.out), dim(L.in)) = delta * acts[l].transpose();
            Eigen::Map<Eigen::VectorXd>(grad.data() + L.b_off, dim(L.out)) = delta.rowwise().sum();
            Eigen::MatrixXd da = weight(l).transpose() * delta;
            if (l > 0) {
                delta = da.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
            } else {
                delta = std::move(da);
            }
        }
        // delta now holds dL/d(input); the embedding rows feed omega/phase.
        const auto k = dim(arch_.embed_dim);
        auto g_omega = grad.segment(static_cast<Eigen::Index>(omega_off_), k);
        auto g_phase = grad.segment(static_cast<Eigen::Index>(phase_off_), k);
        for (Eigen::Index s = 0; s < b.size(); ++s) {
            const double tau = b.tau(s);
            g_omega(0) += delta(0, s) * tau;
            g_phase(0) += delta(0, s);
            for (Eigen::Index i = 1; i < k; ++i) {
                const double d = delta(i, s) * std::cos(omega()(i) * tau + phase()(i));
                g_omega(i) += d * tau;
                g_phase(i) += d;
            }
        }
        return loss;
    }

private:
    struct Layer {
        std::size_t w_off, b_off, in, out;
    };

    static Eigen::Index dim(std::size_t n) { return static_cast<Eigen::Index>(n); }

    void check_batch(const Batch& b) const
    {
        const auto n = b.size();
        require(b.h_frac.size() == n && (arch_.n_features == 0 || b.x.cols() == n), ErrorCode::ShapeMismatch,
                "batch components disagree on sample count");
        require(arch_.n_features == 0 ? b.x.size() == 0 || b.x.rows() == 0 : b.x.rows() == dim(arch_.n_features),
                ErrorCode::ShapeMismatch, "feature vector length differs from the network input");
    }

    Architecture arch_;
    Eigen::VectorXd theta_;
    std::size_t omega_off_ = 0;
    std::size_t phase_off_ = 0;
    std::vector<Layer> layers_;
};

/// Largest relative disagreement between the analytic gradient and central
/// finite differences over the given parameter indices (all when empty).
/// Relative error is |a - n| / max(|a|, |n|, 1e-6).
inline double gradient_check(const Network& net, const Batch& batch, double eps = 1e-5, std::vector<std::size_t> indices = {})
{
    Eigen::VectorXd grad;
    net.loss_and_gradient(batch, grad);
    if (indices.empty()) {
        indices.resize(net.size());
        std::iota(indices.begin(), indices.end(), 0);
    }
    Network probe = net;
    double worst = 0;
    for (auto idx : indices) {
        auto& p = probe.params()(static_cast<Eigen::Index>(idx));
        const double orig = p;
        p = orig + eps;
        const double up = probe.loss(batch);
        p = orig - eps;
        const double down = probe.loss(batch);
        p = orig;
        const double numeric = (up - down) / (2 * eps);
        const double analytic = grad(static_cast<Eigen::Index>(idx));
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_size = 64;
    std::size_t max_epochs = 200;
    std::size_t patience = 20;
    double validation_fraction = 0.1;
    std::size_t carry_period = 144;
    std::size_t embed_dim = 64;
    std::vector<std::size_t> hidden = {128, 64, 32};
    std::uint64_t seed = 42;

    void check() const
    {
        require(learning_rate > 0 && batch_size > 0 && max_epochs > 0, ErrorCode::InvalidArgument,
                "learning rate, batch size and epochs must be positive");
        require(carry_period >= 1, ErrorCode::InvalidArgument, "carry period must be >= 1");
        require(validation_fraction >= 0 && validation_fraction < 1, ErrorCode::InvalidArgument,
                "validation fraction must be in [0, 1)");
    }
};

struct EpochLoss {
    double train = 0;
    double validation = 0;
};

struct T2VModel {
    Network net;
    TrainConfig cfg;
    std::vector<double> feature_mean, feature_std;
    double y_mean = 0, y_std = 1;
    std::size_t n_train = 0;
    Eigen::MatrixXd feature_tail; // last carry_period standardized feature rows
    std::vector<EpochLoss> history;
    std::size_t best_epoch = 0;
};

namespace detail {

inline double scaled_time(double i, std::size_t n) { return i / static_cast<double>(std::max<std::size_t>(n, 2) - 1); }

inline std::size_t horizon_step(std::size_t i, std::size_t n, std::size_t period)
{
    const auto diff = static_cast<long long>(i) - static_cast<long long>(n);
    const auto P = static_cast<long long>(period);
    return static_cast<std::size_t>(((diff % P) + P) % P) + 1;
}

inline Batch gather(const std::vector<std::size_t>& samples, std::size_t begin, std::size_t end, const Eigen::MatrixXd& xs,
                    const std::vector<double>& ys, std::size_t n, std::size_t period)
{
    Batch b;
    const auto B = static_cast<Eigen::Index>(end - begin);
    const auto F = xs.cols();
    b.tau.resize(B);
    b.h_frac.resize(B);
    b.target.resize(B);
    b.x.resize(F, F > 0 ? B : 0);
    for (Eigen::Index s = 0; s < B; ++s) {
        const auto i = samples[begin + static_cast<std::size_t>(s)];
        b.tau(s) = scaled_time(static_cast<double>(i), n);
        b.h_frac(s) = static_cast<double>(horizon_step(i, n, period)) / 144.0;
        b.target(s) = ys[i];
        if (F > 0) b.x.col(s) = xs.row(static_cast<Eigen::Index>(i - period)).transpose();
    }
    return b;
}

} // namespace detail

/// Trains on pairs (features of row i - carry_period, target of row i), the
/// same pairing the forecast uses under the seasonal-carry policy. Features and
/// target are standardized on the training rows.
inline T2VModel train(const features::FeatureMatrix& m, const TrainConfig& cfg = {})
{
    cfg.check();
    const std::size_t n = m.rows();
    const auto F = static_cast<Eigen::Index>(m.cols());
    const std::size_t period = cfg.carry_period;
    const std::size_t first = F > 0 ? period : 0;
    require(n >= first + 2, ErrorCode::TooFewRows, "not enough rows to form training pairs");
    require(m.X.allFinite() && m.y.allFinite(), ErrorCode::InvalidArgument, "feature matrix has missing values");

    T2VModel model;
    model.cfg = cfg;
    model.n_train = n;

    Eigen::MatrixXd xs = m.X;
    model.feature_mean.resize(static_cast<std::size_t>(F));
    model.feature_std.resize(static_cast<std::size_t>(F));
    for (Eigen::Index c = 0; c < F; ++c) {
        const double mean = xs.col(c).mean();
        const double sd = std::sqrt((xs.col(c).array() - mean).square().mean());
        model.feature_mean[static_cast<std::size_t>(c)] = mean;
        model.feature_std[static_cast<std::size_t>(c)] = sd;
        xs.col(c) = sd > 0 ? Eigen::VectorXd((xs.col(c).array() - mean) / sd) : Eigen::VectorXd::Zero(xs.rows());
    }
    model.y_mean = m.y.mean();
    const double ysd = std::sqrt((m.y.array() - model.y_mean).square().mean());
    // y_std = 0 marks a constant target; the forecast is then y_mean exactly.
    model.y_std = ysd;
    const double yscale = ysd > 0 ? ysd : 1.0;
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = (m.y(static_cast<Eigen::Index>(i)) - model.y_mean) / yscale;
    if (F > 0) {
        const auto keep = static_cast<Eigen::Index>(std::min(period, n));
        model.feature_tail = xs.bottomRows(keep);
    }

    model.net = Network(Architecture{cfg.embed_dim, static_cast<std::size_t>(F), cfg.hidden});
    const double span = static_cast<double>(std::max<std::size_t>(n, 2) - 1);
    const double daily = 2.0 * std::numbers::pi / 144.0;
    model.net.initialize(cfg.seed, daily / 10.0 * span, daily * 10.0 * span);

    std::vector<std::size_t> samples(n - first);
    std::iota(samples.begin(), samples.end(), first);
    std::size_t n_val = static_cast<std::size_t>(std::floor(cfg.validation_fraction * static_cast<double>(samples.size())));
    if (samples.size() - n_val < 1) n_val = 0;
    std::vector<std::size_t> train_idx(samples.begin(), samples.end() - static_cast<std::ptrdiff_t>(n_val));
    const std::vector<std::size_t> val_idx(samples.end() - static_cast<std::ptrdiff_t>(n_val), samples.end());
    const Batch full_train = detail::gather(train_idx, 0, train_idx.size(), xs, ys, n, period);
    const Batch val = n_val ? detail::gather(val_idx, 0, val_idx.size(), xs, ys, n, period) : Batch{};

    std::mt19937_64 rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.net.size()));
    Eigen::VectorXd m2 = m1;
    Eigen::VectorXd grad;
    double b1t = 1, b2t = 1;
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_params = model.net.params();
    std::size_t since_best = 0;

    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        // Fisher-Yates with an explicit draw keeps the order identical across
        // standard library implementations.
        for (std::size_t i = train_idx.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng() % i);
            std::swap(train_idx[i - 1], train_idx[j]);
        }
        for (std::size_t start = 0; start < train_idx.size(); start += cfg.batch_size) {
            const auto stop = std::min(train_idx.size(), start + cfg.batch_size);
            const Batch b = detail::gather(train_idx, start, stop, xs, ys, n, period);
            const double l = model.net.loss_and_gradient(b, grad);
            if (!std::isfinite(l)) fail(ErrorCode::Diverged, "training loss is not finite");
            b1t *= cfg.beta1;
            b2t *= cfg.beta2;
            m1 = cfg.beta1 * m1 + (1 - cfg.beta1) * grad;
            m2 = cfg.beta2 * m2 + (1 - cfg.beta2) * grad.cwiseAbs2();
            const double corr = cfg.learning_rate * std::sqrt(1 - b2t) / (1 - b1t);
            model.net.params().array() -= corr * m1.array() / (m2.array().sqrt() + cfg.epsilon);
        }
        EpochLoss el;
        el.train = model.net.loss(full_train);
        el.validation = n_val ? model.net.loss(val) : el.train;
        if (!std::isfinite(el.train)) fail(ErrorCode::Diverged, "training loss is not finite");
        model.history.push_back(el);
        if (el.validation < best) {
            best = el.validation;
            best_params = model.net.params();
            model.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    model.net.params() = best_params;
    return model;
}

/// Forecast for the h rows following the training data.
inline std::vector<double> forecast(const T2VModel& model, std::size_t h)
{
    if (h == 0) return {};
    const auto F = static_cast<Eigen::Index>(model.net.architecture().n_features);
    const std::size_t period = model.cfg.carry_period;
    const std::size_t n = model.n_train;
    if (model.y_std == 0.0) return std::vector<double>(h, model.y_mean);
    Batch b;
    const auto H = static_cast<Eigen::Index>(h);
    b.tau.resize(H);
    b.h_frac.resize(H);
    b.target = Eigen::VectorXd::Zero(H);
    b.x.resize(F, F > 0 ? H : 0);
    for (Eigen::Index j = 0; j < H; ++j) {
        const auto i = n + static_cast<std::size_t>(j);
        b.tau(j) = detail::scaled_time(static_cast<double>(i), n);
        b.h_frac(j) = static_cast<double>(detail::horizon_step(i, n, period)) / 144.0;
        if (F > 0) {
            const auto T = static_cast<std::size_t>(model.feature_tail.rows());
            b.x.col(j) = model.feature_tail.row(static_cast<Eigen::Index>(features::seasonal_carry_row(T, T, static_cast<std::size_t>(j)))).transpose();
        }
    }
    const Eigen::VectorXd z = model.net.predict(b);
    std::vector<double> out(h);
    for (std::size_t j = 0; j < h; ++j) out[j] = z(static_cast<Eigen::Index>(j)) * model.y_std + model.y_mean;
    return out;
}

inline nlohmann::json to_json(const T2VModel& m)
{
    const auto& p = m.net.params();
    return {{"model", "t2v"},
            {"embed_dim", m.net.architecture().embed_dim},
            {"n_features", m.net.architecture().n_features},
            {"hidden", m.net.architecture().hidden},
            {"carry_period", m.cfg.carry_period},
            {"n_train", m.n_train},
            {"y_mean", m.y_mean},
            {"y_std", m.y_std},
            {"feature_mean", m.feature_mean},
            {"feature_std", m.feature_std},
            {"feature_tail", [&] {
                 auto rows = nlohmann::json::array();
                 for (Eigen::Index r = 0; r < m.feature_tail.rows(); ++r) {
                     rows.push_back(std::vector<double>(m.feature_tail.cols()));
                     for (Eigen::Index c = 0; c < m.feature_tail.cols(); ++c) rows.back()[static_cast<std::size_t>(c)] = m.feature_tail(r, c);
                 }
                 return rows;
             }()},
            {"params", std::vector<double>(p.data(), p.data() + p.size())}};
}

inline T2VModel from_json(const nlohmann::json& j)
{
    T2VModel m;
    Architecture arch{j.at("embed_dim"), j.at("n_features"), j.at("hidden").get<std::vector<std::size_t>>()};
    m.net = Network(arch);
    const auto p = j.at("params").get<std::vector<double>>();
    require(p.size() == m.net.size(), ErrorCode::ShapeMismatch, "parameter count does not match architecture");
    m.net.params() = Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
    m.cfg.carry_period = j.at("carry_period");
    m.cfg.embed_dim = arch.embed_dim;
    m.cfg.hidden = arch.hidden;
    m.n_train = j.at("n_train");
    m.y_mean = j.at("y_mean");
    m.y_std = j.at("y_std");
    m.feature_mean = j.at("feature_mean").get<std::vector<double>>();
    m.feature_std = j.at("feature_std").get<std::vector<double>>();
    const auto& tail = j.at("feature_tail");
    m.feature_tail.resize(static_cast<Eigen::Index>(tail.size()), static_cast<Eigen::Index>(arch.n_features));
    for (std::size_t r = 0; r < tail.size(); ++r) {
        for (std::size_t c = 0; c < arch.n_features; ++c) m.feature_tail(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = tail[r][c];
    }
    return m;
}

} // namespace feecast::t2v
