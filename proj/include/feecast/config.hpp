#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <toml.hpp>

#include "feecast/dataset.hpp"
#include "feecast/error.hpp"
#include "feecast/eval.hpp"
#include "feecast/ingest.hpp"
#include "feecast/prep.hpp"

namespace feecast::config {

struct CvParams {
    std::size_t initial = 0; // 0 = largest window that ends the last fold at the test split
    std::size_t step = 144;
    std::size_t horizon = 144;
    std::size_t folds = 5;
    std::size_t test_len = 144;
};

struct PipelineConfig {
    ingest::RpcEndpoint rpc;
    ingest::PriceSource price;
    ingest::PollOptions poll;
    bool clip_enabled = true;
    prep::ClipSpec clip;
    std::vector<Column> clip_columns = prep::default_clip_columns();
    eval::ModelSpec model; // kind is chosen per command
    CvParams cv;
    std::string output_dir = "reports";
    std::uint64_t seed = 42;

    [[nodiscard]] eval::EvalOptions eval_options() const { return {clip_enabled, clip, clip_columns}; }

    [[nodiscard]] eval::ModelSpec spec_for(eval::ModelKind kind) const
    {
        auto s = model;
        s.kind = kind;
        return s;
    }

    /// CV folds for a dataset of n rows; the final test_len rows stay out.
    [[nodiscard]] std::vector<eval::CvFold> folds_for(std::size_t n) const
    {
        require(n > cv.test_len, ErrorCode::InsufficientRows, "dataset shorter than the test split");
        const auto n_cv = n - cv.test_len;
        const auto initial = cv.initial ? cv.initial : eval::fitted_initial(n_cv, cv.step, cv.horizon, cv.folds);
        return eval::expanding_folds(n_cv, initial, cv.step, cv.horizon, cv.folds);
    }
};

struct LoadResult {
    PipelineConfig config;
    std::vector<std::string> warnings; // unknown keys, ignored
};

namespace detail {

/// Reads known keys from one table and remembers them so the rest can be
/// reported.
class Section {
public:
    Section(const toml::table* t, std::string prefix, std::vector<std::string>& warnings)
        : t_(t), prefix_(std::move(prefix)), warnings_(warnings)
    {
    }

    ~Section()
    {
        if (!t_) return;
        for (const auto& [k, v] : *t_) {
            const std::string key(k.str());
            if (!known_.count(key)) warnings_.push_back("unknown key '" + prefix_ + key + "' ignored");
        }
    }

    Section(const Section&) = delete;
    Section& operator=(const Section&) = delete;

    Section sub(const std::string& key)
    {
        known_.insert(key);
        const toml::table* child = nullptr;
        if (t_) {
            if (const auto* n = t_->get(key)) {
                child = n->as_table();
                if (!child) bad(key, "a table");
            }
        }
        return {child, prefix_ + key + ".", warnings_};
    }

    template <class T>
    void get(const std::string& key, T& dst)
    {
        known_.insert(key);
        if (!t_) return;
        const auto* n = t_->get(key);
        if (!n) return;
        if constexpr (std::is_same_v<T, bool>) {
            if (auto v = n->value<bool>()) return void(dst = *v);
            bad(key, "a boolean");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (auto v = n->value<std::string>()) return void(dst = *v);
            bad(key, "a string");
        } else if constexpr (std::is_integral_v<T>) {
            if (auto v = n->value<std::int64_t>()) {
                if (std::is_unsigned_v<T> && *v < 0) bad(key, "a non-negative integer");
                return void(dst = static_cast<T>(*v));
            }
            bad(key, "an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (auto v = n->value<double>()) return void(dst = static_cast<T>(*v));
            bad(key, "a number");
        } else {
            const auto* arr = n->as_array();
            if (!arr) bad(key, "an array");
            T out;
            for (const auto& el : *arr) {
                using E = typename T::value_type;
                if constexpr (std::is_same_v<E, std::string>) {
                    auto v = el.value<std::string>();
                    if (!v) bad(key, "an array of strings");
                    out.push_back(*v);
                } else if constexpr (std::is_integral_v<E>) {
                    auto v = el.value<std::int64_t>();
                    if (!v || *v < 0) bad(key, "an array of non-negative integers");
                    out.push_back(static_cast<E>(*v));
                } else {
                    auto v = el.value<double>();
                    if (!v) bad(key, "an array of numbers");
                    out.push_back(static_cast<E>(*v));
                }
            }
            dst = std::move(out);
        }
    }

    [[nodiscard]] const toml::table* table() const noexcept { return t_; }
    void mark(const std::string& key) { known_.insert(key); }

private:
    [[noreturn]] void bad(const std::string& key, const std::string& what) const
    {
        fail(ErrorCode::ConfigError, "'" + prefix_ + key + "' must be " + what);
    }

    const toml::table* t_;
    std::string prefix_;
    std::vector<std::string>& warnings_;
    std::set<std::string> known_;
};

inline Column column_or_fail(const std::string& name)
{
    const auto c = column_from_name(name);
    if (!c) fail(ErrorCode::ConfigError, "unknown column '" + name + "'");
    return *c;
}

inline void read(const toml::table& root, PipelineConfig& cfg, std::vector<std::string>& warnings)
{
    Section top(&root, "", warnings);
    top.get("seed", cfg.seed);
    top.get("output_dir", cfg.output_dir);
    {
        auto s = top.sub("rpc");
        s.get("url", cfg.rpc.url);
        s.get("user", cfg.rpc.user);
        s.get("password", cfg.rpc.password);
        s.get("timeout", cfg.rpc.timeout);
        s.get("max_retries", cfg.rpc.max_retries);
    }
    {
        auto s = top.sub("price");
        s.get("url", cfg.price.url);
        s.get("field_path", cfg.price.field_path);
        s.get("timeout", cfg.price.timeout);
    }
    {
        auto s = top.sub("poll");
        s.get("interval", cfg.poll.poll_interval);
        s.get("freshness_window", cfg.poll.assemble.freshness_window);
        s.get("backoff_base", cfg.poll.backoff_base);
        s.get("backoff_cap", cfg.poll.backoff_cap);
    }
    {
        auto s = top.sub("clip");
        s.get("enabled", cfg.clip_enabled);
        s.get("lower_pct", cfg.clip.lower_pct);
        s.get("upper_pct", cfg.clip.upper_pct);
        std::vector<std::string> names;
        s.get("columns", names);
        if (s.table() && s.table()->contains("columns")) {
            cfg.clip_columns.clear();
            for (const auto& n : names) cfg.clip_columns.push_back(column_or_fail(n));
        }
        auto o = s.sub("overrides");
        if (o.table()) {
            for (const auto& [k, v] : *o.table()) {
                const std::string key(k.str());
                std::vector<double> b;
                o.get(key, b);
                if (b.size() != 2) fail(ErrorCode::ConfigError, "'clip.overrides." + key + "' must be [lower, upper]");
                cfg.clip.overrides[column_or_fail(key)] = {b[0], b[1]};
            }
        }
    }
    auto& m = cfg.model;
    {
        auto s = top.sub("features");
        s.get("rolling_window", m.features.rolling_window);
        s.get("lags", m.features.lags);
        s.get("bin_edges", m.features.bin_edges);
        s.get("t_low", m.features.t_low);
        s.get("t_high", m.features.t_high);
        s.get("carry_period", m.carry_period);
    }
    {
        auto s = top.sub("cv");
        s.get("initial", cfg.cv.initial);
        s.get("step", cfg.cv.step);
        s.get("horizon", cfg.cv.horizon);
        s.get("folds", cfg.cv.folds);
        s.get("test_len", cfg.cv.test_len);
    }
    {
        auto s = top.sub("sarimax");
        std::vector<long long> order, seasonal;
        s.get("order", order);
        s.get("seasonal_order", seasonal);
        if (!order.empty()) {
            if (order.size() != 3) fail(ErrorCode::ConfigError, "'sarimax.order' must be [p, d, q]");
            m.order.p = static_cast<int>(order[0]);
            m.order.d = static_cast<int>(order[1]);
            m.order.q = static_cast<int>(order[2]);
        }
        if (!seasonal.empty()) {
            if (seasonal.size() != 4) fail(ErrorCode::ConfigError, "'sarimax.seasonal_order' must be [P, D, Q, s]");
            m.order.P = static_cast<int>(seasonal[0]);
            m.order.D = static_cast<int>(seasonal[1]);
            m.order.Q = static_cast<int>(seasonal[2]);
            m.order.s = static_cast<std::size_t>(seasonal[3]);
        }
        if (s.table() && s.table()->contains("intercept")) {
            bool b = false;
            s.get("intercept", b);
            m.sarimax_options.intercept = b;
        }
        std::string policy;
        s.get("exog_policy", policy);
        if (policy == "freeze_last") {
            m.sarimax_options.exog_policy = sarimax::ExogPolicy::freeze_last;
        } else if (!policy.empty() && policy != "seasonal_carry") {
            fail(ErrorCode::ConfigError, "'sarimax.exog_policy' must be seasonal_carry or freeze_last");
        }
        s.get("max_iter", m.sarimax_options.max_iter);
        s.get("restarts", m.sarimax_options.restarts);
    }
    {
        auto s = top.sub("trend");
        s.get("n_changepoints", m.trend.n_changepoints);
        s.get("changepoint_range", m.trend.changepoint_range);
        s.get("fourier_order", m.trend.fourier_order);
        s.get("period", m.trend.period);
        s.get("ridge_lambda", m.trend.ridge_lambda);
    }
    {
        auto s = top.sub("t2v");
        s.get("embed_dim", m.t2v.embed_dim);
        s.get("hidden", m.t2v.hidden);
        s.get("learning_rate", m.t2v.learning_rate);
        s.get("batch_size", m.t2v.batch_size);
        s.get("max_epochs", m.t2v.max_epochs);
        s.get("patience", m.t2v.patience);
        s.get("validation_fraction", m.t2v.validation_fraction);
    }
    {
        auto s = top.sub("gbm");
        s.get("n_trees", m.gbm.n_trees);
        s.get("max_depth", m.gbm.max_depth);
        s.get("learning_rate", m.gbm.learning_rate);
        s.get("bins", m.gbm.bins);
        s.get("min_leaf", m.gbm.min_leaf);
        s.get("patience", m.gbm.patience);
        s.get("validation_fraction", m.gbm.validation_fraction);
    }
    {
        auto s = top.sub("hybrid");
        s.get("ema_window", m.hybrid.ema_window);
        s.get("rolling_window", m.hybrid.rolling_window);
        s.get("lags", m.hybrid.lags);
    }
}

} // namespace detail

/// Fills derived settings: the seed reaches every stochastic component and
/// the hybrid reuses the standalone SARIMAX and GBM settings.
inline void finalize(PipelineConfig& cfg)
{
    auto& m = cfg.model;
    m.sarimax_options.seed = cfg.seed;
    m.t2v.seed = cfg.seed;
    m.gbm.seed = cfg.seed;
    m.t2v.carry_period = m.carry_period;
    m.sarimax_options.carry_period = m.carry_period;
    m.hybrid.order = m.order;
    m.hybrid.sarimax_options = m.sarimax_options;
    m.hybrid.gbm = m.gbm;
    m.hybrid.carry_period = m.carry_period;
    m.hybrid.gbm.seed = cfg.seed;
}

inline void validate(const PipelineConfig& cfg)
{
    try {
        cfg.rpc.check();
        cfg.clip.check();
        cfg.model.order.check();
        cfg.model.trend.check();
        cfg.model.t2v.check();
        cfg.model.gbm.check();
        cfg.model.hybrid.check();
        cfg.model.features.check();
    } catch (const Error& e) {
        fail(ErrorCode::ConfigError, e.what());
    }
    require(cfg.cv.step >= 1 && cfg.cv.horizon >= 1 && cfg.cv.folds >= 1 && cfg.cv.test_len >= 1, ErrorCode::ConfigError,
            "cv step, horizon, folds and test_len must be positive");
    require(cfg.model.carry_period >= 1, ErrorCode::ConfigError, "carry_period must be >= 1");
}

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

inline std::optional<std::string> process_env(const char* name)
{
    if (const char* v = std::getenv(name)) return std::string(v);
    return std::nullopt;
}

/// RPC_URL, RPC_USER, RPC_PASS and PRICE_URL override the file.
inline void apply_env(PipelineConfig& cfg, const EnvLookup& env = process_env)
{
    if (auto v = env("RPC_URL")) cfg.rpc.url = *v;
    if (auto v = env("RPC_USER")) cfg.rpc.user = *v;
    if (auto v = env("RPC_PASS")) cfg.rpc.password = *v;
    if (auto v = env("PRICE_URL")) cfg.price.url = *v;
}

inline LoadResult parse_config(std::string_view text, const EnvLookup& env = process_env)
{
    LoadResult out;
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        fail(ErrorCode::ConfigError, std::string(e.description()) + " at line " + std::to_string(e.source().begin.line));
    }
    detail::read(root, out.config, out.warnings);
    apply_env(out.config, env);
    finalize(out.config);
    validate(out.config);
    return out;
}

inline LoadResult load_config(const std::filesystem::path& path, const EnvLookup& env = process_env)
{
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoFailure, "cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), env);
}

/// Defaults with environment overrides, for runs without a config file.
inline PipelineConfig default_config(const EnvLookup& env = process_env)
{
    PipelineConfig cfg;
    apply_env(cfg, env);
    finalize(cfg);
    return cfg;
}

} // namespace feecast::config
