#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "feecast/error.hpp"
#include "feecast/features.hpp"
#include "feecast/numerics.hpp"

namespace feecast::sarimax {

struct Order {
    int p = 2, d = 1, q = 2;
    int P = 1, D = 1, Q = 1;
    std::size_t s = 144;

    /// Rows at the start of the differenced series whose residuals are
    /// excluded from the objective.
    [[nodiscard]] std::size_t burn_in() const noexcept
    {
        return static_cast<std::size_t>(p + q) + s * static_cast<std::size_t>(P + Q);
    }
    [[nodiscard]] std::size_t arma_params() const noexcept { return static_cast<std::size_t>(p + q + P + Q); }
    [[nodiscard]] std::size_t lost() const noexcept
    {
        return static_cast<std::size_t>(d) + static_cast<std::size_t>(D) * s;
    }

    void check() const
    {
        require(p >= 0 && q >= 0 && P >= 0 && Q >= 0, ErrorCode::InvalidArgument, "ARMA orders must be >= 0");
        require(d >= 0 && d <= 2 && D >= 0 && D <= 2, ErrorCode::InvalidArgument, "difference orders must be in {0,1,2}");
        require(s >= 1, ErrorCode::InvalidArgument, "season length must be >= 1");
    }

    bool operator==(const Order&) const = default;
};

enum class ExogPolicy { seasonal_carry, freeze_last };

struct Options {
    /// Defaults to true only for undifferenced models.
    std::optional<bool> intercept;
    ExogPolicy exog_policy = ExogPolicy::seasonal_carry;
    std::size_t carry_period = 144;
    int max_iter = 1500;
    int restarts = 3;
    double rel_tol = 1e-9;
    std::uint64_t seed = 42;
};

struct Coefficients {
    std::vector<double> ar, ma, sar, sma;
    double intercept = 0;
    std::vector<double> beta;

    /// Flat layout used by css_objective: ar, ma, sar, sma, intercept, beta.
    [[nodiscard]] std::vector<double> pack() const
    {
        std::vector<double> v;
        for (const auto* part : {&ar, &ma, &sar, &sma}) v.insert(v.end(), part->begin(), part->end());
        v.push_back(intercept);
        v.insert(v.end(), beta.begin(), beta.end());
        return v;
    }

    static Coefficients unpack(std::span<const double> v, const Order& o, std::size_t n_exog)
    {
        require(v.size() == o.arma_params() + 1 + n_exog, ErrorCode::ShapeMismatch, "parameter vector has the wrong length");
        Coefficients c;
        auto it = v.begin();
        auto take = [&](int n, std::vector<double>& dst) {
            dst.assign(it, it + n);
            it += n;
        };
        take(o.p, c.ar);
        take(o.q, c.ma);
        take(o.P, c.sar);
        take(o.Q, c.sma);
        c.intercept = *it++;
        c.beta.assign(it, v.end());
        return c;
    }
};

/// Sparse lag polynomial sum_l coef_l B^l (the leading 1 is implicit).
struct LagPoly {
    std::vector<std::size_t> lags;
    std::vector<double> coefs;

    [[nodiscard]] std::size_t max_lag() const noexcept { return lags.empty() ? 0 : lags.back(); }
};

namespace detail {

inline LagPoly to_poly(const std::map<std::size_t, double>& m)
{
    LagPoly p;
    for (const auto& [lag, c] : m) {
        if (c != 0.0) {
            p.lags.push_back(lag);
            p.coefs.push_back(c);
        }
    }
    return p;
}

} // namespace detail

/// AR side a(B) with (1 - sum a_l B^l) = (1 - sum phi_i B^i)(1 - sum Phi_j B^{js}).
inline LagPoly ar_polynomial(const Coefficients& c, std::size_t s)
{
    std::map<std::size_t, double> m;
    for (std::size_t i = 0; i < c.ar.size(); ++i) m[i + 1] += c.ar[i];
    for (std::size_t j = 0; j < c.sar.size(); ++j) {
        m[(j + 1) * s] += c.sar[j];
        for (std::size_t i = 0; i < c.ar.size(); ++i) m[i + 1 + (j + 1) * s] -= c.ar[i] * c.sar[j];
    }
    return detail::to_poly(m);
}

/// MA side m(B) with (1 + sum m_l B^l) = (1 + sum theta_k B^k)(1 + sum Theta_j B^{js}).
inline LagPoly ma_polynomial(const Coefficients& c, std::size_t s)
{
    std::map<std::size_t, double> m;
    for (std::size_t k = 0; k < c.ma.size(); ++k) m[k + 1] += c.ma[k];
    for (std::size_t j = 0; j < c.sma.size(); ++j) {
        m[(j + 1) * s] += c.sma[j];
        for (std::size_t k = 0; k < c.ma.size(); ++k) m[k + 1 + (j + 1) * s] += c.ma[k] * c.sma[j];
    }
    return detail::to_poly(m);
}

/// w_t = z_t - sum a_l z_{t-l}; pre-sample values count as zero.
inline std::vector<double> apply_ar(std::span<const double> z, const LagPoly& ar)
{
    std::vector<double> w(z.begin(), z.end());
    for (std::size_t t = 0; t < z.size(); ++t) {
        for (std::size_t k = 0; k < ar.lags.size() && ar.lags[k] <= t; ++k) {
            w[t] -= ar.coefs[k] * z[t - ar.lags[k]];
        }
    }
    return w;
}

/// u_t = v_t - sum m_l u_{t-l} (inverse MA filter), zero pre-sample.
inline void inverse_ma_inplace(std::span<double> v, const LagPoly& ma)
{
    for (std::size_t t = 0; t < v.size(); ++t) {
        double acc = v[t];
        for (std::size_t k = 0; k < ma.lags.size() && ma.lags[k] <= t; ++k) {
            acc -= ma.coefs[k] * v[t - ma.lags[k]];
        }
        v[t] = acc;
    }
}

/// One-step residuals of the ARMAX recursion on the differenced scale.
inline std::vector<double> css_residuals(const Coefficients& c, std::span<const double> z, const Eigen::MatrixXd& Xz,
                                         std::size_t s)
{
    require(static_cast<std::size_t>(Xz.rows()) == z.size() || Xz.cols() == 0, ErrorCode::LengthMismatch,
            "exogenous rows differ from series length");
    require(static_cast<std::size_t>(Xz.cols()) == c.beta.size(), ErrorCode::ShapeMismatch,
            "exogenous column count differs from coefficient count");
    const auto ar = ar_polynomial(c, s);
    const auto ma = ma_polynomial(c, s);
    auto e = apply_ar(z, ar);
    for (std::size_t t = 0; t < e.size(); ++t) {
        e[t] -= c.intercept;
        for (std::size_t j = 0; j < c.beta.size(); ++j) {
            e[t] -= c.beta[j] * Xz(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
        }
    }
    inverse_ma_inplace(e, ma);
    return e;
}

/// Sum of squared one-step residuals after the burn-in, for the flat
/// parameter layout of `Coefficients::pack`.
inline double css_objective(std::span<const double> params, std::span<const double> z, const Eigen::MatrixXd& Xz,
                            const Order& order)
{
    const auto c = Coefficients::unpack(params, order, static_cast<std::size_t>(Xz.cols()));
    const auto e = css_residuals(c, z, Xz, order.s);
    double ss = 0;
    for (std::size_t t = order.burn_in(); t < e.size(); ++t) ss += e[t] * e[t];
    return ss;
}

namespace detail {

struct Profile {
    double objective = 0;
    double intercept = 0;
    std::vector<double> beta;
};

/// Given the ARMA part, the residual is linear in (intercept, beta), so those
/// are solved exactly by least squares on the filtered columns.
inline Profile profile_linear(const Coefficients& arma, std::span<const double> z, const Eigen::MatrixXd& Xz,
                              bool intercept, std::size_t s, std::size_t burn)
{
    const auto ar = ar_polynomial(arma, s);
    const auto ma = ma_polynomial(arma, s);
    auto w = apply_ar(z, ar);
    inverse_ma_inplace(w, ma);

    const std::size_t n = z.size();
    const std::size_t rows = n - burn;
    const std::size_t k = static_cast<std::size_t>(Xz.cols());
    const std::size_t ncols = k + (intercept ? 1 : 0);
    Profile out;
    out.beta.assign(k, 0.0);
    if (ncols == 0) {
        for (std::size_t t = burn; t < n; ++t) out.objective += w[t] * w[t];
        return out;
    }

    Eigen::MatrixXd F(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(ncols));
    std::vector<double> col(n);
    auto fill = [&](std::size_t j, auto&& src) {
        for (std::size_t t = 0; t < n; ++t) col[t] = src(t);
        inverse_ma_inplace(col, ma);
        for (std::size_t t = burn; t < n; ++t) F(static_cast<Eigen::Index>(t - burn), static_cast<Eigen::Index>(j)) = col[t];
    };
    std::size_t j = 0;
    if (intercept) fill(j++, [](std::size_t) { return 1.0; });
    for (std::size_t c = 0; c < k; ++c) {
        fill(j++, [&](std::size_t t) { return Xz(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)); });
    }
    Eigen::VectorXd target(static_cast<Eigen::Index>(rows));
    for (std::size_t t = burn; t < n; ++t) target(static_cast<Eigen::Index>(t - burn)) = w[t];

    // Scale columns to unit RMS; all-zero columns get a zero coefficient.
    Eigen::VectorXd scale = (F.colwise().squaredNorm() / static_cast<double>(rows)).cwiseSqrt().transpose();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index c = 0; c < F.cols(); ++c) {
        if (scale(c) > 0 && std::isfinite(scale(c))) keep.push_back(c);
    }
    Eigen::MatrixXd Fs(F.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) Fs.col(static_cast<Eigen::Index>(c)) = F.col(keep[c]) / scale(keep[c]);
    Eigen::VectorXd coef_all = Eigen::VectorXd::Zero(F.cols());
    if (!keep.empty()) {
        const Eigen::VectorXd b = numerics::ridge_solve(Fs, target, 1e-10 * static_cast<double>(rows));
        for (std::size_t c = 0; c < keep.size(); ++c) coef_all(keep[c]) = b(static_cast<Eigen::Index>(c)) / scale(keep[c]);
    }
    const Eigen::VectorXd resid = target - F * coef_all;
    out.objective = resid.squaredNorm();
    j = 0;
    if (intercept) out.intercept = coef_all(static_cast<Eigen::Index>(j++));
    for (std::size_t c = 0; c < k; ++c) out.beta[c] = coef_all(static_cast<Eigen::Index>(j++));
    return out;
}

inline Coefficients arma_from_raw(std::span<const double> raw, const Order& o)
{
    Coefficients c;
    auto it = raw.begin();
    auto take = [&](int n, std::vector<double>& dst) {
        for (int i = 0; i < n; ++i) dst.push_back(std::tanh(*it++));
    };
    take(o.p, c.ar);
    take(o.q, c.ma);
    take(o.P, c.sar);
    take(o.Q, c.sma);
    return c;
}

inline Eigen::MatrixXd difference_columns(const Eigen::MatrixXd& X, const Order& o)
{
    const auto L = o.lost();
    Eigen::MatrixXd out(X.rows() - static_cast<Eigen::Index>(L), X.cols());
    std::vector<double> col(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        for (Eigen::Index t = 0; t < X.rows(); ++t) col[static_cast<std::size_t>(t)] = X(t, c);
        auto [z, info] = numerics::difference(col, o.d, o.D, o.s);
        for (std::size_t t = 0; t < z.size(); ++t) out(static_cast<Eigen::Index>(t), c) = z[t];
    }
    return out;
}

} // namespace detail

struct SarimaxModel {
    Order order;
    Options options;
    Coefficients coef;
    double sigma2 = 0;
    double objective = 0;
    std::size_t n_obs = 0;
    std::vector<std::string> exog_names;

    std::vector<double> y_tail;  // last `order.lost()` observations
    std::vector<double> z_tail;  // last AR-lag values of the differenced series
    std::vector<double> e_tail;  // last MA-lag residuals
    Eigen::MatrixXd x_tail;      // last max(lost, carry) raw exogenous rows

    std::vector<double> fitted;    // one-step in-sample predictions, aligned to y
    std::vector<double> residuals; // y - fitted

    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;

    [[nodiscard]] bool has_intercept() const { return options.intercept.value_or(order.d + order.D == 0); }
    [[nodiscard]] std::size_t n_exog() const noexcept { return coef.beta.size(); }
};

/// Conditional-sum-of-squares fit. ARMA coefficients are searched by
/// Nelder-Mead on tanh-mapped values (|coef| < 1); the intercept and exogenous
/// coefficients are profiled out exactly for every candidate.
inline SarimaxModel fit(std::span<const double> y, const Eigen::MatrixXd& X, const Order& order, const Options& opts = {},
                        std::vector<std::string> exog_names = {})
{
    order.check();
    require(X.cols() == 0 || static_cast<std::size_t>(X.rows()) == y.size(), ErrorCode::LengthMismatch,
            "exogenous rows differ from series length");
    require(X.allFinite(), ErrorCode::InvalidArgument, "exogenous matrix has missing values");
    for (double v : y) require(std::isfinite(v), ErrorCode::InvalidArgument, "target has missing values");
    const std::size_t L = order.lost();
    const std::size_t burn = order.burn_in();
    require(y.size() > L + burn + 10, ErrorCode::SeriesTooShort,
            "need more than " + std::to_string(L + burn + 10) + " observations, got " + std::to_string(y.size()));

    SarimaxModel m;
    m.order = order;
    m.options = opts;
    m.n_obs = y.size();
    m.exog_names = std::move(exog_names);
    const bool intercept = m.has_intercept();

    auto [z, info] = numerics::difference(y, order.d, order.D, order.s);
    const Eigen::MatrixXd Xz = X.cols() ? detail::difference_columns(X, order) : Eigen::MatrixXd(static_cast<Eigen::Index>(z.size()), 0);

    auto objective = [&](std::span<const double> raw) {
        const auto arma = detail::arma_from_raw(raw, order);
        return detail::profile_linear(arma, z, Xz, intercept, order.s, burn).objective;
    };

    std::vector<double> x0(order.arma_params(), 0.0);
    const double f0 = objective(x0);
    numerics::NelderMeadOptions nm;
    nm.max_iter = opts.max_iter;
    nm.restarts = opts.restarts;
    nm.seed = opts.seed;
    nm.initial_step = 0.2;
    nm.ftol = opts.rel_tol * std::max(1.0, std::abs(f0));
    nm.xtol = 1e-6;
    const auto res = numerics::nelder_mead(objective, x0, nm);
    if (!std::isfinite(res.value)) {
        fail(ErrorCode::OptimizerFailure, "CSS objective did not reach a finite value");
    }

    m.coef = detail::arma_from_raw(res.argmin, order);
    const auto prof = detail::profile_linear(m.coef, z, Xz, intercept, order.s, burn);
    m.coef.intercept = prof.intercept;
    m.coef.beta = prof.beta;
    m.iterations = res.iterations;
    m.converged = res.converged;
    m.objective_trace = res.best_trace;

    const auto e = css_residuals(m.coef, z, Xz, order.s);
    double ss = 0;
    for (std::size_t t = burn; t < e.size(); ++t) ss += e[t] * e[t];
    m.objective = ss;
    m.sigma2 = ss / static_cast<double>(e.size() - burn);

    m.fitted.assign(y.begin(), y.end());
    m.residuals.assign(y.size(), 0.0);
    for (std::size_t t = L; t < y.size(); ++t) {
        m.fitted[t] = y[t] - e[t - L];
        m.residuals[t] = y[t] - m.fitted[t];
    }

    const auto ar = ar_polynomial(m.coef, order.s);
    const auto ma = ma_polynomial(m.coef, order.s);
    m.y_tail.assign(y.end() - static_cast<std::ptrdiff_t>(L), y.end());
    const std::size_t zl = std::min(ar.max_lag(), z.size());
    const std::size_t el = std::min(ma.max_lag(), e.size());
    m.z_tail.assign(z.end() - static_cast<std::ptrdiff_t>(zl), z.end());
    m.e_tail.assign(e.end() - static_cast<std::ptrdiff_t>(el), e.end());
    if (X.cols() > 0) {
        const auto keep = static_cast<Eigen::Index>(std::min<std::size_t>(std::max(L, opts.carry_period), y.size()));
        m.x_tail = X.bottomRows(keep);
    } else {
        m.x_tail.resize(0, 0);
    }
    return m;
}

/// Future exogenous rows from the stored history according to the policy.
inline Eigen::MatrixXd future_exog(const SarimaxModel& m, std::size_t h)
{
    const auto k = static_cast<Eigen::Index>(m.n_exog());
    Eigen::MatrixXd out(static_cast<Eigen::Index>(h), k);
    if (k == 0) return out;
    const auto T = static_cast<std::size_t>(m.x_tail.rows());
    for (std::size_t j = 0; j < h; ++j) {
        std::size_t row = T - 1;
        if (m.options.exog_policy == ExogPolicy::seasonal_carry && T >= m.options.carry_period) {
            row = features::seasonal_carry_row(T, m.options.carry_period, j);
        }
        out.row(static_cast<Eigen::Index>(j)) = m.x_tail.row(static_cast<Eigen::Index>(row));
    }
    return out;
}

/// h-step forecast: ARMA recursion on the differenced scale with future
/// shocks set to zero, then integrated back onto the observed level.
inline std::vector<double> forecast(const SarimaxModel& m, long h, std::optional<Eigen::MatrixXd> X_future = std::nullopt)
{
    if (h <= 0) fail(ErrorCode::HorizonNonPositive, "forecast horizon must be >= 1");
    const auto H = static_cast<std::size_t>(h);
    const auto k = static_cast<Eigen::Index>(m.n_exog());
    Eigen::MatrixXd Xf = X_future ? *X_future : future_exog(m, H);
    require(Xf.cols() == k && (k == 0 || static_cast<std::size_t>(Xf.rows()) == H), ErrorCode::ShapeMismatch,
            "future exogenous matrix must have h rows and one column per regressor");

    Eigen::MatrixXd Xzf(static_cast<Eigen::Index>(H), k);
    for (Eigen::Index c = 0; c < k; ++c) {
        std::vector<double> hist(static_cast<std::size_t>(m.x_tail.rows())), fut(H);
        for (Eigen::Index t = 0; t < m.x_tail.rows(); ++t) hist[static_cast<std::size_t>(t)] = m.x_tail(t, c);
        for (std::size_t j = 0; j < H; ++j) fut[j] = Xf(static_cast<Eigen::Index>(j), c);
        const auto dz = numerics::difference_forward(hist, fut, m.order.d, m.order.D, m.order.s);
        for (std::size_t j = 0; j < H; ++j) Xzf(static_cast<Eigen::Index>(j), c) = dz[j];
    }

    const auto ar = ar_polynomial(m.coef, m.order.s);
    const auto ma = ma_polynomial(m.coef, m.order.s);
    std::vector<double> zbuf = m.z_tail;
    std::vector<double> ebuf = m.e_tail;
    const std::size_t z0 = zbuf.size();
    const std::size_t e0 = ebuf.size();
    std::vector<double> zf(H);
    for (std::size_t j = 0; j < H; ++j) {
        double v = m.coef.intercept;
        for (Eigen::Index c = 0; c < k; ++c) v += m.coef.beta[static_cast<std::size_t>(c)] * Xzf(static_cast<Eigen::Index>(j), c);
        const std::size_t zt = z0 + j;
        for (std::size_t i = 0; i < ar.lags.size(); ++i) {
            if (ar.lags[i] <= zt) v += ar.coefs[i] * zbuf[zt - ar.lags[i]];
        }
        const std::size_t et = e0 + j;
        for (std::size_t i = 0; i < ma.lags.size(); ++i) {
            if (ma.lags[i] <= et) v += ma.coefs[i] * ebuf[et - ma.lags[i]];
        }
        zbuf.push_back(v);
        ebuf.push_back(0.0);
        zf[j] = v;
    }
    return numerics::integrate_forward(m.y_tail, zf, m.order.d, m.order.D, m.order.s);
}

struct InSample {
    std::vector<double> fitted;
    std::vector<double> residuals;
    double residual_mean = 0;
};

inline InSample in_sample_predictions(const SarimaxModel& m)
{
    InSample out{m.fitted, m.residuals, 0.0};
    if (!out.residuals.empty()) {
        double s = 0;
        for (double r : out.residuals) s += r;
        out.residual_mean = s / static_cast<double>(out.residuals.size());
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& M)
{
    auto rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index cols)
{
    Eigen::MatrixXd M(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        require(static_cast<Eigen::Index>(j[r].size()) == cols, ErrorCode::ShapeMismatch, "ragged matrix in JSON");
        for (Eigen::Index c = 0; c < cols; ++c) M(static_cast<Eigen::Index>(r), c) = j[r][static_cast<std::size_t>(c)].get<double>();
    }
    return M;
}

inline nlohmann::json to_json(const SarimaxModel& m)
{
    nlohmann::json j;
    j["model"] = "sarimax";
    j["order"] = {{"p", m.order.p}, {"d", m.order.d}, {"q", m.order.q}, {"P", m.order.P},
                  {"D", m.order.D}, {"Q", m.order.Q}, {"s", m.order.s}};
    j["intercept_enabled"] = m.has_intercept();
    j["exog_policy"] = m.options.exog_policy == ExogPolicy::seasonal_carry ? "seasonal_carry" : "freeze_last";
    j["carry_period"] = m.options.carry_period;
    j["ar"] = m.coef.ar;
    j["ma"] = m.coef.ma;
    j["sar"] = m.coef.sar;
    j["sma"] = m.coef.sma;
    j["intercept"] = m.coef.intercept;
    j["beta"] = m.coef.beta;
    j["exog_names"] = m.exog_names;
    j["sigma2"] = m.sigma2;
    j["objective"] = m.objective;
    j["n_obs"] = m.n_obs;
    j["iterations"] = m.iterations;
    j["converged"] = m.converged;
    j["y_tail"] = m.y_tail;
    j["z_tail"] = m.z_tail;
    j["e_tail"] = m.e_tail;
    j["x_tail"] = matrix_to_json(m.x_tail);
    j["fitted"] = m.fitted;
    j["residuals"] = m.residuals;
    return j;
}

inline SarimaxModel from_json(const nlohmann::json& j)
{
    SarimaxModel m;
    const auto& o = j.at("order");
    m.order = {o.at("p"), o.at("d"), o.at("q"), o.at("P"), o.at("D"), o.at("Q"), o.at("s").get<std::size_t>()};
    m.options.intercept = j.at("intercept_enabled").get<bool>();
    m.options.exog_policy = j.at("exog_policy") == "freeze_last" ? ExogPolicy::freeze_last : ExogPolicy::seasonal_carry;
    m.options.carry_period = j.at("carry_period");
    m.coef.ar = j.at("ar").get<std::vector<double>>();
    m.coef.ma = j.at("ma").get<std::vector<double>>();
    m.coef.sar = j.at("sar").get<std::vector<double>>();
    m.coef.sma = j.at("sma").get<std::vector<double>>();
    m.coef.intercept = j.at("intercept");
    m.coef.beta = j.at("beta").get<std::vector<double>>();
    m.exog_names = j.at("exog_names").get<std::vector<std::string>>();
    m.sigma2 = j.at("sigma2");
    m.objective = j.at("objective");
    m.n_obs = j.at("n_obs");
    m.iterations = j.at("iterations");
    m.converged = j.at("converged");
    m.y_tail = j.at("y_tail").get<std::vector<double>>();
    m.z_tail = j.at("z_tail").get<std::vector<double>>();
    m.e_tail = j.at("e_tail").get<std::vector<double>>();
    m.x_tail = matrix_from_json(j.at("x_tail"), static_cast<Eigen::Index>(m.coef.beta.size()));
    m.fitted = j.at("fitted").get<std::vector<double>>();
    m.residuals = j.at("residuals").get<std::vector<double>>();
    return m;
}

} // namespace feecast::sarimax
