#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "feecast/sarimax.hpp"
#include "helpers.hpp"

using namespace feecast;
using namespace feecast::sarimax;

namespace {

Order make_order(int p, int d, int q, int P = 0, int D = 0, int Q = 0, std::size_t s = 1)
{
    Order o;
    o.p = p;
    o.d = d;
    o.q = q;
    o.P = P;
    o.D = D;
    o.Q = Q;
    o.s = s;
    return o;
}

std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed, double c = 0)
{
    const auto e = testutil::random_series(n + 200, seed);
    std::vector<double> y(n + 200, 0.0);
    for (std::size_t t = 1; t < y.size(); ++t) y[t] = c + phi * y[t - 1] + e[t];
    return {y.begin() + 200, y.end()};
}

const Eigen::MatrixXd kNoExog(0, 0);

} // namespace

TEST(Css, WhiteNoiseObjectiveIsSumOfSquares)
{
    const auto z = testutil::random_series(50, 1);
    const auto o = make_order(0, 0, 0);
    const std::vector<double> params{0.0};
    const double ss = std::inner_product(z.begin(), z.end(), z.begin(), 0.0);
    EXPECT_NEAR(css_objective(params, z, kNoExog, o), ss, 1e-12);
}

TEST(Css, ResidualsMatchHandRecursion)
{
    const auto z = testutil::random_series(30, 2);
    const auto o = make_order(1, 0, 1);
    Coefficients c;
    c.ar = {0.5};
    c.ma = {0.3};
    c.intercept = 0.1;
    const auto e = css_residuals(c, z, kNoExog, 1);
    std::vector<double> oracle(z.size());
    for (std::size_t t = 0; t < z.size(); ++t) {
        oracle[t] = z[t] - 0.1 - (t >= 1 ? 0.5 * z[t - 1] : 0.0) - (t >= 1 ? 0.3 * oracle[t - 1] : 0.0);
    }
    for (std::size_t t = 0; t < z.size(); ++t) EXPECT_NEAR(e[t], oracle[t], 1e-12);
    EXPECT_EQ(o.burn_in(), 2u);
}

TEST(Fit, InterceptOnlyEqualsMean)
{
    auto y = testutil::random_series(200, 3);
    for (auto& v : y) v += 5;
    const auto m = fit(y, kNoExog, make_order(0, 0, 0));
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    EXPECT_TRUE(m.has_intercept());
    EXPECT_NEAR(m.coef.intercept, mean, 1e-8);
    for (double f : forecast(m, 5)) EXPECT_NEAR(f, mean, 1e-8);
}

TEST(Fit, RecoversAr1Coefficient)
{
    const auto y = ar1(3000, 0.6, 4);
    const auto m = fit(y, kNoExog, make_order(1, 0, 0));
    ASSERT_EQ(m.coef.ar.size(), 1u);
    EXPECT_NEAR(m.coef.ar[0], 0.6, 0.05);
    EXPECT_NEAR(m.sigma2, 1.0, 0.1);
}

TEST(Fit, RecoversExogenousCoefficient)
{
    const auto x = testutil::random_series(400, 5);
    const auto e = testutil::random_series(400, 6, 0.1);
    std::vector<double> y(400);
    Eigen::MatrixXd X(400, 1);
    for (std::size_t i = 0; i < 400; ++i) {
        y[i] = 1 + 2 * x[i] + e[i];
        X(static_cast<Eigen::Index>(i), 0) = x[i];
    }
    const auto m = fit(y, X, make_order(0, 0, 0), {}, {"x"});
    EXPECT_EQ(m.n_exog(), 1u);
    EXPECT_NEAR(m.coef.beta[0], 2, 0.02);
    EXPECT_NEAR(m.coef.intercept, 1, 0.02);
    Eigen::MatrixXd Xf(2, 1);
    Xf << 0, 1;
    const auto f = forecast(m, 2, Xf);
    EXPECT_NEAR(f[1] - f[0], m.coef.beta[0], 1e-12);
    EXPECT_THROW(forecast(m, 3, Xf), Error);
}

TEST(Fit, RejectsShortSeriesAndMissingValues)
{
    const auto y = testutil::random_series(40, 7);
    try {
        fit(y, kNoExog, make_order(1, 1, 1, 1, 1, 1, 12));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SeriesTooShort);
    }
    auto bad = testutil::random_series(100, 7);
    bad[3] = std::nan("");
    EXPECT_THROW(fit(bad, kNoExog, make_order(1, 0, 0)), Error);
}

TEST(Forecast, RandomWalkIsFlatAtLastValue)
{
    std::vector<double> y(100);
    const auto e = testutil::random_series(100, 8);
    std::partial_sum(e.begin(), e.end(), y.begin());
    Options opt;
    opt.intercept = false;
    const auto m = fit(y, kNoExog, make_order(0, 1, 0), opt);
    for (double f : forecast(m, 10)) EXPECT_NEAR(f, y.back(), 1e-12);
}

TEST(Forecast, LengthAndHorizonValidation)
{
    const auto y = ar1(300, 0.5, 9);
    const auto m = fit(y, kNoExog, make_order(1, 0, 1));
    EXPECT_EQ(forecast(m, 37).size(), 37u);
    try {
        forecast(m, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HorizonNonPositive);
    }
}

TEST(Forecast, StationaryForecastRevertsToMean)
{
    const auto y = ar1(2000, 0.7, 10, 3.0);
    const auto m = fit(y, kNoExog, make_order(1, 0, 0));
    const auto f = forecast(m, 200);
    const double mu = m.coef.intercept / (1 - m.coef.ar[0]);
    EXPECT_NEAR(f.back(), mu, 1e-6);
    EXPECT_NEAR(mu, 10.0, 0.5);
}

TEST(Forecast, ShiftEquivarianceUnderDifferencing)
{
    const auto base = testutil::random_series(600, 11);
    std::vector<double> y(600);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::sin(static_cast<double>(i) * 2 * M_PI / 12) + 0.3 * base[i];
    const auto o = make_order(1, 0, 1, 1, 1, 0, 12);
    const auto m1 = fit(y, kNoExog, o);
    auto y2 = y;
    for (auto& v : y2) v += 100;
    const auto m2 = fit(y2, kNoExog, o);
    const auto f1 = forecast(m1, 24);
    const auto f2 = forecast(m2, 24);
    for (std::size_t j = 0; j < 24; ++j) EXPECT_NEAR(f2[j] - f1[j], 100, 1e-6);
}

TEST(InSample, FittedPlusResidualIsObserved)
{
    const auto y = ar1(400, 0.4, 12);
    const auto m = fit(y, kNoExog, make_order(1, 1, 1));
    const auto s = in_sample_predictions(m);
    ASSERT_EQ(s.fitted.size(), y.size());
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(s.fitted[i] + s.residuals[i], y[i], 1e-12);
    EXPECT_EQ(s.residuals[0], 0.0);
}

TEST(SarimaxJson, RoundTripReproducesForecast)
{
    const auto y = ar1(500, 0.5, 13);
    Eigen::MatrixXd X(500, 1);
    for (Eigen::Index i = 0; i < 500; ++i) X(i, 0) = std::cos(static_cast<double>(i));
    Options opt;
    opt.carry_period = 24;
    const auto m = fit(y, X, make_order(1, 1, 1), opt, {"c"});
    const auto back = from_json(nlohmann::json::parse(to_json(m).dump()));
    const auto f1 = forecast(m, 30);
    const auto f2 = forecast(back, 30);
    for (std::size_t j = 0; j < 30; ++j) EXPECT_DOUBLE_EQ(f1[j], f2[j]);
    EXPECT_EQ(back.order, m.order);
    EXPECT_EQ(back.exog_names, m.exog_names);
}

TEST(FutureExog, SeasonalCarryAndFreezeLast)
{
    const auto y = ar1(200, 0.3, 14);
    Eigen::MatrixXd X(200, 1);
    for (Eigen::Index i = 0; i < 200; ++i) X(i, 0) = static_cast<double>(i);
    Options opt;
    opt.carry_period = 10;
    auto m = fit(y, X, make_order(1, 0, 0), opt);
    auto Xf = future_exog(m, 12);
    EXPECT_EQ(Xf(0, 0), 190);
    EXPECT_EQ(Xf(9, 0), 199);
    EXPECT_EQ(Xf(10, 0), 190);
    m.options.exog_policy = ExogPolicy::freeze_last;
    Xf = future_exog(m, 3);
    EXPECT_EQ(Xf(2, 0), 199);
}
