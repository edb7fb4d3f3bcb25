#include <gtest/gtest.h>

#include <cmath>

#include "feecast/numerics.hpp"
#include "helpers.hpp"

using namespace feecast;
using namespace feecast::numerics;

TEST(Difference, FirstDifference)
{
    const std::vector<double> y{1, 2, 4, 7};
    EXPECT_EQ(difference(y, 1, 0, 1).first, (std::vector<double>{1, 2, 3}));
}

TEST(Difference, SeasonalAndRegularMatchPolynomial)
{
    const auto y = testutil::random_series(60, 2);
    const auto [z, info] = difference(y, 1, 1, 7);
    const auto poly = difference_polynomial(1, 1, 7);
    ASSERT_EQ(poly.size(), 9u);
    ASSERT_EQ(z.size(), y.size() - 8);
    for (std::size_t t = 0; t < z.size(); ++t) {
        double v = 0;
        for (std::size_t k = 0; k < poly.size(); ++k) v += poly[k] * y[t + 8 - k];
        EXPECT_NEAR(z[t], v, 1e-12);
    }
}

TEST(Difference, RoundTripAllOrders)
{
    const auto y = testutil::random_series(80, 9, 5);
    for (int d = 0; d <= 2; ++d) {
        for (int D = 0; D <= 2; ++D) {
            for (std::size_t s : {1u, 4u, 12u}) {
                const auto [z, info] = difference(y, d, D, s);
                const auto back = integrate(z, info);
                ASSERT_EQ(back.size(), y.size());
                for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(back[i], y[i], 1e-9) << d << D << s;
            }
        }
    }
}

TEST(Difference, RejectsShortSeriesAndBadOrders)
{
    const std::vector<double> y{1, 2, 3};
    EXPECT_THROW(difference(y, 0, 1, 3), Error);
    EXPECT_THROW(difference(y, 3, 0, 1), Error);
    EXPECT_THROW(difference(y, 0, 0, 0), Error);
}

TEST(Difference, ForwardAndIntegrateForwardAreInverse)
{
    const auto y = testutil::random_series(100, 4);
    std::span<const double> hist(y.data(), 70);
    std::span<const double> fut(y.data() + 70, 30);
    const auto z = difference_forward(hist, fut, 1, 1, 12);
    const auto back = integrate_forward(hist, z, 1, 1, 12);
    for (std::size_t i = 0; i < 30; ++i) EXPECT_NEAR(back[i], fut[i], 1e-10);
    const auto [zz, info] = difference(y, 1, 1, 12);
    for (std::size_t i = 0; i < 30; ++i) EXPECT_NEAR(z[i], zz[zz.size() - 30 + i], 1e-12);
}

TEST(Ema, RecursionAndConstant)
{
    const std::vector<double> v{1, 2, 3};
    const double b = 2.0 / 3.0;
    EXPECT_NEAR(ema(v, 2), b * 3 + (1 - b) * (b * 2 + (1 - b) * 1), 1e-15);
    EXPECT_EQ(ema(std::vector<double>(20, 4.5), 144), 4.5);
    EXPECT_EQ(ema(std::vector<double>{9.0}, 5), 9.0);
    EXPECT_THROW(ema(std::vector<double>{}, 3), Error);
    EXPECT_THROW(ema(v, 0), Error);
}

TEST(NelderMead, Quadratic)
{
    auto f = [](std::span<const double> x) { return (x[0] - 3) * (x[0] - 3) + 2 * (x[1] + 1) * (x[1] + 1); };
    const auto r = nelder_mead(f, {0, 0});
    EXPECT_NEAR(r.argmin[0], 3, 1e-4);
    EXPECT_NEAR(r.argmin[1], -1, 1e-4);
    EXPECT_TRUE(r.converged);
}

TEST(NelderMead, Rosenbrock)
{
    auto f = [](std::span<const double> x) { return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2); };
    NelderMeadOptions opt;
    opt.max_iter = 20000;
    opt.restarts = 2;
    const auto r = nelder_mead(f, {-1.2, 1}, opt);
    EXPECT_NEAR(r.argmin[0], 1, 1e-3);
    EXPECT_NEAR(r.argmin[1], 1, 2e-3);
}

TEST(NelderMead, ConstantObjectiveStopsAtStart)
{
    auto f = [](std::span<const double>) { return 5.0; };
    const auto r = nelder_mead(f, {1, 2, 3});
    EXPECT_EQ(r.value, 5.0);
    EXPECT_TRUE(r.converged);
}

TEST(NelderMead, TraceIsMonotoneAndNonFiniteStartFails)
{
    auto f = [](std::span<const double> x) { return std::abs(x[0] - 1) + x[1] * x[1]; };
    const auto r = nelder_mead(f, {5, 5});
    for (std::size_t i = 1; i < r.best_trace.size(); ++i) EXPECT_LE(r.best_trace[i], r.best_trace[i - 1]);
    auto g = [](std::span<const double>) { return std::nan(""); };
    EXPECT_THROW(nelder_mead(g, {0}), Error);
}

TEST(Ridge, ExactRecoveryWithoutPenalty)
{
    Eigen::MatrixXd X(5, 2);
    X << 1, 0, 1, 1, 1, 2, 1, 3, 1, 4;
    const Eigen::VectorXd y = X * Eigen::Vector2d(2, -0.5);
    const auto b = ridge_solve(X, y, 0);
    EXPECT_NEAR(b(0), 2, 1e-12);
    EXPECT_NEAR(b(1), -0.5, 1e-12);
}

TEST(Ridge, MatchesClosedFormAndShrinks)
{
    Eigen::MatrixXd X = Eigen::MatrixXd::Random(40, 3);
    Eigen::VectorXd y = Eigen::VectorXd::Random(40);
    const double lam = 2.5;
    const Eigen::VectorXd oracle =
        (X.transpose() * X + lam * Eigen::MatrixXd::Identity(3, 3)).colPivHouseholderQr().solve(X.transpose() * y);
    const auto b = ridge_solve(X, y, lam);
    EXPECT_LT((b - oracle).norm(), 1e-10);
    EXPECT_LT(ridge_solve(X, y, 100).norm(), ridge_solve(X, y, 0).norm());
}

TEST(Ridge, SingularWithoutPenalty)
{
    Eigen::MatrixXd X(4, 2);
    X << 1, 2, 2, 4, 3, 6, 4, 8;
    const Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
    try {
        ridge_solve(X, y, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SingularSystem);
    }
    EXPECT_NO_THROW(ridge_solve(X, y, 1e-3));
    EXPECT_THROW(ridge_solve(X, Eigen::VectorXd::Ones(3), 1), Error);
}
