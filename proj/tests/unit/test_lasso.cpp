#include <gtest/gtest.h>

#include <random>

#include "amf/error.hpp"
#include "amf/lasso.hpp"
#include "oracles.hpp"

using namespace amf;

TEST(Lasso, ZeroAboveLambdaMax) {
    std::mt19937_64 rng(1);
    const Matrix x = oracles::random_matrix(rng, 40, 5);
    const Vector y = x.col(1) + oracles::random_vector(rng, 40);
    const double lmax = lambda_max(x, y);
    EXPECT_TRUE(lasso_solve(x, y, lmax * 1.0001).support().empty());
    EXPECT_FALSE(lasso_solve(x, y, lmax * 0.9).support().empty());
}

TEST(Lasso, KktOnRandomInstances) {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> dn(10, 60), dp(1, 12);
    std::uniform_real_distribution<double> frac(0.01, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const Index n = dn(rng), p = dp(rng);
        const Matrix x = oracles::random_matrix(rng, n, p);
        const Vector y = x * oracles::random_vector(rng, p) + oracles::random_vector(rng, n);
        const double lam = frac(rng) * lambda_max(x, y);
        const auto fit = lasso_solve(x, y, lam);
        ASSERT_LT(lasso_kkt_violation(x, y, fit, lam), 1e-6) << "rep " << rep;
    }
}

TEST(Lasso, MatchesExhaustiveSignOracle) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> dp(1, 3);
    std::uniform_real_distribution<double> frac(0.02, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const Index n = 30, p = dp(rng);
        Matrix x = oracles::random_matrix(rng, n, p);
        if (p > 1) x.col(1) += 0.7 * x.col(0);
        const Vector y = x * oracles::random_vector(rng, p) + 0.5 * oracles::random_vector(rng, n);
        const double lam = frac(rng) * lambda_max(x, y);
        const auto fit = lasso_solve(x, y, lam);
        const Vector oracle = oracles::lasso_oracle(x, y, lam);
        ASSERT_LT((fit.coefficients - oracle).cwiseAbs().maxCoeff(), 1e-7) << "rep " << rep;
    }
}

TEST(Lasso, InterceptUnpenalizedAndConstantColumnRejected) {
    std::mt19937_64 rng(4);
    const Matrix x = oracles::random_matrix(rng, 30, 2);
    const Vector y = (5.0 + 2.0 * x.col(0).array()).matrix();
    const auto fit = lasso_solve(x, y, 1e-6);
    EXPECT_NEAR(fit.intercept, 5.0, 1e-4);
    EXPECT_NEAR(fit.coefficients(0), 2.0, 1e-4);
    Matrix bad = x;
    bad.col(1).setConstant(3.0);
    try {
        lasso_solve(bad, y, 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConstantColumn);
    }
}

TEST(Lasso, MaxIterationsReported) {
    std::mt19937_64 rng(5);
    Matrix x = oracles::random_matrix(rng, 40, 6);
    x.col(1) = x.col(0) + 1e-3 * x.col(1);
    const Vector y = x.col(0) + oracles::random_vector(rng, 40);
    LassoOptions tight;
    tight.max_sweeps = 1;
    tight.tolerance = 1e-15;
    try {
        lasso_solve(x, y, 1e-4 * lambda_max(x, y), tight);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MaxIterations);
    }
}

TEST(CvPath, GridAndShape) {
    std::mt19937_64 rng(6);
    const Matrix x = oracles::random_matrix(rng, 80, 6);
    const Vector y = x.col(0) * 2 + oracles::random_vector(rng, 80);
    const auto path = cv_path(x, y, 10, 50);
    ASSERT_EQ(path.lambdas.size(), 50u);
    EXPECT_NEAR(path.lambdas.front(), lambda_max(x, y), 1e-12);
    EXPECT_NEAR(path.lambdas.back() / path.lambdas.front(), 1e-3, 1e-12);
    for (std::size_t g = 1; g < path.lambdas.size(); ++g) EXPECT_LT(path.lambdas[g], path.lambdas[g - 1]);
    EXPECT_EQ(path.support_sizes.front(), 0);
    EXPECT_THROW(cv_path(x.topRows(15), y.head(15), 10, 50), Error);
}

TEST(CvPath, LeaveOneOutMatchesBruteForce) {
    std::mt19937_64 rng(7);
    const Index n = 12, p = 3;
    const Matrix x = oracles::random_matrix(rng, n, p);
    const Vector y = x * Vector::LinSpaced(p, 1, 0) + 0.3 * oracles::random_vector(rng, n);
    LassoOptions opts;
    opts.tolerance = 1e-12;
    const auto path = cv_path(x, y, static_cast<int>(n), 12, opts);
    for (std::size_t g = 0; g < path.lambdas.size(); ++g) {
        double mse = 0.0;
        std::vector<double> errs;
        for (Index i = 0; i < n; ++i) {
            Matrix xt(n - 1, p);
            Vector yt(n - 1);
            xt << x.topRows(i), x.bottomRows(n - i - 1);
            yt << y.head(i), y.tail(n - i - 1);
            const auto f = lasso_solve(xt, yt, path.lambdas[g], opts);
            const double e = y(i) - f.intercept - x.row(i).dot(f.coefficients);
            errs.push_back(e * e);
            mse += e * e / static_cast<double>(n);
        }
        double var = 0.0;
        for (double e : errs) var += (e - mse) * (e - mse) / static_cast<double>(n);
        EXPECT_NEAR(path.cv_mean[g], mse, 1e-7 * (1 + mse)) << g;
        EXPECT_NEAR(path.cv_se[g], std::sqrt(var / static_cast<double>(n - 1)), 1e-7 * (1 + mse)) << g;
    }
}

TEST(ChooseLambda, CapBindsOnDenseSignal) {
    std::mt19937_64 rng(8);
    const Matrix x = oracles::random_matrix(rng, 300, 40);
    const Vector y = x * Vector::Ones(40) + 0.5 * oracles::random_vector(rng, 300);
    const auto path = cv_path(x, y, 10, 100);
    const auto c = choose_lambda(path, 20);
    EXPECT_LE(c.support.size(), 20u);
    EXPECT_GE(c.chosen, c.lambda_1se);
    EXPECT_EQ(c.chosen, std::max(c.lambda_1se, c.lambda_cap));
    EXPECT_EQ(path.lambdas[c.chosen_index], c.chosen);
}

TEST(ChooseLambda, SparseSignalUsesOneSe) {
    std::mt19937_64 rng(9);
    const Matrix x = oracles::random_matrix(rng, 200, 15);
    const Vector y = 3 * x.col(0) - 2 * x.col(4) + oracles::random_vector(rng, 200);
    const auto path = cv_path(x, y, 10, 100);
    const auto c = choose_lambda(path, 20);
    EXPECT_EQ(c.chosen, c.lambda_1se);
    EXPECT_EQ(c.lambda_cap, path.lambdas.back());
    EXPECT_TRUE(std::find(c.support.begin(), c.support.end(), 0) != c.support.end());
    EXPECT_TRUE(std::find(c.support.begin(), c.support.end(), 4) != c.support.end());
}

TEST(ChooseLambda, HandBuiltPath) {
    LassoPath path;
    path.lambdas = {1.0, 0.5, 0.25, 0.125};
    path.cv_mean = {4.0, 2.0, 1.0, 1.1};
    path.cv_se = {0.1, 0.1, 1.2, 0.1};
    path.support_sizes = {0, 1, 3, 5};
    path.fits.resize(4);
    for (auto& f : path.fits) f.coefficients = Vector::Zero(5);
    auto c = choose_lambda(path, 2);
    EXPECT_EQ(c.lambda_1se, 0.5);  // 2.0 <= 1.0 + 1.2
    EXPECT_EQ(c.lambda_cap, 0.5);  // support 3 first exceeds the cap at 0.25
    EXPECT_EQ(c.chosen_index, 1u);
    c = choose_lambda(path, 10);
    EXPECT_EQ(c.lambda_cap, 0.125);
    EXPECT_THROW(choose_lambda(LassoPath{}, 20), Error);
}
