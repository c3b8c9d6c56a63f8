#include <gtest/gtest.h>

#include <random>

#include "amf/distributions.hpp"
#include "amf/error.hpp"
#include "amf/stats.hpp"
#include "oracles.hpp"

using namespace amf;

TEST(Distributions, KnownQuantiles) {
    EXPECT_NEAR(student_t_two_sided_p(2.228138851986274, 10), 0.05, 1e-9);
    EXPECT_NEAR(student_t_two_sided_p(1.959963984540054, 1e7), 0.05, 1e-6);
    EXPECT_NEAR(student_t_cdf(0.0, 5), 0.5, 1e-15);
    EXPECT_NEAR(f_upper_p(4.964602743730711, 1, 10), 0.05, 1e-9);
    EXPECT_NEAR(f_upper_p(2.866081402, 4, 20), 0.05, 1e-8);
    EXPECT_NEAR(f_cdf(2.866081402, 4, 20), 0.95, 1e-8);
    EXPECT_GT(student_t_two_sided_p(40.0, 30), 0.0);
    EXPECT_LT(student_t_two_sided_p(40.0, 30), 1e-25);
}

TEST(Ols, MatchesNormalEquations) {
    std::mt19937_64 rng(1);
    const Matrix x = oracles::random_matrix(rng, 50, 3);
    const Vector y = x * Vector::LinSpaced(3, 1, 3) + 0.1 * oracles::random_vector(rng, 50);
    const auto fit = ols_fit(x, y, {"a", "b", "c"});
    const Vector beta = (x.transpose() * x).ldlt().solve(x.transpose() * y);
    EXPECT_LT((fit.coefficients - beta).cwiseAbs().maxCoeff(), 1e-12);
    const double sigma2 = fit.rss / 47.0;
    const Matrix cov = sigma2 * (x.transpose() * x).inverse();
    for (Index j = 0; j < 3; ++j) {
        EXPECT_NEAR(fit.standard_errors(j), std::sqrt(cov(j, j)), 1e-12);
        EXPECT_NEAR(fit.p_values(j), student_t_two_sided_p(fit.t_stats(j), 47), 1e-14);
    }
    EXPECT_EQ(fit.df_resid, 47);
    // no constant column: uncentered R^2
    EXPECT_NEAR(fit.r2, 1.0 - fit.rss / y.squaredNorm(), 1e-12);
}

TEST(Ols, CenteredR2WithConstant) {
    std::mt19937_64 rng(2);
    Matrix x(40, 2);
    x.col(0).setOnes();
    x.col(1) = oracles::random_vector(rng, 40);
    const Vector y = 3.0 + x.col(1).array() + oracles::random_vector(rng, 40).array();
    const auto fit = ols_fit(x, y);
    const double tss = (y.array() - y.mean()).square().sum();
    EXPECT_NEAR(fit.r2, 1.0 - fit.rss / tss, 1e-12);
    EXPECT_NEAR(fit.adj_r2, adjusted_r2(fit.r2, 40, 1), 1e-12);
}

TEST(Ols, RankDeficientNamesColumn) {
    std::mt19937_64 rng(3);
    Matrix x = oracles::random_matrix(rng, 20, 4);
    x.col(2) = x.col(0) - 2.0 * x.col(1);
    try {
        ols_fit(x, oracles::random_vector(rng, 20));
        FAIL();
    } catch (const RankDeficientError& e) {
        EXPECT_EQ(e.column(), 2);
    }
    EXPECT_THROW(ols_fit(oracles::random_matrix(rng, 3, 3), oracles::random_vector(rng, 3)), Error);
}

TEST(Anova, FormulaAndErrors) {
    const auto r = nested_anova(80.0, 5, 100.0, 3, 45);
    EXPECT_NEAR(r.f_stat, (20.0 / 2) / (80.0 / 40), 1e-12);
    EXPECT_EQ(r.df1, 2);
    EXPECT_EQ(r.df2, 40);
    EXPECT_NEAR(r.p_value, f_upper_p(r.f_stat, 2, 40), 1e-15);
    EXPECT_THROW(nested_anova(80.0, 3, 100.0, 3, 45), Error);
    EXPECT_THROW(nested_anova(0.0, 5, 100.0, 3, 45), Error);
}

TEST(Anova, FittedModelsMustNest) {
    std::mt19937_64 rng(4);
    const Matrix x = oracles::random_matrix(rng, 30, 3);
    const Vector y = oracles::random_vector(rng, 30);
    const auto full = ols_fit(x, y, {"a", "b", "c"});
    const auto reduced = ols_fit(x.leftCols(2), y, {"a", "b"});
    const auto other = ols_fit(x.rightCols(2), y, {"b", "c"});
    EXPECT_NEAR(nested_anova(full, reduced, 30).p_value,
                nested_anova(full.rss, 3, reduced.rss, 2, 30).p_value, 1e-15);
    EXPECT_THROW(nested_anova(full, ols_fit(x.leftCols(2), y, {"a", "z"}), 30), Error);
    (void)other;
}

TEST(Metrics, AdjustedAndOutOfSample) {
    EXPECT_NEAR(adjusted_r2(0.5, 11, 2), 1 - 0.5 * 10 / 8, 1e-15);
    EXPECT_THROW(adjusted_r2(0.5, 3, 2), Error);
    Vector actual(4), pred(4);
    actual << 1, 2, 3, 4;
    pred = actual;
    EXPECT_DOUBLE_EQ(out_of_sample_r2(pred, actual, 0.0), 1.0);
    pred.setConstant(2.5);
    EXPECT_DOUBLE_EQ(out_of_sample_r2(pred, actual, 2.5), 0.0);
    EXPECT_THROW(out_of_sample_r2(pred, Vector::Constant(4, 2.5), 2.5), Error);
}

TEST(Bhy, WorkedExample) {
    const auto q = bhy_adjust({0.01, 0.02, 0.04});
    EXPECT_NEAR(q[0], 0.055, 1e-12);
    EXPECT_NEAR(q[1], 0.055, 1e-12);
    EXPECT_NEAR(q[2], 0.22 / 3.0, 1e-12);
}

TEST(Bhy, MatchesStepUpOracle) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> len(1, 40);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> p(static_cast<std::size_t>(len(rng)));
        for (auto& v : p) v = u(rng) * (rep % 2 ? 0.1 : 1.0);
        const auto q = bhy_adjust(p), o = oracles::bhy_oracle(p);
        for (std::size_t i = 0; i < p.size(); ++i) ASSERT_NEAR(q[i], o[i], 1e-12);
    }
}

TEST(Bhy, EdgeCases) {
    EXPECT_TRUE(bhy_adjust({}).empty());
    EXPECT_EQ(bhy_adjust({1.0, 1.0}), (std::vector<double>{1.0, 1.0}));
    EXPECT_THROW(bhy_adjust({0.5, 1.2}), Error);
    EXPECT_THROW(bhy_adjust({std::nan("")}), Error);
}
