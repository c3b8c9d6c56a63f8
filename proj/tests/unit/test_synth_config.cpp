#include <gtest/gtest.h>

#include <sstream>

#include "amf/calendar.hpp"
#include "amf/config.hpp"
#include "amf/error.hpp"
#include "amf/synth.hpp"

using namespace amf;

TEST(Synth, SameSeedSamePanels) {
    SynthSpec spec;
    spec.n_weeks = 100;
    spec.n_stocks = 5;
    const auto a = generate(spec), b = generate(spec);
    EXPECT_TRUE(a.data.prices == b.data.prices);
    EXPECT_TRUE(a.data.factors == b.data.factors);
    spec.seed = 2;
    EXPECT_FALSE(generate(spec).data.prices == a.data.prices);
}

TEST(Synth, CalendarAndShape) {
    SynthSpec spec;
    const auto m = generate(spec);
    EXPECT_EQ(m.data.prices.dates().front(), make_date(2007, 1, 5));
    EXPECT_EQ(m.data.prices.n_dates(), 626);
    EXPECT_EQ(m.data.factors.n_factors(), spec.n_factors());
    EXPECT_EQ(m.data.factors.factor(0).role, FactorRole::Mma);
    EXPECT_EQ(m.data.factors.factor(1).role, FactorRole::Market);
    for (const auto& w : enumerate_windows(2007, 2018, 3)) {
        EXPECT_EQ(window_rows(m.data.prices.dates(), w).size(), static_cast<Index>(w.n));
    }
}

TEST(Synth, NoiselessLevelsFollowFactorModel) {
    SynthSpec spec;
    spec.noise_sd = 0.0;
    spec.n_weeks = 80;
    spec.n_stocks = 3;
    const auto m = generate(spec);
    const Matrix& v = m.data.factors.values();
    for (Index i = 0; i < 3; ++i) {
        const Vector model = v * m.truth.betas.row(i).transpose();
        const Vector y = m.data.prices.prices().col(i);
        EXPECT_LT((y - model).cwiseAbs().maxCoeff(), 1e-9 * y.cwiseAbs().maxCoeff());
    }
}

TEST(Synth, JumpAndInception) {
    SynthSpec spec;
    spec.n_weeks = 60;
    spec.n_stocks = 2;
    spec.dynamics = {BetaDynamics{DynamicsKind::Jump, 1.0, 30, 0.0}, BetaDynamics{}};
    spec.inception_week.assign(static_cast<std::size_t>(spec.n_factors()), 0);
    spec.inception_week.back() = 20;
    const auto m = generate(spec);
    const Index j = m.truth.support[0].back();
    EXPECT_EQ(m.truth.beta_at(0, j, 29), m.truth.betas(0, j));
    EXPECT_EQ(m.truth.beta_at(0, j, 30), m.truth.betas(0, j) + 1.0);
    EXPECT_TRUE(std::isnan(m.data.factors.values()(19, spec.n_factors() - 1)));
    EXPECT_FALSE(std::isnan(m.data.factors.values()(20, spec.n_factors() - 1)));
}

TEST(Synth, InvalidCovariance) {
    SynthSpec spec;
    spec.n_etfs = 2;
    spec.with_ff5 = false;
    spec.factor_cov = Matrix::Identity(3, 3);
    spec.factor_cov(1, 2) = spec.factor_cov(2, 1) = 2.0;
    try {
        generate(spec);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidCovariance);
    }
    spec.factor_cov = Matrix::Identity(2, 2);
    EXPECT_THROW(generate(spec), Error);
}

TEST(Synth, SpecParsing) {
    std::istringstream in(
        "# scenario\n"
        "n_stocks = 10\n"
        "n_weeks = 300\n"
        "jump_fraction = 0.3\n"
        "jump_date = 2008-07-01\n"
        "jump_size = 2\n"
        "noise = difference\n"
        "late_factors = 1\n"
        "late_load_fraction = 0.2\n");
    const auto spec = parse_synth_spec(parse_key_values(in));
    ASSERT_EQ(spec.dynamics.size(), 10u);
    EXPECT_EQ(spec.dynamics[2].kind, DynamicsKind::Jump);
    EXPECT_EQ(spec.dynamics[3].kind, DynamicsKind::Constant);
    EXPECT_EQ(spec.dynamics[0].size, 2.0);
    EXPECT_EQ(spec.noise, NoiseModel::Difference);
    EXPECT_EQ(spec.late_loaders, 2);
    const auto m = generate(spec);
    EXPECT_EQ(m.data.prices.dates()[static_cast<std::size_t>(spec.dynamics[0].at)], make_date(2008, 7, 4));
    EXPECT_NE(m.truth.betas(0, spec.n_factors() - 1), 0.0);
    std::istringstream bad("bogus = 1\n");
    EXPECT_THROW(parse_synth_spec(parse_key_values(bad)), Error);
}

TEST(Synth, WilsonInterval) {
    const auto r = wilson_estimate("x", 50, 1000);
    EXPECT_NEAR(r.rate, 0.05, 1e-15);
    EXPECT_NEAR(r.lo, 0.0381, 1e-4);
    EXPECT_NEAR(r.hi, 0.0653, 1e-4);
}

TEST(Synth, BatteryRejectsBadInput) {
    SynthSpec spec;
    EXPECT_THROW(null_battery(spec, 0, SweepConfig{}), Error);
    spec.dynamics.assign(static_cast<std::size_t>(spec.n_stocks), BetaDynamics{DynamicsKind::Drift, 0, 0, 1});
    EXPECT_THROW(null_battery(spec, 1, SweepConfig{}), Error);
}

TEST(Config, ParseApplyAndHash) {
    std::istringstream in("first_year = 2008\nthreshold = 0.4\n\n# comment\nworkers = 8\nseed = 9\n");
    RunConfig a;
    a.apply(parse_key_values(in));
    EXPECT_EQ(a.sweep.first_year, 2008);
    EXPECT_EQ(a.sweep.gibs.threshold_within, 0.4);
    EXPECT_EQ(a.sweep.gibs.threshold_union, 0.4);
    EXPECT_EQ(a.seed, 9u);
    RunConfig b = a;
    b.sweep.workers = 1;
    b.output_dir = "elsewhere";
    EXPECT_EQ(a.hash(), b.hash());
    b.set("support_cap", "10");
    EXPECT_NE(a.hash(), b.hash());
    EXPECT_EQ(a.hash_hex().size(), 16u);
    EXPECT_THROW(a.set("nope", "1"), Error);
    EXPECT_THROW(a.set("folds", "x"), Error);
    EXPECT_THROW(a.set("min_len", "0"), Error);
    std::istringstream broken("just text\n");
    EXPECT_THROW(parse_key_values(broken), Error);
}

TEST(Config, Defaults) {
    const RunConfig c;
    EXPECT_EQ(c.sweep.first_year, 2007);
    EXPECT_EQ(c.sweep.last_year, 2018);
    EXPECT_EQ(c.sweep.min_len, 3);
    EXPECT_EQ(c.sweep.gibs.support_cap, 20);
    EXPECT_EQ(c.sweep.gibs.n_folds, 10);
    EXPECT_EQ(c.sweep.fdr, 0.05);
    EXPECT_EQ(c.sweep.basis_size, 5);
}
