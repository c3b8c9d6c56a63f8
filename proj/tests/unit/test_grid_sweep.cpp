#include <gtest/gtest.h>

#include <filesystem>

#include "amf/error.hpp"
#include "amf/grid.hpp"
#include "amf/sweep.hpp"
#include "amf/synth.hpp"

using namespace amf;

TEST(Grid, PopulatedMatchesWindows) {
    const TestGrid g(2007, 2018, 3);
    const auto cells = g.populated();
    const auto windows = enumerate_windows(2007, 2018, 3);
    ASSERT_EQ(cells.size(), 55u);
    for (std::size_t k = 0; k < cells.size(); ++k) {
        EXPECT_EQ(cells[k].start_year, windows[k].start_year);
        EXPECT_EQ(cells[k].end_year, windows[k].end_year);
    }
    EXPECT_FALSE(g.valid(2010, 2011));
    TestGrid h = g;
    EXPECT_THROW(h.set(2010, 2011, 1.0), Error);
}

TEST(Grid, SkewDiagonalsBruteForce) {
    TestGrid g(2007, 2018, 1);
    for (const auto& c : g.populated()) g.set(c.start_year, c.end_year, c.start_year * 100.0 + c.end_year);
    const int n = static_cast<int>(g.size());
    for (int k = -n; k <= n; ++k) {
        std::vector<std::pair<int, int>> want, got;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (j - i == k && g.valid(2007 + i, 2007 + j)) want.emplace_back(2007 + i, 2007 + j);
            }
        }
        for (const auto& c : g.skew_diagonal(k)) {
            got.emplace_back(c.start_year, c.end_year);
            EXPECT_EQ(c.value, c.start_year * 100.0 + c.end_year);
        }
        EXPECT_EQ(got, want) << k;

        want.clear();
        got.clear();
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i + j == n - 1 + k && g.valid(2007 + i, 2007 + j)) want.emplace_back(2007 + i, 2007 + j);
            }
        }
        for (const auto& c : g.skew_anti_diagonal(k)) got.emplace_back(c.start_year, c.end_year);
        EXPECT_EQ(got, want) << k;
    }
    // k = 0 on the diagonal family: one-year windows
    for (const auto& c : g.skew_diagonal(0)) EXPECT_EQ(c.start_year, c.end_year);
}

TEST(Grid, CsvRoundTripAndDiff) {
    TestGrid a(2007, 2012, 3, Model::Amf, TestKind::Linear), b(2007, 2012, 3, Model::Ff5, TestKind::Linear);
    for (const auto& c : a.populated()) {
        a.set(c.start_year, c.end_year, c.end_year - c.start_year + 0.25);
        b.set(c.start_year, c.end_year, 0.25);
    }
    a.set(2008, 2012, kNaN);
    const auto path = (std::filesystem::temp_directory_path() / "amf_grid_test.csv").string();
    write_grid_csv(a, path);
    const auto back = read_grid_csv(path);
    EXPECT_TRUE(back == a);
    EXPECT_NE(grid_csv(a).find("2008,2012,NA"), std::string::npos);
    const auto d = grid_diff(a, b);
    EXPECT_EQ(d.at(2007, 2012), 5.0);
    EXPECT_TRUE(std::isnan(d.at(2008, 2012)));
    EXPECT_THROW(grid_diff(a, TestGrid(2007, 2013, 3)), Error);
    EXPECT_NE(grid_svg(a).find("<svg"), std::string::npos);
}

TEST(Grid, Tags) {
    EXPECT_EQ(parse_model("ff5"), Model::Ff5);
    EXPECT_EQ(parse_test_kind("oos_r2"), TestKind::OosR2);
    EXPECT_THROW(parse_test_kind("nope"), Error);
    EXPECT_FALSE(is_rejection_test(TestKind::AdjR2));
}

TEST(Aggregate, BhyShareOverTestedStocks) {
    WindowReport r;
    auto add = [&](std::optional<double> v, std::string err = {}) {
        StockOutcome s;
        s.value = v;
        s.error = std::move(err);
        r.stocks.push_back(s);
    };
    add(0.001);
    add(0.001);
    add(0.9);
    add(std::nullopt, "failed");
    aggregate_window(r, TestKind::Linear, 0.05);
    EXPECT_EQ(r.retained, 4);
    EXPECT_EQ(r.tested, 3);
    EXPECT_EQ(r.failed, 1);
    EXPECT_EQ(r.discoveries, 2);
    EXPECT_NEAR(r.value, 200.0 / 3.0, 1e-12);
}

TEST(Aggregate, ResidualCountsStocksWithoutNewFactors) {
    WindowReport r;
    for (auto v : {std::optional<double>(0.0001), std::optional<double>(), std::optional<double>()}) {
        StockOutcome s;
        s.value = v;
        r.stocks.push_back(s);
    }
    aggregate_window(r, TestKind::Residual, 0.05);
    const double full = r.value;
    EXPECT_NEAR(full, 100.0 / 3.0, 1e-12);
    // the tested-only denominator would give 100%
    EXPECT_LE(full, 100.0);
}

TEST(Aggregate, MetricMean) {
    WindowReport r;
    for (double v : {0.2, 0.4}) {
        StockOutcome s;
        s.value = v;
        r.stocks.push_back(s);
    }
    aggregate_window(r, TestKind::AdjR2, 0.05);
    EXPECT_NEAR(r.value, 0.3, 1e-15);
}

TEST(Sweep, WorkerCountDoesNotChangeGrid) {
    SynthSpec spec;
    spec.n_stocks = 6;
    spec.n_etfs = 8;
    spec.n_weeks = 52 * 4 + 1;
    spec.seed = 11;
    const auto m = generate(spec);
    SweepConfig cfg;
    cfg.first_year = 2007;
    cfg.last_year = 2010;
    cfg.workers = 1;
    const auto a = sweep(m.data, Taxonomy::builtin(), Model::Amf, TestKind::Linear, cfg);
    cfg.workers = 4;
    const auto b = sweep(m.data, Taxonomy::builtin(), Model::Amf, TestKind::Linear, cfg);
    EXPECT_EQ(grid_csv(a.grid), grid_csv(b.grid));
    EXPECT_EQ(a.grid.populated().size(), 3u);
    EXPECT_FALSE(a.partial());
}

TEST(Sweep, NoiselessOosIsPerfect) {
    SynthSpec spec;
    spec.n_stocks = 4;
    spec.n_etfs = 6;
    spec.block_corr = 0.0;
    spec.noise_sd = 0.0;
    spec.n_weeks = 52 * 4 + 30;
    const auto m = generate(spec);
    SweepConfig cfg;
    cfg.first_year = 2007;
    cfg.last_year = 2010;
    const auto r = sweep(m.data, Taxonomy::builtin(), Model::Amf, TestKind::OosR2, cfg);
    for (const auto& w : r.windows) {
        if (w.window.end_year == 2010) {
            EXPECT_NEAR(w.value, 1.0, 1e-8) << w.window.label();
        }
    }
}
