#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "amf/gibs.hpp"
#include "amf/grid.hpp"
#include "amf/invariance.hpp"

namespace amf {

struct SweepConfig {
    int first_year = 2007;
    int last_year = 2018;
    int min_len = 3;
    GibsConfig gibs;
    int basis_size = 5;
    double fdr = 0.05;
    double min_coverage = 2.0 / 3.0;
    Index oos_weeks = 26;
    int workers = 1;
};

/// Everything a window needs that does not depend on the stock.
struct WindowData {
    Window window;
    RowRange rows;               // price/factor rows inside the window
    Matrix v_levels;             // factor levels over rows
    Matrix dv;                   // factor differences, rows.size() - 1 rows
    std::vector<Index> assets;   // retained assets
};

WindowData window_data(const MarketData& data, const Window& window, double min_coverage = 2.0 / 3.0);

/// Per-stock outcome: a p-value or a metric. `value` is empty with an empty
/// `error` when the test produced no p-value (residual analysis without new
/// factors).
struct StockOutcome {
    std::string asset;
    std::optional<double> value;
    std::string error;
    std::vector<Index> selected;

    bool failed() const noexcept { return !error.empty(); }
};

/// Fits the model for one stock and runs one test. Errors are returned in the
/// outcome, never thrown. `context` is required for the AMF model and the
/// residual test.
StockOutcome evaluate_stock(const MarketData& data, const WindowData& wd, const GibsContext* context, Index asset,
                            Model model, TestKind test, const SweepConfig& config, const Taxonomy& taxonomy);

struct WindowReport {
    Window window;
    Index retained = 0;
    Index tested = 0;
    Index failed = 0;
    Index discoveries = 0;
    double value = kNaN;
    std::string error;
    std::vector<StockOutcome> stocks;
    std::vector<std::string> warnings;
};

/// Cell value from stock outcomes: for rejection tests, 100 times the share of
/// BHY q-values below fdr among stocks that did not fail; for metrics, the
/// mean. Fills the counters of `report`.
void aggregate_window(WindowReport& report, TestKind test, double fdr);

struct SweepResult {
    TestGrid grid;
    std::vector<WindowReport> windows;

    /// True when any window failed as a whole.
    bool partial() const;
};

SweepResult sweep(const MarketData& data, const Taxonomy& taxonomy, Model model, TestKind test,
                  const SweepConfig& config);

/// Runs task(0..n-1) on up to `workers` threads. Tasks must not throw.
void parallel_for(Index n, int workers, const std::function<void(Index)>& task);

}  // namespace amf
