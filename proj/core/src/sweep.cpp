#include "amf/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "amf/error.hpp"

namespace amf {

void parallel_for(Index n, int workers, const std::function<void(Index)>& task) {
    const auto threads = static_cast<Index>(std::clamp<Index>(workers, 1, std::max<Index>(n, 1)));
    if (threads <= 1) {
        for (Index i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<Index> next{0};
    std::vector<std::thread> pool;
    for (Index w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (Index i = next++; i < n; i = next++) task(i);
        });
    }
    for (auto& t : pool) t.join();
}

WindowData window_data(const MarketData& data, const Window& window, double min_coverage) {
    data.check_aligned();
    WindowData wd;
    wd.window = window;
    wd.rows = window_rows(data.prices.dates(), window);
    if (wd.rows.size() < 2) throw Error(ErrorCode::TooShort, "window " + window.label() + " has under two weeks");
    wd.v_levels = data.factors.values().middleRows(wd.rows.begin, wd.rows.size());
    wd.dv = difference_columns(wd.v_levels);
    wd.assets = filter_assets(data.prices, window, min_coverage);
    return wd;
}

namespace {

SelectionResult fit_model(const Vector& dy, const WindowData& wd, const GibsContext* ctx, Model model,
                          const MarketData& data, const SweepConfig& cfg) {
    if (model == Model::Ff5) return ff5_baseline(dy, wd.dv, data.factors.factors(), cfg.gibs.significance);
    if (!ctx) throw Error(ErrorCode::InvalidArgument, "AMF model needs a prepared context");
    auto fit = run_gibs(*ctx, dy, cfg.gibs);
    if (fit.selected_set.empty()) throw Error(ErrorCode::EmptyPath, "selection returned no factors");
    return fit;
}

}  // namespace

StockOutcome evaluate_stock(const MarketData& data, const WindowData& wd, const GibsContext* ctx, Index asset,
                            Model model, TestKind test, const SweepConfig& cfg, const Taxonomy& taxonomy) {
    StockOutcome out;
    out.asset = data.prices.assets().at(static_cast<std::size_t>(asset));
    try {
        const Vector dy = asset_differences(data.prices, asset, wd.rows);
        auto fit = fit_model(dy, wd, ctx, model, data, cfg);
        fit.asset = out.asset;
        fit.window = wd.window;
        out.selected = fit.selected_set;
        const auto& s = fit.selected_set;
        switch (test) {
            case TestKind::Intercept: {
                const Vector y = data.prices.prices().col(asset).segment(wd.rows.begin, wd.rows.size());
                out.value = intercept_test(y, wd.v_levels, s);
                break;
            }
            case TestKind::Linear:
                out.value = linear_invariance_test(dy, wd.dv, s, HalfIndicator::split(dy.size())).p_value;
                break;
            case TestKind::Residual:
                out.value = residual_analysis(dy, wd.dv, s, HalfIndicator::split(dy.size()),
                                              data.factors.factors(), taxonomy, cfg.gibs)
                                .p_value;
                break;
            case TestKind::Spline:
                out.value = spline_invariance_test(dy, wd.dv, s, cfg.basis_size, out.asset);
                break;
            case TestKind::AdjR2:
                out.value = fit.fit.adj_r2;
                break;
            case TestKind::OosR2: {
                const Index from = wd.rows.end - 1;
                const Index to = std::min(from + cfg.oos_weeks + 1, data.prices.n_dates());
                const RowRange future{from, to};
                const Vector fdy = asset_differences(data.prices, asset, future);
                const Matrix fdv =
                    to - from >= 2 ? difference_columns(data.factors.values().middleRows(from, to - from)) : Matrix();
                if (fdy.size() == 0) throw Error(ErrorCode::MissingFuture, "no weeks after the window");
                out.value = oos_evaluate(fit, fdy, fdv);
                break;
            }
        }
    } catch (const std::exception& e) {
        out.value.reset();
        out.error = e.what();
    }
    return out;
}

void aggregate_window(WindowReport& r, TestKind test, double fdr) {
    r.retained = static_cast<Index>(r.stocks.size());
    r.tested = r.failed = r.discoveries = 0;
    std::vector<double> values;
    for (const auto& s : r.stocks) {
        if (s.failed()) {
            ++r.failed;
            continue;
        }
        ++r.tested;
        if (s.value) values.push_back(*s.value);
    }
    r.value = kNaN;
    if (!is_rejection_test(test)) {
        double sum = 0.0;
        for (double v : values) sum += v;
        if (!values.empty()) r.value = sum / static_cast<double>(values.size());
        return;
    }
    if (r.tested == 0) return;
    if (!values.empty()) {
        for (double q : bhy_adjust(values)) r.discoveries += q < fdr;
    }
    r.value = 100.0 * static_cast<double>(r.discoveries) / static_cast<double>(r.tested);
}

bool SweepResult::partial() const {
    return std::any_of(windows.begin(), windows.end(), [](const WindowReport& w) { return !w.error.empty(); });
}

SweepResult sweep(const MarketData& data, const Taxonomy& taxonomy, Model model, TestKind test,
                  const SweepConfig& cfg) {
    SweepResult result;
    result.grid = TestGrid(cfg.first_year, cfg.last_year, cfg.min_len, model, test);
    for (const auto& w : enumerate_windows(cfg.first_year, cfg.last_year, cfg.min_len)) {
        WindowReport report;
        report.window = w;
        try {
            const auto wd = window_data(data, w, cfg.min_coverage);
            std::optional<GibsContext> ctx;
            if (model == Model::Amf || test == TestKind::Residual) {
                ctx = prepare_gibs(wd.dv, data.factors.factors(), taxonomy, cfg.gibs);
                report.warnings = ctx->reduction.warnings;
            }
            report.stocks.resize(wd.assets.size());
            parallel_for(static_cast<Index>(wd.assets.size()), cfg.workers, [&](Index k) {
                report.stocks[static_cast<std::size_t>(k)] =
                    evaluate_stock(data, wd, ctx ? &*ctx : nullptr, wd.assets[static_cast<std::size_t>(k)], model,
                                   test, cfg, taxonomy);
            });
            aggregate_window(report, test, cfg.fdr);
        } catch (const std::exception& e) {
            report.error = e.what();
            report.value = kNaN;
        }
        result.grid.set(w.start_year, w.end_year, report.value);
        result.windows.push_back(std::move(report));
    }
    return result;
}

}  // namespace amf
