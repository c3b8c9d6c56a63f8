#include "json_out.hpp"

#include <cmath>
#include <fstream>

#include "amf/calendar.hpp"
#include "amf/error.hpp"

namespace amf::cli {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json ids(const std::vector<Index>& idx, const std::vector<FactorInfo>& factors) {
    Json out = Json::array();
    for (Index j : idx) out.push_back(factors.at(static_cast<std::size_t>(j)).id);
    return out;
}

Json window_json(const Window& w) {
    return Json{{"start_year", w.start_year}, {"end_year", w.end_year}, {"start", format_date(w.start)},
                {"end", format_date(w.end)},   {"mid", format_date(w.mid)},     {"weeks", w.n}};
}

Json selection_json(const SelectionResult& r, const std::vector<FactorInfo>& factors) {
    Json coef = Json::array();
    for (std::size_t k = 0; k < r.selected_set.size(); ++k) {
        const auto i = static_cast<Index>(k);
        coef.push_back({{"factor", factors.at(static_cast<std::size_t>(r.selected_set[k])).id},
                        {"beta", number(r.fit.coefficients(i))},
                        {"se", number(r.fit.standard_errors(i))},
                        {"t", number(r.fit.t_stats(i))},
                        {"p", number(r.fit.p_values(i))}});
    }
    return Json{{"asset", r.asset},
                {"window", r.window.label()},
                {"baseline", r.baseline},
                {"selected", ids(r.selected_set, factors)},
                {"significant", ids(r.significant_set, factors)},
                {"coefficients", coef},
                {"rows", r.rows.size()},
                {"r2", number(r.fit.r2)},
                {"adj_r2", number(r.fit.adj_r2)}};
}

Json window_report_json(const WindowReport& r) {
    Json failures = Json::array();
    for (const auto& s : r.stocks) {
        if (s.failed()) failures.push_back({{"asset", s.asset}, {"error", s.error}});
    }
    Json out{{"window", window_json(r.window)},
             {"retained", r.retained},
             {"tested", r.tested},
             {"failed", r.failed},
             {"discoveries", r.discoveries},
             {"value", number(r.value)},
             {"stock_failures", failures},
             {"warnings", r.warnings}};
    if (!r.error.empty()) out["error"] = r.error;
    return out;
}

Json sweep_manifest(const SweepResult& result, const RunConfig& cfg, const std::string& csv_name) {
    Json windows = Json::array();
    Json failed = Json::array();
    for (const auto& w : result.windows) {
        windows.push_back(window_report_json(w));
        if (!w.error.empty()) failed.push_back({{"window", w.window.label()}, {"error", w.error}});
    }
    return Json{{"model", to_string(result.grid.model())},
                {"test", to_string(result.grid.test())},
                {"config_hash", cfg.hash_hex()},
                {"seed", cfg.seed},
                {"grid_csv", csv_name},
                {"populated_cells", result.grid.populated().size()},
                {"partial", result.partial()},
                {"failed_windows", failed},
                {"windows", windows},
                {"metadata", {{"workers", cfg.sweep.workers}}}};
}

Json truth_json(const SynthMarket& market) {
    const auto& t = market.truth;
    const auto& factors = market.data.factors.factors();
    Json stocks = Json::array();
    for (Index i = 0; i < t.betas.rows(); ++i) {
        Json betas = Json::object();
        for (Index j : t.support[static_cast<std::size_t>(i)]) betas[factors[j].id] = t.betas(i, j);
        const auto& d = t.dynamics[static_cast<std::size_t>(i)];
        Json dyn{{"kind", d.kind == DynamicsKind::Constant ? "constant"
                          : d.kind == DynamicsKind::Jump   ? "jump"
                                                           : "drift"}};
        if (d.kind == DynamicsKind::Jump) {
            dyn["size"] = d.size;
            dyn["week"] = d.at;
            dyn["date"] = format_date(market.data.prices.dates().at(static_cast<std::size_t>(d.at)));
        }
        if (d.kind == DynamicsKind::Drift) dyn["slope_per_year"] = d.slope;
        stocks.push_back({{"asset", market.data.prices.assets()[static_cast<std::size_t>(i)]},
                          {"alpha", t.alpha(i)},
                          {"betas", betas},
                          {"dynamics", dyn}});
    }
    Json inception = Json::object();
    for (std::size_t j = 0; j < factors.size(); ++j) {
        if (t.inception_week[j] > 0) inception[factors[j].id] = t.inception_week[j];
    }
    return Json{{"stocks", stocks}, {"late_inception_weeks", inception}};
}

Json calibration_json(const CalibrationReport& report, const std::vector<RateEstimate>& ladder) {
    auto rate = [](const RateEstimate& r) {
        return Json{{"test", r.test},   {"rejections", r.rejections}, {"trials", r.trials},
                    {"failures", r.failures}, {"rate", number(r.rate)}, {"ci_low", number(r.lo)},
                    {"ci_high", number(r.hi)}};
    };
    Json null_rates = Json::array(), power = Json::array();
    for (const auto& r : report.rates) null_rates.push_back(rate(r));
    for (const auto& r : ladder) power.push_back(rate(r));
    return Json{{"reps", report.reps}, {"level", report.level}, {"null", null_rates}, {"power", power}};
}

void write_json(const Json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Validation, "cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace amf::cli
