#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "amf/calendar.hpp"
#include "amf/config.hpp"
#include "amf/error.hpp"
#include "amf/panel_io.hpp"
#include "amf/sweep.hpp"
#include "amf/synth.hpp"
#include "json_out.hpp"

namespace fs = std::filesystem;
using namespace amf;
using cli::Json;

namespace {

constexpr int kOk = 0, kValidation = 1, kNumerical = 2, kPartial = 3;
constexpr const char* kOutputEnv = "AMF_OUTPUT_DIR";

struct Settings {
    std::string config_file;
    KeyValues overrides;
    bool output_set = false;

    RunConfig resolve() const {
        RunConfig cfg;
        bool out = output_set;
        if (!config_file.empty()) {
            const auto file = read_key_value_file(config_file);
            for (const auto& kv : file) out = out || kv.first == "output_dir";
            cfg.apply(file);
        }
        if (!out) {
            if (const char* env = std::getenv(kOutputEnv); env && *env) cfg.output_dir = env;
        }
        cfg.apply(overrides);
        return cfg;
    }
};

/// Flags that mirror RunConfig keys; every flag is forwarded as key = value.
void add_run_options(CLI::App* cmd, Settings& s) {
    cmd->add_option("-c,--config", s.config_file, "key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_option_function<std::vector<std::string>>(
        "--set",
        [&s](const std::vector<std::string>& items) {
            for (const auto& item : items) {
                const auto eq = item.find('=');
                if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value");
                s.overrides.emplace_back(item.substr(0, eq), item.substr(eq + 1));
                if (item.substr(0, eq) == "output_dir") s.output_set = true;
            }
        },
        "override any configuration key (repeatable)");
    struct Flag {
        const char* name;
        const char* key;
        const char* help;
    };
    static const Flag flags[] = {
        {"--bundle", "bundle", "validated panel directory written by ingest"},
        {"--prices", "prices", "price CSV (date,id,price,return)"},
        {"--factors", "factors", "factor CSV (date,id,value,role,class,subclass)"},
        {"--taxonomy", "taxonomy", "subclass,class CSV replacing the built-in table"},
        {"--first-year", "first_year", "first calendar year of the window grid"},
        {"--last-year", "last_year", "last calendar year of the window grid"},
        {"--min-len", "min_len", "minimum window length in years"},
        {"--threshold", "threshold", "clustering threshold for both stages"},
        {"--threshold-within", "threshold_within", "clustering threshold inside groups"},
        {"--threshold-union", "threshold_union", "clustering threshold across groups"},
        {"--grouping", "grouping", "class or subclass"},
        {"--support-cap", "support_cap", "largest LASSO support"},
        {"--folds", "folds", "cross-validation folds"},
        {"--grid-size", "grid_size", "lambda grid size"},
        {"--significance", "significance", "coefficient significance level"},
        {"--fdr", "fdr", "false discovery rate level"},
        {"--basis-size", "basis_size", "spline basis dimension"},
        {"--oos-weeks", "oos_weeks", "weeks after the window used out of sample"},
        {"--seed", "seed", "random seed"},
        {"--workers", "workers", "worker threads"},
    };
    for (const auto& f : flags) {
        const std::string key = f.key;
        cmd->add_option_function<std::string>(
            f.name, [&s, key](const std::string& v) { s.overrides.emplace_back(key, v); }, f.help);
    }
    cmd->add_option_function<std::string>(
        "-o,--out-dir",
        [&s](const std::string& v) {
            s.overrides.emplace_back("output_dir", v);
            s.output_set = true;
        },
        std::string("output directory (default $") + kOutputEnv + " or ./out)");
}

Taxonomy load_taxonomy(const RunConfig& cfg) {
    if (!cfg.taxonomy.empty()) return Taxonomy::from_csv(cfg.taxonomy);
    if (!cfg.bundle.empty() && fs::exists(fs::path(cfg.bundle) / "taxonomy.csv")) {
        return Taxonomy::from_csv((fs::path(cfg.bundle) / "taxonomy.csv").string());
    }
    return Taxonomy::builtin();
}

MarketData load_market(const RunConfig& cfg, const Taxonomy& tax, IngestLog* log = nullptr) {
    std::string prices = cfg.prices, factors = cfg.factors;
    if (!cfg.bundle.empty()) {
        prices = (fs::path(cfg.bundle) / "prices.csv").string();
        factors = (fs::path(cfg.bundle) / "factors.csv").string();
    }
    if (prices.empty() || factors.empty()) {
        throw Error(ErrorCode::Validation, "give --bundle or both --prices and --factors");
    }
    return read_market(prices, factors, tax, log);
}

fs::path ensure_dir(const std::string& dir) {
    fs::create_directories(dir);
    return fs::path(dir);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Validation, "cannot write " + path.string());
    out << text;
}

Json summary_json(const MarketData& md, const IngestLog& log) {
    const auto& p = md.prices;
    Json roles = Json::object();
    for (auto role : {FactorRole::Mma, FactorRole::Market, FactorRole::Ff5, FactorRole::Etf}) {
        roles[std::string(to_string(role))] = md.factors.indices_with_role(role).size();
    }
    const double cells = static_cast<double>(p.n_dates() * p.n_assets());
    const double present = static_cast<double>(p.mask().count());
    return Json{{"weeks", p.n_dates()},
                {"first_date", p.n_dates() ? format_date(p.dates().front()) : ""},
                {"last_date", p.n_dates() ? format_date(p.dates().back()) : ""},
                {"assets", p.n_assets()},
                {"factors", md.factors.n_factors()},
                {"factor_roles", roles},
                {"price_coverage", cells > 0 ? present / cells : 0.0},
                {"warnings", log.warnings}};
}

int cmd_ingest(const Settings& s, const std::string& out) {
    const auto cfg = s.resolve();
    const auto tax = load_taxonomy(cfg);
    IngestLog log;
    const auto md = load_market(cfg, tax, &log);
    const auto dir = ensure_dir(out.empty() ? (fs::path(cfg.output_dir) / "bundle").string() : out);
    write_price_csv(md.prices, (dir / "prices.csv").string());
    write_factor_csv(md.factors, (dir / "factors.csv").string());
    if (!cfg.taxonomy.empty()) fs::copy_file(cfg.taxonomy, dir / "taxonomy.csv", fs::copy_options::overwrite_existing);
    cli::write_json(summary_json(md, log), (dir / "summary.json").string());
    std::cout << "bundle " << dir.string() << ": " << md.prices.n_dates() << " weeks, " << md.prices.n_assets()
              << " assets, " << md.factors.n_factors() << " factors, " << log.warnings.size() << " warnings\n";
    for (const auto& w : log.warnings) std::cerr << "warning: " << w << '\n';
    return kOk;
}

struct WindowArgs {
    int start = 0;
    int end = 0;
    std::string model = "amf";
    std::string asset;
};

void add_window_args(CLI::App* cmd, WindowArgs& w) {
    cmd->add_option("--start", w.start, "first year of the window")->required();
    cmd->add_option("--end", w.end, "last year of the window")->required();
    cmd->add_option("--model", w.model, "amf or ff5")->capture_default_str();
    cmd->add_option("--asset", w.asset, "restrict to one asset id");
}

std::vector<Index> pick_assets(const MarketData& md, const WindowData& wd, const std::string& asset) {
    if (asset.empty()) return wd.assets;
    const auto& names = md.prices.assets();
    const auto it = std::find(names.begin(), names.end(), asset);
    if (it == names.end()) throw Error(ErrorCode::Validation, "unknown asset " + asset);
    return {static_cast<Index>(it - names.begin())};
}

int cmd_gibs(const Settings& s, const WindowArgs& w) {
    const auto cfg = s.resolve();
    const auto tax = load_taxonomy(cfg);
    const auto md = load_market(cfg, tax);
    const auto model = parse_model(w.model);
    const auto wd = window_data(md, make_window(w.start, w.end), cfg.sweep.min_coverage);
    const auto& factors = md.factors.factors();
    std::optional<GibsContext> ctx;
    if (model == Model::Amf) ctx = prepare_gibs(wd.dv, factors, tax, cfg.sweep.gibs);
    const auto assets = pick_assets(md, wd, w.asset);

    std::vector<Json> rows(assets.size());
    parallel_for(static_cast<Index>(assets.size()), cfg.sweep.workers, [&](Index k) {
        const Index i = assets[static_cast<std::size_t>(k)];
        const auto& id = md.prices.assets()[static_cast<std::size_t>(i)];
        try {
            const Vector dy = asset_differences(md.prices, i, wd.rows);
            auto r = model == Model::Amf ? run_gibs(*ctx, dy, cfg.sweep.gibs)
                                         : ff5_baseline(dy, wd.dv, factors, cfg.sweep.gibs.significance);
            r.asset = id;
            r.window = wd.window;
            if (!r.selected_set.empty()) check_selection_chain(r);
            rows[static_cast<std::size_t>(k)] = cli::selection_json(r, factors);
        } catch (const std::exception& e) {
            rows[static_cast<std::size_t>(k)] = Json{{"asset", id}, {"error", e.what()}};
        }
    });
    Json stocks = Json::array();
    Index failed = 0;
    for (auto& r : rows) {
        failed += r.contains("error");
        stocks.push_back(std::move(r));
    }
    Json out{{"model", to_string(model)}, {"window", cli::window_json(wd.window)},
             {"config_hash", cfg.hash_hex()}, {"seed", cfg.seed}, {"stocks", stocks}};
    if (ctx) {
        out["candidates"] = cli::ids(ctx->reduction.candidates, factors);
        out["warnings"] = ctx->reduction.warnings;
    }
    const auto path = ensure_dir(cfg.output_dir) / ("gibs_" + std::string(to_string(model)) + "_" +
                                                    wd.window.label() + ".json");
    cli::write_json(out, path.string());
    std::cout << path.string() << ": " << assets.size() << " stocks, " << failed << " failed\n";
    return failed == static_cast<Index>(assets.size()) && failed > 0 ? kPartial : kOk;
}

int cmd_test(const Settings& s, const WindowArgs& w, TestKind test) {
    const auto cfg = s.resolve();
    const auto tax = load_taxonomy(cfg);
    const auto md = load_market(cfg, tax);
    const auto model = parse_model(w.model);
    const auto wd = window_data(md, make_window(w.start, w.end), cfg.sweep.min_coverage);
    std::optional<GibsContext> ctx;
    if (model == Model::Amf || test == TestKind::Residual) {
        ctx = prepare_gibs(wd.dv, md.factors.factors(), tax, cfg.sweep.gibs);
    }
    const auto assets = pick_assets(md, wd, w.asset);
    WindowReport report;
    report.window = wd.window;
    report.stocks.resize(assets.size());
    parallel_for(static_cast<Index>(assets.size()), cfg.sweep.workers, [&](Index k) {
        report.stocks[static_cast<std::size_t>(k)] = evaluate_stock(
            md, wd, ctx ? &*ctx : nullptr, assets[static_cast<std::size_t>(k)], model, test, cfg.sweep, tax);
    });
    aggregate_window(report, test, cfg.sweep.fdr);

    std::vector<double> ps;
    for (const auto& st : report.stocks) {
        if (!st.failed() && st.value) ps.push_back(*st.value);
    }
    const auto qs = ps.empty() ? std::vector<double>{} : bhy_adjust(ps);
    std::string csv = "asset,p_value,q_value,status\n";
    std::size_t q = 0;
    for (const auto& st : report.stocks) {
        csv += st.asset + ",";
        if (st.failed()) {
            std::string msg = st.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            csv += "NA,NA,failed: " + msg + "\n";
        } else if (!st.value) {
            csv += "NA,NA,no new factors\n";
        } else {
            csv += format_double(*st.value) + "," + format_double(qs[q++]) + ",ok\n";
        }
    }
    const auto path = ensure_dir(cfg.output_dir) / ("test_" + std::string(to_string(test)) + "_" +
                                                    std::string(to_string(model)) + "_" + wd.window.label() + ".csv");
    write_text(path, csv);
    std::cout << csv;
    std::cout << "# window " << wd.window.label() << ": " << report.discoveries << " of " << report.tested
              << " tested stocks with q < " << cfg.sweep.fdr << " (" << format_double(report.value) << "%), "
              << report.failed << " failed\n";
    return report.failed > 0 && report.tested == 0 ? kPartial : kOk;
}

int cmd_sweep(const Settings& s, const std::string& model_name, const std::string& test_name, bool svg) {
    const auto cfg = s.resolve();
    const auto tax = load_taxonomy(cfg);
    const auto md = load_market(cfg, tax);
    const auto model = parse_model(model_name);
    const auto test = parse_test_kind(test_name);
    const auto result = sweep(md, tax, model, test, cfg.sweep);
    const auto dir = ensure_dir(cfg.output_dir);
    const std::string stem = std::string(to_string(model)) + "_" + std::string(to_string(test));
    write_grid_csv(result.grid, (dir / (stem + ".csv")).string());
    cli::write_json(cli::sweep_manifest(result, cfg, stem + ".csv"), (dir / (stem + ".json")).string());
    if (svg) write_text(dir / (stem + ".svg"), grid_svg(result.grid, stem));
    std::cout << (dir / (stem + ".csv")).string() << ": " << result.grid.populated().size() << " windows";
    if (result.partial()) std::cout << " (some windows failed; see manifest)";
    std::cout << '\n';
    return result.partial() ? kPartial : kOk;
}

int cmd_diff(const Settings& s, const std::string& a, const std::string& b, std::string out, bool svg) {
    const auto cfg = s.resolve();
    const auto d = grid_diff(read_grid_csv(a), read_grid_csv(b));
    if (out.empty()) out = (ensure_dir(cfg.output_dir) / "diff.csv").string();
    write_grid_csv(d, out);
    if (svg) write_text(fs::path(out).replace_extension(".svg"), grid_svg(d, "difference"));
    std::cout << out << '\n';
    return kOk;
}

SynthSpec load_spec(const std::string& path, const RunConfig& cfg, bool seed_given) {
    SynthSpec spec = path.empty() ? SynthSpec{} : load_synth_spec(path);
    if (seed_given) spec.seed = cfg.seed;
    return spec;
}

bool seed_overridden(const Settings& s) {
    return std::any_of(s.overrides.begin(), s.overrides.end(), [](const auto& kv) { return kv.first == "seed"; });
}

int cmd_calibrate(const Settings& s, const std::string& spec_path, long reps, const std::vector<double>& ladder,
                  double level) {
    if (reps < 1) throw Error(ErrorCode::Validation, "reps must be at least 1");
    const auto cfg = s.resolve();
    const auto spec = load_spec(spec_path, cfg, seed_overridden(s));
    const auto report = null_battery(spec, reps, cfg.sweep, level);
    const auto power = ladder.empty() ? std::vector<RateEstimate>{} : power_ladder(spec, ladder, reps, cfg.sweep, level);
    const auto dir = ensure_dir(cfg.output_dir);
    auto j = cli::calibration_json(report, power);
    j["config_hash"] = cfg.hash_hex();
    j["seed"] = spec.seed;
    cli::write_json(j, (dir / "calibration.json").string());

    std::ostringstream text;
    text << "null rejection rates at level " << level << " (" << reps << " markets x " << spec.n_stocks
         << " stocks)\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %8s %8s %8s %18s  %s\n", "test", "trials", "failed", "rate", "95% CI",
                  "size check");
    text << line;
    for (const auto& r : report.rates) {
        const bool pass = r.trials > 0 && r.rate >= level * 0.6 && r.rate <= level * 1.4;
        std::snprintf(line, sizeof line, "%-16s %8ld %8ld %8.4f   [%6.4f, %6.4f]  %s\n", r.test.c_str(),
                      static_cast<long>(r.trials), static_cast<long>(r.failures), r.rate, r.lo, r.hi,
                      pass ? "pass" : "fail");
        text << line;
    }
    if (!power.empty()) {
        text << "\nlinear-test power by jump size\n";
        double prev = -1.0;
        for (const auto& r : power) {
            std::snprintf(line, sizeof line, "%-16s %8ld %8ld %8.4f   [%6.4f, %6.4f]  %s\n", r.test.c_str(),
                          static_cast<long>(r.trials), static_cast<long>(r.failures), r.rate, r.lo, r.hi,
                          r.rate >= prev ? "monotone" : "not monotone");
            text << line;
            prev = r.rate;
        }
    }
    write_text(dir / "calibration.txt", text.str());
    std::cout << text.str();
    return kOk;
}

int cmd_synth(const Settings& s, const std::string& spec_path, std::string out) {
    const auto cfg = s.resolve();
    const auto spec = load_spec(spec_path, cfg, seed_overridden(s));
    const auto market = generate(spec);
    const auto dir = ensure_dir(out.empty() ? (fs::path(cfg.output_dir) / "synth").string() : out);
    write_price_csv(market.data.prices, (dir / "prices.csv").string());
    write_factor_csv(market.data.factors, (dir / "factors.csv").string());
    auto truth = cli::truth_json(market);
    truth["seed"] = spec.seed;
    cli::write_json(truth, (dir / "truth.json").string());
    std::cout << dir.string() << ": " << market.data.prices.n_dates() << " weeks, " << market.data.prices.n_assets()
              << " stocks, " << market.data.factors.n_factors() << " factors\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive multi-factor pipeline: ingest, select, test, sweep and calibrate"};
    app.require_subcommand(1);
    std::function<int()> run;

    Settings s_ingest;
    std::string ingest_out;
    auto* ingest = app.add_subcommand("ingest", "validate CSV inputs and write a panel bundle");
    add_run_options(ingest, s_ingest);
    ingest->add_option("--bundle-out", ingest_out, "bundle directory (default <out-dir>/bundle)");
    ingest->callback([&] { run = [&] { return cmd_ingest(s_ingest, ingest_out); }; });

    Settings s_gibs;
    WindowArgs w_gibs;
    auto* gibs = app.add_subcommand("gibs", "run factor selection and the OLS refit for one window");
    add_run_options(gibs, s_gibs);
    add_window_args(gibs, w_gibs);
    gibs->callback([&] { run = [&] { return cmd_gibs(s_gibs, w_gibs); }; });

    struct TestCmd {
        const char* name;
        TestKind kind;
        const char* help;
    };
    static const TestCmd tests[] = {
        {"test-intercept", TestKind::Intercept, "two-step intercept test on price levels"},
        {"test-linear", TestKind::Linear, "half-split interaction test for constant betas"},
        {"test-residual", TestKind::Residual, "second-half residual re-selection test"},
        {"test-spline", TestKind::Spline, "B-spline time-varying coefficient test"},
    };
    std::vector<Settings> s_tests(std::size(tests));
    std::vector<WindowArgs> w_tests(std::size(tests));
    for (std::size_t k = 0; k < std::size(tests); ++k) {
        auto* cmd = app.add_subcommand(tests[k].name, tests[k].help);
        add_run_options(cmd, s_tests[k]);
        add_window_args(cmd, w_tests[k]);
        cmd->callback([&, k] { run = [&, k] { return cmd_test(s_tests[k], w_tests[k], tests[k].kind); }; });
    }

    Settings s_sweep;
    std::string sweep_model = "amf", sweep_test = "linear";
    bool sweep_svg = false;
    auto* sw = app.add_subcommand("sweep", "run one test over every window and write the grid");
    add_run_options(sw, s_sweep);
    sw->add_option("--model", sweep_model, "amf or ff5")->capture_default_str();
    sw->add_option("--test", sweep_test, "intercept, linear, residual, spline, adj_r2 or oos_r2")
        ->capture_default_str();
    sw->add_flag("--svg", sweep_svg, "also render an SVG heatmap");
    sw->callback([&] { run = [&] { return cmd_sweep(s_sweep, sweep_model, sweep_test, sweep_svg); }; });

    Settings s_diff;
    std::string diff_a, diff_b, diff_out;
    bool diff_svg = false;
    auto* diff = app.add_subcommand("diff", "cellwise difference of two grid CSVs (a - b)");
    add_run_options(diff, s_diff);
    diff->add_option("a", diff_a, "grid CSV")->required()->check(CLI::ExistingFile);
    diff->add_option("b", diff_b, "grid CSV")->required()->check(CLI::ExistingFile);
    diff->add_option("--out", diff_out, "output CSV (default <out-dir>/diff.csv)");
    diff->add_flag("--svg", diff_svg, "also render an SVG heatmap");
    diff->callback([&] { run = [&] { return cmd_diff(s_diff, diff_a, diff_b, diff_out, diff_svg); }; });

    Settings s_cal;
    std::string cal_spec;
    long cal_reps = 0;
    std::vector<double> cal_ladder;
    double cal_level = 0.05;
    auto* cal = app.add_subcommand("calibrate", "null rejection rates and power ladder on synthetic markets");
    add_run_options(cal, s_cal);
    cal->add_option("--spec", cal_spec, "synthetic market spec (key = value)")->check(CLI::ExistingFile);
    cal->add_option("--reps", cal_reps, "replications")->required();
    cal->add_option("--ladder", cal_ladder, "jump sizes for the power ladder")->delimiter(',');
    cal->add_option("--level", cal_level, "nominal test level")->capture_default_str();
    cal->callback([&] { run = [&] { return cmd_calibrate(s_cal, cal_spec, cal_reps, cal_ladder, cal_level); }; });

    Settings s_synth;
    std::string synth_spec, synth_out;
    auto* syn = app.add_subcommand("synth", "generate a synthetic market as CSV files");
    add_run_options(syn, s_synth);
    syn->add_option("--spec", synth_spec, "synthetic market spec (key = value)")->check(CLI::ExistingFile);
    syn->add_option("--synth-out", synth_out, "directory (default <out-dir>/synth)");
    syn->callback([&] { run = [&] { return cmd_synth(s_synth, synth_spec, synth_out); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }
    try {
        return run();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.is_numerical() ? kNumerical : kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    }
}
