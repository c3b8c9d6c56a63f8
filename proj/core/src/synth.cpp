#include "amf/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <set>

#include "amf/calendar.hpp"
#include "amf/error.hpp"
#include "amf/panel_io.hpp"

namespace amf {

double GroundTruth::beta_at(Index stock, Index factor, Index week) const {
    const double base = betas(stock, factor);
    if (factor == FactorPanel::kMma || base == 0.0 || dynamics.empty()) return base;
    const auto& d = dynamics[static_cast<std::size_t>(stock)];
    switch (d.kind) {
        case DynamicsKind::Jump:
            return week >= d.at ? base + d.size : base;
        case DynamicsKind::Drift:
            return base + d.slope * static_cast<double>(week) / 52.0;
        case DynamicsKind::Constant:
            break;
    }
    return base;
}

namespace {

const char* kFf5Ids[] = {"SMB", "HML", "RMW", "CMA"};

std::vector<FactorInfo> synth_factors(const SynthSpec& spec) {
    const auto& tax = Taxonomy::builtin();
    std::vector<FactorInfo> out{{"MMA", FactorRole::Mma, std::nullopt}, {"MKT", FactorRole::Market, std::nullopt}};
    if (spec.with_ff5) {
        for (const char* id : kFf5Ids) out.push_back({id, FactorRole::Ff5, std::nullopt});
    }
    const auto classes = static_cast<Index>(tax.classes().size());
    const Index used = std::clamp<Index>(spec.n_classes, 1, classes);
    for (Index k = 0; k < spec.n_etfs; ++k) {
        const auto& cls = tax.classes()[static_cast<std::size_t>(k % used)];
        std::string sub;
        for (const auto& [s, c] : tax.subclasses()) {
            if (c == cls) {
                sub = s;
                break;
            }
        }
        char id[32];
        std::snprintf(id, sizeof id, "ETF%03ld", static_cast<long>(k + 1));
        out.push_back({id, FactorRole::Etf, Category{cls, sub}});
    }
    return out;
}

Matrix default_covariance(const SynthSpec& spec, const std::vector<FactorInfo>& factors) {
    const auto d = static_cast<Index>(factors.size()) - 1;
    Matrix cov = Matrix::Zero(d, d);
    const double var = spec.factor_sd * spec.factor_sd;
    for (Index a = 0; a < d; ++a) {
        for (Index b = 0; b < d; ++b) {
            const auto& fa = factors[a + 1];
            const auto& fb = factors[b + 1];
            if (a == b) {
                cov(a, b) = var;
            } else if (fa.role == FactorRole::Etf && fb.role == FactorRole::Etf && fa.category->cls == fb.category->cls) {
                cov(a, b) = spec.block_corr * var;
            }
        }
    }
    return cov;
}

Matrix read_numeric_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Validation, "cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> r;
        for (const auto& f : split_csv_line(line)) r.push_back(parse_double(path, f));
        if (!rows.empty() && r.size() != rows[0].size()) throw Error(ErrorCode::Validation, path + ": ragged rows");
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw Error(ErrorCode::Validation, path + ": empty matrix");
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error(ErrorCode::Validation, key + ": expected true or false, got '" + v + "'");
}

Index week_of(const SynthSpec& spec, Date d) {
    if (d <= spec.start) return 0;
    return static_cast<Index>((week_slot(d) - spec.start).count() / 7);
}

}  // namespace

SynthMarket generate(const SynthSpec& spec) {
    if (spec.n_weeks < 2 || spec.n_stocks < 1 || spec.n_etfs < 0) {
        throw Error(ErrorCode::InvalidArgument, "synthetic market needs n_weeks >= 2 and n_stocks >= 1");
    }
    if (!is_friday(spec.start)) throw Error(ErrorCode::InvalidArgument, "start date must be a Friday");
    if (!(spec.noise_sd >= 0.0) || !(spec.factor_sd > 0.0) || !(spec.rf > -1.0)) {
        throw Error(ErrorCode::InvalidArgument, "noise_sd >= 0, factor_sd > 0 and rf > -1 required");
    }
    const auto factors = synth_factors(spec);
    const auto P = static_cast<Index>(factors.size());
    const Index T = spec.n_weeks;
    const Index N = spec.n_stocks;

    const Matrix cov = spec.factor_cov.size() ? spec.factor_cov : default_covariance(spec, factors);
    if (cov.rows() != P - 1 || cov.cols() != P - 1) {
        throw Error(ErrorCode::InvalidCovariance, "covariance must be " + std::to_string(P - 1) + " square");
    }
    if (!cov.allFinite() || !cov.isApprox(cov.transpose(), 1e-12)) {
        throw Error(ErrorCode::InvalidCovariance, "covariance is not symmetric");
    }
    const Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::InvalidCovariance, "covariance is not positive-definite");
    const Matrix chol = llt.matrixL();

    std::vector<Index> inception = spec.inception_week;
    if (inception.empty()) inception.assign(static_cast<std::size_t>(P), 0);
    if (static_cast<Index>(inception.size()) != P) throw Error(ErrorCode::InvalidArgument, "one inception week per factor");
    if (inception[0] != 0 || inception[1] != 0) {
        throw Error(ErrorCode::InvalidArgument, "mma and market must be available from week 0");
    }

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(spec.beta_min, spec.beta_max);

    GroundTruth truth;
    truth.inception_week = inception;
    truth.alpha = spec.alpha.size() ? spec.alpha : Vector::Zero(N);
    if (truth.alpha.size() != N) throw Error(ErrorCode::InvalidArgument, "one alpha per stock");
    truth.dynamics = spec.dynamics;
    if (truth.dynamics.empty()) truth.dynamics.resize(static_cast<std::size_t>(N));
    if (static_cast<Index>(truth.dynamics.size()) != N) {
        throw Error(ErrorCode::InvalidArgument, "one dynamics entry per stock");
    }
    for (const auto& d : truth.dynamics) {
        if (!std::isfinite(d.size) || !std::isfinite(d.slope)) {
            throw Error(ErrorCode::InvalidArgument, "jump and drift parameters must be finite");
        }
    }

    if (spec.true_betas.size()) {
        if (spec.true_betas.rows() != N || spec.true_betas.cols() != P) {
            throw Error(ErrorCode::InvalidArgument, "true_betas must be n_stocks x n_factors");
        }
        truth.betas = spec.true_betas;
    } else {
        std::vector<Index> pool;
        for (Index j = 2; j < P; ++j) {
            const auto role = factors[j].role;
            if (spec.load_pool == LoadPool::All || (spec.load_pool == LoadPool::Etf && role == FactorRole::Etf) ||
                (spec.load_pool == LoadPool::Ff5 && role == FactorRole::Ff5)) {
                pool.push_back(j);
            }
        }
        if (static_cast<Index>(pool.size()) < spec.active_factors) {
            throw Error(ErrorCode::InvalidArgument, "not enough factors to draw the requested loadings from");
        }
        truth.betas = Matrix::Zero(N, P);
        for (Index i = 0; i < N; ++i) {
            if (spec.load_market) truth.betas(i, FactorPanel::kMarket) = uniform(rng);
            auto candidates = pool;
            for (Index k = 0; k < spec.active_factors; ++k) {
                std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
                const auto at = pick(rng);
                truth.betas(i, candidates[at]) = uniform(rng);
                candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(at));
            }
        }
    }
    if (spec.late_loaders > 0) {
        Index late = -1;
        for (Index j = 2; j < P && late < 0; ++j) {
            if (inception[j] > 0) late = j;
        }
        if (late < 0) throw Error(ErrorCode::InvalidArgument, "late_loaders needs a factor with a late inception");
        for (Index i = 0; i < std::min(spec.late_loaders, N); ++i) truth.betas(i, late) = uniform(rng);
    }
    truth.support.resize(static_cast<std::size_t>(N));
    for (Index i = 0; i < N; ++i) {
        for (Index j = 0; j < P; ++j) {
            if (truth.betas(i, j) != 0.0) truth.support[i].push_back(j);
        }
    }

    // Factor levels: mma compounds rf, the rest integrate correlated draws.
    Matrix levels(T, P);
    Matrix dv = Matrix::Zero(T, P);  // row t holds V(t) - V(t-1)
    levels(0, 0) = 1.0;
    for (Index t = 1; t < T; ++t) levels(t, 0) = levels(t - 1, 0) * (1.0 + spec.rf);
    levels.row(0).tail(P - 1).setConstant(spec.level0);
    Vector z(P - 1);
    for (Index t = 1; t < T; ++t) {
        for (Index k = 0; k < P - 1; ++k) z(k) = normal(rng);
        const Vector step = chol * z;
        levels.row(t).tail(P - 1) = levels.row(t - 1).tail(P - 1) + step.transpose();
    }
    for (Index t = 1; t < T; ++t) dv.row(t) = levels.row(t) - levels.row(t - 1);

    Matrix y(T, N);
    for (Index i = 0; i < N; ++i) {
        double eps_prev = 0.0;
        for (Index t = 0; t < T; ++t) {
            const double eps = spec.noise_sd > 0.0 ? spec.noise_sd * normal(rng) : 0.0;
            if (t == 0) {
                double v = truth.alpha(i) + eps;
                for (Index j = 0; j < P; ++j) {
                    if (inception[j] == 0) v += truth.beta_at(i, j, 0) * levels(0, j);
                }
                y(0, i) = v;
            } else {
                double d = spec.noise == NoiseModel::Level ? eps - eps_prev : eps;
                for (Index j = 0; j < P; ++j) {
                    if (t > inception[j]) d += truth.beta_at(i, j, t) * dv(t, j);
                }
                y(t, i) = y(t - 1, i) + d;
            }
            eps_prev = eps;
        }
    }

    const auto dates = weekly_grid(spec.start, static_cast<std::size_t>(T));
    Matrix returns(T, N), prices(T, N);
    for (Index i = 0; i < N; ++i) {
        if ((y.col(i).array() <= 0.0).any()) {
            throw Error(ErrorCode::Validation, "stock " + std::to_string(i) +
                                                   " reaches a non-positive price; raise level0 or lower noise_sd");
        }
        returns(0, i) = kNaN;
        for (Index t = 1; t < T; ++t) returns(t, i) = y(t, i) / y(t - 1, i) - 1.0;
        prices.col(i) = build_adjusted_prices(y(0, i), returns.col(i).tail(T - 1));
    }
    for (Index j = 0; j < P; ++j) {
        for (Index t = 0; t < inception[j] && t < T; ++t) levels(t, j) = kNaN;
    }

    std::vector<std::string> assets;
    for (Index i = 0; i < N; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "STK%04ld", static_cast<long>(i + 1));
        assets.emplace_back(id);
    }
    SynthMarket out{MarketData{PricePanel(dates, assets, prices, returns), FactorPanel(dates, factors, levels)},
                    std::move(truth)};
    return out;
}

SynthSpec parse_synth_spec(const KeyValues& values) {
    SynthSpec s;
    double jump_fraction = 0.0, jump_size = 1.0, drift_fraction = 0.0, drift_slope = 0.0;
    double alpha = 0.0, alpha_fraction = 1.0, late_load_fraction = 0.0;
    Index jump_week = -1, late_factors = 0, late_week = -1;
    std::string jump_date;
    for (const auto& [k, v] : values) {
        auto integer = [&, &k = k, &v = v] { return static_cast<Index>(parse_integer(k, v)); };
        auto real = [&, &k = k, &v = v] { return parse_double(k, v); };
        if (k == "n_weeks") s.n_weeks = integer();
        else if (k == "n_stocks") s.n_stocks = integer();
        else if (k == "n_etfs") s.n_etfs = integer();
        else if (k == "ff5") s.with_ff5 = parse_bool(k, v);
        else if (k == "n_classes") s.n_classes = integer();
        else if (k == "factor_sd") s.factor_sd = real();
        else if (k == "block_corr") s.block_corr = real();
        else if (k == "factor_cov") s.factor_cov = read_numeric_csv(v);
        else if (k == "betas") s.true_betas = read_numeric_csv(v);
        else if (k == "active_factors") s.active_factors = integer();
        else if (k == "load_market") s.load_market = parse_bool(k, v);
        else if (k == "load_pool") {
            if (v == "all") s.load_pool = LoadPool::All;
            else if (v == "etf") s.load_pool = LoadPool::Etf;
            else if (v == "ff5") s.load_pool = LoadPool::Ff5;
            else throw Error(ErrorCode::Validation, "load_pool must be all, etf or ff5");
        }
        else if (k == "beta_min") s.beta_min = real();
        else if (k == "beta_max") s.beta_max = real();
        else if (k == "noise_sd") s.noise_sd = real();
        else if (k == "noise") {
            if (v == "level") s.noise = NoiseModel::Level;
            else if (v == "difference") s.noise = NoiseModel::Difference;
            else throw Error(ErrorCode::Validation, "noise must be level or difference");
        }
        else if (k == "rf") s.rf = real();
        else if (k == "level0") s.level0 = real();
        else if (k == "start") s.start = parse_date(v);
        else if (k == "seed") s.seed = parse_seed(k, v);
        else if (k == "alpha") alpha = real();
        else if (k == "alpha_fraction") alpha_fraction = real();
        else if (k == "jump_fraction") jump_fraction = real();
        else if (k == "jump_size") jump_size = real();
        else if (k == "jump_week") jump_week = integer();
        else if (k == "jump_date") jump_date = v;
        else if (k == "drift_fraction") drift_fraction = real();
        else if (k == "drift_slope") drift_slope = real();
        else if (k == "late_factors") late_factors = integer();
        else if (k == "late_week") late_week = integer();
        else if (k == "late_load_fraction") late_load_fraction = real();
        else throw Error(ErrorCode::Validation, "unknown synthetic setting '" + k + "'");
    }
    for (double f : {jump_fraction, drift_fraction, alpha_fraction, late_load_fraction}) {
        if (f < 0.0 || f > 1.0) throw Error(ErrorCode::Validation, "fractions must lie in [0, 1]");
    }
    auto count = [&](double f) { return static_cast<Index>(std::llround(f * static_cast<double>(s.n_stocks))); };
    if (!jump_date.empty()) jump_week = week_of(s, parse_date(jump_date));
    if (jump_week < 0) jump_week = s.n_weeks / 2;

    if (jump_fraction > 0.0 || drift_fraction > 0.0) {
        s.dynamics.assign(static_cast<std::size_t>(s.n_stocks), BetaDynamics{});
        const Index jumps = count(jump_fraction);
        const Index drifts = std::min(count(drift_fraction), s.n_stocks - jumps);
        for (Index i = 0; i < jumps; ++i) s.dynamics[i] = {DynamicsKind::Jump, jump_size, jump_week, 0.0};
        for (Index i = jumps; i < jumps + drifts; ++i) s.dynamics[i] = {DynamicsKind::Drift, 0.0, 0, drift_slope};
    }
    if (alpha != 0.0) {
        s.alpha = Vector::Zero(s.n_stocks);
        s.alpha.head(count(alpha_fraction)).setConstant(alpha);
    }
    if (late_factors > 0) {
        if (late_factors > s.n_etfs) throw Error(ErrorCode::Validation, "late_factors exceeds n_etfs");
        if (late_week < 0) late_week = s.n_weeks / 2;
        s.inception_week.assign(static_cast<std::size_t>(s.n_factors()), 0);
        for (Index k = 0; k < late_factors; ++k) s.inception_week[s.n_factors() - 1 - k] = late_week;
        s.late_loaders = count(late_load_fraction);
    }
    return s;
}

SynthSpec load_synth_spec(const std::string& path) { return parse_synth_spec(read_key_value_file(path)); }

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t rep) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (rep + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RateEstimate wilson_estimate(std::string test, Index rejections, Index trials, double z) {
    RateEstimate r;
    r.test = std::move(test);
    r.rejections = rejections;
    r.trials = trials;
    if (trials == 0) return r;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(rejections) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    r.rate = p;
    r.lo = std::max(0.0, centre - half);
    r.hi = std::min(1.0, centre + half);
    return r;
}

namespace {

struct Tally {
    Index rejections = 0, trials = 0, failures = 0;
};

enum BatteryTest { kIntercept, kLinear, kSpline, kResidual, kAnova, kBatteryTests };
const char* kBatteryNames[] = {"intercept", "linear", "spline", "residual", "anova"};

WindowData whole_panel(const MarketData& data) {
    WindowData wd;
    wd.rows = {0, data.prices.n_dates()};
    wd.v_levels = data.factors.values();
    wd.dv = difference_columns(wd.v_levels);
    for (Index i = 0; i < data.prices.n_assets(); ++i) wd.assets.push_back(i);
    return wd;
}

template <class F>
void tally(Tally& t, double level, F&& f) {
    try {
        const std::optional<double> p = f();
        ++t.trials;
        if (p && *p < level) ++t.rejections;
    } catch (const std::exception&) {
        ++t.failures;
    }
}

double anova_null_p(const Vector& dy, const Matrix& dv, const GroundTruth& truth, Index stock) {
    const auto& s = truth.support[static_cast<std::size_t>(stock)];
    if (s.empty()) throw Error(ErrorCode::InvalidArgument, "stock has no loadings");
    Index extra = -1;
    for (Index j = 1; j < dv.cols() && extra < 0; ++j) {
        if (truth.betas(stock, j) == 0.0 && dv.col(j).tail(dv.rows() - 1).allFinite()) extra = j;
    }
    if (extra < 0) throw Error(ErrorCode::MissingFactor, "no unloaded factor to test");
    std::vector<Index> rows;
    for (Index t = 0; t < dy.size(); ++t) {
        bool ok = std::isfinite(dy(t)) && std::isfinite(dv(t, extra));
        for (Index j : s) ok = ok && std::isfinite(dv(t, j));
        if (ok) rows.push_back(t);
    }
    const auto n = static_cast<Index>(rows.size());
    const auto k = static_cast<Index>(s.size());
    Matrix full(n, k + 1);
    Vector y(n);
    for (Index r = 0; r < n; ++r) {
        y(r) = dy(rows[r]);
        for (Index c = 0; c < k; ++c) full(r, c) = dv(rows[r], s[c]);
        full(r, k) = dv(rows[r], extra);
    }
    const auto big = ols_fit(full, y);
    const auto small = ols_fit(full.leftCols(k), y);
    return nested_anova(big.rss, k + 1, small.rss, k, n).p_value;
}

}  // namespace

CalibrationReport null_battery(const SynthSpec& spec, Index reps, const SweepConfig& cfg, double level) {
    if (reps < 1) throw Error(ErrorCode::InvalidArgument, "reps must be >= 1");
    for (const auto& d : spec.dynamics) {
        if (d.kind != DynamicsKind::Constant) throw Error(ErrorCode::InvalidArgument, "null battery needs constant betas");
    }
    if (spec.alpha.size() && spec.alpha.cwiseAbs().maxCoeff() != 0.0) {
        throw Error(ErrorCode::InvalidArgument, "null battery needs zero alpha");
    }
    std::vector<std::array<Tally, kBatteryTests>> per_rep(static_cast<std::size_t>(reps));
    const auto& tax = Taxonomy::builtin();
    parallel_for(reps, cfg.workers, [&](Index rep) {
        auto& out = per_rep[static_cast<std::size_t>(rep)];
        SynthSpec s = spec;
        s.seed = replication_seed(spec.seed, static_cast<std::uint64_t>(rep));
        std::optional<SynthMarket> market;
        try {
            market = generate(s);
        } catch (const std::exception&) {
            for (auto& t : out) ++t.failures;
            return;
        }
        const auto& data = market->data;
        const auto wd = whole_panel(data);
        std::optional<GibsContext> ctx;
        try {
            ctx = prepare_gibs(wd.dv, data.factors.factors(), tax, cfg.gibs);
        } catch (const std::exception&) {
            for (auto& t : out) t.failures += data.prices.n_assets();
            return;
        }
        for (Index i = 0; i < data.prices.n_assets(); ++i) {
            const Vector dy = asset_differences(data.prices, i, wd.rows);
            tally(out[kAnova], level, [&] { return std::optional<double>(anova_null_p(dy, wd.dv, market->truth, i)); });
            std::vector<Index> sel;
            try {
                sel = run_gibs(*ctx, dy, cfg.gibs).selected_set;
            } catch (const std::exception&) {
            }
            if (sel.empty()) {
                for (int k : {kIntercept, kLinear, kSpline, kResidual}) ++out[k].failures;
                continue;
            }
            const auto h = HalfIndicator::split(dy.size());
            tally(out[kIntercept], level, [&] {
                return std::optional<double>(intercept_test(data.prices.prices().col(i), wd.v_levels, sel));
            });
            tally(out[kLinear], level,
                  [&] { return std::optional<double>(linear_invariance_test(dy, wd.dv, sel, h).p_value); });
            tally(out[kSpline], level, [&] {
                return std::optional<double>(spline_invariance_test(dy, wd.dv, sel, cfg.basis_size));
            });
            tally(out[kResidual], level, [&] {
                return residual_analysis(dy, wd.dv, sel, h, data.factors.factors(), tax, cfg.gibs).p_value;
            });
        }
    });
    CalibrationReport report;
    report.reps = reps;
    report.level = level;
    for (int k = 0; k < kBatteryTests; ++k) {
        Tally sum;
        for (const auto& r : per_rep) {
            sum.rejections += r[k].rejections;
            sum.trials += r[k].trials;
            sum.failures += r[k].failures;
        }
        auto est = wilson_estimate(kBatteryNames[k], sum.rejections, sum.trials);
        est.failures = sum.failures;
        report.rates.push_back(est);
    }
    return report;
}

std::vector<RateEstimate> power_ladder(const SynthSpec& spec, const std::vector<double>& jump_sizes, Index reps,
                                       const SweepConfig& cfg, double level) {
    if (reps < 1) throw Error(ErrorCode::InvalidArgument, "reps must be >= 1");
    std::vector<RateEstimate> out;
    const auto& tax = Taxonomy::builtin();
    for (double size : jump_sizes) {
        std::vector<Tally> per_rep(static_cast<std::size_t>(reps));
        parallel_for(reps, cfg.workers, [&](Index rep) {
            auto& t = per_rep[static_cast<std::size_t>(rep)];
            SynthSpec s = spec;
            s.seed = replication_seed(spec.seed, static_cast<std::uint64_t>(rep));
            s.dynamics.assign(static_cast<std::size_t>(s.n_stocks),
                              BetaDynamics{DynamicsKind::Jump, size, s.n_weeks / 2, 0.0});
            try {
                const auto market = generate(s);
                const auto wd = whole_panel(market.data);
                const auto ctx = prepare_gibs(wd.dv, market.data.factors.factors(), tax, cfg.gibs);
                for (Index i = 0; i < market.data.prices.n_assets(); ++i) {
                    const Vector dy = asset_differences(market.data.prices, i, wd.rows);
                    tally(t, level, [&] {
                        const auto sel = run_gibs(ctx, dy, cfg.gibs).selected_set;
                        return std::optional<double>(
                            linear_invariance_test(dy, wd.dv, sel, HalfIndicator::split(dy.size())).p_value);
                    });
                }
            } catch (const std::exception&) {
                t.failures += s.n_stocks;
            }
        });
        Tally sum;
        for (const auto& r : per_rep) {
            sum.rejections += r.rejections;
            sum.trials += r.trials;
            sum.failures += r.failures;
        }
        char name[48];
        std::snprintf(name, sizeof name, "linear@jump=%g", size);
        auto est = wilson_estimate(name, sum.rejections, sum.trials);
        est.failures = sum.failures;
        out.push_back(est);
    }
    return out;
}

}  // namespace amf
