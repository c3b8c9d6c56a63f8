#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amf/config.hpp"
#include "amf/panel.hpp"
#include "amf/sweep.hpp"

namespace amf {

enum class DynamicsKind { Constant, Jump, Drift };

/// Time path of a stock's betas on every loaded factor except the mma:
/// jump adds `size` from week `at` on, drift adds `slope` per 52 weeks.
struct BetaDynamics {
    DynamicsKind kind = DynamicsKind::Constant;
    double size = 0.0;
    Index at = 0;
    double slope = 0.0;
};

/// Level noise is i.i.d. in Y(t); difference noise is i.i.d. in dY(t).
enum class NoiseModel { Level, Difference };

/// Which factors random loadings are drawn from.
enum class LoadPool { All, Etf, Ff5 };

/// Synthetic market. Factor columns are mma, market, the four ff5 factors
/// (when with_ff5), then n_etfs ETFs spread over the first n_classes
/// taxonomy classes. Empty optional members fall back to generated defaults.
struct SynthSpec {
    Index n_weeks = 626;
    Index n_stocks = 20;
    Index n_etfs = 20;
    bool with_ff5 = true;
    Index n_classes = 5;
    double factor_sd = 1.0;
    double block_corr = 0.8;  // correlation of ETF differences within a class
    Matrix factor_cov;        // overrides the default over all columns but the mma

    Matrix true_betas;        // n_stocks x n_factors; overrides the random loadings
    Index active_factors = 2; // random loadings per stock besides the market
    bool load_market = true;
    LoadPool load_pool = LoadPool::All;
    double beta_min = 0.5;
    double beta_max = 1.5;

    std::vector<BetaDynamics> dynamics;  // per stock; empty means constant
    Vector alpha;                        // per stock; empty means zero
    double noise_sd = 1.0;
    NoiseModel noise = NoiseModel::Level;
    std::vector<Index> inception_week;   // per factor; empty means 0
    Index late_loaders = 0;  // leading stocks that also load on the first late factor

    double rf = 0.0005;       // weekly rate of the mma
    double level0 = 100.0;    // starting level of every non-mma factor
    Date start = Date{std::chrono::year{2007} / 1 / 5};
    std::uint64_t seed = 1;

    Index n_factors() const noexcept { return 2 + (with_ff5 ? 4 : 0) + n_etfs; }
};

struct GroundTruth {
    Matrix betas;                         // base betas, n_stocks x n_factors
    std::vector<BetaDynamics> dynamics;
    Vector alpha;
    std::vector<Index> inception_week;
    std::vector<std::vector<Index>> support;  // loaded factors per stock

    double beta_at(Index stock, Index factor, Index week) const;
};

struct SynthMarket {
    MarketData data;
    GroundTruth truth;
};

/// Pure function of the spec. Throws InvalidCovariance unless the factor
/// covariance is symmetric positive-definite, InvalidArgument for malformed
/// specs and Validation if a generated price is not positive.
SynthMarket generate(const SynthSpec& spec);

/// Builds a spec from key = value settings. Keys: n_weeks, n_stocks, n_etfs,
/// ff5, n_classes, factor_sd, block_corr, factor_cov (CSV path), betas (CSV
/// path), active_factors, load_market, load_pool, beta_min, beta_max,
/// noise_sd, noise, rf, level0, start, seed, alpha, alpha_fraction,
/// jump_fraction, jump_size, jump_week, jump_date, drift_fraction,
/// drift_slope, late_factors, late_week, late_load_fraction.
/// Stock-level fractions apply to the lowest-numbered stocks.
SynthSpec parse_synth_spec(const KeyValues& values);
SynthSpec load_synth_spec(const std::string& path);

/// Derived seed for replication `rep`.
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t rep);

struct RateEstimate {
    std::string test;
    Index rejections = 0;
    Index trials = 0;
    Index failures = 0;
    double rate = kNaN;
    double lo = kNaN;  // 95% Wilson interval
    double hi = kNaN;
};

RateEstimate wilson_estimate(std::string test, Index rejections, Index trials, double z = 1.959963984540054);

struct CalibrationReport {
    Index reps = 0;
    double level = 0.05;
    std::vector<RateEstimate> rates;
};

/// Rejection rates at `level` over reps markets drawn from `spec` (constant
/// betas, zero alpha) with replication seeds. Each market is one window
/// spanning all weeks; every stock is one trial. Tests: intercept, linear,
/// spline and residual on the selected set, and a nested F-test adding one
/// unloaded factor to the true support ("anova").
CalibrationReport null_battery(const SynthSpec& spec, Index reps, const SweepConfig& config, double level = 0.05);

/// Linear-test power among jumping stocks for each jump size; the jump is at
/// the midpoint of the panel for every stock.
std::vector<RateEstimate> power_ladder(const SynthSpec& spec, const std::vector<double>& jump_sizes, Index reps,
                                       const SweepConfig& config, double level = 0.05);

}  // namespace amf
