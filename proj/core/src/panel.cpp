#include "amf/panel.hpp"

#include <algorithm>
#include <cmath>

#include "amf/calendar.hpp"
#include "amf/error.hpp"

namespace amf {

Vector compound_mma(const Eigen::Ref<const Vector>& rates) {
    Vector b(rates.size() + 1);
    b(0) = 1.0;
    for (Index k = 0; k < rates.size(); ++k) {
        const double r = rates(k);
        if (!std::isfinite(r) || r <= -1.0) {
            throw Error(ErrorCode::DegenerateRate, "rate at period " + std::to_string(k) + " is " + std::to_string(r));
        }
        b(k + 1) = b(k) * (1.0 + r);
    }
    return b;
}

Vector build_adjusted_prices(double initial_price, const Eigen::Ref<const Vector>& returns) {
    if (!(initial_price > 0.0) || !std::isfinite(initial_price)) {
        throw Error(ErrorCode::InvalidArgument, "initial price must be positive and finite");
    }
    Vector y(returns.size() + 1);
    y(0) = initial_price;
    for (Index k = 0; k < returns.size(); ++k) {
        const double r = returns(k);
        if (!std::isfinite(r)) {
            throw Error(ErrorCode::InvalidArgument, "non-finite return at period " + std::to_string(k));
        }
        if (r <= -1.0) {
            throw Error(ErrorCode::TotalLossUnsupported, "return at period " + std::to_string(k) + " is a total loss");
        }
        y(k + 1) = y(k) * (1.0 + r);
    }
    return y;
}

Vector first_difference(const Eigen::Ref<const Vector>& series) {
    if (series.size() < 2) throw Error(ErrorCode::TooShort, "first difference needs at least two points");
    return series.tail(series.size() - 1) - series.head(series.size() - 1);
}

Matrix difference_columns(const Matrix& levels) {
    if (levels.rows() < 2) return Matrix(0, levels.cols());
    return levels.bottomRows(levels.rows() - 1) - levels.topRows(levels.rows() - 1);
}

// ---------------------------------------------------------------------------

std::string Window::label() const { return std::to_string(start_year) + "-" + std::to_string(end_year); }

Window make_window(int start_year, int end_year) {
    if (end_year < start_year) throw Error(ErrorCode::InvalidArgument, "window end precedes start");
    Window w;
    w.start_year = start_year;
    w.end_year = end_year;
    w.start = make_date(start_year, 1, 1);
    w.end = make_date(end_year, 12, 31);
    const auto span = (w.end - w.start).count();
    w.mid = friday_on_or_before(w.start + std::chrono::days{span / 2});
    w.n = count_fridays(w.start, w.end);
    return w;
}

std::vector<Window> enumerate_windows(int first_year, int last_year, int min_len) {
    if (min_len < 1) throw Error(ErrorCode::InvalidArgument, "minimum window length must be >= 1 year");
    std::vector<Window> out;
    for (int s = first_year; s <= last_year; ++s) {
        for (int e = s + min_len - 1; e <= last_year; ++e) out.push_back(make_window(s, e));
    }
    return out;
}

RowRange window_rows(const std::vector<Date>& dates, const Window& w) {
    auto lo = std::lower_bound(dates.begin(), dates.end(), w.start);
    auto hi = std::upper_bound(dates.begin(), dates.end(), w.end);
    return {static_cast<Index>(lo - dates.begin()), static_cast<Index>(hi - dates.begin())};
}

// ---------------------------------------------------------------------------

namespace {

void check_grid(const std::vector<Date>& dates) {
    for (std::size_t t = 0; t < dates.size(); ++t) {
        if (!is_friday(dates[t])) {
            throw Error(ErrorCode::Validation, "date " + format_date(dates[t]) + " is not on the Friday grid");
        }
        if (t > 0 && (dates[t] - dates[t - 1]).count() != 7) {
            throw Error(ErrorCode::Validation, "dates not on a contiguous weekly grid at " + format_date(dates[t]));
        }
    }
}

bool same_nan_pattern_equal(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Index j = 0; j < a.cols(); ++j) {
        for (Index i = 0; i < a.rows(); ++i) {
            const double x = a(i, j), y = b(i, j);
            if (std::isnan(x) != std::isnan(y)) return false;
            if (!std::isnan(x) && x != y) return false;
        }
    }
    return true;
}

}  // namespace

PricePanel::PricePanel(std::vector<Date> dates, std::vector<std::string> assets, Matrix prices, Matrix returns)
    : dates_(std::move(dates)), assets_(std::move(assets)), prices_(std::move(prices)), returns_(std::move(returns)) {
    const auto T = static_cast<Index>(dates_.size());
    const auto N = static_cast<Index>(assets_.size());
    if (prices_.rows() != T || prices_.cols() != N || returns_.rows() != T || returns_.cols() != N) {
        throw Error(ErrorCode::Validation, "price/return matrix shape does not match dates x assets");
    }
    check_grid(dates_);
    mask_ = prices_.array().isFinite() && returns_.array().isFinite();
    for (Index i = 0; i < N; ++i) {
        for (Index t = 0; t < T; ++t) {
            const double p = prices_(t, i);
            if (std::isfinite(p) && p <= 0.0) {
                throw Error(ErrorCode::Validation,
                            "asset " + assets_[i] + " has non-positive price at " + format_date(dates_[t]));
            }
            if (t == 0 || !mask_(t, i) || !std::isfinite(prices_(t - 1, i))) continue;
            const double expect = prices_(t - 1, i) * (1.0 + returns_(t, i));
            if (std::abs(expect - p) > 1e-10 * std::abs(p)) {
                throw Error(ErrorCode::Validation, "asset " + assets_[i] + " price/return mismatch at " +
                                                       format_date(dates_[t]));
            }
        }
    }
}

bool PricePanel::operator==(const PricePanel& o) const {
    return dates_ == o.dates_ && assets_ == o.assets_ && same_nan_pattern_equal(prices_, o.prices_) &&
           same_nan_pattern_equal(returns_, o.returns_);
}

std::string_view to_string(FactorRole role) {
    switch (role) {
        case FactorRole::Mma: return "mma";
        case FactorRole::Market: return "market";
        case FactorRole::Ff5: return "ff5";
        case FactorRole::Etf: return "etf";
    }
    return "etf";
}

FactorRole parse_factor_role(std::string_view text) {
    if (text == "mma") return FactorRole::Mma;
    if (text == "market") return FactorRole::Market;
    if (text == "ff5") return FactorRole::Ff5;
    if (text == "etf") return FactorRole::Etf;
    throw Error(ErrorCode::Validation, "unknown factor role '" + std::string(text) + "'");
}

FactorPanel::FactorPanel(std::vector<Date> dates, std::vector<FactorInfo> factors, Matrix values,
                         const Taxonomy& taxonomy)
    : dates_(std::move(dates)) {
    const auto T = static_cast<Index>(dates_.size());
    const auto P = static_cast<Index>(factors.size());
    if (values.rows() != T || values.cols() != P) {
        throw Error(ErrorCode::Validation, "factor matrix shape does not match dates x factors");
    }
    check_grid(dates_);

    std::vector<Index> order;
    for (FactorRole want : {FactorRole::Mma, FactorRole::Market}) {
        Index found = -1;
        for (Index j = 0; j < P; ++j) {
            if (factors[j].role != want) continue;
            if (found >= 0) {
                throw Error(ErrorCode::Validation, "more than one factor tagged " + std::string(to_string(want)));
            }
            found = j;
        }
        if (found < 0) throw Error(ErrorCode::Validation, "no factor tagged " + std::string(to_string(want)));
        order.push_back(found);
    }
    for (Index j = 0; j < P; ++j) {
        const auto& f = factors[j];
        if (f.role == FactorRole::Mma || f.role == FactorRole::Market) continue;
        if (f.role == FactorRole::Etf) {
            if (!f.category) throw Error(ErrorCode::Validation, "ETF " + f.id + " has no category");
            if (!taxonomy.contains(f.category->cls, f.category->subclass)) {
                throw Error(ErrorCode::Validation, "ETF " + f.id + " category (" + f.category->cls + ", " +
                                                       f.category->subclass + ") not in taxonomy");
            }
        }
        order.push_back(j);
    }

    values_.resize(T, P);
    factors_.reserve(static_cast<std::size_t>(P));
    for (Index k = 0; k < P; ++k) {
        factors_.push_back(factors[order[k]]);
        values_.col(k) = values.col(order[k]);
    }
    for (Index t = 0; t < T; ++t) {
        const double b = values_(t, kMma);
        if (std::isfinite(b) && b <= 0.0) throw Error(ErrorCode::Validation, "money market value must be positive");
    }
}

std::vector<Index> FactorPanel::indices_with_role(FactorRole role) const {
    std::vector<Index> out;
    for (Index j = 0; j < n_factors(); ++j) {
        if (factors_[j].role == role) out.push_back(j);
    }
    return out;
}

std::optional<Index> FactorPanel::find(const std::string& id) const {
    for (Index j = 0; j < n_factors(); ++j) {
        if (factors_[j].id == id) return j;
    }
    return std::nullopt;
}

bool FactorPanel::operator==(const FactorPanel& o) const {
    return dates_ == o.dates_ && factors_ == o.factors_ && same_nan_pattern_equal(values_, o.values_);
}

void MarketData::check_aligned() const {
    if (prices.dates() != factors.dates()) {
        throw Error(ErrorCode::Validation, "price and factor panels are not on the same weekly grid");
    }
}

std::vector<Index> filter_assets(const PricePanel& panel, const Window& window, double min_coverage) {
    if (!(min_coverage > 0.0 && min_coverage <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "min_coverage must lie in (0, 1]");
    }
    const RowRange rows = window_rows(panel.dates(), window);
    std::vector<Index> kept;
    if (rows.empty()) return kept;
    for (Index i = 0; i < panel.n_assets(); ++i) {
        const auto present = panel.mask().col(i).segment(rows.begin, rows.size()).count();
        if (static_cast<double>(present) >= min_coverage * static_cast<double>(rows.size()) - 1e-9) kept.push_back(i);
    }
    return kept;
}

Vector asset_differences(const PricePanel& panel, Index asset, RowRange range) {
    const Index m = std::max<Index>(range.size() - 1, 0);
    Vector dy(m);
    const auto& p = panel.prices();
    for (Index t = 0; t < m; ++t) {
        const Index r = range.begin + t;
        const bool ok = std::isfinite(p(r, asset)) && panel.mask()(r + 1, asset);
        dy(t) = ok ? p(r + 1, asset) - p(r, asset) : kNaN;
    }
    return dy;
}

}  // namespace amf
