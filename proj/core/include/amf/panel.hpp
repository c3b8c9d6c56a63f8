#pragma once

#include <optional>
#include <string>
#include <vector>

#include "amf/taxonomy.hpp"
#include "amf/types.hpp"

namespace amf {

// ---------------------------------------------------------------------------
// Series construction
// ---------------------------------------------------------------------------

/// Money market account value from per-period risk-free rates:
/// B(0) = 1, B(t) = prod_{k<t} (1 + r(k)). Output has rates.size() + 1 entries.
/// Throws DegenerateRate when a rate is <= -1 or non-finite.
Vector compound_mma(const Eigen::Ref<const Vector>& rates);

/// Return-compounded (dividend and split adjusted) price path:
/// Y(0) = A(0), Y(t) = A(0) * prod_{k<t} (1 + R(k)).
/// A return <= -1 is a total loss and throws TotalLossUnsupported.
Vector build_adjusted_prices(double initial_price, const Eigen::Ref<const Vector>& returns);

/// Y(t+1) - Y(t). Throws TooShort for fewer than two points.
Vector first_difference(const Eigen::Ref<const Vector>& series);

/// Column-wise first difference of a level matrix; NaN propagates.
Matrix difference_columns(const Matrix& levels);

// ---------------------------------------------------------------------------
// Windows
// ---------------------------------------------------------------------------

/// A calendar-year estimation period [Jan 1 of start_year, Dec 31 of end_year].
struct Window {
    int start_year = 0;
    int end_year = 0;
    Date start;
    Date end;
    Date mid;           // midpoint rounded down to the Friday grid
    std::size_t n = 0;  // Fridays inside [start, end]

    int years() const noexcept { return end_year - start_year + 1; }
    std::string label() const;
    bool operator==(const Window&) const = default;
};

Window make_window(int start_year, int end_year);

/// Every [start, end] year pair inside [first_year, last_year] spanning at
/// least min_len years, ordered by (start, end). Empty when nothing fits.
std::vector<Window> enumerate_windows(int first_year, int last_year, int min_len);

/// Rows of a date axis that fall inside the window.
RowRange window_rows(const std::vector<Date>& dates, const Window& w);

// ---------------------------------------------------------------------------
// Panels
// ---------------------------------------------------------------------------

/// Weekly adjusted prices and returns. Row t of `returns` is the return over
/// the week ending at dates[t], so prices(t) = prices(t-1) * (1 + returns(t)).
/// Missing cells are NaN; mask(t, i) is true iff both are finite.
class PricePanel {
public:
    PricePanel() = default;
    /// Validates the grid and the price/return consistency; throws Error(Validation).
    PricePanel(std::vector<Date> dates, std::vector<std::string> assets, Matrix prices, Matrix returns);

    const std::vector<Date>& dates() const noexcept { return dates_; }
    const std::vector<std::string>& assets() const noexcept { return assets_; }
    const Matrix& prices() const noexcept { return prices_; }
    const Matrix& returns() const noexcept { return returns_; }
    const Mask& mask() const noexcept { return mask_; }
    Index n_dates() const noexcept { return static_cast<Index>(dates_.size()); }
    Index n_assets() const noexcept { return static_cast<Index>(assets_.size()); }

    bool operator==(const PricePanel& other) const;

private:
    std::vector<Date> dates_;
    std::vector<std::string> assets_;
    Matrix prices_;
    Matrix returns_;
    Mask mask_;
};

enum class FactorRole { Mma, Market, Ff5, Etf };

std::string_view to_string(FactorRole role);
FactorRole parse_factor_role(std::string_view text);

struct Category {
    std::string cls;
    std::string subclass;
    bool operator==(const Category&) const = default;
};

struct FactorInfo {
    std::string id;
    FactorRole role = FactorRole::Etf;
    std::optional<Category> category;  // ETFs only
    bool operator==(const FactorInfo&) const = default;
};

/// Basis-asset levels V_j(t). Columns are reordered on construction so that
/// the money market account is column 0 and the market is column 1.
class FactorPanel {
public:
    static constexpr Index kMma = 0;
    static constexpr Index kMarket = 1;

    FactorPanel() = default;
    /// Throws Error(Validation) unless there is exactly one mma and one market
    /// factor and every ETF carries a category present in the taxonomy.
    FactorPanel(std::vector<Date> dates, std::vector<FactorInfo> factors, Matrix values,
                const Taxonomy& taxonomy = Taxonomy::builtin());

    const std::vector<Date>& dates() const noexcept { return dates_; }
    const std::vector<FactorInfo>& factors() const noexcept { return factors_; }
    const FactorInfo& factor(Index j) const { return factors_.at(static_cast<std::size_t>(j)); }
    const Matrix& values() const noexcept { return values_; }
    Index n_dates() const noexcept { return static_cast<Index>(dates_.size()); }
    Index n_factors() const noexcept { return static_cast<Index>(factors_.size()); }

    std::vector<Index> indices_with_role(FactorRole role) const;
    std::optional<Index> find(const std::string& id) const;

    bool operator==(const FactorPanel& other) const;

private:
    std::vector<Date> dates_;
    std::vector<FactorInfo> factors_;
    Matrix values_;
};

/// Prices and factors on one shared Friday grid.
struct MarketData {
    PricePanel prices;
    FactorPanel factors;

    /// Throws Error(Validation) when the date axes differ.
    void check_aligned() const;
};

/// Indices of assets whose mask is true on at least min_coverage of the
/// window's weeks (default 2/3).
std::vector<Index> filter_assets(const PricePanel& panel, const Window& window,
                                 double min_coverage = 2.0 / 3.0);

/// Price differences for one asset over rows [range.begin, range.end):
/// element t is Y(t+1) - Y(t), NaN unless both prices are present and the
/// later cell is unmasked.
Vector asset_differences(const PricePanel& panel, Index asset, RowRange range);

}  // namespace amf
