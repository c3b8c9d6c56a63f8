#include "amf/panel_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "amf/calendar.hpp"
#include "amf/error.hpp"

namespace amf {

namespace {

struct PriceObs {
    double price = kNaN;
    double ret = kNaN;
};

struct RawPrices {
    std::vector<std::string> ids;  // first-appearance order
    std::map<std::string, std::map<Date, PriceObs>> obs;
};

struct RawFactors {
    std::vector<FactorInfo> infos;
    std::map<std::string, std::map<Date, double>> obs;
};

[[noreturn]] void row_error(const std::string& path, std::size_t row, const std::string& what) {
    throw Error(ErrorCode::Validation, path + " row " + std::to_string(row) + ": " + what);
}

double parse_number(const std::string& s, const std::string& path, std::size_t row) {
    if (s.empty() || s == "NA" || s == "NaN" || s == "nan") return kNaN;
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) row_error(path, row, "malformed number '" + s + "'");
    return v;
}

std::map<std::string, std::size_t> header_index(const std::string& line, const std::vector<std::string>& required,
                                                const std::string& path) {
    auto cols = split_csv_line(line);
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < cols.size(); ++i) idx[cols[i]] = i;
    for (const auto& r : required) {
        if (!idx.count(r)) row_error(path, 1, "missing column '" + r + "'");
    }
    return idx;
}

std::string field(const std::vector<std::string>& f, std::size_t i) { return i < f.size() ? f[i] : std::string{}; }

RawPrices parse_prices(const std::string& path, IngestLog* log) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Validation, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) row_error(path, 1, "empty file");
    auto h = header_index(line, {"date", "id", "price", "return"}, path);
    RawPrices raw;
    std::map<std::string, Date> last_date;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        const Date d = [&] {
            try {
                return parse_date(field(f, h["date"]));
            } catch (const Error& e) {
                row_error(path, row, e.what());
            }
        }();
        const std::string id = field(f, h["id"]);
        if (id.empty()) row_error(path, row, "empty id");
        auto ld = last_date.find(id);
        if (ld != last_date.end() && d <= ld->second) row_error(path, row, "non-monotone date for " + id);
        if (ld == last_date.end()) raw.ids.push_back(id);
        last_date[id] = d;
        PriceObs o{parse_number(field(f, h["price"]), path, row), parse_number(field(f, h["return"]), path, row)};
        if (std::isfinite(o.ret) && o.ret <= -1.0) {
            throw Error(ErrorCode::TotalLossUnsupported, path + " row " + std::to_string(row) + ": return <= -1 for " + id);
        }
        if (std::isfinite(o.price) && o.price <= 0.0) row_error(path, row, "non-positive price for " + id);
        auto& slot = raw.obs[id];
        auto [it, inserted] = slot.insert_or_assign(week_slot(d), o);
        if (!inserted && log) log->warnings.push_back(path + " row " + std::to_string(row) + ": later observation replaces earlier one in week of " + format_date(it->first));
    }
    return raw;
}

RawFactors parse_factors(const std::string& path, IngestLog* log) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Validation, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) row_error(path, 1, "empty file");
    auto h = header_index(line, {"date", "id", "value", "role"}, path);
    const bool has_cls = h.count("class") && h.count("subclass");
    RawFactors raw;
    std::map<std::string, Date> last_date;
    std::map<std::string, std::size_t> info_pos;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        Date d;
        try {
            d = parse_date(field(f, h["date"]));
        } catch (const Error& e) {
            row_error(path, row, e.what());
        }
        const std::string id = field(f, h["id"]);
        if (id.empty()) row_error(path, row, "empty id");
        FactorInfo info;
        info.id = id;
        try {
            info.role = parse_factor_role(field(f, h["role"]));
        } catch (const Error& e) {
            row_error(path, row, e.what());
        }
        if (has_cls && !field(f, h["class"]).empty()) info.category = Category{field(f, h["class"]), field(f, h["subclass"])};
        auto ld = last_date.find(id);
        if (ld != last_date.end() && d <= ld->second) row_error(path, row, "non-monotone date for " + id);
        last_date[id] = d;
        auto pos = info_pos.find(id);
        if (pos == info_pos.end()) {
            info_pos[id] = raw.infos.size();
            raw.infos.push_back(info);
        } else if (!(raw.infos[pos->second] == info)) {
            row_error(path, row, "role/category of " + id + " changes between rows");
        }
        const double v = parse_number(field(f, h["value"]), path, row);
        auto [it, inserted] = raw.obs[id].insert_or_assign(week_slot(d), v);
        if (!inserted && log) log->warnings.push_back(path + " row " + std::to_string(row) + ": later observation replaces earlier one in week of " + format_date(it->first));
    }
    return raw;
}

std::vector<Date> grid_between(Date first, Date last) {
    const auto n = static_cast<std::size_t>((last - first).count() / 7 + 1);
    return weekly_grid(first, n);
}

PricePanel assemble_prices(const RawPrices& raw, const std::vector<Date>& grid) {
    const auto T = static_cast<Index>(grid.size());
    const auto N = static_cast<Index>(raw.ids.size());
    Matrix prices = Matrix::Constant(T, N, kNaN);
    Matrix returns = Matrix::Constant(T, N, kNaN);
    std::map<Date, Index> row_of;
    for (Index t = 0; t < T; ++t) row_of[grid[t]] = t;
    for (Index i = 0; i < N; ++i) {
        const auto& obs = raw.obs.at(raw.ids[i]);
        Matrix raw_price = Matrix::Constant(T, 1, kNaN);
        for (const auto& [d, o] : obs) {
            const Index t = row_of.at(d);
            raw_price(t, 0) = o.price;
            returns(t, i) = o.ret;
        }
        double last_y = kNaN, last_p = kNaN;
        for (Index t = 0; t < T; ++t) {
            const double p = raw_price(t, 0), r = returns(t, i);
            const double prev_y = t > 0 ? prices(t - 1, i) : kNaN;
            double y = kNaN;
            if (std::isfinite(r) && std::isfinite(prev_y)) {
                y = prev_y * (1.0 + r);
            } else if (std::isfinite(p)) {
                y = std::isfinite(last_y) ? last_y * (p / last_p) : p;
            }
            prices(t, i) = y;
            if (std::isfinite(y) && std::isfinite(p)) {
                last_y = y;
                last_p = p;
            } else if (std::isfinite(y)) {
                last_p = std::isfinite(last_p) ? last_p * (y / last_y) : y;
                last_y = y;
            }
        }
    }
    return PricePanel(grid, raw.ids, std::move(prices), std::move(returns));
}

FactorPanel assemble_factors(const RawFactors& raw, const std::vector<Date>& grid, const Taxonomy& taxonomy) {
    const auto T = static_cast<Index>(grid.size());
    const auto P = static_cast<Index>(raw.infos.size());
    Matrix values = Matrix::Constant(T, P, kNaN);
    std::map<Date, Index> row_of;
    for (Index t = 0; t < T; ++t) row_of[grid[t]] = t;
    for (Index j = 0; j < P; ++j) {
        for (const auto& [d, v] : raw.obs.at(raw.infos[j].id)) values(row_of.at(d), j) = v;
    }
    return FactorPanel(grid, raw.infos, std::move(values), taxonomy);
}

template <class Map>
void extend_bounds(const Map& obs, Date& lo, Date& hi, bool& any) {
    for (const auto& [id, series] : obs) {
        if (series.empty()) continue;
        const Date a = series.begin()->first, b = series.rbegin()->first;
        if (!any || a < lo) lo = a;
        if (!any || b > hi) hi = b;
        any = true;
    }
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

PricePanel read_price_csv(const std::string& path, IngestLog* log) {
    auto raw = parse_prices(path, log);
    Date lo{}, hi{};
    bool any = false;
    extend_bounds(raw.obs, lo, hi, any);
    if (!any) throw Error(ErrorCode::Validation, path + ": no observations");
    return assemble_prices(raw, grid_between(lo, hi));
}

FactorPanel read_factor_csv(const std::string& path, const Taxonomy& taxonomy, IngestLog* log) {
    auto raw = parse_factors(path, log);
    Date lo{}, hi{};
    bool any = false;
    extend_bounds(raw.obs, lo, hi, any);
    if (!any) throw Error(ErrorCode::Validation, path + ": no observations");
    return assemble_factors(raw, grid_between(lo, hi), taxonomy);
}

MarketData read_market(const std::string& price_path, const std::string& factor_path, const Taxonomy& taxonomy,
                       IngestLog* log) {
    auto rp = parse_prices(price_path, log);
    auto rf = parse_factors(factor_path, log);
    Date lo{}, hi{};
    bool any = false;
    extend_bounds(rp.obs, lo, hi, any);
    extend_bounds(rf.obs, lo, hi, any);
    if (!any) throw Error(ErrorCode::Validation, "no observations in " + price_path + " or " + factor_path);
    const auto grid = grid_between(lo, hi);
    MarketData md{assemble_prices(rp, grid), assemble_factors(rf, grid, taxonomy)};
    md.check_aligned();
    return md;
}

void write_price_csv(const PricePanel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Validation, "cannot write " + path);
    out << "date,id,price,return\n";
    for (Index i = 0; i < panel.n_assets(); ++i) {
        for (Index t = 0; t < panel.n_dates(); ++t) {
            const double p = panel.prices()(t, i);
            if (!std::isfinite(p)) continue;
            out << format_date(panel.dates()[t]) << ',' << panel.assets()[i] << ',' << format_double(p) << ','
                << format_double(panel.returns()(t, i)) << '\n';
        }
    }
}

namespace {
std::string quoted(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}
}  // namespace

void write_factor_csv(const FactorPanel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Validation, "cannot write " + path);
    out << "date,id,value,role,class,subclass\n";
    for (Index j = 0; j < panel.n_factors(); ++j) {
        const auto& f = panel.factor(j);
        for (Index t = 0; t < panel.n_dates(); ++t) {
            const double v = panel.values()(t, j);
            if (!std::isfinite(v)) continue;
            out << format_date(panel.dates()[t]) << ',' << quoted(f.id) << ',' << format_double(v) << ','
                << to_string(f.role) << ',' << (f.category ? quoted(f.category->cls) : "") << ','
                << (f.category ? quoted(f.category->subclass) : "") << '\n';
        }
    }
}

}  // namespace amf
