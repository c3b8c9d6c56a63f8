#include "amf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "amf/error.hpp"
#include "amf/panel_io.hpp"

namespace amf {

namespace {

constexpr std::pair<Model, std::string_view> kModels[] = {{Model::Amf, "AMF"}, {Model::Ff5, "FF5"}};
constexpr std::pair<TestKind, std::string_view> kTests[] = {
    {TestKind::Intercept, "intercept"}, {TestKind::Linear, "linear"}, {TestKind::Residual, "residual"},
    {TestKind::Spline, "spline"},       {TestKind::AdjR2, "adj_r2"},  {TestKind::OosR2, "oos_r2"},
};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

std::string_view to_string(Model m) {
    for (const auto& [k, v] : kModels) {
        if (k == m) return v;
    }
    return "?";
}

std::string_view to_string(TestKind t) {
    for (const auto& [k, v] : kTests) {
        if (k == t) return v;
    }
    return "?";
}

Model parse_model(std::string_view text) {
    for (const auto& [k, v] : kModels) {
        if (lower(v) == lower(text)) return k;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown model '" + std::string(text) + "'");
}

TestKind parse_test_kind(std::string_view text) {
    for (const auto& [k, v] : kTests) {
        if (v == lower(text)) return k;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown test '" + std::string(text) + "'");
}

bool is_rejection_test(TestKind t) { return t != TestKind::AdjR2 && t != TestKind::OosR2; }

TestGrid::TestGrid(int first_year, int last_year, int min_len, Model model, TestKind test)
    : first_year_(first_year), last_year_(last_year), min_len_(min_len), model_(model), test_(test) {
    if (last_year < first_year) throw Error(ErrorCode::InvalidArgument, "grid needs last_year >= first_year");
    if (min_len < 1) throw Error(ErrorCode::InvalidArgument, "min_len must be >= 1");
    const Index g = last_year - first_year + 1;
    cells_ = Matrix::Constant(g, g, kNaN);
}

std::vector<int> TestGrid::start_years() const {
    std::vector<int> out;
    for (int y = first_year_; y <= last_year_; ++y) out.push_back(y);
    return out;
}

std::vector<int> TestGrid::end_years() const { return start_years(); }

Index TestGrid::index_of(int year) const {
    if (year < first_year_ || year > last_year_) {
        throw Error(ErrorCode::InvalidArgument, "year " + std::to_string(year) + " outside the grid");
    }
    return year - first_year_;
}

bool TestGrid::valid(int start_year, int end_year) const {
    return start_year >= first_year_ && end_year <= last_year_ && end_year - start_year + 1 >= min_len_;
}

double TestGrid::at(int start_year, int end_year) const {
    return cells_(index_of(start_year), index_of(end_year));
}

void TestGrid::set(int start_year, int end_year, double value) {
    if (!valid(start_year, end_year)) {
        throw Error(ErrorCode::InvalidArgument, "cell " + std::to_string(start_year) + "-" +
                                                    std::to_string(end_year) + " is not a valid window");
    }
    cells_(index_of(start_year), index_of(end_year)) = value;
}

std::vector<GridCell> TestGrid::populated() const {
    std::vector<GridCell> out;
    for (int s = first_year_; s <= last_year_; ++s) {
        for (int e = s; e <= last_year_; ++e) {
            if (valid(s, e)) out.push_back({s, e, at(s, e)});
        }
    }
    return out;
}

std::vector<GridCell> TestGrid::skew_diagonal(int k) const {
    std::vector<GridCell> out;
    for (Index i = 0; i < size(); ++i) {
        const Index j = i + k;
        if (j < 0 || j >= size()) continue;
        const int s = first_year_ + static_cast<int>(i), e = first_year_ + static_cast<int>(j);
        if (valid(s, e)) out.push_back({s, e, cells_(i, j)});
    }
    return out;
}

std::vector<GridCell> TestGrid::skew_anti_diagonal(int k) const {
    std::vector<GridCell> out;
    const Index sum = size() - 1 + k;
    for (Index i = 0; i < size(); ++i) {
        const Index j = sum - i;
        if (j < 0 || j >= size()) continue;
        const int s = first_year_ + static_cast<int>(i), e = first_year_ + static_cast<int>(j);
        if (valid(s, e)) out.push_back({s, e, cells_(i, j)});
    }
    return out;
}

bool TestGrid::operator==(const TestGrid& o) const {
    if (first_year_ != o.first_year_ || last_year_ != o.last_year_ || min_len_ != o.min_len_ ||
        model_ != o.model_ || test_ != o.test_) {
        return false;
    }
    for (Index i = 0; i < cells_.size(); ++i) {
        const double a = cells_.data()[i], b = o.cells_.data()[i];
        if (!(a == b || (std::isnan(a) && std::isnan(b)))) return false;
    }
    return true;
}

TestGrid grid_diff(const TestGrid& a, const TestGrid& b) {
    if (a.first_year() != b.first_year() || a.last_year() != b.last_year() || a.min_len() != b.min_len()) {
        throw Error(ErrorCode::InvalidArgument, "grids have different axes");
    }
    TestGrid out(a.first_year(), a.last_year(), a.min_len(), a.model(), a.test());
    for (const auto& c : a.populated()) out.set(c.start_year, c.end_year, c.value - b.at(c.start_year, c.end_year));
    return out;
}

std::string grid_csv(const TestGrid& grid) {
    std::ostringstream os;
    os << "start_year,end_year,value\n";
    for (const auto& c : grid.populated()) {
        os << c.start_year << ',' << c.end_year << ',' << (std::isnan(c.value) ? "NA" : format_double(c.value))
           << '\n';
    }
    return os.str();
}

void write_grid_csv(const TestGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Validation, "cannot write " + path);
    out << grid_csv(grid);
}

TestGrid read_grid_csv(const std::string& path, Model model, TestKind test) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Validation, "cannot open " + path);
    std::string line;
    std::getline(in, line);
    if (line.rfind("start_year,end_year,value", 0) != 0) {
        throw Error(ErrorCode::Validation, path + ": expected header start_year,end_year,value");
    }
    std::vector<GridCell> cells;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 3) throw Error(ErrorCode::Validation, path + " row " + std::to_string(row) + ": need 3 fields");
        try {
            GridCell c{std::stoi(f[0]), std::stoi(f[1]), f[2] == "NA" ? kNaN : std::stod(f[2])};
            cells.push_back(c);
        } catch (const std::exception&) {
            throw Error(ErrorCode::Validation, path + " row " + std::to_string(row) + ": malformed number");
        }
    }
    if (cells.empty()) throw Error(ErrorCode::Validation, path + ": no cells");
    int lo = cells[0].start_year, hi = cells[0].end_year, len = hi - lo + 1;
    for (const auto& c : cells) {
        lo = std::min(lo, c.start_year);
        hi = std::max(hi, c.end_year);
        len = std::min(len, c.end_year - c.start_year + 1);
    }
    TestGrid grid(lo, hi, len, model, test);
    for (const auto& c : cells) grid.set(c.start_year, c.end_year, c.value);
    return grid;
}

std::string grid_svg(const TestGrid& grid, const std::string& title) {
    const int cell = 44, left = 60, top = 50;
    const auto g = static_cast<int>(grid.size());
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& c : grid.populated()) {
        if (std::isnan(c.value)) continue;
        lo = std::min(lo, c.value);
        hi = std::max(hi, c.value);
    }
    if (!std::isfinite(lo)) lo = hi = 0.0;
    if (is_rejection_test(grid.test())) {
        lo = std::min(lo, 0.0);
        hi = std::max(hi, 1.0);
    }
    const double span = hi > lo ? hi - lo : 1.0;

    std::ostringstream os;
    const int w = left + g * cell + 20, h = top + g * cell + 40;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    if (!title.empty()) os << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
    char buf[64];
    for (int i = 0; i < g; ++i) {
        const int year = grid.first_year() + i;
        os << "<text x=\"" << left - 6 << "\" y=\"" << top + i * cell + cell / 2 + 4
           << "\" text-anchor=\"end\">" << year << "</text>\n";
        os << "<text x=\"" << left + i * cell + cell / 2 << "\" y=\"" << top + g * cell + 14
           << "\" text-anchor=\"middle\">" << year << "</text>\n";
    }
    for (const auto& c : grid.populated()) {
        const int x = left + (c.end_year - grid.first_year()) * cell;
        const int y = top + (c.start_year - grid.first_year()) * cell;
        std::string fill = "#dddddd", label = "NA";
        if (!std::isnan(c.value)) {
            const double u = std::clamp((c.value - lo) / span, 0.0, 1.0);
            const int r = static_cast<int>(255 - 200 * u), gg = static_cast<int>(255 - 170 * u);
            std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, gg, 255);
            fill = buf;
            std::snprintf(buf, sizeof buf, "%.1f", c.value);
            label = buf;
        }
        os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
           << "\" fill=\"" << fill << "\" stroke=\"white\"/>\n";
        os << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"middle\">" << label
           << "</text>\n";
    }
    os << "<text x=\"" << left + g * cell / 2 << "\" y=\"" << h - 6 << "\" text-anchor=\"middle\">end year</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace amf
