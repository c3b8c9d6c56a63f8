#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "amf/panel.hpp"

namespace amf {

enum class Model { Amf, Ff5 };
enum class TestKind { Intercept, Linear, Residual, Spline, AdjR2, OosR2 };

std::string_view to_string(Model m);
std::string_view to_string(TestKind t);
Model parse_model(std::string_view text);
TestKind parse_test_kind(std::string_view text);

/// True for the tags whose cells are percentages of discoveries rather than
/// mean goodness-of-fit values.
bool is_rejection_test(TestKind t);

struct GridCell {
    int start_year = 0;
    int end_year = 0;
    double value = kNaN;
};

/// Heatmap over (start year, end year). Row i is start year first_year + i,
/// column j is end year first_year + j. Cells of windows shorter than
/// min_len are invalid; valid cells may still be NaN when a window failed.
class TestGrid {
public:
    TestGrid() = default;
    TestGrid(int first_year, int last_year, int min_len, Model model = Model::Amf,
             TestKind test = TestKind::Linear);

    int first_year() const noexcept { return first_year_; }
    int last_year() const noexcept { return last_year_; }
    int min_len() const noexcept { return min_len_; }
    Index size() const noexcept { return cells_.rows(); }
    Model model() const noexcept { return model_; }
    TestKind test() const noexcept { return test_; }
    const Matrix& cells() const noexcept { return cells_; }

    std::vector<int> start_years() const;
    std::vector<int> end_years() const;

    bool valid(int start_year, int end_year) const;
    double at(int start_year, int end_year) const;
    void set(int start_year, int end_year, double value);

    /// Valid cells, ordered by (start, end); equals the window enumeration.
    std::vector<GridCell> populated() const;

    /// Cells with (end index - start index) == k: windows of k + 1 years.
    std::vector<GridCell> skew_diagonal(int k) const;
    /// Cells with i + j == size - 1 + k: windows sharing one mid-year.
    std::vector<GridCell> skew_anti_diagonal(int k) const;

    bool operator==(const TestGrid& other) const;

private:
    Index index_of(int year) const;

    int first_year_ = 0;
    int last_year_ = -1;
    int min_len_ = 1;
    Model model_ = Model::Amf;
    TestKind test_ = TestKind::Linear;
    Matrix cells_;
};

/// Cellwise a - b. Throws InvalidArgument when the axes differ.
TestGrid grid_diff(const TestGrid& a, const TestGrid& b);

/// "start_year,end_year,value" with one row per valid cell; NaN cells are
/// written as NA.
std::string grid_csv(const TestGrid& grid);
void write_grid_csv(const TestGrid& grid, const std::string& path);

/// Reads a grid CSV; axes span the smallest start to the largest end and
/// min_len is the shortest window present.
TestGrid read_grid_csv(const std::string& path, Model model = Model::Amf, TestKind test = TestKind::Linear);

/// Heatmap with start year on the y axis and end year on the x axis.
std::string grid_svg(const TestGrid& grid, const std::string& title = {});

}  // namespace amf
