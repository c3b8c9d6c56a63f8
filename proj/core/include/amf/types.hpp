#pragma once

#include <chrono>
#include <cstddef>
#include <limits>

#include <Eigen/Dense>

namespace amf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

/// Calendar day; panels live on a Friday grid.
using Date = std::chrono::sys_days;

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Half-open row interval [begin, end).
struct RowRange {
    Index begin = 0;
    Index end = 0;
    Index size() const noexcept { return end - begin; }
    bool empty() const noexcept { return end <= begin; }
};

}  // namespace amf
