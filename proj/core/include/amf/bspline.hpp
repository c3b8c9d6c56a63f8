#pragma once

#include "amf/types.hpp"

namespace amf {

/// Clamped B-spline basis on [0, 1] with equally spaced interior knots.
/// Returns an x.size() x basis_size matrix whose rows sum to one. The degree
/// is min(3, basis_size - 1), so basis_size 1 is the constant function.
Matrix bspline_basis(const Vector& x, int basis_size);

}  // namespace amf
