#include "amf/bspline.hpp"

#include <algorithm>
#include <vector>

#include "amf/error.hpp"

namespace amf {

Matrix bspline_basis(const Vector& x, int basis_size) {
    if (basis_size < 1) throw Error(ErrorCode::InvalidArgument, "basis size must be >= 1");
    const int degree = std::min(3, basis_size - 1);
    const int interior = basis_size - degree - 1;

    // Clamped knot vector: degree+1 copies of each end.
    std::vector<double> knots;
    for (int i = 0; i <= degree; ++i) knots.push_back(0.0);
    for (int i = 1; i <= interior; ++i) knots.push_back(static_cast<double>(i) / (interior + 1));
    for (int i = 0; i <= degree; ++i) knots.push_back(1.0);

    Matrix out = Matrix::Zero(x.size(), basis_size);
    const int n_knots = static_cast<int>(knots.size());
    std::vector<double> b(static_cast<std::size_t>(n_knots - 1));
    for (Index r = 0; r < x.size(); ++r) {
        const double t = std::clamp(x(r), 0.0, 1.0);
        // Degree-0 indicator; the right end belongs to the last non-empty span.
        std::fill(b.begin(), b.end(), 0.0);
        int span = degree;
        while (span + 1 < n_knots - degree - 1 && t >= knots[span + 1]) ++span;
        b[span] = 1.0;
        // Cox-de Boor recursion in place.
        for (int d = 1; d <= degree; ++d) {
            for (int i = 0; i + d + 1 < n_knots; ++i) {
                double v = 0.0;
                const double l = knots[i + d] - knots[i];
                const double rgt = knots[i + d + 1] - knots[i + 1];
                if (l > 0.0) v += (t - knots[i]) / l * b[i];
                if (rgt > 0.0) v += (knots[i + d + 1] - t) / rgt * b[i + 1];
                b[i] = v;
            }
        }
        for (int k = 0; k < basis_size; ++k) out(r, k) = b[k];
    }
    return out;
}

}  // namespace amf
