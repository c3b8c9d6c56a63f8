#pragma once

#include <optional>
#include <string>
#include <vector>

#include "amf/gibs.hpp"

namespace amf {

/// 0 for rows in the first half of a window, 1 for the second half.
class HalfIndicator {
public:
    /// Split at floor(n / 2): rows t >= n/2 are the second half.
    static HalfIndicator split(Index n);

    /// Throws InvalidArgument unless values are 0/1, non-decreasing, and both
    /// halves are non-empty.
    explicit HalfIndicator(Vector values);

    const Vector& values() const noexcept { return h_; }
    Index size() const noexcept { return h_.size(); }
    Index first_second_half_row() const;

private:
    Vector h_;
};

/// Two-step intercept test on price levels: fit the no-intercept model
/// Y = V_S b, then regress its residuals on a constant and return the
/// two-sided p-value of that constant. Rows with any missing value are
/// dropped.
double intercept_test(const Vector& y_levels, const Matrix& v_levels, const std::vector<Index>& selected);

struct LinearTestResult {
    double p_value = 1.0;
    std::vector<Index> dropped_interactions;  // factor indices whose interaction was removed
};

/// Joint F-test that the interactions dv_S (.) h add nothing to dv_S.
/// Interaction columns that make the design rank-deficient (a factor constant
/// within one half) are dropped and reported.
LinearTestResult linear_invariance_test(const Vector& dy, const Matrix& dv, const std::vector<Index>& selected,
                                        const HalfIndicator& h);

struct ResidualAnalysis {
    std::optional<double> p_value;        // none when no new factor is selected
    std::vector<Index> second_half_set;   // S_{i,b}
    std::vector<Index> union_set;         // S_i u S_{i,b}
};

/// Residual re-selection on the second half of the window: regress dy on
/// dv_S there, run the GIBS selection on the residuals over the factors
/// complete in the second half except S, and F-test the union model against
/// the original one.
ResidualAnalysis residual_analysis(const Vector& dy, const Matrix& dv, const std::vector<Index>& selected,
                                   const HalfIndicator& h, const std::vector<FactorInfo>& factors,
                                   const Taxonomy& taxonomy, const GibsConfig& config);

/// F-test of time-varying coefficients b_j(t) expanded on a clamped B-spline
/// basis of dimension basis_size over normalized window time against the
/// constant-coefficient model. Returns 1 when basis_size is 1.
/// Throws TooFewObservations when n < |S| * basis_size + 5 and ReduceBasis
/// (naming `asset`) when the expanded design is rank-deficient.
double spline_invariance_test(const Vector& dy, const Matrix& dv, const std::vector<Index>& selected, int basis_size,
                              const std::string& asset = {});

/// Out-of-sample R^2 of frozen coefficients over future differences, using
/// the in-sample mean of dy as the benchmark. Throws MissingFuture with
/// fewer than 20 usable future rows.
double oos_evaluate(const SelectionResult& fit, const Vector& future_dy, const Matrix& future_dv);

}  // namespace amf
