#pragma once

#include <string>
#include <vector>

#include "amf/types.hpp"

namespace amf {

/// Ordinary least squares fit with classical (homoskedastic) inference.
struct FitSummary {
    std::vector<std::string> columns;  // labels used to check nesting
    Vector coefficients;
    Vector standard_errors;
    Vector t_stats;
    Vector p_values;  // two-sided
    Vector residuals;
    Vector fitted;
    double rss = 0.0;
    double r2 = 0.0;      // centered when the design holds a constant column, else uncentered
    double adj_r2 = 0.0;  // regressors exclude a constant column; NaN when too few rows
    Index n = 0;
    Index p = 0;
    Index df_resid = 0;
};

/// Least squares fit of response on the columns of design (no implicit
/// intercept). The design rank is checked by a column-pivoted QR with
/// tolerance 1e-10 times the largest column norm.
///
/// Throws Underdetermined when n <= p, and RankDeficientError naming the
/// first column that is a linear combination of the columns before it.
FitSummary ols_fit(const Matrix& design, const Vector& response, std::vector<std::string> labels = {});

struct AnovaResult {
    double f_stat = 0.0;
    Index df1 = 0;
    Index df2 = 0;
    double p_value = 1.0;
};

/// F comparison of nested least squares models.
///   F = ((rss_r - rss_f) / (p_f - p_r)) / (rss_f / (n - p_f))
/// Throws NotNested when p_reduced >= p_full or n <= p_full, and
/// PerfectFitDegenerate when rss_full is zero.
AnovaResult nested_anova(double rss_full, Index p_full, double rss_reduced, Index p_reduced, Index n);

/// Same test on fitted models; the reduced model's column labels must be a
/// subset of the full model's and both must use n observations.
AnovaResult nested_anova(const FitSummary& full, const FitSummary& reduced, Index n);

/// 1 - (1 - r2)(n - 1)/(n - p - 1). Throws Underdetermined when n <= p + 1.
double adjusted_r2(double r2, Index n, Index p);

/// 1 - sum (actual - prediction)^2 / sum (actual - train_mean)^2.
/// Throws ConstantActuals when the benchmark error is zero.
double out_of_sample_r2(const Vector& predictions, const Vector& actuals, double train_mean);

/// Benjamini-Hochberg-Yekutieli step-up adjustment with the harmonic
/// correction c(m) = sum_{i<=m} 1/i. Returns q-values in input order.
/// Throws InvalidPValue for any p outside [0, 1].
std::vector<double> bhy_adjust(const std::vector<double>& p_values);

}  // namespace amf
