#pragma once

#include <vector>

#include "amf/types.hpp"

namespace amf {

struct LassoOptions {
    double tolerance = 1e-9;  // max standardized coefficient change per sweep
    long max_sweeps = 100000;
};

/// LASSO solution mapped back to the original column scale. Prediction is
/// intercept + x' coefficients; the intercept is never penalized and never
/// part of the support.
struct LassoFit {
    Vector coefficients;
    double intercept = 0.0;
    long sweeps = 0;

    std::vector<Index> support() const;
};

/// Minimizes (1/2n)||y - Z b||^2 + lambda ||b||_1 by cyclic coordinate
/// descent, where Z is the design centered and scaled to unit (1/n)
/// variance and y is the centered response.
/// Throws ConstantColumn for a constant design column and MaxIterations
/// when the sweep budget runs out.
LassoFit lasso_solve(const Matrix& design, const Vector& response, double lambda, const LassoOptions& options = {});

/// Smallest penalty with an all-zero solution: max_j |z_j' y| / n.
double lambda_max(const Matrix& design, const Vector& response);

/// Largest KKT violation of `fit` at `lambda`, measured on the standardized
/// scale: for zero coefficients max(0, |g_j| - lambda); otherwise
/// |g_j - sign(b_j) lambda| where g_j = z_j'(y - Z b)/n.
double lasso_kkt_violation(const Matrix& design, const Vector& response, const LassoFit& fit, double lambda);

struct LassoPath {
    std::vector<double> lambdas;  // decreasing
    std::vector<LassoFit> fits;   // full-data solution per lambda
    std::vector<double> cv_mean;  // cross-validated mean squared error
    std::vector<double> cv_se;    // its standard error across folds
    std::vector<Index> support_sizes;
};

/// Regularization path on a log grid from lambda_max down to
/// 1e-3 * lambda_max with cross-validation over contiguous time blocks.
/// Throws TooFewObservations when n < 2 * n_folds (leave-one-out,
/// n_folds == n, is accepted).
LassoPath cv_path(const Matrix& design, const Vector& response, int n_folds = 10, int grid_size = 100,
                  const LassoOptions& options = {});

struct ModifiedLambdaChoice {
    double lambda_1se = 0.0;
    double lambda_cap = 0.0;
    double chosen = 0.0;
    std::size_t chosen_index = 0;
    std::vector<Index> support;
};

/// chosen = max(lambda_1se, lambda_cap): lambda_1se is the largest grid
/// penalty whose CV error is within one standard error of the minimum;
/// lambda_cap is the smallest grid penalty reached walking down from
/// lambda_max before the support first exceeds support_cap.
ModifiedLambdaChoice choose_lambda(const LassoPath& path, int support_cap = 20);

}  // namespace amf
