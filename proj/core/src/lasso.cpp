#include "amf/lasso.hpp"

#include <algorithm>
#include <cmath>

#include "amf/error.hpp"

namespace amf {

namespace {

double soft_threshold(double z, double g) {
    if (z > g) return z - g;
    if (z < -g) return z + g;
    return 0.0;
}

/// Centered and scaled copy of a regression problem.
struct Standardized {
    Matrix z;
    Vector y;
    Vector center;
    Vector scale;
    double y_center = 0.0;

    Standardized(const Matrix& x, const Vector& resp) {
        const Index n = x.rows(), p = x.cols();
        if (resp.size() != n) throw Error(ErrorCode::InvalidArgument, "response length does not match design rows");
        if (n < 2) throw Error(ErrorCode::TooFewObservations, "LASSO needs at least two observations");
        if (!x.allFinite() || !resp.allFinite()) throw Error(ErrorCode::InvalidArgument, "design and response must be finite");
        center = x.colwise().mean().transpose();
        scale.resize(p);
        z.resize(n, p);
        for (Index j = 0; j < p; ++j) {
            const auto c = x.col(j).array() - center(j);
            const double sd = std::sqrt(c.square().sum() / static_cast<double>(n));
            const double mag = x.col(j).cwiseAbs().maxCoeff();
            if (mag == 0.0 || sd <= 1e-12 * mag) {
                throw Error(ErrorCode::ConstantColumn, "design column " + std::to_string(j) + " is constant");
            }
            scale(j) = sd;
            z.col(j) = c.matrix() / sd;
        }
        y_center = resp.mean();
        y = resp.array() - y_center;
        gram.noalias() = z.transpose() * z / static_cast<double>(n);
        zty.noalias() = z.transpose() * y / static_cast<double>(n);
    }

    double lambda_max() const {
        if (z.cols() == 0) return 0.0;
        return zty.cwiseAbs().maxCoeff();
    }

    LassoFit to_original(const Vector& b, long sweeps) const {
        LassoFit f;
        f.coefficients = b.cwiseQuotient(scale);
        f.intercept = y_center - center.dot(f.coefficients);
        f.sweeps = sweeps;
        return f;
    }

    Vector to_standardized(const LassoFit& f) const { return f.coefficients.cwiseProduct(scale); }

    /// Coordinate descent from warm start b (standardized scale), run on
    /// the Gram form: g = c - G b with G = Z'Z/n and c = Z'y/n.
    long solve(double lambda, Vector& b, const LassoOptions& opt) const {
        const Index p = z.cols();
        Vector g = zty - gram * b;
        long sweeps = 0;
        std::vector<char> active(static_cast<std::size_t>(p), 0);
        for (Index j = 0; j < p; ++j) active[j] = b(j) != 0.0;

        auto sweep = [&](bool active_only) {
            double max_change = 0.0;
            for (Index j = 0; j < p; ++j) {
                if (active_only && !active[j]) continue;
                const double old = b(j);
                // diag(G) == 1 after standardization
                const double updated = soft_threshold(g(j) + old, lambda);
                if (updated != old) {
                    g.noalias() -= (updated - old) * gram.col(j);
                    b(j) = updated;
                    max_change = std::max(max_change, std::abs(updated - old));
                }
                if (updated != 0.0) active[j] = 1;
            }
            ++sweeps;
            if (sweeps > opt.max_sweeps) {
                throw Error(ErrorCode::MaxIterations, "coordinate descent did not converge within " +
                                                          std::to_string(opt.max_sweeps) + " sweeps");
            }
            return max_change;
        };

        while (true) {
            const double full_change = sweep(false);
            if (full_change < opt.tolerance) break;
            while (sweep(true) >= opt.tolerance) {
            }
        }
        return sweeps;
    }

    Matrix gram;
    Vector zty;
};

std::vector<double> log_grid(double hi, int count) {
    std::vector<double> g(static_cast<std::size_t>(count));
    const double lo = 1e-3 * hi;
    for (int k = 0; k < count; ++k) {
        const double frac = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
        g[k] = std::exp(std::log(hi) + frac * (std::log(lo) - std::log(hi)));
    }
    g.front() = hi;
    return g;
}

}  // namespace

std::vector<Index> LassoFit::support() const {
    std::vector<Index> s;
    for (Index j = 0; j < coefficients.size(); ++j) {
        if (coefficients(j) != 0.0) s.push_back(j);
    }
    return s;
}

LassoFit lasso_solve(const Matrix& design, const Vector& response, double lambda, const LassoOptions& options) {
    if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be non-negative");
    const Standardized prob(design, response);
    Vector b = Vector::Zero(design.cols());
    const long sweeps = prob.solve(lambda, b, options);
    return prob.to_original(b, sweeps);
}

double lambda_max(const Matrix& design, const Vector& response) { return Standardized(design, response).lambda_max(); }

double lasso_kkt_violation(const Matrix& design, const Vector& response, const LassoFit& fit, double lambda) {
    const Standardized prob(design, response);
    const Vector b = prob.to_standardized(fit);
    const Vector g = prob.z.transpose() * (prob.y - prob.z * b) / static_cast<double>(design.rows());
    double worst = 0.0;
    for (Index j = 0; j < b.size(); ++j) {
        const double v = b(j) == 0.0 ? std::max(0.0, std::abs(g(j)) - lambda)
                                     : std::abs(g(j) - std::copysign(lambda, b(j)));
        worst = std::max(worst, v);
    }
    return worst;
}

LassoPath cv_path(const Matrix& design, const Vector& response, int n_folds, int grid_size, const LassoOptions& options) {
    const Index n = design.rows();
    if (n_folds < 2) throw Error(ErrorCode::InvalidArgument, "need at least two folds");
    if (grid_size < 10) throw Error(ErrorCode::InvalidArgument, "lambda grid needs at least 10 points");
    const bool leave_one_out = n_folds == n;
    if (!leave_one_out && n < 2 * static_cast<Index>(n_folds)) {
        throw Error(ErrorCode::TooFewObservations, "need n >= 2 * folds, got n=" + std::to_string(n) +
                                                       " folds=" + std::to_string(n_folds));
    }

    const Standardized full(design, response);
    LassoPath path;
    const double lmax = full.lambda_max();
    if (lmax <= 0.0) throw Error(ErrorCode::InvalidArgument, "response is uncorrelated with every column");
    path.lambdas = log_grid(lmax, grid_size);

    Vector b = Vector::Zero(design.cols());
    for (double lam : path.lambdas) {
        const long sweeps = full.solve(lam, b, options);
        path.fits.push_back(full.to_original(b, sweeps));
        path.support_sizes.push_back(static_cast<Index>(path.fits.back().support().size()));
    }

    const auto G = path.lambdas.size();
    std::vector<std::vector<double>> fold_mse(static_cast<std::size_t>(n_folds), std::vector<double>(G));
    std::vector<double> fold_size(static_cast<std::size_t>(n_folds));
    for (int k = 0; k < n_folds; ++k) {
        const Index lo = n * k / n_folds, hi = n * (k + 1) / n_folds;
        const Index m = hi - lo;
        fold_size[k] = static_cast<double>(m);
        Matrix xt(n - m, design.cols());
        Vector yt(n - m);
        xt << design.topRows(lo), design.bottomRows(n - hi);
        yt << response.head(lo), response.tail(n - hi);
        const Standardized train(xt, yt);
        Vector bk = Vector::Zero(design.cols());
        for (std::size_t g = 0; g < G; ++g) {
            train.solve(path.lambdas[g], bk, options);
            const LassoFit f = train.to_original(bk, 0);
            const Vector pred = (design.middleRows(lo, m) * f.coefficients).array() + f.intercept;
            fold_mse[k][g] = (response.segment(lo, m) - pred).squaredNorm() / static_cast<double>(m);
        }
    }

    const double total = static_cast<double>(n);
    path.cv_mean.resize(G);
    path.cv_se.resize(G);
    for (std::size_t g = 0; g < G; ++g) {
        double mean = 0.0;
        for (int k = 0; k < n_folds; ++k) mean += fold_size[k] * fold_mse[k][g];
        mean /= total;
        double var = 0.0;
        for (int k = 0; k < n_folds; ++k) var += fold_size[k] * (fold_mse[k][g] - mean) * (fold_mse[k][g] - mean);
        var /= total;
        path.cv_mean[g] = mean;
        path.cv_se[g] = std::sqrt(var / static_cast<double>(n_folds - 1));
    }
    return path;
}

ModifiedLambdaChoice choose_lambda(const LassoPath& path, int support_cap) {
    if (path.lambdas.empty()) throw Error(ErrorCode::EmptyPath, "regularization path is empty");
    if (support_cap < 1) throw Error(ErrorCode::InvalidArgument, "support cap must be >= 1");
    const std::size_t G = path.lambdas.size();

    std::size_t best = 0;
    for (std::size_t g = 1; g < G; ++g) {
        if (path.cv_mean[g] < path.cv_mean[best]) best = g;
    }
    const double bound = path.cv_mean[best] + path.cv_se[best];
    std::size_t one_se = best;
    for (std::size_t g = 0; g <= best; ++g) {
        if (path.cv_mean[g] <= bound) {
            one_se = g;
            break;
        }
    }

    std::size_t cap = 0;
    while (cap + 1 < G && path.support_sizes[cap + 1] <= support_cap) ++cap;

    ModifiedLambdaChoice c;
    c.lambda_1se = path.lambdas[one_se];
    c.lambda_cap = path.lambdas[cap];
    c.chosen_index = std::min(one_se, cap);
    c.chosen = path.lambdas[c.chosen_index];
    c.support = path.fits[c.chosen_index].support();
    return c;
}

}  // namespace amf
