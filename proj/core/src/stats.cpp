#include "amf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "amf/distributions.hpp"
#include "amf/error.hpp"

namespace amf {

namespace {

constexpr double kRankTolerance = 1e-10;

Index first_dependent_column(const Matrix& x, double tol) {
    for (Index k = 1; k < x.cols(); ++k) {
        Eigen::ColPivHouseholderQR<Matrix> qr(x.leftCols(k + 1));
        qr.setThreshold(Eigen::Default);
        const auto diag = qr.matrixQR().diagonal().cwiseAbs();
        const Index rank = (diag.array() > tol).count();
        if (rank < k + 1) return k;
    }
    return x.cols() - 1;
}

bool has_constant_column(const Matrix& x) {
    for (Index j = 0; j < x.cols(); ++j) {
        const double v = x(0, j);
        if (v != 0.0 && (x.col(j).array() == v).all()) return true;
    }
    return false;
}

}  // namespace

FitSummary ols_fit(const Matrix& design, const Vector& response, std::vector<std::string> labels) {
    const Index n = design.rows();
    const Index p = design.cols();
    if (response.size() != n) throw Error(ErrorCode::InvalidArgument, "response length does not match design rows");
    if (p < 1 || n <= p) {
        throw Error(ErrorCode::Underdetermined,
                    "need n > p >= 1, got n=" + std::to_string(n) + " p=" + std::to_string(p));
    }
    if (!design.allFinite() || !response.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "design and response must be finite");
    }
    if (labels.empty()) {
        for (Index j = 0; j < p; ++j) labels.push_back("x" + std::to_string(j));
    }
    if (static_cast<Index>(labels.size()) != p) throw Error(ErrorCode::InvalidArgument, "one label per column required");

    const double max_norm = design.colwise().norm().maxCoeff();
    const double tol = kRankTolerance * max_norm;
    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    const auto diag = qr.matrixQR().diagonal().cwiseAbs();
    const Index rank = max_norm > 0.0 ? (diag.array() > tol).count() : 0;
    if (rank < p) {
        const Index col = max_norm > 0.0 ? first_dependent_column(design, tol) : 0;
        throw RankDeficientError(col, "column " + std::to_string(col) + " (" + labels[col] +
                                          ") is linearly dependent on earlier columns");
    }

    FitSummary fit;
    fit.columns = std::move(labels);
    fit.n = n;
    fit.p = p;
    fit.df_resid = n - p;
    fit.coefficients = qr.solve(response);
    fit.fitted = design * fit.coefficients;
    fit.residuals = response - fit.fitted;
    fit.rss = fit.residuals.squaredNorm();

    // diag((X'X)^{-1}) from the triangular factor: X P = Q R.
    const Matrix r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Matrix r_inv = r.triangularView<Eigen::Upper>().solve(Matrix::Identity(p, p));
    const Vector diag_perm = r_inv.rowwise().squaredNorm();
    const Vector diag_inv = qr.colsPermutation() * diag_perm;

    const double sigma2 = fit.rss / static_cast<double>(fit.df_resid);
    fit.standard_errors = (sigma2 * diag_inv.array()).sqrt();
    fit.t_stats.resize(p);
    fit.p_values.resize(p);
    for (Index j = 0; j < p; ++j) {
        const double b = fit.coefficients(j), se = fit.standard_errors(j);
        double t;
        if (se > 0.0) {
            t = b / se;
        } else {
            t = b == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), b);
        }
        fit.t_stats(j) = t;
        fit.p_values(j) = student_t_two_sided_p(t, static_cast<double>(fit.df_resid));
    }

    const bool centered = has_constant_column(design);
    const double tss = centered ? (response.array() - response.mean()).square().sum() : response.squaredNorm();
    fit.r2 = tss > 0.0 ? 1.0 - fit.rss / tss : (fit.rss == 0.0 ? 1.0 : 0.0);
    const Index regressors = centered ? p - 1 : p;
    fit.adj_r2 = n > regressors + 1 ? adjusted_r2(fit.r2, n, regressors) : kNaN;
    return fit;
}

AnovaResult nested_anova(double rss_full, Index p_full, double rss_reduced, Index p_reduced, Index n) {
    if (p_reduced >= p_full || p_reduced < 0) {
        throw Error(ErrorCode::NotNested, "reduced model must have fewer parameters than the full model");
    }
    if (n <= p_full) throw Error(ErrorCode::NotNested, "full model has no residual degrees of freedom");
    if (!(rss_full > 0.0)) throw Error(ErrorCode::PerfectFitDegenerate, "full model residual sum of squares is zero");
    AnovaResult res;
    res.df1 = p_full - p_reduced;
    res.df2 = n - p_full;
    const double num = std::max(rss_reduced - rss_full, 0.0) / static_cast<double>(res.df1);
    const double den = rss_full / static_cast<double>(res.df2);
    res.f_stat = num / den;
    res.p_value = f_upper_p(res.f_stat, static_cast<double>(res.df1), static_cast<double>(res.df2));
    return res;
}

AnovaResult nested_anova(const FitSummary& full, const FitSummary& reduced, Index n) {
    if (full.n != n || reduced.n != n) throw Error(ErrorCode::NotNested, "models fitted on different observations");
    const std::set<std::string> cols(full.columns.begin(), full.columns.end());
    for (const auto& c : reduced.columns) {
        if (!cols.count(c)) throw Error(ErrorCode::NotNested, "reduced column " + c + " absent from full model");
    }
    return nested_anova(full.rss, full.p, reduced.rss, reduced.p, n);
}

double adjusted_r2(double r2, Index n, Index p) {
    if (n <= p + 1) throw Error(ErrorCode::Underdetermined, "adjusted R^2 needs n > p + 1");
    return 1.0 - (1.0 - r2) * static_cast<double>(n - 1) / static_cast<double>(n - p - 1);
}

double out_of_sample_r2(const Vector& predictions, const Vector& actuals, double train_mean) {
    if (actuals.size() < 1 || predictions.size() != actuals.size()) {
        throw Error(ErrorCode::InvalidArgument, "predictions and actuals must be non-empty and of equal length");
    }
    const double sse = (actuals - predictions).squaredNorm();
    const double sst = (actuals.array() - train_mean).square().sum();
    if (!(sst > 0.0)) throw Error(ErrorCode::ConstantActuals, "actuals equal the training mean everywhere");
    return 1.0 - sse / sst;
}

std::vector<double> bhy_adjust(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    for (double p : p_values) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidPValue, "p-value outside [0, 1]");
    }
    std::vector<double> q(m);
    if (m == 0) return q;
    double c = 0.0;
    for (std::size_t i = 1; i <= m; ++i) c += 1.0 / static_cast<double>(i);

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    double running = 1.0;
    for (std::size_t k = m; k-- > 0;) {
        const double raw = static_cast<double>(m) * c * p_values[order[k]] / static_cast<double>(k + 1);
        running = std::min(running, raw);
        q[order[k]] = std::min(running, 1.0);
    }
    return q;
}

}  // namespace amf
