#include "amf/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "amf/bspline.hpp"
#include "amf/error.hpp"

namespace amf {

namespace {

std::vector<Index> complete_rows(const Vector& y, const Matrix& x, const std::vector<Index>& cols, Index from = 0,
                                 Index to = -1) {
    if (to < 0) to = y.size();
    std::vector<Index> rows;
    for (Index t = from; t < to; ++t) {
        bool ok = std::isfinite(y(t));
        for (Index j : cols) ok = ok && std::isfinite(x(t, j));
        if (ok) rows.push_back(t);
    }
    return rows;
}

Matrix take(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        for (std::size_t r = 0; r < rows.size(); ++r) out(r, c) = m(rows[r], cols[c]);
    }
    return out;
}

Vector take(const Vector& v, const std::vector<Index>& rows) {
    Vector out(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) out(r) = v(rows[r]);
    return out;
}

std::vector<std::string> labels_for(const std::vector<Index>& cols, const std::string& suffix = {}) {
    std::vector<std::string> out;
    for (Index j : cols) out.push_back("v" + std::to_string(j) + suffix);
    return out;
}

void require_selection(const std::vector<Index>& selected) {
    if (selected.empty()) throw Error(ErrorCode::InvalidArgument, "selected set is empty");
}

}  // namespace

HalfIndicator HalfIndicator::split(Index n) {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "half split needs at least two rows");
    Vector h(n);
    for (Index t = 0; t < n; ++t) h(t) = t >= n / 2 ? 1.0 : 0.0;
    return HalfIndicator(std::move(h));
}

HalfIndicator::HalfIndicator(Vector values) : h_(std::move(values)) {
    bool seen0 = false, seen1 = false;
    for (Index t = 0; t < h_.size(); ++t) {
        const double v = h_(t);
        if (v != 0.0 && v != 1.0) throw Error(ErrorCode::InvalidArgument, "half indicator must be 0/1");
        if (t > 0 && v < h_(t - 1)) throw Error(ErrorCode::InvalidArgument, "half indicator must be non-decreasing");
        (v == 0.0 ? seen0 : seen1) = true;
    }
    if (!seen0 || !seen1) throw Error(ErrorCode::InvalidArgument, "both halves must be non-empty");
}

Index HalfIndicator::first_second_half_row() const {
    for (Index t = 0; t < h_.size(); ++t) {
        if (h_(t) == 1.0) return t;
    }
    return h_.size();
}

double intercept_test(const Vector& y_levels, const Matrix& v_levels, const std::vector<Index>& selected) {
    require_selection(selected);
    const auto rows = complete_rows(y_levels, v_levels, selected);
    const Vector y = take(y_levels, rows);
    const auto step1 = ols_fit(take(v_levels, rows, selected), y, labels_for(selected));
    const Matrix ones = Matrix::Ones(static_cast<Index>(rows.size()), 1);
    const auto step2 = ols_fit(ones, step1.residuals, {"alpha"});
    return step2.p_values(0);
}

LinearTestResult linear_invariance_test(const Vector& dy, const Matrix& dv, const std::vector<Index>& selected,
                                        const HalfIndicator& h) {
    require_selection(selected);
    if (h.size() != dy.size()) throw Error(ErrorCode::InvalidArgument, "half indicator length differs from dy");
    const auto rows = complete_rows(dy, dv, selected);
    const auto k = static_cast<Index>(selected.size());
    Index second = 0;
    for (Index t : rows) second += h.values()(t) == 1.0;
    const Index first = static_cast<Index>(rows.size()) - second;
    if (first < k + 2 || second < k + 2) {
        throw Error(ErrorCode::TooFewObservations, "each half needs at least |S| + 2 complete rows");
    }

    const Vector y = take(dy, rows);
    const Matrix base = take(dv, rows, selected);
    const auto reduced = ols_fit(base, y, labels_for(selected));

    LinearTestResult out;
    std::vector<Index> kept = selected;
    while (!kept.empty()) {
        Matrix design(base.rows(), k + static_cast<Index>(kept.size()));
        design.leftCols(k) = base;
        for (std::size_t c = 0; c < kept.size(); ++c) {
            for (std::size_t r = 0; r < rows.size(); ++r) {
                design(r, k + c) = dv(rows[r], kept[c]) * h.values()(rows[r]);
            }
        }
        auto labels = labels_for(selected);
        auto inter = labels_for(kept, ":h");
        labels.insert(labels.end(), inter.begin(), inter.end());
        try {
            const auto full = ols_fit(design, y, labels);
            out.p_value = nested_anova(full, reduced, full.n).p_value;
            return out;
        } catch (const RankDeficientError& e) {
            if (e.column() < k) throw;
            const auto pos = static_cast<std::size_t>(e.column() - k);
            out.dropped_interactions.push_back(kept[pos]);
            kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(pos));
        }
    }
    out.p_value = 1.0;
    return out;
}

ResidualAnalysis residual_analysis(const Vector& dy, const Matrix& dv, const std::vector<Index>& selected,
                                   const HalfIndicator& h, const std::vector<FactorInfo>& factors,
                                   const Taxonomy& taxonomy, const GibsConfig& config) {
    require_selection(selected);
    if (h.size() != dy.size()) throw Error(ErrorCode::InvalidArgument, "half indicator length differs from dy");
    const Index mid = h.first_second_half_row();
    const Index len = dy.size() - mid;
    const auto rows = complete_rows(dy, dv, selected, mid);
    const Vector y = take(dy, rows);
    const auto first = ols_fit(take(dv, rows, selected), y, labels_for(selected));

    Vector resid = Vector::Constant(len, kNaN);
    for (std::size_t r = 0; r < rows.size(); ++r) resid(rows[r] - mid) = first.residuals(static_cast<Index>(r));

    const auto ctx = prepare_gibs(dv.middleRows(mid, len), factors, taxonomy, config, selected);
    const auto& cand = ctx.reduction.candidates;
    ResidualAnalysis out;
    if (!cand.empty()) {
        std::vector<Index> all_rows(static_cast<std::size_t>(len));
        for (Index t = 0; t < len; ++t) all_rows[t] = t;
        const auto sel = select_factors(resid, take(ctx.orth.transformed, all_rows, cand), config);
        for (Index k : sel.selected) out.second_half_set.push_back(cand[k]);
    }
    if (out.second_half_set.empty()) return out;

    out.union_set = selected;
    out.union_set.insert(out.union_set.end(), out.second_half_set.begin(), out.second_half_set.end());
    std::sort(out.union_set.begin(), out.union_set.end());
    // Candidates are complete over the second half, so the row set is unchanged.
    const auto full = ols_fit(take(dv, rows, out.union_set), y, labels_for(out.union_set));
    out.p_value = nested_anova(full, first, full.n).p_value;
    return out;
}

double spline_invariance_test(const Vector& dy, const Matrix& dv, const std::vector<Index>& selected, int basis_size,
                              const std::string& asset) {
    require_selection(selected);
    if (basis_size < 1) throw Error(ErrorCode::InvalidArgument, "basis size must be >= 1");
    if (basis_size == 1) return 1.0;
    const auto rows = complete_rows(dy, dv, selected);
    const auto k = static_cast<Index>(selected.size());
    const auto n = static_cast<Index>(rows.size());
    if (n < k * basis_size + 5) {
        throw Error(ErrorCode::TooFewObservations, "spline test needs n >= |S| * basis_size + 5");
    }
    Vector time(n);
    const double denom = std::max<Index>(dy.size() - 1, 1);
    for (Index r = 0; r < n; ++r) time(r) = static_cast<double>(rows[r]) / denom;
    const Matrix basis = bspline_basis(time, basis_size);

    const Vector y = take(dy, rows);
    const Matrix base = take(dv, rows, selected);
    const auto reduced = ols_fit(base, y, labels_for(selected));

    // The basis sums to one, so dropping its first function keeps the span
    // of the full expansion while nesting the constant model column-wise.
    Matrix design(n, k * basis_size);
    design.leftCols(k) = base;
    auto labels = labels_for(selected);
    for (int b = 1; b < basis_size; ++b) {
        for (Index j = 0; j < k; ++j) {
            design.col(k * b + j) = base.col(j).cwiseProduct(basis.col(b));
            labels.push_back("v" + std::to_string(selected[j]) + ":B" + std::to_string(b));
        }
    }
    try {
        const auto full = ols_fit(design, y, labels);
        return nested_anova(full, reduced, n).p_value;
    } catch (const RankDeficientError&) {
        throw Error(ErrorCode::ReduceBasis,
                    "spline design rank-deficient for " + (asset.empty() ? std::string("stock") : asset) +
                        " at basis size " + std::to_string(basis_size));
    }
}

double oos_evaluate(const SelectionResult& fit, const Vector& future_dy, const Matrix& future_dv) {
    const auto rows = complete_rows(future_dy, future_dv, fit.selected_set);
    if (rows.size() < 20) {
        throw Error(ErrorCode::MissingFuture, "only " + std::to_string(rows.size()) + " usable future rows");
    }
    const Vector actual = take(future_dy, rows);
    Vector pred = Vector::Zero(actual.size());
    if (!fit.selected_set.empty()) pred = take(future_dv, rows, fit.selected_set) * fit.fit.coefficients;
    return out_of_sample_r2(pred, actual, fit.train_mean);
}

}  // namespace amf
