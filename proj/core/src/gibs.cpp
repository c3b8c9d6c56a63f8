#include "amf/gibs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "amf/error.hpp"

namespace amf {

namespace {

std::vector<Index> complete_rows(const Vector& dy, const Matrix& dv, const std::vector<Index>& cols) {
    std::vector<Index> rows;
    for (Index t = 0; t < dy.size(); ++t) {
        if (!std::isfinite(dy(t))) continue;
        bool ok = true;
        for (Index j : cols) ok = ok && std::isfinite(dv(t, j));
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

std::vector<Index> prototypes_of(const Matrix& transformed, const std::vector<Index>& cols,
                                 const std::vector<FactorInfo>& factors, double threshold) {
    if (cols.size() < 2) return cols;
    Matrix series(transformed.rows(), static_cast<Index>(cols.size()));
    std::vector<std::string> names;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        series.col(static_cast<Index>(k)) = transformed.col(cols[k]);
        names.push_back(factors[cols[k]].id);
    }
    const auto tree = minimax_cluster(names, correlation_distance_matrix(series));
    const auto protos = cut_prototypes(tree, threshold);
    std::vector<Index> out;
    for (Index local : protos.members) out.push_back(cols[local]);
    std::sort(out.begin(), out.end());
    return out;
}

bool is_constant(const Eigen::Ref<const Vector>& col) {
    double lo = INFINITY, hi = -INFINITY;
    Index seen = 0;
    for (Index t = 0; t < col.size(); ++t) {
        if (!std::isfinite(col(t))) continue;
        lo = std::min(lo, col(t));
        hi = std::max(hi, col(t));
        ++seen;
    }
    return seen == 0 || hi - lo <= 1e-12 * std::max(std::abs(hi), std::abs(lo));
}

}  // namespace

OrthogonalizedPanel orthogonalize(const Matrix& dv) {
    if (dv.cols() < 2) throw Error(ErrorCode::MissingFactor, "orthogonalization needs the mma and market columns");
    const Index mk = FactorPanel::kMarket;
    const auto market = dv.col(mk);
    if (is_constant(market)) throw Error(ErrorCode::DegenerateMarket, "market column has zero variance");

    OrthogonalizedPanel out;
    out.transformed = dv;
    for (Index j = 2; j < dv.cols(); ++j) {
        double mm = 0.0, mv = 0.0, vv = 0.0;
        for (Index t = 0; t < dv.rows(); ++t) {
            if (std::isfinite(dv(t, j)) && std::isfinite(market(t))) {
                mm += market(t) * market(t);
                mv += market(t) * dv(t, j);
                vv += dv(t, j) * dv(t, j);
            }
        }
        if (mm <= 0.0) continue;
        const double coef = mv / mm;
        double rr = 0.0;
        for (Index t = 0; t < dv.rows(); ++t) {
            double& v = out.transformed(t, j);
            v = (std::isfinite(dv(t, j)) && std::isfinite(market(t))) ? dv(t, j) - coef * market(t) : kNaN;
            if (std::isfinite(v)) rr += v * v;
        }
        if (rr <= 1e-24 * vv) out.zero_columns.push_back(j);
    }
    return out;
}

GroupwiseReduction groupwise_reduce(const OrthogonalizedPanel& panel, const std::vector<FactorInfo>& factors,
                                    const std::vector<Index>& available, const Taxonomy& taxonomy,
                                    double threshold_within, double threshold_union, Grouping grouping) {
    GroupwiseReduction out;
    const std::set<Index> zero(panel.zero_columns.begin(), panel.zero_columns.end());
    std::map<std::string, std::vector<Index>> groups;
    std::vector<Index> bypass;
    for (Index j : available) {
        const auto& f = factors.at(static_cast<std::size_t>(j));
        if (zero.count(j)) {
            out.warnings.push_back(f.id + " vanishes after orthogonalization to the market; dropped");
            continue;
        }
        if (f.role != FactorRole::Etf) {
            bypass.push_back(j);
            continue;
        }
        if (!f.category) throw Error(ErrorCode::Validation, "ETF " + f.id + " has no category");
        groups[grouping == Grouping::Class ? f.category->cls : f.category->subclass].push_back(j);
    }

    // Walk groups in taxonomy order so results do not depend on label spelling.
    std::vector<std::string> order;
    if (grouping == Grouping::Class) {
        order = taxonomy.classes();
    } else {
        for (const auto& [sub, cls] : taxonomy.subclasses()) order.push_back(sub);
    }
    for (const auto& [label, cols] : groups) {
        if (std::find(order.begin(), order.end(), label) == order.end()) order.push_back(label);
    }
    std::vector<std::string> empty;
    for (const auto& label : order) {
        auto it = groups.find(label);
        if (it == groups.end()) {
            empty.push_back(label);
            continue;
        }
        out.groups.push_back(label);
        out.group_prototypes.push_back(prototypes_of(panel.transformed, it->second, factors, threshold_within));
        const auto& d = out.group_prototypes.back();
        out.union_prototypes.insert(out.union_prototypes.end(), d.begin(), d.end());
    }
    if (!empty.empty() && !groups.empty()) {
        std::string msg = std::to_string(empty.size()) + " empty categories skipped";
        out.warnings.push_back(msg);
    }
    std::sort(out.union_prototypes.begin(), out.union_prototypes.end());
    out.etf_prototypes = prototypes_of(panel.transformed, out.union_prototypes, factors, threshold_union);

    out.candidates = bypass;
    out.candidates.insert(out.candidates.end(), out.etf_prototypes.begin(), out.etf_prototypes.end());
    std::sort(out.candidates.begin(), out.candidates.end());
    return out;
}

FactorSelection select_factors(const Vector& dy, const Matrix& candidates, const GibsConfig& config) {
    if (dy.size() != candidates.rows()) throw Error(ErrorCode::InvalidArgument, "response and candidates differ in length");
    std::vector<Index> all(static_cast<std::size_t>(candidates.cols()));
    for (Index j = 0; j < candidates.cols(); ++j) all[j] = j;
    const auto rows = complete_rows(dy, candidates, all);
    const auto k = candidates.cols();
    if (static_cast<Index>(rows.size()) < 3 * k || rows.size() < 3) {
        throw Error(ErrorCode::TooFewObservations, std::to_string(rows.size()) + " complete rows for " +
                                                       std::to_string(k) + " candidates");
    }
    FactorSelection sel;
    sel.rows_used = static_cast<Index>(rows.size());
    if (k == 0) return sel;
    const auto path = cv_path(take(candidates, rows, all), take(dy, rows), config.n_folds, config.grid_size, config.lasso);
    sel.choice = choose_lambda(path, config.support_cap);
    sel.selected = sel.choice.support;
    return sel;
}

SelectionResult refit_ols(const Vector& dy, const Matrix& dv, const std::vector<Index>& selected,
                          const std::vector<FactorInfo>& factors, double significance) {
    if (selected.empty()) throw Error(ErrorCode::InvalidArgument, "selected set is empty");
    SelectionResult res;
    res.selected_set = selected;
    std::sort(res.selected_set.begin(), res.selected_set.end());
    res.rows = complete_rows(dy, dv, res.selected_set);
    std::vector<std::string> labels;
    for (Index j : res.selected_set) labels.push_back(factors.at(static_cast<std::size_t>(j)).id);
    const Vector y = take(dy, res.rows);
    try {
        res.fit = ols_fit(take(dv, res.rows, res.selected_set), y, labels);
    } catch (const RankDeficientError& e) {
        const Index j = res.selected_set.at(static_cast<std::size_t>(e.column()));
        throw RankDeficientError(j, "factor " + factors.at(static_cast<std::size_t>(j)).id +
                                        " is collinear with the other selected factors");
    }
    res.train_mean = y.mean();
    for (std::size_t k = 0; k < res.selected_set.size(); ++k) {
        if (res.fit.p_values(static_cast<Index>(k)) < significance) res.significant_set.push_back(res.selected_set[k]);
    }
    return res;
}

std::vector<Index> ff5_factor_set(const std::vector<FactorInfo>& factors) {
    std::vector<Index> set;
    for (FactorRole role : {FactorRole::Mma, FactorRole::Market}) {
        for (std::size_t j = 0; j < factors.size(); ++j) {
            if (factors[j].role == role) set.push_back(static_cast<Index>(j));
        }
    }
    std::size_t ff5 = 0;
    for (std::size_t j = 0; j < factors.size(); ++j) {
        if (factors[j].role == FactorRole::Ff5) {
            set.push_back(static_cast<Index>(j));
            ++ff5;
        }
    }
    if (set.size() - ff5 != 2 || ff5 != 4) {
        throw Error(ErrorCode::MissingFactor, "baseline needs mma, market and four ff5 factors; found " +
                                                  std::to_string(ff5) + " ff5 factors");
    }
    std::sort(set.begin(), set.end());
    return set;
}

SelectionResult ff5_baseline(const Vector& dy, const Matrix& dv, const std::vector<FactorInfo>& factors,
                             double significance) {
    auto res = refit_ols(dy, dv, ff5_factor_set(factors), factors, significance);
    res.baseline = true;
    return res;
}

GibsContext prepare_gibs(const Matrix& dv, const std::vector<FactorInfo>& factors, const Taxonomy& taxonomy,
                         const GibsConfig& config, const std::vector<Index>& exclude) {
    if (static_cast<Index>(factors.size()) != dv.cols()) {
        throw Error(ErrorCode::InvalidArgument, "factor metadata does not match difference columns");
    }
    GibsContext ctx;
    ctx.dv = dv;
    ctx.factors = factors;
    ctx.orth = orthogonalize(dv);
    const std::set<Index> skip(exclude.begin(), exclude.end());
    std::vector<std::string> warnings;
    for (Index j = 0; j < dv.cols(); ++j) {
        if (skip.count(j) || !dv.col(j).allFinite()) continue;
        if (is_constant(dv.col(j))) {
            warnings.push_back(factors[j].id + " is constant over the block; dropped from candidates");
            continue;
        }
        ctx.available.push_back(j);
    }
    ctx.reduction = groupwise_reduce(ctx.orth, factors, ctx.available, taxonomy, config.threshold_within,
                                     config.threshold_union, config.grouping);
    ctx.reduction.warnings.insert(ctx.reduction.warnings.begin(), warnings.begin(), warnings.end());
    return ctx;
}

SelectionResult run_gibs(const GibsContext& context, const Vector& dy, const GibsConfig& config) {
    const auto& cand = context.reduction.candidates;
    std::vector<Index> all_rows(static_cast<std::size_t>(dy.size()));
    for (Index t = 0; t < dy.size(); ++t) all_rows[t] = t;
    const auto sel = select_factors(dy, take(context.orth.transformed, all_rows, cand), config);
    std::vector<Index> chosen;
    for (Index k : sel.selected) chosen.push_back(cand[k]);
    if (chosen.empty()) {
        SelectionResult empty;
        for (Index t = 0; t < dy.size(); ++t) {
            if (std::isfinite(dy(t))) empty.rows.push_back(t);
        }
        return empty;
    }
    return refit_ols(dy, context.dv, chosen, context.factors, config.significance);
}

void check_selection_chain(const SelectionResult& r) {
    const std::set<Index> s(r.selected_set.begin(), r.selected_set.end());
    std::set<Index> support;
    for (std::size_t k = 0; k < r.selected_set.size(); ++k) {
        if (r.fit.coefficients.size() > static_cast<Index>(k) && r.fit.coefficients(static_cast<Index>(k)) != 0.0) {
            support.insert(r.selected_set[k]);
        }
    }
    for (Index j : r.significant_set) {
        if (!support.count(j)) throw Error(ErrorCode::InvalidArgument, "significant factor outside the fitted support");
    }
    for (Index j : support) {
        if (!s.count(j)) throw Error(ErrorCode::InvalidArgument, "fitted support outside the selected set");
    }
}

}  // namespace amf
