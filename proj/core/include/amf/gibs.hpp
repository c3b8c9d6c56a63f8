#pragma once

#include <string>
#include <vector>

#include "amf/cluster.hpp"
#include "amf/lasso.hpp"
#include "amf/panel.hpp"
#include "amf/stats.hpp"

namespace amf {

/// How ETFs are grouped before the within-group clustering stage.
enum class Grouping { Class, Subclass };

struct GibsConfig {
    double threshold_within = 0.5;  // correlation-distance cut inside each group
    double threshold_union = 0.5;   // cut on the union of group prototypes
    int support_cap = 20;
    int n_folds = 10;
    int grid_size = 100;
    double significance = 0.05;
    Grouping grouping = Grouping::Class;
    LassoOptions lasso;
};

/// Differenced basis assets with every column except the money market
/// account (0) and the market (1) replaced by its residual on the market.
struct OrthogonalizedPanel {
    Matrix transformed;
    Index projection_target = FactorPanel::kMarket;
    std::vector<Index> zero_columns;  // columns annihilated by the projection
};

/// (I - P_m) dv_j for j >= 2, with P_m the projection on the market column.
/// Rows where a column is NaN stay NaN; the projection coefficient uses the
/// rows where both the column and the market are present.
/// Throws DegenerateMarket when the market column has zero variance.
OrthogonalizedPanel orthogonalize(const Matrix& dv);

struct GroupwiseReduction {
    std::vector<std::string> groups;             // group labels with at least one ETF
    std::vector<std::vector<Index>> group_prototypes;  // D_i, global column indices
    std::vector<Index> union_prototypes;         // D
    std::vector<Index> etf_prototypes;           // U, subset of D
    std::vector<Index> candidates;               // bypass factors followed by U, ascending
    std::vector<std::string> warnings;
};

/// Prototype reduction of the ETF columns in `available`: minimax clustering
/// inside each taxonomy group, then again on the union of the group
/// prototypes. Non-ETF columns in `available` bypass clustering and are
/// always candidates.
GroupwiseReduction groupwise_reduce(const OrthogonalizedPanel& panel, const std::vector<FactorInfo>& factors,
                                    const std::vector<Index>& available, const Taxonomy& taxonomy,
                                    double threshold_within, double threshold_union,
                                    Grouping grouping = Grouping::Class);

struct FactorSelection {
    std::vector<Index> selected;  // positions into the candidate columns
    ModifiedLambdaChoice choice;
    Index rows_used = 0;
};

/// Modified-lambda LASSO on the candidate columns over the complete-case rows.
/// Throws TooFewObservations when fewer than 3 rows per candidate remain.
FactorSelection select_factors(const Vector& dy, const Matrix& candidates, const GibsConfig& config);

/// Per-stock output of the pipeline.
struct SelectionResult {
    std::string asset;
    Window window;
    std::vector<Index> selected_set;     // S_i, global factor indices, ascending
    std::vector<Index> significant_set;  // S_i*, subset of selected_set
    FitSummary fit;                      // OLS of dy on the original selected columns
    std::vector<Index> rows;             // complete-case difference rows used
    double train_mean = 0.0;             // mean of dy over those rows
    bool baseline = false;               // fixed-factor (FF5) model
};

/// OLS on the original (non-orthogonalized) differenced columns in `selected`
/// over the complete-case rows; significant = p-value below `significance`.
/// Throws InvalidArgument for an empty selection and RankDeficientError
/// naming the offending factor.
SelectionResult refit_ols(const Vector& dy, const Matrix& dv, const std::vector<Index>& selected,
                          const std::vector<FactorInfo>& factors, double significance = 0.05);

/// The fixed baseline set {mma, market, four ff5 factors}; throws
/// MissingFactor when any is absent.
std::vector<Index> ff5_factor_set(const std::vector<FactorInfo>& factors);

/// Baseline fit with the selection stage replaced by ff5_factor_set.
SelectionResult ff5_baseline(const Vector& dy, const Matrix& dv, const std::vector<FactorInfo>& factors,
                             double significance = 0.05);

/// Stock-independent stages (orthogonalization and groupwise reduction) for
/// one block of difference rows.
struct GibsContext {
    Matrix dv;                        // differences of all factors, NaN where missing
    OrthogonalizedPanel orth;
    std::vector<Index> available;     // columns complete over the block and non-degenerate
    GroupwiseReduction reduction;
    std::vector<FactorInfo> factors;
};

/// Builds the context from factor differences. `exclude` removes columns
/// before reduction (used when re-running the pipeline on residuals).
GibsContext prepare_gibs(const Matrix& dv, const std::vector<FactorInfo>& factors, const Taxonomy& taxonomy,
                         const GibsConfig& config, const std::vector<Index>& exclude = {});

/// Stages 5 and 6 for one stock: selection on the orthogonalized candidates,
/// then the OLS refit on the original columns. An empty selection yields a
/// result with an empty selected_set and no fit.
SelectionResult run_gibs(const GibsContext& context, const Vector& dy, const GibsConfig& config);

/// Checks S* within supp(beta) within S; throws InvalidArgument otherwise.
void check_selection_chain(const SelectionResult& result);

}  // namespace amf
