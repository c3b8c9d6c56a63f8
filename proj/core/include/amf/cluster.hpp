#pragma once

#include <string>
#include <vector>

#include "amf/types.hpp"

namespace amf {

/// 1 - |corr(a, b)| over the rows where both series are finite.
/// Throws InsufficientOverlap below 3 common rows and DegenerateSeries when
/// either series has zero variance there.
double correlation_distance(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

/// Pairwise correlation distances between the columns of `series`. Pairs
/// without enough overlap are assigned distance 1.
Matrix correlation_distance_matrix(const Matrix& series);

/// One agglomeration step. Leaves are clusters 0..n-1; merge k creates
/// cluster n + k.
struct Merge {
    Index cluster_a = 0;
    Index cluster_b = 0;
    double height = 0.0;     // minimax radius of the merged cluster
    Index prototype = 0;     // leaf attaining that radius
};

struct Dendrogram {
    std::vector<std::string> leaves;
    std::vector<Merge> merges;

    /// Leaves of cluster id (leaf or merge node), ascending.
    std::vector<Index> members(Index cluster) const;
};

/// Hierarchical clustering with minimax linkage d(G, H) = r(G u H), where
/// r(C) = min_{x in C} max_{x' in C} d(x, x'). Ties in merge order and in
/// prototype choice break toward the lowest leaf index.
/// Throws InvalidDistance unless the matrix is square, symmetric, has a
/// zero diagonal and entries in [0, 1].
Dendrogram minimax_cluster(const std::vector<std::string>& leaves, const Matrix& distance);

struct PrototypeSet {
    std::vector<Index> members;     // prototype leaves, ascending
    double threshold = 0.0;
    std::vector<Index> assignment;  // leaf -> its prototype leaf
};

/// Cuts every merge higher than threshold and returns one prototype per
/// remaining cluster. Throws InvalidArgument unless 0 < threshold < 1.
PrototypeSet cut_prototypes(const Dendrogram& dendrogram, double threshold);

}  // namespace amf
