#include <gtest/gtest.h>

#include <random>
#include <set>

#include "amf/cluster.hpp"
#include "amf/error.hpp"
#include "oracles.hpp"

using namespace amf;

namespace {

std::vector<std::string> names(Index n) {
    std::vector<std::string> out;
    for (Index i = 0; i < n; ++i) out.push_back("x" + std::to_string(i));
    return out;
}

}  // namespace

TEST(CorrelationDistance, Basics) {
    Vector a(5), b(5);
    a << 1, 2, 3, 4, 5;
    b = -2.0 * a;
    EXPECT_NEAR(correlation_distance(a, b), 0.0, 1e-15);
    b << 1, -1, 1, -1, 0;
    EXPECT_GT(correlation_distance(a, b), 0.5);
    b.setConstant(1.0);
    EXPECT_THROW(correlation_distance(a, b), Error);
    Vector c = a;
    c(0) = c(1) = c(2) = kNaN;
    EXPECT_THROW(correlation_distance(a, c), Error);
    Matrix s(5, 2);
    s.col(0) = a;
    s.col(1) = c;
    EXPECT_EQ(correlation_distance_matrix(s)(0, 1), 1.0);
}

TEST(Minimax, ExhaustiveOnRandomMatrices) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> dn(2, 14);
    for (int rep = 0; rep < 60; ++rep) {
        const Index n = dn(rng);
        const Matrix d = oracles::random_distance(rng, n, rep % 3 == 0);
        const auto tree = minimax_cluster(names(n), d);
        ASSERT_EQ(static_cast<Index>(tree.merges.size()), n - 1);
        ASSERT_EQ(oracles::minimax_violations(d, tree), 0) << "rep " << rep;
    }
}

TEST(Minimax, TiesBreakTowardLowestLeaf) {
    Matrix d = Matrix::Constant(4, 4, 0.5);
    d.diagonal().setZero();
    const auto tree = minimax_cluster(names(4), d);
    EXPECT_EQ(tree.merges[0].cluster_a, 0);
    EXPECT_EQ(tree.merges[0].cluster_b, 1);
    for (const auto& m : tree.merges) EXPECT_EQ(m.prototype, tree.members(m.cluster_a).front());
    EXPECT_EQ(tree.members(6), (std::vector<Index>{0, 1, 2, 3}));
}

TEST(Minimax, RejectsBadMatrices) {
    Matrix d = Matrix::Zero(3, 3);
    d(0, 1) = 0.3;
    EXPECT_THROW(minimax_cluster(names(3), d), Error);  // asymmetric
    d(1, 0) = 0.3;
    d(1, 2) = d(2, 1) = 1.5;
    EXPECT_THROW(minimax_cluster(names(3), d), Error);  // outside [0, 1]
    d(1, 2) = d(2, 1) = 0.2;
    d(2, 2) = 0.1;
    EXPECT_THROW(minimax_cluster(names(3), d), Error);  // diagonal
    EXPECT_THROW(minimax_cluster(names(2), Matrix::Zero(2, 3)), Error);
}

TEST(Prototypes, CutIsConsistent) {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 30; ++rep) {
        const Index n = 12;
        const Matrix d = oracles::random_distance(rng, n);
        const auto tree = minimax_cluster(names(n), d);
        const auto protos = cut_prototypes(tree, 0.5);
        std::set<Index> distinct(protos.assignment.begin(), protos.assignment.end());
        EXPECT_EQ(distinct, std::set<Index>(protos.members.begin(), protos.members.end()));
        // every leaf lies within the threshold of its prototype
        for (Index i = 0; i < n; ++i) EXPECT_LE(d(i, protos.assignment[i]), 0.5 + 1e-12);
        EXPECT_TRUE(std::is_sorted(protos.members.begin(), protos.members.end()));
    }
}

TEST(Prototypes, DuplicatesCollapseAndUncorrelatedStay) {
    Matrix d = Matrix::Constant(4, 4, 0.9);
    d.diagonal().setZero();
    d(0, 1) = d(1, 0) = 0.0;
    d(2, 3) = d(3, 2) = 0.05;
    const auto p = cut_prototypes(minimax_cluster(names(4), d), 0.5);
    EXPECT_EQ(p.members, (std::vector<Index>{0, 2}));
    Matrix far = Matrix::Constant(3, 3, 1.0);
    far.diagonal().setZero();
    EXPECT_EQ(cut_prototypes(minimax_cluster(names(3), far), 0.5).members.size(), 3u);
    EXPECT_THROW(cut_prototypes(minimax_cluster(names(3), far), 1.0), Error);
    EXPECT_THROW(cut_prototypes(minimax_cluster(names(3), far), 0.0), Error);
}
