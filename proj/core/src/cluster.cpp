#include "amf/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "amf/error.hpp"

namespace amf {

double correlation_distance(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "series lengths differ");
    Index m = 0;
    double sa = 0.0, sb = 0.0;
    for (Index t = 0; t < a.size(); ++t) {
        if (std::isfinite(a(t)) && std::isfinite(b(t))) {
            ++m;
            sa += a(t);
            sb += b(t);
        }
    }
    if (m < 3) throw Error(ErrorCode::InsufficientOverlap, "fewer than 3 common observations");
    const double ma = sa / static_cast<double>(m), mb = sb / static_cast<double>(m);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (Index t = 0; t < a.size(); ++t) {
        if (std::isfinite(a(t)) && std::isfinite(b(t))) {
            const double da = a(t) - ma, db = b(t) - mb;
            saa += da * da;
            sbb += db * db;
            sab += da * db;
        }
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) throw Error(ErrorCode::DegenerateSeries, "series has zero variance");
    const double corr = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
    return 1.0 - std::abs(corr);
}

Matrix correlation_distance_matrix(const Matrix& series) {
    const Index p = series.cols();
    Matrix d = Matrix::Zero(p, p);
    for (Index i = 0; i < p; ++i) {
        for (Index j = i + 1; j < p; ++j) {
            double v;
            try {
                v = correlation_distance(series.col(i), series.col(j));
            } catch (const Error& e) {
                if (e.code() != ErrorCode::InsufficientOverlap) throw;
                v = 1.0;
            }
            d(i, j) = d(j, i) = v;
        }
    }
    return d;
}

std::vector<Index> Dendrogram::members(Index cluster) const {
    const auto n = static_cast<Index>(leaves.size());
    if (cluster < n) return {cluster};
    const Merge& m = merges.at(static_cast<std::size_t>(cluster - n));
    auto a = members(m.cluster_a);
    auto b = members(m.cluster_b);
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    return a;
}

namespace {

void check_distance(const Matrix& d) {
    if (d.rows() != d.cols()) throw Error(ErrorCode::InvalidDistance, "distance matrix must be square");
    for (Index i = 0; i < d.rows(); ++i) {
        if (d(i, i) != 0.0) throw Error(ErrorCode::InvalidDistance, "distance matrix diagonal must be zero");
        for (Index j = 0; j < d.cols(); ++j) {
            const double v = d(i, j);
            if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::InvalidDistance, "distance outside [0, 1]");
            if (v != d(j, i)) throw Error(ErrorCode::InvalidDistance, "distance matrix is not symmetric");
        }
    }
}

struct Cluster {
    std::vector<Index> members;  // ascending leaf indices
    Index id = 0;
    Index key = 0;  // lowest leaf, used for tie-breaking
};

}  // namespace

Dendrogram minimax_cluster(const std::vector<std::string>& leaves, const Matrix& distance) {
    check_distance(distance);
    const auto n = static_cast<Index>(leaves.size());
    if (distance.rows() != n) throw Error(ErrorCode::InvalidDistance, "distance matrix size does not match leaves");

    Dendrogram out;
    out.leaves = leaves;
    if (n < 2) return out;

    // dmax(x, slot) = max distance from leaf x to the cluster in that slot.
    std::vector<Cluster> slots(static_cast<std::size_t>(n));
    Matrix dmax = distance;  // column = slot
    for (Index i = 0; i < n; ++i) slots[i] = {{i}, i, i};
    std::vector<char> alive(static_cast<std::size_t>(n), 1);

    // r(G u H) and its prototype; prototype ties go to the lowest leaf.
    auto linkage = [&](Index g, Index h) {
        double best = std::numeric_limits<double>::infinity();
        Index proto = std::numeric_limits<Index>::max();
        auto scan = [&](const std::vector<Index>& mem) {
            for (Index x : mem) {
                const double r = std::max(dmax(x, g), dmax(x, h));
                if (r < best || (r == best && x < proto)) {
                    best = r;
                    proto = x;
                }
            }
        };
        scan(slots[g].members);
        scan(slots[h].members);
        return std::pair{best, proto};
    };

    // Cached pairwise linkages, upper triangle by slot.
    Matrix link = Matrix::Constant(n, n, std::numeric_limits<double>::infinity());
    Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> proto(n, n);
    for (Index g = 0; g < n; ++g) {
        for (Index h = g + 1; h < n; ++h) {
            auto [r, x] = linkage(g, h);
            link(g, h) = r;
            proto(g, h) = x;
        }
    }

    for (Index step = 0; step < n - 1; ++step) {
        Index bg = -1, bh = -1;
        std::tuple<double, Index, Index> best{std::numeric_limits<double>::infinity(), 0, 0};
        for (Index g = 0; g < n; ++g) {
            if (!alive[g]) continue;
            for (Index h = g + 1; h < n; ++h) {
                if (!alive[h]) continue;
                const Index k1 = std::min(slots[g].key, slots[h].key);
                const Index k2 = std::max(slots[g].key, slots[h].key);
                const std::tuple<double, Index, Index> cand{link(g, h), k1, k2};
                if (bg < 0 || cand < best) {
                    best = cand;
                    bg = g;
                    bh = h;
                }
            }
        }

        Merge m;
        m.cluster_a = slots[bg].key <= slots[bh].key ? slots[bg].id : slots[bh].id;
        m.cluster_b = slots[bg].key <= slots[bh].key ? slots[bh].id : slots[bg].id;
        m.height = link(bg, bh);
        m.prototype = proto(bg, bh);
        out.merges.push_back(m);

        // Merge bh into bg.
        auto& into = slots[bg];
        into.members.insert(into.members.end(), slots[bh].members.begin(), slots[bh].members.end());
        std::sort(into.members.begin(), into.members.end());
        into.id = n + step;
        into.key = into.members.front();
        alive[bh] = 0;
        dmax.col(bg) = dmax.col(bg).cwiseMax(dmax.col(bh));

        for (Index o = 0; o < n; ++o) {
            if (!alive[o] || o == bg) continue;
            const Index g = std::min(o, bg), h = std::max(o, bg);
            auto [r, x] = linkage(g, h);
            link(g, h) = r;
            proto(g, h) = x;
        }
    }
    return out;
}

PrototypeSet cut_prototypes(const Dendrogram& dendrogram, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw Error(ErrorCode::InvalidArgument, "threshold must lie in (0, 1)");
    const auto n = static_cast<Index>(dendrogram.leaves.size());
    PrototypeSet out;
    out.threshold = threshold;
    out.assignment.resize(static_cast<std::size_t>(n));

    // Union-find over leaves; each root remembers its current prototype.
    std::vector<Index> parent(static_cast<std::size_t>(n)), proto(static_cast<std::size_t>(n));
    std::vector<Index> rep_of_cluster(static_cast<std::size_t>(n + dendrogram.merges.size()));
    for (Index i = 0; i < n; ++i) parent[i] = proto[i] = rep_of_cluster[i] = i;
    auto find = [&](Index x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t k = 0; k < dendrogram.merges.size(); ++k) {
        const Merge& m = dendrogram.merges[k];
        const Index id = n + static_cast<Index>(k);
        if (m.height > threshold) {
            rep_of_cluster[id] = -1;
            continue;
        }
        const Index ra = find(rep_of_cluster[m.cluster_a]);
        const Index rb = find(rep_of_cluster[m.cluster_b]);
        parent[rb] = ra;
        proto[ra] = m.prototype;
        rep_of_cluster[id] = ra;
    }
    for (Index i = 0; i < n; ++i) out.assignment[i] = proto[find(i)];
    out.members = out.assignment;
    std::sort(out.members.begin(), out.members.end());
    out.members.erase(std::unique(out.members.begin(), out.members.end()), out.members.end());
    return out;
}

}  // namespace amf
