// Hierarchical density-based clustering over (x, y, z). The pipeline is the
// standard one: per-point core distances, exact minimum spanning tree of the
// mutual-reachability graph, single-linkage dendrogram, condensed tree at
// min_cluster_size, and cluster extraction by maximum stability (excess of
// mass). Every tie-break is fixed, so output is identical across runs.

#ifndef DMNR_HDBSCAN_HPP
#define DMNR_HDBSCAN_HPP

#include <algorithm>
#include <barrier>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include "dmnr/errors.hpp"
#include "dmnr/kdtree.hpp"
#include "dmnr/types.hpp"

namespace dmnr {

struct HdbscanParams {
    int min_cluster_size = 50;
    int min_samples = 10;
};

// Per-point cluster id; -1 marks unclustered noise. Ids are compact:
// 0..cluster_count-1, each covering at least min_cluster_size points.
struct ClusterLabeling {
    std::vector<std::int32_t> labels;
    std::int32_t cluster_count = 0;
};

// Distance from each point to its min_samples-th nearest other point.
inline std::vector<double> core_distances(const KdTree& index,
                                          int min_samples) {
    if (min_samples < 1) {
        throw Error("core_distances: min_samples must be >= 1");
    }
    if (index.size() <= static_cast<std::size_t>(min_samples)) {
        throw EmptyNeighborhoodError(
            "core_distances: need more than min_samples points");
    }
    std::vector<double> core(index.size());
    for (std::size_t n = 0; n < index.size(); ++n) {
        core[n] = index.knn(n, static_cast<std::size_t>(min_samples)).back().distance;
    }
    return core;
}

struct MstEdge {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double weight = 0.0;  // mutual reachability distance
};

namespace detail {

struct MstScratch {
    std::vector<double> xs, ys, zs;
    std::vector<double> best;
    std::vector<std::uint32_t> from;
};

// Prim over the shrinking not-in-tree list. O(N^2) total.
inline std::vector<MstEdge> mst_sequential(MstScratch& s,
                                           const std::vector<double>& core) {
    const std::size_t n = s.xs.size();
    std::vector<std::uint32_t> remaining(n - 1);
    for (std::size_t i = 1; i < n; ++i) remaining[i - 1] = static_cast<std::uint32_t>(i);

    std::vector<MstEdge> edges;
    edges.reserve(n - 1);

    std::uint32_t current = 0;
    while (!remaining.empty()) {
        const double cx = s.xs[current];
        const double cy = s.ys[current];
        const double cz = s.zs[current];
        const double ccore = core[current];

        std::size_t pick = 0;
        for (std::size_t r = 0; r < remaining.size(); ++r) {
            const std::uint32_t j = remaining[r];
            const double dx = s.xs[j] - cx;
            const double dy = s.ys[j] - cy;
            const double dz = s.zs[j] - cz;
            double w = std::sqrt(dx * dx + dy * dy + dz * dz);
            w = std::max(w, std::max(ccore, core[j]));
            if (w < s.best[j]) {
                s.best[j] = w;
                s.from[j] = current;
            }
            const std::uint32_t p = remaining[pick];
            if (s.best[j] < s.best[p] || (s.best[j] == s.best[p] && j < p)) {
                pick = r;
            }
        }
        const std::uint32_t next = remaining[pick];
        edges.push_back(MstEdge{s.from[next], next, s.best[next]});
        remaining[pick] = remaining.back();
        remaining.pop_back();
        current = next;
    }
    return edges;
}

// Same algorithm with the per-iteration scan split across threads. Each
// thread owns a private shrinking list of not-yet-connected vertices and
// compacts it lazily when it encounters one the coordinator connected. The
// candidate reduction orders by (distance, index), so the chosen vertex --
// and therefore every edge -- is bitwise identical to the sequential path
// regardless of thread count or scheduling.
inline std::vector<MstEdge> mst_parallel(MstScratch& s,
                                         const std::vector<double>& core,
                                         std::size_t n_threads) {
    const std::size_t n = s.xs.size();
    std::vector<char> in_tree(n, 0);
    in_tree[0] = 1;

    std::vector<MstEdge> edges;
    edges.reserve(n - 1);

    struct Candidate {
        double w = std::numeric_limits<double>::infinity();
        std::uint32_t j = 0;
    };
    std::vector<Candidate> locals(n_threads);
    std::uint32_t current = 0;
    std::barrier sync(static_cast<std::ptrdiff_t>(n_threads));

    const auto worker = [&](std::size_t t) {
        const std::size_t chunk = (n + n_threads - 1) / n_threads;
        const std::size_t lo = std::min(n, t * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        std::vector<std::uint32_t> mine;
        mine.reserve(hi - lo);
        for (std::size_t j = lo; j < hi; ++j) {
            if (!in_tree[j]) mine.push_back(static_cast<std::uint32_t>(j));
        }
        for (std::size_t step = 0; step + 1 < n; ++step) {
            const double cx = s.xs[current];
            const double cy = s.ys[current];
            const double cz = s.zs[current];
            const double ccore = core[current];
            Candidate local;
            for (std::size_t r = 0; r < mine.size();) {
                const std::uint32_t j = mine[r];
                if (in_tree[j]) {
                    mine[r] = mine.back();
                    mine.pop_back();
                    continue;
                }
                const double dx = s.xs[j] - cx;
                const double dy = s.ys[j] - cy;
                const double dz = s.zs[j] - cz;
                double w = std::sqrt(dx * dx + dy * dy + dz * dz);
                w = std::max(w, std::max(ccore, core[j]));
                if (w < s.best[j]) {
                    s.best[j] = w;
                    s.from[j] = current;
                }
                if (s.best[j] < local.w || (s.best[j] == local.w && j < local.j)) {
                    local.w = s.best[j];
                    local.j = j;
                }
                ++r;
            }
            locals[t] = local;
            sync.arrive_and_wait();
            if (t == 0) {
                Candidate winner = locals[0];
                for (std::size_t o = 1; o < n_threads; ++o) {
                    if (locals[o].w < winner.w ||
                        (locals[o].w == winner.w && locals[o].j < winner.j)) {
                        winner = locals[o];
                    }
                }
                edges.push_back(MstEdge{s.from[winner.j], winner.j, winner.w});
                in_tree[winner.j] = 1;
                current = winner.j;
            }
            sync.arrive_and_wait();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(n_threads - 1);
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker, t);
    worker(0);
    for (auto& th : pool) th.join();
    return edges;
}

}  // namespace detail

// Exact MST of the complete mutual-reachability graph
// mr(a,b) = max(core(a), core(b), dist(a,b)), via Prim in O(N^2). Large
// frames scan in parallel; tie-breaks (vertex choice by smallest index) are
// fixed, so the edge list does not depend on the thread count.
// max_threads = 0 picks the hardware concurrency.
inline std::vector<MstEdge> mutual_reachability_mst(
    const PointCloud& cloud, const std::vector<double>& core,
    std::size_t max_threads = 0) {
    const std::size_t n = cloud.size();
    if (core.size() != n) {
        throw LengthMismatchError("mst: core distances do not cover the cloud");
    }
    if (n < 2) {
        throw EmptyNeighborhoodError("mst: need at least 2 points");
    }

    detail::MstScratch s;
    s.xs.resize(n);
    s.ys.resize(n);
    s.zs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.xs[i] = cloud.points[i].x;
        s.ys[i] = cloud.points[i].y;
        s.zs[i] = cloud.points[i].z;
    }
    s.best.assign(n, std::numeric_limits<double>::infinity());
    s.from.assign(n, 0);

    // The per-iteration barrier costs real time; below 4 threads the
    // sequential shrinking-list scan wins.
    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t n_threads =
        std::min<std::size_t>(max_threads == 0 ? hw : max_threads, 16);
    if (n >= 8192 && n_threads >= 4) {
        return detail::mst_parallel(s, core, n_threads);
    }
    return detail::mst_sequential(s, core);
}

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Single-linkage dendrogram built from sorted MST edges. Leaves are point
// ids 0..N-1; internal node t (id N+t) merges children[t] at height[t].
struct Dendrogram {
    std::vector<std::uint32_t> left, right;  // child node ids
    std::vector<double> height;              // merge distance
    std::vector<std::uint32_t> size;         // leaf count under node N+t
    std::size_t n_points = 0;

    std::size_t node_size(std::uint32_t node) const {
        return node < n_points ? 1 : size[node - n_points];
    }
};

class UnionFind {
  public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
    }
    std::uint32_t find(std::uint32_t x) {
        std::uint32_t root = x;
        while (parent_[root] != root) root = parent_[root];
        while (parent_[x] != root) {
            const std::uint32_t next = parent_[x];
            parent_[x] = root;
            x = next;
        }
        return root;
    }
    void merge_into(std::uint32_t child_root, std::uint32_t new_root) {
        parent_[child_root] = new_root;
    }

  private:
    std::vector<std::uint32_t> parent_;
};

inline Dendrogram single_linkage(std::vector<MstEdge> edges, std::size_t n) {
    for (MstEdge& e : edges) {
        if (e.a > e.b) std::swap(e.a, e.b);
    }
    std::sort(edges.begin(), edges.end(), [](const MstEdge& x, const MstEdge& y) {
        if (x.weight != y.weight) return x.weight < y.weight;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });

    Dendrogram d;
    d.n_points = n;
    d.left.reserve(n - 1);
    d.right.reserve(n - 1);
    d.height.reserve(n - 1);
    d.size.reserve(n - 1);

    // union-find ids double as dendrogram node ids: merging two component
    // roots re-roots both at the freshly created internal node
    UnionFind uf(2 * n - 1);
    std::uint32_t next_node = static_cast<std::uint32_t>(n);
    for (const MstEdge& e : edges) {
        const std::uint32_t ra = uf.find(e.a);
        const std::uint32_t rb = uf.find(e.b);
        const std::uint32_t ca = std::min(ra, rb);
        const std::uint32_t cb = std::max(ra, rb);
        d.left.push_back(ca);
        d.right.push_back(cb);
        d.height.push_back(e.weight);
        d.size.push_back(static_cast<std::uint32_t>(d.node_size(ca) + d.node_size(cb)));
        uf.merge_into(ra, next_node);
        uf.merge_into(rb, next_node);
        ++next_node;
    }
    return d;
}

// Condensed tree: clusters plus, per point, the cluster it fell from and the
// lambda (= 1/distance) at which it fell.
struct CondensedTree {
    struct Cluster {
        std::int32_t parent = -1;
        double birth_lambda = 0.0;
        std::vector<std::int32_t> children;
        std::vector<double> child_split_lambda;
        std::vector<std::uint32_t> child_size;  // size of child at its birth
    };
    std::vector<Cluster> clusters;        // index 0 is the root
    std::vector<std::int32_t> point_cluster;  // per point
    std::vector<double> point_lambda;         // per point
};

inline void collect_leaves(const Dendrogram& d, std::uint32_t node,
                           std::vector<std::uint32_t>& out) {
    std::vector<std::uint32_t> stack{node};
    while (!stack.empty()) {
        const std::uint32_t cur = stack.back();
        stack.pop_back();
        if (cur < d.n_points) {
            out.push_back(cur);
        } else {
            stack.push_back(d.left[cur - d.n_points]);
            stack.push_back(d.right[cur - d.n_points]);
        }
    }
}

inline CondensedTree condense(const Dendrogram& d, std::size_t min_cluster_size) {
    CondensedTree tree;
    tree.point_cluster.assign(d.n_points, 0);
    tree.point_lambda.assign(d.n_points, kInf);
    tree.clusters.push_back(CondensedTree::Cluster{});  // root, birth lambda 0

    struct Frame {
        std::uint32_t node;
        std::int32_t cluster;
    };
    std::vector<Frame> stack;
    const std::uint32_t top = static_cast<std::uint32_t>(2 * d.n_points - 2);
    stack.push_back(Frame{top, 0});

    std::vector<std::uint32_t> leaves;
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        const std::uint32_t t = f.node - static_cast<std::uint32_t>(d.n_points);
        const double dist = d.height[t];
        const double lambda = dist > 0.0 ? 1.0 / dist : kInf;
        const std::uint32_t l = d.left[t];
        const std::uint32_t r = d.right[t];
        const std::size_t sl = d.node_size(l);
        const std::size_t sr = d.node_size(r);

        const auto fall_out = [&](std::uint32_t node) {
            leaves.clear();
            collect_leaves(d, node, leaves);
            for (const std::uint32_t p : leaves) {
                tree.point_cluster[p] = f.cluster;
                tree.point_lambda[p] = lambda;
            }
        };

        if (sl >= min_cluster_size && sr >= min_cluster_size) {
            // true split: both sides become new clusters
            for (const std::uint32_t child_node : {l, r}) {
                const std::int32_t id = static_cast<std::int32_t>(tree.clusters.size());
                CondensedTree::Cluster c;
                c.parent = f.cluster;
                c.birth_lambda = lambda;
                tree.clusters.push_back(c);
                tree.clusters[static_cast<std::size_t>(f.cluster)].children.push_back(id);
                tree.clusters[static_cast<std::size_t>(f.cluster)].child_split_lambda.push_back(lambda);
                tree.clusters[static_cast<std::size_t>(f.cluster)].child_size.push_back(
                    static_cast<std::uint32_t>(d.node_size(child_node)));
                stack.push_back(Frame{child_node, id});
            }
        } else if (sl >= min_cluster_size) {
            fall_out(r);
            stack.push_back(Frame{l, f.cluster});
        } else if (sr >= min_cluster_size) {
            fall_out(l);
            stack.push_back(Frame{r, f.cluster});
        } else {
            // cluster dissolves: everything left falls at this lambda
            fall_out(l);
            fall_out(r);
        }
    }
    return tree;
}

// lambda-interval contribution, guarded so infinite births contribute 0
// instead of inf - inf.
inline double stability_gain(double lambda, double birth) {
    if (birth == kInf) return 0.0;
    if (lambda == kInf) return kInf;
    return lambda - birth;
}

inline std::vector<double> cluster_stabilities(const CondensedTree& tree) {
    std::vector<double> stability(tree.clusters.size(), 0.0);
    for (std::size_t p = 0; p < tree.point_cluster.size(); ++p) {
        const auto c = static_cast<std::size_t>(tree.point_cluster[p]);
        stability[c] += stability_gain(tree.point_lambda[p],
                                       tree.clusters[c].birth_lambda);
    }
    for (std::size_t c = 0; c < tree.clusters.size(); ++c) {
        const auto& cl = tree.clusters[c];
        for (std::size_t k = 0; k < cl.children.size(); ++k) {
            stability[c] += static_cast<double>(cl.child_size[k]) *
                            stability_gain(cl.child_split_lambda[k], cl.birth_lambda);
        }
    }
    return stability;
}

// Excess-of-mass selection. Returns a selected flag per cluster; the set is
// an antichain. The root may win only when every subtree loses to it, which
// collapses the selection to {root}.
inline std::vector<bool> select_clusters_eom(const CondensedTree& tree,
                                             const std::vector<double>& stability) {
    const std::size_t m = tree.clusters.size();
    std::vector<bool> selected(m, false);
    std::vector<double> subtree(m, 0.0);
    for (std::size_t c = m; c-- > 0;) {
        const auto& cl = tree.clusters[c];
        if (cl.children.empty()) {
            selected[c] = true;
            subtree[c] = stability[c];
            continue;
        }
        double child_sum = 0.0;
        for (const std::int32_t ch : cl.children) {
            child_sum += subtree[static_cast<std::size_t>(ch)];
        }
        if (stability[c] >= child_sum) {
            selected[c] = true;
            subtree[c] = stability[c];
        } else {
            subtree[c] = child_sum;
        }
    }
    // enforce the antichain: anything under a selected ancestor is deselected
    std::vector<bool> under_selected(m, false);
    for (std::size_t c = 1; c < m; ++c) {
        const auto parent = static_cast<std::size_t>(tree.clusters[c].parent);
        under_selected[c] = under_selected[parent] || selected[parent];
        if (under_selected[c]) selected[c] = false;
    }
    return selected;
}

}  // namespace detail

// HDBSCAN over Euclidean (x, y, z); intensity is ignored. min_samples is
// clamped to N-1 so small-but-clusterable clouds stay valid.
inline ClusterLabeling hdbscan(const PointCloud& cloud,
                               const HdbscanParams& params) {
    if (params.min_cluster_size < 2) {
        throw Error("hdbscan: min_cluster_size must be >= 2");
    }
    if (params.min_samples < 1) {
        throw Error("hdbscan: min_samples must be >= 1");
    }
    const std::size_t n = cloud.size();
    const auto mcs = static_cast<std::size_t>(params.min_cluster_size);
    if (n < mcs) {
        throw TooFewPointsError("hdbscan: cloud has " + std::to_string(n) +
                                " points, min_cluster_size is " +
                                std::to_string(params.min_cluster_size));
    }

    const KdTree index(cloud);
    const int ms = static_cast<int>(std::min<std::size_t>(
        static_cast<std::size_t>(params.min_samples), n - 1));
    const std::vector<double> core = core_distances(index, ms);
    const std::vector<MstEdge> edges = mutual_reachability_mst(cloud, core);
    const detail::Dendrogram dendro = detail::single_linkage(edges, n);
    const detail::CondensedTree tree = detail::condense(dendro, mcs);
    const std::vector<double> stability = detail::cluster_stabilities(tree);
    const std::vector<bool> selected = detail::select_clusters_eom(tree, stability);

    ClusterLabeling out;
    out.labels.assign(n, -1);

    std::size_t n_selected = 0;
    for (const bool s : selected) n_selected += s ? 1 : 0;

    if (n_selected == 1 && selected[0]) {
        // Only the root survived: keep it as a single cluster, with
        // membership gated by the densest lambda recorded directly under
        // the root (points that dissolved earlier stay noise).
        double thr = -detail::kInf;
        for (std::size_t p = 0; p < n; ++p) {
            if (tree.point_cluster[p] == 0) thr = std::max(thr, tree.point_lambda[p]);
        }
        for (const double lam : tree.clusters[0].child_split_lambda) {
            thr = std::max(thr, lam);
        }
        std::size_t members = 0;
        for (std::size_t p = 0; p < n; ++p) {
            if (tree.point_lambda[p] >= thr) ++members;
        }
        if (members >= mcs) {
            for (std::size_t p = 0; p < n; ++p) {
                if (tree.point_lambda[p] >= thr) out.labels[p] = 0;
            }
            out.cluster_count = 1;
        }
        return out;
    }

    // nearest selected ancestor per cluster; ids in parent-before-child order
    const std::size_t m = tree.clusters.size();
    std::vector<std::int32_t> nearest(m, -1);
    std::vector<std::int32_t> label_of(m, -1);
    std::int32_t next_label = 0;
    for (std::size_t c = 0; c < m; ++c) {
        if (selected[c]) {
            nearest[c] = static_cast<std::int32_t>(c);
            label_of[c] = next_label++;
        } else if (tree.clusters[c].parent >= 0) {
            nearest[c] = nearest[static_cast<std::size_t>(tree.clusters[c].parent)];
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        const std::int32_t anc = nearest[static_cast<std::size_t>(tree.point_cluster[p])];
        if (anc >= 0) out.labels[p] = label_of[static_cast<std::size_t>(anc)];
    }
    out.cluster_count = next_label;
    return out;
}

}  // namespace dmnr

#endif  // DMNR_HDBSCAN_HPP
