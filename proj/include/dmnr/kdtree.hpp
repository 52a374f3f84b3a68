// Balanced 3-d tree over point positions answering exact (not approximate)
// nearest-neighbor queries. Filter verdicts sit directly on thresholds, so
// neighbor distances must be reproducible: queries are exact, tie-breaks are
// fixed, and the tree is immutable after construction (concurrent reads are
// fine, there is no internal state).

#ifndef DMNR_KDTREE_HPP
#define DMNR_KDTREE_HPP

#include <algorithm>
#include <cstdint>
#include <queue>
#include <utility>
#include <vector>

#include "dmnr/errors.hpp"
#include "dmnr/types.hpp"

namespace dmnr {

class KdTree {
  public:
    struct Neighbor {
        double distance = 0.0;  // Euclidean, meters
        std::size_t index = 0;  // index into the source cloud
    };

    explicit KdTree(const PointCloud& cloud) {
        const std::size_t n = cloud.size();
        if (n == 0) {
            throw EmptyCloudError("cannot build a spatial index over 0 points");
        }
        xs_.resize(n);
        ys_.resize(n);
        zs_.resize(n);
        order_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs_[i] = cloud.points[i].x;
            ys_[i] = cloud.points[i].y;
            zs_[i] = cloud.points[i].z;
            order_[i] = static_cast<std::uint32_t>(i);
        }
        build(0, n, 0);
    }

    std::size_t size() const { return order_.size(); }

    // The k nearest points OTHER than query_index, sorted ascending by
    // (distance, index). Returns min(k, N-1) neighbors.
    std::vector<Neighbor> knn(std::size_t query_index, std::size_t k) const {
        if (k == 0) {
            throw Error("knn: neighbor count must be >= 1");
        }
        if (size() < 2) {
            throw EmptyNeighborhoodError(
                "knn: cloud has no point other than the query");
        }
        const double qx = xs_[query_index];
        const double qy = ys_[query_index];
        const double qz = zs_[query_index];
        const std::size_t want = std::min(k, size() - 1);

        // max-heap on (squared distance, index); top is the current worst
        std::priority_queue<std::pair<double, std::size_t>> heap;
        search(0, size(), 0, query_index, qx, qy, qz, want, heap);

        std::vector<Neighbor> result(heap.size());
        for (std::size_t i = heap.size(); i-- > 0;) {
            result[i] = Neighbor{std::sqrt(heap.top().first), heap.top().second};
            heap.pop();
        }
        return result;
    }

    // Number of points other than query_index within `radius` (inclusive).
    std::size_t count_within(std::size_t query_index, double radius) const {
        std::size_t count = 0;
        count_search(0, size(), 0, query_index, xs_[query_index],
                     ys_[query_index], zs_[query_index], radius * radius, count);
        return count;
    }

    // Nearest point to an arbitrary position (no exclusion).
    Neighbor nearest(double x, double y, double z) const {
        std::priority_queue<std::pair<double, std::size_t>> heap;
        search(0, size(), 0, size(), x, y, z, 1, heap);
        return Neighbor{std::sqrt(heap.top().first), heap.top().second};
    }

  private:
    // Implicit layout: subarray [lo, hi) of order_ is a subtree whose root
    // sits at mid = (lo + hi) / 2; axes cycle with depth.
    void build(std::size_t lo, std::size_t hi, int depth) {
        if (hi - lo <= 1) return;
        const std::size_t mid = lo + (hi - lo) / 2;
        const int axis = depth % 3;
        const std::vector<double>& c = coords(axis);
        std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(lo),
                         order_.begin() + static_cast<std::ptrdiff_t>(mid),
                         order_.begin() + static_cast<std::ptrdiff_t>(hi),
                         [&c](std::uint32_t a, std::uint32_t b) {
                             if (c[a] != c[b]) return c[a] < c[b];
                             return a < b;
                         });
        build(lo, mid, depth + 1);
        build(mid + 1, hi, depth + 1);
    }

    const std::vector<double>& coords(int axis) const {
        return axis == 0 ? xs_ : (axis == 1 ? ys_ : zs_);
    }

    double dist2_to(std::size_t i, double qx, double qy, double qz) const {
        const double dx = xs_[i] - qx;
        const double dy = ys_[i] - qy;
        const double dz = zs_[i] - qz;
        return dx * dx + dy * dy + dz * dz;
    }

    void search(std::size_t lo, std::size_t hi, int depth, std::size_t skip,
                double qx, double qy, double qz, std::size_t want,
                std::priority_queue<std::pair<double, std::size_t>>& heap) const {
        if (lo >= hi) return;
        const std::size_t mid = lo + (hi - lo) / 2;
        const std::size_t idx = order_[mid];
        if (idx != skip) {
            const double d2 = dist2_to(idx, qx, qy, qz);
            if (heap.size() < want) {
                heap.emplace(d2, idx);
            } else if (d2 < heap.top().first) {
                heap.pop();
                heap.emplace(d2, idx);
            }
        }
        const int axis = depth % 3;
        const double q = axis == 0 ? qx : (axis == 1 ? qy : qz);
        const double delta = q - coords(axis)[idx];

        const bool left_first = delta < 0.0;
        const std::size_t n1lo = left_first ? lo : mid + 1;
        const std::size_t n1hi = left_first ? mid : hi;
        const std::size_t n2lo = left_first ? mid + 1 : lo;
        const std::size_t n2hi = left_first ? hi : mid;

        search(n1lo, n1hi, depth + 1, skip, qx, qy, qz, want, heap);
        if (heap.size() < want || delta * delta <= heap.top().first) {
            search(n2lo, n2hi, depth + 1, skip, qx, qy, qz, want, heap);
        }
    }

    void count_search(std::size_t lo, std::size_t hi, int depth,
                      std::size_t skip, double qx, double qy, double qz,
                      double r2, std::size_t& count) const {
        if (lo >= hi) return;
        const std::size_t mid = lo + (hi - lo) / 2;
        const std::size_t idx = order_[mid];
        if (idx != skip && dist2_to(idx, qx, qy, qz) <= r2) {
            ++count;
        }
        const int axis = depth % 3;
        const double q = axis == 0 ? qx : (axis == 1 ? qy : qz);
        const double delta = q - coords(axis)[idx];

        const bool left_first = delta < 0.0;
        const std::size_t n1lo = left_first ? lo : mid + 1;
        const std::size_t n1hi = left_first ? mid : hi;
        const std::size_t n2lo = left_first ? mid + 1 : lo;
        const std::size_t n2hi = left_first ? hi : mid;

        count_search(n1lo, n1hi, depth + 1, skip, qx, qy, qz, r2, count);
        if (delta * delta <= r2) {
            count_search(n2lo, n2hi, depth + 1, skip, qx, qy, qz, r2, count);
        }
    }

    std::vector<double> xs_, ys_, zs_;
    std::vector<std::uint32_t> order_;
};

}  // namespace dmnr

#endif  // DMNR_KDTREE_HPP
