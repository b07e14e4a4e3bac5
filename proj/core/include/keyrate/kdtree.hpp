// SPDX-License-Identifier: Apache-2.0
//
// Exact 2D k-nearest-neighbor search under the Chebyshev (max) norm, used by
// the k-NN mutual-information estimator. The tree returns the *distance* to
// the k-th nearest neighbor; because pruning only ever skips points that
// cannot be strictly closer than the current k-th candidate, the returned
// value equals the k-th order statistic of the exact all-pairs distance
// multiset, bit for bit.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "keyrate/errors.hpp"

namespace keyrate {

class KdTree2D {
  public:
    // Builds over points (x[i], y[i]). Both vectors must have equal, nonzero
    // length; the tree keeps references to them, so they must outlive it.
    KdTree2D(const std::vector<double>& x, const std::vector<double>& y)
        : x_(x), y_(y) {
        if (x.size() != y.size()) throw DomainError("KdTree2D: coordinate lengths differ");
        if (x.empty()) throw DomainError("KdTree2D: no points");
        order_.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) order_[i] = i;
        build(0, order_.size(), 0);
    }

    // Chebyshev distance from point `query_index` to its k-th nearest other
    // point (the query point itself is excluded). Requires k < point count.
    double kth_neighbor_distance(std::size_t query_index, std::size_t k) const {
        if (k == 0 || k >= x_.size())
            throw DomainError("KdTree2D: k must be in [1, point count)");
        std::vector<double> heap;  // max-heap of the k smallest distances so far
        heap.reserve(k);
        search(0, order_.size(), 0, query_index, k, heap);
        return heap.front();
    }

  private:
    // The tree is implicit in `order_`: each range [lo, hi) is a subtree whose
    // root sits at the median index, partitioned on axis (depth % 2).
    void build(std::size_t lo, std::size_t hi, int axis) {
        if (hi - lo <= 1) return;
        const std::size_t mid = lo + (hi - lo) / 2;
        const std::vector<double>& coord = axis == 0 ? x_ : y_;
        std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                         [&](std::size_t a, std::size_t b) { return coord[a] < coord[b]; });
        build(lo, mid, 1 - axis);
        build(mid + 1, hi, 1 - axis);
    }

    void consider(double distance, std::size_t k, std::vector<double>& heap) const {
        if (heap.size() < k) {
            heap.push_back(distance);
            std::push_heap(heap.begin(), heap.end());
        } else if (distance < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = distance;
            std::push_heap(heap.begin(), heap.end());
        }
    }

    void search(std::size_t lo, std::size_t hi, int axis, std::size_t query_index, std::size_t k,
                std::vector<double>& heap) const {
        if (lo >= hi) return;
        const std::size_t mid = lo + (hi - lo) / 2;
        const std::size_t point = order_[mid];
        const double qx = x_[query_index];
        const double qy = y_[query_index];
        if (point != query_index)
            consider(std::max(std::fabs(x_[point] - qx), std::fabs(y_[point] - qy)), k, heap);

        if (hi - lo == 1) return;
        const double split = (axis == 0 ? x_ : y_)[point];
        const double q_axis = axis == 0 ? qx : qy;
        const bool left_first = q_axis < split;
        const double axis_gap = std::fabs(q_axis - split);

        const auto visit_left = [&] { search(lo, mid, 1 - axis, query_index, k, heap); };
        const auto visit_right = [&] { search(mid + 1, hi, 1 - axis, query_index, k, heap); };
        if (left_first) {
            visit_left();
            // Points on the far side are at least axis_gap away in this axis,
            // hence at least axis_gap away in max-norm: skip when that cannot
            // beat the current k-th candidate.
            if (heap.size() < k || axis_gap < heap.front()) visit_right();
        } else {
            visit_right();
            if (heap.size() < k || axis_gap < heap.front()) visit_left();
        }
    }

    const std::vector<double>& x_;
    const std::vector<double>& y_;
    std::vector<std::size_t> order_;
};

}  // namespace keyrate
