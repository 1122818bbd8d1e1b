#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace stancedyn {

/// (squared distance, point id). Neighbors are ordered by distance, then id.
using Neighbor = std::pair<double, std::size_t>;

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

/// Bounded max-heap of the k best neighbors seen so far.
class NeighborHeap {
public:
    explicit NeighborHeap(std::size_t k) : k_(k) { heap_.reserve(k + 1); }

    bool full() const { return heap_.size() >= k_; }
    const Neighbor& worst() const { return heap_.front(); }

    void offer(Neighbor n) {
        if (k_ == 0) return;
        if (!full()) {
            heap_.push_back(n);
            std::push_heap(heap_.begin(), heap_.end());
        } else if (n < heap_.front()) {
            std::pop_heap(heap_.begin(), heap_.end());
            heap_.back() = n;
            std::push_heap(heap_.begin(), heap_.end());
        }
    }

    std::vector<Neighbor> sorted() && {
        std::sort_heap(heap_.begin(), heap_.end());
        return std::move(heap_);
    }

private:
    std::size_t k_;
    std::vector<Neighbor> heap_;
};

/// Static k-d tree over a subset of rows of a row-major point matrix.
/// Queries return the same neighbors, in the same order, as a brute-force
/// scan ordered by (squared distance, id).
class KdTree {
public:
    KdTree(std::span<const double> data, std::size_t dim, std::vector<std::size_t> ids)
        : data_(data), dim_(dim), ids_(std::move(ids)) {
        if (!ids_.empty()) root_ = build(0, ids_.size(), 0);
    }

    /// k nearest ids to `query` among those for which keep(id) is true.
    template <class Keep>
    std::vector<Neighbor> query(std::span<const double> query, std::size_t k, Keep&& keep) const {
        NeighborHeap heap(k);
        if (root_) search(*root_, query, heap, keep);
        return std::move(heap).sorted();
    }

private:
    struct Node {
        std::size_t lo = 0, hi = 0; // leaf range into ids_
        std::size_t axis = 0;
        double split = 0.0;
        std::unique_ptr<Node> left, right;
        bool leaf() const { return !left; }
    };

    static constexpr std::size_t leaf_size = 16;

    std::span<const double> point(std::size_t id) const { return data_.subspan(id * dim_, dim_); }

    std::unique_ptr<Node> build(std::size_t lo, std::size_t hi, std::size_t depth) {
        auto node = std::make_unique<Node>();
        node->lo = lo;
        node->hi = hi;
        if (hi - lo <= leaf_size) return node;
        // split on the axis of largest spread
        std::size_t axis = depth % dim_;
        double best = -1.0;
        for (std::size_t a = 0; a < dim_; ++a) {
            double mn = std::numeric_limits<double>::infinity(), mx = -mn;
            for (std::size_t i = lo; i < hi; ++i) {
                const double v = point(ids_[i])[a];
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            if (mx - mn > best) {
                best = mx - mn;
                axis = a;
            }
        }
        const std::size_t mid = lo + (hi - lo) / 2;
        std::nth_element(ids_.begin() + static_cast<std::ptrdiff_t>(lo), ids_.begin() + static_cast<std::ptrdiff_t>(mid),
                         ids_.begin() + static_cast<std::ptrdiff_t>(hi),
                         [&](std::size_t a, std::size_t b) { return point(a)[axis] < point(b)[axis]; });
        node->axis = axis;
        node->split = point(ids_[mid])[axis];
        node->left = build(lo, mid, depth + 1);
        node->right = build(mid, hi, depth + 1);
        return node;
    }

    template <class Keep>
    void search(const Node& node, std::span<const double> q, NeighborHeap& heap, Keep& keep) const {
        if (node.leaf()) {
            for (std::size_t i = node.lo; i < node.hi; ++i) {
                const std::size_t id = ids_[i];
                if (keep(id)) heap.offer({squared_distance(q, point(id)), id});
            }
            return;
        }
        const double diff = q[node.axis] - node.split;
        const Node& near = diff < 0.0 ? *node.left : *node.right;
        const Node& far = diff < 0.0 ? *node.right : *node.left;
        search(near, q, heap, keep);
        // `<=` keeps equal-distance candidates reachable for id tie-breaking
        if (!heap.full() || diff * diff <= heap.worst().first) search(far, q, heap, keep);
    }

    std::span<const double> data_;
    std::size_t dim_;
    std::vector<std::size_t> ids_;
    std::unique_ptr<Node> root_;
};

} // namespace stancedyn
