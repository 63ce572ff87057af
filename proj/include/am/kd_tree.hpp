#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "am/vector_ops.hpp"

namespace am {

/// Exact nearest-neighbour search over a static point cloud.
///
/// Ties in distance resolve to the lowest original index, so results match a
/// linear scan that keeps the first minimum.
class KdTree {
 public:
  KdTree() = default;

  /// `coords` is row-major, one row of `dim` values per point.
  KdTree(std::vector<double> coords, std::size_t dim) : coords_(std::move(coords)), dim_(dim) {
    if (dim_ == 0) throw Error(ErrorCode::DimensionMismatch, "kd-tree dimension must be >= 1");
    if (coords_.size() % dim_ != 0) throw Error(ErrorCode::LengthMismatch, "coordinate buffer not a multiple of dim");
    const std::size_t n = coords_.size() / dim_;
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    if (n > 0) {
      nodes_.reserve(2 * n / kLeafSize + 2);
      build(0, n);
    }
  }

  std::size_t size() const { return order_.size(); }
  std::size_t dimension() const { return dim_; }
  bool empty() const { return order_.empty(); }

  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }

  struct Hit {
    std::size_t index = 0;
    double distance_sq = std::numeric_limits<double>::infinity();
  };

  Hit nearest(std::span<const double> q) const {
    if (q.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "query dimension mismatch");
    if (empty()) throw Error(ErrorCode::EmptySamples, "nearest-neighbour query on empty set");
    Hit best;
    best.index = std::numeric_limits<std::size_t>::max();
    search(0, q, best);
    return best;
  }

 private:
  static constexpr std::size_t kLeafSize = 8;

  struct Node {
    std::size_t begin = 0, end = 0;
    std::size_t axis = 0;
    double split = 0.0;
    int left = -1, right = -1;
  };

  double coord(std::size_t i, std::size_t axis) const { return coords_[i * dim_ + axis]; }

  int build(std::size_t begin, std::size_t end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= kLeafSize) return id;

    std::size_t axis = 0;
    double widest = -1.0;
    for (std::size_t a = 0; a < dim_; ++a) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t k = begin; k < end; ++k) {
        const double c = coord(order_[k], a);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
      if (hi - lo > widest) widest = hi - lo, axis = a;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    auto first = order_.begin() + static_cast<std::ptrdiff_t>(begin);
    std::nth_element(first, order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                       const double ca = coord(a, axis), cb = coord(b, axis);
                       return ca < cb || (ca == cb && a < b);
                     });
    const double split = coord(order_[mid], axis);
    const int left = build(begin, mid);
    const int right = build(mid, end);
    Node& node = nodes_[static_cast<std::size_t>(id)];
    node.axis = axis;
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
  }

  void search(int id, std::span<const double> q, Hit& best) const {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (node.left < 0) {
      for (std::size_t k = node.begin; k < node.end; ++k) {
        const std::size_t i = order_[k];
        const double d2 = distance_sq(q, point(i));
        if (d2 < best.distance_sq || (d2 == best.distance_sq && i < best.index)) best = Hit{i, d2};
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    search(near, q, best);
    if (diff * diff <= best.distance_sq) search(far, q, best);
  }

  std::vector<double> coords_;
  std::size_t dim_ = 0;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace am
