#include "citymst/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace citymst {

KdTree::KdTree(std::span<const Point2> points, std::uint32_t leaf_size)
    : points_(points), order_(points.size()) {
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points.empty()) {
    nodes_.reserve(2 * (points.size() / std::max(leaf_size, 1u)) + 2);
    build(0, static_cast<std::uint32_t>(points.size()), std::max(leaf_size, 1u));
  }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end, std::uint32_t leaf_size) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  Node node{points_[order_[begin]].x, points_[order_[begin]].y,
            points_[order_[begin]].x, points_[order_[begin]].y, begin, end};
  for (std::uint32_t k = begin + 1; k < end; ++k) {
    const Point2 p = points_[order_[k]];
    node.min_x = std::min(node.min_x, p.x);
    node.max_x = std::max(node.max_x, p.x);
    node.min_y = std::min(node.min_y, p.y);
    node.max_y = std::max(node.max_y, p.y);
  }
  nodes_.push_back(node);
  if (end - begin <= leaf_size) return id;

  const bool split_x = (node.max_x - node.min_x) >= (node.max_y - node.min_y);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double ka = split_x ? points_[a].x : points_[a].y;
                     const double kb = split_x ? points_[b].x : points_[b].y;
                     return ka < kb || (ka == kb && a < b);
                   });
  const auto left = build(begin, mid, leaf_size);
  const auto right = build(mid, end, leaf_size);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

}  // namespace citymst
