#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "citymst/geom.hpp"

namespace citymst {

// Static 2-d tree over an indexed point set. Nodes are laid out in preorder,
// so every child has a larger index than its parent.
class KdTree {
 public:
  struct Node {
    double min_x, min_y, max_x, max_y;
    std::uint32_t begin, end;  // range into order()
    std::int32_t left = -1;
    std::int32_t right = -1;

    bool leaf() const { return left < 0; }
  };

  explicit KdTree(std::span<const Point2> points, std::uint32_t leaf_size = 8);

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const std::uint32_t> order() const { return order_; }
  std::span<const Point2> points() const { return points_; }

  // Squared distance from q to the node's bounding box (0 inside).
  static double box_distance2(const Node& node, Point2 q) {
    const double dx = q.x < node.min_x ? node.min_x - q.x : (q.x > node.max_x ? q.x - node.max_x : 0.0);
    const double dy = q.y < node.min_y ? node.min_y - q.y : (q.y > node.max_y ? q.y - node.max_y : 0.0);
    return dx * dx + dy * dy;
  }

  // Nearest indexed point p with accept(p) true; ties go to the smaller
  // index. Returns (index, distance).
  template <class Accept>
  std::optional<std::pair<std::uint32_t, double>> nearest_if(Point2 q, Accept accept) const {
    Best best;
    if (!nodes_.empty()) search(0, q, accept, best);
    if (best.index == kNone) return std::nullopt;
    return std::pair{best.index, distance(q, points_[best.index])};
  }

 private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  struct Best {
    double d2 = std::numeric_limits<double>::infinity();
    std::uint32_t index = kNone;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end, std::uint32_t leaf_size);

  template <class Accept>
  void search(std::int32_t id, Point2 q, Accept& accept, Best& best) const {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (box_distance2(node, q) > best.d2) return;
    if (node.leaf()) {
      for (std::uint32_t k = node.begin; k < node.end; ++k) {
        const std::uint32_t p = order_[k];
        if (!accept(p)) continue;
        const double dx = points_[p].x - q.x;
        const double dy = points_[p].y - q.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best.d2 || (d2 == best.d2 && p < best.index)) best = {d2, p};
      }
      return;
    }
    const Node& l = nodes_[static_cast<std::size_t>(node.left)];
    const Node& r = nodes_[static_cast<std::size_t>(node.right)];
    if (box_distance2(l, q) <= box_distance2(r, q)) {
      search(node.left, q, accept, best);
      search(node.right, q, accept, best);
    } else {
      search(node.right, q, accept, best);
      search(node.left, q, accept, best);
    }
  }

  std::span<const Point2> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace citymst
