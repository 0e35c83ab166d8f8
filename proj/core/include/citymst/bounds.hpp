#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "citymst/geom.hpp"
#include "citymst/mst.hpp"

namespace citymst {

// Strips heuristic inside a square of side b: vertical strips of width c,
// swept left to right in serpentine order (the first strip top-down, the
// next bottom-up, ...), joined as a polyline through the nodes.
struct StripsPlan {
  AxisSquare rect;
  double strip_width = 0.0;
  std::size_t strip_count = 0;
  std::vector<std::uint32_t> visit_order;
  double path_len = 0.0;

  // b^2 / c + a c / sqrt(2) + b
  double guarantee() const;
  // Path edges over the points the plan was built from.
  WeightedTree to_tree(std::span<const Point2> points) const;
};

// Throws kOutsideRect if a point lies outside the closed rectangle and
// kInvalidArgument on an empty input or non-positive width. The default width
// is b / sqrt(a).
StripsPlan strips_path(std::span<const Point2> points, const AxisSquare& rect,
                       std::optional<double> strip_width = std::nullopt);

// Spanning tree over A followed by B (B indices offset by |A|): tree_a, a
// strip path over B, and the single shortest A-B edge. Throws kEmptyB.
WeightedTree combine_trees(const WeightedTree& tree_a, std::span<const Point2> a,
                           std::span<const Point2> b);

struct GridJoinResult {
  WeightedTree tree;
  double cell_mst_sum = 0.0;
  double join_len = 0.0;
  std::size_t join_edges = 0;
};

// k x k cells of side 1/k, an exact MST per cell, and one closest-pair edge
// between consecutive non-empty cells in column-serpentine order.
GridJoinResult grid_join(std::span<const Point2> points, int k);

struct CityUpperResult {
  WeightedTree tree;
  bool all_occupied = false;
  std::vector<std::int64_t> counts;
  std::vector<double> city_mst;  // exact per-city MST lengths
  double city_mst_sum = 0.0;
  double join_len = 0.0;
  // sum R_l + (N - 1)(s + 8r) when every city is occupied, else 3 sqrt(n)
  double bound = 0.0;
};

// Per-city MSTs joined along a BFS spanning tree of the city lattice, each
// join picking the node of either city closest to the gap midpoint. Falls
// back to a unit-square strip path when a city is empty. Throws kEmptyBatch.
CityUpperResult city_upper_tree(std::span<const Point2> points, const CityLayout& layout);

// V_n = sum of per-city MST lengths over cities holding at least 3 nodes.
// Throws kHypothesisViolated unless s > r sqrt(2).
double city_lower_bound(std::span<const Point2> points, const CityLayout& layout);

// Lattice edges (parent, child) of the BFS tree rooted at the
// lexicographically smallest selected city; city indices.
std::vector<std::pair<std::size_t, std::size_t>> city_join_order(const CityLayout& layout);

}  // namespace citymst
