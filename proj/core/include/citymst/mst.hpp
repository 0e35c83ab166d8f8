#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "citymst/geom.hpp"

namespace citymst {

struct TreeEdge {
  std::uint32_t i = 0;  // i < j
  std::uint32_t j = 0;
  double len = 0.0;

  friend bool operator==(const TreeEdge&, const TreeEdge&) = default;
};

// Strict total order on edges: (len, min endpoint, max endpoint). The MST
// under this order is unique, which is the deterministic tie-break.
inline bool edge_less(const TreeEdge& a, const TreeEdge& b) {
  if (a.len != b.len) return a.len < b.len;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

TreeEdge make_edge(std::span<const Point2> points, std::uint32_t a, std::uint32_t b);

// Spanning tree over nodes 0..node_count-1. Edges are stored normalised
// (i < j) and sorted by edge_less; total_len sums them in that order.
class WeightedTree {
 public:
  WeightedTree() = default;
  WeightedTree(std::size_t node_count, std::vector<TreeEdge> edges);

  std::size_t node_count() const { return node_count_; }
  std::span<const TreeEdge> edges() const { return edges_; }
  double total_len() const { return total_len_; }

  // n - 1 edges, all endpoints valid, no cycle.
  bool is_spanning_tree() const;

  std::size_t max_degree() const;

 private:
  std::size_t node_count_ = 0;
  std::vector<TreeEdge> edges_;
  double total_len_ = 0.0;
};

// Exact Euclidean MST. Dense Prim for small inputs, component-pruned
// kd-tree Boruvka otherwise; both return the same unique tree.
// Throws kDuplicatePoint on coincident inputs.
WeightedTree exact_mst(std::span<const Point2> points);

// O(n^2) Prim over the complete graph; kept as a second oracle.
WeightedTree dense_prim_mst(std::span<const Point2> points);

// Minimum over all n^(n-2) labelled spanning trees via Prufer sequences.
// Throws kTooLarge for n > 8.
double brute_force_mst(std::span<const Point2> points);

// Sum of the lengths of edges incident to node i. Throws kIndexOutOfRange.
double incident_length(const WeightedTree& tree, std::size_t i);

// Unique path a -> b in the tree, endpoints included.
std::vector<std::size_t> tree_path(const WeightedTree& tree, std::size_t a, std::size_t b);

// Distance from point i to its nearest other point. Throws kTooFew for n < 2.
double nn_distance(std::span<const Point2> points, std::size_t i);
std::vector<double> nn_distances(std::span<const Point2> points);
double mean_nn_distance(std::span<const Point2> points);

}  // namespace citymst
