#include "citymst/mst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include <fmt/format.h>

#include "citymst/disjoint_set.hpp"
#include "citymst/error.hpp"
#include "citymst/kdtree.hpp"

namespace citymst {

namespace {

constexpr std::size_t kDenseLimit = 128;
constexpr std::uint32_t kNoComponent = std::numeric_limits<std::uint32_t>::max();
constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative slack on box lower bounds; far above sqrt/rounding error, so a
// pruned node can never hold an edge that ties or beats the incumbent.
constexpr double kPruneSlack = 1e-12;

void reject_duplicates(std::span<const Point2> points) {
  std::vector<std::uint32_t> order(points.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return points[a].x < points[b].x || (points[a].x == points[b].x && points[a].y < points[b].y);
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (points[order[k]] == points[order[k - 1]]) {
      throw Error(ErrorCode::kDuplicatePoint,
                  fmt::format("points {} and {} coincide", std::min(order[k], order[k - 1]),
                              std::max(order[k], order[k - 1])));
    }
  }
}

class BoruvkaSolver {
 public:
  explicit BoruvkaSolver(std::span<const Point2> points)
      : points_(points), tree_(points), comp_(points.size()),
        node_comp_(tree_.nodes().size()) {}

  std::vector<TreeEdge> run() {
    const auto n = static_cast<std::uint32_t>(points_.size());
    DisjointSet sets(n);
    std::vector<TreeEdge> edges;
    edges.reserve(n - 1);
    std::vector<TreeEdge> best(n);
    while (edges.size() + 1 < n) {
      for (std::uint32_t i = 0; i < n; ++i) comp_[i] = sets.find(i);
      label_nodes();
      for (std::uint32_t c = 0; c < n; ++c) best[c] = {0, 0, kInf};
      for (const auto q : tree_.order()) search(0, q, best[comp_[q]]);
      for (std::uint32_t c = 0; c < n; ++c) {
        if (comp_[c] != c || best[c].len == kInf) continue;
        if (sets.unite(best[c].i, best[c].j)) edges.push_back(best[c]);
      }
    }
    return edges;
  }

 private:
  // A node whose points all share one component is labelled with it.
  void label_nodes() {
    const auto nodes = tree_.nodes();
    for (std::size_t id = nodes.size(); id-- > 0;) {
      const auto& node = nodes[id];
      if (node.leaf()) {
        std::uint32_t c = comp_[tree_.order()[node.begin]];
        for (std::uint32_t k = node.begin + 1; k < node.end && c != kNoComponent; ++k) {
          if (comp_[tree_.order()[k]] != c) c = kNoComponent;
        }
        node_comp_[id] = c;
      } else {
        const auto l = node_comp_[static_cast<std::size_t>(node.left)];
        const auto r = node_comp_[static_cast<std::size_t>(node.right)];
        node_comp_[id] = (l == r) ? l : kNoComponent;
      }
    }
  }

  void search(std::int32_t id, std::uint32_t q, TreeEdge& best) const {
    const auto& node = tree_.nodes()[static_cast<std::size_t>(id)];
    const std::uint32_t c = comp_[q];
    if (node_comp_[static_cast<std::size_t>(id)] == c) return;
    const Point2 pq = points_[q];
    if (best.len != kInf) {
      const double lower = std::sqrt(KdTree::box_distance2(node, pq));
      if (lower > best.len * (1.0 + kPruneSlack)) return;
    }
    if (node.leaf()) {
      for (std::uint32_t k = node.begin; k < node.end; ++k) {
        const std::uint32_t p = tree_.order()[k];
        if (comp_[p] == c) continue;
        const TreeEdge cand = make_edge(points_, q, p);
        if (best.len == kInf || edge_less(cand, best)) best = cand;
      }
      return;
    }
    const auto& l = tree_.nodes()[static_cast<std::size_t>(node.left)];
    const auto& r = tree_.nodes()[static_cast<std::size_t>(node.right)];
    if (KdTree::box_distance2(l, pq) <= KdTree::box_distance2(r, pq)) {
      search(node.left, q, best);
      search(node.right, q, best);
    } else {
      search(node.right, q, best);
      search(node.left, q, best);
    }
  }

  std::span<const Point2> points_;
  KdTree tree_;
  std::vector<std::uint32_t> comp_;
  std::vector<std::uint32_t> node_comp_;
};

std::vector<std::vector<std::pair<std::uint32_t, double>>> adjacency(const WeightedTree& tree) {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(tree.node_count());
  for (const auto& e : tree.edges()) {
    adj[e.i].push_back({e.j, e.len});
    adj[e.j].push_back({e.i, e.len});
  }
  return adj;
}

void check_index(const WeightedTree& tree, std::size_t i) {
  if (i >= tree.node_count()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                fmt::format("node {} out of range for {} nodes", i, tree.node_count()));
  }
}

}  // namespace

TreeEdge make_edge(std::span<const Point2> points, std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return {a, b, distance(points[a], points[b])};
}

WeightedTree::WeightedTree(std::size_t node_count, std::vector<TreeEdge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  for (auto& e : edges_) {
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges_.begin(), edges_.end(), edge_less);
  for (const auto& e : edges_) total_len_ += e.len;
}

bool WeightedTree::is_spanning_tree() const {
  if (node_count_ == 0) return edges_.empty();
  if (edges_.size() + 1 != node_count_) return false;
  DisjointSet sets(node_count_);
  for (const auto& e : edges_) {
    if (e.j >= node_count_ || e.i == e.j) return false;
    if (!sets.unite(e.i, e.j)) return false;
  }
  return true;
}

std::size_t WeightedTree::max_degree() const {
  std::vector<std::size_t> degree(node_count_, 0);
  for (const auto& e : edges_) {
    ++degree[e.i];
    ++degree[e.j];
  }
  return degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
}

WeightedTree dense_prim_mst(std::span<const Point2> points) {
  const auto n = static_cast<std::uint32_t>(points.size());
  if (n <= 1) return WeightedTree(n, {});
  std::vector<TreeEdge> key(n);
  std::vector<char> in_tree(n, 0);
  in_tree[0] = 1;
  for (std::uint32_t v = 1; v < n; ++v) key[v] = make_edge(points, 0, v);
  std::vector<TreeEdge> edges;
  edges.reserve(n - 1);
  for (std::uint32_t step = 1; step < n; ++step) {
    std::uint32_t pick = 0;
    for (std::uint32_t v = 1; v < n; ++v) {
      if (!in_tree[v] && (pick == 0 || edge_less(key[v], key[pick]))) pick = v;
    }
    in_tree[pick] = 1;
    edges.push_back(key[pick]);
    for (std::uint32_t w = 1; w < n; ++w) {
      if (in_tree[w]) continue;
      const TreeEdge cand = make_edge(points, pick, w);
      if (edge_less(cand, key[w])) key[w] = cand;
    }
  }
  return WeightedTree(n, std::move(edges));
}

WeightedTree exact_mst(std::span<const Point2> points) {
  reject_duplicates(points);
  if (points.size() <= kDenseLimit) return dense_prim_mst(points);
  return WeightedTree(points.size(), BoruvkaSolver(points).run());
}

double brute_force_mst(std::span<const Point2> points) {
  const std::size_t n = points.size();
  if (n > 8) {
    throw Error(ErrorCode::kTooLarge, fmt::format("Prufer enumeration limited to n <= 8, got {}", n));
  }
  if (n <= 1) return 0.0;
  if (n == 2) return distance(points[0], points[1]);

  std::vector<double> d(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) d[a * n + b] = distance(points[a], points[b]);
  }
  std::vector<std::size_t> seq(n - 2, 0);
  std::vector<int> degree(n);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    std::fill(degree.begin(), degree.end(), 1);
    for (const auto v : seq) ++degree[v];
    double total = 0.0;
    for (const auto v : seq) {
      std::size_t leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      total += d[leaf * n + v];
      --degree[leaf];
      --degree[v];
    }
    std::size_t u = n, w = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (degree[k] == 1) (u == n ? u : w) = k;
    }
    total += d[u * n + w];
    best = std::min(best, total);

    std::size_t pos = 0;
    while (pos < seq.size() && ++seq[pos] == n) seq[pos++] = 0;
    if (pos == seq.size()) break;
  }
  return best;
}

double incident_length(const WeightedTree& tree, std::size_t i) {
  check_index(tree, i);
  double sum = 0.0;
  for (const auto& e : tree.edges()) {
    if (e.i == i || e.j == i) sum += e.len;
  }
  return sum;
}

std::vector<std::size_t> tree_path(const WeightedTree& tree, std::size_t a, std::size_t b) {
  check_index(tree, a);
  check_index(tree, b);
  if (a == b) return {a};
  const auto adj = adjacency(tree);
  constexpr auto kUnseen = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent(tree.node_count(), kUnseen);
  std::queue<std::size_t> frontier;
  frontier.push(a);
  parent[a] = a;
  while (!frontier.empty() && parent[b] == kUnseen) {
    const auto v = frontier.front();
    frontier.pop();
    for (const auto& [w, len] : adj[v]) {
      if (parent[w] == kUnseen) {
        parent[w] = v;
        frontier.push(w);
      }
    }
  }
  if (parent[b] == kUnseen) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("nodes {} and {} are not connected", a, b));
  }
  std::vector<std::size_t> path{b};
  while (path.back() != a) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

double nn_distance(std::span<const Point2> points, std::size_t i) {
  if (points.size() < 2) {
    throw Error(ErrorCode::kTooFew, "nearest-neighbour distance needs at least two points");
  }
  if (i >= points.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                fmt::format("point {} out of range for {} points", i, points.size()));
  }
  const KdTree tree(points);
  return tree.nearest_if(points[i], [i](std::uint32_t p) { return p != i; })->second;
}

std::vector<double> nn_distances(std::span<const Point2> points) {
  if (points.size() < 2) {
    throw Error(ErrorCode::kTooFew, "nearest-neighbour distance needs at least two points");
  }
  const KdTree tree(points);
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[i] = tree.nearest_if(points[i], [i](std::uint32_t p) { return p != i; })->second;
  }
  return out;
}

double mean_nn_distance(std::span<const Point2> points) {
  const auto d = nn_distances(points);
  return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
}

}  // namespace citymst
