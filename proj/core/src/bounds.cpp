#include "citymst/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include <fmt/format.h>

#include "citymst/error.hpp"
#include "citymst/kdtree.hpp"
#include "citymst/sampling.hpp"

namespace citymst {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exact MST of points[members], with edges mapped back to global indices.
std::vector<TreeEdge> subset_mst(std::span<const Point2> points,
                                 std::span<const std::uint32_t> members, double& length) {
  std::vector<Point2> local(members.size());
  for (std::size_t k = 0; k < members.size(); ++k) local[k] = points[members[k]];
  const WeightedTree tree = exact_mst(local);
  length = tree.total_len();
  std::vector<TreeEdge> edges;
  edges.reserve(tree.edges().size());
  for (const auto& e : tree.edges()) edges.push_back({members[e.i], members[e.j], e.len});
  return edges;
}

// Shortest edge between two disjoint index sets, ties by edge_less.
TreeEdge closest_pair(std::span<const Point2> points, std::span<const std::uint32_t> from,
                      std::span<const std::uint32_t> to) {
  std::vector<Point2> local(to.size());
  for (std::size_t k = 0; k < to.size(); ++k) local[k] = points[to[k]];
  const KdTree tree(local);
  TreeEdge best{0, 0, kInf};
  for (const auto q : from) {
    const auto hit = tree.nearest_if(points[q], [](std::uint32_t) { return true; });
    const TreeEdge cand = make_edge(points, q, to[hit->first]);
    if (best.len == kInf || edge_less(cand, best)) best = cand;
  }
  return best;
}

std::uint32_t closest_to(std::span<const Point2> points, std::span<const std::uint32_t> members,
                         Point2 target) {
  std::uint32_t pick = members.front();
  double best = distance(points[pick], target);
  for (const auto m : members) {
    const double d = distance(points[m], target);
    if (d < best || (d == best && m < pick)) {
      best = d;
      pick = m;
    }
  }
  return pick;
}

std::size_t strip_count_for(double b, double c) {
  const double q = b / c;
  const double nearest = std::round(q);
  if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, q)) return std::max<std::size_t>(1, static_cast<std::size_t>(nearest));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(q)));
}

}  // namespace

double StripsPlan::guarantee() const {
  const double b = rect.side;
  const double a = static_cast<double>(visit_order.size());
  return b * b / strip_width + a * strip_width / std::sqrt(2.0) + b;
}

StripsPlan strips_path(std::span<const Point2> points, const AxisSquare& rect,
                       std::optional<double> strip_width) {
  if (points.empty()) throw Error(ErrorCode::kInvalidArgument, "strip path needs at least one point");
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!rect.contains_closed(points[k])) {
      throw Error(ErrorCode::kOutsideRect,
                  fmt::format("point {} ({}, {}) outside the strip rectangle", k, points[k].x, points[k].y));
    }
  }
  const double b = rect.side;
  const double c = strip_width.value_or(b / std::sqrt(static_cast<double>(points.size())));
  if (!(c > 0.0)) throw Error(ErrorCode::kInvalidArgument, "strip width must be positive");

  StripsPlan plan;
  plan.rect = rect;
  plan.strip_width = c;
  plan.strip_count = strip_count_for(b, c);
  const auto last = static_cast<std::int64_t>(plan.strip_count) - 1;

  std::vector<std::size_t> strip(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto s = static_cast<std::int64_t>(std::floor((points[k].x - rect.origin.x) / c));
    strip[k] = static_cast<std::size_t>(std::clamp<std::int64_t>(s, 0, last));
  }
  plan.visit_order.resize(points.size());
  std::iota(plan.visit_order.begin(), plan.visit_order.end(), 0u);
  std::sort(plan.visit_order.begin(), plan.visit_order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (strip[a] != strip[b]) return strip[a] < strip[b];
    const bool down = strip[a] % 2 == 0;
    if (points[a].y != points[b].y) return down ? points[a].y > points[b].y : points[a].y < points[b].y;
    if (points[a].x != points[b].x) return points[a].x < points[b].x;
    return a < b;
  });
  for (std::size_t k = 1; k < plan.visit_order.size(); ++k) {
    plan.path_len += distance(points[plan.visit_order[k - 1]], points[plan.visit_order[k]]);
  }
  return plan;
}

WeightedTree StripsPlan::to_tree(std::span<const Point2> points) const {
  std::vector<TreeEdge> edges;
  edges.reserve(visit_order.size());
  for (std::size_t k = 1; k < visit_order.size(); ++k) {
    edges.push_back(make_edge(points, visit_order[k - 1], visit_order[k]));
  }
  return WeightedTree(visit_order.size(), std::move(edges));
}

WeightedTree combine_trees(const WeightedTree& tree_a, std::span<const Point2> a,
                           std::span<const Point2> b) {
  if (b.empty()) throw Error(ErrorCode::kEmptyB, "second point set is empty");
  if (tree_a.node_count() != a.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("tree spans {} nodes but A has {}", tree_a.node_count(), a.size()));
  }
  std::vector<Point2> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  const auto offset = static_cast<std::uint32_t>(a.size());

  std::vector<TreeEdge> edges(tree_a.edges().begin(), tree_a.edges().end());
  const StripsPlan plan = strips_path(b, AxisSquare::unit());
  for (std::size_t k = 1; k < plan.visit_order.size(); ++k) {
    edges.push_back(make_edge(all, offset + plan.visit_order[k - 1], offset + plan.visit_order[k]));
  }
  if (!a.empty()) {
    std::vector<std::uint32_t> ia(a.size()), ib(b.size());
    std::iota(ia.begin(), ia.end(), 0u);
    std::iota(ib.begin(), ib.end(), offset);
    edges.push_back(closest_pair(all, ib, ia));
  }
  return WeightedTree(all.size(), std::move(edges));
}

GridJoinResult grid_join(std::span<const Point2> points, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, fmt::format("grid_join needs k >= 1, got {}", k));
  const auto cell_of = [k](double v) {
    return std::clamp(static_cast<int>(std::floor(v * k)), 0, k - 1);
  };
  std::vector<std::vector<std::uint32_t>> cells(static_cast<std::size_t>(k) * k);
  for (std::size_t p = 0; p < points.size(); ++p) {
    const int ci = cell_of(points[p].x);
    const int cj = cell_of(points[p].y);
    cells[static_cast<std::size_t>(ci) * k + cj].push_back(static_cast<std::uint32_t>(p));
  }

  GridJoinResult result;
  std::vector<TreeEdge> edges;
  edges.reserve(points.size());
  const std::vector<std::uint32_t>* previous = nullptr;
  for (int ci = 0; ci < k; ++ci) {
    for (int step = 0; step < k; ++step) {
      const int cj = (ci % 2 == 0) ? step : k - 1 - step;
      const auto& members = cells[static_cast<std::size_t>(ci) * k + cj];
      if (members.empty()) continue;
      double len = 0.0;
      const auto cell_edges = subset_mst(points, members, len);
      edges.insert(edges.end(), cell_edges.begin(), cell_edges.end());
      result.cell_mst_sum += len;
      if (previous != nullptr) {
        const TreeEdge join = closest_pair(points, members, *previous);
        edges.push_back(join);
        result.join_len += join.len;
        ++result.join_edges;
      }
      previous = &members;
    }
  }
  result.tree = WeightedTree(points.size(), std::move(edges));
  return result;
}

std::vector<std::pair<std::size_t, std::size_t>> city_join_order(const CityLayout& layout) {
  const auto selected = layout.selected();
  const auto root = static_cast<std::size_t>(
      std::min_element(selected.begin(), selected.end()) - selected.begin());
  std::vector<std::pair<std::size_t, std::size_t>> joins;
  joins.reserve(layout.size() - 1);
  std::vector<char> seen(layout.size(), 0);
  std::queue<std::size_t> frontier;
  frontier.push(root);
  seen[root] = 1;
  constexpr int kDi[] = {-1, 0, 0, 1};
  constexpr int kDj[] = {0, -1, 1, 0};
  while (!frontier.empty()) {
    const auto l = frontier.front();
    frontier.pop();
    for (int d = 0; d < 4; ++d) {
      const auto next = layout.city_at({selected[l].i + kDi[d], selected[l].j + kDj[d]});
      if (next && !seen[*next]) {
        seen[*next] = 1;
        joins.emplace_back(l, *next);
        frontier.push(*next);
      }
    }
  }
  return joins;
}

CityUpperResult city_upper_tree(std::span<const Point2> points, const CityLayout& layout) {
  if (points.empty()) throw Error(ErrorCode::kEmptyBatch, "city_upper_tree needs at least one node");
  const auto members = city_members(points, layout);

  CityUpperResult result;
  result.counts.reserve(members.size());
  result.city_mst.reserve(members.size());
  result.all_occupied = true;
  std::vector<TreeEdge> edges;
  edges.reserve(points.size());
  for (const auto& m : members) {
    result.counts.push_back(static_cast<std::int64_t>(m.size()));
    result.all_occupied = result.all_occupied && !m.empty();
    double len = 0.0;
    if (!m.empty()) {
      const auto city_edges = subset_mst(points, m, len);
      edges.insert(edges.end(), city_edges.begin(), city_edges.end());
    }
    result.city_mst.push_back(len);
    result.city_mst_sum += len;
  }

  if (!result.all_occupied) {
    result.tree = strips_path(points, AxisSquare::unit()).to_tree(points);
    result.bound = 3.0 * std::sqrt(static_cast<double>(points.size()));
    return result;
  }

  for (const auto& [from, to] : city_join_order(layout)) {
    const Point2 ca = layout.square(from).center();
    const Point2 cb = layout.square(to).center();
    const Point2 gap_mid{(ca.x + cb.x) / 2, (ca.y + cb.y) / 2};
    const auto u = closest_to(points, members[from], gap_mid);
    const auto v = closest_to(points, members[to], gap_mid);
    const TreeEdge join = make_edge(points, u, v);
    result.join_len += join.len;
    edges.push_back(join);
  }
  result.tree = WeightedTree(points.size(), std::move(edges));
  result.bound = result.city_mst_sum +
                 static_cast<double>(layout.size() - 1) * (layout.s() + 8.0 * layout.r());
  return result;
}

double city_lower_bound(std::span<const Point2> points, const CityLayout& layout) {
  if (!layout.well_separated()) {
    throw Error(ErrorCode::kHypothesisViolated,
                fmt::format("lower bound needs s > r sqrt(2) (r={}, s={})", layout.r(), layout.s()));
  }
  double total = 0.0;
  for (const auto& m : city_members(points, layout)) {
    if (m.size() < 3) continue;
    double len = 0.0;
    subset_mst(points, m, len);
    total += len;
  }
  return total;
}

}  // namespace citymst
