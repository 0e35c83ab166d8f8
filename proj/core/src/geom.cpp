#include "citymst/geom.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include <fmt/format.h>

#include "citymst/error.hpp"

namespace citymst {

namespace {

constexpr double kGridTolerance = 1e-9;

int snapped_grid(double r, double s) {
  if (!(r > 0.0) || !(r <= 1.0) || !(s >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("tiling needs 0 < r <= 1 and s >= 0 (r={}, s={})", r, s));
  }
  const double q = (1.0 - r) / (r + s);
  const double k = std::round(q);
  if (std::abs(q - k) > kGridTolerance * std::max(1.0, std::abs(q))) {
    throw Error(ErrorCode::kNonIntegerGrid,
                fmt::format("(1-r)/(r+s) = {} is not an integer (r={}, s={})", q, r, s));
  }
  return static_cast<int>(k);
}

AxisSquare square_at(LatticeCoord z, double r, double s) {
  return {{(r + s) * z.i, (r + s) * z.j}, r};
}

}  // namespace

double distance(Point2 a, Point2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

Tiling build_tiling(double r, double s) {
  Tiling t;
  t.r = r;
  t.s = s;
  t.k_grid = snapped_grid(r, s);
  const int side = t.k_grid + 1;
  t.coords.reserve(static_cast<std::size_t>(side) * side);
  t.squares.reserve(t.coords.capacity());
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      t.coords.push_back({i, j});
      t.squares.push_back(square_at({i, j}, r, s));
    }
  }
  return t;
}

bool validate_well_connected(std::span<const LatticeCoord> selected, int k_grid) {
  if (selected.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "city selection is empty");
  }
  const int side = k_grid + 1;
  std::vector<std::int32_t> slot(static_cast<std::size_t>(side) * side, -1);
  for (std::size_t l = 0; l < selected.size(); ++l) {
    const auto z = selected[l];
    if (z.i < 0 || z.j < 0 || z.i > k_grid || z.j > k_grid) {
      throw Error(ErrorCode::kOutOfGrid,
                  fmt::format("city ({},{}) outside grid 0..{}", z.i, z.j, k_grid));
    }
    auto& cell = slot[static_cast<std::size_t>(z.i) * side + z.j];
    if (cell >= 0) {
      throw Error(ErrorCode::kDuplicateCity, fmt::format("city ({},{}) repeated", z.i, z.j));
    }
    cell = static_cast<std::int32_t>(l);
  }

  std::vector<char> seen(selected.size(), 0);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  constexpr int kDi[] = {1, -1, 0, 0};
  constexpr int kDj[] = {0, 0, 1, -1};
  while (!frontier.empty()) {
    const auto z = selected[frontier.front()];
    frontier.pop();
    for (int d = 0; d < 4; ++d) {
      const int i = z.i + kDi[d];
      const int j = z.j + kDj[d];
      if (i < 0 || j < 0 || i > k_grid || j > k_grid) continue;
      const auto next = slot[static_cast<std::size_t>(i) * side + j];
      if (next >= 0 && !seen[next]) {
        seen[next] = 1;
        ++reached;
        frontier.push(static_cast<std::size_t>(next));
      }
    }
  }
  return reached == selected.size();
}

CityLayout CityLayout::all_cities(double r, double s) {
  Tiling t = build_tiling(r, s);
  CityLayout layout;
  layout.r_ = r;
  layout.s_ = s;
  layout.k_grid_ = t.k_grid;
  layout.selects_all_ = true;
  layout.selected_ = std::move(t.coords);
  layout.squares_ = std::move(t.squares);
  layout.index_selection();
  return layout;
}

CityLayout CityLayout::with_selection(double r, double s,
                                      std::vector<LatticeCoord> selected) {
  const int k = snapped_grid(r, s);
  if (!validate_well_connected(selected, k)) {
    throw Error(ErrorCode::kNotWellConnected,
                "selected cities do not form a connected subgraph of Z^2");
  }
  CityLayout layout;
  layout.r_ = r;
  layout.s_ = s;
  layout.k_grid_ = k;
  layout.selects_all_ =
      selected.size() == static_cast<std::size_t>(k + 1) * static_cast<std::size_t>(k + 1);
  layout.selected_ = std::move(selected);
  layout.squares_.reserve(layout.selected_.size());
  for (const auto z : layout.selected_) layout.squares_.push_back(square_at(z, r, s));
  layout.index_selection();
  return layout;
}

CityLayout CityLayout::unit_square() { return all_cities(1.0, 0.0); }

void CityLayout::index_selection() {
  const int side = k_grid_ + 1;
  lookup_.assign(static_cast<std::size_t>(side) * side, -1);
  for (std::size_t l = 0; l < selected_.size(); ++l) {
    const auto z = selected_[l];
    lookup_[static_cast<std::size_t>(z.i) * side + z.j] = static_cast<std::int32_t>(l);
  }
}

std::optional<std::size_t> CityLayout::city_at(LatticeCoord z) const {
  if (z.i < 0 || z.j < 0 || z.i > k_grid_ || z.j > k_grid_) return std::nullopt;
  const auto l = lookup_[static_cast<std::size_t>(z.i) * (k_grid_ + 1) + z.j];
  if (l < 0) return std::nullopt;
  return static_cast<std::size_t>(l);
}

std::optional<std::size_t> CityLayout::city_of(Point2 p) const {
  const double pitch = r_ + s_;
  const int gi = static_cast<int>(std::floor(p.x / pitch));
  const int gj = static_cast<int>(std::floor(p.y / pitch));
  // The division can land one lattice step off near an origin, so probe the
  // neighbouring slots as well; containment itself is decided by the square.
  for (int i = gi - 1; i <= gi + 1; ++i) {
    for (int j = gj - 1; j <= gj + 1; ++j) {
      if (const auto l = city_at({i, j}); l && squares_[*l].contains(p)) return l;
    }
  }
  return std::nullopt;
}

bool CityLayout::well_separated() const { return s_ > r_ * std::sqrt(2.0); }

double b_scale(double r, std::int64_t n, std::int64_t cities) {
  return r * std::sqrt(static_cast<double>(n) * static_cast<double>(cities));
}

}  // namespace citymst
