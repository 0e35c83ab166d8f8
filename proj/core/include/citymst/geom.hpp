#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace citymst {

// A node location. Sampled points live in the unit square; the type itself
// does not clamp so that scaled copies (a * points) remain representable.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator*(double a, Point2 p) { return {a * p.x, a * p.y}; }

// Euclidean distance. Symmetric bit-for-bit in its arguments.
double distance(Point2 a, Point2 b);

// Axis-aligned square [origin, origin + side) (half-open on the upper and
// right edges).
struct AxisSquare {
  Point2 origin;
  double side = 1.0;

  bool contains(Point2 p) const {
    return p.x >= origin.x && p.x < origin.x + side && p.y >= origin.y &&
           p.y < origin.y + side;
  }
  // Closed containment, used for rectangles handed to the strip builder.
  bool contains_closed(Point2 p) const {
    return p.x >= origin.x && p.x <= origin.x + side && p.y >= origin.y &&
           p.y <= origin.y + side;
  }
  Point2 center() const { return {origin.x + side / 2, origin.y + side / 2}; }

  static AxisSquare unit() { return {{0.0, 0.0}, 1.0}; }
};

// Integer coordinates of a city on the tiling lattice; i runs along x, j
// along y.
struct LatticeCoord {
  int i = 0;
  int j = 0;

  auto operator<=>(const LatticeCoord&) const = default;
};

inline bool lattice_adjacent(LatticeCoord a, LatticeCoord b) {
  const int di = a.i > b.i ? a.i - b.i : b.i - a.i;
  const int dj = a.j > b.j ? a.j - b.j : b.j - a.j;
  return di + dj == 1;
}

struct Tiling {
  double r = 0.0;
  double s = 0.0;
  int k_grid = 0;
  // Candidate squares, ordered lexicographically by lattice coordinate (i, j).
  std::vector<LatticeCoord> coords;
  std::vector<AxisSquare> squares;
};

// Regular tiling of the unit square by r x r squares with axis gap s.
// Throws kNonIntegerGrid unless (1 - r) / (r + s) is an integer to 1e-9
// relative; the quotient is then snapped.
Tiling build_tiling(double r, double s);

// True iff the coordinates form a connected subgraph of Z^2 under
// 4-adjacency. Throws kDuplicateCity / kOutOfGrid on malformed input.
bool validate_well_connected(std::span<const LatticeCoord> selected, int k_grid);

class CityLayout {
 public:
  static CityLayout all_cities(double r, double s);
  // City index l is the position of the coordinate in `selected`. Throws
  // kNotWellConnected if the selection is not connected.
  static CityLayout with_selection(double r, double s,
                                   std::vector<LatticeCoord> selected);
  // A single city covering the whole unit square (r = 1, s = 0).
  static CityLayout unit_square();

  double r() const { return r_; }
  double s() const { return s_; }
  int k_grid() const { return k_grid_; }
  double pitch() const { return r_ + s_; }
  std::size_t size() const { return selected_.size(); }
  bool selects_all() const { return selects_all_; }

  std::span<const LatticeCoord> selected() const { return selected_; }
  std::span<const AxisSquare> squares() const { return squares_; }
  const AxisSquare& square(std::size_t l) const { return squares_.at(l); }

  // City containing p (half-open squares), or nullopt for gap points.
  std::optional<std::size_t> city_of(Point2 p) const;
  std::optional<std::size_t> city_at(LatticeCoord z) const;

  // s > r * sqrt(2): the separation under which the per-city lower bound and
  // path locality hold.
  bool well_separated() const;

 private:
  CityLayout() = default;
  void index_selection();

  double r_ = 1.0;
  double s_ = 0.0;
  int k_grid_ = 0;
  bool selects_all_ = false;
  std::vector<LatticeCoord> selected_;
  std::vector<AxisSquare> squares_;
  std::vector<std::int32_t> lookup_;  // (k+1)^2 lattice slots -> city or -1
};

// Natural length scale r * sqrt(n * N) of the city-constrained MST.
double b_scale(double r, std::int64_t n, std::int64_t cities);

}  // namespace citymst
