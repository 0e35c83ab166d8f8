#include <cmath>
#include <cstdio>
#include <vector>

#include <citymst/mst.hpp>

int main() {
  const std::vector<citymst::Point2> pts{{0, 0}, {0.3, 0.4}, {1, 0.4}};
  const double len = citymst::exact_mst(pts).total_len();
  std::printf("%.3f\n", len);
  return std::abs(len - 1.2) < 1e-12 ? 0 : 1;
}
