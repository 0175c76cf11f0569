#include "hoikit/geometry/sampling.h"

#include "hoikit/error.h"
#include "hoikit/geometry/knn.h"

#include <limits>

namespace hoikit::geometry {

std::vector<std::uint32_t> farthest_point_sample(const PointCloud& points, std::size_t n,
                                                 std::size_t start) {
  const auto& pts = points.points;
  if (n > pts.size()) {
    throw InvalidArgument("farthest_point_sample: n = " + std::to_string(n) +
                          " exceeds point count " + std::to_string(pts.size()));
  }
  std::vector<std::uint32_t> picked;
  if (n == 0) return picked;
  if (start >= pts.size()) throw InvalidArgument("farthest_point_sample: start out of range");
  picked.reserve(n);

  std::vector<double> min_d2(pts.size(), std::numeric_limits<double>::infinity());
  auto current = static_cast<std::uint32_t>(start);
  while (true) {
    picked.push_back(current);
    if (picked.size() == n) break;
    min_d2[current] = -1.0;  // never re-picked
    double best = -1.0;
    std::uint32_t best_idx = 0;
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
      if (min_d2[i] < 0.0) continue;
      const double d2 = squared_distance(pts[i], pts[current]);
      if (d2 < min_d2[i]) min_d2[i] = d2;
      if (min_d2[i] > best) {
        best = min_d2[i];
        best_idx = i;
      }
    }
    current = best_idx;
  }
  return picked;
}

}  // namespace hoikit::geometry
