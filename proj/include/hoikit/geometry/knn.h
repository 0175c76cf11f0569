#pragma once

#include "hoikit/geometry/types.h"

#include <span>

namespace hoikit::geometry {

struct Neighbor {
  std::uint32_t index = 0;
  double distance = 0.0;
};

/// Squared Euclidean distance accumulated as dx*dx + dy*dy + dz*dz.
inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

/// Exact k-nearest-neighbor index (k-d tree). Results are identical to a
/// brute-force scan ordered by (squared distance, index).
class KnnIndex {
 public:
  KnnIndex() = default;
  explicit KnnIndex(std::vector<Vec3> points);

  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3>& points() const { return points_; }

  /// k neighbors in ascending distance. Throws InvalidArgument if k > size().
  std::vector<Neighbor> query(const Vec3& q, std::size_t k) const;

  /// Single nearest neighbor. Throws InvalidArgument on an empty index.
  Neighbor nearest(const Vec3& q) const;

 private:
  struct Node {
    std::uint32_t begin = 0, end = 0;  // range into order_ (leaves)
    std::int32_t left = -1, right = -1;
    int axis = -1;
    double split = 0.0;
    Vec3 lo = Vec3::Zero(), hi = Vec3::Zero();
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search_nearest(std::int32_t node, const Vec3& q, double& best_d2, std::uint32_t& best) const;
  template <typename Heap>
  void search(std::int32_t node, const Vec3& q, std::size_t k, Heap& heap) const;

  std::vector<Vec3> points_;
  std::vector<Vec3> sorted_;  // points_ permuted by order_
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

KnnIndex build_knn(const PointCloud& points);

std::vector<Neighbor> query_knn(const KnnIndex& index, const Vec3& query, std::size_t k);

/// Nearest member of the indexed set for every point in `points`.
std::vector<Neighbor> nearest_on_set(const KnnIndex& index, std::span<const Vec3> points);

}  // namespace hoikit::geometry
