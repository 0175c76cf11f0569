#include "hoikit/geometry/knn.h"

#include "hoikit/error.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace hoikit::geometry {
namespace {

constexpr std::uint32_t kLeafSize = 12;

struct Candidate {
  double d2;
  std::uint32_t index;
  bool operator<(const Candidate& o) const {
    return d2 != o.d2 ? d2 < o.d2 : index < o.index;
  }
};

}  // namespace

KnnIndex::KnnIndex(std::vector<Vec3> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!points_[i].allFinite()) {
      throw InvalidArgument("knn: point " + std::to_string(i) + " is not finite");
    }
  }
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 1);
    build(0, static_cast<std::uint32_t>(points_.size()));
  }
  sorted_.reserve(points_.size());
  for (auto idx : order_) sorted_.push_back(points_[idx]);
}

std::int32_t KnnIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  Vec3 lo = points_[order_[begin]], hi = lo;
  for (auto i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  nodes_.push_back({begin, end});
  nodes_[id].lo = lo;
  nodes_[id].hi = hi;
  if (end - begin <= kLeafSize) return id;
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) return id;  // all coincident: keep as leaf

  const auto mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return points_[a][axis] != points_[b][axis] ? points_[a][axis] < points_[b][axis]
                                                                 : a < b;
                   });
  const double split = points_[order_[mid]][axis];
  const auto left = build(begin, mid);
  const auto right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

template <typename Heap>
void KnnIndex::search(std::int32_t node_id, const Vec3& q, std::size_t k, Heap& heap) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (auto i = node.begin; i < node.end; ++i) {
      const auto idx = order_[i];
      const Candidate c{squared_distance(q, points_[idx]), idx};
      if (heap.size() < k) {
        heap.push(c);
      } else if (c < heap.top()) {
        heap.pop();
        heap.push(c);
      }
    }
    return;
  }
  // Left holds coordinates <= split, right holds coordinates >= split.
  const double diff = q[node.axis] - node.split;
  const auto near = diff <= 0.0 ? node.left : node.right;
  const auto far = diff <= 0.0 ? node.right : node.left;
  search(near, q, k, heap);
  // Points across the plane are at least |diff| away; equality must still be
  // visited because an equidistant point with a smaller index wins the tie.
  if (heap.size() < k || diff * diff <= heap.top().d2) search(far, q, k, heap);
}

std::vector<Neighbor> KnnIndex::query(const Vec3& q, std::size_t k) const {
  if (k > points_.size()) {
    throw InvalidArgument("knn: k = " + std::to_string(k) + " exceeds point count " +
                          std::to_string(points_.size()));
  }
  std::vector<Neighbor> out;
  if (k == 0) return out;
  std::priority_queue<Candidate> heap;
  search(0, q, k, heap);
  out.resize(heap.size());
  for (auto i = heap.size(); i-- > 0;) {
    out[i] = {heap.top().index, std::sqrt(heap.top().d2)};
    heap.pop();
  }
  return out;
}

void KnnIndex::search_nearest(std::int32_t node_id, const Vec3& q, double& best_d2, std::uint32_t& best) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (auto i = node.begin; i < node.end; ++i) {
      const double d2 = squared_distance(q, sorted_[i]);
      if (d2 < best_d2 || (d2 == best_d2 && order_[i] < best)) {
        best_d2 = d2;
        best = order_[i];
      }
    }
    return;
  }
  const Node& l = nodes_[node.left];
  const Node& r = nodes_[node.right];
  const double dl = (l.lo - q).cwiseMax(q - l.hi).cwiseMax(0.0).squaredNorm();
  const double dr = (r.lo - q).cwiseMax(q - r.hi).cwiseMax(0.0).squaredNorm();
  const bool left_first = dl <= dr;
  const auto near = left_first ? node.left : node.right;
  const auto far = left_first ? node.right : node.left;
  if ((left_first ? dl : dr) <= best_d2) search_nearest(near, q, best_d2, best);
  if ((left_first ? dr : dl) <= best_d2) search_nearest(far, q, best_d2, best);
}

Neighbor KnnIndex::nearest(const Vec3& q) const {
  if (points_.empty()) throw InvalidArgument("knn: nearest on an empty index");
  double best_d2 = std::numeric_limits<double>::infinity();
  std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
  search_nearest(0, q, best_d2, best);
  return {best, std::sqrt(best_d2)};
}

KnnIndex build_knn(const PointCloud& points) { return KnnIndex(points.points); }

std::vector<Neighbor> query_knn(const KnnIndex& index, const Vec3& query, std::size_t k) {
  return index.query(query, k);
}

std::vector<Neighbor> nearest_on_set(const KnnIndex& index, std::span<const Vec3> points) {
  std::vector<Neighbor> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(index.nearest(p));
  return out;
}

}  // namespace hoikit::geometry
