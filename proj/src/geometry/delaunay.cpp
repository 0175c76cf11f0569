#include "hoikit/geometry/delaunay.h"

#include "hoikit/geometry/predicates.h"

#include <algorithm>
#include <unordered_map>

namespace hoikit::geometry {
namespace {

constexpr std::int32_t kInfinite = -1;
constexpr double kPerturbation = 1e-9;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_from_hash(std::uint64_t h) {
  // 53 random bits mapped to [-1, 1).
  return static_cast<double>(h >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

struct Cell {
  std::array<std::int32_t, 4> v;
  std::array<std::int32_t, 4> n;
  bool alive = true;

  bool infinite() const { return v[0] < 0 || v[1] < 0 || v[2] < 0 || v[3] < 0; }
  int index_of(std::int32_t vertex) const {
    for (int i = 0; i < 4; ++i) {
      if (v[i] == vertex) return i;
    }
    return -1;
  }
};

class Triangulation {
 public:
  explicit Triangulation(std::vector<Vec3> pts) : pts_(std::move(pts)) {}

  void run() {
    const auto seed = initial_simplex();
    std::vector<char> inserted(pts_.size(), 0);
    for (auto s : seed) inserted[s] = 1;
    for (std::uint32_t i = 0; i < pts_.size(); ++i) {
      if (!inserted[i]) insert(static_cast<std::int32_t>(i));
    }
  }

  std::vector<Tetrahedron> finite_cells() const {
    std::vector<Tetrahedron> out;
    for (const auto& c : cells_) {
      if (!c.alive || c.infinite()) continue;
      out.push_back({{static_cast<std::uint32_t>(c.v[0]), static_cast<std::uint32_t>(c.v[1]),
                      static_cast<std::uint32_t>(c.v[2]), static_cast<std::uint32_t>(c.v[3])}});
    }
    return out;
  }

 private:
  int orient(const std::array<std::int32_t, 4>& v) const {
    return predicates::orient3d(pts_[v[0]], pts_[v[1]], pts_[v[2]], pts_[v[3]]);
  }

  std::array<std::int32_t, 4> initial_simplex() {
    const auto n = static_cast<std::int32_t>(pts_.size());
    if (n < 4) throw DegenerateInputError("alpha shape: need at least 4 points");
    std::int32_t i1 = -1, i2 = -1, i3 = -1;
    for (std::int32_t i = 1; i < n && i1 < 0; ++i) {
      if (pts_[i] != pts_[0]) i1 = i;
    }
    if (i1 < 0) throw DegenerateInputError("alpha shape: all points coincide");
    for (std::int32_t i = 1; i < n && i2 < 0; ++i) {
      if ((pts_[i1] - pts_[0]).cross(pts_[i] - pts_[0]).squaredNorm() > 0.0) i2 = i;
    }
    if (i2 < 0) throw DegenerateInputError("alpha shape: all points are collinear");
    for (std::int32_t i = 1; i < n && i3 < 0; ++i) {
      if (predicates::orient3d(pts_[0], pts_[i1], pts_[i2], pts_[i]) != 0) i3 = i;
    }
    if (i3 < 0) throw DegenerateInputError("alpha shape: all points are coplanar");

    std::array<std::int32_t, 4> t{0, i1, i2, i3};
    if (orient(t) < 0) std::swap(t[2], t[3]);
    cells_.push_back({t, {-1, -1, -1, -1}});
    for (int k = 0; k < 4; ++k) {
      // Opposite side of face k: replace the vertex by infinity and swap two
      // of the others so the orientation convention still holds.
      auto v = t;
      v[k] = kInfinite;
      const int a = (k + 1) % 4, b = (k + 2) % 4;
      std::swap(v[a], v[b]);
      cells_.push_back({v, {-1, -1, -1, -1}});
    }
    std::vector<std::int32_t> all{0, 1, 2, 3, 4};
    link(all);
    hint_ = 0;
    return t;
  }

  // Connects every pair of cells in `ids` that share a face.
  void link(const std::vector<std::int32_t>& ids) {
    std::unordered_map<std::string, std::pair<std::int32_t, int>> faces;
    for (auto id : ids) {
      for (int k = 0; k < 4; ++k) {
        std::array<std::int32_t, 3> f;
        int m = 0;
        for (int j = 0; j < 4; ++j) {
          if (j != k) f[m++] = cells_[id].v[j];
        }
        std::sort(f.begin(), f.end());
        const std::string key = std::to_string(f[0]) + "," + std::to_string(f[1]) + "," +
                                std::to_string(f[2]);
        const auto it = faces.find(key);
        if (it == faces.end()) {
          faces.emplace(key, std::make_pair(id, k));
        } else {
          cells_[id].n[k] = it->second.first;
          cells_[it->second.first].n[it->second.second] = id;
        }
      }
    }
  }

  bool conflicts(std::int32_t cell, std::int32_t p) const {
    const Cell& c = cells_[cell];
    const int inf = c.index_of(kInfinite);
    if (inf < 0) {
      return predicates::insphere(pts_[c.v[0]], pts_[c.v[1]], pts_[c.v[2]], pts_[c.v[3]],
                                  pts_[p]) > 0;
    }
    auto v = c.v;
    v[inf] = p;
    const int o = orient(v);
    if (o != 0) return o > 0;
    // Coplanar with the hull face: inside its circumcircle iff inside the
    // circumsphere of the finite cell across that face.
    return conflicts(c.n[inf], p);
  }

  std::int32_t locate(std::int32_t p) const {
    std::int32_t cur = hint_;
    if (!cells_[cur].alive || cells_[cur].infinite()) {
      cur = -1;
      for (std::int32_t i = 0; i < static_cast<std::int32_t>(cells_.size()); ++i) {
        if (cells_[i].alive && !cells_[i].infinite()) {
          cur = i;
          break;
        }
      }
    }
    std::size_t steps = 0;
    const std::size_t limit = 4 * cells_.size() + 16;
    while (steps++ < limit) {
      const Cell& c = cells_[cur];
      if (c.infinite()) return cur;
      bool moved = false;
      for (int j = 0; j < 4; ++j) {
        const int k = static_cast<int>((j + steps) % 4);
        auto v = c.v;
        v[k] = p;
        if (orient(v) < 0) {
          cur = c.n[k];
          moved = true;
          break;
        }
      }
      if (!moved) return cur;
    }
    // Walk did not settle; fall back to a scan.
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(cells_.size()); ++i) {
      if (cells_[i].alive && conflicts(i, p)) return i;
    }
    throw DegenerateInputError("alpha shape: failed to locate point " + std::to_string(p));
  }

  std::int32_t new_cell(const std::array<std::int32_t, 4>& v) {
    if (!free_.empty()) {
      const auto id = free_.back();
      free_.pop_back();
      cells_[id] = {v, {-1, -1, -1, -1}};
      return id;
    }
    cells_.push_back({v, {-1, -1, -1, -1}});
    return static_cast<std::int32_t>(cells_.size() - 1);
  }

  void insert(std::int32_t p) {
    const auto start = locate(p);
    ++stamp_;
    mark_.resize(cells_.size(), 0);
    std::vector<std::int32_t> cavity{start}, stack{start};
    mark_[start] = stamp_;
    std::vector<std::int32_t> rejected;
    while (!stack.empty()) {
      const auto id = stack.back();
      stack.pop_back();
      for (int k = 0; k < 4; ++k) {
        const auto nb = cells_[id].n[k];
        if (mark_[nb] == stamp_ || mark_[nb] == -stamp_) continue;
        if (conflicts(nb, p)) {
          mark_[nb] = stamp_;
          cavity.push_back(nb);
          stack.push_back(nb);
        } else {
          mark_[nb] = -stamp_;
        }
      }
    }

    struct Boundary {
      std::int32_t outside;
      int outside_face;
      std::array<std::int32_t, 4> v;
    };
    std::vector<Boundary> boundary;
    for (auto id : cavity) {
      for (int k = 0; k < 4; ++k) {
        const auto nb = cells_[id].n[k];
        if (mark_[nb] == stamp_) continue;
        auto v = cells_[id].v;
        v[k] = p;
        const int back = cells_[nb].index_of(neighbor_apex(id, nb));
        boundary.push_back({nb, back, v});
      }
    }
    for (auto id : cavity) {
      cells_[id].alive = false;
      free_.push_back(id);
    }

    std::vector<std::int32_t> created;
    created.reserve(boundary.size());
    for (const auto& b : boundary) {
      const auto id = new_cell(b.v);
      if (static_cast<std::size_t>(id) >= mark_.size()) mark_.resize(cells_.size(), 0);
      mark_[id] = 0;
      const int k = cells_[id].index_of(p);
      cells_[id].n[k] = b.outside;
      cells_[b.outside].n[b.outside_face] = id;
      created.push_back(id);
      if (!cells_[id].infinite()) hint_ = id;
    }
    link_around(created, p);
  }

  // Vertex of `nb` not shared with cell `id`.
  std::int32_t neighbor_apex(std::int32_t id, std::int32_t nb) const {
    for (auto w : cells_[nb].v) {
      if (cells_[id].index_of(w) < 0) return w;
    }
    return kInfinite;
  }

  // Links the new cells to each other across faces that contain p.
  void link_around(const std::vector<std::int32_t>& created, std::int32_t p) {
    std::unordered_map<std::uint64_t, std::pair<std::int32_t, int>> edges;
    edges.reserve(created.size() * 3);
    for (auto id : created) {
      const int pk = cells_[id].index_of(p);
      for (int k = 0; k < 4; ++k) {
        if (k == pk) continue;
        // Face opposite k contains p and the two remaining vertices.
        std::int32_t a = -2, b = -2;
        for (int j = 0; j < 4; ++j) {
          if (j == k || j == pk) continue;
          (a == -2 ? a : b) = cells_[id].v[j];
        }
        if (a > b) std::swap(a, b);
        const std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
                                  static_cast<std::uint32_t>(b);
        const auto it = edges.find(key);
        if (it == edges.end()) {
          edges.emplace(key, std::make_pair(id, k));
        } else {
          cells_[id].n[k] = it->second.first;
          cells_[it->second.first].n[it->second.second] = id;
        }
      }
    }
  }

  std::vector<Vec3> pts_;
  std::vector<Cell> cells_;
  std::vector<std::int32_t> free_;
  std::vector<std::int64_t> mark_;
  std::int64_t stamp_ = 0;
  std::int32_t hint_ = 0;
};

}  // namespace

std::vector<Tetrahedron> delaunay_tetrahedralize(const std::vector<Vec3>& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) {
      throw DegenerateInputError("alpha shape: point " + std::to_string(i) + " is not finite");
    }
  }
  {
    std::vector<std::uint32_t> order(points.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    auto lex = [&](std::uint32_t a, std::uint32_t b) {
      const auto& p = points[a];
      const auto& q = points[b];
      if (p.x() != q.x()) return p.x() < q.x();
      if (p.y() != q.y()) return p.y() < q.y();
      return p.z() < q.z();
    };
    std::sort(order.begin(), order.end(), lex);
    for (std::size_t i = 1; i < order.size(); ++i) {
      if (points[order[i]] == points[order[i - 1]]) {
        throw DegenerateInputError("alpha shape: duplicate points " + std::to_string(order[i - 1]) +
                                   " and " + std::to_string(order[i]));
      }
    }
  }

  const Bounds b = bounds_of(points);
  const double scale = kPerturbation * std::max(b.extent().norm(), 1e-300);
  std::vector<Vec3> perturbed(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::uint64_t h = splitmix64(i);
    perturbed[i] = points[i] + scale * Vec3(unit_from_hash(h), unit_from_hash(splitmix64(h)),
                                            unit_from_hash(splitmix64(h ^ 0x5bd1e995ULL)));
  }
  // Coplanarity is judged on the real input so flat inputs are rejected.
  {
    bool flat = true;
    const std::size_t n = points.size();
    if (n >= 4) {
      std::size_t i1 = 0, i2 = 0;
      for (std::size_t i = 1; i < n && !i1; ++i) {
        if (points[i] != points[0]) i1 = i;
      }
      for (std::size_t i = 1; i < n && i1 && !i2; ++i) {
        if ((points[i1] - points[0]).cross(points[i] - points[0]).squaredNorm() > 0.0) i2 = i;
      }
      for (std::size_t i = 1; i < n && i2 && flat; ++i) {
        if (predicates::orient3d(points[0], points[i1], points[i2], points[i]) != 0) flat = false;
      }
    }
    if (flat) throw DegenerateInputError("alpha shape: input is coplanar or has fewer than 4 points");
  }

  Triangulation t(std::move(perturbed));
  t.run();
  return t.finite_cells();
}

}  // namespace hoikit::geometry
