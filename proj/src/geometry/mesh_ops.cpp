#include "hoikit/geometry/mesh_ops.h"

#include "hoikit/error.h"

#include <algorithm>
#include <queue>
#include <unordered_map>

namespace hoikit::geometry {
namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::uint64_t directed_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

bool is_degenerate(const TriMesh& mesh, const Face& face) {
  const Vec3& a = mesh.vertices[face[0]];
  const Vec3& b = mesh.vertices[face[1]];
  const Vec3& c = mesh.vertices[face[2]];
  const double cross = (b - a).cross(c - a).norm();
  const double scale = std::max({(b - a).squaredNorm(), (c - a).squaredNorm(),
                                  (c - b).squaredNorm()});
  return cross <= 1e-14 * scale;
}

VertexNormals vertex_normals(const TriMesh& mesh) {
  VertexNormals out;
  out.normals.assign(mesh.vertices.size(), Vec3::Zero());
  for (const auto& f : mesh.faces) {
    if (is_degenerate(mesh, f)) continue;
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    // |cross| is twice the face area, so this is the area weighting.
    const Vec3 n = (b - a).cross(c - a);
    for (auto v : f) out.normals[v] += n;
  }
  for (std::size_t i = 0; i < out.normals.size(); ++i) {
    const double len = out.normals[i].norm();
    if (len > 0.0) {
      out.normals[i] /= len;
    } else {
      out.normals[i].setZero();
      out.isolated.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return out;
}

WatertightReport is_watertight(const TriMesh& mesh) {
  std::unordered_map<std::uint64_t, int> directed;
  std::unordered_map<std::uint64_t, int> undirected;
  std::size_t faces = 0;
  for (const auto& f : mesh.faces) {
    if (is_degenerate(mesh, f)) continue;
    ++faces;
    for (int k = 0; k < 3; ++k) {
      const auto a = f[k];
      const auto b = f[(k + 1) % 3];
      ++directed[directed_key(a, b)];
      ++undirected[edge_key(a, b)];
    }
  }
  WatertightReport r;
  r.edges = undirected.size();
  r.euler_characteristic = static_cast<long>(mesh.vertices.size()) - static_cast<long>(r.edges) +
                           static_cast<long>(faces);
  bool closed = faces > 0;
  for (const auto& [key, count] : undirected) {
    const auto a = static_cast<std::uint32_t>(key >> 32);
    const auto b = static_cast<std::uint32_t>(key & 0xffffffffu);
    const auto ab = directed.find(directed_key(a, b));
    const auto ba = directed.find(directed_key(b, a));
    const bool ok = count == 2 && ab != directed.end() && ab->second == 1 &&
                    ba != directed.end() && ba->second == 1;
    if (!ok) {
      closed = false;
      if (count == 1) ++r.boundary_edges;
    }
  }
  r.watertight = closed;
  return r;
}

Upsampled upsample_to_target(const TriMesh& mesh, std::size_t target) {
  if (target < mesh.vertices.size()) {
    throw InvalidArgument("upsample_to_target: target " + std::to_string(target) +
                          " is below the current vertex count " +
                          std::to_string(mesh.vertices.size()));
  }
  validate(mesh);
  Upsampled out{mesh, {}};
  auto& verts = out.mesh.vertices;
  auto& faces = out.mesh.faces;
  if (target == verts.size()) return out;
  if (faces.empty()) {
    throw InvalidArgument("upsample_to_target: mesh has no edges to split");
  }

  // Edge -> incident face ids. Faces are edited in place (one half keeps the
  // slot, the other half is appended), so ids stay valid.
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> incident;
  incident.reserve(faces.size() * 3);
  for (std::uint32_t f = 0; f < faces.size(); ++f) {
    for (int k = 0; k < 3; ++k) incident[edge_key(faces[f][k], faces[f][(k + 1) % 3])].push_back(f);
  }

  struct Entry {
    double length2;
    std::uint32_t a, b;
    bool operator<(const Entry& o) const {
      // priority_queue pops the largest: longer first, then smaller indices.
      if (length2 != o.length2) return length2 < o.length2;
      if (a != o.a) return a > o.a;
      return b > o.b;
    }
  };
  std::priority_queue<Entry> heap;
  auto push = [&](std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    heap.push({(verts[a] - verts[b]).squaredNorm(), a, b});
  };
  for (const auto& [key, _] : incident) {
    push(static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key & 0xffffffffu));
  }

  auto replace_edge_face = [&](std::uint32_t a, std::uint32_t b, std::uint32_t from,
                               std::uint32_t to) {
    auto& list = incident[edge_key(a, b)];
    std::replace(list.begin(), list.end(), from, to);
  };

  while (verts.size() < target) {
    const Entry e = heap.top();
    heap.pop();
    const auto key = edge_key(e.a, e.b);
    const auto it = incident.find(key);
    if (it == incident.end()) continue;  // stale entry

    const auto m = static_cast<std::uint32_t>(verts.size());
    verts.push_back(0.5 * (verts[e.a] + verts[e.b]));
    out.parents.push_back({e.a, e.b, 0.5});

    const std::vector<std::uint32_t> adjacent = it->second;
    incident.erase(it);
    for (const auto f : adjacent) {
      // Rotate so the split edge is (face[0], face[1]) in face order.
      Face face = faces[f];
      while (edge_key(face[0], face[1]) != key) std::rotate(face.begin(), face.begin() + 1, face.end());
      const auto p = face[0], q = face[1], r = face[2];
      const auto g = static_cast<std::uint32_t>(faces.size());
      faces[f] = {p, m, r};
      faces.push_back({m, q, r});
      incident[edge_key(p, m)].push_back(f);
      incident[edge_key(m, q)].push_back(g);
      incident[edge_key(m, r)].push_back(f);
      incident[edge_key(m, r)].push_back(g);
      replace_edge_face(q, r, f, g);
    }
    push(e.a, m);
    push(m, e.b);
    for (const auto f : adjacent) {
      for (auto v : faces[f]) {
        if (v != m && v != e.a && v != e.b) push(m, v);
      }
    }
  }
  return out;
}

}  // namespace hoikit::geometry
