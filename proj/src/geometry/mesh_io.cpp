#include "hoikit/geometry/mesh_io.h"

#include "hoikit/error.h"
#include "hoikit/geometry/ply.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hoikit::geometry {

void validate(const TriMesh& mesh) {
  const auto n = mesh.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!mesh.vertices[i].allFinite()) {
      throw InvalidArgument("mesh: vertex " + std::to_string(i) + " is not finite");
    }
  }
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    for (auto idx : face) {
      if (idx >= n) {
        throw InvalidArgument("mesh: face " + std::to_string(f) + " references vertex " +
                              std::to_string(idx) + " but only " + std::to_string(n) +
                              " vertices exist");
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw InvalidArgument("mesh: face " + std::to_string(f) + " repeats a vertex");
    }
  }
}

Bounds bounds_of(const std::vector<Vec3>& points) {
  Bounds b;
  if (points.empty()) return b;
  b.min = b.max = points.front();
  for (const auto& p : points) {
    b.min = b.min.cwiseMin(p);
    b.max = b.max.cwiseMax(p);
  }
  return b;
}

namespace {

bool has_extension(const std::filesystem::path& path, const char* ext) {
  std::string e = path.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

double parse_double(const std::string& tok, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("obj: bad number '" + tok + "' at line " + std::to_string(line));
  }
  return v;
}

TriMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  TriMesh mesh;
  std::vector<std::pair<std::vector<long long>, std::size_t>> polygons;
  std::set<std::string> ignored;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw) || kw[0] == '#') continue;
    if (kw == "v") {
      std::string x, y, z;
      if (!(ls >> x >> y >> z)) {
        throw ParseError("obj: vertex needs 3 coordinates at line " + std::to_string(line_no));
      }
      mesh.vertices.emplace_back(parse_double(x, line_no), parse_double(y, line_no),
                                 parse_double(z, line_no));
    } else if (kw == "f") {
      std::vector<long long> idx;
      std::string tok;
      while (ls >> tok) {
        const auto slash = tok.find('/');
        const std::string head = tok.substr(0, slash);
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), v);
        if (ec != std::errc() || ptr != head.data() + head.size() || v == 0) {
          throw ParseError("obj: bad face index '" + tok + "' at line " + std::to_string(line_no));
        }
        idx.push_back(v);
      }
      if (idx.size() < 3) {
        throw ParseError("obj: face needs at least 3 indices at line " + std::to_string(line_no));
      }
      polygons.emplace_back(std::move(idx), line_no);
      // Negative indices are relative to the vertices seen so far.
      for (auto& v : polygons.back().first) {
        if (v < 0) v = static_cast<long long>(mesh.vertices.size()) + v + 1;
      }
    } else {
      ignored.insert(kw);
    }
  }
  for (const auto& kw : ignored) {
    spdlog::warn("obj: ignoring '{}' records in {}", kw, path.string());
  }

  const auto n = static_cast<long long>(mesh.vertices.size());
  for (const auto& [poly, ln] : polygons) {
    for (auto v : poly) {
      if (v < 1 || v > n) {
        throw InvalidArgument("obj: face index " + std::to_string(v) + " out of range [1, " +
                              std::to_string(n) + "] at line " + std::to_string(ln));
      }
    }
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
      mesh.faces.push_back({static_cast<std::uint32_t>(poly[0] - 1),
                            static_cast<std::uint32_t>(poly[k] - 1),
                            static_cast<std::uint32_t>(poly[k + 1] - 1)});
    }
  }
  validate(mesh);
  return mesh;
}

TriMesh load_ply(const std::filesystem::path& path) {
  const auto doc = ply::read(path);
  TriMesh mesh;
  if (const auto* v = doc.find("vertex")) {
    const auto& xs = v->column("x");
    const auto& ys = v->column("y");
    const auto& zs = v->column("z");
    mesh.vertices.reserve(v->count);
    for (std::size_t i = 0; i < v->count; ++i) mesh.vertices.emplace_back(xs[i], ys[i], zs[i]);
  }
  if (const auto* f = doc.find("face")) {
    auto it = f->lists.find("vertex_indices");
    if (it == f->lists.end()) it = f->lists.find("vertex_index");
    if (it == f->lists.end()) throw ParseError("ply: face element without vertex_indices");
    const auto n = static_cast<std::int64_t>(mesh.vertices.size());
    for (std::size_t r = 0; r < it->second.size(); ++r) {
      const auto& poly = it->second[r];
      if (poly.size() < 3) {
        throw ParseError("ply: face " + std::to_string(r) + " has fewer than 3 indices");
      }
      for (auto idx : poly) {
        if (idx < 0 || idx >= n) {
          throw InvalidArgument("ply: face " + std::to_string(r) + " index " +
                                std::to_string(idx) + " out of range");
        }
      }
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        mesh.faces.push_back({static_cast<std::uint32_t>(poly[0]),
                              static_cast<std::uint32_t>(poly[k]),
                              static_cast<std::uint32_t>(poly[k + 1])});
      }
    }
  }
  validate(mesh);
  return mesh;
}

void save_obj(const TriMesh& mesh, const std::filesystem::path& path) {
  std::string out;
  char buf[64];
  for (const auto& v : mesh.vertices) {
    out += 'v';
    for (int k = 0; k < 3; ++k) {
      const auto r = std::to_chars(buf, buf + sizeof(buf), v[k]);
      out += ' ';
      out.append(buf, r.ptr);
    }
    out += '\n';
  }
  for (const auto& f : mesh.faces) {
    out += "f " + std::to_string(f[0] + 1) + " " + std::to_string(f[1] + 1) + " " +
           std::to_string(f[2] + 1) + "\n";
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write '" + path.string() + "'");
  file << out;
  if (!file) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

TriMesh load_mesh(const std::filesystem::path& path) {
  if (has_extension(path, ".obj")) return load_obj(path);
  if (has_extension(path, ".ply")) return load_ply(path);
  throw InvalidArgument("unsupported mesh extension: '" + path.string() + "'");
}

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
  validate(mesh);
  if (format == MeshFormat::obj) {
    save_obj(mesh, path);
    return;
  }
  ply::OutElement verts{.name = "vertex", .count = mesh.vertices.size()};
  for (int k = 0; k < 3; ++k) {
    ply::ScalarColumn c{.name = std::string(1, "xyz"[k]), .type = ply::ScalarType::float64};
    c.values.reserve(mesh.vertices.size());
    for (const auto& v : mesh.vertices) c.values.push_back(v[k]);
    verts.columns.push_back(std::move(c));
  }
  ply::OutElement faces{.name = "face", .count = mesh.faces.size(), .list_name = "vertex_indices"};
  faces.list_values.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) faces.list_values.push_back({f[0], f[1], f[2]});
  ply::write(path, {verts, faces},
             format == MeshFormat::ply ? ply::Encoding::ascii : ply::Encoding::binary_little_endian);
}

}  // namespace hoikit::geometry
