#include "hoikit/gaussmap/gaussians.h"

#include "hoikit/error.h"
#include "hoikit/geometry/ply.h"

#include <cmath>
#include <set>

namespace hoikit::gaussmap {

void GaussianSet::validate() const {
  const auto n = positions.size();
  if (scales.size() != n || colors.size() != n || opacities.size() != n ||
      orientations.size() != n) {
    throw InvalidArgument("gaussians: attribute arrays differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if ((scales[i].array() <= 0.0).any()) {
      throw InvalidArgument("gaussians: non-positive scale at " + std::to_string(i));
    }
    if (std::abs(orientations[i].norm() - 1.0) > 1e-6) {
      throw InvalidArgument("gaussians: quaternion " + std::to_string(i) + " is not unit");
    }
    if (opacities[i] < min_opacity || opacities[i] > 1.0) {
      throw InvalidArgument("gaussians: opacity " + std::to_string(i) + " outside [" +
                            std::to_string(min_opacity) + ", 1]");
    }
  }
}

BoundGaussians bind_vertices(const geometry::TriMesh& mesh, double min_opacity) {
  if (mesh.vertices.empty()) throw InvalidArgument("bind_vertices: empty mesh");
  if (min_opacity < 0.0 || min_opacity > 1.0) {
    throw InvalidArgument("bind_vertices: min_opacity must lie in [0, 1]");
  }
  geometry::validate(mesh);
  const auto n = mesh.vertices.size();

  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) edges.insert(std::minmax(f[k], f[(k + 1) % 3]));
  }
  std::vector<double> length_sum(n, 0.0);
  std::vector<int> degree(n, 0);
  double total = 0.0;
  for (const auto& [a, b] : edges) {
    const double len = (mesh.vertices[a] - mesh.vertices[b]).norm();
    length_sum[a] += len;
    length_sum[b] += len;
    ++degree[a];
    ++degree[b];
    total += len;
  }
  // Isolated vertices fall back to the global mean edge length.
  const double fallback = edges.empty() ? 1.0 : total / static_cast<double>(edges.size());

  BoundGaussians out;
  auto& g = out.gaussians;
  g.min_opacity = min_opacity;
  g.positions = mesh.vertices;
  g.scales.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = degree[i] > 0 ? length_sum[i] / degree[i] : fallback;
    if (!(mean > 0.0)) mean = fallback;
    g.scales.push_back(Vec3::Constant(0.5 * mean));
  }
  g.colors.assign(n, Vec3::Constant(0.5));
  g.opacities.assign(n, min_opacity);
  g.orientations.assign(n, Eigen::Quaterniond::Identity());
  out.map.reference = mesh.vertices;
  out.map.faces = mesh.faces;
  return out;
}

namespace {

const char* const kFields[] = {"x",     "y",     "z",    "scale_x", "scale_y", "scale_z", "red",
                               "green", "blue",  "opacity", "quat_w", "quat_x", "quat_y", "quat_z"};

}  // namespace

void save_gaussians(const GaussianSet& set, const std::filesystem::path& path) {
  set.validate();
  geometry::ply::OutElement el{.name = "vertex", .count = set.size()};
  for (const char* name : kFields) {
    el.columns.push_back({.name = name, .type = geometry::ply::ScalarType::float64});
    el.columns.back().values.reserve(set.size());
  }
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& q = set.orientations[i];
    const double row[14] = {set.positions[i].x(), set.positions[i].y(), set.positions[i].z(),
                            set.scales[i].x(),    set.scales[i].y(),    set.scales[i].z(),
                            set.colors[i].x(),    set.colors[i].y(),    set.colors[i].z(),
                            set.opacities[i],     q.w(),                q.x(),
                            q.y(),                q.z()};
    for (int k = 0; k < 14; ++k) el.columns[k].values.push_back(row[k]);
  }
  geometry::ply::write(path, {el}, geometry::ply::Encoding::binary_little_endian);
}

GaussianSet load_gaussians(const std::filesystem::path& path, double min_opacity) {
  const auto doc = geometry::ply::read(path);
  const auto* el = doc.find("vertex");
  if (el == nullptr) throw ParseError("gaussians: no vertex element in '" + path.string() + "'");
  std::vector<const std::vector<double>*> cols;
  for (const char* name : kFields) cols.push_back(&el->column(name));
  GaussianSet g;
  g.min_opacity = min_opacity;
  for (std::size_t i = 0; i < el->count; ++i) {
    auto c = [&](int k) { return (*cols[k])[i]; };
    g.positions.emplace_back(c(0), c(1), c(2));
    g.scales.emplace_back(c(3), c(4), c(5));
    g.colors.emplace_back(c(6), c(7), c(8));
    g.opacities.push_back(c(9));
    g.orientations.emplace_back(c(10), c(11), c(12), c(13));
  }
  g.validate();
  return g;
}

}  // namespace hoikit::gaussmap
