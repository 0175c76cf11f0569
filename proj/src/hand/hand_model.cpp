#include "hoikit/hand/hand_model.h"

#include "hoikit/geometry/mesh_ops.h"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace hoikit::hand {

using geometry::Face;
using nlohmann::json;

std::vector<int> HandModel::topological_order() const {
  const std::size_t J = parents.size();
  std::vector<std::vector<int>> children(J);
  for (std::size_t j = 1; j < J; ++j) children[static_cast<std::size_t>(parents[j])].push_back(static_cast<int>(j));
  std::vector<int> order;
  order.reserve(J);
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int j = stack.back();
    stack.pop_back();
    order.push_back(j);
    for (auto it = children[j].rbegin(); it != children[j].rend(); ++it) stack.push_back(*it);
  }
  return order;
}

void HandModel::validate() const {
  const std::size_t V = mesh.vertices.size();
  const std::size_t J = parents.size();
  if (V == 0) throw HandModelError("hand model has no vertices");
  try {
    geometry::validate(mesh);
  } catch (const InvalidArgument& e) {
    throw HandModelError(std::string("hand mesh: ") + e.what());
  }
  if (J == 0) throw HandModelError("hand model has no joints");
  if (parents[0] != -1) throw HandModelError("parents[0] must be -1");
  for (std::size_t j = 1; j < J; ++j) {
    if (parents[j] < 0 || static_cast<std::size_t>(parents[j]) >= J || static_cast<std::size_t>(parents[j]) == j)
      throw HandModelError("joint " + std::to_string(j) + " has invalid parent " + std::to_string(parents[j]));
  }
  for (std::size_t j = 1; j < J; ++j) {
    int cur = static_cast<int>(j);
    std::size_t steps = 0;
    while (cur != 0) {
      cur = parents[static_cast<std::size_t>(cur)];
      if (++steps > J) throw HandModelError("parents contain a cycle through joint " + std::to_string(j));
    }
  }
  if (joints_rest.size() != J)
    throw HandModelError("joints_rest has " + std::to_string(joints_rest.size()) + " rows, expected " + std::to_string(J));
  for (const Vec3& p : joints_rest)
    if (!p.allFinite()) throw HandModelError("non-finite rest joint");
  if (static_cast<std::size_t>(weights.rows()) != V || static_cast<std::size_t>(weights.cols()) != J)
    throw HandModelError("weights must be " + std::to_string(V) + "x" + std::to_string(J));
  for (std::size_t v = 0; v < V; ++v) {
    const auto row = weights.row(static_cast<Eigen::Index>(v));
    if (!row.allFinite()) throw HandModelError("non-finite weight in row " + std::to_string(v));
    const double sum = row.sum();
    if (std::abs(sum - 1.0) > 1e-6) {
      std::ostringstream msg;
      msg << "weight row " << v << " sums to " << sum;
      throw HandModelError(msg.str());
    }
  }
  if (fingertips.empty()) throw HandModelError("no fingertip vertices");
  for (auto id : fingertips)
    if (id >= V) throw HandModelError("fingertip id " + std::to_string(id) + " out of range");
  if (pose_blend.size() != 0 &&
      (static_cast<std::size_t>(pose_blend.rows()) != 9 * (J - 1) || static_cast<std::size_t>(pose_blend.cols()) != 3 * V))
    throw HandModelError("pose_blend must be " + std::to_string(9 * (J - 1)) + "x" + std::to_string(3 * V));
}

HandModel upsample_hand(const HandModel& model, std::size_t target) {
  model.validate();
  auto up = geometry::upsample_to_target(model.mesh, target);
  const auto V0 = static_cast<Eigen::Index>(model.num_vertices());
  const auto V = static_cast<Eigen::Index>(up.mesh.vertices.size());
  HandModel out;
  out.parents = model.parents;
  out.joints_rest = model.joints_rest;
  out.fingertips = model.fingertips;
  out.weights.resize(V, model.weights.cols());
  out.weights.topRows(V0) = model.weights;
  const bool blend = model.pose_blend.size() != 0;
  if (blend) {
    out.pose_blend.resize(model.pose_blend.rows(), 3 * V);
    out.pose_blend.leftCols(3 * V0) = model.pose_blend;
  }
  for (Eigen::Index i = V0; i < V; ++i) {
    const auto& link = up.parents[static_cast<std::size_t>(i - V0)];
    const auto a = static_cast<Eigen::Index>(link.a), b = static_cast<Eigen::Index>(link.b);
    out.weights.row(i) = (1.0 - link.weight) * out.weights.row(a) + link.weight * out.weights.row(b);
    if (blend)
      out.pose_blend.middleCols(3 * i, 3) =
          (1.0 - link.weight) * out.pose_blend.middleCols(3 * a, 3) + link.weight * out.pose_blend.middleCols(3 * b, 3);
  }
  out.mesh = std::move(up.mesh);
  out.validate();
  return out;
}

namespace {

Vec3 read_vec3(const json& j, const char* field) {
  if (!j.is_array() || j.size() != 3) throw HandModelError(std::string(field) + ": expected [x,y,z]");
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number()) throw HandModelError(std::string(field) + ": non-numeric coordinate");
    v[k] = j[k].get<double>();
  }
  return v;
}

const json& require(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end()) throw HandModelError(std::string("missing field \"") + field + "\"");
  return *it;
}

// Accepts nested rows or a flat row-major array.
Eigen::MatrixXd read_matrix(const json& j, std::size_t rows, std::size_t cols, const char* field) {
  if (!j.is_array()) throw HandModelError(std::string(field) + ": expected an array");
  Eigen::MatrixXd m(rows, cols);
  if (!j.empty() && j[0].is_array()) {
    if (j.size() != rows) throw HandModelError(std::string(field) + ": expected " + std::to_string(rows) + " rows");
    for (std::size_t r = 0; r < rows; ++r) {
      if (!j[r].is_array() || j[r].size() != cols)
        throw HandModelError(std::string(field) + ": row " + std::to_string(r) + " must have " + std::to_string(cols) + " entries");
      for (std::size_t c = 0; c < cols; ++c) {
        if (!j[r][c].is_number()) throw HandModelError(std::string(field) + ": non-numeric entry");
        m(r, c) = j[r][c].get<double>();
      }
    }
  } else {
    if (j.size() != rows * cols)
      throw HandModelError(std::string(field) + ": expected " + std::to_string(rows * cols) + " values");
    for (std::size_t i = 0; i < rows * cols; ++i) {
      if (!j[i].is_number()) throw HandModelError(std::string(field) + ": non-numeric entry");
      m(i / cols, i % cols) = j[i].get<double>();
    }
  }
  return m;
}

json matrix_rows(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

HandModel load_hand_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open hand model " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw HandModelError("hand model root must be an object");

  HandModel model;
  for (const json& v : require(doc, "vertices")) model.mesh.vertices.push_back(read_vec3(v, "vertices"));
  for (const json& f : require(doc, "faces")) {
    if (!f.is_array() || f.size() != 3) throw HandModelError("faces: expected [i,j,k]");
    Face face;
    for (int k = 0; k < 3; ++k) {
      if (!f[k].is_number_integer() || f[k].get<long long>() < 0) throw HandModelError("faces: invalid index");
      face[k] = f[k].get<std::uint32_t>();
    }
    model.mesh.faces.push_back(face);
  }
  for (const json& p : require(doc, "parents")) {
    if (!p.is_number_integer()) throw HandModelError("parents: expected integers");
    model.parents.push_back(p.get<int>());
  }
  for (const json& p : require(doc, "joints_rest")) model.joints_rest.push_back(read_vec3(p, "joints_rest"));
  for (const json& t : require(doc, "fingertips")) {
    if (!t.is_number_integer() || t.get<long long>() < 0) throw HandModelError("fingertips: invalid index");
    model.fingertips.push_back(t.get<std::uint32_t>());
  }
  const std::size_t V = model.mesh.vertices.size();
  const std::size_t J = model.parents.size();
  model.weights = read_matrix(require(doc, "weights"), V, J, "weights");
  if (auto it = doc.find("pose_blend"); it != doc.end() && !it->is_null()) {
    if (J < 2) throw HandModelError("pose_blend given for a single-joint model");
    model.pose_blend = read_matrix(*it, 9 * (J - 1), 3 * V, "pose_blend");
  }
  model.validate();
  return model;
}

void save_hand_model(const HandModel& model, const std::filesystem::path& path) {
  model.validate();
  json doc;
  json verts = json::array();
  for (const Vec3& v : model.mesh.vertices) verts.push_back({v.x(), v.y(), v.z()});
  json faces = json::array();
  for (const Face& f : model.mesh.faces) faces.push_back({f[0], f[1], f[2]});
  json joints = json::array();
  for (const Vec3& p : model.joints_rest) joints.push_back({p.x(), p.y(), p.z()});
  doc["vertices"] = std::move(verts);
  doc["faces"] = std::move(faces);
  doc["weights"] = matrix_rows(model.weights);
  doc["parents"] = model.parents;
  doc["joints_rest"] = std::move(joints);
  doc["fingertips"] = model.fingertips;
  if (model.pose_blend.size() != 0) doc["pose_blend"] = matrix_rows(model.pose_blend);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write hand model " + path.string());
  out << doc.dump() << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Procedural hand

namespace {

enum class Finger { index, middle, pinky, ring, thumb };

struct FingerSpec {
  Finger finger;
  Vec3 base;
  Vec3 direction;
  std::array<double, 3> lengths;
  double radius;
};

const std::array<FingerSpec, 5>& finger_specs() {
  static const std::array<FingerSpec, 5> specs{{
      {Finger::index, {0.088, 0.0, 0.027}, {1.0, 0.0, 0.05}, {0.038, 0.025, 0.020}, 0.0085},
      {Finger::middle, {0.092, 0.0, 0.009}, {1.0, 0.0, 0.0}, {0.042, 0.028, 0.022}, 0.0088},
      {Finger::pinky, {0.080, 0.0, -0.027}, {1.0, 0.0, -0.08}, {0.030, 0.020, 0.018}, 0.0075},
      {Finger::ring, {0.088, 0.0, -0.009}, {1.0, 0.0, -0.03}, {0.040, 0.026, 0.021}, 0.0083},
      {Finger::thumb, {0.028, -0.004, 0.036}, {0.75, 0.0, 0.66}, {0.035, 0.030, 0.025}, 0.0095},
  }};
  return specs;
}

constexpr double kCupFloor = 0.004;

struct MeshBuilder {
  HandModel& model;
  std::vector<std::vector<std::pair<int, double>>> skin;

  std::uint32_t add(const Vec3& p, std::vector<std::pair<int, double>> w) {
    model.mesh.vertices.push_back(p);
    skin.push_back(std::move(w));
    return static_cast<std::uint32_t>(model.mesh.vertices.size() - 1);
  }
  void tri(std::uint32_t a, std::uint32_t b, std::uint32_t c) { model.mesh.faces.push_back({a, b, c}); }
};

// Closed surface from two poles and `rings` loops of `around` vertices.
// ring_pos(i, k) gives the loop vertices; the first pole sits before ring 0.
template <typename RingFn, typename SkinFn>
std::pair<std::uint32_t, std::uint32_t> build_capsule(MeshBuilder& b, const Vec3& pole_a, const Vec3& pole_b, int rings,
                                                      int around, RingFn ring_pos, SkinFn ring_skin) {
  const std::uint32_t a = b.add(pole_a, ring_skin(-1));
  const std::uint32_t first = static_cast<std::uint32_t>(b.model.mesh.vertices.size());
  for (int i = 0; i < rings; ++i)
    for (int k = 0; k < around; ++k) b.add(ring_pos(i, k), ring_skin(i));
  const std::uint32_t z = b.add(pole_b, ring_skin(rings));
  auto id = [&](int i, int k) { return first + static_cast<std::uint32_t>(i * around + (k % around)); };
  // Loops run counter-clockwise when viewed from pole_b.
  for (int k = 0; k < around; ++k) b.tri(a, id(0, k + 1), id(0, k));
  for (int i = 0; i + 1 < rings; ++i)
    for (int k = 0; k < around; ++k) {
      b.tri(id(i, k), id(i, k + 1), id(i + 1, k + 1));
      b.tri(id(i, k), id(i + 1, k + 1), id(i + 1, k));
    }
  for (int k = 0; k < around; ++k) b.tri(z, id(rings - 1, k), id(rings - 1, k + 1));
  return {a, z};
}

// Orthonormal (u, w) with u x w = d.
std::pair<Vec3, Vec3> frame_for(const Vec3& d) {
  Vec3 helper = std::abs(d.y()) < 0.9 ? Vec3::UnitY() : Vec3::UnitX();
  Vec3 u = helper.cross(d).normalized();
  Vec3 w = d.cross(u);
  return {u, w};
}

}  // namespace

HandModel make_procedural_hand(const ProceduralHandOptions& o) {
  if (o.fingers < 2 || o.fingers > 5) throw InvalidArgument("fingers must be in [2, 5]");
  if (o.segments < 1 || o.segments > 3) throw InvalidArgument("segments must be in [1, 3]");
  if (o.rings_per_segment < 2 || o.ring_vertices < 3 || o.palm_latitudes < 3 || o.palm_longitudes < 3)
    throw InvalidArgument("procedural hand resolution too small");

  // Thumb always; then index, middle, ring, pinky by priority.
  const std::array<Finger, 4> priority{Finger::index, Finger::middle, Finger::ring, Finger::pinky};
  auto selected = [&](Finger f) {
    if (f == Finger::thumb) return true;
    for (int i = 0; i < o.fingers - 1; ++i)
      if (priority[i] == f) return true;
    return false;
  };

  HandModel model;
  MeshBuilder b{model, {}};
  model.parents.push_back(-1);
  model.joints_rest.push_back(Vec3::Zero());

  // Palm: ellipsoid with poles along y.
  const Vec3 palm_center(0.048, 0.0, 0.0);
  const Vec3 palm_radii(0.052, 0.014, 0.044);
  {
    const int lat = o.palm_latitudes, lon = o.palm_longitudes;
    auto shaped = [&](const Vec3& unit) {
      Vec3 p = palm_radii.cwiseProduct(unit);
      if (o.palm_cup_radius > 0.0 && p.y() > 0.0) {
        // The palm side follows the lower of the ellipsoid and a spherical
        // bowl whose bottom sits kCupFloor above the palm centre plane.
        const double R = o.palm_cup_radius;
        const double rho2 = p.x() * p.x() + p.z() * p.z();
        if (rho2 < R * R) p.y() = std::min(p.y(), kCupFloor + R - std::sqrt(R * R - rho2));
      }
      return Vec3(palm_center + p);
    };
    auto ring_pos = [&](int i, int k) {
      const double phi = std::numbers::pi * (i + 1) / lat;  // from -y pole
      const double t = 2.0 * std::numbers::pi * k / lon;
      return shaped(Vec3(std::sin(phi) * std::cos(t), -std::cos(phi), -std::sin(phi) * std::sin(t)));
    };
    auto skin = [](int) { return std::vector<std::pair<int, double>>{{0, 1.0}}; };
    build_capsule(b, shaped(-Vec3::UnitY()), shaped(Vec3::UnitY()), lat - 1, lon, ring_pos, skin);
  }

  std::array<std::uint32_t, 5> tip_of{};
  std::array<bool, 5> has_tip{};
  for (const FingerSpec& spec : finger_specs()) {
    if (!selected(spec.finger)) continue;
    const Vec3 d = spec.direction.normalized();
    const auto [u, w] = frame_for(d);
    Vec3 start = spec.base;
    int parent = 0;
    double radius = spec.radius;
    std::uint32_t distal = 0;
    for (int s = 0; s < o.segments; ++s) {
      const int joint = static_cast<int>(model.parents.size());
      model.parents.push_back(parent);
      model.joints_rest.push_back(start);
      const double len = spec.lengths[static_cast<std::size_t>(s)];
      const Vec3 end = start + len * d;
      const int rings = o.rings_per_segment;
      const int around = o.ring_vertices;
      auto ring_pos = [&](int i, int k) {
        const double t = static_cast<double>(i) / (rings - 1);
        const double ang = 2.0 * std::numbers::pi * k / around;
        return Vec3(start + t * len * d + radius * (std::cos(ang) * u + std::sin(ang) * w));
      };
      auto skin = [&](int i) -> std::vector<std::pair<int, double>> {
        if (i <= 0) return {{joint, 0.5}, {parent, 0.5}};
        if (i == 1) return {{joint, 0.8}, {parent, 0.2}};
        return {{joint, 1.0}};
      };
      const auto poles = build_capsule(b, start - 0.5 * radius * d, end + 0.8 * radius * d, rings, around, ring_pos, skin);
      distal = poles.second;
      parent = joint;
      start = end;
      radius *= 0.9;
    }
    const auto slot = static_cast<std::size_t>(spec.finger);
    tip_of[slot] = distal;
    has_tip[slot] = true;
  }
  for (Finger f : {Finger::thumb, Finger::index, Finger::middle, Finger::ring, Finger::pinky}) {
    const auto slot = static_cast<std::size_t>(f);
    if (has_tip[slot]) model.fingertips.push_back(tip_of[slot]);
  }

  const std::size_t V = model.mesh.vertices.size();
  model.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(V), static_cast<Eigen::Index>(model.parents.size()));
  for (std::size_t v = 0; v < V; ++v)
    for (const auto& [j, wt] : b.skin[v]) model.weights(static_cast<Eigen::Index>(v), j) += wt;
  model.validate();
  return model;
}

HandModel make_test_hand() {
  ProceduralHandOptions o;
  o.fingers = 3;
  o.segments = 2;
  o.rings_per_segment = 6;
  o.ring_vertices = 12;
  o.palm_latitudes = 12;
  o.palm_longitudes = 14;
  return make_procedural_hand(o);
}

}  // namespace hoikit::hand
