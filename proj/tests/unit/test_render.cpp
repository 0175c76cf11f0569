#include "hoikit/error.h"
#include "hoikit/geometry/alpha_shape.h"
#include "hoikit/geometry/primitives.h"
#include "hoikit/hand/hand_model.h"
#include "hoikit/render/hoi.h"
#include "hoikit/render/png.h"
#include "hoikit/render/raster.h"
#include "golden.h"
#include "support.h"

#include <doctest.h>

#include <cmath>

using namespace hoikit;
using namespace hoikit::render;

namespace {

using test::golden_camera;
using test::golden_scene;
using test::kGoldenHash;

Vec3 project(const Camera& c, const Vec3& p) {
  const Vec3 f = (c.look_at - c.eye).normalized();
  const Vec3 r = f.cross(c.up).normalized();
  const Vec3 u = r.cross(f);
  const double focal = 0.5 * c.height / std::tan(0.5 * c.fov_deg * 3.14159265358979323846 / 180.0);
  const Vec3 d = p - c.eye;
  const double z = f.dot(d);
  return Vec3(0.5 * c.width + focal * r.dot(d) / z, 0.5 * c.height - focal * u.dot(d) / z, z);
}

geometry::TriMesh quad(double z, double half) {
  geometry::TriMesh m;
  m.vertices = {Vec3(-half, -half, z), Vec3(half, -half, z), Vec3(half, half, z), Vec3(-half, half, z)};
  m.faces = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

bool is_white(const Image& img, int x, int y) {
  const auto* p = img.at(x, y);
  return p[0] == 255 && p[1] == 255 && p[2] == 255;
}

}  // namespace

TEST_SUITE("rasterize") {
  TEST_CASE("empty scene is white") {
    Camera c;
    c.width = 17;
    c.height = 9;
    const Image img = rasterize({}, c);
    CHECK(img.pixels.size() == 3 * 17 * 9);
    CHECK(std::all_of(img.pixels.begin(), img.pixels.end(), [](std::uint8_t v) { return v == 255; }));
  }

  TEST_CASE("facing triangle is shaded by the facing cosine") {
    Camera c;
    c.eye = Vec3(0.0, 0.0, 2.0);
    c.width = c.height = 64;
    geometry::TriMesh tri;
    tri.vertices = {Vec3(-0.3, -0.3, 0.0), Vec3(0.3, -0.3, 0.0), Vec3(0.0, 0.4, 0.0)};
    tri.faces = {{0, 1, 2}};
    const std::vector<ColoredMesh> scene{{tri, Vec3(0.8, 0.5, 0.2)}};
    const Image img = rasterize(scene, c);
    const Vec3 centroid = (tri.vertices[0] + tri.vertices[1] + tri.vertices[2]) / 3.0;
    const double cosine = (c.eye - centroid).normalized().z();
    const auto* p = img.at(32, 32);
    CHECK(p[0] == static_cast<int>(std::round(255.0 * 0.8 * cosine)));
    CHECK(p[1] == static_cast<int>(std::round(255.0 * 0.5 * cosine)));
    CHECK(p[2] == static_cast<int>(std::round(255.0 * 0.2 * cosine)));
    CHECK(is_white(img, 0, 0));
    // Reversed winding renders the same.
    geometry::TriMesh flipped = tri;
    flipped.faces = {{0, 2, 1}};
    const std::vector<ColoredMesh> scene2{{flipped, Vec3(0.8, 0.5, 0.2)}};
    CHECK(rasterize(scene2, c).pixels == img.pixels);
  }

  TEST_CASE("near surfaces hide far ones in either draw order") {
    Camera c;
    c.eye = Vec3(0.0, 0.0, 3.0);
    c.width = c.height = 48;
    const ColoredMesh front{quad(0.5, 0.3), Vec3(1.0, 0.0, 0.0)};
    const ColoredMesh back{quad(-0.5, 0.6), Vec3(0.0, 0.0, 1.0)};
    for (bool front_first : {true, false}) {
      std::vector<ColoredMesh> scene = front_first ? std::vector{front, back} : std::vector{back, front};
      const Image img = rasterize(scene, c);
      const Vec3 corner = project(c, Vec3(0.3, 0.3, 0.5));
      const Vec3 other = project(c, Vec3(-0.3, -0.3, 0.5));
      for (int y = 0; y < c.height; ++y)
        for (int x = 0; x < c.width; ++x) {
          const double px = x + 0.5, py = y + 0.5;
          const bool inside_front = px > other.x() + 1e-9 && px < corner.x() - 1e-9 && py > corner.y() + 1e-9 &&
                                    py < other.y() - 1e-9;
          if (inside_front) CHECK(img.at(x, y)[2] == 0);
        }
    }
  }

  TEST_CASE("depth ties keep the lower mesh id") {
    Camera c;
    c.eye = Vec3(0.0, 0.0, 2.0);
    c.width = c.height = 32;
    const std::vector<ColoredMesh> scene{{quad(0.0, 0.4), Vec3(1.0, 0.0, 0.0)}, {quad(0.0, 0.4), Vec3(0.0, 1.0, 0.0)}};
    const Image img = rasterize(scene, c);
    CHECK(img.at(16, 16)[0] > 0);
    CHECK(img.at(16, 16)[1] == 0);
  }

  TEST_CASE("geometry behind the eye is skipped") {
    Camera c;
    c.eye = Vec3(0.0, 0.0, 1.0);
    c.width = c.height = 16;
    const std::vector<ColoredMesh> scene{{quad(2.0, 0.5), Vec3(0.0, 0.0, 0.0)}};
    const Image img = rasterize(scene, c);
    CHECK(std::all_of(img.pixels.begin(), img.pixels.end(), [](std::uint8_t v) { return v == 255; }));
  }

  TEST_CASE("invalid cameras are rejected") {
    Camera c;
    c.width = 0;
    CHECK_THROWS_AS(rasterize({}, c), InvalidArgument);
    c = Camera{};
    c.fov_deg = 180.0;
    CHECK_THROWS_AS(rasterize({}, c), InvalidArgument);
    c = Camera{};
    c.look_at = c.eye;
    CHECK_THROWS_AS(rasterize({}, c), InvalidArgument);
    c = Camera{};
    c.up = Vec3(0.0, 0.0, 1.0);
    CHECK_THROWS_AS(rasterize({}, c), InvalidArgument);
  }

  TEST_CASE("golden scene hash") {
    const auto scene = golden_scene();
    const Image a = rasterize(scene, golden_camera());
    const Image b = rasterize(scene, golden_camera());
    CHECK(a.pixels == b.pixels);
    CHECK(image_sha256(a) == kGoldenHash);
  }
}

TEST_SUITE("camera") {
  TEST_CASE("unit box projects inside the viewport") {
    const Camera c = default_hoi_camera(Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5));
    CHECK(c.width == 512);
    CHECK(c.height == 512);
    CHECK(c.fov_deg == 45.0);
    for (int i = 0; i < 8; ++i) {
      const Vec3 p((i & 1) ? 0.5 : -0.5, (i & 2) ? 0.5 : -0.5, (i & 4) ? 0.5 : -0.5);
      const Vec3 s = project(c, p);
      CHECK(s.z() > 0.0);
      CHECK(s.x() > 0.0);
      CHECK(s.x() < c.width);
      CHECK(s.y() > 0.0);
      CHECK(s.y() < c.height);
    }
    const Vec3 dir = (c.eye - c.look_at).normalized();
    CHECK((dir - Vec3(1.0, 1.0, 1.0).normalized()).norm() < 1e-12);
  }

  TEST_CASE("translated bounds give the same framing") {
    const Vec3 lo(-0.2, 0.1, -0.4), hi(0.3, 0.5, 0.2), shift(3.0, -2.0, 7.5);
    const Camera a = default_hoi_camera(lo, hi);
    const Camera b = default_hoi_camera(lo + shift, hi + shift);
    CHECK(((b.eye - b.look_at) - (a.eye - a.look_at)).norm() < 1e-12);
    CHECK(((b.look_at - a.look_at) - shift).norm() < 1e-12);
  }

  TEST_CASE("zero extent bounds fall back to distance 1") {
    const Vec3 p(0.3, -0.2, 0.1);
    const Camera c = default_hoi_camera(p, p);
    CHECK((c.eye - c.look_at).norm() == doctest::Approx(1.0));
    CHECK((c.look_at - p).norm() == 0.0);
  }

  TEST_CASE("bounding sphere with margin touches the field of view") {
    const Vec3 lo(-1.0, -1.0, -1.0), hi(1.0, 1.0, 1.0);
    const Camera c = default_hoi_camera(lo, hi);
    const double r = 1.1 * std::sqrt(3.0);
    const double d = (c.eye - c.look_at).norm();
    CHECK(std::asin(r / d) == doctest::Approx(22.5 * 3.14159265358979323846 / 180.0));
  }
}

TEST_SUITE("png") {
  TEST_CASE("1x1 white round trip") {
    test::TempDir dir("png");
    const Image img = Image::white(1, 1);
    write_png(img, dir / "w.png");
    const Image back = read_png(dir / "w.png");
    CHECK(back.width == 1);
    CHECK(back.height == 1);
    CHECK(back.pixels == std::vector<std::uint8_t>{255, 255, 255});
  }

  TEST_CASE("golden image round trip") {
    const Image img = rasterize(golden_scene(), golden_camera());
    const Image back = decode_png(encode_png(img));
    CHECK(back.width == img.width);
    CHECK(back.height == img.height);
    CHECK(back.pixels == img.pixels);
  }

  TEST_CASE("zero size image is rejected") {
    Image img;
    CHECK_THROWS_AS(encode_png(img), InvalidArgument);
    CHECK_THROWS_AS(Image::white(0, 3), InvalidArgument);
  }

  TEST_CASE("io and decode failures") {
    CHECK_THROWS_AS(write_png(Image::white(2, 2), "/nonexistent_dir/x.png"), IoError);
    CHECK_THROWS_AS(read_png("/nonexistent_dir/x.png"), IoError);
    const std::vector<std::uint8_t> junk{1, 2, 3, 4};
    CHECK_THROWS_AS(decode_png(junk), ParseError);
  }
}

TEST_SUITE("hoi render") {
  TEST_CASE("hand and object both appear") {
    hoiopt::HoiScene scene;
    scene.object_vertices = geometry::make_icosphere(0.05, 2).vertices;
    scene.concise = geometry::make_concise(geometry::make_icosphere(0.05, 2));
    scene.hand = std::make_shared<hand::HandModel>(hand::make_test_hand());
    scene.init = hoiopt::HoiParams::rest(*scene.hand, 1.0);
    scene.init.translation = Vec3(-0.048, -0.066, 0.0);
    const Camera cam = hoi_camera(scene, scene.init, 96, 96);
    const Image img = render_hoi(scene, scene.init, cam);
    std::size_t object = 0, hand = 0;
    for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
      const int r = img.pixels[i], b = img.pixels[i + 2];
      if (r == 255 && b == 255 && img.pixels[i + 1] == 255) continue;
      (b > r ? object : hand) += 1;
    }
    CHECK(object > 50);
    CHECK(hand > 50);
  }
}
