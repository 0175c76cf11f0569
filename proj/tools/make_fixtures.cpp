// Regenerates the bundled data/ fixtures from the procedural generators.
#include "hoikit/geometry/mesh_io.h"
#include "hoikit/geometry/primitives.h"
#include "hoikit/hand/hand_model.h"

#include <filesystem>
#include <iostream>

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("data");
  try {
    fs::create_directories(root / "hands");
    fs::create_directories(root / "objects");
    hoikit::hand::save_hand_model(hoikit::hand::make_test_hand(), root / "hands" / "test_hand.json");
    hoikit::hand::save_hand_model(hoikit::hand::make_procedural_hand(), root / "hands" / "mano_layout_hand.json");
    hoikit::geometry::save_mesh(hoikit::geometry::make_icosphere(0.05, 4), root / "objects" / "sphere_r005.ply");
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
