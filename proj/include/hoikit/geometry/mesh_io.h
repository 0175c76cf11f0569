#pragma once

#include "hoikit/geometry/types.h"

#include <filesystem>

namespace hoikit::geometry {

enum class MeshFormat { obj, ply, ply_binary };

/// Loads an ASCII OBJ (v/f records; polygons are fan-triangulated) or a PLY
/// file (ASCII or binary little-endian). The format is chosen by extension.
TriMesh load_mesh(const std::filesystem::path& path);

/// Coordinates are written in shortest round-trip form, so ASCII output
/// reloads bit-exactly.
void save_mesh(const TriMesh& mesh, const std::filesystem::path& path,
               MeshFormat format = MeshFormat::ply);

}  // namespace hoikit::geometry
