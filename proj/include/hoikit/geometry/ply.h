#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace hoikit::geometry::ply {

/// One element block of a PLY file with scalar properties widened to double
/// and list properties stored as integer index lists.
struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<std::string> scalar_names;
  std::map<std::string, std::vector<double>> scalars;
  std::map<std::string, std::vector<std::vector<std::int64_t>>> lists;

  bool has(const std::string& property) const { return scalars.count(property) != 0; }
  const std::vector<double>& column(const std::string& property) const;
};

struct Document {
  std::vector<Element> elements;

  const Element* find(const std::string& name) const;
};

/// Reads ASCII or binary little-endian PLY.
Document read(const std::filesystem::path& path);

enum class Encoding { ascii, binary_little_endian };

/// Scalar property type used when writing.
enum class ScalarType { float32, float64, uint8, int32 };

struct ScalarColumn {
  std::string name;
  ScalarType type = ScalarType::float64;
  std::vector<double> values;
};

struct OutElement {
  std::string name;
  std::size_t count = 0;
  std::vector<ScalarColumn> columns;
  /// Optional `property list uchar int <list_name>`.
  std::string list_name;
  std::vector<std::vector<std::int64_t>> list_values;
};

void write(const std::filesystem::path& path, const std::vector<OutElement>& elements,
           Encoding encoding);

}  // namespace hoikit::geometry::ply
