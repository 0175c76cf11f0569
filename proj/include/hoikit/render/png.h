#pragma once

#include "hoikit/render/raster.h"

#include <filesystem>
#include <vector>

namespace hoikit::render {

/// 8-bit RGB PNG. Throws InvalidArgument for an empty image and IoError when
/// encoding or writing fails.
std::vector<std::uint8_t> encode_png(const Image& image);
void write_png(const Image& image, const std::filesystem::path& path);

/// Decodes any PNG libpng understands into 8-bit RGB.
Image decode_png(std::span<const std::uint8_t> bytes);
Image read_png(const std::filesystem::path& path);

}  // namespace hoikit::render
