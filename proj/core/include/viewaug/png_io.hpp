#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "viewaug/point_cloud.hpp"
#include "viewaug/raster.hpp"

namespace viewaug {

/// Raw PNG samples after palette / low-bit-depth expansion. Samples keep the
/// file's bit depth (8 or 16) and are interleaved per pixel.
struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 8;
  std::vector<std::uint16_t> samples;

  double max_value() const noexcept { return bit_depth == 16 ? 65535.0 : 255.0; }
};

DecodedPng read_png(const std::filesystem::path& path);

/// RGB(A) or gray PNG as an RGB image in [0,1]; alpha is composited over `background`.
Image read_png_rgb(const std::filesystem::path& path, const Rgb& background = kWhite);
/// First channel of a PNG as integer samples (8- or 16-bit).
Raster<std::uint16_t> read_png_gray(const std::filesystem::path& path);

/// 8-bit RGB, values rounded from [0,1] after clamping.
void write_png_rgb8(const std::filesystem::path& path, const Image& image);
void write_png_gray8(const std::filesystem::path& path, const Raster<std::uint8_t>& gray);
void write_png_gray16(const std::filesystem::path& path, const Raster<std::uint16_t>& gray);

/// 0/1 mask to 0/255 and back. Reading rejects any other value.
void write_mask_png(const std::filesystem::path& path, const Mask& mask);
Mask read_mask_png(const std::filesystem::path& path);

/// Map in [0,1] quantized to 16 bits. Strictly positive values never round
/// to 0 so that "weight > 0" survives the round trip.
void write_unit_map_png16(const std::filesystem::path& path, const ScalarMap& map);
ScalarMap read_unit_map_png16(const std::filesystem::path& path);

}  // namespace viewaug
