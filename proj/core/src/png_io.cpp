#include "viewaug/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

#include "viewaug/error.hpp"

namespace viewaug {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FileHandle = std::unique_ptr<std::FILE, FileCloser>;

FileHandle open_file(const std::filesystem::path& path, const char* mode) {
  FileHandle f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return f;
}

void silent_warning(png_structp, png_const_charp) {}

void write_png(const std::filesystem::path& path, int width, int height, int channels, int bit_depth,
               const std::vector<std::uint16_t>& samples) {
  FileHandle file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, silent_warning);
  if (!png) throw Error(ErrorCode::kIo, "libpng init failed");
  png_infop info = png_create_info_struct(png);

  const std::size_t bytes_per_sample = bit_depth == 16 ? 2 : 1;
  const std::size_t stride = static_cast<std::size_t>(width) * channels * bytes_per_sample;
  std::vector<unsigned char> buffer(stride * static_cast<std::size_t>(height));
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (bit_depth == 16) {
      buffer[2 * i] = static_cast<unsigned char>(samples[i] >> 8);
      buffer[2 * i + 1] = static_cast<unsigned char>(samples[i] & 0xff);
    } else {
      buffer[i] = static_cast<unsigned char>(samples[i]);
    }
  }
  for (int y = 0; y < height; ++y) rows[static_cast<std::size_t>(y)] = buffer.data() + stride * y;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIo, "failed to encode '" + path.string() + "'");
  }
  png_init_io(png, file.get());
  const int color_type = channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::uint16_t quantize(double v, double max_value) {
  return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * max_value));
}

}  // namespace

DecodedPng read_png(const std::filesystem::path& path) {
  FileHandle file = open_file(path, "rb");
  unsigned char signature[8];
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    throw Error(ErrorCode::kIo, "'" + path.string() + "' is not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, silent_warning);
  if (!png) throw Error(ErrorCode::kIo, "libpng init failed");
  png_infop info = png_create_info_struct(png);

  DecodedPng out;
  std::vector<unsigned char> buffer;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kIo, "failed to decode '" + path.string() + "'");
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  buffer.resize(stride * static_cast<std::size_t>(out.height));
  rows.resize(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) rows[static_cast<std::size_t>(y)] = buffer.data() + stride * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t n = static_cast<std::size_t>(out.width) * out.height * out.channels;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.samples[i] = out.bit_depth == 16
                         ? static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1])
                         : static_cast<std::uint16_t>(buffer[i]);
  }
  return out;
}

Image read_png_rgb(const std::filesystem::path& path, const Rgb& background) {
  const DecodedPng png = read_png(path);
  Image img = make_image(png.width, png.height);
  const double scale = 1.0 / png.max_value();
  const auto ch = static_cast<std::size_t>(png.channels);
  const bool gray = png.channels <= 2;
  const bool alpha = png.channels == 2 || png.channels == 4;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const std::uint16_t* s = png.samples.data() + p * ch;
    const double a = alpha ? s[ch - 1] * scale : 1.0;
    for (std::size_t c = 0; c < 3; ++c) {
      const double v = (gray ? s[0] : s[c]) * scale;
      img[p * 3 + c] = alpha ? v * a + background[c] * (1.0 - a) : v;
    }
  }
  return img;
}

Raster<std::uint16_t> read_png_gray(const std::filesystem::path& path) {
  const DecodedPng png = read_png(path);
  Raster<std::uint16_t> out(png.width, png.height, 1);
  const auto ch = static_cast<std::size_t>(png.channels);
  for (std::size_t p = 0; p < out.pixel_count(); ++p) out[p] = png.samples[p * ch];
  return out;
}

void write_png_rgb8(const std::filesystem::path& path, const Image& image) {
  if (image.channels() != 3) throw Error(ErrorCode::kShape, "write_png_rgb8 expects 3 channels");
  std::vector<std::uint16_t> samples(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) samples[i] = quantize(image[i], 255.0);
  write_png(path, image.width(), image.height(), 3, 8, samples);
}

void write_png_gray8(const std::filesystem::path& path, const Raster<std::uint8_t>& gray) {
  std::vector<std::uint16_t> samples(gray.pixel_count());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = gray[i * static_cast<std::size_t>(gray.channels())];
  write_png(path, gray.width(), gray.height(), 1, 8, samples);
}

void write_png_gray16(const std::filesystem::path& path, const Raster<std::uint16_t>& gray) {
  std::vector<std::uint16_t> samples(gray.pixel_count());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = gray[i * static_cast<std::size_t>(gray.channels())];
  write_png(path, gray.width(), gray.height(), 1, 16, samples);
}

void write_mask_png(const std::filesystem::path& path, const Mask& mask) {
  Raster<std::uint8_t> gray(mask.width(), mask.height(), 1);
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = mask[i] != 0 ? 255 : 0;
  write_png_gray8(path, gray);
}

Mask read_mask_png(const std::filesystem::path& path) {
  const Raster<std::uint16_t> gray = read_png_gray(path);
  Mask mask = make_mask(gray.width(), gray.height());
  for (std::size_t i = 0; i < gray.size(); ++i) {
    if (gray[i] != 0 && gray[i] != 255) {
      throw Error(ErrorCode::kDomain, "mask '" + path.string() + "' holds value " + std::to_string(gray[i]) +
                                          " (expected 0 or 255)");
    }
    mask[i] = gray[i] == 255 ? 1 : 0;
  }
  return mask;
}

void write_unit_map_png16(const std::filesystem::path& path, const ScalarMap& map) {
  Raster<std::uint16_t> gray(map.width(), map.height(), 1);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    std::uint16_t q = quantize(map[i], 65535.0);
    if (q == 0 && map[i] > 0.0) q = 1;
    gray[i] = q;
  }
  write_png_gray16(path, gray);
}

ScalarMap read_unit_map_png16(const std::filesystem::path& path) {
  const DecodedPng png = read_png(path);
  if (png.bit_depth != 16) {
    throw Error(ErrorCode::kDomain, "'" + path.string() + "' must be a 16-bit PNG");
  }
  ScalarMap map = make_scalar_map(png.width, png.height);
  const auto ch = static_cast<std::size_t>(png.channels);
  for (std::size_t p = 0; p < map.size(); ++p) map[p] = png.samples[p * ch] / 65535.0;
  return map;
}

}  // namespace viewaug
