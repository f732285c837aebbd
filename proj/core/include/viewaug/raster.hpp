#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "viewaug/error.hpp"

namespace viewaug {

/// Dense row-major grid with interleaved channels. Used for RGB images,
/// binary masks and single-channel scalar maps alike.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, int channels, T fill = T{})
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels <= 0) {
      throw Error(ErrorCode::kShape, "raster dimensions must be non-negative");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  bool same_shape(const Raster& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }
  template <typename U>
  bool same_extent(const Raster<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

/// RGB image, values in [0,1].
using Image = Raster<double>;
/// Binary mask stored as 0/1.
using Mask = Raster<std::uint8_t>;
/// Single-channel real-valued map (depth, confidence, weights).
using ScalarMap = Raster<double>;

inline Image make_image(int width, int height, double fill = 0.0) { return Image(width, height, 3, fill); }
inline Mask make_mask(int width, int height, std::uint8_t fill = 0) { return Mask(width, height, 1, fill); }
inline ScalarMap make_scalar_map(int width, int height, double fill = 0.0) {
  return ScalarMap(width, height, 1, fill);
}

template <typename A, typename B>
void require_same_extent(const Raster<A>& a, const Raster<B>& b, const char* what) {
  if (!a.same_extent(b)) {
    throw Error(ErrorCode::kShape, std::string(what) + ": " + std::to_string(a.width()) + "x" +
                                       std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                                       "x" + std::to_string(b.height()));
  }
}

}  // namespace viewaug
