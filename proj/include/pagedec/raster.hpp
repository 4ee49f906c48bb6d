#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace pagedec {

/// Axis-aligned box with inclusive corners. x grows right, y grows down,
/// origin at the top-left pixel.
struct BBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  [[nodiscard]] int width() const { return x1 - x0 + 1; }
  [[nodiscard]] int height() const { return y1 - y0 + 1; }
  [[nodiscard]] long long area() const {
    return static_cast<long long>(width()) * height();
  }
  [[nodiscard]] bool valid() const { return x0 <= x1 && y0 <= y1; }
  [[nodiscard]] bool contains(int x, int y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
  [[nodiscard]] bool contains(const BBox& o) const {
    return o.x0 >= x0 && o.x1 <= x1 && o.y0 >= y0 && o.y1 <= y1;
  }
  [[nodiscard]] bool intersects(const BBox& o) const {
    return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1;
  }
  [[nodiscard]] BBox united(const BBox& o) const {
    return {std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1),
            std::max(y1, o.y1)};
  }
  [[nodiscard]] long long intersection_area(const BBox& o) const {
    const int w = std::min(x1, o.x1) - std::max(x0, o.x0) + 1;
    const int h = std::min(y1, o.y1) - std::max(y0, o.y0) + 1;
    if (w <= 0 || h <= 0) return 0;
    return static_cast<long long>(w) * h;
  }
  [[nodiscard]] BBox translated(int dx, int dy) const {
    return {x0 + dx, y0 + dy, x1 + dx, y1 + dy};
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Intersection over union of two boxes; 0 when they do not overlap.
[[nodiscard]] inline double iou(const BBox& a, const BBox& b) {
  const long long inter = a.intersection_area(b);
  if (inter == 0) return 0.0;
  return static_cast<double>(inter) /
         static_cast<double>(a.area() + b.area() - inter);
}

/// Dense row-major raster. `Raster<bool>` stores one byte per pixel so rows
/// can be handed out as spans.
template <typename T>
class Raster {
 public:
  using value_type = T;
  using storage_type =
      std::conditional_t<std::is_same_v<T, bool>, std::uint8_t, T>;

  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width),
        height_(height),
        data_(checked_size(width, height), static_cast<storage_type>(fill)) {}
  Raster(int width, int height, std::vector<storage_type> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != checked_size(width, height)) {
      throw std::invalid_argument("raster data length does not match dimensions");
    }
  }

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] bool empty() const { return data_.empty(); }
  [[nodiscard]] std::size_t size() const { return data_.size(); }

  [[nodiscard]] storage_type& operator()(int x, int y) {
    return data_[index(x, y)];
  }
  [[nodiscard]] const storage_type& operator()(int x, int y) const {
    return data_[index(x, y)];
  }

  [[nodiscard]] std::span<storage_type> pixels() { return data_; }
  [[nodiscard]] std::span<const storage_type> pixels() const { return data_; }
  [[nodiscard]] std::span<storage_type> row(int y) {
    return std::span<storage_type>(data_).subspan(index(0, y), width_);
  }
  [[nodiscard]] std::span<const storage_type> row(int y) const {
    return std::span<const storage_type>(data_).subspan(index(0, y), width_);
  }

  [[nodiscard]] BBox bounds() const { return {0, 0, width_ - 1, height_ - 1}; }
  [[nodiscard]] bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  [[nodiscard]] bool in_bounds(const BBox& b) const {
    return b.valid() && in_bounds(b.x0, b.y0) && in_bounds(b.x1, b.y1);
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static std::size_t checked_size(int width, int height) {
    if (width < 0 || height < 0) {
      throw std::invalid_argument("raster dimensions must be non-negative");
    }
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  [[nodiscard]] std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<storage_type> data_;
};

/// 8-bit luminance, 0 = black, 255 = white.
using GrayImage = Raster<std::uint8_t>;
/// true = ink / edge / black.
using BinaryMap = Raster<bool>;

template <typename T>
[[nodiscard]] Raster<T> transpose(const Raster<T>& img) {
  Raster<T> out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out(y, x) = img(x, y);
  return out;
}

/// Lossless counter-clockwise rotation by `turns` quarter turns (as displayed,
/// y down). Any integer is accepted and reduced mod 4.
template <typename T>
[[nodiscard]] Raster<T> rotate_quarter(const Raster<T>& img, int turns) {
  turns = ((turns % 4) + 4) % 4;
  const int w = img.width();
  const int h = img.height();
  switch (turns) {
    case 0:
      return img;
    case 1: {
      Raster<T> out(h, w);
      for (int y = 0; y < w; ++y)
        for (int x = 0; x < h; ++x) out(x, y) = img(w - 1 - y, x);
      return out;
    }
    case 2: {
      Raster<T> out(w, h);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out(x, y) = img(w - 1 - x, h - 1 - y);
      return out;
    }
    default: {
      Raster<T> out(h, w);
      for (int y = 0; y < w; ++y)
        for (int x = 0; x < h; ++x) out(x, y) = img(y, h - 1 - x);
      return out;
    }
  }
}

template <typename T>
[[nodiscard]] Raster<T> crop(const Raster<T>& img, const BBox& box) {
  if (!img.in_bounds(box)) {
    throw std::out_of_range("crop box (" + std::to_string(box.x0) + "," +
                            std::to_string(box.y0) + ")-(" +
                            std::to_string(box.x1) + "," +
                            std::to_string(box.y1) + ") outside " +
                            std::to_string(img.width()) + "x" +
                            std::to_string(img.height()) + " raster");
  }
  Raster<T> out(box.width(), box.height());
  for (int y = 0; y < box.height(); ++y) {
    auto src = img.row(box.y0 + y).subspan(box.x0, box.width());
    std::copy(src.begin(), src.end(), out.row(y).begin());
  }
  return out;
}

/// Number of true pixels of `map` inside `box` (box must be in bounds).
[[nodiscard]] inline long long count_true(const BinaryMap& map, const BBox& box) {
  long long n = 0;
  for (int y = box.y0; y <= box.y1; ++y)
    for (int x = box.x0; x <= box.x1; ++x) n += map(x, y) ? 1 : 0;
  return n;
}

[[nodiscard]] inline long long count_true(const BinaryMap& map) {
  long long n = 0;
  for (auto v : map.pixels()) n += v ? 1 : 0;
  return n;
}

namespace detail {

// Smallest canvas extent >= need whose parity matches `ref`, so that the
// source and destination centers sit on the same half-pixel grid.
inline int expanded_extent(double need, int ref) {
  int n = static_cast<int>(std::ceil(need - 1e-6));
  n = std::max(n, 1);
  if ((n - ref) % 2 != 0) ++n;
  return n;
}

}  // namespace detail

/// Canvas size produced by rotate_by_angle for a width x height source.
struct CanvasSize {
  int width;
  int height;
};

[[nodiscard]] inline CanvasSize rotated_canvas(int width, int height,
                                               double degrees) {
  const double rad = degrees * std::numbers::pi / 180.0;
  const double c = std::abs(std::cos(rad));
  const double s = std::abs(std::sin(rad));
  const double need_w = width * c + height * s;
  const double need_h = width * s + height * c;
  if (c >= s) {
    return {detail::expanded_extent(need_w, width),
            detail::expanded_extent(need_h, height)};
  }
  return {detail::expanded_extent(need_w, height),
          detail::expanded_extent(need_h, width)};
}

/// Rotates content counter-clockwise (as displayed) by `degrees` about the
/// image center. The canvas grows to hold the whole source; uncovered pixels
/// get `fill`. Inverse mapping with bilinear interpolation. Intended for
/// |degrees| <= 45; larger corrections compose with rotate_quarter.
[[nodiscard]] inline GrayImage rotate_by_angle(const GrayImage& img,
                                               double degrees,
                                               std::uint8_t fill = 255) {
  if (degrees == 0.0 || img.empty()) return img;
  const double rad = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  const auto [ow, oh] = rotated_canvas(img.width(), img.height(), degrees);
  GrayImage out(ow, oh, fill);

  const double scx = (img.width() - 1) / 2.0;
  const double scy = (img.height() - 1) / 2.0;
  const double dcx = (ow - 1) / 2.0;
  const double dcy = (oh - 1) / 2.0;
  const int w = img.width();
  const int h = img.height();
  auto sample = [&](int x, int y) -> double {
    if (x < 0 || y < 0 || x >= w || y >= h) return fill;
    return img(x, y);
  };

  for (int y = 0; y < oh; ++y) {
    const double dy = y - dcy;
    for (int x = 0; x < ow; ++x) {
      const double dx = x - dcx;
      const double sx = scx + dx * c - dy * s;
      const double sy = scy + dx * s + dy * c;
      if (sx <= -1.0 || sy <= -1.0 || sx >= w || sy >= h) continue;
      // Snap sub-1e-9 offsets so exact quarter angles stay lossless.
      double fx0 = std::floor(sx);
      double fy0 = std::floor(sy);
      double fx = sx - fx0;
      double fy = sy - fy0;
      if (fx > 1.0 - 1e-9) { fx0 += 1.0; fx = 0.0; }
      if (fy > 1.0 - 1e-9) { fy0 += 1.0; fy = 0.0; }
      if (fx < 1e-9) fx = 0.0;
      if (fy < 1e-9) fy = 0.0;
      const int x0 = static_cast<int>(fx0);
      const int y0 = static_cast<int>(fy0);
      const double top = sample(x0, y0) * (1.0 - fx) + (fx > 0 ? sample(x0 + 1, y0) * fx : 0.0);
      const double bot = fy > 0 ? sample(x0, y0 + 1) * (1.0 - fx) +
                                      (fx > 0 ? sample(x0 + 1, y0 + 1) * fx : 0.0)
                                : 0.0;
      const double v = top * (1.0 - fy) + bot * fy;
      out(x, y) = static_cast<std::uint8_t>(
          std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return out;
}

/// Arbitrary rotation: nearest quarter turn losslessly, remainder by
/// interpolation.
[[nodiscard]] inline GrayImage rotate_any(const GrayImage& img, double degrees,
                                          std::uint8_t fill = 255) {
  const int turns = static_cast<int>(std::lround(degrees / 90.0));
  const double rest = degrees - 90.0 * turns;
  return rotate_by_angle(rotate_quarter(img, turns), rest, fill);
}

}  // namespace pagedec
