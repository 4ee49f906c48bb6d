#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pagedec/raster.hpp"

namespace pagedec {

/// Sobel responses of an image. Border pixels carry zero gradient.
struct GradientField {
  Raster<float> gx;
  Raster<float> gy;
  Raster<float> magnitude;
  Raster<float> direction;  // atan2(gy, gx), radians in (-pi, pi]
};

struct CannyParams {
  double sigma = 1.4;
  int radius = 0;  // 0: ceil(2 * sigma)
  double low = 50.0;
  double high = 150.0;

  [[nodiscard]] int effective_radius() const {
    return radius > 0 ? radius : std::max(1, static_cast<int>(std::ceil(2.0 * sigma)));
  }
};

/// Normalized 1-D Gaussian of length 2 * radius + 1.
[[nodiscard]] inline std::vector<double> gaussian_kernel(double sigma, int radius) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian sigma must be positive");
  if (radius < 1) throw std::invalid_argument("gaussian radius must be >= 1");
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (auto& v : k) v /= sum;
  return k;
}

/// Separable Gaussian smoothing, horizontal then vertical, with clamped
/// borders. Intermediate values stay in floating point; one rounding at the end.
[[nodiscard]] inline GrayImage gaussian_blur(const GrayImage& img, double sigma,
                                             int radius) {
  const auto k = gaussian_kernel(sigma, radius);
  const int w = img.width();
  const int h = img.height();
  Raster<double> tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int sx = std::clamp(x + i, 0, w - 1);
        acc += k[i + radius] * img(sx, y);
      }
      tmp(x, y) = acc;
    }
  }
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int sy = std::clamp(y + i, 0, h - 1);
        acc += k[i + radius] * tmp(x, sy);
      }
      out(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
    }
  }
  return out;
}

[[nodiscard]] inline GradientField sobel(const GrayImage& img) {
  const int w = img.width();
  const int h = img.height();
  if (w < 3 || h < 3) {
    throw std::invalid_argument("sobel needs at least a 3x3 image, got " +
                                std::to_string(w) + "x" + std::to_string(h));
  }
  GradientField g{Raster<float>(w, h), Raster<float>(w, h), Raster<float>(w, h),
                  Raster<float>(w, h)};
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const int a = img(x - 1, y - 1), b = img(x, y - 1), c = img(x + 1, y - 1);
      const int d = img(x - 1, y), f = img(x + 1, y);
      const int p = img(x - 1, y + 1), q = img(x, y + 1), r = img(x + 1, y + 1);
      const auto gx = static_cast<float>((c + 2 * f + r) - (a + 2 * d + p));
      const auto gy = static_cast<float>((p + 2 * q + r) - (a + 2 * b + c));
      g.gx(x, y) = gx;
      g.gy(x, y) = gy;
      g.magnitude(x, y) = std::sqrt(gx * gx + gy * gy);
      g.direction(x, y) = std::atan2(gy, gx);
    }
  }
  return g;
}

/// Gradient direction quantized to 0, 45, 90 or 135 degrees (bin 0..3).
[[nodiscard]] inline int direction_bin(float radians) {
  double deg = radians * 180.0 / std::numbers::pi;
  if (deg < 0) deg += 180.0;
  if (deg >= 180.0) deg -= 180.0;
  if (deg < 22.5 || deg >= 157.5) return 0;
  if (deg < 67.5) return 1;
  if (deg < 112.5) return 2;
  return 3;
}

/// Pixel offset along the gradient for a direction bin (y grows down).
inline constexpr int kBinDx[4] = {1, 1, 0, -1};
inline constexpr int kBinDy[4] = {0, 1, 1, 1};

namespace detail {

// Thin-edge candidates: a pixel survives when it beats the neighbor behind it
// along the gradient and is not beaten by the one ahead. Where neighbors fall
// in different direction bins (corners, junctions) three candidates can still
// line up across a gradient, so a second pass drops every candidate whose two
// gradient-direction neighbors are both candidates. The pass reads the first
// pass only, and comes before thresholding, so it does not depend on low/high.
inline Raster<bool> non_max_suppression(const GradientField& g) {
  const int w = g.magnitude.width();
  const int h = g.magnitude.height();
  Raster<bool> keep(w, h);
  Raster<std::uint8_t> bins(w, h);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const float m = g.magnitude(x, y);
      if (m <= 0.0f) continue;
      const int bin = direction_bin(g.direction(x, y));
      bins(x, y) = static_cast<std::uint8_t>(bin);
      const float ahead = g.magnitude(x + kBinDx[bin], y + kBinDy[bin]);
      const float behind = g.magnitude(x - kBinDx[bin], y - kBinDy[bin]);
      keep(x, y) = m > behind && m >= ahead;
    }
  }
  Raster<bool> thin = keep;
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      if (!keep(x, y)) continue;
      const int bin = bins(x, y);
      if (keep(x + kBinDx[bin], y + kBinDy[bin]) && keep(x - kBinDx[bin], y - kBinDy[bin])) {
        thin(x, y) = false;
      }
    }
  }
  return thin;
}

}  // namespace detail

/// Canny edge detector: blur, Sobel, 4-bin non-maximum suppression, double
/// threshold on magnitudes clamped to 255, then breadth-first hysteresis over
/// 8-connected weak pixels.
[[nodiscard]] inline BinaryMap canny(const GrayImage& img, const CannyParams& p) {
  if (!(p.low > 0.0) || !(p.low < p.high)) {
    throw std::invalid_argument("canny thresholds must satisfy 0 < low < high");
  }
  const GrayImage blurred = gaussian_blur(img, p.sigma, p.effective_radius());
  const GradientField g = sobel(blurred);
  const Raster<bool> thin = detail::non_max_suppression(g);
  const int w = img.width();
  const int h = img.height();

  // 0 = none, 1 = weak, 2 = strong
  Raster<std::uint8_t> cls(w, h);
  std::deque<std::pair<int, int>> queue;
  BinaryMap out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!thin(x, y)) continue;
      const double m = std::min<double>(g.magnitude(x, y), 255.0);
      if (m >= p.high) {
        cls(x, y) = 2;
        out(x, y) = true;
        queue.emplace_back(x, y);
      } else if (m >= p.low) {
        cls(x, y) = 1;
      }
    }
  }
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (!out.in_bounds(nx, ny) || out(nx, ny) || cls(nx, ny) != 1) continue;
        out(nx, ny) = true;
        queue.emplace_back(nx, ny);
      }
    }
  }
  return out;
}

[[nodiscard]] inline BinaryMap canny(const GrayImage& img, double low, double high,
                                     double sigma) {
  return canny(img, CannyParams{sigma, 0, low, high});
}

}  // namespace pagedec
