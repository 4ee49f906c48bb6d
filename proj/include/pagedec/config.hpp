#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace pagedec {

/// A length threshold given either as a multiple of the page's line scale or
/// as an absolute pixel count. The absolute value wins when present.
struct ScaledLength {
  double factor = 1.0;
  std::optional<double> pixels;

  [[nodiscard]] double resolve(double line_scale) const {
    return pixels ? *pixels : factor * line_scale;
  }
  friend bool operator==(const ScaledLength&, const ScaledLength&) = default;
};

/// Thrown for configuration values that break an invariant. `key()` names the
/// offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Every threshold used by the decomposition pipeline. Length thresholds are
/// scale-relative by default: smearing, segmentation and the image filter
/// scale with the line height estimated from the edge map; the text-zone
/// rules scale with the dominant line height found during labeling.
struct DecompositionConfig {
  // edge detection
  double canny_sigma = 1.4;
  int canny_radius = 3;
  double canny_low = 50.0;
  double canny_high = 150.0;

  // line bands: rows whose ink count exceeds alpha * width
  double line_band_alpha = 0.1;
  int binarize_threshold = 128;

  // smearing and separators (x line scale)
  ScaledLength h_thresh{1.0, {}};
  ScaledLength v_thresh{0.8, {}};
  ScaledLength final_h{0.5, {}};
  ScaledLength final_v{0.8, {}};
  ScaledLength min_h_gap{0.4, {}};
  ScaledLength min_v_gap{0.6, {}};
  // components whose box is smaller than side^2 are noise
  ScaledLength min_area_side{0.5, {}};

  // text-zone rules (x dominant line height)
  ScaledLength gap1{0.8, {}};
  ScaledLength gap2{0.3, {}};
  ScaledLength x1{1.2, {}};
  ScaledLength x2{2.0, {}};
  ScaledLength x3{2.0, {}};

  // image filters
  ScaledLength img_min_w{3.0, {}};
  ScaledLength img_min_h{3.0, {}};
  double img_density_min = 0.02;
  double img_density_max = 0.15;
  double img_aspect_min = 0.2;
  double img_aspect_max = 5.0;

  // skew and orientation
  double skew_half_range = 10.0;
  double skew_coarse_step = 0.5;
  double skew_fine_step = 0.1;
  // a skew variant counts only if its objective reaches this share of the best
  double skew_credible_ratio = 0.5;
  // no text band in this top share of the page -> use the last line
  double fallback_top_fraction = 0.3;
  // a band is text-like when its pixel ratio reaches this share of the median
  double text_band_ratio = 0.5;
  // shorter bands cannot hold a matra plus a glyph body (pixels)
  int orient_min_line_height = 8;

  friend bool operator==(const DecompositionConfig&, const DecompositionConfig&) = default;
};

/// Pixel thresholds for smearing, segmentation and the image filters, resolved
/// against the line scale of one page.
struct LayoutThresholds {
  double line_scale = 0.0;
  double h_thresh = 0.0;
  double v_thresh = 0.0;
  double final_h = 0.0;
  double final_v = 0.0;
  double min_h_gap = 0.0;
  double min_v_gap = 0.0;
  long long min_area = 1;
  double img_min_w = 0.0;
  double img_min_h = 0.0;
};

/// Text-zone thresholds resolved against the dominant line height.
struct TextRules {
  double gap1 = 0.0;
  double gap2 = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;
};

/// Image filter thresholds in pixels / fractions.
struct ImageFilter {
  double min_w = 0.0;
  double min_h = 0.0;
  double density_min = 0.02;
  double density_max = 0.15;
  double aspect_min = 0.2;
  double aspect_max = 5.0;
};

[[nodiscard]] inline LayoutThresholds resolve_layout(const DecompositionConfig& c,
                                                     double line_scale) {
  LayoutThresholds t;
  t.line_scale = line_scale;
  t.h_thresh = c.h_thresh.resolve(line_scale);
  t.v_thresh = c.v_thresh.resolve(line_scale);
  t.final_h = c.final_h.resolve(line_scale);
  t.final_v = c.final_v.resolve(line_scale);
  t.min_h_gap = c.min_h_gap.resolve(line_scale);
  t.min_v_gap = c.min_v_gap.resolve(line_scale);
  const double side = c.min_area_side.resolve(line_scale);
  t.min_area = std::max(1LL, static_cast<long long>(std::llround(side * side)));
  t.img_min_w = c.img_min_w.resolve(line_scale);
  t.img_min_h = c.img_min_h.resolve(line_scale);
  return t;
}

[[nodiscard]] inline TextRules resolve_text_rules(const DecompositionConfig& c,
                                                  double dominant) {
  return {c.gap1.resolve(dominant), c.gap2.resolve(dominant), c.x1.resolve(dominant),
          c.x2.resolve(dominant), c.x3.resolve(dominant)};
}

[[nodiscard]] inline ImageFilter image_filter(const DecompositionConfig& c,
                                              const LayoutThresholds& t) {
  return {t.img_min_w, t.img_min_h, c.img_density_min, c.img_density_max,
          c.img_aspect_min, c.img_aspect_max};
}

namespace detail {

inline void require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

inline void check_ordered(const ScaledLength& lo, const ScaledLength& hi, bool strict,
                          const char* lo_key, const char* hi_key) {
  // Mixed absolute/relative pairs depend on the page and are checked after
  // resolution.
  if (lo.pixels.has_value() != hi.pixels.has_value()) return;
  const double a = lo.pixels ? *lo.pixels : lo.factor;
  const double b = hi.pixels ? *hi.pixels : hi.factor;
  const bool ok = strict ? a < b : a <= b;
  require(ok, strict ? lo_key : hi_key,
          std::string("must satisfy ") + lo_key + (strict ? " < " : " <= ") + hi_key);
}

inline void check_positive(const ScaledLength& s, const char* key) {
  require(s.factor > 0.0 && std::isfinite(s.factor), key, "factor must be positive");
  if (s.pixels) require(*s.pixels > 0.0 && std::isfinite(*s.pixels), key,
                        "pixel value must be positive");
}

}  // namespace detail

/// Throws ConfigError naming the first offending key.
inline void validate(const DecompositionConfig& c) {
  using detail::require;
  require(c.canny_sigma > 0.0, "canny_sigma", "must be positive");
  require(c.canny_radius >= 1, "canny_radius", "must be >= 1");
  require(c.canny_low > 0.0, "canny_low", "must be positive");
  require(c.canny_low < c.canny_high, "canny_high", "must exceed canny_low");
  require(c.line_band_alpha > 0.0 && c.line_band_alpha < 1.0, "line_band_alpha",
          "must lie in (0, 1)");
  require(c.binarize_threshold >= 1 && c.binarize_threshold <= 255,
          "binarize_threshold", "must lie in [1, 255]");
  detail::check_positive(c.h_thresh, "h_thresh");
  detail::check_positive(c.v_thresh, "v_thresh");
  detail::check_positive(c.final_h, "final_h");
  detail::check_positive(c.final_v, "final_v");
  detail::check_positive(c.min_h_gap, "min_h_gap");
  detail::check_positive(c.min_v_gap, "min_v_gap");
  detail::check_positive(c.min_area_side, "min_area_side");
  detail::check_positive(c.gap1, "gap1");
  detail::check_positive(c.gap2, "gap2");
  detail::check_positive(c.x1, "x1");
  detail::check_positive(c.x2, "x2");
  detail::check_positive(c.x3, "x3");
  detail::check_positive(c.img_min_w, "img_min_w");
  detail::check_positive(c.img_min_h, "img_min_h");
  detail::check_ordered(c.x1, c.x2, true, "x1", "x2");
  detail::check_ordered(c.x2, c.x3, false, "x2", "x3");
  detail::check_ordered(c.gap2, c.gap1, false, "gap2", "gap1");
  require(c.img_density_min >= 0.0 && c.img_density_max <= 1.0, "img_density_max",
          "densities must lie in [0, 1]");
  require(c.img_density_min < c.img_density_max, "img_density_min",
          "must be below img_density_max");
  require(c.img_aspect_min > 0.0, "img_aspect_min", "must be positive");
  require(c.img_aspect_min < c.img_aspect_max, "img_aspect_min",
          "must be below img_aspect_max");
  require(c.skew_half_range > 0.0 && c.skew_half_range <= 15.0, "skew_half_range",
          "must lie in (0, 15]");
  require(c.skew_coarse_step > 0.0, "skew_coarse_step", "must be positive");
  require(c.skew_fine_step > 0.0 && c.skew_fine_step <= c.skew_coarse_step,
          "skew_fine_step", "must lie in (0, skew_coarse_step]");
  require(c.skew_credible_ratio > 0.0 && c.skew_credible_ratio <= 1.0,
          "skew_credible_ratio", "must lie in (0, 1]");
  require(c.fallback_top_fraction > 0.0 && c.fallback_top_fraction < 1.0,
          "fallback_top_fraction", "must lie in (0, 1)");
  require(c.text_band_ratio > 0.0 && c.text_band_ratio <= 1.0, "text_band_ratio",
          "must lie in (0, 1]");
  require(c.orient_min_line_height >= 2, "orient_min_line_height", "must be >= 2");
}

/// Checks the ordering invariants on resolved text rules.
inline void validate(const TextRules& r) {
  detail::require(r.x1 < r.x2, "x1", "resolved x1 must be below x2");
  detail::require(r.x2 <= r.x3, "x3", "resolved x3 must be at least x2");
  detail::require(r.gap2 <= r.gap1, "gap2", "resolved gap2 must not exceed gap1");
}

}  // namespace pagedec
