#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pagedec/classify.hpp"
#include "pagedec/config.hpp"
#include "pagedec/raster.hpp"

namespace pagedec {

class NoContentError : public std::runtime_error {
 public:
  NoContentError() : std::runtime_error("no content: ink map has no black pixels") {}
};

class OrientationUndecidableError : public std::runtime_error {
 public:
  OrientationUndecidableError()
      : std::runtime_error("orientation undecidable: no text lines in either orientation") {}
};

struct SkewParams {
  double half_range = 10.0;
  double coarse_step = 0.5;
  double fine_step = 0.1;
};

/// Content tilt in degrees, positive = counter-clockwise as displayed.
struct SkewEstimate {
  double angle = 0.0;
  double score = 0.0;  // projection-profile variance at the optimum
  int source_turns = 0;
};

namespace detail {

// Ink coordinates relative to the ink bounding box, which makes the objective
// translation invariant.
struct InkPoints {
  std::vector<int> xs;
  std::vector<int> ys;
  int width = 0;
  int height = 0;
};

inline InkPoints collect_ink(const BinaryMap& ink) {
  int x0 = ink.width(), y0 = ink.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < ink.height(); ++y) {
    for (int x = 0; x < ink.width(); ++x) {
      if (!ink(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  InkPoints pts;
  if (x1 < 0) return pts;
  pts.width = x1 - x0 + 1;
  pts.height = y1 - y0 + 1;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (!ink(x, y)) continue;
      pts.xs.push_back(x - x0);
      pts.ys.push_back(y - y0);
    }
  }
  return pts;
}

// Variance of the horizontal projection after the shear y' = y + x tan(theta),
// over a window wide enough for every angle up to `max_degrees`.
class ShearProfile {
 public:
  ShearProfile(const InkPoints& pts, double max_degrees) : pts_(pts) {
    const double t = std::tan(std::abs(max_degrees) * std::numbers::pi / 180.0);
    offset_ = static_cast<int>(std::ceil(pts.width * t)) + 1;
    bins_.assign(static_cast<std::size_t>(pts.height + 2 * offset_ + 1), 0);
  }

  double operator()(double degrees) {
    std::fill(bins_.begin(), bins_.end(), 0);
    const double t = std::tan(degrees * std::numbers::pi / 180.0);
    const std::size_t n = pts_.xs.size();
    for (std::size_t i = 0; i < n; ++i) {
      const long r = std::lround(pts_.ys[i] + pts_.xs[i] * t) + offset_;
      ++bins_[static_cast<std::size_t>(r)];
    }
    double sum_sq = 0.0;
    for (long long b : bins_) sum_sq += static_cast<double>(b) * static_cast<double>(b);
    const double len = static_cast<double>(bins_.size());
    const double mean = static_cast<double>(n) / len;
    return sum_sq / len - mean * mean;
  }

 private:
  const InkPoints& pts_;
  int offset_ = 0;
  std::vector<long long> bins_;
};

}  // namespace detail

/// Projection-profile variance of `ink` sheared for a tilt of `degrees`.
[[nodiscard]] inline double skew_objective(const BinaryMap& ink, double degrees,
                                           double window_degrees = 15.0) {
  const auto pts = detail::collect_ink(ink);
  if (pts.xs.empty()) throw NoContentError();
  detail::ShearProfile f(pts, std::max(window_degrees, std::abs(degrees)));
  return f(degrees);
}

/// Coarse then fine sweep of the shear-profile variance; the fine optimum is
/// refined by fitting a parabola through it and its two neighbors. Ties go to
/// the smaller |angle|.
[[nodiscard]] inline SkewEstimate skew_angle(const BinaryMap& ink, const SkewParams& p) {
  if (!(p.half_range > 0.0 && p.half_range <= 15.0)) {
    throw std::invalid_argument("skew half range must lie in (0, 15] degrees");
  }
  if (!(p.fine_step > 0.0 && p.fine_step <= p.coarse_step)) {
    throw std::invalid_argument("skew steps must satisfy 0 < fine <= coarse");
  }
  const auto pts = detail::collect_ink(ink);
  if (pts.xs.empty()) throw NoContentError();
  detail::ShearProfile f(pts, p.half_range);

  double best_angle = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  auto consider = [&](double a, double v) {
    if (v > best || (v == best && std::abs(a) < std::abs(best_angle))) {
      best = v;
      best_angle = a;
    }
  };
  const int coarse_n = static_cast<int>(std::floor(p.half_range / p.coarse_step + 1e-9));
  for (int i = -coarse_n; i <= coarse_n; ++i) {
    const double a = i * p.coarse_step;
    consider(a, f(a));
  }
  const double center = best_angle;
  const int fine_n = static_cast<int>(std::lround(p.coarse_step / p.fine_step));
  auto in_range = [&](double a) { return std::abs(a) <= p.half_range + 1e-9; };
  for (int j = -fine_n; j <= fine_n; ++j) {
    const double a = center + j * p.fine_step;
    if (j == 0 || !in_range(a)) continue;
    consider(a, f(a));
  }

  double angle = best_angle;
  const double lo = best_angle - p.fine_step;
  const double hi = best_angle + p.fine_step;
  if (in_range(lo) && in_range(hi)) {
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    const double curvature = f_lo - 2.0 * best + f_hi;
    if (curvature < 0.0) {
      const double shift = 0.5 * (f_lo - f_hi) / curvature * p.fine_step;
      angle += std::clamp(shift, -0.5 * p.fine_step, 0.5 * p.fine_step);
    }
  }
  angle = std::clamp(angle, -p.half_range, p.half_range);
  return {angle, best, 0};
}

struct FourWaySkew {
  SkewEstimate chosen;
  std::array<SkewEstimate, 4> variants;
};

/// Estimates skew on the ink map and its three quarter-turn rotations and
/// picks the largest |angle| among variants whose objective reaches
/// `credible_ratio` of the best one (ties -> lowest turn). Quarter turns
/// preserve tilt, so every variant's angle is valid for the original page.
[[nodiscard]] inline FourWaySkew four_way_skew(const BinaryMap& ink, const SkewParams& p,
                                               double credible_ratio = 0.5) {
  FourWaySkew out;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4; ++k) {
    out.variants[k] = skew_angle(k == 0 ? ink : rotate_quarter(ink, k), p);
    out.variants[k].source_turns = k;
    best_score = std::max(best_score, out.variants[k].score);
  }
  const double gate = credible_ratio * best_score;
  bool have = false;
  for (const auto& v : out.variants) {
    if (v.score < gate) continue;
    if (!have || std::abs(v.angle) > std::abs(out.chosen.angle)) {
      out.chosen = v;
      have = true;
    }
  }
  return out;
}

[[nodiscard]] inline GrayImage deskew(const GrayImage& page, const SkewEstimate& est,
                                      double fine_step) {
  if (std::abs(est.angle) < fine_step) return page;
  return rotate_by_angle(page, -est.angle, 255);
}

struct OrientationDecision {
  int turns = 0;  // counter-clockwise quarter turns to apply
  double pixel_ratio_0 = 0.0;
  double pixel_ratio_90 = 0.0;
  bool matra_test_passed = false;  // matra above mid-line in the chosen view
  bool used_last_line = false;
};

struct OrientParams {
  double line_band_alpha = 0.1;
  double fallback_top_fraction = 0.3;
  double text_band_ratio = 0.5;
  int min_line_height = 8;
};

/// A band's height may differ from the view's typical band height by at most
/// this factor and still count as a text line.
inline constexpr double kBandHeightSpread = 2.0;

/// The reference line of a view: the first text-like band when one starts in
/// the top `fallback_top_fraction` of the page, otherwise the last text-like
/// band (an image at the top of the page hides the first line).
///
/// Bands shorter than `min_line_height` are ignored. A band is text-like when
/// its height is near the view's typical height and
/// its pixel ratio reaches `text_band_ratio` of the median. The typical height
/// is the one shared by the most bands; with `min_support` > 1 a view where no
/// height repeats has no text lines. This keeps the thin, dense bands formed by
/// aligned column edges in the wrong orientation from winning the comparison.
[[nodiscard]] inline std::optional<LineMetrics> reference_line(
    const std::vector<LineMetrics>& all_lines, int page_height, const OrientParams& p,
    bool* used_last = nullptr, int min_support = 1) {
  if (used_last) *used_last = false;
  std::vector<LineMetrics> kept;
  for (const auto& m : all_lines)
    if (m.line_height >= p.min_line_height) kept.push_back(m);
  if (kept.empty()) return std::nullopt;
  const auto& lines = kept;
  auto near = [](double a, double b) {
    return a * kBandHeightSpread >= b && a <= b * kBandHeightSpread;
  };
  int typical = 0;
  int support = 0;
  for (const auto& m : lines) {
    const int n = static_cast<int>(std::count_if(lines.begin(), lines.end(), [&](const auto& o) {
      return near(o.line_height, m.line_height);
    }));
    if (n > support || (n == support && m.line_height < typical)) {
      typical = m.line_height;
      support = n;
    }
  }
  if (support < min_support) return std::nullopt;

  std::vector<double> ratios;
  for (const auto& m : lines) ratios.push_back(double(m.matra_black) / m.line_height);
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const double cut = p.text_band_ratio * sorted[sorted.size() / 2];
  std::optional<std::size_t> first, last;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!near(lines[i].line_height, typical) || ratios[i] < cut) continue;
    if (!first) first = i;
    last = i;
  }
  if (!first) return std::nullopt;
  if (lines[*first].band_top < p.fallback_top_fraction * page_height) {
    return lines[*first];
  }
  if (used_last) *used_last = true;
  return lines[*last];
}

/// Chooses between the page and its clockwise quarter turn by the reference
/// line's pixel ratio (matra black / line height), then checks whether the
/// matra sits in the upper half of that line.
[[nodiscard]] inline OrientationDecision decide_rotation(const BinaryMap& page_ink,
                                                         const OrientParams& p) {
  const BinaryMap turned = rotate_quarter(page_ink, 3);
  const auto lines0 = line_metrics(page_ink, p.line_band_alpha);
  const auto lines90 = line_metrics(turned, p.line_band_alpha);
  bool last0 = false;
  bool last90 = false;
  // prefer views with repeated line heights; single-line pages relax this
  auto ref0 = reference_line(lines0, page_ink.height(), p, &last0, 2);
  auto ref90 = reference_line(lines90, turned.height(), p, &last90, 2);
  if (!ref0 && !ref90) {
    ref0 = reference_line(lines0, page_ink.height(), p, &last0, 1);
    ref90 = reference_line(lines90, turned.height(), p, &last90, 1);
  }
  if (!ref0 && !ref90) throw OrientationUndecidableError();

  auto ratio = [](const std::optional<LineMetrics>& m) {
    return m ? double(m->matra_black) / m->line_height : 0.0;
  };
  OrientationDecision d;
  d.pixel_ratio_0 = ratio(ref0);
  d.pixel_ratio_90 = ratio(ref90);
  const bool use_turned = !ref0 || d.pixel_ratio_90 > d.pixel_ratio_0;
  const LineMetrics& m = use_turned ? *ref90 : *ref0;
  d.used_last_line = use_turned ? last90 : last0;
  d.matra_test_passed = 2 * m.matra_index < m.line_height;
  if (use_turned) {
    d.turns = d.matra_test_passed ? 3 : 1;
  } else {
    d.turns = d.matra_test_passed ? 0 : 2;
  }
  return d;
}

struct OrientResult {
  GrayImage page;
  std::optional<SkewEstimate> skew;
  std::array<SkewEstimate, 4> skew_variants{};
  std::optional<OrientationDecision> rotation;
  bool deskewed = false;
  bool no_content = false;
  bool undecidable = false;
};

[[nodiscard]] inline SkewParams skew_params(const DecompositionConfig& c) {
  return {c.skew_half_range, c.skew_coarse_step, c.skew_fine_step};
}

[[nodiscard]] inline OrientParams orient_params(const DecompositionConfig& c) {
  return {c.line_band_alpha, c.fallback_top_fraction, c.text_band_ratio,
          c.orient_min_line_height};
}

/// binarize -> four-way skew -> deskew -> rotation decision -> quarter turn.
/// Failures become flags; the page is returned as far as it could be corrected.
[[nodiscard]] inline OrientResult auto_orient(const GrayImage& page,
                                              const DecompositionConfig& cfg) {
  OrientResult r;
  r.page = page;
  const BinaryMap ink = binarize_block(page, cfg.binarize_threshold);
  try {
    const FourWaySkew fw = four_way_skew(ink, skew_params(cfg), cfg.skew_credible_ratio);
    r.skew = fw.chosen;
    r.skew_variants = fw.variants;
  } catch (const NoContentError&) {
    r.no_content = true;
    return r;
  }
  if (std::abs(r.skew->angle) >= cfg.skew_fine_step) {
    r.page = deskew(page, *r.skew, cfg.skew_fine_step);
    r.deskewed = true;
  }
  try {
    const BinaryMap upright_ink =
        r.deskewed ? binarize_block(r.page, cfg.binarize_threshold) : ink;
    r.rotation = decide_rotation(upright_ink, orient_params(cfg));
  } catch (const OrientationUndecidableError&) {
    r.undecidable = true;
    return r;
  }
  if (r.rotation->turns != 0) r.page = rotate_quarter(r.page, r.rotation->turns);
  return r;
}

}  // namespace pagedec
