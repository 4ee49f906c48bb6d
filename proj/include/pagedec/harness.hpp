#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "pagedec/classify.hpp"
#include "pagedec/config.hpp"
#include "pagedec/pipeline.hpp"
#include "pagedec/raster.hpp"

namespace pagedec {

// ---------------------------------------------------------------------------
// Synthetic pages

/// Fractional box (x0, y0, x1, y1) in [0, 1], relative to the body area below
/// any headline and sub-headline.
using FracBox = std::array<double, 4>;

struct PageSpec {
  int width = 800;
  int height = 1000;
  std::uint64_t seed = 1;
  int body_line_height = 16;
  int column_count = 2;
  bool headline_present = false;
  bool subheadline_present = false;
  std::vector<FracBox> image_blocks;
  double skew = 0.0;  // degrees, counter-clockwise
  int turns = 0;      // counter-clockwise quarter turns, applied before skew
  double noise_density = 0.0;

  friend bool operator==(const PageSpec&, const PageSpec&) = default;
};

struct TruthRegion {
  BBox box;
  ElementLabel label = ElementLabel::Column;
  friend bool operator==(const TruthRegion&, const TruthRegion&) = default;
};

/// Regions in the upright frame plus the distortion applied afterwards.
struct GroundTruth {
  int width = 0;
  int height = 0;
  std::vector<TruthRegion> regions;
  double skew = 0.0;
  int turns = 0;
  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct SynthPage {
  GrayImage image;
  GroundTruth truth;
};

class LayoutError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Seeded generator with distribution code of our own, so sequences do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  int uniform_int(int lo, int hi) {  // inclusive
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(eng_() % span);
  }
  bool chance(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 eng_;
};

namespace detail {

inline constexpr std::uint8_t kInk = 20;

inline void fill_rect(GrayImage& img, int x0, int y0, int x1, int y1, std::uint8_t v) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, img.width() - 1);
  y1 = std::min(y1, img.height() - 1);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) img(x, y) = v;
}

inline void fill_ellipse(GrayImage& img, double cx, double cy, double rx, double ry,
                         std::uint8_t v, const BBox& clip) {
  const int y0 = std::max(clip.y0, static_cast<int>(std::floor(cy - ry)));
  const int y1 = std::min(clip.y1, static_cast<int>(std::ceil(cy + ry)));
  const int x0 = std::max(clip.x0, static_cast<int>(std::floor(cx - rx)));
  const int x1 = std::min(clip.x1, static_cast<int>(std::ceil(cx + rx)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = (x - cx) / rx;
      const double dy = (y - cy) / ry;
      if (dx * dx + dy * dy <= 1.0) img(x, y) = v;
    }
  }
}

/// Ring between two ellipses, clipped to `clip`.
inline void ellipse_ring(GrayImage& img, double cx, double cy, double rx, double ry,
                         double thickness, std::uint8_t v, const BBox& clip) {
  const int y0 = std::max(clip.y0, static_cast<int>(std::floor(cy - ry)));
  const int y1 = std::min(clip.y1, static_cast<int>(std::ceil(cy + ry)));
  const int x0 = std::max(clip.x0, static_cast<int>(std::floor(cx - rx)));
  const int x1 = std::min(clip.x1, static_cast<int>(std::ceil(cx + rx)));
  const double irx = std::max(0.5, rx - thickness);
  const double iry = std::max(0.5, ry - thickness);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double ox = (x - cx) / rx, oy = (y - cy) / ry;
      const double ix = (x - cx) / irx, iy = (y - cy) / iry;
      if (ox * ox + oy * oy <= 1.0 && ix * ix + iy * iy > 1.0) img(x, y) = v;
    }
  }
}

/// Draws one Bangla-like text line: each word carries a headstroke (matra)
/// along the line's top rows with tightly packed stems hanging from it; stems
/// vary in depth and some are joined by short bars or bowls, the way conjunct
/// glyphs are. Returns the inked extent.
inline std::optional<BBox> draw_text_line(GrayImage& img, Rng& rng, int x_begin, int x_end,
                                          int top, int height, int word_gap) {
  const int matra = std::max(2, static_cast<int>(std::lround(height / 7.0)));
  const int stem = std::max(2, static_cast<int>(std::lround(height / 8.0)));
  const int cell = std::max(stem + 3, static_cast<int>(std::lround(0.3 * height)));
  const int bottom = top + height - 1;
  std::optional<BBox> extent;
  int x = x_begin;
  while (x + 3 * cell - 1 <= x_end) {
    const int want = rng.uniform_int(3, 10);
    const int cells = std::min(want, (x_end - x + 1) / cell);
    if (cells < 3) break;
    const int wx1 = x + (cells - 1) * cell + stem - 1;
    fill_rect(img, x, top, wx1, top + matra - 1, kInk);
    for (int c = 0; c < cells; ++c) {
      const int sx = x + c * cell;
      const bool full = c == 0 || c == cells - 1 || rng.chance(0.75);
      const int depth = full ? bottom : top + static_cast<int>(height * rng.uniform(0.5, 0.85));
      fill_rect(img, sx, top, sx + stem - 1, depth, kInk);
      if (c + 1 == cells) break;
      const int gap_x0 = sx + stem;
      const int gap_x1 = sx + cell - 1;
      switch (rng.uniform_int(0, 4)) {
        case 0: {  // bar joining this stem to the next
          const int by = top + static_cast<int>(height * rng.uniform(0.4, 0.8));
          fill_rect(img, gap_x0, by, gap_x1, std::min(bottom, by + stem - 1), kInk);
          break;
        }
        case 1:
        case 2: {  // bowl in the lower half
          const double rx = (gap_x1 - gap_x0 + 1) / 2.0 + stem;
          const double ry = std::max(2.0, height * 0.2);
          ellipse_ring(img, (gap_x0 + gap_x1) / 2.0, bottom - ry, rx, ry, stem * 0.75, kInk,
                       BBox{gap_x0, top, gap_x1, bottom});
          break;
        }
        default:
          break;
      }
    }
    const BBox word{x, top, wx1, bottom};
    extent = extent ? extent->united(word) : word;
    x = wx1 + 1 + word_gap + rng.uniform_int(0, std::max(1, word_gap / 3));
  }
  return extent;
}

/// Photo-like block: light tonal background, seeded dark and mid-tone blobs,
/// dark frame.
inline void draw_image_block(GrayImage& img, Rng& rng, const BBox& box) {
  const int base = rng.uniform_int(180, 215);
  for (int y = box.y0; y <= box.y1; ++y) {
    const double t = double(y - box.y0) / std::max(1, box.height() - 1);
    const auto v = static_cast<std::uint8_t>(std::clamp(base - 20.0 + 40.0 * t, 140.0, 240.0));
    for (int x = box.x0; x <= box.x1; ++x) img(x, y) = v;
  }
  const double area = double(box.width()) * box.height();
  const int blobs = std::clamp(static_cast<int>(area / 2500.0), 4, 40);
  for (int i = 0; i < blobs; ++i) {
    const double rx = rng.uniform(0.06, 0.2) * box.width();
    const double ry = rng.uniform(0.06, 0.2) * box.height();
    const double cx = rng.uniform(box.x0, box.x1);
    const double cy = rng.uniform(box.y0, box.y1);
    const bool dark = rng.chance(0.6);
    const auto v = static_cast<std::uint8_t>(dark ? rng.uniform_int(30, 100)
                                                  : rng.uniform_int(110, 160));
    fill_ellipse(img, cx, cy, std::max(3.0, rx), std::max(3.0, ry), v, box);
  }
  const int frame = 2;
  fill_rect(img, box.x0, box.y0, box.x1, box.y0 + frame - 1, 40);
  fill_rect(img, box.x0, box.y1 - frame + 1, box.x1, box.y1, 40);
  fill_rect(img, box.x0, box.y0, box.x0 + frame - 1, box.y1, 40);
  fill_rect(img, box.x1 - frame + 1, box.y0, box.x1, box.y1, 40);
}

inline void add_salt_pepper(GrayImage& img, Rng& rng, double density) {
  if (density <= 0.0) return;
  for (auto& v : img.pixels()) {
    if (rng.chance(density)) v = rng.chance(0.5) ? 0 : 255;
  }
}

}  // namespace detail

inline void validate(const PageSpec& s) {
  if (s.width < 400 || s.height < 400) throw LayoutError("page must be at least 400x400");
  if (s.body_line_height < 8) throw LayoutError("body_line_height must be >= 8");
  if (s.column_count < 1) throw LayoutError("column_count must be >= 1");
  if (!(s.noise_density >= 0.0 && s.noise_density < 0.01)) {
    throw LayoutError("noise_density must lie in [0, 0.01)");
  }
  if (s.turns < 0 || s.turns > 3) throw LayoutError("turns must lie in 0..3");
  if (!(std::abs(s.skew) <= 45.0)) throw LayoutError("skew must lie in [-45, 45]");
  for (const auto& f : s.image_blocks) {
    for (double v : f) {
      if (!(v >= 0.0 && v <= 1.0)) throw LayoutError("image_blocks fractions must lie in [0, 1]");
    }
    if (!(f[0] < f[2] && f[1] < f[3])) throw LayoutError("image_blocks boxes must be non-empty");
  }
}

/// Layout geometry shared by the generator and tests.
struct PageGeometry {
  int margin;
  int gutter;
  int block_gap;
  int line_gap;
  int column_width;
};

[[nodiscard]] inline PageGeometry page_geometry(const PageSpec& s) {
  const int L = s.body_line_height;
  PageGeometry g{};
  g.margin = 2 * L;
  g.gutter = static_cast<int>(std::lround(1.5 * L));
  g.block_gap = 2 * L;
  g.line_gap = std::max(2, static_cast<int>(std::lround(0.25 * L)));
  const int content = s.width - 2 * g.margin;
  g.column_width = (content - (s.column_count - 1) * g.gutter) / s.column_count;
  return g;
}

/// Renders a page from its spec: upright layout first, then quarter turns,
/// skew and salt-and-pepper noise. Truth stays in the upright frame.
[[nodiscard]] inline SynthPage synth_page(const PageSpec& spec) {
  validate(spec);
  const int L = spec.body_line_height;
  const PageGeometry g = page_geometry(spec);
  if (g.column_width < 6 * L) {
    throw LayoutError("layout does not fit: " + std::to_string(spec.column_count) +
                      " columns need a wider page");
  }
  Rng rng(spec.seed);
  GrayImage page(spec.width, spec.height, 255);
  GroundTruth truth;
  truth.width = spec.width;
  truth.height = spec.height;
  truth.skew = spec.skew;
  truth.turns = spec.turns;

  const int content_x0 = g.margin;
  const int content_x1 = spec.width - g.margin - 1;
  const int content_w = content_x1 - content_x0 + 1;
  const int bottom_limit = spec.height - g.margin - 1;
  int y = g.margin;
  // word spacing follows the body size so headings stay one block when smeared
  const int word_gap = std::max(3, static_cast<int>(std::lround(0.3 * L)));

  auto heading = [&](double scale, double min_frac, double max_frac, ElementLabel label) {
    const int h = static_cast<int>(std::lround(scale * L));
    const int w = static_cast<int>(content_w * rng.uniform(min_frac, max_frac));
    if (y + h - 1 > bottom_limit) throw LayoutError("layout does not fit: heading below page");
    if (auto ext = detail::draw_text_line(page, rng, content_x0, content_x0 + w - 1, y, h,
                                          word_gap)) {
      truth.regions.push_back({*ext, label});
    }
    y += h + g.block_gap;
  };
  if (spec.headline_present) heading(2.2, 0.6, 0.95, ElementLabel::Headline);
  if (spec.subheadline_present) heading(1.5, 0.45, 0.8, ElementLabel::SubHeadline);

  const int body_top = y;
  const int body_h = bottom_limit - body_top + 1;
  if (body_h < 3 * L) throw LayoutError("layout does not fit: no room for body text");
  const int n = spec.column_count;
  auto col_x0 = [&](int c) { return content_x0 + c * (g.column_width + g.gutter); };
  const int pitch = L + g.line_gap;

  // images snap to whole columns horizontally and to the line grid at the top
  std::vector<BBox> images;
  for (const auto& f : spec.image_blocks) {
    const int c0 = std::clamp(static_cast<int>(std::floor(f[0] * n + 1e-9)), 0, n - 1);
    const int c1 = std::clamp(static_cast<int>(std::ceil(f[2] * n - 1e-9)) - 1, c0, n - 1);
    const int row0 = static_cast<int>(std::floor(f[1] * body_h / pitch + 1e-9));
    BBox box{col_x0(c0), body_top + row0 * pitch, col_x0(c1) + g.column_width - 1,
             body_top + static_cast<int>(std::lround(f[3] * body_h)) - 1};
    box.y1 = std::min(box.y1, bottom_limit);
    if (box.height() < 3 * L) continue;
    const BBox padded{box.x0 - g.gutter, box.y0 - g.block_gap, box.x1 + g.gutter,
                      box.y1 + g.block_gap};
    if (std::any_of(images.begin(), images.end(),
                    [&](const BBox& o) { return o.intersects(padded); })) {
      continue;
    }
    images.push_back(box);
  }
  for (const BBox& box : images) {
    detail::draw_image_block(page, rng, box);
    truth.regions.push_back({box, ElementLabel::Image});
  }

  for (int c = 0; c < n; ++c) {
    const int x0 = col_x0(c);
    const int x1 = x0 + g.column_width - 1;
    // free vertical intervals of this column strip
    std::vector<std::pair<int, int>> blocked;
    for (const BBox& b : images) {
      if (b.x1 < x0 || b.x0 > x1) continue;
      blocked.emplace_back(b.y0 - g.block_gap, b.y1 + g.block_gap);
    }
    std::sort(blocked.begin(), blocked.end());
    std::vector<std::pair<int, int>> free;
    int start = body_top;
    for (const auto& [b0, b1] : blocked) {
      if (b0 > start) free.emplace_back(start, b0);
      start = std::max(start, b1 + 1);
    }
    if (start <= bottom_limit) free.emplace_back(start, bottom_limit);

    for (const auto& [f0, f1] : free) {
      std::optional<BBox> column;
      int lines = 0;
      const int first = (f0 - body_top + pitch - 1) / pitch;
      for (int k = first;; ++k) {
        const int top = body_top + k * pitch;
        if (top + L - 1 > f1) break;
        if (auto ext = detail::draw_text_line(page, rng, x0, x1, top, L, word_gap)) {
          column = column ? column->united(*ext) : *ext;
          ++lines;
        }
      }
      if (column && lines >= 2) {
        truth.regions.push_back({*column, ElementLabel::Column});
      } else if (column) {
        detail::fill_rect(page, column->x0, column->y0, column->x1, column->y1, 255);
      }
    }
  }

  std::sort(truth.regions.begin(), truth.regions.end(),
            [](const TruthRegion& a, const TruthRegion& b) {
              return std::tie(a.box.y0, a.box.x0) < std::tie(b.box.y0, b.box.x0);
            });

  GrayImage out = rotate_quarter(page, spec.turns);
  out = rotate_by_angle(out, spec.skew, 255);
  detail::add_salt_pepper(out, rng, spec.noise_density);
  return {std::move(out), std::move(truth)};
}

// ---------------------------------------------------------------------------
// Evaluation

struct ClassCounts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long tn = 0;

  [[nodiscard]] double precision() const {
    return tp + fp == 0 ? 1.0 : double(tp) / double(tp + fp);
  }
  [[nodiscard]] double recall() const {
    return tp + fn == 0 ? 1.0 : double(tp) / double(tp + fn);
  }
  [[nodiscard]] double accuracy() const {
    const long long all = tp + tn + fp + fn;
    return all == 0 ? 1.0 : double(tp + tn) / double(all);
  }
  ClassCounts& operator+=(const ClassCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

struct MatchedPair {
  int page = 0;
  int predicted = 0;
  int truth = 0;
  ElementLabel label = ElementLabel::Column;
  double iou = 0.0;
  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct EvalReport {
  std::array<ClassCounts, 4> per_class{};  // indexed by ElementLabel
  std::vector<MatchedPair> matches;

  [[nodiscard]] const ClassCounts& operator[](ElementLabel l) const {
    return per_class[static_cast<std::size_t>(l)];
  }
  ClassCounts& operator[](ElementLabel l) { return per_class[static_cast<std::size_t>(l)]; }

  EvalReport& operator+=(const EvalReport& o) {
    for (std::size_t i = 0; i < per_class.size(); ++i) per_class[i] += o.per_class[i];
    matches.insert(matches.end(), o.matches.begin(), o.matches.end());
    return *this;
  }
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Greedy same-label matching by descending IoU. A prediction is a true
/// positive when it claims an unmatched truth region with IoU >= iou_min.
/// TN for a class counts truth regions of other classes that no prediction of
/// this class overlaps at iou_min.
[[nodiscard]] inline EvalReport match_regions(const std::vector<Region>& predicted,
                                              const std::vector<TruthRegion>& truth,
                                              double iou_min = 0.5) {
  if (!(iou_min > 0.0 && iou_min <= 1.0)) throw std::invalid_argument("iou_min must lie in (0, 1]");
  EvalReport r;
  for (ElementLabel label : kAllLabels) {
    struct Cand {
      double iou;
      int p;
      int t;
    };
    std::vector<Cand> cands;
    int n_pred = 0;
    int n_truth = 0;
    for (std::size_t p = 0; p < predicted.size(); ++p) {
      if (predicted[p].label != label) continue;
      ++n_pred;
      for (std::size_t t = 0; t < truth.size(); ++t) {
        if (truth[t].label != label) continue;
        const double v = iou(predicted[p].box, truth[t].box);
        if (v >= iou_min) cands.push_back({v, int(p), int(t)});
      }
    }
    for (const auto& t : truth) n_truth += t.label == label ? 1 : 0;
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.iou != b.iou) return a.iou > b.iou;
      return std::tie(a.p, a.t) < std::tie(b.p, b.t);
    });
    std::vector<bool> p_used(predicted.size(), false);
    std::vector<bool> t_used(truth.size(), false);
    ClassCounts& c = r[label];
    for (const auto& cand : cands) {
      if (p_used[cand.p] || t_used[cand.t]) continue;
      p_used[cand.p] = t_used[cand.t] = true;
      ++c.tp;
      r.matches.push_back({0, cand.p, cand.t, label, cand.iou});
    }
    c.fp = n_pred - c.tp;
    c.fn = n_truth - c.tp;
    for (const auto& t : truth) {
      if (t.label == label) continue;
      const bool claimed = std::any_of(predicted.begin(), predicted.end(), [&](const Region& p) {
        return p.label == label && iou(p.box, t.box) >= iou_min;
      });
      if (!claimed) ++c.tn;
    }
  }
  std::sort(r.matches.begin(), r.matches.end(), [](const MatchedPair& a, const MatchedPair& b) {
    return std::tie(a.predicted, a.truth) < std::tie(b.predicted, b.truth);
  });
  return r;
}

/// Outcome of decomposing one page against its truth.
struct PageOutcome {
  int index = 0;
  EvalReport report;
  double skew_truth = 0.0;
  int turns_truth = 0;
  std::optional<double> skew_estimate;
  int turns_applied = 0;
  bool no_content = false;
  bool undecidable = false;
  std::optional<std::string> error;

  [[nodiscard]] int expected_turns() const { return (4 - turns_truth) % 4; }
  [[nodiscard]] double skew_error() const {
    return skew_estimate ? *skew_estimate - skew_truth : -skew_truth;
  }
  [[nodiscard]] bool turns_correct() const {
    return !error && !undecidable && turns_applied == expected_turns();
  }
  [[nodiscard]] bool fully_corrected(double tolerance) const {
    return turns_correct() && std::abs(skew_error()) <= tolerance;
  }
};

/// Moves regions from the corrected frame back to the upright frame. Every
/// rotation turns about the canvas center, so the two frames share a center.
[[nodiscard]] inline std::vector<Region> to_upright_frame(std::vector<Region> regions,
                                                          int corrected_w, int corrected_h,
                                                          int upright_w, int upright_h) {
  const int dx = (corrected_w - upright_w) / 2;
  const int dy = (corrected_h - upright_h) / 2;
  std::vector<Region> out;
  for (Region r : regions) {
    BBox b = r.box.translated(-dx, -dy);
    b.x0 = std::max(b.x0, 0);
    b.y0 = std::max(b.y0, 0);
    b.x1 = std::min(b.x1, upright_w - 1);
    b.y1 = std::min(b.y1, upright_h - 1);
    if (!b.valid()) continue;
    r.box = b;
    out.push_back(r);
  }
  return out;
}

[[nodiscard]] inline PageOutcome evaluate_page(const GrayImage& image, const GroundTruth& truth,
                                               const DecompositionConfig& cfg,
                                               double iou_min = 0.5, int index = 0,
                                               bool orient = true) {
  PageOutcome o;
  o.index = index;
  o.skew_truth = truth.skew;
  o.turns_truth = truth.turns;
  try {
    const Decomposition d = decompose(image, cfg, orient);
    if (d.orientation) {
      const auto& r = *d.orientation;
      if (r.skew) o.skew_estimate = r.skew->angle;
      o.turns_applied = r.rotation ? r.rotation->turns : 0;
      o.no_content = r.no_content;
      o.undecidable = r.undecidable;
    }
    const auto regions = to_upright_frame(d.regions(), d.page.width(), d.page.height(),
                                          truth.width, truth.height);
    o.report = match_regions(regions, truth.regions, iou_min);
    for (auto& m : o.report.matches) m.page = index;
  } catch (const std::exception& e) {
    o.error = e.what();
    EvalReport empty = match_regions({}, truth.regions, iou_min);
    o.report.per_class = empty.per_class;
  }
  return o;
}

struct CorpusReport {
  EvalReport aggregate;
  std::vector<PageOutcome> pages;
  double mean_abs_skew_error = 0.0;
  double max_abs_skew_error = 0.0;
  double rotation_accuracy = 0.0;
  double full_correction_rate = 0.0;
  int failures = 0;
};

inline constexpr double kSkewTolerance = 0.3;

/// Deterministic in spec order whatever the worker count.
template <typename PageFn>
[[nodiscard]] CorpusReport fold_outcomes(std::size_t count, PageFn&& page_fn, int workers) {
  std::vector<PageOutcome> outcomes(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) outcomes[i] = page_fn(i);
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  CorpusReport r;
  double sum = 0.0;
  int correct_turns = 0;
  int fully = 0;
  for (auto& o : outcomes) {
    r.aggregate += o.report;
    if (o.error) ++r.failures;
    const double e = std::abs(o.skew_error());
    sum += e;
    r.max_abs_skew_error = std::max(r.max_abs_skew_error, e);
    correct_turns += o.turns_correct() ? 1 : 0;
    fully += o.fully_corrected(kSkewTolerance) ? 1 : 0;
  }
  if (!outcomes.empty()) {
    const double n_pages = static_cast<double>(outcomes.size());
    r.mean_abs_skew_error = sum / n_pages;
    r.rotation_accuracy = correct_turns / n_pages;
    r.full_correction_rate = fully / n_pages;
  }
  r.pages = std::move(outcomes);
  return r;
}

/// Synthesizes and decomposes every spec; per-page failures are recorded and
/// never abort the run.
[[nodiscard]] inline CorpusReport run_corpus(const std::vector<PageSpec>& specs,
                                             const DecompositionConfig& cfg,
                                             double iou_min = 0.5, int workers = 1) {
  return fold_outcomes(
      specs.size(),
      [&](std::size_t i) {
        try {
          const SynthPage page = synth_page(specs[i]);
          return evaluate_page(page.image, page.truth, cfg, iou_min, static_cast<int>(i));
        } catch (const std::exception& e) {
          PageOutcome o;
          o.index = static_cast<int>(i);
          o.skew_truth = specs[i].skew;
          o.turns_truth = specs[i].turns;
          o.error = e.what();
          return o;
        }
      },
      workers);
}

// ---------------------------------------------------------------------------
// Corpus presets

/// Pages skewed uniformly in [-10, 10] degrees, upright.
[[nodiscard]] inline std::vector<PageSpec> deskew_corpus(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<PageSpec> specs;
  for (int i = 0; i < count; ++i) {
    PageSpec s;
    s.width = 600;
    s.height = 800;
    s.seed = rng.next();
    s.column_count = rng.uniform_int(1, 2);
    s.headline_present = rng.chance(0.5);
    s.skew = rng.uniform(-10.0, 10.0);
    s.noise_density = 0.0005;
    specs.push_back(s);
  }
  return specs;
}

/// Pages with random skew and random quarter turns; every third page opens
/// with a large image block.
[[nodiscard]] inline std::vector<PageSpec> rotation_corpus(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<PageSpec> specs;
  for (int i = 0; i < count; ++i) {
    PageSpec s;
    s.width = 600;
    s.height = 800;
    s.seed = rng.next();
    s.column_count = rng.uniform_int(1, 2);
    s.skew = rng.uniform(-10.0, 10.0);
    s.turns = rng.uniform_int(0, 3);
    s.noise_density = 0.0005;
    if (i % 3 == 0) {
      s.image_blocks.push_back({0.0, 0.0, 1.0, 0.4});
    } else {
      s.headline_present = rng.chance(0.5);
    }
    specs.push_back(s);
  }
  return specs;
}

/// Upright newspaper-like pages mixing columns, headlines, sub-headlines and
/// zero to two image blocks.
[[nodiscard]] inline std::vector<PageSpec> layout_corpus(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<PageSpec> specs;
  for (int i = 0; i < count; ++i) {
    PageSpec s;
    s.width = 800;
    s.height = 1000;
    s.seed = rng.next();
    s.column_count = rng.uniform_int(1, 3);
    s.headline_present = rng.chance(0.7);
    s.subheadline_present = rng.chance(0.5);
    s.noise_density = 0.0005;
    const int images = rng.uniform_int(0, 2);
    const int n = s.column_count;
    for (int k = 0; k < images; ++k) {
      const int c0 = rng.uniform_int(0, n - 1);
      const int c1 = rng.uniform_int(c0, std::min(n - 1, c0 + 1));
      // first image in the upper half, second in the lower half
      const double top = k == 0 ? rng.uniform(0.0, 0.2) : rng.uniform(0.55, 0.65);
      const double height = rng.uniform(0.2, 0.3);
      s.image_blocks.push_back({double(c0) / n, top, double(c1 + 1) / n, top + height});
    }
    specs.push_back(s);
  }
  return specs;
}

}  // namespace pagedec
