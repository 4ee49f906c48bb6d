#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pagedec/config.hpp"
#include "pagedec/raster.hpp"
#include "pagedec/segment.hpp"

namespace pagedec {

enum class ElementLabel { Image, Headline, SubHeadline, Column };

inline constexpr ElementLabel kAllLabels[] = {ElementLabel::Image, ElementLabel::Headline,
                                              ElementLabel::SubHeadline,
                                              ElementLabel::Column};

[[nodiscard]] constexpr std::string_view to_string(ElementLabel l) {
  switch (l) {
    case ElementLabel::Image: return "image";
    case ElementLabel::Headline: return "headline";
    case ElementLabel::SubHeadline: return "subheadline";
    case ElementLabel::Column: return "column";
  }
  return "column";
}

[[nodiscard]] inline std::optional<ElementLabel> label_from_string(std::string_view s) {
  for (ElementLabel l : kAllLabels)
    if (to_string(l) == s) return l;
  return std::nullopt;
}

/// Statistics of one text-line band of an ink map.
struct LineMetrics {
  int band_top = 0;
  int band_bottom = 0;
  int line_height = 0;
  int matra_row = 0;    // densest row of the band
  int matra_index = 0;  // matra_row - band_top
  int matra_black = 0;  // ink count on matra_row

  friend bool operator==(const LineMetrics&, const LineMetrics&) = default;
};

/// A labeled output region.
struct Region {
  BBox box;
  ElementLabel label = ElementLabel::Column;
  std::optional<int> line_height;  // modal line height for text regions

  friend bool operator==(const Region&, const Region&) = default;
};

class NoTextLinesError : public std::runtime_error {
 public:
  NoTextLinesError() : std::runtime_error("no text lines found") {}
};

/// Ink is dark: true where luminance < threshold.
[[nodiscard]] inline BinaryMap binarize_block(const GrayImage& img, int threshold = 128) {
  BinaryMap out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] < threshold;
  return out;
}

/// Horizontal projection profile: ink count per row.
[[nodiscard]] inline std::vector<int> row_profile(const BinaryMap& ink) {
  std::vector<int> p(ink.height(), 0);
  for (int y = 0; y < ink.height(); ++y)
    for (auto v : ink.row(y)) p[y] += v ? 1 : 0;
  return p;
}

/// Text-line bands are maximal runs of rows whose ink count exceeds
/// alpha * width; bands shorter than two rows are dropped.
[[nodiscard]] inline std::vector<LineMetrics> line_metrics(const BinaryMap& ink,
                                                           double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("line band alpha must lie in (0, 1)");
  }
  const auto p = row_profile(ink);
  const double cut = alpha * ink.width();
  std::vector<LineMetrics> out;
  const int h = ink.height();
  int y = 0;
  while (y < h) {
    if (!(p[y] > cut)) {
      ++y;
      continue;
    }
    int end = y;
    while (end + 1 < h && p[end + 1] > cut) ++end;
    if (end - y + 1 >= 2) {
      LineMetrics m;
      m.band_top = y;
      m.band_bottom = end;
      m.line_height = end - y + 1;
      m.matra_row = y;
      for (int r = y + 1; r <= end; ++r)
        if (p[r] > p[m.matra_row]) m.matra_row = r;
      m.matra_index = m.matra_row - y;
      m.matra_black = p[m.matra_row];
      out.push_back(m);
    }
    y = end + 1;
  }
  return out;
}

/// Mode of line heights; ties go to the smaller height.
[[nodiscard]] inline int dominant_line_height(
    const std::vector<std::vector<LineMetrics>>& all_blocks) {
  std::map<int, int> counts;
  for (const auto& block : all_blocks)
    for (const auto& m : block) ++counts[m.line_height];
  if (counts.empty()) throw NoTextLinesError();
  int best = counts.begin()->first;
  int best_n = counts.begin()->second;
  for (const auto& [height, n] : counts) {
    if (n > best_n) {
      best = height;
      best_n = n;
    }
  }
  return best;
}

[[nodiscard]] inline int modal_line_height(const std::vector<LineMetrics>& metrics) {
  return dominant_line_height({metrics});
}

/// True iff the block passes all three image filters: both sides exceed the
/// minimum size; the edge density lies in the density band; height / width
/// lies in the aspect band.
[[nodiscard]] inline bool is_image_block(const Block& block, const ImageFilter& f) {
  const double w = block.box.width();
  const double h = block.box.height();
  if (!(w > f.min_w && h > f.min_h)) return false;
  const double density = static_cast<double>(block.edge_pixel_count) / (w * h);
  if (density < f.density_min || density > f.density_max) return false;
  const double aspect = h / w;
  return aspect >= f.aspect_min && aspect <= f.aspect_max;
}

/// Headline if the block's modal height clears the dominant height by more
/// than gap1 and reaches x3; otherwise sub-headline if it clears by more than
/// gap2 and lies strictly between x1 and x2; otherwise column.
[[nodiscard]] inline ElementLabel label_text_block(const std::vector<LineMetrics>& metrics,
                                                   int dominant, const TextRules& r) {
  if (metrics.empty()) throw std::invalid_argument("label_text_block needs line metrics");
  const int h = modal_line_height(metrics);
  const double d = h - dominant;
  if (d > r.gap1 && h >= r.x3) return ElementLabel::Headline;
  if (d > r.gap2 && r.x1 < h && h < r.x2) return ElementLabel::SubHeadline;
  return ElementLabel::Column;
}

struct PageClassification {
  std::vector<Region> regions;  // one per input block, same order
  std::optional<int> dominant_line_height;
  std::optional<TextRules> text_rules;
};

/// Two phases: image filters on every block, then the dominant line height
/// over the remaining blocks drives text labeling. Throws NoTextLinesError when
/// text blocks exist but none holds a detectable line.
[[nodiscard]] inline PageClassification classify_page(const std::vector<CutBlock>& blocks,
                                                      const DecompositionConfig& cfg,
                                                      const ImageFilter& filter) {
  PageClassification out;
  out.regions.resize(blocks.size());
  std::vector<std::vector<LineMetrics>> metrics(blocks.size());
  std::vector<std::vector<LineMetrics>> text_metrics;
  std::vector<bool> image(blocks.size(), false);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    out.regions[i].box = blocks[i].block.box;
    image[i] = is_image_block(blocks[i].block, filter);
    if (image[i]) {
      out.regions[i].label = ElementLabel::Image;
      continue;
    }
    metrics[i] = line_metrics(binarize_block(blocks[i].image, cfg.binarize_threshold),
                              cfg.line_band_alpha);
    text_metrics.push_back(metrics[i]);
  }
  if (text_metrics.empty()) return out;

  const int dominant = dominant_line_height(text_metrics);
  const TextRules rules = resolve_text_rules(cfg, dominant);
  validate(rules);
  out.dominant_line_height = dominant;
  out.text_rules = rules;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (image[i]) continue;
    if (metrics[i].empty()) {
      out.regions[i].label = ElementLabel::Column;
      continue;
    }
    out.regions[i].label = label_text_block(metrics[i], dominant, rules);
    out.regions[i].line_height = modal_line_height(metrics[i]);
  }
  return out;
}

}  // namespace pagedec
