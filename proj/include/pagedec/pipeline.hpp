#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <vector>

#include "pagedec/classify.hpp"
#include "pagedec/config.hpp"
#include "pagedec/edge.hpp"
#include "pagedec/orient.hpp"
#include "pagedec/raster.hpp"
#include "pagedec/segment.hpp"
#include "pagedec/smear.hpp"

namespace pagedec {

/// Used when the edge map shows no line bands at all (blank or near-blank page).
inline constexpr double kFallbackLineScale = 16.0;

/// Dominant height of line bands in the edge map, measured over vertical
/// strips so that columns whose lines do not align still produce clean bands.
/// Each height is weighted by the rows it covers: the thin bands left by matra
/// edges outnumber real lines but cover few rows. Ties go to the smaller height.
[[nodiscard]] inline double estimate_line_scale(const BinaryMap& edges, double alpha) {
  if (edges.empty()) return kFallbackLineScale;
  const int strip = std::max(32, edges.width() / 8);
  std::map<int, long long> rows;
  for (int x0 = 0; x0 < edges.width(); x0 += strip) {
    const int x1 = std::min(edges.width() - 1, x0 + strip - 1);
    for (const auto& m : line_metrics(crop(edges, BBox{x0, 0, x1, edges.height() - 1}), alpha))
      rows[m.line_height] += m.line_height;
  }
  if (rows.empty()) return kFallbackLineScale;
  auto best = rows.begin();
  for (auto it = rows.begin(); it != rows.end(); ++it)
    if (it->second > best->second) best = it;
  return best->first;
}

struct StageTimings {
  double orient_ms = 0.0;
  double edges_ms = 0.0;
  double smear_ms = 0.0;
  double segment_ms = 0.0;
  double classify_ms = 0.0;
};

struct Decomposition {
  GrayImage page;  // the page the regions refer to (corrected when oriented)
  std::optional<OrientResult> orientation;
  BinaryMap edges;
  BinaryMap smeared;
  LayoutThresholds thresholds;
  SeparatorSet separators;
  std::vector<CutBlock> blocks;
  PageClassification classification;
  bool no_text_lines = false;
  StageTimings timings;

  [[nodiscard]] const std::vector<Region>& regions() const {
    return classification.regions;
  }
};

namespace detail {

class StageClock {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace detail

/// Full decomposition: optional orientation correction, Canny edges, smearing,
/// black-box segmentation and labeling.
[[nodiscard]] inline Decomposition decompose(const GrayImage& input,
                                             const DecompositionConfig& cfg,
                                             bool orient = true) {
  validate(cfg);
  Decomposition d;
  detail::StageClock clock;
  if (orient) {
    OrientResult o = auto_orient(input, cfg);
    d.page = std::move(o.page);
    o.page = GrayImage{};
    d.orientation = std::move(o);
  } else {
    d.page = input;
  }
  d.timings.orient_ms = clock.lap();

  d.edges = canny(d.page, CannyParams{cfg.canny_sigma, cfg.canny_radius, cfg.canny_low,
                                      cfg.canny_high});
  d.thresholds = resolve_layout(cfg, estimate_line_scale(d.edges, cfg.line_band_alpha));
  d.timings.edges_ms = clock.lap();

  const auto& t = d.thresholds;
  d.smeared = smear(d.edges, SmearParams{t.h_thresh, t.v_thresh, t.final_h, t.final_v});
  d.separators = find_separators(d.smeared, d.smeared.bounds(), t.min_h_gap, t.min_v_gap);
  d.timings.smear_ms = clock.lap();

  d.blocks = cut_blocks(d.page, d.edges, d.smeared,
                        connected_black_boxes(d.smeared, t.min_area));
  d.timings.segment_ms = clock.lap();

  const ImageFilter filter = image_filter(cfg, t);
  try {
    d.classification = classify_page(d.blocks, cfg, filter);
  } catch (const NoTextLinesError&) {
    d.no_text_lines = true;
    d.classification = PageClassification{};
    for (const auto& b : d.blocks) {
      d.classification.regions.push_back(
          {b.block.box,
           is_image_block(b.block, filter) ? ElementLabel::Image : ElementLabel::Column,
           std::nullopt});
    }
  }
  d.timings.classify_ms = clock.lap();
  return d;
}

}  // namespace pagedec
