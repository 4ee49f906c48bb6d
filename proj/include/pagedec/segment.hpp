#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "pagedec/raster.hpp"

namespace pagedec {

/// A candidate layout element cut from the smeared map.
struct Block {
  BBox box;
  long long black_pixel_count = 0;  // smeared-map pixels inside box
  long long edge_pixel_count = 0;   // edge-map pixels inside box

  friend bool operator==(const Block&, const Block&) = default;
};

namespace detail {

class DisjointSets {
 public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int find(int a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // smaller root wins so labels stay in scan order
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }
  [[nodiscard]] int size() const { return static_cast<int>(parent_.size()); }

 private:
  std::vector<int> parent_;
};

/// Repeatedly unions intersecting boxes until the set is pairwise disjoint.
inline std::vector<BBox> merge_intersecting(std::vector<BBox> boxes) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::sort(boxes.begin(), boxes.end(), [](const BBox& a, const BBox& b) {
      return std::tie(a.x0, a.y0, a.x1, a.y1) < std::tie(b.x0, b.y0, b.x1, b.y1);
    });
    std::vector<BBox> merged;
    merged.reserve(boxes.size());
    std::vector<bool> used(boxes.size(), false);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (used[i]) continue;
      BBox cur = boxes[i];
      bool grew = true;
      while (grew) {
        grew = false;
        for (std::size_t j = i + 1; j < boxes.size(); ++j) {
          if (used[j]) continue;
          // sorted by x0: nothing further right can touch cur
          if (boxes[j].x0 > cur.x1) break;
          if (cur.intersects(boxes[j])) {
            cur = cur.united(boxes[j]);
            used[j] = true;
            grew = true;
            changed = true;
          }
        }
      }
      merged.push_back(cur);
    }
    boxes = std::move(merged);
  }
  return boxes;
}

}  // namespace detail

/// Bounding boxes of 4-connected components of true pixels. Components whose
/// bounding box is smaller than `min_area` are dropped, then intersecting
/// boxes are merged until no two overlap. Sorted by (y0, x0).
[[nodiscard]] inline std::vector<Block> connected_black_boxes(const BinaryMap& smeared,
                                                              long long min_area) {
  if (min_area < 1) throw std::invalid_argument("min_area must be >= 1");
  const int w = smeared.width();
  const int h = smeared.height();
  Raster<int> label(w, h, -1);
  detail::DisjointSets sets;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!smeared(x, y)) continue;
      const int left = x > 0 ? label(x - 1, y) : -1;
      const int up = y > 0 ? label(x, y - 1) : -1;
      if (left < 0 && up < 0) {
        label(x, y) = sets.make();
      } else if (left >= 0 && up >= 0) {
        sets.unite(left, up);
        label(x, y) = std::min(left, up);
      } else {
        label(x, y) = std::max(left, up);
      }
    }
  }

  std::vector<BBox> comp(sets.size(), BBox{w, h, -1, -1});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int l = label(x, y);
      if (l < 0) continue;
      BBox& b = comp[sets.find(l)];
      b.x0 = std::min(b.x0, x);
      b.y0 = std::min(b.y0, y);
      b.x1 = std::max(b.x1, x);
      b.y1 = std::max(b.y1, y);
    }
  }
  std::vector<BBox> kept;
  for (const BBox& b : comp) {
    if (b.valid() && b.area() >= min_area) kept.push_back(b);
  }
  auto merged = detail::merge_intersecting(std::move(kept));
  std::sort(merged.begin(), merged.end(), [](const BBox& a, const BBox& b) {
    return std::tie(a.y0, a.x0, a.y1, a.x1) < std::tie(b.y0, b.x0, b.y1, b.x1);
  });

  std::vector<Block> blocks;
  blocks.reserve(merged.size());
  for (const BBox& b : merged) blocks.push_back({b, count_true(smeared, b), 0});
  return blocks;
}

/// A block paired with its crop of the original grayscale page.
struct CutBlock {
  Block block;
  GrayImage image;
};

/// Crops the original page (not the smeared map) for each block and fills in
/// its edge pixel count.
[[nodiscard]] inline std::vector<CutBlock> cut_blocks(const GrayImage& page,
                                                      const BinaryMap& edges,
                                                      const BinaryMap& smeared,
                                                      const std::vector<Block>& blocks) {
  std::vector<CutBlock> out;
  out.reserve(blocks.size());
  for (Block b : blocks) {
    if (!page.in_bounds(b.box) || !edges.in_bounds(b.box) || !smeared.in_bounds(b.box)) {
      throw std::out_of_range("block box outside the page");
    }
    b.black_pixel_count = count_true(smeared, b.box);
    b.edge_pixel_count = count_true(edges, b.box);
    out.push_back({b, crop(page, b.box)});
  }
  return out;
}

}  // namespace pagedec
