#pragma once

#include <utility>
#include <vector>

#include "pagedec/raster.hpp"

namespace pagedec {

/// Per-pixel length of the maximal same-color run through the pixel.
struct RunValueMap {
  Raster<int> h_run;
  Raster<int> v_run;
};

[[nodiscard]] inline RunValueMap run_values(const BinaryMap& map) {
  const int w = map.width();
  const int h = map.height();
  RunValueMap rv{Raster<int>(w, h), Raster<int>(w, h)};
  for (int y = 0; y < h; ++y) {
    int start = 0;
    for (int x = 1; x <= w; ++x) {
      if (x == w || map(x, y) != map(start, y)) {
        for (int i = start; i < x; ++i) rv.h_run(i, y) = x - start;
        start = x;
      }
    }
  }
  for (int x = 0; x < w; ++x) {
    int start = 0;
    for (int y = 1; y <= h; ++y) {
      if (y == h || map(x, y) != map(x, start)) {
        for (int i = start; i < y; ++i) rv.v_run(x, i) = y - start;
        start = y;
      }
    }
  }
  return rv;
}

/// Run-length smoothing thresholds, in pixels. A white run is filled when it is
/// bounded by black on both ends and strictly shorter than the threshold, so a
/// threshold of 1 disables a pass.
struct SmearParams {
  double h_thresh = 1.0;
  double v_thresh = 1.0;
  double final_h = 1.0;
  double final_v = 1.0;
};

namespace detail {

template <bool Horizontal>
BinaryMap fill_short_gaps(const BinaryMap& in, double thresh) {
  BinaryMap out = in;
  const int lines = Horizontal ? in.height() : in.width();
  const int len = Horizontal ? in.width() : in.height();
  auto at = [&](int line, int i) -> bool {
    return Horizontal ? in(i, line) : in(line, i);
  };
  for (int line = 0; line < lines; ++line) {
    int last_black = -1;
    for (int i = 0; i < len; ++i) {
      if (!at(line, i)) continue;
      const int gap = i - last_black - 1;
      if (last_black >= 0 && gap > 0 && gap < thresh) {
        for (int j = last_black + 1; j < i; ++j) {
          if constexpr (Horizontal) {
            out(j, line) = true;
          } else {
            out(line, j) = true;
          }
        }
      }
      last_black = i;
    }
  }
  return out;
}

}  // namespace detail

[[nodiscard]] inline BinaryMap fill_horizontal(const BinaryMap& in, double thresh) {
  return detail::fill_short_gaps<true>(in, thresh);
}

[[nodiscard]] inline BinaryMap fill_vertical(const BinaryMap& in, double thresh) {
  return detail::fill_short_gaps<false>(in, thresh);
}

/// One round of smoothing: horizontal and vertical fills of the input are
/// AND-ed, then short horizontal and vertical gaps of that result are closed.
[[nodiscard]] inline BinaryMap smear_pass(const BinaryMap& in, const SmearParams& p) {
  BinaryMap h = fill_horizontal(in, p.h_thresh);
  const BinaryMap v = fill_vertical(in, p.v_thresh);
  auto hp = h.pixels();
  auto vp = v.pixels();
  for (std::size_t i = 0; i < hp.size(); ++i) hp[i] = hp[i] && vp[i];
  return fill_vertical(fill_horizontal(h, p.final_h), p.final_v);
}

/// Converts an edge map into solid element blobs. Rounds of smear_pass are
/// repeated until nothing changes, which makes the result a fixed point:
/// smear(smear(m)) == smear(m), and every input black pixel stays black.
[[nodiscard]] inline BinaryMap smear(const BinaryMap& edges, const SmearParams& p) {
  BinaryMap cur = edges;
  for (;;) {
    BinaryMap next = smear_pass(cur, p);
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

[[nodiscard]] inline BinaryMap smear(const BinaryMap& edges, double h_thresh,
                                     double v_thresh, double final_h) {
  return smear(edges, SmearParams{h_thresh, v_thresh, final_h, 1.0});
}

/// Inclusive [start, end] band of rows or columns.
struct Band {
  int start = 0;
  int end = 0;
  [[nodiscard]] int thickness() const { return end - start + 1; }
  friend bool operator==(const Band&, const Band&) = default;
};

/// White row bands (horizontal) and column bands (vertical) inside a scope.
struct SeparatorSet {
  BBox scope;
  std::vector<Band> horizontal;
  std::vector<Band> vertical;
};

namespace detail {

inline std::vector<Band> white_bands(const std::vector<bool>& blank, int offset,
                                     double min_gap) {
  std::vector<Band> out;
  const int n = static_cast<int>(blank.size());
  int i = 0;
  while (i < n) {
    if (!blank[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && blank[j + 1]) ++j;
    if (j - i + 1 >= min_gap) out.push_back({offset + i, offset + j});
    i = j + 1;
  }
  return out;
}

}  // namespace detail

/// Maximal all-white row and column bands of at least the given thickness.
/// Bands touching the scope border (page margins) are included.
[[nodiscard]] inline SeparatorSet find_separators(const BinaryMap& smeared,
                                                  const BBox& scope, double min_h_gap,
                                                  double min_v_gap) {
  if (!smeared.in_bounds(scope)) {
    throw std::out_of_range("separator scope outside the map");
  }
  std::vector<bool> row_blank(scope.height(), true);
  std::vector<bool> col_blank(scope.width(), true);
  for (int y = scope.y0; y <= scope.y1; ++y) {
    for (int x = scope.x0; x <= scope.x1; ++x) {
      if (smeared(x, y)) {
        row_blank[y - scope.y0] = false;
        col_blank[x - scope.x0] = false;
      }
    }
  }
  return {scope, detail::white_bands(row_blank, scope.y0, min_h_gap),
          detail::white_bands(col_blank, scope.x0, min_v_gap)};
}

}  // namespace pagedec
