#include <gtest/gtest.h>

#include <map>

#include "checks.hpp"
#include "fixtures.hpp"
#include "pagedec/classify.hpp"
#include "pagedec/pipeline.hpp"

using namespace pagedec;

namespace {

std::vector<LineMetrics> heights(std::initializer_list<int> hs) {
  std::vector<LineMetrics> out;
  for (int h : hs) {
    LineMetrics m;
    m.line_height = h;
    m.band_bottom = h - 1;
    out.push_back(m);
  }
  return out;
}

TextRules default_rules(int dominant) {
  return resolve_text_rules(DecompositionConfig{}, dominant);
}

ImageFilter filter_with_min(double side) {
  ImageFilter f;
  f.min_w = f.min_h = side;
  return f;
}

// A crop holding `lines` Bangla-like lines of the given height.
GrayImage lined_block(int w, int line_h, int lines, int gap) {
  GrayImage img(w, lines * (line_h + gap) + gap, 255);
  for (int i = 0; i < lines; ++i) {
    const int top = gap + i * (line_h + gap);
    for (int x = 0; x < w; ++x) img(x, top) = img(x, top + 1) = 0;
    for (int y = top; y < top + line_h; ++y)
      for (int x = 0; x < w; x += 4) img(x, y) = 0;
  }
  return img;
}

}  // namespace

TEST(Binarize, Examples) {
  EXPECT_EQ(count_true(binarize_block(GrayImage(4, 4, 255))), 0);
  EXPECT_EQ(count_true(binarize_block(GrayImage(4, 4, 0))), 16);
  GrayImage img(2, 1);
  img(0, 0) = 127;
  img(1, 0) = 128;
  const BinaryMap b = binarize_block(img);
  EXPECT_TRUE(b(0, 0));
  EXPECT_FALSE(b(1, 0));
}

TEST(LineMetrics, EmptyMap) { EXPECT_TRUE(line_metrics(BinaryMap(20, 30), 0.1).empty()); }

TEST(LineMetrics, SolidBand) {
  BinaryMap m(20, 30);
  for (int y = 4; y <= 9; ++y)
    for (int x = 0; x < 20; ++x) m(x, y) = true;
  const auto lines = line_metrics(m, 0.1);
  ASSERT_EQ(lines.size(), 1u);
  const LineMetrics want{4, 9, 6, 4, 0, 20};
  EXPECT_EQ(lines[0], want);
}

TEST(LineMetrics, MatraLine) {
  BinaryMap m(40, 20);
  for (int x = 0; x < 40; ++x) m(x, 5) = true;
  for (int y = 6; y <= 14; ++y)
    for (int x = 0; x < 40; x += 3) m(x, y) = true;
  const auto lines = line_metrics(m, 0.1);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0].matra_row, 5);
  EXPECT_EQ(lines[0].matra_index, 0);
  EXPECT_EQ(lines[0].line_height, 10);
}

TEST(LineMetrics, DropsOneRowBands) {
  BinaryMap m(10, 10);
  for (int x = 0; x < 10; ++x) m(x, 3) = true;
  EXPECT_TRUE(line_metrics(m, 0.1).empty());
  EXPECT_THROW((void)line_metrics(m, 0.0), std::invalid_argument);
}

TEST(DominantLineHeight, Examples) {
  EXPECT_EQ(dominant_line_height({heights({20, 20, 20, 41, 20})}), 20);
  EXPECT_EQ(dominant_line_height({heights({20})}), 20);
  EXPECT_EQ(dominant_line_height({heights({20, 20, 40, 40})}), 20);
  EXPECT_EQ(dominant_line_height({heights({40, 40}), heights({20, 20})}), 20);
  EXPECT_THROW((void)dominant_line_height({}), NoTextLinesError);
  EXPECT_THROW((void)dominant_line_height({{}, {}}), NoTextLinesError);
}

TEST(IsImageBlock, Examples) {
  const ImageFilter f50 = filter_with_min(50);
  EXPECT_FALSE(is_image_block(Block{BBox{0, 0, 9, 9}, 100, 50}, f50));

  // 200 x 150 at edge density 0.08: aspect 0.75
  const Block photo{BBox{0, 0, 199, 149}, 30000, 2400};
  EXPECT_TRUE(is_image_block(photo, f50));

  // a single text line is too short and too flat
  const Block line{BBox{0, 0, 399, 19}, 8000, 2000};
  EXPECT_FALSE(is_image_block(line, f50));
}

TEST(IsImageBlock, FilterBounds) {
  const ImageFilter f = filter_with_min(50);
  const Block dense{BBox{0, 0, 199, 149}, 30000, 30000 / 2};
  EXPECT_FALSE(is_image_block(dense, f));  // density 0.5
  const Block sparse{BBox{0, 0, 199, 149}, 30000, 300};
  EXPECT_FALSE(is_image_block(sparse, f));  // density 0.01
  const Block tall{BBox{0, 0, 59, 599}, 36000, 3600};
  EXPECT_FALSE(is_image_block(tall, f));  // aspect 10
}

TEST(IsImageBlock, MonotoneInSize) {
  const ImageFilter f = filter_with_min(50);
  for (int w = 70; w < 400; w += 37) {
    const int h = w * 3 / 4;
    const long long area = static_cast<long long>(w) * h;
    const Block b{BBox{0, 0, w - 1, h - 1}, area, area / 10};
    EXPECT_TRUE(is_image_block(b, f)) << w;
  }
}

TEST(LabelTextBlock, Examples) {
  const TextRules r = default_rules(20);
  EXPECT_DOUBLE_EQ(r.gap1, 16);
  EXPECT_DOUBLE_EQ(r.x3, 40);
  EXPECT_EQ(label_text_block(heights({20}), 20, r), ElementLabel::Column);
  EXPECT_EQ(label_text_block(heights({44}), 20, r), ElementLabel::Headline);
  EXPECT_EQ(label_text_block(heights({30}), 20, r), ElementLabel::SubHeadline);
  // just above gap2 but not past x1
  EXPECT_EQ(label_text_block(heights({24}), 20, r), ElementLabel::Column);
  EXPECT_THROW((void)label_text_block({}, 20, r), std::invalid_argument);
}

TEST(LabelTextBlock, ColumnAtDominant) {
  const auto r = checks::label_column_at_zero(100);
  EXPECT_EQ(r.failures, 0) << r.first_failure;
}

TEST(ClassifyPage, ImagePhaseComesFirst) {
  DecompositionConfig cfg;
  const ImageFilter f = filter_with_min(50);
  // tall lines that would be a headline, inside a block that passes the image
  // filters
  const GrayImage tall = lined_block(300, 60, 3, 10);
  const GrayImage body = lined_block(300, 16, 8, 6);
  const long long tall_area = static_cast<long long>(tall.width()) * tall.height();
  std::vector<CutBlock> blocks = {
      {Block{BBox{0, 0, tall.width() - 1, tall.height() - 1}, tall_area, tall_area / 20}, tall},
      {Block{BBox{0, 300, body.width() - 1, 300 + body.height() - 1}, 1, 1}, body},
  };
  const PageClassification c = classify_page(blocks, cfg, f);
  ASSERT_EQ(c.regions.size(), 2u);
  EXPECT_EQ(c.regions[0].label, ElementLabel::Image);
  EXPECT_EQ(c.regions[1].label, ElementLabel::Column);
  EXPECT_EQ(c.dominant_line_height, 16);

  // without the image filter the same block is a headline
  blocks[0].block.edge_pixel_count = tall_area / 2;
  const PageClassification d = classify_page(blocks, cfg, f);
  EXPECT_EQ(d.regions[0].label, ElementLabel::Headline);
}

TEST(ClassifyPage, DominantOverAllBlocksWithoutImages) {
  DecompositionConfig cfg;
  const GrayImage a = lined_block(200, 16, 6, 6);
  const GrayImage b = lined_block(200, 16, 4, 6);
  const GrayImage c = lined_block(200, 26, 1, 6);
  const std::vector<CutBlock> blocks = {
      {Block{BBox{0, 0, 199, a.height() - 1}, 1, 1}, a},
      {Block{BBox{0, 0, 199, b.height() - 1}, 1, 1}, b},
      {Block{BBox{0, 0, 199, c.height() - 1}, 1, 1}, c},
  };
  const PageClassification r = classify_page(blocks, cfg, filter_with_min(1000));
  EXPECT_EQ(r.dominant_line_height, 16);
  EXPECT_EQ(r.regions[2].label, ElementLabel::SubHeadline);
  EXPECT_EQ(r.regions[2].line_height, 26);
}

TEST(ClassifyPage, OneImageThreeColumnsEndToEnd) {
  PageSpec s;
  s.seed = 21;
  s.column_count = 3;
  s.image_blocks.push_back({0.0, 0.0, 1.0, 0.3});
  const SynthPage page = synth_page(s);
  std::map<ElementLabel, int> truth;
  for (const auto& r : page.truth.regions) ++truth[r.label];
  ASSERT_EQ(truth[ElementLabel::Image], 1);
  ASSERT_EQ(truth[ElementLabel::Column], 3);

  const Decomposition d = decompose(page.image, DecompositionConfig{}, false);
  std::map<ElementLabel, int> got;
  for (const auto& r : d.regions()) ++got[r.label];
  EXPECT_EQ(got, truth);
  const EvalReport rep = match_regions(d.regions(), page.truth.regions);
  EXPECT_EQ(rep[ElementLabel::Image].tp, 1);
  EXPECT_EQ(rep[ElementLabel::Column].tp, 3);
}

TEST(ClassifyPage, DeterministicAndScaleCovariant) {
  PageSpec s;
  s.seed = 33;
  s.column_count = 2;
  s.headline_present = true;
  s.subheadline_present = true;
  const SynthPage small = synth_page(s);
  const DecompositionConfig cfg;
  const Decomposition a = decompose(small.image, cfg, false);
  const Decomposition b = decompose(small.image, cfg, false);
  EXPECT_EQ(a.regions(), b.regions());

  // doubling resolution: every pixel becomes a 2x2 block
  GrayImage big(small.image.width() * 2, small.image.height() * 2);
  for (int y = 0; y < big.height(); ++y)
    for (int x = 0; x < big.width(); ++x) big(x, y) = small.image(x / 2, y / 2);
  const Decomposition c = decompose(big, cfg, false);
  std::vector<ElementLabel> la, lc;
  for (const auto& r : a.regions()) la.push_back(r.label);
  for (const auto& r : c.regions()) lc.push_back(r.label);
  EXPECT_EQ(la, lc);
}
