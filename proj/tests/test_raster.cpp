#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "fixtures.hpp"
#include "pagedec/image_io.hpp"
#include "pagedec/raster.hpp"

using namespace pagedec;

namespace {

GrayImage from_rows(std::initializer_list<std::initializer_list<int>> rows) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.begin()->size());
  GrayImage img(w, h);
  int y = 0;
  for (const auto& r : rows) {
    int x = 0;
    for (int v : r) img(x++, y) = static_cast<std::uint8_t>(v);
    ++y;
  }
  return img;
}

}  // namespace

TEST(LoadPage, OnePixelPgm) {
  fixtures::TempDir dir("raster");
  {
    std::ofstream f(dir / "one.pgm", std::ios::binary);
    f << "P5\n1 1\n255\n";
    f.put('\0');
  }
  const GrayImage img = load_page(dir / "one.pgm");
  ASSERT_EQ(img.width(), 1);
  ASSERT_EQ(img.height(), 1);
  EXPECT_EQ(img(0, 0), 0);
}

TEST(LoadPage, RgbLuminance) {
  fixtures::TempDir dir("raster");
  RgbImage rgb(2, 1);
  rgb.set(0, 0, {255, 255, 255});
  rgb.set(1, 0, {100, 150, 200});
  save_png(rgb, dir / "rgb.png");
  const GrayImage img = load_page(dir / "rgb.png");
  EXPECT_EQ(img(0, 0), 255);
  // 0.299 * 100 + 0.587 * 150 + 0.114 * 200 = 140.75
  EXPECT_EQ(img(1, 0), 141);
}

TEST(LoadPage, GrayPngRoundTrip) {
  fixtures::TempDir dir("raster");
  GrayImage img(5, 3);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 5; ++x) img(x, y) = static_cast<std::uint8_t>(40 * x + y);
  save_png(img, dir / "g.png");
  EXPECT_EQ(load_page(dir / "g.png"), img);
}

TEST(LoadPage, UnreadableThrows) {
  fixtures::TempDir dir("raster");
  EXPECT_THROW((void)load_page(dir / "missing.png"), ImageIoError);
  std::ofstream(dir / "junk.png") << "not an image";
  EXPECT_THROW((void)load_page(dir / "junk.png"), ImageIoError);
}

TEST(RotateQuarter, Examples) {
  const GrayImage img = from_rows({{10, 20}});
  EXPECT_EQ(rotate_quarter(img, 0), img);
  EXPECT_EQ(rotate_quarter(img, 2), from_rows({{20, 10}}));
  // counter-clockwise: the right end moves to the top
  EXPECT_EQ(rotate_quarter(img, 1), from_rows({{20}, {10}}));
  EXPECT_EQ(rotate_quarter(img, 3), from_rows({{10}, {20}}));
}

TEST(RotateQuarter, FourTurnsIdentity) {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    GrayImage img(rng.uniform_int(1, 20), rng.uniform_int(1, 20));
    for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    GrayImage r = img;
    for (int k = 0; k < 4; ++k) r = rotate_quarter(r, 1);
    EXPECT_EQ(r, img);
  }
}

TEST(RotateByAngle, ZeroIsIdentity) {
  const GrayImage img = synth_page(fixtures::text_page(3)).image;
  EXPECT_EQ(rotate_by_angle(img, 0.0, 255), img);
}

namespace {

// Mean absolute difference and binarized disagreement after rotating by
// theta and back, over the original footprint.
struct RoundTrip {
  double mean = 0.0;
  double flipped = 0.0;
};

RoundTrip round_trip(const GrayImage& img, double theta) {
  const GrayImage back = rotate_by_angle(rotate_by_angle(img, theta, 255), -theta, 255);
  // the round trip grows the canvas twice around a shared center
  const int dx = (back.width() - img.width()) / 2;
  const int dy = (back.height() - img.height()) / 2;
  double sum = 0.0, flips = 0.0;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const int a = img(x, y), b = back(x + dx, y + dy);
      sum += std::abs(a - b);
      flips += (a < 128) != (b < 128);
    }
  const double n = double(img.width()) * img.height();
  return {sum / n, flips / n};
}

}  // namespace

TEST(RotateByAngle, RoundTripWithinThreeLevelsOnShadedContent) {
  GrayImage img(240, 200);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      img(x, y) = static_cast<std::uint8_t>(128 + 100 * std::sin(x * 0.05) * std::cos(y * 0.07));
  for (double theta : {-10.0, -6.5, -2.0, 1.0, 3.7, 10.0})
    EXPECT_LT(round_trip(img, theta).mean, 3.0) << "theta " << theta;
}

TEST(RotateByAngle, RoundTripKeepsInkOnTextPages) {
  // thin high-contrast strokes lose grey levels to two bilinear passes, but
  // the ink/paper decision survives
  const GrayImage img = synth_page(fixtures::text_page(4)).image;
  for (double theta : {-10.0, -2.0, 3.7, 10.0})
    EXPECT_LT(round_trip(img, theta).flipped, 0.01) << "theta " << theta;
}

TEST(RotateByAngle, QuarterAnglesMatchRotateQuarter) {
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    GrayImage img(rng.uniform_int(1, 25), rng.uniform_int(1, 25));
    for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    EXPECT_EQ(rotate_by_angle(img, 90.0, 255), rotate_quarter(img, 1));
    EXPECT_EQ(rotate_by_angle(img, -90.0, 255), rotate_quarter(img, 3));
  }
}

TEST(RotateByAngle, CanvasHoldsSource) {
  const auto c = rotated_canvas(600, 800, 10.0);
  EXPECT_GE(c.width, 600);
  EXPECT_GE(c.height, 800);
}

TEST(Crop, Examples) {
  const GrayImage img = from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  EXPECT_EQ(crop(img, img.bounds()), img);
  EXPECT_EQ(crop(img, BBox{0, 0, 0, 0}), from_rows({{1}}));
  EXPECT_EQ(crop(img, BBox{1, 1, 2, 2}), from_rows({{5, 6}, {8, 9}}));
  EXPECT_THROW((void)crop(img, BBox{2, 2, 3, 3}), std::out_of_range);
}

TEST(BBox, IouBasics) {
  const BBox a{0, 0, 9, 9};
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(iou(a, BBox{20, 20, 25, 25}), 0.0);
  EXPECT_DOUBLE_EQ(iou(a, BBox{0, 0, 4, 9}), 0.5);
}
