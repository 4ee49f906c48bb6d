#include <gtest/gtest.h>

#include <cmath>

#include "checks.hpp"
#include "fixtures.hpp"
#include "pagedec/orient.hpp"

using namespace pagedec;

namespace {

const DecompositionConfig kCfg;

BinaryMap ink_of(const GrayImage& img) { return binarize_block(img, kCfg.binarize_threshold); }

SkewParams params() { return skew_params(kCfg); }

GrayImage upright_page(std::uint64_t seed, int columns = 2) {
  return synth_page(fixtures::text_page(seed, columns)).image;
}

GrayImage distorted_page(std::uint64_t seed, double skew, int turns,
                         std::vector<FracBox> images = {}) {
  PageSpec s = fixtures::text_page(seed);
  s.skew = skew;
  s.turns = turns;
  s.image_blocks = std::move(images);
  return synth_page(s).image;
}

}  // namespace

TEST(SkewAngle, HorizontalLinesGiveZero) {
  const SkewEstimate e = skew_angle(ink_of(upright_page(1)), params());
  EXPECT_LE(std::abs(e.angle), kCfg.skew_fine_step);
}

TEST(SkewAngle, RecoversContentTilt) {
  // positive = counter-clockwise tilt of the content; deskew undoes it
  const GrayImage tilted = rotate_by_angle(upright_page(2), 3.7, 255);
  const SkewEstimate e = skew_angle(ink_of(tilted), params());
  EXPECT_NEAR(e.angle, 3.7, 0.2);
  const GrayImage other = rotate_by_angle(upright_page(2), -3.7, 255);
  EXPECT_NEAR(skew_angle(ink_of(other), params()).angle, -3.7, 0.2);
}

TEST(SkewAngle, ObjectivePeaksAtTrueSkew) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const double theta = -8.0 + 3.0 * double(seed);
    const BinaryMap ink = ink_of(rotate_by_angle(upright_page(seed), theta, 255));
    EXPECT_GT(skew_objective(ink, theta), skew_objective(ink, theta + 5.0)) << seed;
  }
}

TEST(SkewAngle, ObjectiveTranslationInvariant) {
  const BinaryMap ink = ink_of(upright_page(4));
  BinaryMap shifted(ink.width() + 37, ink.height());
  for (int y = 0; y < ink.height(); ++y)
    for (int x = 0; x < ink.width(); ++x) shifted(x + 37, y) = ink(x, y);
  for (double a : {-4.0, 0.0, 2.5}) {
    EXPECT_DOUBLE_EQ(skew_objective(ink, a), skew_objective(shifted, a));
  }
}

TEST(SkewAngle, Errors) {
  EXPECT_THROW((void)skew_angle(BinaryMap(50, 50), params()), NoContentError);
  EXPECT_THROW((void)skew_angle(BinaryMap(50, 50), SkewParams{20.0, 0.5, 0.1}),
               std::invalid_argument);
  EXPECT_THROW((void)skew_angle(BinaryMap(50, 50), SkewParams{10.0, 0.1, 0.5}),
               std::invalid_argument);
}

TEST(FourWaySkew, UprightPage) {
  const FourWaySkew fw = four_way_skew(ink_of(upright_page(5)), params());
  EXPECT_LE(std::abs(fw.chosen.angle), 0.2);
}

TEST(FourWaySkew, SkewedPage) {
  const FourWaySkew fw = four_way_skew(ink_of(distorted_page(6, 4.0, 0)), params());
  EXPECT_NEAR(std::abs(fw.chosen.angle), 4.0, 0.2);
  EXPECT_NEAR(fw.chosen.angle, 4.0, 0.2);
}

TEST(FourWaySkew, PhotoOnTopHalf) {
  const GrayImage page = distorted_page(7, -6.0, 0, {{0.0, 0.0, 1.0, 0.5}});
  const FourWaySkew fw = four_way_skew(ink_of(page), params());
  EXPECT_NEAR(fw.chosen.angle, -6.0, 0.3);
}

TEST(Deskew, ZeroAngleIsIdentity) {
  const GrayImage page = upright_page(8);
  EXPECT_EQ(deskew(page, SkewEstimate{}, 0.1), page);
  EXPECT_EQ(deskew(page, SkewEstimate{0.05, 0, 0}, 0.1), page);
}

TEST(Deskew, RoundTripAndConvergence) {
  const GrayImage page = rotate_by_angle(upright_page(9), 3.7, 255);
  const SkewEstimate e = skew_angle(ink_of(page), params());
  const GrayImage fixed = deskew(page, e, kCfg.skew_fine_step);
  const SkewEstimate residual = skew_angle(ink_of(fixed), params());
  EXPECT_LE(std::abs(residual.angle), 0.3);
  const GrayImage again = deskew(fixed, residual, kCfg.skew_fine_step);
  const SkewEstimate after = skew_angle(ink_of(again), params());
  EXPECT_LT(std::abs(after.angle - residual.angle), kCfg.skew_fine_step + 1e-9);
}

TEST(DecideRotation, AllFourQuarterTurns) {
  const BinaryMap upright = ink_of(upright_page(10));
  const OrientParams p = orient_params(kCfg);

  const OrientationDecision d0 = decide_rotation(upright, p);
  EXPECT_EQ(d0.turns, 0);
  EXPECT_GT(d0.pixel_ratio_0, d0.pixel_ratio_90);
  EXPECT_TRUE(d0.matra_test_passed);

  const OrientationDecision d2 = decide_rotation(rotate_quarter(upright, 2), p);
  EXPECT_EQ(d2.turns, 2);
  EXPECT_FALSE(d2.matra_test_passed);

  // page turned a quarter counter-clockwise: the clockwise view is upright
  const OrientationDecision d1 = decide_rotation(rotate_quarter(upright, 1), p);
  EXPECT_GT(d1.pixel_ratio_90, d1.pixel_ratio_0);
  EXPECT_EQ(d1.turns, 3);

  // page turned a quarter clockwise: the clockwise view is upside down
  const OrientationDecision d3 = decide_rotation(rotate_quarter(upright, 3), p);
  EXPECT_GT(d3.pixel_ratio_90, d3.pixel_ratio_0);
  EXPECT_EQ(d3.turns, 1);

  for (int k = 0; k < 4; ++k) {
    const int turns = decide_rotation(rotate_quarter(upright, k), p).turns;
    EXPECT_EQ(rotate_quarter(rotate_quarter(upright, k), turns), upright) << k;
  }
}

TEST(DecideRotation, Undecidable) {
  EXPECT_THROW((void)decide_rotation(BinaryMap(100, 100), orient_params(kCfg)),
               OrientationUndecidableError);
}

TEST(DecideRotation, ImageFirstUsesLastLine) {
  PageSpec s = fixtures::text_page(11, 1);
  s.image_blocks.push_back({0.0, 0.0, 1.0, 0.45});
  const BinaryMap ink = ink_of(synth_page(s).image);
  const OrientationDecision d = decide_rotation(ink, orient_params(kCfg));
  EXPECT_EQ(d.turns, 0);
  EXPECT_TRUE(d.used_last_line);
}

TEST(AutoOrient, UprightUnskewedIsUntouched) {
  const GrayImage page = upright_page(12);
  const OrientResult r = auto_orient(page, kCfg);
  EXPECT_EQ(r.page, page);
  ASSERT_TRUE(r.rotation);
  EXPECT_EQ(r.rotation->turns, 0);
  EXPECT_FALSE(r.deskewed);
}

TEST(AutoOrient, SkewedAndUpsideDown) {
  const OrientResult r = auto_orient(distorted_page(13, 3.0, 2), kCfg);
  ASSERT_TRUE(r.skew && r.rotation);
  EXPECT_NEAR(r.skew->angle, 3.0, 0.3);
  EXPECT_EQ(r.rotation->turns, 2);
  const SkewEstimate residual = skew_angle(ink_of(r.page), params());
  EXPECT_LE(std::abs(residual.angle), 0.3);
  EXPECT_EQ(decide_rotation(ink_of(r.page), orient_params(kCfg)).turns, 0);
}

TEST(AutoOrient, ImageOnTopTurnedClockwise) {
  const OrientResult r = auto_orient(distorted_page(14, 2.0, 3, {{0.0, 0.0, 1.0, 0.4}}), kCfg);
  ASSERT_TRUE(r.skew && r.rotation);
  EXPECT_NEAR(r.skew->angle, 2.0, 0.3);
  EXPECT_EQ(r.rotation->turns, 1);
}

TEST(AutoOrient, ImageOnTopTurnedCounterClockwise) {
  const OrientResult r = auto_orient(distorted_page(15, -2.0, 1, {{0.0, 0.0, 1.0, 0.4}}), kCfg);
  ASSERT_TRUE(r.skew && r.rotation);
  EXPECT_NEAR(r.skew->angle, -2.0, 0.3);
  EXPECT_EQ(r.rotation->turns, 3);
}

TEST(AutoOrient, BlankPageFlagsNoContent) {
  const OrientResult r = auto_orient(GrayImage(400, 400, 255), kCfg);
  EXPECT_TRUE(r.no_content);
  EXPECT_FALSE(r.rotation);
}

TEST(AutoOrient, RecoversEveryTurn) {
  for (int k = 0; k < 4; ++k) {
    const double skew = -7.5 + 5.0 * k;
    const OrientResult r = auto_orient(distorted_page(20 + k, skew, k), kCfg);
    ASSERT_TRUE(r.skew && r.rotation) << k;
    EXPECT_NEAR(r.skew->angle, skew, 0.3) << k;
    EXPECT_EQ(r.rotation->turns, (4 - k) % 4) << k;
  }
}

TEST(AutoOrient, Idempotent) {
  const auto r = checks::auto_orient_idempotent(15);
  EXPECT_EQ(r.failures, 0) << r.first_failure;
}
