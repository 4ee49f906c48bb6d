#include <gtest/gtest.h>

#include "checks.hpp"
#include "fixtures.hpp"
#include "pagedec/harness.hpp"

using namespace pagedec;

TEST(SynthPage, Deterministic) {
  PageSpec s = fixtures::text_page(42);
  s.headline_present = true;
  s.image_blocks.push_back({0.0, 0.1, 0.5, 0.4});
  s.skew = 2.5;
  s.turns = 1;
  s.noise_density = 0.001;
  const SynthPage a = synth_page(s);
  const SynthPage b = synth_page(s);
  EXPECT_EQ(a.image, b.image);
  EXPECT_EQ(a.truth, b.truth);
  s.seed = 43;
  EXPECT_NE(synth_page(s).image, a.image);
}

TEST(SynthPage, ColumnsOnly) {
  const SynthPage p = synth_page(fixtures::text_page(1, 1));
  ASSERT_FALSE(p.truth.regions.empty());
  for (const auto& r : p.truth.regions) EXPECT_EQ(r.label, ElementLabel::Column);
}

TEST(SynthPage, RecordsDistortion) {
  PageSpec s = fixtures::text_page(2);
  s.skew = 3.7;
  s.turns = 2;
  const SynthPage p = synth_page(s);
  EXPECT_DOUBLE_EQ(p.truth.skew, 3.7);
  EXPECT_EQ(p.truth.turns, 2);
  EXPECT_EQ(p.truth.width, 600);
  EXPECT_EQ(p.truth.height, 800);
}

TEST(SynthPage, TruthInsideUprightPage) {
  const auto specs = layout_corpus(10, 5);
  for (const auto& s : specs) {
    const SynthPage p = synth_page(s);
    const BBox page{0, 0, s.width - 1, s.height - 1};
    for (std::size_t i = 0; i < p.truth.regions.size(); ++i) {
      EXPECT_TRUE(page.contains(p.truth.regions[i].box));
      for (std::size_t j = i + 1; j < p.truth.regions.size(); ++j)
        EXPECT_FALSE(p.truth.regions[i].box.intersects(p.truth.regions[j].box));
    }
  }
}

TEST(SynthPage, QuarterTurnsSwapSize) {
  PageSpec s = fixtures::text_page(3);
  s.turns = 1;
  const SynthPage p = synth_page(s);
  EXPECT_EQ(p.image.width(), 800);
  EXPECT_EQ(p.image.height(), 600);
}

TEST(SynthPage, InvalidSpecs) {
  PageSpec s = fixtures::text_page(1);
  s.width = 300;
  EXPECT_THROW((void)synth_page(s), LayoutError);
  s = fixtures::text_page(1);
  s.noise_density = 0.02;
  EXPECT_THROW((void)synth_page(s), LayoutError);
  s = fixtures::text_page(1, 8);
  EXPECT_THROW((void)synth_page(s), LayoutError);  // too many columns
}

TEST(MatchRegions, PerfectPrediction) {
  const SynthPage p = synth_page(layout_corpus(1, 9)[0]);
  std::vector<Region> pred;
  for (const auto& t : p.truth.regions) pred.push_back({t.box, t.label, std::nullopt});
  const EvalReport r = match_regions(pred, p.truth.regions);
  for (ElementLabel l : kAllLabels) {
    EXPECT_DOUBLE_EQ(r[l].precision(), 1.0);
    EXPECT_DOUBLE_EQ(r[l].recall(), 1.0);
    EXPECT_DOUBLE_EQ(r[l].accuracy(), 1.0);
  }
}

TEST(MatchRegions, EmptyPrediction) {
  const std::vector<TruthRegion> truth = {{BBox{0, 0, 9, 9}, ElementLabel::Column}};
  const EvalReport r = match_regions({}, truth);
  EXPECT_DOUBLE_EQ(r[ElementLabel::Column].recall(), 0.0);
  EXPECT_DOUBLE_EQ(r[ElementLabel::Column].precision(), 1.0);
  EXPECT_LT(r[ElementLabel::Column].accuracy(), 1.0);
}

TEST(MatchRegions, MislabeledColumn) {
  const std::vector<TruthRegion> truth = {{BBox{0, 0, 99, 199}, ElementLabel::Column},
                                          {BBox{120, 0, 219, 199}, ElementLabel::Column}};
  const std::vector<Region> pred = {{BBox{0, 0, 99, 199}, ElementLabel::Column, 16},
                                    {BBox{120, 0, 219, 199}, ElementLabel::Headline, 16}};
  const EvalReport r = match_regions(pred, truth);
  EXPECT_DOUBLE_EQ(r[ElementLabel::Column].precision(), 1.0);
  EXPECT_DOUBLE_EQ(r[ElementLabel::Column].recall(), 0.5);
  EXPECT_DOUBLE_EQ(r[ElementLabel::Headline].precision(), 0.0);
  EXPECT_DOUBLE_EQ(r[ElementLabel::Headline].recall(), 1.0);
  EXPECT_EQ(r[ElementLabel::Headline].fp, 1);
  // the first column is correctly not a headline; the second was claimed
  EXPECT_EQ(r[ElementLabel::Headline].tn, 1);
}

TEST(MatchRegions, IouThreshold) {
  const std::vector<TruthRegion> truth = {{BBox{0, 0, 9, 9}, ElementLabel::Image}};
  const std::vector<Region> half = {{BBox{0, 0, 4, 9}, ElementLabel::Image, std::nullopt}};
  EXPECT_EQ(match_regions(half, truth, 0.5)[ElementLabel::Image].tp, 1);
  EXPECT_EQ(match_regions(half, truth, 0.51)[ElementLabel::Image].tp, 0);
  EXPECT_THROW((void)match_regions(half, truth, 0.0), std::invalid_argument);
}

TEST(MatchRegions, GreedyPrefersBestOverlap) {
  const std::vector<TruthRegion> truth = {{BBox{0, 0, 9, 9}, ElementLabel::Column},
                                          {BBox{0, 0, 11, 9}, ElementLabel::Column}};
  const std::vector<Region> pred = {{BBox{0, 0, 11, 9}, ElementLabel::Column, std::nullopt}};
  const EvalReport r = match_regions(pred, truth);
  ASSERT_EQ(r.matches.size(), 1u);
  EXPECT_EQ(r.matches[0].truth, 1);
  EXPECT_DOUBLE_EQ(r.matches[0].iou, 1.0);
}

TEST(MatchRegions, CountIdentities) {
  const auto r = checks::match_count_identities(200);
  EXPECT_EQ(r.failures, 0) << r.first_failure;
}

TEST(MatchRegions, IouMatchesPixelOracle) {
  const auto r = checks::iou_matches_oracle(500);
  EXPECT_EQ(r.failures, 0) << r.first_failure;
}

TEST(UprightFrame, UndoesCanvasGrowth) {
  const std::vector<Region> regions = {{BBox{60, 50, 159, 149}, ElementLabel::Column, 16},
                                       {BBox{0, 0, 30, 30}, ElementLabel::Image, std::nullopt}};
  const auto out = to_upright_frame(regions, 720, 900, 600, 800);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].box, (BBox{0, 0, 99, 99}));
}

TEST(RunCorpus, TrivialSinglePage) {
  const CorpusReport r = run_corpus({fixtures::text_page(5, 1)}, DecompositionConfig{});
  EXPECT_DOUBLE_EQ(r.aggregate[ElementLabel::Column].recall(), 1.0);
  EXPECT_DOUBLE_EQ(r.rotation_accuracy, 1.0);
  EXPECT_EQ(r.failures, 0);
}

TEST(RunCorpus, PageFailuresAreRecorded) {
  PageSpec bad = fixtures::text_page(1, 8);
  const CorpusReport r = run_corpus({bad, fixtures::text_page(2, 1)}, DecompositionConfig{});
  ASSERT_EQ(r.pages.size(), 2u);
  EXPECT_TRUE(r.pages[0].error.has_value());
  EXPECT_FALSE(r.pages[1].error.has_value());
  EXPECT_EQ(r.failures, 1);
}

TEST(RunCorpus, DeterministicAcrossWorkers) {
  const auto specs = rotation_corpus(6, 3);
  const DecompositionConfig cfg;
  const CorpusReport a = run_corpus(specs, cfg, 0.5, 1);
  const CorpusReport b = run_corpus(specs, cfg, 0.5, 3);
  EXPECT_EQ(a.aggregate, b.aggregate);
  EXPECT_EQ(a.mean_abs_skew_error, b.mean_abs_skew_error);
  EXPECT_EQ(a.rotation_accuracy, b.rotation_accuracy);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    EXPECT_EQ(a.pages[i].skew_estimate, b.pages[i].skew_estimate);
    EXPECT_EQ(a.pages[i].turns_applied, b.pages[i].turns_applied);
  }
}

TEST(Presets, ShapeOfCorpora) {
  const auto d = deskew_corpus(70, 1);
  ASSERT_EQ(d.size(), 70u);
  for (const auto& s : d) {
    EXPECT_EQ(s.turns, 0);
    EXPECT_LE(std::abs(s.skew), 10.0);
  }
  const auto r = rotation_corpus(70, 2);
  int with_image = 0;
  for (const auto& s : r) with_image += s.image_blocks.empty() ? 0 : 1;
  EXPECT_GE(with_image, 70 / 3);
  EXPECT_EQ(layout_corpus(50, 3).size(), 50u);
}
