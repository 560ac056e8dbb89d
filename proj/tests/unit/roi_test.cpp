#include <gtest/gtest.h>

#include "oracles.hpp"
#include "roiprep/error.hpp"
#include "roiprep/roi.hpp"

using namespace roiprep;

namespace {

BinaryMask mask_from(const std::vector<std::string>& rows) {
  BinaryMask m{rows[0].size(), rows.size(), {}};
  for (const auto& r : rows)
    for (char c : r) m.bits.push_back(c == '#' ? 1 : 0);
  return m;
}

RoiConfig fixed(double tau) {
  RoiConfig c;
  c.threshold = FixedThreshold{tau};
  return c;
}

// Compare library regions against the flood-fill oracle: same partition,
// bboxes and counts, labels in raster order of first pixel.
void expect_matches_oracle(const BinaryMask& mask, Connectivity conn) {
  const auto labeled = label_components(mask, conn);
  const auto& got = labeled.regions;
  const auto want = oracle::flood_fill(mask, static_cast<int>(conn));
  ASSERT_EQ(got, connected_components(mask, conn));
  ASSERT_EQ(got.size(), want.size());
  EXPECT_EQ(labeled.labels, oracle::label_grid(want, mask.width, mask.height));
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].label, i + 1);
    EXPECT_EQ(got[i].pixel_count, want[i].pixels.size());
    EXPECT_EQ(got[i].bbox, (BoundingBox{want[i].x0, want[i].y0, want[i].x1 - want[i].x0 + 1,
                                        want[i].y1 - want[i].y0 + 1}));
  }
}

}  // namespace

TEST(Binarize, FixedThreshold) {
  const auto r = binarize(SaliencyMap(4, 1, {0, 0.2, 0.8, 1}), fixed(0.5));
  EXPECT_EQ(r.mask.bits, (std::vector<std::uint8_t>{0, 0, 1, 1}));
  EXPECT_EQ(r.threshold, 0.5);
}

TEST(Binarize, ZeroMapIsEmptyInEveryMode) {
  const auto zeros = SaliencyMap::filled(5, 5, 0.0);
  EXPECT_EQ(binarize(zeros, fixed(0.0)).mask.count(), 0u);
  EXPECT_EQ(binarize(zeros, RoiConfig{}).mask.count(), 0u);
  EXPECT_EQ(binarize(SaliencyMap::filled(3, 3, 0.7), RoiConfig{}).mask.count(), 0u);
}

TEST(Binarize, QuantileMatchesSortOracle) {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto map = oracle::random_map(rng, 10, 10);
    RoiConfig c;
    c.threshold = QuantileThreshold{0.9};
    const auto r = binarize(map, c);
    const std::vector<double> values(map.values().begin(), map.values().end());
    const double tau = oracle::sorted_quantile(values, 0.9);
    EXPECT_NEAR(r.threshold, tau, 1e-15);
    std::size_t above = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      EXPECT_EQ(r.mask.bits[i] == 1, values[i] > r.threshold);
      above += values[i] > tau;
    }
    EXPECT_EQ(r.mask.count(), above);
    // Distinct values: the 90th percentile of 100 cells leaves exactly 10 above.
    EXPECT_EQ(above, 10u);
  }
}

TEST(ConnectedComponents, TrivialCases) {
  EXPECT_TRUE(connected_components(mask_from({"....", "...."}), Connectivity::Eight).empty());
  BinaryMask single{6, 5, std::vector<std::uint8_t>(30, 0)};
  single.bits[2 * 6 + 3] = 1;
  const auto r = connected_components(single, Connectivity::Four);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].bbox, (BoundingBox{3, 2, 1, 1}));
  EXPECT_EQ(r[0].pixel_count, 1u);
  EXPECT_EQ(r[0].label, 1u);
}

TEST(ConnectedComponents, DiagonalTouchDependsOnConnectivity) {
  const auto mask = mask_from({
      "#....",
      "#....",
      "##...",
      "..##.",
      "..##.",
  });
  ASSERT_EQ(oracle::flood_fill(mask, 4).size(), 2u);
  ASSERT_EQ(oracle::flood_fill(mask, 8).size(), 1u);
  EXPECT_EQ(connected_components(mask, Connectivity::Four).size(), 2u);
  EXPECT_EQ(connected_components(mask, Connectivity::Eight).size(), 1u);
  expect_matches_oracle(mask, Connectivity::Four);
  expect_matches_oracle(mask, Connectivity::Eight);
}

TEST(ConnectedComponents, UShapeMergesLate) {
  // The two arms only meet on the last row; labels must still be raster-ordered.
  const auto mask = mask_from({
      "#.#.#",
      "#.#.#",
      "###.#",
      "#...#",
      "#####",
  });
  expect_matches_oracle(mask, Connectivity::Four);
  expect_matches_oracle(mask, Connectivity::Eight);
  EXPECT_EQ(connected_components(mask, Connectivity::Four).size(), 1u);
}

TEST(ConnectedComponents, AgreesWithFloodFillOnRandomMasks) {
  SplitMix64 rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    const auto mask = oracle::random_mask(rng, 16, 16, rng.uniform(0.2, 0.7));
    for (auto conn : {Connectivity::Four, Connectivity::Eight}) {
      expect_matches_oracle(mask, conn);
      const auto regions = connected_components(mask, conn);
      std::size_t total = 0;
      for (const auto& r : regions) {
        total += r.pixel_count;
        EXPECT_LE(r.pixel_count, r.bbox.area());
      }
      EXPECT_EQ(total, mask.count());
    }
  }
}

TEST(ConnectedComponents, BoxesAreTight) {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto mask = oracle::random_mask(rng, 16, 16, 0.3);
    const auto oracle_regions = oracle::flood_fill(mask, 8);
    const auto regions = connected_components(mask, Connectivity::Eight);
    ASSERT_EQ(regions.size(), oracle_regions.size());
    for (std::size_t i = 0; i < regions.size(); ++i) {
      const auto& b = regions[i].bbox;
      bool left = false, right = false, top = false, bottom = false;
      for (const auto& [y, x] : oracle_regions[i].pixels) {
        left |= x == b.x;
        right |= x == b.x + b.w - 1;
        top |= y == b.y;
        bottom |= y == b.y + b.h - 1;
      }
      EXPECT_TRUE(left && right && top && bottom);
    }
  }
}

TEST(SelectRegions, SizeThenLabel) {
  RoiConfig c;
  EXPECT_TRUE(select_regions({}, c, 100).empty());

  const std::vector<ConnectedRegion> regions{
      {1, 5, {0, 0, 5, 1}}, {2, 9, {0, 2, 3, 3}}, {3, 9, {5, 5, 3, 3}}};
  c.min_area = 6;
  c.max_boxes = 2;
  EXPECT_EQ(select_regions(regions, c, 100),
            (std::vector<BoundingBox>{{0, 2, 3, 3}, {5, 5, 3, 3}}));
  c.min_area = 10;
  EXPECT_TRUE(select_regions(regions, c, 100).empty());
}

TEST(SelectRegions, DefaultMinAreaIsFractionOfImage) {
  RoiConfig c;
  EXPECT_EQ(c.resolved_min_area(4096), 21u);  // ceil(0.005 * 4096)
  EXPECT_EQ(c.resolved_min_area(200), 1u);
  c.min_area = 7;
  EXPECT_EQ(c.resolved_min_area(4096), 7u);
}

TEST(RenderOverlay, EmptyListLeavesImage) {
  const RasterImage img(6, 4, Rgb{10, 20, 30});
  EXPECT_EQ(render_overlay(img, {}, RoiConfig{}), img);
}

TEST(RenderOverlay, ThinFrameCount) {
  const RasterImage white(10, 10, Rgb{255, 255, 255});
  RoiConfig c;
  c.box_thickness = 1;
  const BoundingBox box{2, 2, 4, 4};
  const auto out = render_overlay(white, {box}, c);
  std::size_t changed = 0;
  for (std::size_t y = 0; y < 10; ++y) {
    for (std::size_t x = 0; x < 10; ++x) {
      const bool frame = oracle::in_frame(box, x, y, 1);
      EXPECT_EQ(out.at(x, y), (frame ? Rgb{255, 0, 0} : Rgb{255, 255, 255}));
      changed += out.at(x, y) != white.at(x, y);
    }
  }
  EXPECT_EQ(changed, 4u * 4u - 2u * 2u);
}

TEST(RenderOverlay, ChangesExactlyPredictedFramePixels) {
  SplitMix64 rng(55);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t w = rng.between(5, 30), h = rng.between(5, 30);
    RasterImage img(w, h);
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) img.at(x, y) = {0, static_cast<std::uint8_t>(x), 7};
    std::vector<BoundingBox> boxes;
    for (int k = 0; k < 3; ++k) {
      const std::size_t bw = rng.between(1, w), bh = rng.between(1, h);
      boxes.push_back({rng.between(0, w - bw), rng.between(0, h - bh), bw, bh});
    }
    RoiConfig c;
    c.box_thickness = rng.between(1, 4);
    c.box_color = {1, 2, 3};
    const auto out = render_overlay(img, boxes, c);
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const bool framed = std::any_of(boxes.begin(), boxes.end(), [&](const BoundingBox& b) {
          return oracle::in_frame(b, x, y, c.box_thickness);
        });
        EXPECT_EQ(out.at(x, y), framed ? c.box_color : img.at(x, y));
      }
    }
  }
}

TEST(RenderOverlay, ThickFrameFillsBoxAndRejectsOutOfBounds) {
  const RasterImage img(8, 8);
  RoiConfig c;
  c.box_thickness = 2;
  const auto out = render_overlay(img, {{1, 1, 4, 3}}, c);
  for (std::size_t y = 1; y < 4; ++y)
    for (std::size_t x = 1; x < 5; ++x) EXPECT_EQ(out.at(x, y), c.box_color);
  EXPECT_EQ(out.at(0, 0), Rgb{});
  EXPECT_THROW(render_overlay(img, {{6, 6, 3, 1}}, c), DimensionError);
}

TEST(ComputeIou, MatchesPixelSetOracle) {
  EXPECT_EQ(compute_iou({1, 1, 3, 3}, {1, 1, 3, 3}), 1.0);
  EXPECT_EQ(compute_iou({0, 0, 2, 2}, {5, 5, 2, 2}), 0.0);
  EXPECT_EQ(compute_iou({0, 0, 2, 2}, {2, 0, 2, 2}), 0.0);  // edge-adjacent
  EXPECT_DOUBLE_EQ(compute_iou({0, 0, 4, 4}, {2, 0, 4, 4}), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(oracle::pixel_iou({0, 0, 4, 4}, {2, 0, 4, 4}), 8.0 / 24.0);

  SplitMix64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const BoundingBox a{rng.between(0, 10), rng.between(0, 10), rng.between(1, 8), rng.between(1, 8)};
    const BoundingBox b{rng.between(0, 10), rng.between(0, 10), rng.between(1, 8), rng.between(1, 8)};
    EXPECT_DOUBLE_EQ(compute_iou(a, b), oracle::pixel_iou(a, b));
    EXPECT_EQ(compute_iou(a, b), compute_iou(b, a));
    EXPECT_EQ(compute_iou(a, b) == 1.0, a == b);
  }
}

TEST(RoiConfig, Validation) {
  RoiConfig c;
  EXPECT_NO_THROW(c.validate());
  c.threshold = QuantileThreshold{1.0};
  EXPECT_THROW(c.validate(), ConfigError);
  c.threshold = FixedThreshold{1.5};
  EXPECT_THROW(c.validate(), ConfigError);
  c = RoiConfig{};
  c.max_boxes = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RoiConfig{};
  c.box_thickness = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}
