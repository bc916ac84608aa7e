#include <gtest/gtest.h>

#include "texelatt/detect.hpp"

using namespace texelatt;

namespace {

TexelShapeSpec shape(ShapeClass c, double size, double deg = 0.0, PolygonKind kind = PolygonKind::square) {
  TexelShapeSpec s;
  s.shape_class = c;
  s.polygon_kind = kind;
  s.size = size;
  s.orientation_deg = deg;
  s.color = {30, 90, 220};
  return s;
}

BitMask box_mask(int w, int h, BBox b) {
  BitMask m(w, h, b);
  for (int y = b.y_min; y <= b.y_max; ++y)
    for (int x = b.x_min; x <= b.x_max; ++x) m.set(x, y);
  return m;
}

TexelRecord record(const BitMask& m, double confidence) {
  return {m, mask_to_bbox(m), mask_centroid(m), ShapeClass::polygon, confidence};
}

TextureSpec lattice_texture(ShapeClass c, ColorRGB bg, ColorRGB fg) {
  TextureSpec spec;
  spec.width = spec.height = 240;
  spec.background = bg;
  TextureGroup g;
  g.shape = shape(c, 12.0, c == ShapeClass::polygon ? 20.0 : 0.0);
  g.shape.color = fg;
  g.layout.basis_u = {24.0, 0.0};
  g.layout.basis_v = Vector2{0.0, 24.0};
  g.layout.phase = {12.0, 12.0};
  spec.groups.push_back(g);
  spec.seed = 3;
  return spec;
}

}  // namespace

TEST(Background, MajorityColorWins) {
  RasterImage img(50, 50, ColorRGB{128, 128, 128});
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) img.at(x, y) = {255, 0, 0};
  EXPECT_EQ(estimate_background(img), (ColorRGB{128, 128, 128}));
}

TEST(Segment, UniformImageHasNoTexels) {
  EXPECT_TRUE(segment_texels(RasterImage(64, 64, ColorRGB{10, 200, 30})).empty());
}

TEST(Segment, TinySpecksAreDropped) {
  RasterImage img(64, 64, ColorRGB{255, 255, 255});
  for (int y = 10; y < 12; ++y)
    for (int x = 10; x < 12; ++x) img.at(x, y) = {0, 0, 0};
  EXPECT_TRUE(segment_texels(img).empty());
}

TEST(Segment, SingleShapesAreClassified) {
  struct Case {
    TexelShapeSpec s;
    ShapeClass want;
  };
  const std::vector<Case> cases = {
      {shape(ShapeClass::circle, 30.0), ShapeClass::circle},
      {shape(ShapeClass::line, 8.0, 30.0), ShapeClass::line},
      {shape(ShapeClass::polygon, 30.0), ShapeClass::polygon},
      {shape(ShapeClass::polygon, 36.0, 10.0, PolygonKind::triangle), ShapeClass::polygon},
      {shape(ShapeClass::polygon, 40.0, 70.0, PolygonKind::rectangle), ShapeClass::polygon},
  };
  for (const auto& c : cases) {
    RasterImage img(128, 128, ColorRGB{255, 255, 255});
    const BitMask drawn = render_texel(img, c.s, {64.0, 64.0});
    const auto recs = segment_texels(img);
    ASSERT_EQ(recs.size(), 1u) << to_string(c.want);
    EXPECT_EQ(recs[0].shape_class, c.want);
    EXPECT_EQ(recs[0].mask.count(), drawn.count());
  }
}

TEST(Classify, RotationDoesNotChangeLabel) {
  for (double deg = 0.0; deg < 180.0; deg += 15.0) {
    for (auto kind : {PolygonKind::square, PolygonKind::triangle, PolygonKind::rectangle})
      EXPECT_EQ(classify_shape(rasterize_texel(shape(ShapeClass::polygon, 32.0, deg, kind), {64.3, 63.8}, 128, 128)),
                ShapeClass::polygon)
          << to_string(kind) << " " << deg;
    EXPECT_EQ(classify_shape(rasterize_texel(shape(ShapeClass::line, 6.0, deg), {64.0, 64.0}, 128, 128)),
              ShapeClass::line)
        << deg;
  }
  for (double d = 8.0; d <= 48.0; d += 4.0)
    EXPECT_EQ(classify_shape(rasterize_texel(shape(ShapeClass::circle, d), {64.2, 63.7}, 128, 128)),
              ShapeClass::circle)
        << d;
  EXPECT_THROW(classify_shape(BitMask(8, 8)), std::invalid_argument);
}

TEST(AveragePrecision, HandWorkedExamples) {
  const BitMask a = box_mask(50, 50, {0, 0, 9, 9});
  const BitMask b = box_mask(50, 50, {20, 20, 29, 29});
  const BitMask c = box_mask(50, 50, {40, 40, 45, 45});

  const auto same = evaluate_detection({record(a, 1.0), record(b, 1.0)}, std::vector<BitMask>{a, b});
  EXPECT_DOUBLE_EQ(same.ap, 1.0);
  EXPECT_DOUBLE_EQ(same.ap50, 1.0);
  EXPECT_EQ(same.fp, 0u);

  const auto none = evaluate_detection({}, std::vector<BitMask>{a, b});
  EXPECT_DOUBLE_EQ(none.ap, 0.0);
  EXPECT_EQ(none.fn, 2u);

  const auto half = evaluate_detection({record(a, 1.0)}, std::vector<BitMask>{a, b});
  EXPECT_DOUBLE_EQ(half.ap50, 0.5);

  // Ranked TP, FP, TP against two objects: PR points (0.5, 1), (0.5, 1/2),
  // (1, 2/3); the interpolated area is 0.5 * 1 + 0.5 * 2/3.
  const auto mixed = evaluate_detection({record(a, 0.9), record(c, 0.8), record(b, 0.7)}, std::vector<BitMask>{a, b});
  EXPECT_NEAR(mixed.ap50, 5.0 / 6.0, 1e-12);
  EXPECT_EQ(mixed.tp, 2u);
  EXPECT_EQ(mixed.fp, 1u);
}

TEST(AveragePrecision, IouThresholdsSplitPartialOverlap) {
  const BitMask gt = box_mask(50, 50, {0, 0, 9, 9});
  const BitMask shifted = box_mask(50, 50, {0, 2, 9, 11});  // IoU 80/120
  const auto s = evaluate_detection({record(shifted, 1.0)}, std::vector<BitMask>{gt});
  EXPECT_DOUBLE_EQ(s.ap50, 1.0);
  EXPECT_DOUBLE_EQ(s.ap75, 0.0);
  // IoU 2/3 passes 0.50, 0.55, 0.60, 0.65 of ten thresholds.
  EXPECT_NEAR(s.ap, 0.4, 1e-12);
}

TEST(AveragePrecision, OneGroundTruthMatchesOnce) {
  const BitMask a = box_mask(50, 50, {0, 0, 9, 9});
  const auto s = evaluate_detection({record(a, 0.9), record(a, 0.8)}, std::vector<BitMask>{a});
  EXPECT_EQ(s.tp, 1u);
  EXPECT_EQ(s.fp, 1u);
  EXPECT_DOUBLE_EQ(s.ap50, 1.0);
}

TEST(Detect, RegularTexturesAreFoundExactly) {
  for (ShapeClass c : kShapeClasses) {
    if (c == ShapeClass::line) continue;
    const auto t = generate_texture(lattice_texture(c, {255, 255, 255}, {220, 20, 60}));
    const auto recs = segment_texels(t.image);
    EXPECT_EQ(recs.size(), t.truth.texels.size()) << to_string(c);
    EXPECT_DOUBLE_EQ(evaluate_detection(recs, t.truth).ap50, 1.0);
    const MatchResult m = match_detections(recs, t.truth);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      ASSERT_GE(m.pred_to_gt[i], 0);
      EXPECT_EQ(recs[i].shape_class, c);
    }
  }
}

TEST(Detect, BackgroundColorDoesNotMatter) {
  const auto light = generate_texture(lattice_texture(ShapeClass::circle, {255, 255, 255}, {30, 90, 220}));
  const auto dark = generate_texture(lattice_texture(ShapeClass::circle, {0, 0, 0}, {255, 215, 0}));
  const auto a = segment_texels(light.image), b = segment_texels(dark.image);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].bbox, b[i].bbox);
    EXPECT_EQ(a[i].shape_class, b[i].shape_class);
  }
}

TEST(Detect, GroundTruthRecordsScorePerfectly) {
  Rng rng(8);
  SampleDomain domain;
  domain.width = domain.height = 200;
  const auto t = generate_texture(sample_spec(rng, TaskConstraints{}, domain));
  const auto s = evaluate_detection(ground_truth_records(t.truth), t.truth);
  EXPECT_DOUBLE_EQ(s.ap, 1.0);
}
