#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "texelatt/synth.hpp"

using namespace texelatt;

namespace {

LayoutSpec square_lattice(double spacing, double jitter, Point2 phase) {
  LayoutSpec l;
  l.basis_u = {spacing, 0.0};
  l.basis_v = Vector2{0.0, spacing};
  l.jitter_frac = jitter;
  l.phase = phase;
  return l;
}

TextureSpec circle_texture(double jitter, std::uint64_t seed) {
  TextureSpec spec;
  spec.width = 200;
  spec.height = 200;
  spec.background = {255, 255, 255};
  TextureGroup g;
  g.shape.shape_class = ShapeClass::circle;
  g.shape.size = 10.0;
  g.shape.color = {220, 20, 60};
  g.layout = square_lattice(20.0, jitter, {10.0, 10.0});
  spec.groups.push_back(g);
  spec.seed = seed;
  return spec;
}

double lattice_offset(double v, double spacing, double phase) {
  const double r = std::fmod(v - phase, spacing);
  const double a = r < 0 ? r + spacing : r;
  return std::min(a, spacing - a);
}

}  // namespace

TEST(JitterGrid, RegularSquareLatticeHasExactSites) {
  Rng rng(1);
  const auto sites = jitter_grid(square_lattice(10.0, 0.0, {5.0, 5.0}), 100, 100, rng);
  ASSERT_EQ(sites.size(), 100u);
  for (Point2 p : sites) {
    EXPECT_DOUBLE_EQ(lattice_offset(p.x, 10.0, 5.0), 0.0);
    EXPECT_DOUBLE_EQ(lattice_offset(p.y, 10.0, 5.0), 0.0);
  }
}

TEST(JitterGrid, DisplacementIsBoundedByJitterRadius) {
  Rng rng(2);
  const auto sites = jitter_grid(square_lattice(10.0, 0.3, {5.0, 5.0}), 100, 100, rng);
  ASSERT_EQ(sites.size(), 100u);
  bool moved = false;
  for (Point2 p : sites) {
    const double dx = lattice_offset(p.x, 10.0, 5.0), dy = lattice_offset(p.y, 10.0, 5.0);
    EXPECT_LE(std::hypot(dx, dy), 3.0 + 1e-9);
    moved |= dx > 1e-9 || dy > 1e-9;
  }
  EXPECT_TRUE(moved);
}

TEST(JitterGrid, LinearLayoutCoversImage) {
  LayoutSpec l;
  l.basis_u = {20.0, 0.0};
  l.phase = {10.0, 0.0};
  Rng rng(3);
  const auto sites = jitter_grid(l, 100, 50, rng);
  std::vector<double> xs;
  for (Point2 p : sites) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  ASSERT_GE(xs.size(), 5u);
  for (double want : {10.0, 30.0, 50.0, 70.0, 90.0})
    EXPECT_TRUE(std::any_of(xs.begin(), xs.end(), [&](double x) { return std::fabs(x - want) < 1e-9; })) << want;
}

TEST(JitterGrid, DegenerateBasisIsRejected) {
  Rng rng(4);
  LayoutSpec l = square_lattice(10.0, 0.0, {});
  l.basis_v = Vector2{20.0, 0.0};
  EXPECT_THROW(jitter_grid(l, 50, 50, rng), std::invalid_argument);
  l.basis_u = {0.0, 0.0};
  l.basis_v.reset();
  EXPECT_THROW(jitter_grid(l, 50, 50, rng), std::invalid_argument);
  l = square_lattice(10.0, 1.5, {});
  EXPECT_THROW(jitter_grid(l, 50, 50, rng), std::invalid_argument);
}

TEST(Palette, AnalogousHuesFitInNarrowArc) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const Palette p = harmonized_palette(rng, 3, HarmonyRule::analogous);
    ASSERT_EQ(p.colors.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j)
        EXPECT_LE(hue_difference(rgb_hue(p.colors[i]), rgb_hue(p.colors[j])), 40.0 + 3.0) << seed;
  }
}

TEST(Palette, ComplementaryHuesAlternateSides) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const Palette p = harmonized_palette(rng, 4, HarmonyRule::complementary);
    const double h0 = rgb_hue(p.colors[0]);
    for (std::size_t i = 1; i < 4; ++i) {
      const double d = hue_difference(h0, rgb_hue(p.colors[i]));
      if (i % 2) {
        EXPECT_GE(d, 165.0 - 3.0) << seed;
      } else {
        EXPECT_LE(d, 15.0 + 3.0) << seed;
      }
    }
  }
}

TEST(Palette, AtLeastTwoColorNames) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const Palette p = harmonized_palette(rng, 2);
    EXPECT_GE(detail::distinct_name_count(p.colors), 2u) << seed;
  }
  Rng rng(0);
  EXPECT_THROW(harmonized_palette(rng, 1), std::invalid_argument);
  EXPECT_THROW(harmonized_palette(rng, 5), std::invalid_argument);
}

TEST(Rasterize, AreasMatchGeometry) {
  TexelShapeSpec s;
  s.shape_class = ShapeClass::circle;
  s.size = 20.0;
  EXPECT_NEAR(double(rasterize_texel(s, {50.0, 50.0}, 100, 100).count()), kPi * 100.0, 0.03 * kPi * 100.0);

  s.shape_class = ShapeClass::polygon;
  s.polygon_kind = PolygonKind::square;
  EXPECT_EQ(rasterize_texel(s, {50.0, 50.0}, 100, 100).count(), 400u);

  s.polygon_kind = PolygonKind::rectangle;
  s.size = 30.0;
  s.aspect = 2.0;
  EXPECT_NEAR(double(rasterize_texel(s, {50.0, 50.0}, 100, 100).count()), 450.0, 31.0);

  s.polygon_kind = PolygonKind::triangle;
  s.size = 30.0;
  const double tri = std::sqrt(3.0) / 4.0 * 900.0;
  EXPECT_NEAR(double(rasterize_texel(s, {50.0, 50.0}, 100, 100).count()), tri, 0.08 * tri);
}

TEST(Rasterize, LineSpansImage) {
  TexelShapeSpec s;
  s.shape_class = ShapeClass::line;
  s.size = 6.0;
  s.orientation_deg = 0.0;
  const BitMask m = rasterize_texel(s, {40.0, 50.0}, 100, 100);
  EXPECT_EQ(m.count(), 600u);
  EXPECT_EQ(mask_to_bbox(m), (BBox{0, 47, 99, 52}));
}

TEST(Rasterize, RejectsBadShapes) {
  TexelShapeSpec s;
  s.size = 2.0;
  EXPECT_THROW(rasterize_texel(s, {5, 5}, 10, 10), std::invalid_argument);
  s.size = 5.0;
  s.orientation_deg = 180.0;
  EXPECT_THROW(rasterize_texel(s, {5, 5}, 10, 10), std::invalid_argument);
}

TEST(Generate, RegularCirclesGiveHundredTexelsOnLattice) {
  const GeneratedTexture t = generate_texture(circle_texture(0.0, 5));
  ASSERT_EQ(t.truth.texels.size(), 100u);
  for (const auto& tx : t.truth.texels) {
    EXPECT_EQ(tx.shape_class, ShapeClass::circle);
    EXPECT_FALSE(tx.orientation_deg.has_value());
    EXPECT_NEAR(lattice_offset(tx.centroid.x, 20.0, 10.0), 0.0, 1e-9);
    EXPECT_NEAR(lattice_offset(tx.centroid.y, 20.0, 10.0), 0.0, 1e-9);
    EXPECT_EQ(tx.area_px, tx.mask.count());
  }
}

TEST(Generate, TwoGroupsAreLabelled) {
  TextureSpec spec = circle_texture(0.0, 1);
  TextureGroup sq;
  sq.shape.shape_class = ShapeClass::polygon;
  sq.shape.polygon_kind = PolygonKind::square;
  sq.shape.size = 6.0;
  sq.shape.color = {30, 90, 220};
  sq.layout = square_lattice(20.0, 0.0, {0.0, 0.0});
  spec.groups.push_back(sq);
  const GeneratedTexture t = generate_texture(spec);
  std::map<int, int> per_group;
  for (const auto& tx : t.truth.texels) ++per_group[tx.group];
  EXPECT_EQ(per_group[0], 100);
  EXPECT_GE(per_group[1], 100);
  EXPECT_EQ(t.truth.layout_params.size(), 2u);
}

TEST(Generate, DeterministicForSeed) {
  const auto a = generate_texture(circle_texture(0.3, 77));
  const auto b = generate_texture(circle_texture(0.3, 77));
  const auto c = generate_texture(circle_texture(0.3, 78));
  EXPECT_EQ(a.image, b.image);
  EXPECT_NE(a.image, c.image);
}

TEST(Generate, InvalidSpecsAreRejected) {
  TextureSpec spec = circle_texture(0.0, 1);
  spec.groups[0].shape.color = {250, 250, 250};
  EXPECT_THROW(generate_texture(spec), std::invalid_argument);
  spec = circle_texture(0.0, 1);
  spec.groups[0].layout = square_lattice(11.0, 0.0, {});
  EXPECT_THROW(generate_texture(spec), std::invalid_argument);
  spec = circle_texture(0.0, 1);
  spec.groups.clear();
  EXPECT_THROW(generate_texture(spec), std::invalid_argument);
}

TEST(Generate, AnnotationsAgreeWithPixels) {
  SampleDomain domain;
  domain.width = domain.height = 192;
  domain.max_size = 32.0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Rng rng(seed);
    const TextureSpec spec = sample_spec(rng, TaskConstraints{}, domain);
    const GeneratedTexture t = generate_texture(spec);
    std::vector<int> owner(std::size_t(spec.width) * spec.height, -1);
    for (std::size_t i = 0; i < t.truth.texels.size(); ++i) {
      const auto& tx = t.truth.texels[i];
      EXPECT_EQ(tx.bbox, mask_to_bbox(tx.mask));
      tx.mask.for_each_set([&](int x, int y) {
        EXPECT_EQ(owner[std::size_t(y) * spec.width + x], -1) << "masks overlap";
        owner[std::size_t(y) * spec.width + x] = int(i);
        EXPECT_EQ(t.image.at(x, y), tx.color);
      });
    }
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x)
        if (owner[std::size_t(y) * spec.width + x] < 0) {
          ASSERT_EQ(t.image.at(x, y), spec.background) << seed;
        }
  }
}

TEST(TaskConstraintsParse, TokensAndContradictions) {
  const auto c = TaskConstraints::parse({"circle", "regular", "mono"});
  EXPECT_EQ(c.shapes, std::vector<ShapeClass>{ShapeClass::circle});
  EXPECT_EQ(c.regular, std::optional<bool>(true));
  EXPECT_EQ(c.colors, std::optional<int>(1));
  EXPECT_EQ(TaskConstraints::parse(c.tokens()).tokens(), c.tokens());
  EXPECT_EQ(TaskConstraints::parse({"none"}).tokens(), std::vector<std::string>{"none"});
  EXPECT_THROW(TaskConstraints::parse({"regular", "jittered"}), std::invalid_argument);
  EXPECT_THROW(TaskConstraints::parse({"circle", "uniform"}), std::invalid_argument);
  EXPECT_THROW(TaskConstraints::parse({"separated", "bi-color"}), std::invalid_argument);
  EXPECT_THROW(TaskConstraints::parse({"hexagon"}), std::invalid_argument);
}

TEST(SampleSpec, HonorsConstraints) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const auto a = sample_spec(rng, TaskConstraints::parse({"circle", "regular", "bi-color"}));
    ASSERT_EQ(a.groups.size(), 2u);
    for (const auto& g : a.groups) {
      EXPECT_EQ(g.shape.shape_class, ShapeClass::circle);
      EXPECT_EQ(g.layout.jitter_frac, 0.0);
    }
    const auto b = sample_spec(rng, TaskConstraints::parse({"line", "nonuniform", "jittered", "mono"}));
    ASSERT_EQ(b.groups.size(), 1u);
    EXPECT_EQ(b.groups[0].shape.shape_class, ShapeClass::line);
    EXPECT_TRUE(b.groups[0].shape.nonuniform_width);
    EXPECT_FALSE(b.groups[0].layout.basis_v.has_value());
    EXPECT_GT(b.groups[0].layout.jitter_frac, 0.0);
    const auto c = sample_spec(rng, TaskConstraints::parse({"separated"}));
    ASSERT_EQ(c.groups.size(), 1u);
    EXPECT_LE(c.groups[0].layout.jitter_frac, 0.3);
  }
}

TEST(SampleSpec, SameSeedSameRecipe) {
  Rng a(123), b(123);
  const auto sa = sample_spec(a, TaskConstraints{});
  const auto sb = sample_spec(b, TaskConstraints{});
  EXPECT_EQ(sa.seed, sb.seed);
  EXPECT_EQ(generate_texture(sa).image, generate_texture(sb).image);
}

TEST(SampleSpec, SeparatedTexelsNeverTouch) {
  SampleDomain domain;
  domain.width = domain.height = 256;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const auto t = generate_texture(sample_spec(rng, TaskConstraints::parse({"separated"}), domain));
    std::vector<int> owner(256 * 256, -1);
    for (std::size_t i = 0; i < t.truth.texels.size(); ++i)
      t.truth.texels[i].mask.for_each_set([&](int x, int y) { owner[std::size_t(y) * 256 + x] = int(i); });
    for (int y = 0; y < 256; ++y)
      for (int x = 0; x < 256; ++x) {
        const int o = owner[std::size_t(y) * 256 + x];
        if (o < 0) continue;
        if (x + 1 < 256) {
          const int r = owner[std::size_t(y) * 256 + x + 1];
          ASSERT_TRUE(r < 0 || r == o) << seed;
        }
        if (y + 1 < 256) {
          const int d = owner[std::size_t(y + 1) * 256 + x];
          ASSERT_TRUE(d < 0 || d == o) << seed;
        }
      }
  }
}
