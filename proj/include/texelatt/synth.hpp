#pragma once

// Procedural element-based textures with exact per-texel annotations.
//
// A texture is one or two texel groups painted over a flat background. Each
// group places copies of one shape on a (possibly jittered) lattice spanned by
// one basis vector (bands) or two (grids). Rendering is hard-edged: a pixel
// belongs to a shape iff its center does.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "texelatt/color.hpp"
#include "texelatt/core.hpp"
#include "texelatt/rng.hpp"

namespace texelatt {

enum class PolygonKind { square = 0, triangle = 1, rectangle = 2 };

inline std::string_view to_string(PolygonKind k) {
  switch (k) {
    case PolygonKind::square: return "square";
    case PolygonKind::triangle: return "triangle";
    case PolygonKind::rectangle: return "rectangle";
  }
  return "unknown";
}

inline PolygonKind polygon_kind_from_string(std::string_view s) {
  if (s == "square") return PolygonKind::square;
  if (s == "triangle") return PolygonKind::triangle;
  if (s == "rectangle") return PolygonKind::rectangle;
  throw DataError("unknown polygon kind: " + std::string(s));
}

struct TexelShapeSpec {
  ShapeClass shape_class = ShapeClass::circle;
  PolygonKind polygon_kind = PolygonKind::square;  // polygons only
  double size = 16.0;         // circle diameter, line thickness, polygon edge / long side
  double aspect = 2.0;        // rectangles only: long side / short side
  double orientation_deg = 0.0;
  ColorRGB color{};
  bool nonuniform_width = false;  // lines only: thickness resampled per line in [0.5,1.5] x size

  /// Diameter of the smallest disk centered on the anchor containing the shape.
  double extent() const {
    switch (shape_class) {
      case ShapeClass::circle: return size;
      case ShapeClass::line: return nonuniform_width ? 1.5 * size : size;
      case ShapeClass::polygon:
        switch (polygon_kind) {
          case PolygonKind::square: return size * std::sqrt(2.0);
          case PolygonKind::triangle: return 2.0 * size / std::sqrt(3.0);
          case PolygonKind::rectangle: return std::hypot(size, size / aspect);
        }
    }
    return size;
  }

  void validate() const {
    if (!(size >= 3.0)) throw std::invalid_argument("texel size must be >= 3 px");
    if (!(orientation_deg >= 0.0 && orientation_deg < 180.0))
      throw std::invalid_argument("texel orientation must be in [0,180)");
    if (shape_class == ShapeClass::polygon && polygon_kind == PolygonKind::rectangle && !(aspect >= 1.0))
      throw std::invalid_argument("rectangle aspect must be >= 1");
  }
};

struct LayoutSpec {
  Vector2 basis_u{};
  std::optional<Vector2> basis_v;  // absent: linear layout
  double jitter_frac = 0.0;
  Point2 phase{};

  double min_basis_length() const {
    return basis_v ? std::min(basis_u.norm(), basis_v->norm()) : basis_u.norm();
  }

  void validate() const {
    if (!(basis_u.norm() > 0.0)) throw std::invalid_argument("degenerate basis: zero-length basis_u");
    if (!(jitter_frac >= 0.0 && jitter_frac <= 1.0))
      throw std::invalid_argument("jitter_frac must be in [0,1]");
    if (basis_v) {
      const double n = basis_u.norm() * basis_v->norm();
      if (!(n > 0.0) || std::fabs(cross(basis_u, *basis_v)) <= 1e-9 * n)
        throw std::invalid_argument("degenerate basis: basis vectors are parallel");
    }
  }
};

struct TextureGroup {
  TexelShapeSpec shape;
  LayoutSpec layout;
};

struct TextureSpec {
  int width = 512;
  int height = 512;
  ColorRGB background{255, 255, 255};
  std::vector<TextureGroup> groups;
  std::uint64_t seed = 0;

  void validate() const {
    if (width < 1 || height < 1) throw std::invalid_argument("texture dimensions must be >= 1");
    if (groups.empty() || groups.size() > 2) throw std::invalid_argument("texture needs 1 or 2 groups");
    std::set<ColorName> names{color_name(background)};
    for (const auto& g : groups) {
      g.shape.validate();
      g.layout.validate();
      if (!names.insert(color_name(g.shape.color)).second)
        throw std::invalid_argument("group and background colors must have pairwise distinct names");
      if (g.layout.jitter_frac == 0.0) {
        const double need = (g.shape.shape_class == ShapeClass::line ? g.shape.extent() : g.shape.size) + 2.0;
        if (g.layout.min_basis_length() < need)
          throw std::invalid_argument("basis shorter than texel size plus 2 px separation");
      }
    }
  }
};

struct GroundTruthTexel {
  int group = 0;
  Point2 centroid{};
  BBox bbox{};
  BitMask mask;  // visible pixels after occlusion
  ShapeClass shape_class = ShapeClass::circle;
  ColorRGB color{};
  std::optional<double> orientation_deg;
  std::size_t area_px = 0;
};

struct GroundTruth {
  std::vector<GroundTruthTexel> texels;
  std::vector<LayoutSpec> layout_params;
  TextureSpec spec;
};

/// Lattice sites of a layout, each displaced uniformly inside a disk of
/// radius jitter_frac * min basis length.
///
/// Grid layouts keep sites inside [-margin, width+margin) x [-margin,
/// height+margin). Linear layouts keep sites whose projection on basis_u
/// falls inside the projection of that rectangle, so every band that can
/// cross the image is produced.
inline std::vector<Point2> jitter_grid(const LayoutSpec& layout, int width, int height, Rng& rng,
                                       double margin = 0.0) {
  layout.validate();
  const double x0 = -margin, y0 = -margin, x1 = width + margin, y1 = height + margin;
  const std::array<Point2, 4> corners = {Point2{x0, y0}, Point2{x1, y0}, Point2{x0, y1}, Point2{x1, y1}};
  const double amplitude = layout.jitter_frac * layout.min_basis_length();
  const Vector2 u = layout.basis_u;

  std::vector<Point2> sites;
  if (!layout.basis_v) {
    const double uu = dot(u, u);
    double lo = 1e300, hi = -1e300;
    for (Point2 c : corners) {
      const double t = dot(c - layout.phase, u) / uu;
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    for (auto i = std::int64_t(std::ceil(lo)); double(i) < hi; ++i)
      sites.push_back(layout.phase + double(i) * u);
  } else {
    const Vector2 v = *layout.basis_v;
    const double det = cross(u, v);
    double ilo = 1e300, ihi = -1e300, jlo = 1e300, jhi = -1e300;
    for (Point2 c : corners) {
      const Vector2 d = c - layout.phase;
      const double i = cross(d, v) / det;
      const double j = cross(u, d) / det;
      ilo = std::min(ilo, i), ihi = std::max(ihi, i);
      jlo = std::min(jlo, j), jhi = std::max(jhi, j);
    }
    for (auto j = std::int64_t(std::floor(jlo)); j <= std::int64_t(std::ceil(jhi)); ++j)
      for (auto i = std::int64_t(std::floor(ilo)); i <= std::int64_t(std::ceil(ihi)); ++i) {
        const Point2 p = layout.phase + double(i) * u + double(j) * v;
        if (p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1) sites.push_back(p);
      }
  }
  for (Point2& p : sites) {
    if (amplitude <= 0.0) continue;
    double dx, dy;
    rng.uniform_in_disk(amplitude, dx, dy);
    p.x += dx;
    p.y += dy;
  }
  return sites;
}

enum class HarmonyRule { analogous, complementary };

struct Palette {
  HarmonyRule rule = HarmonyRule::analogous;
  std::vector<ColorRGB> colors;
};

namespace detail {

inline std::size_t distinct_name_count(const std::vector<ColorRGB>& colors) {
  std::set<ColorName> names;
  for (ColorRGB c : colors) names.insert(color_name(c));
  return names.size();
}

inline std::vector<ColorRGB> draw_palette(Rng& rng, int k, HarmonyRule rule, double lo, double hi) {
  const double h0 = rng.uniform(0.0, 360.0);
  std::vector<ColorRGB> out;
  for (int i = 0; i < k; ++i) {
    double h;
    if (rule == HarmonyRule::analogous)
      h = h0 + rng.uniform(0.0, 38.0);
    else
      h = h0 + (i % 2 ? 180.0 : 0.0) + rng.uniform(-7.0, 7.0);
    const double s = rng.uniform(lo, hi);
    const double v = rng.uniform(lo, hi);
    out.push_back(hsv_to_rgb(h, s, v));
  }
  return out;
}

}  // namespace detail

/// k colors following one harmony rule: analogous hues lie within a 40
/// degree arc, complementary hues alternate between two sides 180 +- 15
/// degrees apart. Saturation and value are drawn from [0.4, 0.95]; draws
/// repeat until at least two distinct color names appear, and the bounds
/// widen after 100 failed attempts.
inline Palette harmonized_palette(Rng& rng, int k, std::optional<HarmonyRule> rule = std::nullopt) {
  if (k < 2 || k > 4) throw std::invalid_argument("harmonized_palette: k must be in [2,4]");
  Palette p;
  p.rule = rule ? *rule : (rng.bernoulli(0.5) ? HarmonyRule::analogous : HarmonyRule::complementary);
  for (int attempt = 0; attempt < 400; ++attempt) {
    const bool relaxed = attempt >= 100;
    p.colors = detail::draw_palette(rng, k, p.rule, relaxed ? 0.15 : 0.4, relaxed ? 1.0 : 0.95);
    if (detail::distinct_name_count(p.colors) >= 2) return p;
  }
  return p;
}

/// Pixels whose centers fall inside `shape` anchored at `center`, clipped
/// to a width x height image. Lines are bands spanning the whole image.
inline BitMask rasterize_texel(const TexelShapeSpec& shape, Point2 center, int width, int height) {
  shape.validate();
  const double theta = deg2rad(shape.orientation_deg);
  const double c = std::cos(theta), s = std::sin(theta);

  BBox window{0, 0, width - 1, height - 1};
  if (shape.shape_class != ShapeClass::line) {
    const double r = 0.5 * shape.extent() + 1.0;
    window = intersect(window, BBox{int(std::floor(center.x - r)), int(std::floor(center.y - r)),
                                    int(std::ceil(center.x + r)), int(std::ceil(center.y + r))});
  }
  BitMask mask(width, height, window);
  if (!window.valid()) return mask;

  const double half = 0.5 * shape.size;
  const double tri_r = shape.size / std::sqrt(3.0);  // circumradius of the equilateral triangle
  auto inside = [&](double u, double v) {
    switch (shape.shape_class) {
      case ShapeClass::circle: return u * u + v * v <= half * half;
      case ShapeClass::line: return v >= -half && v < half;
      case ShapeClass::polygon:
        switch (shape.polygon_kind) {
          case PolygonKind::square: return u >= -half && u < half && v >= -half && v < half;
          case PolygonKind::rectangle: {
            const double hw = 0.5 * shape.size / shape.aspect;
            return u >= -half && u < half && v >= -hw && v < hw;
          }
          case PolygonKind::triangle: {
            // Vertex at (tri_r, 0); opposite edge at u = -tri_r/2.
            if (u < -0.5 * tri_r) return false;
            const double k = std::sqrt(3.0);
            return v <= (tri_r - u) / k && v >= -(tri_r - u) / k;
          }
        }
    }
    return false;
  };

  for (int y = window.y_min; y <= window.y_max; ++y) {
    for (int x = window.x_min; x <= window.x_max; ++x) {
      const double dx = x + 0.5 - center.x;
      const double my = -(y + 0.5 - center.y);  // math-frame y
      const double u = dx * c + my * s;
      const double v = -dx * s + my * c;
      if (inside(u, v)) mask.set(x, y);
    }
  }
  mask.shrink_to_fit();
  return mask;
}

/// Paints `shape` into `image` and returns the painted pixels.
inline BitMask render_texel(RasterImage& image, const TexelShapeSpec& shape, Point2 center) {
  BitMask mask = rasterize_texel(shape, center, image.width(), image.height());
  mask.for_each_set([&](int x, int y) { image.at(x, y) = shape.color; });
  return mask;
}

struct GeneratedTexture {
  RasterImage image;
  GroundTruth truth;
};

/// Fraction of a texel's in-image area that must stay visible for it to be
/// kept; occluded texels below it are removed from image and annotation.
inline constexpr double kMinVisibleFraction = 0.25;

inline GeneratedTexture generate_texture(const TextureSpec& spec) {
  spec.validate();
  const int W = spec.width, H = spec.height;
  const Rng root(spec.seed);

  struct Placed {
    int group;
    TexelShapeSpec shape;
    BitMask mask;
    std::size_t full_area;
  };
  std::vector<Placed> placed;
  for (std::size_t g = 0; g < spec.groups.size(); ++g) {
    const TextureGroup& group = spec.groups[g];
    Rng site_rng = root.fork(2 * g);
    Rng width_rng = root.fork(2 * g + 1);
    const double margin =
        0.5 * group.shape.extent() + group.layout.jitter_frac * group.layout.min_basis_length() + 2.0;
    for (Point2 p : jitter_grid(group.layout, W, H, site_rng, margin)) {
      TexelShapeSpec shape = group.shape;
      if (shape.shape_class == ShapeClass::line && shape.nonuniform_width)
        shape.size = std::max(3.0, group.shape.size * width_rng.uniform(0.5, 1.5));
      BitMask mask = rasterize_texel(shape, p, W, H);
      const std::size_t area = mask.count();
      if (area == 0) continue;
      placed.push_back({int(g), shape, std::move(mask), area});
    }
  }

  // Later texels paint over earlier ones. Dropping a texel only uncovers
  // others, so the loop settles after at most a couple of passes.
  std::vector<std::int32_t> owner(std::size_t(W) * H);
  std::vector<char> kept(placed.size(), 1);
  std::vector<std::size_t> visible(placed.size());
  for (;;) {
    std::fill(owner.begin(), owner.end(), -1);
    for (std::size_t i = 0; i < placed.size(); ++i)
      if (kept[i]) placed[i].mask.for_each_set([&](int x, int y) { owner[std::size_t(y) * W + x] = std::int32_t(i); });
    std::fill(visible.begin(), visible.end(), 0);
    for (std::int32_t o : owner)
      if (o >= 0) ++visible[std::size_t(o)];
    bool dropped = false;
    for (std::size_t i = 0; i < placed.size(); ++i) {
      if (kept[i] && double(visible[i]) < kMinVisibleFraction * double(placed[i].full_area)) {
        kept[i] = 0;
        dropped = true;
      }
    }
    if (!dropped) break;
  }

  GeneratedTexture out{RasterImage(W, H, spec.background), {}};
  for (std::size_t p = 0; p < owner.size(); ++p)
    if (owner[p] >= 0) out.image.pixels()[p] = placed[std::size_t(owner[p])].shape.color;

  out.truth.spec = spec;
  for (const auto& g : spec.groups) out.truth.layout_params.push_back(g.layout);
  for (std::size_t i = 0; i < placed.size(); ++i) {
    if (!kept[i]) continue;
    const Placed& src = placed[i];
    GroundTruthTexel t;
    t.group = src.group;
    t.mask = BitMask(W, H, src.mask.window());
    src.mask.for_each_set([&](int x, int y) {
      if (owner[std::size_t(y) * W + x] == std::int32_t(i)) t.mask.set(x, y);
    });
    t.mask.shrink_to_fit();
    t.area_px = t.mask.count();
    t.bbox = mask_to_bbox(t.mask);
    t.centroid = mask_centroid(t.mask);
    t.shape_class = src.shape.shape_class;
    t.color = src.shape.color;
    if (src.shape.shape_class != ShapeClass::circle) t.orientation_deg = src.shape.orientation_deg;
    out.truth.texels.push_back(std::move(t));
  }
  return out;
}

/// Restrictions on the random texture recipe drawn by sample_spec.
struct TaskConstraints {
  std::vector<ShapeClass> shapes;      // empty: any class
  std::optional<bool> regular;         // true: zero jitter, false: jittered
  std::optional<int> colors;           // 1: mono-color (one group), 2: bi-color (two groups)
  std::optional<bool> uniform_width;   // line groups only
  bool separated = false;              // one group, jitter <= 0.3, texels never touch

  /// Tokens: circle line polygon regular jittered mono bi-color uniform
  /// nonuniform separated none.
  static TaskConstraints parse(const std::vector<std::string>& tokens) {
    TaskConstraints c;
    auto set_flag = [](auto& slot, auto value, const std::string& tok) {
      if (slot && *slot != value) throw std::invalid_argument("contradictory constraints at '" + tok + "'");
      slot = value;
    };
    for (const std::string& t : tokens) {
      if (t == "circle" || t == "line" || t == "polygon") {
        const ShapeClass s = shape_class_from_string(t);
        if (std::find(c.shapes.begin(), c.shapes.end(), s) == c.shapes.end()) c.shapes.push_back(s);
      } else if (t == "regular") set_flag(c.regular, true, t);
      else if (t == "jittered") set_flag(c.regular, false, t);
      else if (t == "mono") set_flag(c.colors, 1, t);
      else if (t == "bi-color") set_flag(c.colors, 2, t);
      else if (t == "uniform") set_flag(c.uniform_width, true, t);
      else if (t == "nonuniform") set_flag(c.uniform_width, false, t);
      else if (t == "separated") c.separated = true;
      else if (t == "none" || t.empty()) continue;
      else throw std::invalid_argument("unknown constraint '" + t + "'");
    }
    c.check();
    return c;
  }

  void check() const {
    if (uniform_width && !shapes.empty() &&
        std::find(shapes.begin(), shapes.end(), ShapeClass::line) == shapes.end())
      throw std::invalid_argument("contradictory constraints: line width without line texels");
    if (separated && colors && *colors == 2)
      throw std::invalid_argument("contradictory constraints: separated textures have one group");
  }

  std::vector<std::string> tokens() const {
    std::vector<std::string> out;
    for (ShapeClass s : shapes) out.emplace_back(to_string(s));
    if (regular) out.emplace_back(*regular ? "regular" : "jittered");
    if (colors) out.emplace_back(*colors == 1 ? "mono" : "bi-color");
    if (uniform_width) out.emplace_back(*uniform_width ? "uniform" : "nonuniform");
    if (separated) out.emplace_back("separated");
    if (out.empty()) out.emplace_back("none");
    return out;
  }
};

struct SampleDomain {
  int width = 512;
  int height = 512;
  double min_size = 8.0;
  double max_size = 64.0;
  double min_spacing = 1.5;  // x texel size
  double max_spacing = 4.0;
  double max_jitter = 0.45;
  double min_jitter = 0.05;
};

namespace detail {

inline bool palette_separable(const std::vector<ColorRGB>& colors) {
  if (distinct_name_count(colors) != colors.size()) return false;
  for (std::size_t i = 0; i < colors.size(); ++i)
    for (std::size_t j = i + 1; j < colors.size(); ++j)
      if (rgb_distance(colors[i], colors[j]) < 80.0) return false;
  return true;
}

inline std::vector<ColorRGB> texture_palette(Rng& rng, int k) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    Palette p = harmonized_palette(rng, k);
    if (palette_separable(p.colors)) return std::move(p.colors);
  }
  // Fixed fallback: white background with well separated prototypes.
  static const std::array<ColorRGB, 4> fallback = {kColorPrototypes[1], kColorPrototypes[7],
                                                   kColorPrototypes[4], kColorPrototypes[8]};
  return {fallback.begin(), fallback.begin() + k};
}

}  // namespace detail

/// Upper bound on the expected fraction of the image covered by texels.
inline constexpr double kMaxCoverage = 0.45;

namespace detail {

inline double shape_area(const TexelShapeSpec& s) {
  switch (s.shape_class) {
    case ShapeClass::circle: return kPi * 0.25 * s.size * s.size;
    case ShapeClass::line: return s.size;  // per unit length
    case ShapeClass::polygon:
      switch (s.polygon_kind) {
        case PolygonKind::square: return s.size * s.size;
        case PolygonKind::rectangle: return s.size * s.size / s.aspect;
        case PolygonKind::triangle: return std::sqrt(3.0) / 4.0 * s.size * s.size;
      }
  }
  return 0.0;
}

/// Texel area per lattice cell, ignoring overlaps.
inline double expected_coverage(const TextureGroup& g) {
  const double cell = g.layout.basis_v ? std::fabs(cross(g.layout.basis_u, *g.layout.basis_v)) : g.layout.basis_u.norm();
  return shape_area(g.shape) / cell;
}

inline void stretch_to_coverage(TextureGroup& g, double target) {
  const double c = expected_coverage(g);
  if (c <= target) return;
  const double k = g.layout.basis_v ? std::sqrt(c / target) : c / target;
  g.layout.basis_u = k * g.layout.basis_u;
  if (g.layout.basis_v) g.layout.basis_v = k * *g.layout.basis_v;
}

inline TextureGroup sample_group(Rng& rng, const TaskConstraints& constraints, const SampleDomain& domain,
                                 const std::vector<ShapeClass>& allowed, ColorRGB color, Point2 center) {
  TextureGroup group;
  TexelShapeSpec& shape = group.shape;
  shape.shape_class = allowed[std::size_t(rng.uniform_int(0, std::int64_t(allowed.size()) - 1))];
  shape.polygon_kind = PolygonKind(rng.uniform_int(0, 2));
  shape.size = rng.uniform(domain.min_size, domain.max_size);
  shape.aspect = rng.uniform(1.5, std::max(1.5, std::min(4.0, shape.size / 3.0)));
  shape.orientation_deg = rng.uniform(0.0, 180.0);
  shape.color = color;
  if (shape.shape_class == ShapeClass::line) {
    const bool uniform = constraints.uniform_width ? *constraints.uniform_width : !rng.bernoulli(0.3);
    shape.nonuniform_width = !uniform;
  }

  LayoutSpec& layout = group.layout;
  const bool regular = constraints.regular ? *constraints.regular : rng.bernoulli(0.5);
  const double max_jitter = constraints.separated ? std::min(0.3, domain.max_jitter) : domain.max_jitter;
  double jitter = regular ? 0.0 : rng.uniform(domain.min_jitter, max_jitter);

  const double extent = shape.extent();
  double k_min = std::max(domain.min_spacing, (extent + 2.0) / shape.size);
  if (constraints.separated) {
    // Neighbors may approach by 2 * jitter * spacing; keep 2 px clear.
    const double need = (extent + 2.0) / shape.size;
    const double j_cap = 0.5 * (1.0 - need / domain.max_spacing);
    jitter = std::min(jitter, std::max(0.0, j_cap));
    k_min = std::max(k_min, need / (1.0 - 2.0 * jitter));
  }
  k_min = std::min(k_min, domain.max_spacing);

  if (shape.shape_class == ShapeClass::line) {
    const double spacing = shape.size * rng.uniform(k_min, domain.max_spacing);
    const double t = deg2rad(shape.orientation_deg);
    const Vector2 normal{std::sin(t), std::cos(t)};
    layout.basis_u = spacing * normal;
    layout.phase = center + rng.uniform() * layout.basis_u;
  } else {
    const double lu = shape.size * rng.uniform(k_min, domain.max_spacing);
    const double lv = shape.size * rng.uniform(k_min, domain.max_spacing);
    const double alpha = deg2rad(rng.uniform(0.0, 180.0));
    const double beta = deg2rad(rng.uniform(60.0, 120.0));
    layout.basis_u = {lu * std::cos(alpha), -lu * std::sin(alpha)};
    layout.basis_v = Vector2{lv * std::cos(alpha + beta), -lv * std::sin(alpha + beta)};
    layout.phase = Point2{0, 0} + rng.uniform() * layout.basis_u + rng.uniform() * *layout.basis_v;
  }
  layout.jitter_frac = jitter;
  return group;
}

}  // namespace detail

/// Draws a random texture recipe honoring `constraints`.
inline TextureSpec sample_spec(Rng& rng, const TaskConstraints& constraints, const SampleDomain& domain = {}) {
  constraints.check();
  std::vector<ShapeClass> allowed = constraints.shapes;
  if (allowed.empty())
    allowed = constraints.uniform_width ? std::vector<ShapeClass>{ShapeClass::line}
                                        : std::vector<ShapeClass>(kShapeClasses.begin(), kShapeClasses.end());

  int n_groups = 1;
  if (constraints.colors) n_groups = *constraints.colors;
  else if (!constraints.separated) n_groups = rng.bernoulli(0.3) ? 2 : 1;

  TextureSpec spec;
  spec.width = domain.width;
  spec.height = domain.height;
  const std::vector<ColorRGB> palette = detail::texture_palette(rng, n_groups + 1);
  spec.background = palette[0];

  const Point2 center{0.5 * spec.width, 0.5 * spec.height};
  // Recipes whose texels would cover more of the image than the background
  // are redrawn: the background must stay the majority color to be found.
  for (int attempt = 0;; ++attempt) {
    spec.groups.clear();
    for (int g = 0; g < n_groups; ++g) spec.groups.push_back(detail::sample_group(rng, constraints, domain, allowed,
                                                                                   palette[std::size_t(g) + 1], center));
    double coverage = 0.0;
    for (const auto& g : spec.groups) coverage += detail::expected_coverage(g);
    if (coverage <= kMaxCoverage) break;
    if (attempt >= 200) {
      for (auto& g : spec.groups) detail::stretch_to_coverage(g, kMaxCoverage / double(n_groups));
      break;
    }
  }
  spec.seed = rng.next_u64();
  spec.validate();
  return spec;
}

}  // namespace texelatt
