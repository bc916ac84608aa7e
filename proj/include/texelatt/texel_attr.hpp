#pragma once

// Attributes of single texels: label, named color, orientation and area.

#include <cmath>
#include <optional>

#include "texelatt/color.hpp"
#include "texelatt/core.hpp"
#include "texelatt/detect.hpp"

namespace texelatt {

/// Principal-axis std ratio below which a texel has no orientation.
inline constexpr double kIsotropyRatio = 1.2;

struct TexelAttributes {
  ShapeClass shape_class = ShapeClass::circle;
  ColorName color_name = ColorName::black;
  ColorRGB color_rgb{};
  std::optional<double> orientation_deg;
  std::size_t area_px = 0;
};

/// First principal axis of the set-bit coordinates folded to [0,180), or
/// nothing when the axis std ratio is below kIsotropyRatio.
inline std::optional<double> texel_orientation(const BitMask& mask) {
  double sx = 0, sy = 0;
  std::size_t n = 0;
  mask.for_each_set([&](int x, int y) {
    sx += x, sy += y;
    ++n;
  });
  if (n == 0) throw std::invalid_argument("texel_orientation: empty mask");
  const double mx = sx / double(n), my = sy / double(n);
  double cxx = 0, cyy = 0, cxy = 0;
  mask.for_each_set([&](int x, int y) {
    cxx += (x - mx) * (x - mx);
    cyy += (y - my) * (y - my);
    cxy += (x - mx) * (y - my);
  });
  const double half_tr = 0.5 * (cxx + cyy);
  const double disc = std::sqrt(0.25 * (cxx - cyy) * (cxx - cyy) + cxy * cxy);
  const double l1 = half_tr + disc, l2 = half_tr - disc;
  if (l2 <= 0.0) {
    if (l1 <= 0.0) return std::nullopt;  // single pixel
  } else if (std::sqrt(l1 / l2) < kIsotropyRatio) {
    return std::nullopt;
  }
  const double phi = 0.5 * std::atan2(2.0 * cxy, cxx - cyy);  // image frame, y down
  return fold_180(image_angle_deg({std::cos(phi), std::sin(phi)}));
}

inline ColorRGB mean_color(const BitMask& mask, const RasterImage& image) {
  std::uint64_t r = 0, g = 0, b = 0, n = 0;
  mask.for_each_set([&](int x, int y) {
    const ColorRGB c = image.at(x, y);
    r += c.r, g += c.g, b += c.b, ++n;
  });
  if (n == 0) throw std::invalid_argument("mean_color: empty mask");
  auto avg = [n](std::uint64_t s) { return std::uint8_t((s + n / 2) / n); };
  return {avg(r), avg(g), avg(b)};
}

inline TexelAttributes describe_texel(const TexelRecord& record, const RasterImage& image) {
  if (record.mask.width() != image.width() || record.mask.height() != image.height())
    throw std::invalid_argument("describe_texel: mask and image sizes differ");
  TexelAttributes a;
  a.shape_class = record.shape_class;
  a.color_rgb = mean_color(record.mask, image);
  a.color_name = color_name(a.color_rgb);
  a.orientation_deg = texel_orientation(record.mask);
  a.area_px = record.mask.count();
  return a;
}

}  // namespace texelatt
