#pragma once

// Eleven-name color vocabulary, CIELAB conversion, and HSV helpers.

#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "texelatt/core.hpp"

namespace texelatt {

enum class ColorName { black, white, grey, red, orange, yellow, green, blue, purple, pink, brown };

inline constexpr std::size_t kColorNameCount = 11;

inline constexpr std::array<ColorName, kColorNameCount> kColorNames = {
    ColorName::black,  ColorName::white, ColorName::grey,   ColorName::red,
    ColorName::orange, ColorName::yellow, ColorName::green, ColorName::blue,
    ColorName::purple, ColorName::pink,  ColorName::brown};

/// Prototype RGB value for each name, in enum order.
inline constexpr std::array<ColorRGB, kColorNameCount> kColorPrototypes = {{
    {0, 0, 0},
    {255, 255, 255},
    {128, 128, 128},
    {220, 20, 60},
    {255, 140, 0},
    {255, 215, 0},
    {34, 139, 34},
    {30, 90, 220},
    {130, 30, 180},
    {255, 150, 190},
    {120, 70, 20},
}};

inline std::string_view to_string(ColorName n) {
  static constexpr std::array<std::string_view, kColorNameCount> names = {
      "black", "white", "grey", "red", "orange", "yellow", "green", "blue", "purple", "pink", "brown"};
  return names[std::size_t(n)];
}

inline ColorName color_name_from_string(std::string_view s) {
  for (ColorName n : kColorNames)
    if (to_string(n) == s) return n;
  throw DataError("unknown color name: " + std::string(s));
}

struct Lab {
  double l = 0, a = 0, b = 0;
};

/// sRGB (D65) to CIELAB.
inline Lab to_lab(ColorRGB c) {
  auto linearize = [](std::uint8_t v) {
    const double s = v / 255.0;
    return s <= 0.04045 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
  };
  const double r = linearize(c.r), g = linearize(c.g), b = linearize(c.b);
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  auto f = [](double t) {
    constexpr double d = 6.0 / 29.0;
    return t > d * d * d ? std::cbrt(t) : t / (3 * d * d) + 4.0 / 29.0;
  };
  const double fx = f(x / 0.95047), fy = f(y / 1.0), fz = f(z / 1.08883);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

inline double lab_distance(const Lab& p, const Lab& q) {
  return std::sqrt((p.l - q.l) * (p.l - q.l) + (p.a - q.a) * (p.a - q.a) + (p.b - q.b) * (p.b - q.b));
}

/// Nearest prototype in CIELAB; ties go to the earlier name.
inline ColorName color_name(ColorRGB rgb) {
  static const std::array<Lab, kColorNameCount> prototypes = [] {
    std::array<Lab, kColorNameCount> out{};
    for (std::size_t i = 0; i < kColorNameCount; ++i) out[i] = to_lab(kColorPrototypes[i]);
    return out;
  }();
  const Lab lab = to_lab(rgb);
  std::size_t best = 0;
  double best_d = lab_distance(lab, prototypes[0]);
  for (std::size_t i = 1; i < kColorNameCount; ++i) {
    const double d = lab_distance(lab, prototypes[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return kColorNames[best];
}

/// h in degrees [0,360), s and v in [0,1].
inline ColorRGB hsv_to_rgb(double h, double s, double v) {
  h = std::fmod(h, 360.0);
  if (h < 0) h += 360.0;
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (int(hp)) {
    case 0: r = c, g = x; break;
    case 1: r = x, g = c; break;
    case 2: g = c, b = x; break;
    case 3: g = x, b = c; break;
    case 4: r = x, b = c; break;
    default: r = c, b = x; break;
  }
  const double m = v - c;
  auto q = [&](double ch) { return std::uint8_t(std::lround(std::clamp((ch + m) * 255.0, 0.0, 255.0))); };
  return {q(r), q(g), q(b)};
}

/// Hue in degrees [0,360); 0 for achromatic colors.
inline double rgb_hue(ColorRGB c) {
  const double r = c.r / 255.0, g = c.g / 255.0, b = c.b / 255.0;
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
  const double d = mx - mn;
  if (d <= 0) return 0.0;
  double h;
  if (mx == r)
    h = 60.0 * std::fmod((g - b) / d, 6.0);
  else if (mx == g)
    h = 60.0 * ((b - r) / d + 2.0);
  else
    h = 60.0 * ((r - g) / d + 4.0);
  if (h < 0) h += 360.0;
  return h;
}

/// Smallest absolute difference between two hues, in [0,180].
inline double hue_difference(double h1, double h2) {
  double d = std::fabs(std::fmod(h1 - h2, 360.0));
  return d > 180.0 ? 360.0 - d : d;
}

}  // namespace texelatt
