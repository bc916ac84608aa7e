#pragma once

// Shared value types: raster images, geometry, masks and colors.
//
// Conventions: image origin is top-left with y growing downward. Angles are
// reported in degrees, counterclockwise from +x in the math frame (x, -y).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace texelatt {

/// Raised when input data (files, annotations, corpora) is malformed or
/// missing. Precondition violations on API arguments use
/// std::invalid_argument instead.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ColorRGB {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  constexpr ColorRGB() = default;
  constexpr ColorRGB(std::uint8_t red, std::uint8_t green, std::uint8_t blue)
      : r(red), g(green), b(blue) {}

  static ColorRGB from_ints(int red, int green, int blue) {
    auto check = [](int v) {
      if (v < 0 || v > 255) throw std::invalid_argument("color channel out of range [0,255]");
      return static_cast<std::uint8_t>(v);
    };
    return {check(red), check(green), check(blue)};
  }

  friend constexpr bool operator==(const ColorRGB&, const ColorRGB&) = default;
};
static_assert(sizeof(ColorRGB) == 3, "ColorRGB must be tightly packed");

inline double rgb_distance(ColorRGB a, ColorRGB b) {
  const double dr = double(a.r) - b.r;
  const double dg = double(a.g) - b.g;
  const double db = double(a.b) - b.b;
  return std::sqrt(dr * dr + dg * dg + db * db);
}

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

struct Vector2 {
  double dx = 0.0;
  double dy = 0.0;

  double norm() const { return std::hypot(dx, dy); }
  friend constexpr bool operator==(const Vector2&, const Vector2&) = default;
};

inline Point2 operator+(Point2 p, Vector2 v) { return {p.x + v.dx, p.y + v.dy}; }
inline Point2 operator-(Point2 p, Vector2 v) { return {p.x - v.dx, p.y - v.dy}; }
inline Vector2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vector2 operator+(Vector2 a, Vector2 b) { return {a.dx + b.dx, a.dy + b.dy}; }
inline Vector2 operator*(double s, Vector2 v) { return {s * v.dx, s * v.dy}; }
inline double dot(Vector2 a, Vector2 b) { return a.dx * b.dx + a.dy * b.dy; }
inline double cross(Vector2 a, Vector2 b) { return a.dx * b.dy - a.dy * b.dx; }
inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Inclusive pixel rectangle.
struct BBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = -1;
  int y_max = -1;

  bool valid() const { return x_min <= x_max && y_min <= y_max; }
  int width() const { return x_max - x_min + 1; }
  int height() const { return y_max - y_min + 1; }
  bool contains(int x, int y) const { return x >= x_min && x <= x_max && y >= y_min && y <= y_max; }
  bool contains(Point2 p) const { return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max; }

  friend constexpr bool operator==(const BBox&, const BBox&) = default;
};

inline BBox intersect(const BBox& a, const BBox& b) {
  return {std::max(a.x_min, b.x_min), std::max(a.y_min, b.y_min), std::min(a.x_max, b.x_max),
          std::min(a.y_max, b.y_max)};
}

/// Occupancy mask over an image of size width x height.
///
/// Bits are only stored inside `window()`; everything outside it reads as
/// unset. This keeps per-texel masks small on large images while still
/// behaving like a full-image mask.
class BitMask {
 public:
  BitMask() = default;

  BitMask(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw std::invalid_argument("mask dimensions must be >= 1");
  }

  BitMask(int width, int height, BBox window) : BitMask(width, height) {
    window_ = intersect(window, BBox{0, 0, width - 1, height - 1});
    if (window_.valid()) bits_.assign(std::size_t(window_.width()) * window_.height(), 0);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  const BBox& window() const { return window_; }

  bool test(int x, int y) const {
    if (!window_.valid() || !window_.contains(x, y)) return false;
    return bits_[index(x, y)] != 0;
  }

  void set(int x, int y, bool value = true) {
    if (!window_.valid() || !window_.contains(x, y)) throw std::out_of_range("mask bit outside window");
    bits_[index(x, y)] = value ? 1 : 0;
  }

  std::size_t count() const {
    return std::size_t(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }
  bool empty() const { return count() == 0; }

  /// Calls f(x, y) for every set bit in row-major order.
  template <class F>
  void for_each_set(F&& f) const {
    if (!window_.valid()) return;
    std::size_t i = 0;
    for (int y = window_.y_min; y <= window_.y_max; ++y)
      for (int x = window_.x_min; x <= window_.x_max; ++x, ++i)
        if (bits_[i]) f(x, y);
  }

  /// Shrinks the storage window to the tight bounding box of the set bits.
  void shrink_to_fit();

 private:
  std::size_t index(int x, int y) const {
    return std::size_t(y - window_.y_min) * window_.width() + (x - window_.x_min);
  }

  int width_ = 0;
  int height_ = 0;
  BBox window_{};
  std::vector<std::uint8_t> bits_;
};

/// Smallest axis-aligned box containing every set bit.
inline BBox mask_to_bbox(const BitMask& mask) {
  BBox box{mask.width(), mask.height(), -1, -1};
  bool any = false;
  mask.for_each_set([&](int x, int y) {
    any = true;
    box.x_min = std::min(box.x_min, x);
    box.y_min = std::min(box.y_min, y);
    box.x_max = std::max(box.x_max, x);
    box.y_max = std::max(box.y_max, y);
  });
  if (!any) throw std::invalid_argument("mask_to_bbox: empty mask");
  return box;
}

inline void BitMask::shrink_to_fit() {
  if (empty()) {
    window_ = BBox{};
    bits_.clear();
    return;
  }
  const BBox tight = mask_to_bbox(*this);
  if (tight == window_) return;
  BitMask shrunk(width_, height_, tight);
  for_each_set([&](int x, int y) { shrunk.set(x, y); });
  *this = std::move(shrunk);
}

/// Mean position of the set bits, in pixel-center coordinates (x + 0.5).
inline Point2 mask_centroid(const BitMask& mask) {
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  mask.for_each_set([&](int x, int y) {
    sx += x + 0.5;
    sy += y + 0.5;
    ++n;
  });
  if (n == 0) throw std::invalid_argument("mask_centroid: empty mask");
  return {sx / double(n), sy / double(n)};
}

/// Number of pixels set in both masks.
inline std::size_t mask_intersection(const BitMask& a, const BitMask& b) {
  const BBox overlap = intersect(a.window(), b.window());
  if (!overlap.valid()) return 0;
  std::size_t n = 0;
  for (int y = overlap.y_min; y <= overlap.y_max; ++y)
    for (int x = overlap.x_min; x <= overlap.x_max; ++x)
      if (a.test(x, y) && b.test(x, y)) ++n;
  return n;
}

class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, ColorRGB fill = {})
      : width_(width), height_(height) {
    if (width < 1 || height < 1) throw std::invalid_argument("image dimensions must be >= 1");
    pixels_.assign(std::size_t(width) * height, fill);
  }
  RasterImage(int width, int height, std::vector<ColorRGB> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < 1 || height < 1) throw std::invalid_argument("image dimensions must be >= 1");
    if (pixels_.size() != std::size_t(width) * height)
      throw std::invalid_argument("pixel count does not match image dimensions");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool inside(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  ColorRGB at(int x, int y) const { return pixels_[std::size_t(y) * width_ + x]; }
  ColorRGB& at(int x, int y) { return pixels_[std::size_t(y) * width_ + x]; }

  const std::vector<ColorRGB>& pixels() const { return pixels_; }
  std::vector<ColorRGB>& pixels() { return pixels_; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<ColorRGB> pixels_;
};

enum class ShapeClass { circle = 0, line = 1, polygon = 2 };

inline constexpr std::array<ShapeClass, 3> kShapeClasses = {ShapeClass::circle, ShapeClass::line,
                                                            ShapeClass::polygon};

inline std::string_view to_string(ShapeClass c) {
  switch (c) {
    case ShapeClass::circle: return "circle";
    case ShapeClass::line: return "line";
    case ShapeClass::polygon: return "polygon";
  }
  return "unknown";
}

inline ShapeClass shape_class_from_string(std::string_view s) {
  if (s == "circle") return ShapeClass::circle;
  if (s == "line") return ShapeClass::line;
  if (s == "polygon") return ShapeClass::polygon;
  throw DataError("unknown shape class: " + std::string(s));
}

/// Folds an angle in degrees into [0, 180).
inline double fold_180(double deg) {
  double a = std::fmod(deg, 180.0);
  if (a < 0) a += 180.0;
  if (a >= 180.0) a -= 180.0;
  return a;
}

inline constexpr double kPi = 3.14159265358979323846;
inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Angle of an image-space vector in degrees, counterclockwise from +x in
/// the math frame, i.e. atan2(-dy, dx).
inline double image_angle_deg(Vector2 v) { return rad2deg(std::atan2(-v.dy, v.dx)); }

}  // namespace texelatt
