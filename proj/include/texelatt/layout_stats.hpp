#pragma once

// Layout attributes of texel-centroid point patterns: density, quadrat
// chi-square homogeneity, pair-vector orientation histogram, and local
// (reflective) and translational symmetry scores. Line groups are reduced to
// 1D patterns along the axis perpendicular to the lines.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "texelatt/core.hpp"
#include "texelatt/spatial_index.hpp"

namespace texelatt {

/// Centroids inside a width x height window. A 1D pattern has height 0 and
/// all points on y = 0.
struct PointPattern {
  std::vector<Point2> points;
  double width = 0.0;
  double height = 0.0;

  bool is_1d() const { return height == 0.0; }
};

struct LayoutAttributes {
  double density = 0.0;
  double homogeneity = 0.0;
  std::array<double, 3> orientation_hist{};
  double local_symmetry = 0.0;
  double translational_symmetry = 0.0;
};

/// Which centroids the symmetry scores are averaged over.
enum class SymmetryScope {
  interior,          // interior points only; error if there are none
  interior_or_all,   // all points when no point is interior
};

inline double density(const PointPattern& pattern) {
  const double area = pattern.width * pattern.height;
  if (!(area > 0.0)) throw std::invalid_argument("density: window has zero area");
  if (pattern.points.empty()) throw std::invalid_argument("density: empty pattern");
  return double(pattern.points.size()) / area;
}

/// A straight band: any point on its midline and its orientation.
struct LineTexel {
  Point2 anchor;
  double orientation_deg = 0.0;
};

namespace detail {

/// Circular mean of axial angles (period 180), in degrees [0,180).
inline double axial_mean_deg(const std::vector<LineTexel>& lines) {
  double c = 0, s = 0;
  for (const auto& l : lines) {
    c += std::cos(deg2rad(2.0 * l.orientation_deg));
    s += std::sin(deg2rad(2.0 * l.orientation_deg));
  }
  return fold_180(0.5 * rad2deg(std::atan2(s, c)));
}

/// Unit normal (image frame) of lines at the given math-frame orientation.
inline Vector2 line_normal(double orientation_deg) {
  const double t = deg2rad(orientation_deg);
  return {std::sin(t), std::cos(t)};
}

struct Projection {
  std::vector<double> t;
  double lo = 0.0, hi = 0.0;
};

inline Projection project_lines(const std::vector<LineTexel>& lines, double width, double height) {
  const Vector2 n = line_normal(axial_mean_deg(lines));
  Projection p;
  p.lo = 1e300, p.hi = -1e300;
  for (Point2 c : {Point2{0, 0}, Point2{width, 0}, Point2{0, height}, Point2{width, height}}) {
    const double t = n.dx * c.x + n.dy * c.y;
    p.lo = std::min(p.lo, t), p.hi = std::max(p.hi, t);
  }
  for (const auto& l : lines) p.t.push_back(n.dx * l.anchor.x + n.dy * l.anchor.y - p.lo);
  return p;
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace detail

/// Lines per pixel measured across the lines: count divided by the extent of
/// the window projected on the axis perpendicular to the mean orientation.
inline double line_density(const std::vector<LineTexel>& lines, double width, double height) {
  if (lines.empty()) throw std::invalid_argument("line_density: no lines");
  const detail::Projection p = detail::project_lines(lines, width, height);
  const double extent = p.hi - p.lo;
  if (!(extent > 0.0)) throw std::invalid_argument("line_density: degenerate window");
  return double(lines.size()) / extent;
}

/// Line anchors projected on the perpendicular axis, as a 1D pattern whose
/// window is the projected extent of the image.
inline PointPattern line_projection(const std::vector<LineTexel>& lines, double width, double height) {
  if (lines.size() < 2) throw std::invalid_argument("line_projection: need at least 2 lines");
  const detail::Projection p = detail::project_lines(lines, width, height);
  PointPattern out;
  out.width = p.hi - p.lo;
  out.height = 0.0;
  for (double t : p.t) out.points.push_back({std::clamp(t, 0.0, out.width), 0.0});
  return out;
}

/// Quadrat chi-square statistic sum (O - E)^2 / E over a 10 x 10 grid of
/// equal cells (10 bins for 1D patterns).
inline double homogeneity_chi2(const PointPattern& pattern) {
  const std::size_t n = pattern.points.size();
  if (n < 10) throw std::invalid_argument("homogeneity_chi2: need at least 10 points");
  if (!(pattern.width > 0.0)) throw std::invalid_argument("homogeneity_chi2: degenerate window");
  auto bin = [](double v, double extent) { return std::clamp(int(std::floor(10.0 * v / extent)), 0, 9); };
  std::vector<std::size_t> counts(pattern.is_1d() ? 10 : 100, 0);
  for (Point2 p : pattern.points) {
    const int bx = bin(p.x, pattern.width);
    const int by = pattern.is_1d() ? 0 : bin(p.y, pattern.height);
    ++counts[std::size_t(by) * 10 + bx];
  }
  const double e = double(n) / double(counts.size());
  double chi2 = 0.0;
  for (std::size_t o : counts) chi2 += (double(o) - e) * (double(o) - e) / e;
  return chi2;
}

namespace detail {

/// Median distance from each point to its nearest other point.
inline double median_nn_spacing(const GridIndex& index) {
  std::vector<double> d;
  d.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto nn = index.knn(i, 1);
    if (!nn.empty()) d.push_back(distance(index.points()[i], index.points()[nn[0]]));
  }
  return median(d);
}

inline bool inside_window(const PointPattern& pattern, Point2 p) {
  if (pattern.is_1d()) return p.x >= 0.0 && p.x < pattern.width;
  return p.x >= 0.0 && p.x < pattern.width && p.y >= 0.0 && p.y < pattern.height;
}

/// Points at least `margin` from every window edge (both ends for 1D).
inline std::vector<std::size_t> interior_points(const PointPattern& pattern, double margin) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pattern.points.size(); ++i) {
    const Point2 p = pattern.points[i];
    bool ok = p.x >= margin && pattern.width - p.x >= margin;
    if (!pattern.is_1d()) ok = ok && p.y >= margin && pattern.height - p.y >= margin;
    if (ok) out.push_back(i);
  }
  return out;
}

/// Neighborhood used by the symmetry scores: 4 nearest neighbors in 2D,
/// the immediate left and right neighbors in 1D.
inline std::vector<std::size_t> neighborhood(const PointPattern& pattern, const GridIndex& index,
                                             const std::vector<std::size_t>& order_1d, std::size_t i) {
  if (!pattern.is_1d()) {
    auto nn = index.knn(i, 4, 0.0);
    nn.resize(std::min<std::size_t>(nn.size(), 4));
    return nn;
  }
  const auto it = std::find(order_1d.begin(), order_1d.end(), i);
  std::vector<std::size_t> out;
  if (it != order_1d.begin()) out.push_back(*(it - 1));
  if (it + 1 != order_1d.end()) out.push_back(*(it + 1));
  return out;
}

struct SymmetryContext {
  GridIndex index;
  double spacing = 0.0;
  std::vector<std::size_t> centers;
  std::vector<std::size_t> order_1d;
};

inline SymmetryContext symmetry_context(const PointPattern& pattern, SymmetryScope scope, const char* what) {
  if (pattern.points.size() < 9) throw std::invalid_argument(std::string(what) + ": need at least 9 points");
  SymmetryContext ctx{GridIndex(pattern.points), 0.0, {}, {}};
  ctx.spacing = median_nn_spacing(ctx.index);
  if (!(ctx.spacing > 0.0)) throw std::invalid_argument(std::string(what) + ": coincident points");
  ctx.centers = interior_points(pattern, 1.5 * ctx.spacing);
  if (ctx.centers.empty()) {
    if (scope == SymmetryScope::interior) throw std::invalid_argument(std::string(what) + ": no interior points");
    for (std::size_t i = 0; i < pattern.points.size(); ++i) ctx.centers.push_back(i);
  }
  if (pattern.is_1d()) {
    ctx.order_1d.resize(pattern.points.size());
    for (std::size_t i = 0; i < ctx.order_1d.size(); ++i) ctx.order_1d[i] = i;
    std::stable_sort(ctx.order_1d.begin(), ctx.order_1d.end(),
                     [&](std::size_t a, std::size_t b) { return pattern.points[a].x < pattern.points[b].x; });
  }
  return ctx;
}

}  // namespace detail

/// S(R): each neighbor of a center is reflected through the center and the
/// distance to the closest centroid is measured. Mean over all evaluated
/// (center, neighbor) pairs divided by the median nearest-neighbor spacing.
/// Reflections landing outside the window are not evaluated.
inline double reflective_symmetry(const PointPattern& pattern, SymmetryScope scope = SymmetryScope::interior) {
  const detail::SymmetryContext ctx = detail::symmetry_context(pattern, scope, "reflective_symmetry");
  double sum = 0.0;
  std::size_t terms = 0;
  for (std::size_t i : ctx.centers) {
    const Point2 c = pattern.points[i];
    for (std::size_t j : detail::neighborhood(pattern, ctx.index, ctx.order_1d, i)) {
      const Point2 n = pattern.points[j];
      const Point2 r{2.0 * c.x - n.x, 2.0 * c.y - n.y};
      if (!detail::inside_window(pattern, r)) continue;
      sum += ctx.index.nearest_distance(r);
      ++terms;
    }
  }
  return terms ? sum / double(terms) / ctx.spacing : 0.0;
}

/// S(T): the neighborhood of each center is shifted by every vector joining
/// the center to one of its neighbors; each shifted neighbor contributes its
/// distance to the closest centroid. Normalized as reflective_symmetry.
inline double translational_symmetry(const PointPattern& pattern, SymmetryScope scope = SymmetryScope::interior) {
  const detail::SymmetryContext ctx = detail::symmetry_context(pattern, scope, "translational_symmetry");
  double sum = 0.0;
  std::size_t terms = 0;
  for (std::size_t i : ctx.centers) {
    const Point2 c = pattern.points[i];
    const auto hood = detail::neighborhood(pattern, ctx.index, ctx.order_1d, i);
    for (std::size_t j : hood) {
      const Vector2 t = pattern.points[j] - c;
      for (std::size_t k : hood) {
        const Point2 q = pattern.points[k] + t;
        if (!detail::inside_window(pattern, q)) continue;
        sum += ctx.index.nearest_distance(q);
        ++terms;
      }
    }
  }
  return terms ? sum / double(terms) / ctx.spacing : 0.0;
}

/// Histogram of the directions of vectors from each point to its 4 nearest
/// neighbors (ties at the 4th distance included), folded to [0,180) and
/// binned into [0,60), [60,120), [120,180). Computed over interior points,
/// or over all points when none is interior.
inline std::array<double, 3> pair_orientation_histogram(const PointPattern& pattern) {
  if (pattern.points.size() < 5) throw std::invalid_argument("pair_orientation_histogram: need at least 5 points");
  const GridIndex index(pattern.points);
  std::vector<std::size_t> centers;
  const double spacing = detail::median_nn_spacing(index);
  if (spacing > 0.0) centers = detail::interior_points(pattern, 1.5 * spacing);
  if (centers.empty())
    for (std::size_t i = 0; i < pattern.points.size(); ++i) centers.push_back(i);
  std::array<double, 3> hist{};
  double total = 0.0;
  for (std::size_t i : centers) {
    for (std::size_t j : index.knn(i, 4)) {
      double a = fold_180(image_angle_deg(pattern.points[j] - pattern.points[i]));
      a = fold_180(std::round(a * 1e6) / 1e6);
      hist[std::size_t(std::min(2, int(a / 60.0)))] += 1.0;
      total += 1.0;
    }
  }
  if (total > 0)
    for (double& h : hist) h /= total;
  return hist;
}

/// All layout attributes of a 2D centroid pattern. Symmetry falls back to
/// all points when none is interior.
inline LayoutAttributes layout_attributes(const PointPattern& pattern) {
  LayoutAttributes a;
  a.density = density(pattern);
  a.homogeneity = homogeneity_chi2(pattern);
  a.orientation_hist = pair_orientation_histogram(pattern);
  a.local_symmetry = reflective_symmetry(pattern, SymmetryScope::interior_or_all);
  a.translational_symmetry = translational_symmetry(pattern, SymmetryScope::interior_or_all);
  return a;
}

/// Layout attributes of a group of bands: density across the bands, and the
/// statistics of the 1D projection. Pair vectors between bands all point
/// along the mean normal, so the orientation histogram is one-hot there.
inline LayoutAttributes line_layout_attributes(const std::vector<LineTexel>& lines, double width, double height) {
  const PointPattern p = line_projection(lines, width, height);
  LayoutAttributes a;
  a.density = line_density(lines, width, height);
  a.homogeneity = homogeneity_chi2(p);
  const Vector2 n = detail::line_normal(detail::axial_mean_deg(lines));
  const double na = fold_180(std::round(image_angle_deg(n) * 1e6) / 1e6);
  a.orientation_hist[std::size_t(std::min(2, int(na / 60.0)))] = 1.0;
  a.local_symmetry = reflective_symmetry(p, SymmetryScope::interior_or_all);
  a.translational_symmetry = translational_symmetry(p, SymmetryScope::interior_or_all);
  return a;
}

}  // namespace texelatt
