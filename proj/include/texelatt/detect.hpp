#pragma once

// Classical texel detector for clean renders: background estimation,
// color-aware connected components, shape classification, and per-image
// average precision against ground truth.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "texelatt/core.hpp"
#include "texelatt/synth.hpp"

namespace texelatt {

struct TexelRecord {
  BitMask mask;
  BBox bbox{};
  Point2 centroid{};
  ShapeClass shape_class = ShapeClass::circle;
  double confidence = 1.0;
};

/// Tunable detector thresholds.
struct DetectorConfig {
  double background_distance = 40.0;  // RGB distance separating texel from background
  double elongation = 8.0;
  std::size_t min_component = 9;
  double circle_fit = 0.88;          // below: never a circle
  double circle_certain = 0.97;      // above: circle without consulting the square template
  double clipped_circle_fit = 0.92;  // border-clipped components
  double band_fit = 0.9;             // components touching two borders: line iff they fill their strip
};

/// Modal color over a 32-level-per-channel quantization, returned as the mean
/// of the pixels falling in the modal bin. Ties go to the lower bin index.
inline ColorRGB estimate_background(const RasterImage& image) {
  std::vector<std::uint32_t> counts(32 * 32 * 32, 0);
  auto bin = [](ColorRGB c) { return (std::size_t(c.r >> 3) << 10) | (std::size_t(c.g >> 3) << 5) | (c.b >> 3); };
  for (ColorRGB c : image.pixels()) ++counts[bin(c)];
  const std::size_t mode = std::size_t(std::max_element(counts.begin(), counts.end()) - counts.begin());
  std::uint64_t sr = 0, sg = 0, sb = 0, n = 0;
  for (ColorRGB c : image.pixels()) {
    if (bin(c) != mode) continue;
    sr += c.r, sg += c.g, sb += c.b, ++n;
  }
  auto mean = [n](std::uint64_t s) { return std::uint8_t((s + n / 2) / n); };
  return {mean(sr), mean(sg), mean(sb)};
}

/// Geometric measurements used by classify_shape.
struct ShapeFeatures {
  std::size_t area = 0;
  double elongation = 1.0;   // ratio of principal standard deviations
  double orientation_deg = 0.0;
  double circularity = 0.0;  // 4 pi A / P^2 on the traced outer contour
  double disk_fit_iou = 0.0; // IoU with the equal-area disk at the centroid, or for
                             // clipped shapes the disk fitted to the free boundary
  bool touches_left = false, touches_right = false, touches_top = false, touches_bottom = false;

  bool clipped() const { return touches_left || touches_right || touches_top || touches_bottom; }
};

namespace detail {

// Clockwise neighbor order in image coordinates, starting East.
inline constexpr std::array<int, 8> kDx = {1, 1, 0, -1, -1, -1, 0, 1};
inline constexpr std::array<int, 8> kDy = {0, 1, 1, 1, 0, -1, -1, -1};

/// Moore-neighbor tracing of the outer contour of the component containing
/// the first set pixel in raster order. Returns the chain-code directions.
inline std::vector<int> trace_outer_contour(const BitMask& mask, int sx, int sy) {
  std::vector<int> chain;
  int x = sx, y = sy;
  int search = 4;  // the West neighbor of the first pixel is background
  int first_dir = -1;
  const std::size_t guard = 8 * (mask.count() + 4);
  for (std::size_t step = 0; step < guard; ++step) {
    int dir = -1;
    for (int k = 0; k < 8; ++k) {
      const int d = (search + k) % 8;
      if (mask.test(x + kDx[std::size_t(d)], y + kDy[std::size_t(d)])) {
        dir = d;
        break;
      }
    }
    if (dir < 0) break;  // isolated pixel
    if (x == sx && y == sy && dir == first_dir) break;
    if (first_dir < 0) first_dir = dir;
    chain.push_back(dir);
    x += kDx[std::size_t(dir)];
    y += kDy[std::size_t(dir)];
    search = (dir % 2 == 0) ? (dir + 6) % 8 : (dir + 5) % 8;
  }
  return chain;
}

struct CircleFit {
  double cx = 0, cy = 0, r = 0;
  bool ok = false;
};

/// Algebraic (Kasa) least-squares circle through the given points.
inline CircleFit fit_circle(const std::vector<Point2>& pts) {
  CircleFit fit;
  if (pts.size() < 3) return fit;
  double mx = 0, my = 0;
  for (Point2 p : pts) mx += p.x, my += p.y;
  mx /= double(pts.size());
  my /= double(pts.size());
  double suu = 0, svv = 0, suv = 0, suuu = 0, svvv = 0, suvv = 0, svuu = 0;
  for (Point2 p : pts) {
    const double u = p.x - mx, v = p.y - my;
    suu += u * u, svv += v * v, suv += u * v;
    suuu += u * u * u, svvv += v * v * v, suvv += u * v * v, svuu += v * u * u;
  }
  const double det = suu * svv - suv * suv;
  if (std::fabs(det) < 1e-9) return fit;
  const double bu = 0.5 * (suuu + suvv), bv = 0.5 * (svvv + svuu);
  const double uc = (bu * svv - bv * suv) / det;
  const double vc = (suu * bv - suv * bu) / det;
  fit.cx = uc + mx;
  fit.cy = vc + my;
  fit.r = std::sqrt(uc * uc + vc * vc + (suu + svv) / double(pts.size()));
  fit.ok = std::isfinite(fit.r);
  return fit;
}

/// IoU between the mask and the digital disk (pixel centers within r of c),
/// the disk clipped to the image.
inline double disk_iou(const BitMask& mask, Point2 c, double r) {
  const BBox box = intersect(BBox{int(std::floor(c.x - r)) - 1, int(std::floor(c.y - r)) - 1,
                                  int(std::ceil(c.x + r)) + 1, int(std::ceil(c.y + r)) + 1},
                             BBox{0, 0, mask.width() - 1, mask.height() - 1});
  std::size_t inter = 0, disk = 0;
  if (box.valid()) {
    for (int y = box.y_min; y <= box.y_max; ++y)
      for (int x = box.x_min; x <= box.x_max; ++x) {
        const double dx = x + 0.5 - c.x, dy = y + 0.5 - c.y;
        if (dx * dx + dy * dy <= r * r) {
          ++disk;
          if (mask.test(x, y)) ++inter;
        }
      }
  }
  const std::size_t uni = disk + mask.count() - inter;
  return uni ? double(inter) / double(uni) : 0.0;
}

}  // namespace detail

inline ShapeFeatures shape_features(const BitMask& mask) {
  ShapeFeatures f;
  const BBox box = mask_to_bbox(mask);
  f.touches_left = box.x_min == 0;
  f.touches_top = box.y_min == 0;
  f.touches_right = box.x_max == mask.width() - 1;
  f.touches_bottom = box.y_max == mask.height() - 1;

  double sx = 0, sy = 0;
  mask.for_each_set([&](int x, int y) {
    ++f.area;
    sx += x, sy += y;
  });
  const double mx = sx / double(f.area), my = sy / double(f.area);
  double cxx = 0, cyy = 0, cxy = 0;
  mask.for_each_set([&](int x, int y) {
    cxx += (x - mx) * (x - mx);
    cyy += (y - my) * (y - my);
    cxy += (x - mx) * (y - my);
  });
  cxx /= double(f.area), cyy /= double(f.area), cxy /= double(f.area);
  const double tr = cxx + cyy, disc = std::sqrt(std::max(0.0, 0.25 * (cxx - cyy) * (cxx - cyy) + cxy * cxy));
  const double l1 = 0.5 * tr + disc, l2 = std::max(0.0, 0.5 * tr - disc);
  f.elongation = l2 > 1e-12 ? std::sqrt(l1 / l2) : 1e9;
  // Principal axis in image coordinates, reported in the math frame.
  f.orientation_deg = fold_180(image_angle_deg({std::cos(0.5 * std::atan2(2 * cxy, cxx - cyy)),
                                                std::sin(0.5 * std::atan2(2 * cxy, cxx - cyy))}));

  // Circularity on the traced contour through pixel centers. The shoelace
  // area of that polygon is used so that area and perimeter describe the
  // same curve; the perimeter uses corner-corrected chain-code weights.
  int sx0 = -1, sy0 = -1;
  mask.for_each_set([&](int x, int y) {
    if (sx0 < 0) sx0 = x, sy0 = y;
  });
  const std::vector<int> chain = detail::trace_outer_contour(mask, sx0, sy0);
  if (chain.size() >= 3) {
    double ne = 0, no = 0, nc = 0, twice_area = 0;
    int x = sx0, y = sy0;
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const int d = chain[i];
      (d % 2 == 0 ? ne : no) += 1;
      if (chain[i] != chain[(i + 1) % chain.size()]) nc += 1;
      const int nx = x + detail::kDx[std::size_t(d)], ny = y + detail::kDy[std::size_t(d)];
      twice_area += double(x) * ny - double(nx) * y;
      x = nx, y = ny;
    }
    const double perimeter = 0.980 * ne + 1.406 * no - 0.091 * nc;
    const double area = 0.5 * std::fabs(twice_area);
    f.circularity = perimeter > 0 ? 4.0 * kPi * area / (perimeter * perimeter) : 0.0;
  }

  const int W = mask.width(), H = mask.height();
  if (!f.clipped()) {
    // Equal-area disk at the centroid, allowing half a pixel of radius slack.
    const Point2 c = mask_centroid(mask);
    const double r0 = std::sqrt(double(f.area) / kPi);
    for (double dr : {-0.5, -0.25, 0.0, 0.25, 0.5})
      if (r0 + dr > 0.5) f.disk_fit_iou = std::max(f.disk_fit_iou, detail::disk_iou(mask, c, r0 + dr));
    return f;
  }

  // Clipped: disk fitted to the free boundary (boundary pixels not lying on
  // the image border), compared with the disk clipped to the image.
  std::vector<Point2> boundary;
  mask.for_each_set([&](int x, int y) {
    static constexpr std::array<int, 4> ox = {1, -1, 0, 0}, oy = {0, 0, 1, -1};
    for (std::size_t k = 0; k < 4; ++k) {
      const int nx = x + ox[k], ny = y + oy[k];
      if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
      if (!mask.test(nx, ny)) {
        boundary.push_back({x + 0.5, y + 0.5});
        return;
      }
    }
  });
  const detail::CircleFit fit = detail::fit_circle(boundary);
  const double diag = std::hypot(box.width(), box.height());
  if (fit.ok && fit.r < 4.0 * diag + 4.0) f.disk_fit_iou = detail::disk_iou(mask, {fit.cx, fit.cy}, fit.r + 0.5);
  return f;
}

/// Best IoU between the mask and an equal-area square at its centroid over
/// orientations in 3 degree steps.
inline double square_fit_iou(const BitMask& mask) {
  const Point2 c = mask_centroid(mask);
  const double side = std::sqrt(double(mask.count()));
  double best = 0.0;
  TexelShapeSpec s;
  s.shape_class = ShapeClass::polygon;
  s.polygon_kind = PolygonKind::square;
  for (double ds : {-0.5, 0.0, 0.5}) {
    s.size = std::max(3.0, side + ds);
    for (int a = 0; a < 90; a += 3) {
      s.orientation_deg = a;
      const BitMask t = rasterize_texel(s, c, mask.width(), mask.height());
      const std::size_t inter = mask_intersection(mask, t);
      best = std::max(best, double(inter) / double(mask.count() + t.count() - inter));
    }
  }
  return best;
}

/// Fraction of the image strip spanned by the mask along its best band
/// direction that the mask fills. A band clipped by the image fills its strip
/// exactly; a compact shape fills a small part of the strip through it.
/// Directions are searched in 2 degree steps, then refined.
inline double band_fit_iou(const BitMask& mask) {
  const int W = mask.width(), H = mask.height();
  std::vector<Point2> pixels;
  mask.for_each_set([&](int x, int y) { pixels.push_back({x + 0.5, y + 0.5}); });
  if (pixels.size() < 2) return 0.0;

  // Pixels of the image whose center projects into [lo, hi] on normal n.
  auto strip_count = [&](double nx, double ny, double lo, double hi) {
    std::size_t n = 0;
    for (int y = 0; y < H; ++y) {
      const double base = ny * (y + 0.5);
      if (std::fabs(nx) < 1e-12) {
        if (base >= lo && base <= hi) n += std::size_t(W);
        continue;
      }
      double a = (lo - base) / nx - 0.5, b = (hi - base) / nx - 0.5;
      if (a > b) std::swap(a, b);
      const int x0 = std::max(0, int(std::ceil(a - 1e-9))), x1 = std::min(W - 1, int(std::floor(b + 1e-9)));
      if (x1 >= x0) n += std::size_t(x1 - x0 + 1);
    }
    return n;
  };
  auto fill = [&](double along) {
    const double nx = -std::sin(along), ny = std::cos(along);
    double lo = 1e300, hi = -1e300;
    for (Point2 p : pixels) {
      const double t = nx * p.x + ny * p.y;
      lo = std::min(lo, t), hi = std::max(hi, t);
    }
    const std::size_t strip = strip_count(nx, ny, lo - 1e-9, hi + 1e-9);
    return strip ? double(pixels.size()) / double(strip) : 0.0;
  };
  double best = 0.0, best_deg = 0.0;
  for (int k = 0; k < 90; ++k) {
    const double v = fill(deg2rad(2.0 * k));
    if (v > best) best = v, best_deg = 2.0 * k;
  }
  for (int k = -8; k <= 8; ++k) best = std::max(best, fill(deg2rad(best_deg + 0.25 * k)));
  return best;
}

/// Circle, line or polygon from the mask geometry alone.
///
/// Lines span the image between opposite borders, are strongly elongated, or
/// are corner pieces of a band that fill the image strip they lie in.
/// Unclipped shapes are circles when they match the equal-area disk closely,
/// and better than any equal-area square when the match is only fair. Shapes
/// cut by the image border are circles when a disk fitted to their remaining
/// boundary reproduces them.
inline ShapeClass classify_shape(const BitMask& mask, const DetectorConfig& config = {}) {
  if (mask.empty()) throw std::invalid_argument("classify_shape: empty mask");
  const ShapeFeatures f = shape_features(mask);
  if ((f.touches_left && f.touches_right) || (f.touches_top && f.touches_bottom)) return ShapeClass::line;
  const int borders = int(f.touches_left) + int(f.touches_right) + int(f.touches_top) + int(f.touches_bottom);
  if (f.elongation >= config.elongation) {
    // A band touching a single border crosses it; a sliver cut off a
    // compact shape runs along it.
    if (borders != 1) return ShapeClass::line;
    const double border_axis = (f.touches_left || f.touches_right) ? 90.0 : 0.0;
    const double d = std::fabs(f.orientation_deg - border_axis);
    if (std::min(d, 180.0 - d) > 10.0) return ShapeClass::line;
  }
  if (borders >= 2 && band_fit_iou(mask) >= config.band_fit) return ShapeClass::line;
  if (f.clipped()) return f.disk_fit_iou >= config.clipped_circle_fit ? ShapeClass::circle : ShapeClass::polygon;
  if (f.disk_fit_iou >= config.circle_certain) return ShapeClass::circle;
  if (f.disk_fit_iou < config.circle_fit) return ShapeClass::polygon;
  return f.disk_fit_iou > square_fit_iou(mask) ? ShapeClass::circle : ShapeClass::polygon;
}

/// Foreground pixels (far from the background color) grouped into
/// 8-connected components of near-uniform color. Components smaller than
/// config.min_component pixels are discarded.
inline std::vector<TexelRecord> segment_texels(const RasterImage& image, const DetectorConfig& config = {}) {
  const int W = image.width(), H = image.height();
  const ColorRGB bg = estimate_background(image);
  const double tau = config.background_distance;

  std::vector<std::int32_t> parent(std::size_t(W) * H, -1);
  auto find = [&](std::int32_t a) {
    while (parent[std::size_t(a)] != a) {
      parent[std::size_t(a)] = parent[std::size_t(parent[std::size_t(a)])];
      a = parent[std::size_t(a)];
    }
    return a;
  };
  auto unite = [&](std::int32_t a, std::int32_t b) {
    a = find(a), b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[std::size_t(a)] = b;  // smaller index is the root
  };

  std::vector<char> fg(parent.size(), 0);
  for (std::size_t i = 0; i < fg.size(); ++i) fg[i] = rgb_distance(image.pixels()[i], bg) > tau;

  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const auto i = std::int32_t(y * W + x);
      if (!fg[std::size_t(i)]) continue;
      parent[std::size_t(i)] = i;
      const ColorRGB c = image.at(x, y);
      // Already-visited neighbors: W, NW, N, NE.
      static constexpr std::array<int, 4> ox = {-1, -1, 0, 1}, oy = {0, -1, -1, -1};
      for (std::size_t k = 0; k < 4; ++k) {
        const int nx = x + ox[k], ny = y + oy[k];
        if (nx < 0 || ny < 0 || nx >= W) continue;
        const auto j = std::int32_t(ny * W + nx);
        if (fg[std::size_t(j)] && rgb_distance(c, image.at(nx, ny)) <= tau) unite(i, j);
      }
    }
  }

  struct Component {
    BBox box{};
    std::size_t count = 0;
    std::int32_t index = -1;
  };
  std::vector<std::int32_t> slot(parent.size(), -1);
  std::vector<Component> comps;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const std::size_t i = std::size_t(y) * W + x;
      if (!fg[i]) continue;
      const std::int32_t root = find(std::int32_t(i));
      std::int32_t& s = slot[std::size_t(root)];
      if (s < 0) {
        s = std::int32_t(comps.size());
        comps.push_back({BBox{x, y, x, y}, 0, root});
      }
      Component& c = comps[std::size_t(s)];
      c.box.x_min = std::min(c.box.x_min, x), c.box.x_max = std::max(c.box.x_max, x);
      c.box.y_max = std::max(c.box.y_max, y);
      ++c.count;
    }
  }

  std::vector<TexelRecord> out;
  for (const Component& c : comps) {
    if (c.count < config.min_component) continue;
    TexelRecord r;
    r.mask = BitMask(W, H, c.box);
    for (int y = c.box.y_min; y <= c.box.y_max; ++y)
      for (int x = c.box.x_min; x <= c.box.x_max; ++x) {
        const std::size_t i = std::size_t(y) * W + x;
        if (fg[i] && find(std::int32_t(i)) == c.index) r.mask.set(x, y);
      }
    r.bbox = c.box;
    r.centroid = mask_centroid(r.mask);
    r.shape_class = classify_shape(r.mask, config);
    r.confidence = 1.0;
    out.push_back(std::move(r));
  }
  return out;
}

/// Ground-truth texels as detector-style records (confidence 1).
inline std::vector<TexelRecord> ground_truth_records(const GroundTruth& gt) {
  std::vector<TexelRecord> out;
  out.reserve(gt.texels.size());
  for (const GroundTruthTexel& t : gt.texels) out.push_back({t.mask, t.bbox, t.centroid, t.shape_class, 1.0});
  return out;
}

struct DetectionScore {
  double ap = 0.0;    // mean over IoU thresholds
  double ap50 = 0.0;
  double ap75 = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0;  // at IoU 0.5
};

/// One-to-one matches between predictions and ground truth at an IoU threshold.
struct MatchResult {
  std::vector<int> pred_to_gt;  // -1 when unmatched
  std::size_t tp = 0;
};

namespace detail {

struct IouTable {
  // For each prediction, candidate ground-truth indices and IoU.
  std::vector<std::vector<std::pair<int, double>>> candidates;
};

inline IouTable iou_table(const std::vector<TexelRecord>& pred, const std::vector<BitMask>& gt) {
  IouTable t;
  t.candidates.resize(pred.size());
  std::vector<std::size_t> gt_area(gt.size());
  std::vector<BBox> gt_box(gt.size());
  for (std::size_t g = 0; g < gt.size(); ++g) {
    gt_area[g] = gt[g].count();
    gt_box[g] = gt_area[g] ? mask_to_bbox(gt[g]) : BBox{};
  }
  for (std::size_t p = 0; p < pred.size(); ++p) {
    const std::size_t pa = pred[p].mask.count();
    if (pa == 0) continue;
    const BBox pb = mask_to_bbox(pred[p].mask);
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (!gt_box[g].valid() || !intersect(pb, gt_box[g]).valid()) continue;
      const std::size_t inter = mask_intersection(pred[p].mask, gt[g]);
      if (inter == 0) continue;
      t.candidates[p].push_back({int(g), double(inter) / double(pa + gt_area[g] - inter)});
    }
  }
  return t;
}

/// Greedy matching in descending confidence (stable on input order); each
/// prediction takes the unmatched ground truth with the highest IoU.
inline MatchResult greedy_match(const std::vector<TexelRecord>& pred, const IouTable& table, std::size_t n_gt,
                                double threshold) {
  MatchResult m;
  m.pred_to_gt.assign(pred.size(), -1);
  std::vector<std::size_t> order(pred.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pred[a].confidence > pred[b].confidence; });
  std::vector<char> taken(n_gt, 0);
  for (std::size_t p : order) {
    int best = -1;
    double best_iou = threshold;
    for (auto [g, iou] : table.candidates[p]) {
      if (taken[std::size_t(g)] || iou < best_iou) continue;
      if (best < 0 || iou > best_iou) best = g, best_iou = iou;
    }
    if (best >= 0) {
      taken[std::size_t(best)] = 1;
      m.pred_to_gt[p] = best;
      ++m.tp;
    }
  }
  return m;
}

/// Area under the interpolated precision-recall curve. Predictions sharing
/// a confidence value form one operating point.
inline double average_precision(const std::vector<TexelRecord>& pred, const MatchResult& m, std::size_t n_gt) {
  if (n_gt == 0) return pred.empty() ? 1.0 : 0.0;
  if (pred.empty()) return 0.0;
  std::vector<std::size_t> order(pred.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pred[a].confidence > pred[b].confidence; });
  std::vector<std::pair<double, double>> points;  // (recall, precision)
  std::size_t tp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (m.pred_to_gt[order[k]] >= 0) ++tp;
    const bool last_of_level =
        k + 1 == order.size() || pred[order[k + 1]].confidence != pred[order[k]].confidence;
    if (last_of_level) points.push_back({double(tp) / double(n_gt), double(tp) / double(k + 1)});
  }
  for (std::size_t k = points.size(); k-- > 1;)
    points[k - 1].second = std::max(points[k - 1].second, points[k].second);
  double ap = 0.0, prev_recall = 0.0;
  for (auto [r, p] : points) {
    ap += (r - prev_recall) * p;
    prev_recall = r;
  }
  return ap;
}

}  // namespace detail

inline std::vector<double> coco_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(0.50 + 0.05 * i);
  return t;
}

/// Per-image detection quality. `ap` averages AP over `iou_thresholds`;
/// ap50/ap75 and the tp/fp/fn counts are always reported at 0.5 / 0.75.
inline DetectionScore evaluate_detection(const std::vector<TexelRecord>& pred, const std::vector<BitMask>& gt,
                                         const std::vector<double>& iou_thresholds = coco_iou_thresholds()) {
  const detail::IouTable table = detail::iou_table(pred, gt);
  auto ap_at = [&](double thr) {
    return detail::average_precision(pred, detail::greedy_match(pred, table, gt.size(), thr), gt.size());
  };
  DetectionScore s;
  double sum = 0.0;
  for (double t : iou_thresholds) sum += ap_at(t);
  s.ap = iou_thresholds.empty() ? 0.0 : sum / double(iou_thresholds.size());
  const MatchResult m50 = detail::greedy_match(pred, table, gt.size(), 0.5);
  s.ap50 = detail::average_precision(pred, m50, gt.size());
  s.ap75 = ap_at(0.75);
  s.tp = m50.tp;
  s.fp = pred.size() - m50.tp;
  s.fn = gt.size() - m50.tp;
  return s;
}

inline DetectionScore evaluate_detection(const std::vector<TexelRecord>& pred, const GroundTruth& gt,
                                         const std::vector<double>& iou_thresholds = coco_iou_thresholds()) {
  std::vector<BitMask> masks;
  masks.reserve(gt.texels.size());
  for (const auto& t : gt.texels) masks.push_back(t.mask);
  return evaluate_detection(pred, masks, iou_thresholds);
}

/// Matches at IoU > 0.5 between predictions and ground truth, for label
/// accuracy measurements.
inline MatchResult match_detections(const std::vector<TexelRecord>& pred, const GroundTruth& gt,
                                    double threshold = 0.5) {
  std::vector<BitMask> masks;
  for (const auto& t : gt.texels) masks.push_back(t.mask);
  return detail::greedy_match(pred, detail::iou_table(pred, masks), masks.size(), threshold);
}

}  // namespace texelatt
