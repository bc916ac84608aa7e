#pragma once

// Uniform-grid index for nearest-neighbor queries on small point sets.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "texelatt/core.hpp"

namespace texelatt {

class GridIndex {
 public:
  explicit GridIndex(const std::vector<Point2>& points) : points_(points) {
    if (points_.empty()) return;
    double x0 = points_[0].x, x1 = x0, y0 = points_[0].y, y1 = y0;
    for (Point2 p : points_) {
      x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
    }
    origin_ = {x0, y0};
    const double span = std::max({x1 - x0, y1 - y0, 1e-9});
    // About two points per cell on average.
    const double side = std::max(1.0, std::sqrt(double(points_.size()) / 2.0));
    cell_ = span / side;
    nx_ = int((x1 - x0) / cell_) + 1;
    ny_ = int((y1 - y0) / cell_) + 1;
    start_.assign(std::size_t(nx_) * ny_ + 1, 0);
    std::vector<std::size_t> cell_of(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      cell_of[i] = cell_index(points_[i]);
      ++start_[cell_of[i] + 1];
    }
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
    items_.resize(points_.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points_.size(); ++i) items_[fill[cell_of[i]]++] = i;
  }

  std::size_t size() const { return points_.size(); }
  const std::vector<Point2>& points() const { return points_; }

  /// Distance from q to the closest indexed point.
  double nearest_distance(Point2 q) const {
    double best = std::numeric_limits<double>::infinity();
    visit_rings(q, [&](std::size_t i) { best = std::min(best, distance(q, points_[i])); },
                [&](double covered) { return best <= covered; });
    return best;
  }

  /// The k nearest points to points[self], excluding self, ordered by
  /// distance then index. Points tied with the k-th distance (within tol)
  /// are included as well.
  std::vector<std::size_t> knn(std::size_t self, std::size_t k, double tol = 1e-9) const {
    const Point2 q = points_[self];
    std::vector<std::pair<double, std::size_t>> cand;
    auto kth = [&]() {
      if (cand.size() < k) return std::numeric_limits<double>::infinity();
      std::nth_element(cand.begin(), cand.begin() + std::ptrdiff_t(k - 1), cand.end());
      return cand[k - 1].first;
    };
    visit_rings(q, [&](std::size_t i) {
      if (i != self) cand.push_back({distance(q, points_[i]), i});
    }, [&](double covered) { return kth() + tol < covered; });
    std::sort(cand.begin(), cand.end());
    std::vector<std::size_t> out;
    if (cand.empty() || k == 0) return out;
    const double limit = cand[std::min(k, cand.size()) - 1].first + tol;
    for (const auto& [d, i] : cand) {
      if (out.size() >= k && d > limit) break;
      out.push_back(i);
    }
    return out;
  }

 private:
  std::size_t cell_index(Point2 p) const {
    const int cx = std::clamp(int((p.x - origin_.x) / cell_), 0, nx_ - 1);
    const int cy = std::clamp(int((p.y - origin_.y) / cell_), 0, ny_ - 1);
    return std::size_t(cy) * nx_ + cx;
  }

  // Visits cells ring by ring around q until done(covered) is true, where
  // every unvisited point is at least `covered` away from q.
  template <class Visit, class Done>
  void visit_rings(Point2 q, Visit&& visit, Done&& done) const {
    if (points_.empty()) return;
    const int qx = int(std::floor((q.x - origin_.x) / cell_));
    const int qy = int(std::floor((q.y - origin_.y) / cell_));
    const int max_ring = std::max({std::abs(qx), std::abs(qy), std::abs(nx_ - 1 - qx), std::abs(ny_ - 1 - qy)}) + 1;
    for (int r = 0; r <= max_ring; ++r) {
      for (int cy = qy - r; cy <= qy + r; ++cy) {
        if (cy < 0 || cy >= ny_) continue;
        const bool edge_row = cy == qy - r || cy == qy + r;
        for (int cx = qx - r; cx <= qx + r; cx += (edge_row ? 1 : 2 * r)) {
          if (cx >= 0 && cx < nx_) {
            const std::size_t c = std::size_t(cy) * nx_ + cx;
            for (std::size_t j = start_[c]; j < start_[c + 1]; ++j) visit(items_[j]);
          }
          if (r == 0) break;
        }
      }
      // Distance from q to the outside of the visited square of cells.
      const double covered = std::min({q.x - (origin_.x + (qx - r) * cell_), origin_.x + (qx + r + 1) * cell_ - q.x,
                                       q.y - (origin_.y + (qy - r) * cell_), origin_.y + (qy + r + 1) * cell_ - q.y});
      if (done(covered)) return;
    }
  }

  std::vector<Point2> points_;
  Point2 origin_{};
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> items_;
};

}  // namespace texelatt
