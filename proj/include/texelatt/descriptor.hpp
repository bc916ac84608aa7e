#pragma once

// The 36-component texture descriptor: texel grouping, the individual and
// layout attribute blocks, the background color, and corpus Z-normalization.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "texelatt/color.hpp"
#include "texelatt/layout_stats.hpp"
#include "texelatt/texel_attr.hpp"

namespace texelatt {

inline constexpr std::size_t kDescriptorSize = 36;
inline constexpr std::size_t kMinGroupSize = 10;

/// Offsets of the descriptor blocks.
namespace slot {
inline constexpr std::size_t label = 0;            // 3
inline constexpr std::size_t color = 3;            // 11
inline constexpr std::size_t texel_orientation = 14;  // 3
inline constexpr std::size_t texel_area = 17;
inline constexpr std::size_t density = 18;
inline constexpr std::size_t homogeneity = 19;
inline constexpr std::size_t vector_orientation = 20;  // 3
inline constexpr std::size_t local_symmetry = 23;
inline constexpr std::size_t translational_symmetry = 24;
inline constexpr std::size_t background = 25;      // 11
}  // namespace slot

inline const std::array<std::string, kDescriptorSize>& descriptor_labels() {
  static const std::array<std::string, kDescriptorSize> labels = [] {
    std::array<std::string, kDescriptorSize> l;
    std::size_t i = 0;
    for (ShapeClass c : kShapeClasses) l[i++] = "label_" + std::string(to_string(c));
    for (ColorName n : kColorNames) l[i++] = "color_" + std::string(to_string(n));
    for (const char* b : {"0_60", "60_120", "120_180"}) l[i++] = std::string("texel_orientation_") + b;
    l[i++] = "texel_area";
    l[i++] = "density";
    l[i++] = "homogeneity";
    for (const char* b : {"0_60", "60_120", "120_180"}) l[i++] = std::string("vector_orientation_") + b;
    l[i++] = "local_symmetry";
    l[i++] = "translational_symmetry";
    for (ColorName n : kColorNames) l[i++] = "background_" + std::string(to_string(n));
    return l;
  }();
  return labels;
}

/// Index of a component label; throws std::out_of_range for unknown labels.
inline std::size_t descriptor_index(const std::string& label) {
  const auto& labels = descriptor_labels();
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return i;
  throw std::out_of_range("unknown attribute: " + label);
}

/// Human-readable meaning of each component, for interactive search.
inline const std::array<std::string, kDescriptorSize>& descriptor_descriptions() {
  static const std::array<std::string, kDescriptorSize> text = [] {
    std::array<std::string, kDescriptorSize> d;
    std::size_t i = 0;
    d[i++] = "Share of texels that are round dots";
    d[i++] = "Share of texels that are bands or stripes";
    d[i++] = "Share of texels that are squares, triangles or rectangles";
    for (ColorName n : kColorNames) d[i++] = "Share of texels colored " + std::string(to_string(n));
    d[i++] = "Share of elongated texels pointing roughly horizontally (0-60 degrees)";
    d[i++] = "Share of elongated texels pointing roughly vertically (60-120 degrees)";
    d[i++] = "Share of elongated texels pointing along the other diagonal (120-180 degrees)";
    d[i++] = "How big the texels are";
    d[i++] = "How many texels per unit of image area (bands per unit of length)";
    d[i++] = "How unevenly texels are spread over the image (higher is less even)";
    d[i++] = "Share of neighbor-to-neighbor steps running at 0-60 degrees";
    d[i++] = "Share of neighbor-to-neighbor steps running at 60-120 degrees";
    d[i++] = "Share of neighbor-to-neighbor steps running at 120-180 degrees";
    d[i++] = "How far nearby texels are from mirror-symmetric placement (0 is perfectly symmetric)";
    d[i++] = "How far the layout is from repeating by the same step everywhere (0 is a perfect lattice)";
    for (ColorName n : kColorNames) d[i++] = "Background is " + std::string(to_string(n));
    return d;
  }();
  return text;
}

/// Block each component belongs to: "individual", "layout" or "background".
inline std::string descriptor_block(std::size_t index) {
  if (index < slot::density) return "individual";
  if (index < slot::background) return "layout";
  return "background";
}

struct DescribedTexel {
  TexelRecord record;
  TexelAttributes attributes;
};

struct TexelGroup {
  ShapeClass shape_class = ShapeClass::circle;
  std::vector<DescribedTexel> members;
};

struct Descriptor {
  std::array<double, kDescriptorSize> values{};

  static const std::array<std::string, kDescriptorSize>& component_labels() { return descriptor_labels(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

/// One group per shape class present, in class order; groups with fewer
/// than kMinGroupSize members are dropped.
inline std::vector<TexelGroup> group_texels(const std::vector<DescribedTexel>& texels) {
  std::vector<TexelGroup> groups;
  for (ShapeClass c : kShapeClasses) {
    TexelGroup g;
    g.shape_class = c;
    for (const auto& t : texels)
      if (t.attributes.shape_class == c) g.members.push_back(t);
    if (g.members.size() >= kMinGroupSize) groups.push_back(std::move(g));
  }
  return groups;
}

/// Layout attributes of one group: bands use the 1D projection, other
/// shapes the centroid pattern over the image window.
inline LayoutAttributes group_layout(const TexelGroup& group, int width, int height) {
  if (group.shape_class == ShapeClass::line) {
    // Bands too small to have a measurable direction take the mean
    // direction of the others.
    std::vector<LineTexel> known;
    for (const auto& m : group.members)
      if (m.attributes.orientation_deg) known.push_back({m.record.centroid, *m.attributes.orientation_deg});
    const double axis = known.empty() ? 0.0 : detail::axial_mean_deg(known);
    std::vector<LineTexel> lines;
    for (const auto& m : group.members)
      lines.push_back({m.record.centroid, m.attributes.orientation_deg.value_or(axis)});
    return line_layout_attributes(lines, double(width), double(height));
  }
  PointPattern p;
  p.width = double(width);
  p.height = double(height);
  for (const auto& m : group.members) p.points.push_back(m.record.centroid);
  return layout_attributes(p);
}

inline Descriptor build_descriptor(const std::vector<TexelGroup>& groups, const RasterImage& image, ColorRGB background) {
  Descriptor d;
  d[slot::background + std::size_t(color_name(background))] = 1.0;

  std::size_t members = 0, oriented = 0;
  double area_sum = 0.0;
  for (const auto& g : groups) {
    for (const auto& m : g.members) {
      ++members;
      d[slot::label + std::size_t(g.shape_class)] += 1.0;
      d[slot::color + std::size_t(m.attributes.color_name)] += 1.0;
      area_sum += double(m.attributes.area_px);
      if (m.attributes.orientation_deg) {
        ++oriented;
        const int bin = std::min(2, int(*m.attributes.orientation_deg / 60.0));
        d[slot::texel_orientation + std::size_t(bin)] += 1.0;
      }
    }
  }
  if (members == 0) return d;
  for (std::size_t i = 0; i < 3; ++i) d[slot::label + i] /= double(members);
  for (std::size_t i = 0; i < kColorNameCount; ++i) d[slot::color + i] /= double(members);
  if (oriented > 0)
    for (std::size_t i = 0; i < 3; ++i) d[slot::texel_orientation + i] /= double(oriented);
  d[slot::texel_area] = area_sum / double(members);

  // Layout block: member-count weighted mean over groups.
  for (const auto& g : groups) {
    const double w = double(g.members.size()) / double(members);
    const LayoutAttributes a = group_layout(g, image.width(), image.height());
    d[slot::density] += w * a.density;
    d[slot::homogeneity] += w * a.homogeneity;
    for (std::size_t i = 0; i < 3; ++i) d[slot::vector_orientation + i] += w * a.orientation_hist[i];
    d[slot::local_symmetry] += w * a.local_symmetry;
    d[slot::translational_symmetry] += w * a.translational_symmetry;
  }
  return d;
}

/// Detection, attributes, grouping and descriptor for one image.
inline Descriptor describe_image(const RasterImage& image, const DetectorConfig& config = {}) {
  std::vector<DescribedTexel> texels;
  for (auto& r : segment_texels(image, config)) {
    TexelAttributes a = describe_texel(r, image);
    texels.push_back({std::move(r), a});
  }
  return build_descriptor(group_texels(texels), image, estimate_background(image));
}

/// Same pipeline on ground-truth annotations instead of detections.
inline Descriptor describe_ground_truth(const GroundTruth& gt, const RasterImage& image) {
  std::vector<DescribedTexel> texels;
  for (const auto& t : gt.texels) {
    TexelRecord r{t.mask, t.bbox, t.centroid, t.shape_class, 1.0};
    TexelAttributes a = describe_texel(r, image);
    texels.push_back({std::move(r), a});
  }
  return build_descriptor(group_texels(texels), image, gt.spec.background);
}

struct NormalizationModel {
  std::array<double, kDescriptorSize> mean{};
  std::array<double, kDescriptorSize> std{};
  std::size_t corpus_size = 0;

  Descriptor apply(const Descriptor& d) const {
    Descriptor out;
    for (std::size_t i = 0; i < kDescriptorSize; ++i) out[i] = std[i] > 0.0 ? (d[i] - mean[i]) / std[i] : 0.0;
    return out;
  }
};

/// Per-component mean and population standard deviation.
inline NormalizationModel fit_normalization(const std::vector<Descriptor>& corpus) {
  if (corpus.size() < 2) throw std::invalid_argument("fit_normalization: corpus needs at least 2 descriptors");
  NormalizationModel m;
  m.corpus_size = corpus.size();
  const double n = double(corpus.size());
  for (std::size_t i = 0; i < kDescriptorSize; ++i) {
    double s = 0.0;
    for (const auto& d : corpus) s += d[i];
    m.mean[i] = s / n;
    double v = 0.0;
    for (const auto& d : corpus) v += (d[i] - m.mean[i]) * (d[i] - m.mean[i]);
    m.std[i] = std::sqrt(v / n);
    // Values that are equal up to rounding count as constant.
    if (m.std[i] <= 1e-12 * std::max(1.0, std::fabs(m.mean[i]))) m.std[i] = 0.0;
  }
  return m;
}

inline Descriptor apply_normalization(const NormalizationModel& model, const Descriptor& d) { return model.apply(d); }

}  // namespace texelatt
