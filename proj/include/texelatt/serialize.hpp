#pragma once

// JSON forms of the pipeline artifacts. Masks are stored as row runs
// {"width", "height", "runs": [[y, x, length], ...]}.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "texelatt/descriptor.hpp"
#include "texelatt/detect.hpp"
#include "texelatt/search.hpp"
#include "texelatt/synth.hpp"
#include "texelatt/texel_attr.hpp"

namespace texelatt {

using Json = nlohmann::json;

inline Json to_json(ColorRGB c) { return Json::array({c.r, c.g, c.b}); }

inline ColorRGB color_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw DataError("color must be [r, g, b]");
  auto channel = [](const Json& v) {
    const int x = v.get<int>();
    if (x < 0 || x > 255) throw DataError("color channel out of range");
    return std::uint8_t(x);
  };
  return {channel(j[0]), channel(j[1]), channel(j[2])};
}

inline Json to_json(Point2 p) { return Json::array({p.x, p.y}); }
inline Point2 point_from_json(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
inline Json to_json(Vector2 v) { return Json::array({v.dx, v.dy}); }
inline Vector2 vector_from_json(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
inline Json to_json(const BBox& b) { return Json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

inline BBox bbox_from_json(const Json& j) {
  return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(), j.at(3).get<int>()};
}

inline Json mask_to_json(const BitMask& mask) {
  Json runs = Json::array();
  const BBox& w = mask.window();
  if (w.valid()) {
    for (int y = w.y_min; y <= w.y_max; ++y) {
      int x = w.x_min;
      while (x <= w.x_max) {
        if (!mask.test(x, y)) {
          ++x;
          continue;
        }
        const int start = x;
        while (x <= w.x_max && mask.test(x, y)) ++x;
        runs.push_back(Json::array({y, start, x - start}));
      }
    }
  }
  return {{"width", mask.width()}, {"height", mask.height()}, {"runs", runs}};
}

inline BitMask mask_from_json(const Json& j) {
  const int width = j.at("width").get<int>(), height = j.at("height").get<int>();
  const Json& runs = j.at("runs");
  BBox box{width, height, -1, -1};
  for (const Json& r : runs) {
    const int y = r.at(0).get<int>(), x = r.at(1).get<int>(), len = r.at(2).get<int>();
    if (len < 1 || y < 0 || y >= height || x < 0 || x + len > width) throw DataError("mask run out of bounds");
    box.x_min = std::min(box.x_min, x), box.x_max = std::max(box.x_max, x + len - 1);
    box.y_min = std::min(box.y_min, y), box.y_max = std::max(box.y_max, y);
  }
  BitMask mask = box.valid() ? BitMask(width, height, box) : BitMask(width, height);
  for (const Json& r : runs) {
    const int y = r[0].get<int>(), x = r[1].get<int>(), len = r[2].get<int>();
    for (int k = 0; k < len; ++k) mask.set(x + k, y);
  }
  return mask;
}

inline Json to_json(const TexelShapeSpec& s) {
  Json j = {{"shape_class", to_string(s.shape_class)}, {"size", s.size}, {"orientation_deg", s.orientation_deg},
            {"color", to_json(s.color)}};
  if (s.shape_class == ShapeClass::polygon) {
    j["polygon_kind"] = to_string(s.polygon_kind);
    if (s.polygon_kind == PolygonKind::rectangle) j["aspect"] = s.aspect;
  }
  if (s.shape_class == ShapeClass::line) j["nonuniform_width"] = s.nonuniform_width;
  return j;
}

inline TexelShapeSpec shape_spec_from_json(const Json& j) {
  TexelShapeSpec s;
  s.shape_class = shape_class_from_string(j.at("shape_class").get<std::string>());
  s.size = j.at("size").get<double>();
  s.orientation_deg = j.at("orientation_deg").get<double>();
  s.color = color_from_json(j.at("color"));
  if (j.contains("polygon_kind")) s.polygon_kind = polygon_kind_from_string(j["polygon_kind"].get<std::string>());
  if (j.contains("aspect")) s.aspect = j["aspect"].get<double>();
  if (j.contains("nonuniform_width")) s.nonuniform_width = j["nonuniform_width"].get<bool>();
  return s;
}

inline Json to_json(const LayoutSpec& l) {
  Json j = {{"basis_u", to_json(l.basis_u)}, {"jitter_frac", l.jitter_frac}, {"phase", to_json(l.phase)}};
  j["basis_v"] = l.basis_v ? to_json(*l.basis_v) : Json(nullptr);
  return j;
}

inline LayoutSpec layout_spec_from_json(const Json& j) {
  LayoutSpec l;
  l.basis_u = vector_from_json(j.at("basis_u"));
  if (j.contains("basis_v") && !j["basis_v"].is_null()) l.basis_v = vector_from_json(j["basis_v"]);
  l.jitter_frac = j.at("jitter_frac").get<double>();
  l.phase = point_from_json(j.at("phase"));
  return l;
}

inline Json to_json(const TextureSpec& s) {
  Json groups = Json::array();
  for (const auto& g : s.groups) groups.push_back({{"shape", to_json(g.shape)}, {"layout", to_json(g.layout)}});
  // Seeds are 64-bit; stored as decimal strings so any JSON reader keeps them exact.
  return {{"width", s.width},
          {"height", s.height},
          {"background", to_json(s.background)},
          {"groups", groups},
          {"seed", std::to_string(s.seed)}};
}

inline TextureSpec texture_spec_from_json(const Json& j) {
  TextureSpec s;
  s.width = j.at("width").get<int>();
  s.height = j.at("height").get<int>();
  s.background = color_from_json(j.at("background"));
  for (const Json& g : j.at("groups")) s.groups.push_back({shape_spec_from_json(g.at("shape")), layout_spec_from_json(g.at("layout"))});
  s.seed = std::stoull(j.at("seed").get<std::string>());
  return s;
}

inline Json to_json(const GroundTruth& gt) {
  Json texels = Json::array();
  for (const auto& t : gt.texels) {
    texels.push_back({{"group", t.group},
                      {"centroid", to_json(t.centroid)},
                      {"bbox", to_json(t.bbox)},
                      {"mask", mask_to_json(t.mask)},
                      {"shape_class", to_string(t.shape_class)},
                      {"color", to_json(t.color)},
                      {"orientation_deg", t.orientation_deg ? Json(*t.orientation_deg) : Json(nullptr)},
                      {"area_px", t.area_px}});
  }
  Json layouts = Json::array();
  for (const auto& l : gt.layout_params) layouts.push_back(to_json(l));
  return {{"texels", texels}, {"layout_params", layouts}, {"spec", to_json(gt.spec)}};
}

inline GroundTruth ground_truth_from_json(const Json& j) {
  GroundTruth gt;
  for (const Json& t : j.at("texels")) {
    GroundTruthTexel x;
    x.group = t.at("group").get<int>();
    x.centroid = point_from_json(t.at("centroid"));
    x.bbox = bbox_from_json(t.at("bbox"));
    x.mask = mask_from_json(t.at("mask"));
    x.shape_class = shape_class_from_string(t.at("shape_class").get<std::string>());
    x.color = color_from_json(t.at("color"));
    if (!t.at("orientation_deg").is_null()) x.orientation_deg = t["orientation_deg"].get<double>();
    x.area_px = t.at("area_px").get<std::size_t>();
    gt.texels.push_back(std::move(x));
  }
  for (const Json& l : j.at("layout_params")) gt.layout_params.push_back(layout_spec_from_json(l));
  gt.spec = texture_spec_from_json(j.at("spec"));
  return gt;
}

inline Json to_json(const TexelAttributes& a) {
  return {{"shape_class", to_string(a.shape_class)},
          {"color_name", to_string(a.color_name)},
          {"color_rgb", to_json(a.color_rgb)},
          {"orientation_deg", a.orientation_deg ? Json(*a.orientation_deg) : Json(nullptr)},
          {"area_px", a.area_px}};
}

inline Json to_json(const TexelRecord& r) {
  return {{"mask", mask_to_json(r.mask)},
          {"bbox", to_json(r.bbox)},
          {"centroid", to_json(r.centroid)},
          {"shape_class", to_string(r.shape_class)},
          {"confidence", r.confidence}};
}

inline TexelRecord texel_record_from_json(const Json& j) {
  TexelRecord r;
  r.mask = mask_from_json(j.at("mask"));
  r.bbox = bbox_from_json(j.at("bbox"));
  r.centroid = point_from_json(j.at("centroid"));
  r.shape_class = shape_class_from_string(j.at("shape_class").get<std::string>());
  r.confidence = j.value("confidence", 1.0);
  return r;
}

inline Json to_json(const DetectionScore& s) {
  return {{"ap", s.ap}, {"ap50", s.ap50}, {"ap75", s.ap75}, {"tp", s.tp}, {"fp", s.fp}, {"fn", s.fn}};
}

inline Json to_json(const Descriptor& d) {
  Json labels = Json::array();
  for (const auto& l : descriptor_labels()) labels.push_back(l);
  return {{"values", d.values}, {"component_labels", labels}};
}

inline Descriptor descriptor_from_values(const Json& values) {
  if (!values.is_array() || values.size() != kDescriptorSize)
    throw DataError("descriptor must have " + std::to_string(kDescriptorSize) + " values");
  Descriptor d;
  for (std::size_t i = 0; i < kDescriptorSize; ++i) d[i] = values[i].get<double>();
  return d;
}

inline Json to_json(const NormalizationModel& m) {
  Json labels = Json::array();
  for (const auto& l : descriptor_labels()) labels.push_back(l);
  return {{"component_labels", labels}, {"mean", m.mean}, {"std", m.std}, {"corpus_size", m.corpus_size}};
}

inline NormalizationModel normalization_from_json(const Json& j) {
  NormalizationModel m;
  const Descriptor mean = descriptor_from_values(j.at("mean")), sd = descriptor_from_values(j.at("std"));
  m.mean = mean.values;
  m.std = sd.values;
  m.corpus_size = j.at("corpus_size").get<std::size_t>();
  return m;
}

inline Json to_json(const FeedbackConstraint& c) {
  return {{"ref_id", c.ref_id}, {"attribute", c.attribute}, {"relation", to_string(c.relation)}};
}

inline FeedbackConstraint constraint_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("constraint must be an object");
  return {j.at("ref_id").get<std::string>(), j.at("attribute").get<std::string>(),
          relation_from_string(j.at("relation").get<std::string>())};
}

/// Session state plus the per-round record; enough to replay the session.
inline Json session_transcript(const SearchSession& s) {
  Json rounds = Json::array();
  for (const auto& it : s.history()) {
    Json fb = Json::array();
    for (const auto& c : it.feedback) fb.push_back(to_json(c));
    rounds.push_back({{"feedback", fb},
                      {"reference_ids", it.reference_ids},
                      {"target_rank", it.target_rank},
                      {"percentile_rank", it.percentile_rank}});
  }
  const SessionOptions o = s.options();
  return {{"target_id", s.target_id()},
          {"page_size", o.page_size},
          {"max_iterations", o.max_iterations},
          {"tie_break", o.tie_break == TieBreak::id ? "id" : "slack_then_id"},
          {"iteration", s.iteration()},
          {"reference_ids", s.reference_ids()},
          {"target_rank", s.target_rank()},
          {"percentile_rank", s.percentile_rank()},
          {"found", s.found()},
          {"rounds", rounds}};
}

inline SessionOptions session_options_from_json(const Json& j) {
  SessionOptions o;
  o.page_size = j.value("page_size", kPageSize);
  o.max_iterations = j.value("max_iterations", kMaxIterations);
  const std::string tb = j.value("tie_break", std::string("id"));
  if (tb == "id") o.tie_break = TieBreak::id;
  else if (tb == "slack_then_id") o.tie_break = TieBreak::slack_then_id;
  else throw DataError("unknown tie_break policy: " + tb);
  return o;
}

inline SearchSession replay_transcript(std::shared_ptr<const SearchCorpus> corpus, const Json& transcript) {
  std::vector<std::vector<FeedbackConstraint>> rounds;
  for (const Json& r : transcript.at("rounds")) {
    std::vector<FeedbackConstraint> fb;
    for (const Json& c : r.at("feedback")) fb.push_back(constraint_from_json(c));
    rounds.push_back(std::move(fb));
  }
  return replay_session(std::move(corpus), transcript.at("target_id").get<std::string>(), rounds,
                        session_options_from_json(transcript));
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("write failed: " + path);
}

inline Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::exception& e) {
    throw DataError("malformed JSON in " + path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace texelatt
