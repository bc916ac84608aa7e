#pragma once

// On-disk corpora: generation, description, loading, oracle simulation and
// the binary classification tasks.
//
// Layout of a corpus directory:
//   manifest.json            ids, per-item seeds, constraints
//   <id>.png, <id>.json      image and ground truth
//   descriptors.jsonl        detected descriptors, one {"id","values"} per line
//   gt_descriptors.jsonl     descriptors computed from the annotations
//   normalization.json       Z-normalization fitted on detected descriptors
//   gt_normalization.json    same for the annotation descriptors

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>

#include "texelatt/descriptor.hpp"
#include "texelatt/png_io.hpp"
#include "texelatt/rank_eval.hpp"
#include "texelatt/search.hpp"
#include "texelatt/serialize.hpp"
#include "texelatt/synth.hpp"

namespace texelatt {

namespace fs = std::filesystem;

/// Tunable thresholds, overridable from a JSON file.
struct PipelineConfig {
  DetectorConfig detector;
  double gamma_fraction = 0.05;
  TieBreak tie_break = TieBreak::id;

  static PipelineConfig from_json(const Json& j) {
    static const std::vector<std::string> known = {"background_distance", "elongation",  "min_component",
                                                   "circle_fit",          "circle_certain", "clipped_circle_fit",
                                                   "band_fit",            "gamma_fraction", "tie_break"};
    if (!j.is_object()) throw DataError("config must be a JSON object");
    for (const auto& [key, value] : j.items())
      if (std::find(known.begin(), known.end(), key) == known.end()) throw DataError("unknown config key: " + key);
    PipelineConfig c;
    DetectorConfig& d = c.detector;
    d.background_distance = j.value("background_distance", d.background_distance);
    d.elongation = j.value("elongation", d.elongation);
    d.min_component = j.value("min_component", d.min_component);
    d.circle_fit = j.value("circle_fit", d.circle_fit);
    d.circle_certain = j.value("circle_certain", d.circle_certain);
    d.clipped_circle_fit = j.value("clipped_circle_fit", d.clipped_circle_fit);
    d.band_fit = j.value("band_fit", d.band_fit);
    c.gamma_fraction = j.value("gamma_fraction", c.gamma_fraction);
    if (!(c.gamma_fraction >= 0.0)) throw DataError("gamma_fraction must be >= 0");
    const std::string tb = j.value("tie_break", std::string("id"));
    if (tb == "id") c.tie_break = TieBreak::id;
    else if (tb == "slack_then_id") c.tie_break = TieBreak::slack_then_id;
    else throw DataError("tie_break must be \"id\" or \"slack_then_id\"");
    return c;
  }

  SessionOptions session_options() const {
    SessionOptions o;
    o.tie_break = tie_break;
    return o;
  }
};

/// Runs f(i) for i in [0, n) on `jobs` threads. The exception of the
/// smallest failing index is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& f) {
  jobs = std::max(1u, std::min<unsigned>(jobs, unsigned(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) failed_at = i, error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline std::string format_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return buf;
}

/// Writes through a temporary file so interrupted runs never leave a
/// truncated artifact behind.
inline void atomic_write(const fs::path& path, const std::string& bytes) {
  const fs::path tmp = path.string() + ".tmp";
  write_text_file(tmp.string(), bytes);
  fs::rename(tmp, path);
}

struct ManifestItem {
  std::string id;
  std::uint64_t seed = 0;
};

struct Manifest {
  std::uint64_t seed = 0;
  std::vector<std::string> constraints;
  int width = 512;
  int height = 512;
  std::vector<ManifestItem> items;

  Json to_json() const {
    Json items_j = Json::array();
    for (const auto& it : items) items_j.push_back({{"id", it.id}, {"seed", std::to_string(it.seed)}});
    return {{"seed", std::to_string(seed)},
            {"constraints", constraints},
            {"width", width},
            {"height", height},
            {"items", items_j}};
  }

  static Manifest from_json(const Json& j) {
    try {
      Manifest m;
      m.seed = std::stoull(j.at("seed").get<std::string>());
      m.constraints = j.at("constraints").get<std::vector<std::string>>();
      m.width = j.at("width").get<int>();
      m.height = j.at("height").get<int>();
      for (const Json& it : j.at("items"))
        m.items.push_back({it.at("id").get<std::string>(), std::stoull(it.at("seed").get<std::string>())});
      return m;
    } catch (const Json::exception& e) {
      throw DataError(std::string("malformed manifest: ") + e.what());
    }
  }
};

struct GenerateOptions {
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> constraints;
  SampleDomain domain;
  unsigned jobs = 1;
};

/// Generates count textures into `dir`; existing items are kept, so an
/// interrupted run resumes and a repeated run changes nothing.
inline Manifest generate_corpus(const fs::path& dir, const GenerateOptions& options) {
  const TaskConstraints constraints = TaskConstraints::parse(options.constraints);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create corpus directory " + dir.string());

  Manifest m;
  m.seed = options.seed;
  m.constraints = constraints.tokens();
  m.width = options.domain.width;
  m.height = options.domain.height;
  const fs::path manifest_path = dir / "manifest.json";
  if (fs::exists(manifest_path)) {
    const Manifest old = Manifest::from_json(read_json_file(manifest_path.string()));
    if (old.seed != m.seed || old.constraints != m.constraints || old.width != m.width || old.height != m.height)
      throw DataError("corpus at " + dir.string() + " was generated with different settings");
  }

  const Rng root(options.seed);
  for (std::size_t i = 0; i < options.count; ++i) m.items.push_back({format_id(i), root.fork(i).seed()});
  parallel_for(options.count, options.jobs, [&](std::size_t i) {
    const fs::path png = dir / (m.items[i].id + ".png"), ann = dir / (m.items[i].id + ".json");
    if (fs::exists(png) && fs::exists(ann)) return;
    Rng rng(m.items[i].seed);
    const GeneratedTexture t = generate_texture(sample_spec(rng, constraints, options.domain));
    const std::vector<unsigned char> bytes = encode_png(t.image);
    atomic_write(png, std::string(bytes.begin(), bytes.end()));
    atomic_write(ann, to_json(t.truth).dump() + "\n");
  });
  atomic_write(manifest_path, m.to_json().dump(2) + "\n");
  return m;
}

inline Manifest load_manifest(const fs::path& dir) {
  const fs::path p = dir / "manifest.json";
  if (!fs::exists(p)) throw DataError("no manifest.json in " + dir.string());
  return Manifest::from_json(read_json_file(p.string()));
}

inline std::string descriptor_row(const std::string& id, const Descriptor& d) {
  return Json{{"id", id}, {"values", d.values}}.dump() + "\n";
}

inline std::map<std::string, Descriptor> read_descriptor_table(const fs::path& path) {
  std::map<std::string, Descriptor> out;
  std::istringstream in(read_text_file(path.string()));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const Json j = Json::parse(line);
      out[j.at("id").get<std::string>()] = descriptor_from_values(j.at("values"));
    } catch (const Json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

struct DescribeOptions {
  PipelineConfig config;
  unsigned jobs = 1;
};

/// Detected and annotation descriptors for every manifest item, plus the
/// two normalization models.
inline void describe_corpus(const fs::path& dir, const DescribeOptions& options) {
  const Manifest m = load_manifest(dir);
  if (m.items.empty()) throw DataError("manifest empty");
  if (m.items.size() < 2) throw DataError("corpus needs at least 2 images to fit a normalization");
  std::vector<Descriptor> detected(m.items.size()), annotated(m.items.size());
  parallel_for(m.items.size(), options.jobs, [&](std::size_t i) {
    const std::string& id = m.items[i].id;
    const fs::path png = dir / (id + ".png"), ann = dir / (id + ".json");
    if (!fs::exists(png) || !fs::exists(ann)) throw DataError("missing image or annotation for " + id);
    const RasterImage image = load_png(png.string());
    GroundTruth gt;
    try {
      gt = ground_truth_from_json(read_json_file(ann.string()));
    } catch (const Json::exception& e) {
      throw DataError("malformed annotation " + ann.string() + ": " + e.what());
    }
    detected[i] = describe_image(image, options.config.detector);
    annotated[i] = describe_ground_truth(gt, image);
  });
  std::string rows, gt_rows;
  for (std::size_t i = 0; i < m.items.size(); ++i) {
    rows += descriptor_row(m.items[i].id, detected[i]);
    gt_rows += descriptor_row(m.items[i].id, annotated[i]);
  }
  atomic_write(dir / "descriptors.jsonl", rows);
  atomic_write(dir / "gt_descriptors.jsonl", gt_rows);
  atomic_write(dir / "normalization.json", to_json(fit_normalization(detected)).dump(2) + "\n");
  atomic_write(dir / "gt_normalization.json", to_json(fit_normalization(annotated)).dump(2) + "\n");
}

enum class AttributeSource { detected, ground_truth };

inline AttributeSource attribute_source_from_string(const std::string& s) {
  if (s == "detected") return AttributeSource::detected;
  if (s == "gt" || s == "ground_truth") return AttributeSource::ground_truth;
  throw std::invalid_argument("attribute source must be \"detected\" or \"gt\"");
}

/// Read-only view of a described corpus.
class CorpusStore {
 public:
  explicit CorpusStore(fs::path root) : root_(std::move(root)) {
    manifest_ = load_manifest(root_);
    for (const char* f : {"descriptors.jsonl", "gt_descriptors.jsonl", "normalization.json", "gt_normalization.json"})
      if (!fs::exists(root_ / f)) throw DataError(std::string("corpus not described: missing ") + f);
    detected_ = read_descriptor_table(root_ / "descriptors.jsonl");
    truth_ = read_descriptor_table(root_ / "gt_descriptors.jsonl");
    normalization_ = load_normalization("normalization.json");
    gt_normalization_ = load_normalization("gt_normalization.json");
    for (const auto& it : manifest_.items) {
      if (!detected_.count(it.id) || !truth_.count(it.id)) throw DataError("no descriptor row for " + it.id);
      if (!fs::exists(image_path(it.id)) || !fs::exists(annotation_path(it.id)))
        throw DataError("missing image or annotation for " + it.id);
    }
  }

  const fs::path& root() const { return root_; }
  const Manifest& manifest() const { return manifest_; }
  std::size_t size() const { return manifest_.items.size(); }
  bool contains(const std::string& id) const { return detected_.count(id) > 0; }
  fs::path image_path(const std::string& id) const { return root_ / (id + ".png"); }
  fs::path annotation_path(const std::string& id) const { return root_ / (id + ".json"); }

  const std::map<std::string, Descriptor>& descriptors(AttributeSource source) const {
    return source == AttributeSource::detected ? detected_ : truth_;
  }
  const NormalizationModel& normalization(AttributeSource source) const {
    return source == AttributeSource::detected ? normalization_ : gt_normalization_;
  }

  std::map<std::string, Descriptor> normalized(AttributeSource source) const {
    std::map<std::string, Descriptor> out;
    for (const auto& [id, d] : descriptors(source)) out[id] = normalization(source).apply(d);
    return out;
  }

  std::shared_ptr<const SearchCorpus> search_corpus(AttributeSource source, double gamma_fraction) const {
    return std::make_shared<const SearchCorpus>(normalized(source), gamma_fraction);
  }

 private:
  NormalizationModel load_normalization(const char* name) const {
    try {
      return normalization_from_json(read_json_file((root_ / name).string()));
    } catch (const Json::exception& e) {
      throw DataError(std::string("malformed ") + name + ": " + e.what());
    }
  }

  fs::path root_;
  Manifest manifest_;
  std::map<std::string, Descriptor> detected_, truth_;
  NormalizationModel normalization_, gt_normalization_;
};

/// `count` distinct ids drawn without replacement.
inline std::vector<std::string> sample_targets(const std::vector<std::string>& ids, std::size_t count,
                                               std::uint64_t seed) {
  if (count > ids.size()) throw std::invalid_argument("more sessions than images");
  std::vector<std::string> pool = ids;
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i)
    std::swap(pool[i], pool[std::size_t(rng.uniform_int(std::int64_t(i), std::int64_t(pool.size()) - 1))]);
  pool.resize(count);
  return pool;
}

struct SimulationReport {
  std::vector<double> mean_percentile_rank;  // index = iteration, 0..T
  double search_accuracy = 0.0;
  std::size_t monotone_sessions = 0;
  std::vector<SearchSession> sessions;

  Json to_json() const {
    Json transcripts = Json::array();
    for (const auto& s : sessions) transcripts.push_back(session_transcript(s));
    return {{"sessions", sessions.size()},
            {"search_accuracy", search_accuracy},
            {"mean_percentile_rank", mean_percentile_rank},
            {"monotone_sessions", monotone_sessions},
            {"transcripts", transcripts}};
  }
};

/// Oracle sessions on `search` answered from `truth`. Sessions that find
/// their target early keep their last percentile rank for later iterations.
inline SimulationReport simulate_search(std::shared_ptr<const SearchCorpus> search,
                                        const std::map<std::string, Descriptor>& truth, std::size_t sessions,
                                        std::uint64_t seed, const PipelineConfig& config = {}) {
  const OracleUser oracle(truth, config.gamma_fraction);
  SimulationReport r;
  r.mean_percentile_rank.assign(std::size_t(kMaxIterations) + 1, 0.0);
  for (const std::string& target : sample_targets(search->ids(), sessions, seed)) {
    SearchSession s(search, target, config.session_options());
    std::vector<double> curve = {s.percentile_rank()};
    simulate_session(s, oracle);
    for (const auto& it : s.history()) curve.push_back(it.percentile_rank);
    bool monotone = true;
    for (std::size_t k = 1; k < curve.size(); ++k) monotone = monotone && curve[k] >= curve[k - 1];
    r.monotone_sessions += monotone;
    curve.resize(r.mean_percentile_rank.size(), curve.back());
    for (std::size_t k = 0; k < curve.size(); ++k) r.mean_percentile_rank[k] += curve[k] / double(sessions);
    r.sessions.push_back(std::move(s));
  }
  r.search_accuracy = search_accuracy(r.sessions);
  return r;
}

struct RankRow {
  std::string attribute;
  double gamma = 0.0;
  RankingAccuracy accuracy;
};

/// Ranking accuracy of `predicted` against the gamma-thresholded order of
/// `truth`, for each descriptor component (raw, unnormalized values).
inline std::vector<RankRow> rank_eval_table(const std::map<std::string, Descriptor>& predicted,
                                            const std::map<std::string, Descriptor>& truth,
                                            double gamma_fraction = 0.05,
                                            const std::vector<std::string>& attributes = {}) {
  const std::vector<std::string> labels =
      attributes.empty() ? std::vector<std::string>(descriptor_labels().begin(), descriptor_labels().end()) : attributes;
  std::vector<RankRow> rows;
  for (const std::string& label : labels) {
    const std::size_t a = attribute_index(label);
    AttributeColumn column;
    column.attribute_name = label;
    std::map<std::string, double> pred;
    for (const auto& [id, d] : truth) {
      const auto it = predicted.find(id);
      if (it == predicted.end()) throw DataError("no predicted descriptor for " + id);
      column.ids.push_back(id);
      column.values.push_back(d[a]);
      pred[id] = it->second[a];
    }
    column.gamma = gamma_from_range(column.values, gamma_fraction);
    rows.push_back({label, column.gamma, ranking_accuracy(pred, ground_truth_order(column))});
  }
  return rows;
}

/// A two-class texture task: each class cycles through its variants.
struct BinaryTask {
  std::string name;
  std::vector<std::vector<std::string>> class0, class1;
  double floor = 0.0;
};

inline std::vector<BinaryTask> binary_tasks() {
  return {
      {"line_uniformity", {{"line", "uniform"}}, {{"line", "nonuniform"}}, 0.85},
      {"circle_positioning",
       {{"circle", "regular", "mono"}, {"circle", "regular", "bi-color"}},
       {{"circle", "jittered", "mono"}, {"circle", "jittered", "bi-color"}},
       0.90},
      {"circle_coloring",
       {{"circle", "mono", "regular"}, {"circle", "mono", "jittered"}},
       {{"circle", "bi-color", "regular"}, {"circle", "bi-color", "jittered"}},
       0.90},
  };
}

struct TaskResult {
  std::string name;
  double accuracy = 0.0;
  double floor = 0.0;
  std::size_t images = 0;
};

/// Generates `images` textures (classes alternate), describes them with
/// detection, normalizes over the task set and cross-validates the
/// linear classifier.
inline TaskResult run_binary_task(const BinaryTask& task, std::size_t images, std::uint64_t seed,
                                  const PipelineConfig& config = {}, unsigned jobs = 1, int folds = 5) {
  std::vector<Descriptor> descriptors(images);
  std::vector<int> labels(images);
  const Rng root(seed);
  parallel_for(images, jobs, [&](std::size_t i) {
    const int label = int(i % 2);
    const auto& variants = label ? task.class1 : task.class0;
    const auto& tokens = variants[(i / 2) % variants.size()];
    Rng rng = root.fork(i);
    const GeneratedTexture t = generate_texture(sample_spec(rng, TaskConstraints::parse(tokens)));
    descriptors[i] = describe_image(t.image, config.detector);
    labels[i] = label;
  });
  const NormalizationModel norm = fit_normalization(descriptors);
  std::vector<std::vector<double>> x;
  for (const auto& d : descriptors) {
    const Descriptor n = norm.apply(d);
    x.emplace_back(n.values.begin(), n.values.end());
  }
  return {task.name, train_linear(x, labels, folds, seed), task.floor, images};
}

}  // namespace texelatt
