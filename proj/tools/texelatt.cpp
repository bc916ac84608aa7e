// texelatt command-line tool.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "texelatt/service.hpp"
#include "texelatt/texelatt.hpp"

using namespace texelatt;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string corpus = "corpus";
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string config_path;

  PipelineConfig config() const {
    return config_path.empty() ? PipelineConfig{} : PipelineConfig::from_json(read_json_file(config_path));
  }
};

void emit(const Json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json_file(path, j);
  }
}

GroundTruth load_ground_truth(const std::string& path) {
  try {
    return ground_truth_from_json(read_json_file(path));
  } catch (const Json::exception& e) {
    throw DataError("malformed annotation " + path + ": " + e.what());
  }
}

int cmd_generate(const Globals& g, std::size_t count, const std::vector<std::string>& constraints, int width,
                 int height) {
  GenerateOptions o;
  o.count = count;
  o.seed = g.seed;
  o.constraints = constraints;
  o.domain.width = width;
  o.domain.height = height;
  o.jobs = g.jobs;
  const Manifest m = generate_corpus(g.corpus, o);
  std::printf("%zu textures in %s\n", m.items.size(), g.corpus.c_str());
  return 0;
}

int cmd_detect(const Globals& g, const std::string& image_path, const std::string& out) {
  const RasterImage image = load_png(image_path);
  Json list = Json::array();
  for (const auto& r : segment_texels(image, g.config().detector)) {
    Json j = to_json(r);
    j["attributes"] = to_json(describe_texel(r, image));
    list.push_back(std::move(j));
  }
  emit(list, out);
  return 0;
}

int cmd_evaluate(const Globals& g, const std::string& pred_path, const std::string& gt_path, const std::string& out) {
  if (!pred_path.empty()) {
    if (gt_path.empty()) throw std::invalid_argument("evaluate: need both a prediction file and a ground-truth file");
    const Json pred_j = read_json_file(pred_path);
    if (!pred_j.is_array()) throw DataError("prediction file must hold a JSON list of texel records");
    std::vector<TexelRecord> pred;
    try {
      for (const Json& r : pred_j) pred.push_back(texel_record_from_json(r));
    } catch (const Json::exception& e) {
      throw DataError(std::string("malformed prediction: ") + e.what());
    }
    emit(to_json(evaluate_detection(pred, load_ground_truth(gt_path))), out);
    return 0;
  }
  // Whole corpus: mean per-image scores and class accuracy on matched texels.
  const Manifest m = load_manifest(g.corpus);
  if (m.items.empty()) throw DataError("manifest empty");
  const PipelineConfig config = g.config();
  std::vector<DetectionScore> scores(m.items.size());
  std::vector<std::size_t> matched(m.items.size()), correct(m.items.size());
  parallel_for(m.items.size(), g.jobs, [&](std::size_t i) {
    const fs::path dir(g.corpus);
    const RasterImage image = load_png((dir / (m.items[i].id + ".png")).string());
    const GroundTruth gt = load_ground_truth((dir / (m.items[i].id + ".json")).string());
    const auto pred = segment_texels(image, config.detector);
    scores[i] = evaluate_detection(pred, gt);
    const MatchResult mr = match_detections(pred, gt);
    for (std::size_t p = 0; p < pred.size(); ++p) {
      if (mr.pred_to_gt[p] < 0) continue;
      ++matched[i];
      correct[i] += pred[p].shape_class == gt.texels[std::size_t(mr.pred_to_gt[p])].shape_class;
    }
  });
  double ap = 0, ap50 = 0, ap75 = 0;
  std::size_t n_matched = 0, n_correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    ap += scores[i].ap, ap50 += scores[i].ap50, ap75 += scores[i].ap75;
    n_matched += matched[i], n_correct += correct[i];
  }
  const double n = double(scores.size());
  emit({{"images", scores.size()},
        {"mean_ap", ap / n},
        {"mean_ap50", ap50 / n},
        {"mean_ap75", ap75 / n},
        {"matched_texels", n_matched},
        {"shape_accuracy", n_matched ? double(n_correct) / double(n_matched) : 0.0}},
       out);
  return 0;
}

int cmd_describe(const Globals& g, const std::string& image_path, const std::string& out) {
  if (!image_path.empty()) {
    emit(to_json(describe_image(load_png(image_path), g.config().detector)), out);
    return 0;
  }
  describe_corpus(g.corpus, {g.config(), g.jobs});
  std::printf("described %s\n", g.corpus.c_str());
  return 0;
}

int cmd_rank_eval(const Globals& g, std::string predicted, std::string truth, const std::vector<std::string>& attributes,
                  const std::string& json_out) {
  if (predicted.empty()) predicted = (fs::path(g.corpus) / "descriptors.jsonl").string();
  if (truth.empty()) truth = (fs::path(g.corpus) / "gt_descriptors.jsonl").string();
  const auto rows =
      rank_eval_table(read_descriptor_table(predicted), read_descriptor_table(truth), g.config().gamma_fraction, attributes);
  Json table = Json::array();
  std::printf("%-28s %10s %10s %10s %9s %9s\n", "attribute", "combined", "ordered", "gamma", "ordered#", "unordered#");
  for (const auto& r : rows) {
    std::printf("%-28s %10.4f %10.4f %10.4g %9zu %9zu\n", r.attribute.c_str(), r.accuracy.combined,
                r.accuracy.ordered_only, r.gamma, r.accuracy.ordered_pairs, r.accuracy.unordered_pairs);
    table.push_back({{"attribute", r.attribute},
                     {"combined", r.accuracy.combined},
                     {"ordered_only", r.accuracy.ordered_only},
                     {"gamma", r.gamma},
                     {"ordered_pairs", r.accuracy.ordered_pairs},
                     {"unordered_pairs", r.accuracy.unordered_pairs}});
  }
  if (!json_out.empty()) write_json_file(json_out, table);
  return 0;
}

int cmd_classify_tasks(const Globals& g, std::size_t images, const std::string& only, const std::string& json_out) {
  const PipelineConfig config = g.config();
  Json table = Json::array();
  bool any = false;
  for (const auto& task : binary_tasks()) {
    if (!only.empty() && task.name != only) continue;
    any = true;
    const TaskResult r = run_binary_task(task, images, g.seed, config, g.jobs);
    std::printf("%-20s accuracy %.4f (floor %.2f, %zu images)\n", r.name.c_str(), r.accuracy, r.floor, r.images);
    table.push_back({{"task", r.name}, {"accuracy", r.accuracy}, {"floor", r.floor}, {"images", r.images}});
  }
  if (!any) throw std::invalid_argument("unknown task: " + only);
  if (!json_out.empty()) write_json_file(json_out, table);
  return 0;
}

int cmd_simulate(const Globals& g, std::size_t sessions, const std::string& source, const std::string& out) {
  const PipelineConfig config = g.config();
  const CorpusStore store(g.corpus);
  const AttributeSource src = attribute_source_from_string(source);
  const SimulationReport r = simulate_search(store.search_corpus(src, config.gamma_fraction),
                                             store.descriptors(AttributeSource::ground_truth), sessions, g.seed, config);
  std::printf("sessions %zu  search accuracy %.4f  monotone %zu/%zu\n", sessions, r.search_accuracy, r.monotone_sessions,
              sessions);
  std::printf("mean percentile rank by iteration:");
  for (double p : r.mean_percentile_rank) std::printf(" %.4f", p);
  std::printf("\n");
  if (!out.empty()) write_json_file(out, r.to_json());
  return 0;
}

int cmd_serve(const Globals& g, const std::string& host, const std::string& state_dir, const std::string& webui,
              long ttl, const std::string& source) {
  const CorpusStore store(g.corpus);
  ServiceOptions o;
  o.state_dir = state_dir;
  o.webui_dir = webui;
  o.idle_ttl = std::chrono::seconds(ttl);
  o.source = attribute_source_from_string(source);
  o.config = g.config();
  o.seed = g.seed;
  SearchService service(store, o);
  const int port = service.bind(host, service_port_from_env());
  std::printf("serving %s on http://%s:%d\n", g.corpus.c_str(), host.c_str(), port);
  std::fflush(stdout);
  return service.listen_after_bind() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Element-based texture attributes: generation, detection, description, evaluation and search"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--corpus", g.corpus, "Corpus directory")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Parallel workers for image processing")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config_path, "JSON file overriding thresholds")->check(CLI::ExistingFile);

  std::size_t count = 0;
  std::vector<std::string> constraints;
  int width = 512, height = 512;
  auto* gen = app.add_subcommand("generate", "Generate annotated textures into the corpus");
  gen->add_option("--count", count, "Number of textures")->required();
  gen->add_option("--constraints", constraints, "Tokens: circle line polygon regular jittered mono bi-color uniform "
                                                "nonuniform separated none");
  gen->add_option("--width", width, "Image width")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--height", height, "Image height")->check(CLI::PositiveNumber)->capture_default_str();

  std::string image, out;
  auto* det = app.add_subcommand("detect", "Detect texels in one image; prints texel records");
  det->add_option("image", image, "PNG image")->required()->check(CLI::ExistingFile);
  det->add_option("--out", out, "Output file (default stdout)");

  std::string pred_path, gt_path;
  auto* eval = app.add_subcommand("evaluate", "Score detections against ground truth (one image or the corpus)");
  eval->add_option("prediction", pred_path, "Texel record list from detect")->check(CLI::ExistingFile);
  eval->add_option("truth", gt_path, "Ground-truth annotation")->check(CLI::ExistingFile);
  eval->add_option("--out", out, "Output file (default stdout)");

  auto* desc = app.add_subcommand("describe", "Descriptor of one image, or of every corpus image");
  desc->add_option("image", image, "PNG image (omit to describe the corpus)")->check(CLI::ExistingFile);
  desc->add_option("--out", out, "Output file for single images (default stdout)");

  std::string predicted, truth, json_out;
  std::vector<std::string> attributes;
  auto* rank = app.add_subcommand("rank-eval", "Ranking accuracy of predicted against ground-truth attributes");
  rank->add_option("--predicted", predicted, "Descriptor table (default corpus descriptors.jsonl)");
  rank->add_option("--truth", truth, "Ground-truth table (default corpus gt_descriptors.jsonl)");
  rank->add_option("--attributes", attributes, "Component labels (default all)");
  rank->add_option("--json", json_out, "Also write the table as JSON");

  std::size_t images = 200;
  std::string task;
  auto* tasks = app.add_subcommand("classify-tasks", "Cross-validated accuracy on the binary texture tasks");
  tasks->add_option("--images", images, "Images per task")->capture_default_str()->check(CLI::Range(10, 1000000));
  tasks->add_option("--task", task, "Run a single task");
  tasks->add_option("--json", json_out, "Also write the results as JSON");

  std::size_t sessions = 100;
  std::string source = "gt";
  auto* sim = app.add_subcommand("simulate-search", "Oracle search sessions over the corpus");
  sim->add_option("--sessions", sessions, "Number of sessions")->capture_default_str();
  sim->add_option("--attributes", source, "Engine attributes: gt or detected")->capture_default_str();
  sim->add_option("--out", out, "Report with per-session transcripts");

  std::string host = "127.0.0.1", state_dir = "texelatt-sessions", webui;
  long ttl = 3600;
  std::string serve_source = "detected";
  auto* serve = app.add_subcommand("serve", "HTTP search service (port from TEXELATT_PORT, default 8080)");
  serve->add_option("--host", host, "Listen address")->capture_default_str();
  serve->add_option("--state-dir", state_dir, "Session transcript directory")->capture_default_str();
  serve->add_option("--webui", webui, "Static web UI directory")->check(CLI::ExistingDirectory);
  serve->add_option("--ttl", ttl, "Idle seconds before a session expires")->capture_default_str();
  serve->add_option("--attributes", serve_source, "Engine attributes: detected or gt")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) return cmd_generate(g, count, constraints, width, height);
    if (*det) return cmd_detect(g, image, out);
    if (*eval) return cmd_evaluate(g, pred_path, gt_path, out);
    if (*desc) return cmd_describe(g, image, out);
    if (*rank) return cmd_rank_eval(g, predicted, truth, attributes, json_out);
    if (*tasks) return cmd_classify_tasks(g, images, task, json_out);
    if (*sim) return cmd_simulate(g, sessions, source, out);
    if (*serve) return cmd_serve(g, host, state_dir, webui, ttl, serve_source);
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
