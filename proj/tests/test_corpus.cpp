#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <set>

#include "texelatt/texelatt.hpp"

using namespace texelatt;
namespace fs = std::filesystem;

namespace {

class CorpusDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("texelatt_corpus_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static GenerateOptions small(std::size_t count, unsigned jobs = 1) {
    GenerateOptions o;
    o.count = count;
    o.seed = 99;
    o.domain.width = o.domain.height = 160;
    o.domain.max_size = 24.0;
    o.jobs = jobs;
    return o;
  }

  std::map<fs::path, std::string> snapshot() const {
    std::map<fs::path, std::string> out;
    for (const auto& e : fs::directory_iterator(dir_)) out[e.path().filename()] = read_text_file(e.path().string());
    return out;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CorpusDir, GenerateWritesImagesAnnotationsAndManifest) {
  const Manifest m = generate_corpus(dir_, small(10));
  ASSERT_EQ(m.items.size(), 10u);
  EXPECT_EQ(m.items[3].id, "000003");
  for (const auto& it : m.items) {
    EXPECT_TRUE(fs::exists(dir_ / (it.id + ".png")));
    EXPECT_TRUE(fs::exists(dir_ / (it.id + ".json")));
  }
  const Manifest back = load_manifest(dir_);
  EXPECT_EQ(back.items.size(), 10u);
  EXPECT_EQ(back.items[7].seed, m.items[7].seed);
  EXPECT_EQ(back.constraints, std::vector<std::string>{"none"});
}

TEST_F(CorpusDir, GenerateIsIdempotentAndParallelSafe) {
  generate_corpus(dir_, small(6));
  const auto first = snapshot();
  generate_corpus(dir_, small(6));
  EXPECT_EQ(snapshot(), first);
  fs::remove_all(dir_);
  generate_corpus(dir_, small(6, 3));
  EXPECT_EQ(snapshot(), first);
}

TEST_F(CorpusDir, GenerateRefusesDifferentSettings) {
  generate_corpus(dir_, small(2));
  GenerateOptions o = small(2);
  o.seed = 100;
  EXPECT_THROW(generate_corpus(dir_, o), DataError);
  o = small(2);
  o.constraints = {"circle"};
  EXPECT_THROW(generate_corpus(dir_, o), DataError);
}

TEST_F(CorpusDir, EmptyCorpusCannotBeDescribed) {
  const Manifest m = generate_corpus(dir_, small(0));
  EXPECT_TRUE(m.items.empty());
  try {
    describe_corpus(dir_, {});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("manifest empty"), std::string::npos);
  }
  EXPECT_THROW(load_manifest(dir_ / "missing"), DataError);
}

TEST_F(CorpusDir, DescribeWritesTablesDeterministically) {
  generate_corpus(dir_, small(10));
  describe_corpus(dir_, {});
  const auto table = read_descriptor_table(dir_ / "descriptors.jsonl");
  ASSERT_EQ(table.size(), 10u);
  for (const auto& [id, d] : table) EXPECT_EQ(d.values.size(), 36u);
  const auto first = snapshot();
  describe_corpus(dir_, {PipelineConfig{}, 2});
  EXPECT_EQ(snapshot(), first);

  const CorpusStore store(dir_);
  EXPECT_EQ(store.size(), 10u);
  EXPECT_TRUE(store.contains("000004"));
  const auto z = store.normalized(AttributeSource::ground_truth);
  for (std::size_t k = 0; k < kDescriptorSize; ++k) {
    double mean = 0.0;
    for (const auto& [id, d] : z) mean += d[k] / 10.0;
    EXPECT_NEAR(mean, 0.0, 1e-9);
  }
  EXPECT_EQ(store.search_corpus(AttributeSource::detected, 0.05)->size(), 10u);
}

TEST_F(CorpusDir, StoreRejectsUndescribedCorpus) {
  generate_corpus(dir_, small(3));
  EXPECT_THROW(CorpusStore{dir_}, DataError);
  describe_corpus(dir_, {});
  fs::remove(dir_ / "000001.png");
  EXPECT_THROW(CorpusStore{dir_}, DataError);
}

TEST(DescriptorTable, MalformedRowsAreDataErrors) {
  const fs::path p = fs::temp_directory_path() / "texelatt_rows.jsonl";
  write_text_file(p.string(), "{\"id\":\"a\",\"values\":[1,2]}\n");
  EXPECT_THROW(read_descriptor_table(p), DataError);
  write_text_file(p.string(), "garbage\n");
  EXPECT_THROW(read_descriptor_table(p), DataError);
  fs::remove(p);
}

TEST(Config, ParsesKnownKeysOnly) {
  const PipelineConfig c =
      PipelineConfig::from_json(Json{{"background_distance", 55.0}, {"gamma_fraction", 0.1}, {"tie_break", "slack_then_id"}});
  EXPECT_DOUBLE_EQ(c.detector.background_distance, 55.0);
  EXPECT_DOUBLE_EQ(c.gamma_fraction, 0.1);
  EXPECT_EQ(c.session_options().tie_break, TieBreak::slack_then_id);
  EXPECT_EQ(PipelineConfig::from_json(Json::object()).session_options().tie_break, TieBreak::id);
  EXPECT_THROW(PipelineConfig::from_json(Json{{"bogus", 1}}), DataError);
  EXPECT_THROW(PipelineConfig::from_json(Json{{"gamma_fraction", -1.0}}), DataError);
  EXPECT_THROW(PipelineConfig::from_json(Json{{"tie_break", "random"}}), DataError);
  EXPECT_THROW(PipelineConfig::from_json(Json::array()), DataError);
}

TEST(ParallelFor, VisitsEveryIndexAndRethrowsFirstFailure) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  try {
    parallel_for(50, 4, [&](std::size_t i) {
      if (i == 13 || i == 40) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "13");
  }
}

TEST(Targets, DistinctAndDeterministic) {
  std::vector<std::string> ids;
  for (int i = 0; i < 50; ++i) ids.push_back(format_id(std::size_t(i)));
  const auto a = sample_targets(ids, 20, 5);
  EXPECT_EQ(a, sample_targets(ids, 20, 5));
  EXPECT_EQ(std::set<std::string>(a.begin(), a.end()).size(), 20u);
  EXPECT_THROW(sample_targets(ids, 51, 5), std::invalid_argument);
  EXPECT_EQ(attribute_source_from_string("gt"), AttributeSource::ground_truth);
  EXPECT_THROW(attribute_source_from_string("both"), std::invalid_argument);
}

TEST(RankTable, PerfectPredictionAndMissingRows) {
  Rng rng(2);
  std::map<std::string, Descriptor> truth;
  for (int i = 0; i < 20; ++i) {
    Descriptor d;
    for (std::size_t k = 0; k < kDescriptorSize; ++k) d[k] = rng.uniform();
    truth[format_id(std::size_t(i))] = d;
  }
  const auto rows = rank_eval_table(truth, truth);
  ASSERT_EQ(rows.size(), kDescriptorSize);
  for (const auto& r : rows) EXPECT_DOUBLE_EQ(r.accuracy.combined, 1.0);
  const auto some = rank_eval_table(truth, truth, 0.05, {"density", "texel_area"});
  ASSERT_EQ(some.size(), 2u);
  EXPECT_EQ(some[1].attribute, "texel_area");
  auto partial = truth;
  partial.erase(partial.begin());
  EXPECT_THROW(rank_eval_table(partial, truth), DataError);
  EXPECT_THROW(rank_eval_table(truth, truth, 0.05, {"sparkle"}), UnknownAttribute);
}

TEST(Simulation, ReportShapesAndBounds) {
  Rng rng(3);
  std::map<std::string, Descriptor> truth;
  for (int i = 0; i < 60; ++i) {
    Descriptor d;
    for (std::size_t k = 0; k < kDescriptorSize; ++k) d[k] = rng.uniform();
    truth[format_id(std::size_t(i))] = d;
  }
  const auto search = std::make_shared<const SearchCorpus>(truth);
  const SimulationReport r = simulate_search(search, truth, 12, 1);
  ASSERT_EQ(r.mean_percentile_rank.size(), std::size_t(kMaxIterations) + 1);
  EXPECT_EQ(r.sessions.size(), 12u);
  EXPECT_EQ(r.monotone_sessions, 12u);
  for (std::size_t k = 1; k < r.mean_percentile_rank.size(); ++k)
    EXPECT_GE(r.mean_percentile_rank[k], r.mean_percentile_rank[k - 1] - 1e-12);
  EXPECT_GE(r.search_accuracy, 0.0);
  EXPECT_LE(r.search_accuracy, 1.0);
  EXPECT_EQ(r.to_json()["mean_percentile_rank"].size(), std::size_t(kMaxIterations) + 1);
}

TEST(BinaryTasks, DefinitionsAndDeterminism) {
  const auto tasks = binary_tasks();
  ASSERT_EQ(tasks.size(), 3u);
  EXPECT_EQ(tasks[0].name, "line_uniformity");
  for (const auto& t : tasks) {
    for (const auto& v : t.class0) EXPECT_NO_THROW(TaskConstraints::parse(v));
    for (const auto& v : t.class1) EXPECT_NO_THROW(TaskConstraints::parse(v));
  }
  const TaskResult a = run_binary_task(tasks[2], 12, 4, {}, 1, 2);
  const TaskResult b = run_binary_task(tasks[2], 12, 4, {}, 3, 2);
  EXPECT_EQ(a.accuracy, b.accuracy);
  EXPECT_GE(a.accuracy, 0.0);
  EXPECT_LE(a.accuracy, 1.0);
  EXPECT_EQ(a.images, 12u);
}
