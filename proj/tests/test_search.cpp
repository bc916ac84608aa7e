#include <gtest/gtest.h>

#include <cstdio>

#include "texelatt/search.hpp"

using namespace texelatt;

namespace {

std::string img(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "img%02d", i);
  return buf;
}

std::map<std::string, Descriptor> random_table(std::uint64_t seed, int n) {
  Rng rng(seed);
  std::map<std::string, Descriptor> m;
  for (int i = 0; i < n; ++i) {
    Descriptor d;
    for (std::size_t k = 0; k < kDescriptorSize; ++k) d[k] = rng.uniform(-1.0, 1.0);
    d[7] = 0.25;  // one constant component
    m[img(i)] = d;
  }
  return m;
}

std::shared_ptr<const SearchCorpus> corpus_of(const std::map<std::string, Descriptor>& table) {
  return std::make_shared<const SearchCorpus>(table);
}

// Images img00..img(n-1) whose only non-zero component 0 equals the index.
std::map<std::string, Descriptor> line_table(int n) {
  std::map<std::string, Descriptor> m;
  for (int i = 0; i < n; ++i) {
    Descriptor d;
    d[0] = double(i);
    m[img(i)] = d;
  }
  return m;
}

const std::string& label(std::size_t k) { return descriptor_labels()[k]; }

}  // namespace

TEST(Relation, StringsRoundTrip) {
  for (Relation r : {Relation::more, Relation::equally, Relation::less})
    EXPECT_EQ(relation_from_string(to_string(r)), r);
  EXPECT_THROW(relation_from_string("bigger"), std::invalid_argument);
  EXPECT_EQ(attribute_index("density"), slot::density);
  EXPECT_THROW(attribute_index("sparkle"), UnknownAttribute);
}

TEST(Relevance, HandWorkedMargins) {
  auto r = constraint_relevance(Relation::more, 5.0, 3.0, 0.1);
  EXPECT_EQ(r.satisfied, 1);
  EXPECT_DOUBLE_EQ(r.slack, 2.0);
  r = constraint_relevance(Relation::more, 3.0, 3.0, 0.1);
  EXPECT_EQ(r.satisfied, 0);
  r = constraint_relevance(Relation::less, 2.0, 3.0, 0.1);
  EXPECT_EQ(r.satisfied, 1);
  EXPECT_DOUBLE_EQ(r.slack, 1.0);
  r = constraint_relevance(Relation::equally, 3.05, 3.0, 0.1);
  EXPECT_EQ(r.satisfied, 1);
  EXPECT_NEAR(r.slack, 0.05, 1e-12);
  r = constraint_relevance(Relation::equally, 3.2, 3.0, 0.1);
  EXPECT_EQ(r.satisfied, 0);
  EXPECT_NEAR(r.slack, -0.1, 1e-12);
  EXPECT_EQ(constraint_relevance(Relation::equally, 3.0, 3.0, 0.0).satisfied, 1);
}

TEST(Corpus, EpsilonIsFractionOfRange) {
  const SearchCorpus c(line_table(21), 0.05);
  EXPECT_DOUBLE_EQ(c.epsilon(0), 1.0);
  EXPECT_DOUBLE_EQ(c.epsilon(1), 0.0);
  EXPECT_EQ(c.index_of("img03"), 3u);
  EXPECT_THROW(c.index_of("nope"), std::out_of_range);
}

TEST(Init, FarthestPointReferences) {
  // Centroid 4.5 ties img04/img05 and the smaller id wins; every later pick
  // is the farthest remaining image, ties to the smaller id.
  const SearchSession s(corpus_of(line_table(10)), "img09");
  EXPECT_EQ(s.reference_ids(),
            (std::vector<std::string>{"img04", "img00", "img08", "img02", "img06", "img01", "img03", "img05"}));
  EXPECT_EQ(s.iteration(), 0);
  EXPECT_EQ(s.target_rank(), 10u);
}

TEST(Init, NineImagesAreEnough) {
  const auto corpus = corpus_of(random_table(1, 9));
  for (int t = 0; t < 9; ++t) {
    const SearchSession s(corpus, img(t));
    const auto refs = s.reference_ids();
    ASSERT_EQ(refs.size(), 8u);
    EXPECT_EQ(std::find(refs.begin(), refs.end(), img(t)), refs.end());
    EXPECT_EQ(std::set<std::string>(refs.begin(), refs.end()).size(), 8u);
  }
  EXPECT_THROW(SearchSession(corpus_of(random_table(1, 8)), img(0)), std::invalid_argument);
  EXPECT_THROW(SearchSession(corpus, "img99"), std::out_of_range);
}

TEST(Init, Deterministic) {
  const auto corpus = corpus_of(random_table(2, 40));
  EXPECT_EQ(init_session(corpus, img(5)).reference_ids(), init_session(corpus, img(5)).reference_ids());
}

TEST(Feedback, UniqueAttributeIsolatesTarget) {
  auto table = line_table(12);
  table[img(11)][5] = 1.0;
  SearchSession s(corpus_of(table), img(11));
  s.apply_feedback({{s.reference_ids()[0], label(5), Relation::more}});
  EXPECT_EQ(s.target_rank(), 1u);
  EXPECT_TRUE(s.found());
  EXPECT_DOUBLE_EQ(s.percentile_rank(), 1.0);
  EXPECT_EQ(s.reference_ids()[0], img(11));
  EXPECT_EQ(s.relevance(img(11)).satisfied, 1);
  EXPECT_EQ(s.relevance(img(0)).satisfied, 0);
}

TEST(Feedback, EmptyRoundKeepsIdOrder) {
  SearchSession s(corpus_of(random_table(3, 9)), img(4));
  s.apply_feedback({});
  EXPECT_EQ(s.iteration(), 1);
  EXPECT_EQ(s.target_rank(), 5u);
  EXPECT_DOUBLE_EQ(s.percentile_rank(), 4.0 / 8.0);
  EXPECT_EQ(s.history().back().target_rank, 5u);
  EXPECT_EQ(s.reference_ids()[0], img(0));
}

TEST(Feedback, IterationLimit) {
  SearchSession s(corpus_of(random_table(4, 12)), img(0));
  for (int i = 0; i < kMaxIterations; ++i) s.apply_feedback({});
  EXPECT_TRUE(s.exhausted());
  EXPECT_THROW(s.apply_feedback({}), SessionExhausted);
  EXPECT_EQ(s.iteration(), kMaxIterations);
}

TEST(Feedback, InvalidFeedbackLeavesSessionUntouched) {
  SearchSession s(corpus_of(random_table(5, 20)), img(0));
  const auto refs = s.reference_ids();
  std::string outside;
  for (int i = 1; i < 20; ++i)
    if (std::find(refs.begin(), refs.end(), img(i)) == refs.end()) outside = img(i);
  EXPECT_THROW(s.apply_feedback({{refs[0], "sparkle", Relation::more}}), UnknownAttribute);
  EXPECT_THROW(s.apply_feedback({{"img99", "density", Relation::more}}), std::invalid_argument);
  EXPECT_THROW(s.apply_feedback({{refs[0], "density", Relation::more}, {outside, "density", Relation::less}}),
               std::invalid_argument);
  EXPECT_EQ(s.iteration(), 0);
  EXPECT_TRUE(s.constraints().empty());
  EXPECT_EQ(s.relevance(img(3)).satisfied, 0);
}

TEST(Feedback, IncrementalScoresMatchFullRescoring) {
  const auto table = random_table(6, 60);
  const OracleUser oracle(table);
  for (SessionOptions opts : {SessionOptions{}, SessionOptions{8, 10, TieBreak::slack_then_id}}) {
    SearchSession s(corpus_of(table), img(17), opts);
    for (int round = 0; round < 4; ++round) {
      s.apply_feedback(oracle.feedback(s));
      for (int i = 0; i < 60; ++i) {
        const Relevance full = s.relevance_score(img(i), s.constraints());
        EXPECT_EQ(full.satisfied, s.relevance(img(i)).satisfied);
        EXPECT_NEAR(full.slack, s.relevance(img(i)).slack, 1e-9);
      }
      const auto ranking = s.ranking();
      for (std::size_t r = 1; r < ranking.size(); ++r) {
        const Relevance a = s.relevance(ranking[r - 1]), b = s.relevance(ranking[r]);
        ASSERT_GE(a.satisfied, b.satisfied);
        if (a.satisfied != b.satisfied) continue;
        if (opts.tie_break == TieBreak::id) {
          EXPECT_LT(ranking[r - 1], ranking[r]);
        } else {
          EXPECT_GE(a.slack, b.slack);
        }
      }
    }
  }
}

TEST(Accuracy, CountsSessionsReachingThePage) {
  const auto corpus = corpus_of(line_table(60));
  std::vector<SearchSession> sessions;
  sessions.emplace_back(corpus, img(3));   // rank 4 after an empty round
  sessions.emplace_back(corpus, img(50));  // rank 51
  sessions.emplace_back(corpus, img(39));  // rank 40, on the boundary
  sessions.emplace_back(corpus, img(40));  // rank 41
  for (auto& s : sessions) s.apply_feedback({});
  EXPECT_DOUBLE_EQ(search_accuracy(sessions), 0.5);
  EXPECT_DOUBLE_EQ(search_accuracy(sessions, 3), 0.0);
  EXPECT_DOUBLE_EQ(search_accuracy({}), 0.0);
  // Sessions without feedback rounds never count.
  EXPECT_DOUBLE_EQ(search_accuracy({SearchSession(corpus, img(0))}), 0.0);
}

TEST(Oracle, PicksLargestStandardizedGap) {
  std::map<std::string, Descriptor> table;
  for (int i = 0; i < 10; ++i) {
    Descriptor d;
    d[0] = double(i);         // std about 2.87
    d[1] = 10.0 * double(i % 2);  // std 5
    table[img(i)] = d;
  }
  const OracleUser oracle(table);
  const SearchSession s(corpus_of(table), img(9));
  const auto fb = oracle.feedback(s);
  ASSERT_EQ(fb.size(), 8u);
  for (const auto& k : fb) {
    const int ref = std::stoi(k.ref_id.substr(3));
    const double gap0 = std::fabs(9.0 - ref) / std::sqrt(8.25);
    const double gap1 = std::fabs(10.0 - 10.0 * (ref % 2)) / 5.0;
    EXPECT_EQ(k.attribute, label(gap0 >= gap1 ? 0 : 1)) << k.ref_id;
    EXPECT_EQ(k.relation, Relation::more);
  }
}

TEST(Oracle, RelationFollowsSignAndGamma) {
  // Nine images, so every non-target image is a reference. Range 10 gives
  // gamma 0.5 around the target value 5.
  const std::vector<double> values = {5.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.2, 9.0, 10.0};
  std::map<std::string, Descriptor> table;
  for (std::size_t i = 0; i < values.size(); ++i) table[img(int(i))][0] = values[i];
  const OracleUser oracle(table);
  const auto fb = oracle.feedback(SearchSession(corpus_of(table), img(0)));
  ASSERT_EQ(fb.size(), 8u);
  for (const auto& k : fb) {
    const double v = values[std::size_t(std::stoi(k.ref_id.substr(3)))];
    EXPECT_EQ(k.attribute, label(0));
    const Relation want = v == 5.2 ? Relation::equally : v < 5.0 ? Relation::more : Relation::less;
    EXPECT_EQ(k.relation, want) << k.ref_id;
  }
}

TEST(Oracle, Preconditions) {
  EXPECT_THROW(OracleUser({{img(0), Descriptor{}}}), std::invalid_argument);
  std::map<std::string, Descriptor> flat;
  for (int i = 0; i < 10; ++i) flat[img(i)] = Descriptor{};
  EXPECT_THROW(OracleUser(flat).feedback(SearchSession(corpus_of(flat), img(0))), std::invalid_argument);
}

TEST(Oracle, TargetSatisfiesEveryConstraint) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto table = random_table(100 + seed, 50);
    const OracleUser oracle(table);
    SearchSession s(corpus_of(table), img(int(seed * 4)));
    for (int round = 0; round < 5 && !s.exhausted(); ++round) {
      s.apply_feedback(oracle.feedback(s));
      EXPECT_EQ(std::size_t(s.relevance(s.target_id()).satisfied), s.constraints().size());
    }
  }
}

TEST(Oracle, TargetRankNeverWorsens) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto table = random_table(200 + seed, 80);
    const OracleUser oracle(table);
    SearchSession s(corpus_of(table), img(int(seed * 3 + 1)));
    std::size_t prev = s.target_rank();
    while (!s.exhausted()) {
      s.apply_feedback(oracle.feedback(s));
      EXPECT_LE(s.target_rank(), prev) << seed;
      prev = s.target_rank();
    }
  }
}

TEST(Oracle, SimulationStopsWhenFound) {
  const auto table = random_table(300, 60);
  const OracleUser oracle(table);
  SearchSession s(corpus_of(table), img(42));
  simulate_session(s, oracle);
  EXPECT_TRUE(s.found() || s.exhausted());
  for (std::size_t r = 0; r + 1 < s.history().size(); ++r) EXPECT_GT(s.history()[r].target_rank, kPageSize);
}

TEST(Replay, ReproducesSession) {
  const auto table = random_table(7, 70);
  const auto corpus = corpus_of(table);
  const OracleUser oracle(table);
  SearchSession s(corpus, img(33));
  std::vector<std::vector<FeedbackConstraint>> rounds;
  for (int i = 0; i < 3; ++i) {
    rounds.push_back(oracle.feedback(s));
    s.apply_feedback(rounds.back());
  }
  const SearchSession r = replay_session(corpus, img(33), rounds);
  EXPECT_EQ(r.ranking(), s.ranking());
  EXPECT_EQ(r.reference_ids(), s.reference_ids());
  EXPECT_EQ(r.iteration(), 3);
  EXPECT_EQ(r.constraints(), s.constraints());
}
