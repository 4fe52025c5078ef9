// Copyright 2026 The dpugc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpugc/eval.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "absl/strings/str_cat.h"
#include "dpugc/model.h"
#include "oracles.h"
#include "test_util.h"

namespace dpugc {
namespace {

using ::testing::DoubleNear;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

double Ap(const std::vector<std::string>& returned,
          const std::vector<std::string>& gold) {
  return AveragePrecision(returned, gold);
}

TEST(AveragePrecisionTest, HandExamples) {
  EXPECT_NEAR(Ap({"a", "x", "b", "y"}, {"a", "b", "c", "d"}), 0.4166666666666667,
              1e-9);
  EXPECT_EQ(Ap({"d", "c", "b", "a"}, {"a", "b", "c", "d"}), 1.0);
  EXPECT_EQ(Ap({"x", "y"}, {"a", "b"}), 0.0);
  EXPECT_EQ(Ap({}, {}), 0.0);
}

// Every ordered list of distinct words of length 1..6 from a six-word
// universe, against every gold set of the same size.
TEST(AveragePrecisionTest, MatchesOracleExhaustively) {
  const std::vector<std::string> universe = {"a", "b", "c", "d", "e", "f"};
  int cases = 0;
  for (int k = 1; k <= 6; ++k) {
    for (int gmask = 0; gmask < 64; ++gmask) {
      if (__builtin_popcount(gmask) != k) continue;
      std::vector<std::string> gold;
      for (int i = 0; i < 6; ++i) {
        if (gmask >> i & 1) gold.push_back(universe[i]);
      }
      const std::set<std::string> gold_set(gold.begin(), gold.end());
      for (int rmask = 0; rmask < 64; ++rmask) {
        if (__builtin_popcount(rmask) != k) continue;
        std::vector<std::string> returned;
        for (int i = 0; i < 6; ++i) {
          if (rmask >> i & 1) returned.push_back(universe[i]);
        }
        do {
          ASSERT_NEAR(Ap(returned, gold),
                      oracle::AveragePrecision(returned, gold_set), 1e-12);
          ++cases;
        } while (std::next_permutation(returned.begin(), returned.end()));
      }
    }
  }
  EXPECT_EQ(cases, 6 * 6 + 30 * 15 + 120 * 20 + 360 * 15 + 720 * 6 + 720);
}

TEST(AveragePrecisionTest, MovingAHitEarlierNeverHurts) {
  const std::vector<std::string> gold = {"a", "b", "c", "d", "e"};
  std::mt19937_64 rng(3);
  const std::vector<std::string> pool = {"a", "b", "c", "d", "e",
                                         "v", "w", "x", "y", "z"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> list = pool;
    std::shuffle(list.begin(), list.end(), rng);
    list.resize(5);
    const double before = Ap(list, gold);
    for (std::size_t i = 1; i < list.size(); ++i) {
      const bool hit = std::count(gold.begin(), gold.end(), list[i]) > 0;
      const bool prev_hit = std::count(gold.begin(), gold.end(), list[i - 1]) > 0;
      if (!hit || prev_hit) continue;
      std::vector<std::string> moved = list;
      std::swap(moved[i], moved[i - 1]);
      EXPECT_GE(Ap(moved, gold), before);
    }
  }
}

TEST(BigramDiceTest, Examples) {
  EXPECT_NEAR(BigramDice("there", "that"), 4.0 / 11.0, 1e-12);
  EXPECT_NEAR(BigramDice("there", "that"), 0.364, 5e-4);
  EXPECT_EQ(BigramDice("abc", "abc"), 1.0);
  EXPECT_EQ(BigramDice("abc", "xyz"), 0.0);
  // Multiset counting: "aaa" has {^a, aa, aa, a$}, "aa" has {^a, aa, a$}.
  EXPECT_NEAR(BigramDice("aaa", "aa"), 2.0 * 3 / 7, 1e-12);
}

TEST(CharRelevanceTest, Examples) {
  const std::vector<std::string> gold = {"that", "this"};
  EXPECT_EQ(CharRelevance("that", gold), 1.0);
  EXPECT_NEAR(CharRelevance("there", std::vector<std::string>{"that"}), 4.0 / 11.0, 1e-12);
  EXPECT_EQ(CharRelevance("qqq", gold), 0.0);
  EXPECT_GE(CharRelevance("thus", gold), CharRelevance("thus", std::span(gold).first(1)));
}

TEST(GradedApTest, Examples) {
  EXPECT_EQ(GradedAveragePrecision(std::vector<double>{1.0, 0.0}), 1.0);
  EXPECT_EQ(GradedAveragePrecision(std::vector<double>{0.0, 1.0}), 0.5);
  EXPECT_EQ(GradedAveragePrecision(std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_EQ(GradedAveragePrecision(std::vector<double>{1.0, 1.0, 1.0}), 1.0);
  // 0.5 * 0.5 + 1 * 1.5 / 2 over 1.5.
  EXPECT_NEAR(GradedAveragePrecision(std::vector<double>{0.5, 1.0}),
              (0.25 + 0.75) / 1.5, 1e-12);
}

TEST(GradedApTest, BoundedAndOrderSensitive) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> rel(6);
    for (double& r : rel) r = u(rng) < 0.3 ? 0.0 : u(rng);
    const double ap = GradedAveragePrecision(rel);
    EXPECT_GE(ap, 0.0);
    EXPECT_LE(ap, 1.0 + 1e-12);
    std::vector<double> sorted = rel;
    std::sort(sorted.rbegin(), sorted.rend());
    EXPECT_GE(GradedAveragePrecision(sorted), ap - 1e-12);
  }
}

Embeddings RandomEmbeddings(int n, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Embeddings e;
  e.dim = dim;
  for (int i = 0; i < n; ++i) {
    e.words.push_back(absl::StrCat("word", i));
    for (int d = 0; d < dim; ++d) e.vectors.push_back(normal(rng));
  }
  e.Reindex();
  return e;
}

std::vector<std::string> Queries(int n) {
  std::vector<std::string> q;
  for (int i = 0; i < n; ++i) q.push_back(absl::StrCat("word", i));
  return q;
}

TEST(MapTest, SelfComparisonIsOne) {
  const Embeddings e = RandomEmbeddings(200, 8, 1);
  const MapResult r = EvaluateMap(e, e, Queries(11), 20);
  EXPECT_EQ(r.map_word, 1.0);
  EXPECT_EQ(r.map_char, 1.0);
  EXPECT_EQ(r.per_query.size(), 11u);
  EXPECT_EQ(MapWord(e, e, Queries(3), 5), 1.0);
}

TEST(MapTest, MatchesOracleAp) {
  const Embeddings model = RandomEmbeddings(150, 6, 2);
  const Embeddings gold = RandomEmbeddings(150, 6, 3);
  const int k = 15;
  double sum = 0;
  for (const std::string& q : Queries(11)) {
    std::vector<std::string> returned;
    for (const auto& s : oracle::NeighborsByScan(model, q, k)) {
      returned.push_back(s.word);
    }
    std::set<std::string> gold_set;
    for (const auto& s : oracle::NeighborsByScan(gold, q, k)) {
      gold_set.insert(s.word);
    }
    sum += oracle::AveragePrecision(returned, gold_set);
  }
  EXPECT_NEAR(MapWord(model, gold, Queries(11), k), sum / 11, 1e-12);
}

TEST(MapTest, RandomModelNearChance) {
  const Embeddings model = RandomEmbeddings(2000, 16, 4);
  const Embeddings gold = RandomEmbeddings(2000, 16, 5);
  const MapResult r = EvaluateMap(model, gold, Queries(11), 20);
  EXPECT_LT(r.map_word, 0.05);
  EXPECT_GE(r.map_char, r.map_word - 1e-12);
  EXPECT_LE(r.map_char, 1.0);
}

TEST(MapTest, SkipsMissingQueries) {
  const Embeddings e = RandomEmbeddings(50, 4, 6);
  const std::vector<std::string> q = {"word1", "absent", "word2"};
  const MapResult r = EvaluateMap(e, e, q, 5);
  EXPECT_THAT(r.skipped, ElementsAre("absent"));
  EXPECT_EQ(r.per_query.size(), 2u);
  EXPECT_EQ(r.map_word, 1.0);
}

TEST(DriftReportTest, GoldCheckpointScoresOne) {
  const Embeddings gold = RandomEmbeddings(80, 4, 7);
  const Embeddings other = RandomEmbeddings(80, 4, 8);
  const std::vector<DriftCheckpoint> ckpts = {
      {.step = 20, .variant = "dp", .model = &other, .epsilon = 0.5,
       .delta = 1e-5},
      {.step = 20, .variant = "nonedp", .model = &gold}};
  const EvalReport report = DriftReport(ckpts, gold, Queries(5), 10);
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_EQ(report.rows[1].scores.map_word, 1.0);
  EXPECT_EQ(report.rows[1].scores.map_char, 1.0);
  EXPECT_LT(report.rows[0].scores.map_word, 1.0);
  const std::string csv = report.ToCsv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "step,variant,map_word,map_char,epsilon,delta");
  EXPECT_THAT(csv, HasSubstr("\n20,nonedp,1,1,"));
}

TEST(QueriesTest, DefaultsAndFile) {
  const auto defaults = DefaultQueries();
  EXPECT_EQ(defaults.size(), 11u);
  for (const char* w : {"three", "eight", "they"}) {
    EXPECT_NE(std::find(defaults.begin(), defaults.end(), w), defaults.end());
  }
  auto loaded = LoadQueries(testing::WriteFile("q.txt", "alpha\n\n beta \n"));
  ASSERT_OK(loaded);
  EXPECT_THAT(*loaded, ElementsAre("alpha", "beta"));
  EXPECT_FALSE(LoadQueries("/nonexistent/q.txt").ok());
}

}  // namespace
}  // namespace dpugc
