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

#include "dpugc/model.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "dpugc/dp_sgd.h"
#include "oracles.h"
#include "test_util.h"

namespace dpugc {
namespace {

using ::testing::HasSubstr;

TEST(InitModelTest, DeterministicRangeAndZeroOutput) {
  const EmbeddingModel a = InitModel(10, 5, 42);
  const EmbeddingModel b = InitModel(10, 5, 42);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, InitModel(10, 5, 43));
  for (double w : a.input()) EXPECT_LE(std::abs(w), 0.5 / 5);
  for (double w : a.output()) EXPECT_EQ(w, 0.0);
  EXPECT_EQ(a.input().size(), 50u);
}

TEST(NegativeSamplerTest, TableIsMonotoneAndNormalized) {
  NegativeSampler s({0, 5, 1, 100, 7});
  const auto& c = s.cumulative();
  EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
  EXPECT_NEAR(c.back(), 1.0, 1e-9);
  EXPECT_EQ(s.Probability(0), 0.0);
  double z = std::pow(5, 0.75) + 1 + std::pow(100, 0.75) + std::pow(7, 0.75);
  EXPECT_NEAR(s.Probability(3), std::pow(100, 0.75) / z, 1e-12);
}

TEST(NegativeSamplerTest, DegenerateSamplerFails) {
  NegativeSampler s({1, 0});
  Engine rng(1);
  auto r = SampleNegatives(s, 3, 0, rng);
  ASSERT_FALSE(r.ok());
  EXPECT_THAT(r.status().message(), HasSubstr("degenerate sampler"));
}

TEST(NegativeSamplerTest, NeverReturnsExcludedId) {
  NegativeSampler s({10, 10, 10, 1000});
  Engine rng(2);
  for (int i = 0; i < 200; ++i) {
    auto r = SampleNegatives(s, 5, 3, rng);
    ASSERT_OK(r);
    for (WordId id : *r) EXPECT_NE(id, 3);
  }
}

// Per-id counts of 20000 draws must each be within 5 binomial standard
// deviations, and Pearson's statistic must stay below a loose bound.
void CheckFrequencies(const std::vector<std::int64_t>& counts, std::uint64_t seed) {
  NegativeSampler s(counts);
  std::vector<double> expected(counts.size());
  double z = 0;
  for (auto c : counts) z += std::pow(static_cast<double>(c), 0.75);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    expected[i] = std::pow(static_cast<double>(counts[i]), 0.75) / z;
  }
  Engine rng(seed);
  const int n = 20000;
  std::vector<int> seen(counts.size());
  for (int i = 0; i < n; ++i) ++seen[s.Draw(rng)];
  double chi2 = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double mean = n * expected[i];
    const double sd = std::sqrt(n * expected[i] * (1 - expected[i]));
    EXPECT_LE(std::abs(seen[i] - mean), 5 * sd + 1e-9) << "id " << i;
    if (mean > 0) chi2 += (seen[i] - mean) * (seen[i] - mean) / mean;
  }
  // 99.99th percentile of chi-square with <= 50 degrees of freedom is < 100.
  EXPECT_LT(chi2, 100.0);
}

TEST(NegativeSamplerTest, UniformCountsMatchDistribution) {
  CheckFrequencies(std::vector<std::int64_t>(20, 7), 11);
}

TEST(NegativeSamplerTest, SkewedCountsMatchDistribution) {
  std::vector<std::int64_t> counts;
  for (int i = 1; i <= 30; ++i) counts.push_back(1000 / i);
  CheckFrequencies(counts, 12);
}

TEST(NegLossTest, ZeroModel) {
  EmbeddingModel m(6, 4);
  const std::vector<WordId> negs = {1, 2, 3};
  EXPECT_DOUBLE_EQ(NegLoss(m, {0, 4}, negs), 4 * std::log(2.0));
}

TEST(NegLossTest, SaturatesToZero) {
  EmbeddingModel m(3, 1);
  m.input_row(0)[0] = 100;
  m.output_row(1)[0] = 100;
  m.output_row(2)[0] = -100;
  const std::vector<WordId> negs = {2, 2};
  EXPECT_GE(NegLoss(m, {0, 1}, negs), 0.0);
  EXPECT_LT(NegLoss(m, {0, 1}, negs), 1e-12);
}

TEST(NegLossTest, StaysFiniteWhenWrong) {
  EmbeddingModel m(3, 1);
  m.input_row(0)[0] = 100;
  m.output_row(1)[0] = -100;
  const std::vector<WordId> negs = {1};
  const double loss = NegLoss(m, {0, 1}, negs);
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_NEAR(loss, 30.0, 1e-9);  // positive logit clamped at -30
}

TEST(NegLossTest, MatchesDirectFormula) {
  for (int seed = 0; seed < 20; ++seed) {
    const EmbeddingModel m = oracle::RandomModel(10, 6, 0.5, seed);
    const std::vector<WordId> negs = {static_cast<WordId>(seed % 10), 7};
    const TrainingPair p{3, static_cast<WordId>((seed + 1) % 10)};
    EXPECT_NEAR(NegLoss(m, p, negs), oracle::NegLoss(m, p, negs), 1e-12);
    EXPECT_GE(NegLoss(m, p, negs), 0.0);
  }
}

TEST(NegGradientTest, MatchesFiniteDifferences) {
  Engine rng(17);
  NegativeSampler sampler(std::vector<std::int64_t>(20, 1));
  int instances = 0;
  for (int seed = 0; seed < 150; ++seed) {
    const EmbeddingModel m = oracle::RandomModel(20, 8, 0.3, 1000 + seed);
    const TrainingPair p{static_cast<WordId>(rng() % 20),
                         static_cast<WordId>(rng() % 20)};
    auto negs = SampleNegatives(sampler, 3, p.context, rng);
    ASSERT_OK(negs);
    const auto check = oracle::CheckGradient(m, p, *negs, 1e-4);
    EXPECT_LE(check.max_relative_error, 1e-5) << "seed " << seed;
    EXPECT_GE(check.coordinates, 8 * 2);
    ++instances;
  }
  EXPECT_GE(instances, 100);
}

TEST(NegGradientTest, ZeroModelContextRowIsZero) {
  EmbeddingModel m(5, 3);
  const std::vector<WordId> negs = {2, 3};
  const SparseGradient g = NegGradient(m, {0, 1}, negs);
  for (std::size_t r = 0; r < g.num_rows(); ++r) {
    for (double v : g.row(r)) EXPECT_EQ(v, 0.0);
  }
}

TEST(NegGradientTest, TouchesOnlyExpectedRows) {
  const EmbeddingModel m = oracle::RandomModel(10, 4, 0.5, 3);
  const std::vector<WordId> negs = {5, 6, 5};
  const SparseGradient g = NegGradient(m, {2, 4}, negs);
  std::set<std::pair<int, int>> rows;
  for (const auto& k : g.keys()) rows.insert({static_cast<int>(k.matrix), k.row});
  const std::set<std::pair<int, int>> want = {{0, 2}, {1, 4}, {1, 5}, {1, 6}};
  EXPECT_EQ(rows, want);
  EXPECT_EQ(g.keys().front(), (RowKey{Matrix::kInput, 2}));
}

TEST(NegGradientTest, LossVariantAgrees) {
  const EmbeddingModel m = oracle::RandomModel(10, 4, 0.5, 4);
  const std::vector<WordId> negs = {1, 2};
  double loss = 0;
  const SparseGradient a = NegGradientAndLoss(m, {3, 4}, negs, &loss);
  const SparseGradient b = NegGradient(m, {3, 4}, negs);
  EXPECT_EQ(a.values(), b.values());
  EXPECT_DOUBLE_EQ(loss, NegLoss(m, {3, 4}, negs));
}

Embeddings MakeEmbeddings(std::vector<std::string> words, int dim,
                          std::vector<double> values) {
  Embeddings e;
  e.words = std::move(words);
  e.dim = dim;
  e.vectors = std::move(values);
  e.Reindex();
  return e;
}

TEST(NearestNeighborsTest, IdenticalRowsRankFirst) {
  const Embeddings e =
      MakeEmbeddings({"UNK", "a", "c", "b"}, 2, {1, 0, 1, 2, 0, 1, 1, 2});
  auto n = NearestNeighbors(e, "a", 2);
  ASSERT_OK(n);
  ASSERT_EQ(n->size(), 2u);
  EXPECT_EQ((*n)[0].word, "b");
  EXPECT_NEAR((*n)[0].cosine, 1.0, 1e-15);
}

TEST(NearestNeighborsTest, OrthogonalRowsTieByIndex) {
  Embeddings e = MakeEmbeddings({"UNK", "q", "x", "y", "z"}, 4,
                                {1, 1, 1, 1, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0,
                                 0, 0, 0, 1});
  auto n = NearestNeighbors(e, "q", 3);
  ASSERT_OK(n);
  ASSERT_EQ(n->size(), 3u);
  EXPECT_EQ((*n)[0].word, "x");
  EXPECT_EQ((*n)[1].word, "y");
  EXPECT_EQ((*n)[2].word, "z");
  for (const auto& nb : *n) EXPECT_EQ(nb.cosine, 0.0);
}

TEST(NearestNeighborsTest, Errors) {
  const Embeddings e = MakeEmbeddings({"UNK", "a", "b"}, 1, {1, 1, 1});
  EXPECT_EQ(NearestNeighbors(e, "zzz", 1).status().code(),
            absl::StatusCode::kNotFound);
  EXPECT_THAT(NearestNeighbors(e, "zzz", 1).status().message(),
              HasSubstr("unknown word"));
  EXPECT_FALSE(NearestNeighbors(e, "a", 0).ok());
  auto all = NearestNeighbors(e, "a", 10);
  ASSERT_OK(all);
  EXPECT_EQ(all->size(), 1u);
}

TEST(NearestNeighborsTest, MatchesBruteForce) {
  for (int seed = 0; seed < 10; ++seed) {
    const EmbeddingModel m = oracle::RandomModel(50, 10, 1.0, 500 + seed);
    Embeddings e;
    e.dim = 10;
    e.vectors = m.input();
    e.words.push_back("UNK");
    for (int i = 1; i < 50; ++i) e.words.push_back("w" + std::to_string(i));
    e.Reindex();
    for (int k : {1, 5, 48}) {
      const std::string q = "w" + std::to_string(1 + seed);
      auto got = NearestNeighbors(e, q, k);
      ASSERT_OK(got);
      const auto want = oracle::NeighborsByScan(e, q, k);
      ASSERT_EQ(got->size(), want.size());
      for (std::size_t i = 0; i < want.size(); ++i) {
        EXPECT_EQ((*got)[i].word, want[i].word);
        EXPECT_NEAR((*got)[i].cosine, want[i].cosine, 1e-12);
      }
    }
  }
}

TEST(EmbeddingsTest, FindWithoutIndexScans) {
  Embeddings e;
  e.words = {"UNK", "a"};
  e.dim = 1;
  e.vectors = {0, 1};
  EXPECT_EQ(e.Find("a"), 1u);
  EXPECT_FALSE(e.Find("b").has_value());
}

}  // namespace
}  // namespace dpugc
