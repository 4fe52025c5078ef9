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

#include "dpugc/synthetic.h"

#include <cmath>
#include <numeric>
#include <string>

#include <gtest/gtest.h>

namespace dpugc {
namespace {

TEST(GenerateSyntheticTest, ShapesAndInvariants) {
  SyntheticOptions o;
  o.num_users = 30;
  o.public_docs = 50;
  const SyntheticData d = GenerateSynthetic(o);
  ASSERT_EQ(d.users.size(), 30u);
  ASSERT_EQ(d.mixtures.size(), 30u);
  EXPECT_EQ(d.public_docs.size(), 50u);
  EXPECT_EQ(d.coefficients.size(), 10u);
  for (std::size_t u = 0; u < d.users.size(); ++u) {
    EXPECT_EQ(d.users[u].documents.size(), 10u);
    EXPECT_TRUE(std::isfinite(d.users[u].score));
    EXPECT_NEAR(std::accumulate(d.mixtures[u].begin(), d.mixtures[u].end(), 0.0),
                1.0, 1e-12);
    const double clean = std::inner_product(
        d.coefficients.begin(), d.coefficients.end(), d.mixtures[u].begin(), 0.0);
    EXPECT_LT(std::abs(d.users[u].score - clean), 6 * o.noise_stddev);
    for (const auto& doc : d.users[u].documents) EXPECT_EQ(doc.size(), 30u);
  }
}

TEST(GenerateSyntheticTest, PublicDocsAvoidPrivateTopics) {
  SyntheticOptions o;
  o.num_users = 5;
  o.public_docs = 200;
  for (const auto& doc : GenerateSynthetic(o).public_docs) {
    for (const auto& w : doc) EXPECT_NE(w.rfind("ugc", 0), 0u) << w;
  }
}

TEST(GenerateSyntheticTest, Deterministic) {
  SyntheticOptions o;
  o.num_users = 10;
  o.public_docs = 10;
  const SyntheticData a = GenerateSynthetic(o);
  const SyntheticData b = GenerateSynthetic(o);
  EXPECT_EQ(a.mixtures, b.mixtures);
  EXPECT_EQ(a.public_docs, b.public_docs);
  EXPECT_EQ(a.users[3].documents, b.users[3].documents);
  o.seed = 8;
  EXPECT_NE(GenerateSynthetic(o).mixtures, a.mixtures);
}

}  // namespace
}  // namespace dpugc
