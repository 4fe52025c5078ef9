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

#include "dpugc/embedding_io.h"

#include <cmath>
#include <string>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "dpugc/corpus.h"
#include "dpugc/model.h"
#include "test_util.h"

namespace dpugc {
namespace {

using ::testing::HasSubstr;

TEST(Word2VecTextTest, FormatsHeaderAndRows) {
  Embeddings e;
  e.words = {"a", "bb"};
  e.dim = 2;
  e.vectors = {0.5, -1, 0.125, 3};
  EXPECT_EQ(FormatWord2VecText(e), "2 2\na 0.5 -1\nbb 0.125 3\n");
}

TEST(Word2VecTextTest, RoundTripsExportedModel) {
  const Vocabulary vocab =
      *BuildVocab({"x", "y", "y", "z", "z", "z"}, {.min_count = 1});
  const EmbeddingModel model = InitModel(vocab.size(), 7, 3);
  const Embeddings e = ExportEmbeddings(model, vocab);
  const std::string path = testing::TempPath("m.vec");
  ASSERT_OK(SaveWord2VecText(path, e));
  auto back = LoadWord2VecText(path);
  ASSERT_OK(back);
  EXPECT_EQ(back->words, e.words);
  EXPECT_EQ(back->dim, 7);
  ASSERT_EQ(back->vectors.size(), e.vectors.size());
  for (std::size_t i = 0; i < e.vectors.size(); ++i) {
    EXPECT_NEAR(back->vectors[i], e.vectors[i], 1e-8 * std::abs(e.vectors[i]));
  }
  EXPECT_EQ(*back->Find("z"), *e.Find("z"));
  // Writing what was read reproduces the file byte for byte.
  EXPECT_EQ(FormatWord2VecText(*back), testing::ReadFile(path));
}

TEST(Word2VecTextTest, RejectsMalformedInput) {
  EXPECT_FALSE(ParseWord2VecText("").ok());
  EXPECT_FALSE(ParseWord2VecText("x y\n").ok());
  EXPECT_FALSE(ParseWord2VecText("2 2\na 1 2\n").ok());
  EXPECT_FALSE(ParseWord2VecText("1 2\na 1\n").ok());
  EXPECT_FALSE(ParseWord2VecText("1 2\na 1 q\n").ok());
  auto dup = ParseWord2VecText("2 1\na 1\na 2\n");
  ASSERT_FALSE(dup.ok());
  EXPECT_THAT(dup.status().message(), HasSubstr("duplicate"));
  EXPECT_EQ(LoadWord2VecText("/nonexistent.vec").status().code(),
            absl::StatusCode::kNotFound);
}

}  // namespace
}  // namespace dpugc
