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

#include "dpugc/corpus.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "dpugc/random.h"
#include "oracles.h"
#include "test_util.h"

namespace dpugc {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;
using ::testing::IsEmpty;
using ::testing::UnorderedElementsAreArray;

TEST(TokenizeTest, SplitsOnWhitespaceRuns) {
  EXPECT_THAT(Tokenize("Hello  world", true), ElementsAre("hello", "world"));
  EXPECT_THAT(Tokenize("", true), IsEmpty());
  EXPECT_THAT(Tokenize("A a A", true), ElementsAre("a", "a", "a"));
  EXPECT_THAT(Tokenize(" \tA\nb \r\n", false), ElementsAre("A", "b"));
}

TEST(TokenizeTest, LeavesUtf8Alone) {
  EXPECT_THAT(Tokenize("Caf\xc3\xa9 X", true), ElementsAre("caf\xc3\xa9", "x"));
}

TEST(BuildVocabTest, FoldsRareWordsIntoUnk) {
  auto vocab = BuildVocab({"a", "a", "b"}, {.min_count = 2});
  ASSERT_OK(vocab);
  EXPECT_THAT(vocab->words(), ElementsAre("UNK", "a"));
  EXPECT_EQ(vocab->Count(*vocab->Find("a")), 2);
  EXPECT_EQ(vocab->Count(Vocabulary::kUnkId), 1);
  EXPECT_EQ(vocab->total_tokens(), 3);
}

TEST(BuildVocabTest, MaxSizeExcludesUnkSlot) {
  auto vocab = BuildVocab({"x", "y", "z"}, {.min_count = 1, .max_size = 2});
  ASSERT_OK(vocab);
  // Equal counts: first occurrence wins.
  EXPECT_THAT(vocab->words(), ElementsAre("UNK", "x", "y"));
  EXPECT_EQ(vocab->Id("z"), Vocabulary::kUnkId);
  EXPECT_EQ(vocab->Count(Vocabulary::kUnkId), 1);
}

TEST(BuildVocabTest, OrdersByDescendingCount) {
  auto vocab = BuildVocab({"c", "b", "b", "a", "a", "a", "c", "d"}, {.min_count = 1});
  ASSERT_OK(vocab);
  EXPECT_THAT(vocab->words(), ElementsAre("UNK", "a", "c", "b", "d"));
}

TEST(BuildVocabTest, Errors) {
  EXPECT_THAT(BuildVocab({}, {}).status().message(), HasSubstr("empty corpus"));
  EXPECT_FALSE(BuildVocab({"a"}, {.min_count = 0}).ok());
}

TEST(BuildVocabTest, LiteralUnkTokenFolds) {
  auto vocab = BuildVocab({"UNK", "UNK", "a"}, {.min_count = 1});
  ASSERT_OK(vocab);
  EXPECT_THAT(vocab->words(), ElementsAre("UNK", "a"));
  EXPECT_EQ(vocab->Count(0), 2);
}

TEST(BuildVocabTest, Invariants) {
  Engine rng(5);
  std::vector<std::string> tokens;
  for (int i = 0; i < 5000; ++i) {
    tokens.push_back("w" + std::to_string(rng() % 300 % (1 + rng() % 300)));
  }
  auto vocab = BuildVocab(tokens, {.min_count = 3});
  ASSERT_OK(vocab);
  const auto& counts = vocab->counts();
  EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}),
            vocab->total_tokens());
  for (WordId id = 0; id < vocab->size(); ++id) {
    EXPECT_EQ(vocab->Id(vocab->Word(id)), id);
    if (id != Vocabulary::kUnkId) EXPECT_GE(vocab->Count(id), 3);
  }
}

TEST(VocabularyTest, SaveLoadRoundTrip) {
  auto vocab = BuildVocab({"a", "b", "b", "c"}, {.min_count = 1});
  ASSERT_OK(vocab);
  const std::string path = testing::TempPath("vocab.txt");
  ASSERT_OK(vocab->Save(path));
  auto loaded = Vocabulary::Load(path);
  ASSERT_OK(loaded);
  EXPECT_EQ(loaded->words(), vocab->words());
  EXPECT_EQ(loaded->counts(), vocab->counts());
  EXPECT_EQ(loaded->total_tokens(), vocab->total_tokens());
  ASSERT_OK(loaded->Save(path + ".2"));
  EXPECT_EQ(testing::ReadFile(path), testing::ReadFile(path + ".2"));
}

TEST(VocabularyTest, LoadRejectsGarbage) {
  EXPECT_FALSE(Vocabulary::Load(testing::WriteFile("v", "hello\n")).ok());
  EXPECT_EQ(Vocabulary::Load("/nonexistent/vocab").status().code(),
            absl::StatusCode::kNotFound);
}

TEST(EncodeTest, Examples) {
  auto vocab = BuildVocab({"a", "a"}, {.min_count = 1});
  ASSERT_OK(vocab);
  const WordId a = *vocab->Find("a");
  EXPECT_THAT(Encode({"a", "zzz"}, *vocab).token_ids, ElementsAre(a, 0));
  EXPECT_THAT(Encode({}, *vocab).token_ids, IsEmpty());
  EXPECT_THAT(Encode({"a", "a"}, *vocab).token_ids, ElementsAre(a, a));
  EXPECT_THAT(Decode(Encode({"a", "zzz"}, *vocab), *vocab), ElementsAre("a", "UNK"));
}

TEST(PlainCorpusTest, OneDocumentPerLineAndTokenLimit) {
  const std::string path = testing::WriteFile("c.txt", "a b c\n\nb c\nc\n");
  auto vocab = BuildVocab({"a", "b", "c"}, {.min_count = 1});
  ASSERT_OK(vocab);
  auto docs = LoadPlainCorpus(path, *vocab, true);
  ASSERT_OK(docs);
  ASSERT_EQ(docs->size(), 3u);
  EXPECT_EQ((*docs)[1].token_ids.size(), 2u);
  auto limited = LoadPlainCorpus(path, *vocab, true, 4);
  ASSERT_OK(limited);
  ASSERT_EQ(limited->size(), 2u);
  EXPECT_EQ((*limited)[1].token_ids.size(), 1u);
}

TEST(ForEachFileTokenTest, HandlesLongLines) {
  std::string text;
  for (int i = 0; i < 300000; ++i) text += (i % 2 ? "bb " : "a ");
  const std::string path = testing::WriteFile("long.txt", text);
  std::int64_t n = 0, a = 0;
  ASSERT_OK(ForEachFileToken(path, true, std::nullopt, [&](std::string_view t) {
    ++n;
    a += t == "a";
  }));
  EXPECT_EQ(n, 300000);
  EXPECT_EQ(a, 150000);
}

TEST(UserCorpusTest, ParsesAndGroups) {
  auto vocab = BuildVocab({"hello", "world", "hi", "there", "a", "b", "c", "d"},
                          {.min_count = 1});
  ASSERT_OK(vocab);
  auto two = LoadUserCorpus(
      testing::WriteFile("u.tsv", "u1\thello world\nu2\thi there\n"), *vocab);
  ASSERT_OK(two);
  ASSERT_EQ(two->num_users(), 2u);
  EXPECT_EQ(two->users()[0].documents.size(), 1u);
  EXPECT_EQ(two->users()[1].documents.size(), 1u);

  auto one = LoadUserCorpus(testing::WriteFile("g.tsv", "u1\ta b\nu1\tc d\n"), *vocab);
  ASSERT_OK(one);
  ASSERT_EQ(one->num_users(), 1u);
  ASSERT_EQ(one->users()[0].documents.size(), 2u);
  EXPECT_EQ(one->users()[0].documents[1].token_ids,
            Encode({"c", "d"}, *vocab).token_ids);
}

TEST(UserCorpusTest, MissingTabReportsLine) {
  auto vocab = BuildVocab({"a"}, {.min_count = 1});
  ASSERT_OK(vocab);
  auto bad = LoadUserCorpus(testing::WriteFile("b.tsv", "bad-line-without-tab\n"),
                            *vocab);
  ASSERT_FALSE(bad.ok());
  EXPECT_THAT(bad.status().message(), HasSubstr(":1:"));
}

TEST(UserCorpusTest, FlattenKeepsUserOrder) {
  auto vocab = BuildVocab({"a", "b", "c"}, {.min_count = 1});
  ASSERT_OK(vocab);
  auto corpus = LoadUserCorpus(
      testing::WriteFile("f.tsv", "u2\ta\nu1\tb\nu2\tc\n"), *vocab);
  ASSERT_OK(corpus);
  const auto flat = corpus->Flatten();
  ASSERT_EQ(flat.size(), 3u);
  EXPECT_EQ(Decode(flat[0], *vocab), std::vector<std::string>{"a"});
  EXPECT_EQ(Decode(flat[1], *vocab), std::vector<std::string>{"c"});
  EXPECT_EQ(Decode(flat[2], *vocab), std::vector<std::string>{"b"});
}

TEST(GeneratePairsTest, SmallCases) {
  Engine rng(1);
  Document xy{{1, 2}};
  EXPECT_THAT(GeneratePairs(xy, {.window = 1}, rng),
              ElementsAre(TrainingPair{1, 2}, TrainingPair{2, 1}));
  EXPECT_THAT(GeneratePairs(Document{{1}}, {.window = 3}, rng), IsEmpty());
  Document abc{{1, 2, 3}};
  EXPECT_THAT(GeneratePairs(abc, {.window = 1, .dynamic_window = false}, rng),
              ElementsAre(TrainingPair{1, 2}, TrainingPair{2, 1}, TrainingPair{2, 3},
                          TrainingPair{3, 2}));
}

TEST(GeneratePairsTest, FixedWindowMatchesEnumeration) {
  Engine rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Document doc;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) doc.token_ids.push_back(static_cast<WordId>(rng() % 5));
    const int window = 1 + static_cast<int>(rng() % 4);
    const auto got = GeneratePairs(doc, {.window = window, .dynamic_window = false}, rng);
    EXPECT_EQ(got, oracle::AllPairs(doc, window));
  }
}

TEST(GeneratePairsTest, DynamicWindowIsSubsetAndDeterministic) {
  Document doc;
  for (int i = 0; i < 40; ++i) doc.token_ids.push_back(i);
  Engine a(9), b(9);
  const auto first = GeneratePairs(doc, {.window = 5}, a);
  EXPECT_EQ(first, GeneratePairs(doc, {.window = 5}, b));
  const auto all = oracle::AllPairs(doc, 5);
  for (const auto& p : first) {
    EXPECT_NE(std::find(all.begin(), all.end(), p), all.end());
  }
  // Every center keeps at least its immediate neighbors.
  for (int t = 0; t < 40; ++t) {
    if (t > 0) {
      EXPECT_NE(std::find(first.begin(), first.end(), TrainingPair{t, t - 1}),
                first.end());
    }
  }
  EXPECT_LT(first.size(), all.size());
}

TEST(GeneratePairsTest, FixedWindowIsSymmetric) {
  Engine rng(4);
  Document doc{{3, 1, 4, 1, 5, 9, 2, 6}};
  const auto pairs = GeneratePairs(doc, {.window = 3, .dynamic_window = false}, rng);
  std::multiset<std::pair<int, int>> fwd, rev;
  for (const auto& p : pairs) {
    fwd.insert({p.center, p.context});
    rev.insert({p.context, p.center});
  }
  EXPECT_EQ(fwd, rev);
}

TEST(SubsampleTest, ZeroThresholdKeepsEverythingOtherwiseDropsFrequent) {
  std::vector<std::string> tokens;
  for (int i = 0; i < 1000; ++i) tokens.push_back(i % 10 ? "the" : "rare");
  auto vocab = BuildVocab(tokens, {.min_count = 1});
  ASSERT_OK(vocab);
  const Document doc = Encode(tokens, *vocab);
  Engine rng(2);
  EXPECT_EQ(SubsampleFrequent(doc, *vocab, 0.0, rng).token_ids, doc.token_ids);
  const Document kept = SubsampleFrequent(doc, *vocab, 1e-3, rng);
  const auto rare_id = *vocab->Find("rare");
  const auto rare = std::count(kept.token_ids.begin(), kept.token_ids.end(), rare_id);
  EXPECT_LT(kept.token_ids.size(), doc.token_ids.size());
  EXPECT_GT(rare, 0);
}

}  // namespace
}  // namespace dpugc
