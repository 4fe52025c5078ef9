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

// Text ingestion: tokenization, vocabulary construction, document encoding,
// user-tagged corpora and skip-gram pair generation.

#ifndef DPUGC_CORPUS_H_
#define DPUGC_CORPUS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpugc/random.h"

namespace dpugc {

using WordId = std::int32_t;

// Splits on ASCII whitespace. Lowercasing is ASCII-only; UTF-8 multibyte
// sequences pass through untouched.
std::vector<std::string> Tokenize(std::string_view text, bool lowercase);

// Streams whitespace-separated tokens from a file without materializing the
// whole corpus. Stops after `max_tokens` tokens when set.
absl::Status ForEachFileToken(const std::string& path, bool lowercase,
                              std::optional<std::int64_t> max_tokens,
                              const std::function<void(std::string_view)>& fn);

struct VocabOptions {
  std::int64_t min_count = 5;
  // Number of real words kept, not counting the reserved UNK slot. 0 means
  // unbounded.
  std::int64_t max_size = 0;
};

class Vocabulary {
 public:
  static constexpr WordId kUnkId = 0;
  static constexpr std::string_view kUnkToken = "UNK";

  Vocabulary() = default;

  // Restores a vocabulary from id-ordered entries (id 0 must be UNK).
  static absl::StatusOr<Vocabulary> FromEntries(std::vector<std::string> words,
                                                std::vector<std::int64_t> counts);

  static absl::StatusOr<Vocabulary> Load(const std::string& path);
  absl::Status Save(const std::string& path) const;

  std::int32_t size() const { return static_cast<std::int32_t>(words_.size()); }
  std::int64_t total_tokens() const { return total_tokens_; }
  WordId unk_id() const { return kUnkId; }

  // Out-of-vocabulary words map to UNK.
  WordId Id(std::string_view word) const;
  std::optional<WordId> Find(std::string_view word) const;
  const std::string& Word(WordId id) const { return words_[id]; }
  std::int64_t Count(WordId id) const { return counts_[id]; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, WordId> index_;
  std::int64_t total_tokens_ = 0;
};

// Accumulates token frequencies in stream order, then freezes them into a
// Vocabulary. Ids are assigned by descending count; ties go to the token seen
// first.
class VocabBuilder {
 public:
  void Add(std::string_view token);
  std::int64_t tokens_seen() const { return total_; }
  absl::StatusOr<Vocabulary> Build(const VocabOptions& options) const;

 private:
  struct Entry {
    std::int64_t count = 0;
    std::int64_t first_seen = 0;
  };
  std::unordered_map<std::string, Entry> entries_;
  std::int64_t total_ = 0;
};

absl::StatusOr<Vocabulary> BuildVocab(const std::vector<std::string>& tokens,
                                      const VocabOptions& options);

struct Document {
  std::vector<WordId> token_ids;
};

Document Encode(const std::vector<std::string>& tokens, const Vocabulary& vocab);
std::vector<std::string> Decode(const Document& doc, const Vocabulary& vocab);

// Reads a plain corpus file into documents: one document per non-empty line
// (a text8-style file is one document).
absl::StatusOr<std::vector<Document>> LoadPlainCorpus(
    const std::string& path, const Vocabulary& vocab, bool lowercase,
    std::optional<std::int64_t> max_tokens = std::nullopt);

// One raw line of a `user_id<TAB>text` file.
struct UserRecord {
  std::string user_id;
  std::string text;
};

absl::StatusOr<std::vector<UserRecord>> ReadUserRecords(const std::string& path);

struct UserData {
  std::string user_id;
  std::vector<Document> documents;
};

// Users are kept in order of first appearance in the source file so that
// flattening is deterministic.
class UserCorpus {
 public:
  static absl::StatusOr<UserCorpus> FromRecords(
      const std::vector<UserRecord>& records, const Vocabulary& vocab,
      bool lowercase);

  const std::vector<UserData>& users() const { return users_; }
  std::size_t num_users() const { return users_.size(); }
  std::optional<std::size_t> Find(std::string_view user_id) const;

  // All documents in user order, then line order within a user.
  std::vector<Document> Flatten() const;

 private:
  std::vector<UserData> users_;
  std::unordered_map<std::string, std::size_t> index_;
};

absl::StatusOr<UserCorpus> LoadUserCorpus(const std::string& path,
                                          const Vocabulary& vocab,
                                          bool lowercase = true);

struct TrainingPair {
  WordId center = 0;
  WordId context = 0;

  friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

struct PairOptions {
  int window = 5;
  // word2vec draws an effective window b ~ U{1..window} per center word.
  bool dynamic_window = true;
};

// Pairs are emitted center by center, left context before right context.
std::vector<TrainingPair> GeneratePairs(const Document& doc,
                                        const PairOptions& options,
                                        Engine& rng);

// Frequent-word subsampling with threshold t (word2vec formula). Returns a
// new document with dropped tokens removed.
Document SubsampleFrequent(const Document& doc, const Vocabulary& vocab,
                           double threshold, Engine& rng);

}  // namespace dpugc

#endif  // DPUGC_CORPUS_H_
