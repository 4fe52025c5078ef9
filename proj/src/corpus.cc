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
#include <cmath>
#include <fstream>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace dpugc {
namespace {

constexpr std::string_view kVocabMagic = "dpugc-vocab 1";

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Chunked scanner shared by the plain-corpus readers. `on_line_end` fires at
// every newline and once at end of input.
absl::Status ScanFile(const std::string& path, bool lowercase,
                      std::optional<std::int64_t> max_tokens,
                      const std::function<void(std::string_view)>& on_token,
                      const std::function<void()>& on_line_end) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open corpus: ", path));
  }
  constexpr std::size_t kChunk = 1 << 20;
  std::vector<char> buf(kChunk);
  std::string pending;
  std::int64_t emitted = 0;
  auto flush = [&]() -> bool {
    if (pending.empty()) return true;
    if (max_tokens && emitted >= *max_tokens) return false;
    if (lowercase) absl::AsciiStrToLower(&pending);
    on_token(pending);
    ++emitted;
    pending.clear();
    return !(max_tokens && emitted >= *max_tokens);
  };
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      const char c = buf[i];
      if (IsSpace(c)) {
        if (!flush()) {
          on_line_end();
          return absl::OkStatus();
        }
        if (c == '\n') on_line_end();
      } else {
        pending.push_back(c);
      }
    }
  }
  flush();
  on_line_end();
  return absl::OkStatus();
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text, bool lowercase) {
  std::vector<std::string> tokens =
      absl::StrSplit(absl::string_view(text.data(), text.size()),
                     absl::ByAnyChar(" \t\n\r\f\v"), absl::SkipEmpty());
  if (lowercase) {
    for (auto& t : tokens) absl::AsciiStrToLower(&t);
  }
  return tokens;
}

absl::Status ForEachFileToken(const std::string& path, bool lowercase,
                              std::optional<std::int64_t> max_tokens,
                              const std::function<void(std::string_view)>& fn) {
  return ScanFile(path, lowercase, max_tokens, fn, [] {});
}

absl::StatusOr<Vocabulary> Vocabulary::FromEntries(
    std::vector<std::string> words, std::vector<std::int64_t> counts) {
  if (words.empty() || words[0] != kUnkToken) {
    return absl::InvalidArgumentError("vocabulary must start with UNK");
  }
  if (words.size() != counts.size()) {
    return absl::InvalidArgumentError("vocabulary words/counts size mismatch");
  }
  Vocabulary v;
  v.index_.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (counts[i] < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("negative count for '", words[i], "'"));
    }
    if (!v.index_.emplace(words[i], static_cast<WordId>(i)).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate vocabulary entry '", words[i], "'"));
    }
    v.total_tokens_ += counts[i];
  }
  v.words_ = std::move(words);
  v.counts_ = std::move(counts);
  return v;
}

absl::StatusOr<Vocabulary> Vocabulary::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open vocabulary: ", path));
  }
  std::string line;
  if (!std::getline(in, line) || line != kVocabMagic) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": not a dpugc vocabulary file"));
  }
  std::int64_t size = 0;
  std::int64_t total = 0;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": missing header"));
  }
  {
    std::istringstream hdr(line);
    if (!(hdr >> size >> total) || size < 1) {
      return absl::InvalidArgumentError(absl::StrCat(path, ": bad header"));
    }
  }
  std::vector<std::string> words;
  std::vector<std::int64_t> counts;
  words.reserve(size);
  counts.reserve(size);
  int line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<absl::string_view> parts = absl::StrSplit(line, '\t');
    std::int64_t c = 0;
    if (parts.size() != 2 || !absl::SimpleAtoi(parts[1], &c)) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": malformed vocabulary entry"));
    }
    words.emplace_back(parts[0]);
    counts.push_back(c);
  }
  if (static_cast<std::int64_t>(words.size()) != size) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": expected ", size, " entries, found ", words.size()));
  }
  auto v = FromEntries(std::move(words), std::move(counts));
  if (v.ok() && v->total_tokens() != total) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": counts do not sum to total_tokens"));
  }
  return v;
}

absl::Status Vocabulary::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  }
  out << kVocabMagic << '\n' << words_.size() << ' ' << total_tokens_ << '\n';
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out << words_[i] << '\t' << counts_[i] << '\n';
  }
  out.flush();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

WordId Vocabulary::Id(std::string_view word) const {
  return Find(word).value_or(kUnkId);
}

std::optional<WordId> Vocabulary::Find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void VocabBuilder::Add(std::string_view token) {
  auto [it, inserted] = entries_.try_emplace(std::string(token));
  if (inserted) it->second.first_seen = total_;
  ++it->second.count;
  ++total_;
}

absl::StatusOr<Vocabulary> VocabBuilder::Build(
    const VocabOptions& options) const {
  if (options.min_count < 1) {
    return absl::InvalidArgumentError("min_count must be >= 1");
  }
  if (options.max_size < 0) {
    return absl::InvalidArgumentError("max_size must be >= 0");
  }
  if (total_ == 0) return absl::InvalidArgumentError("empty corpus");

  struct Candidate {
    const std::string* word;
    Entry entry;
  };
  std::vector<Candidate> candidates;
  for (const auto& [word, entry] : entries_) {
    // A literal UNK in the text is the UNK token, not a separate word.
    if (word == Vocabulary::kUnkToken) continue;
    if (entry.count >= options.min_count) candidates.push_back({&word, entry});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.entry.count != b.entry.count) {
                return a.entry.count > b.entry.count;
              }
              return a.entry.first_seen < b.entry.first_seen;
            });
  if (options.max_size > 0 &&
      static_cast<std::int64_t>(candidates.size()) > options.max_size) {
    candidates.resize(options.max_size);
  }

  std::vector<std::string> words{std::string(Vocabulary::kUnkToken)};
  std::vector<std::int64_t> counts{0};
  std::int64_t kept = 0;
  for (const auto& c : candidates) {
    words.push_back(*c.word);
    counts.push_back(c.entry.count);
    kept += c.entry.count;
  }
  counts[0] = total_ - kept;
  return Vocabulary::FromEntries(std::move(words), std::move(counts));
}

absl::StatusOr<Vocabulary> BuildVocab(const std::vector<std::string>& tokens,
                                      const VocabOptions& options) {
  VocabBuilder builder;
  for (const auto& t : tokens) builder.Add(t);
  return builder.Build(options);
}

Document Encode(const std::vector<std::string>& tokens,
                const Vocabulary& vocab) {
  Document doc;
  doc.token_ids.reserve(tokens.size());
  for (const auto& t : tokens) doc.token_ids.push_back(vocab.Id(t));
  return doc;
}

std::vector<std::string> Decode(const Document& doc, const Vocabulary& vocab) {
  std::vector<std::string> out;
  out.reserve(doc.token_ids.size());
  for (WordId id : doc.token_ids) out.push_back(vocab.Word(id));
  return out;
}

absl::StatusOr<std::vector<Document>> LoadPlainCorpus(
    const std::string& path, const Vocabulary& vocab, bool lowercase,
    std::optional<std::int64_t> max_tokens) {
  std::vector<Document> docs;
  Document current;
  absl::Status s = ScanFile(
      path, lowercase, max_tokens,
      [&](std::string_view tok) { current.token_ids.push_back(vocab.Id(tok)); },
      [&] {
        if (!current.token_ids.empty()) {
          docs.push_back(std::move(current));
          current = Document{};
        }
      });
  if (!s.ok()) return s;
  return docs;
}

absl::StatusOr<std::vector<UserRecord>> ReadUserRecords(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open user corpus: ", path));
  }
  std::vector<UserRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": missing tab separator"));
    }
    if (tab == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": empty user id"));
    }
    records.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return records;
}

absl::StatusOr<UserCorpus> UserCorpus::FromRecords(
    const std::vector<UserRecord>& records, const Vocabulary& vocab,
    bool lowercase) {
  UserCorpus corpus;
  for (const auto& r : records) {
    if (r.user_id.empty()) {
      return absl::InvalidArgumentError("empty user id");
    }
    auto [it, inserted] = corpus.index_.try_emplace(r.user_id, corpus.users_.size());
    if (inserted) corpus.users_.push_back(UserData{r.user_id, {}});
    corpus.users_[it->second].documents.push_back(
        Encode(Tokenize(r.text, lowercase), vocab));
  }
  return corpus;
}

std::optional<std::size_t> UserCorpus::Find(std::string_view user_id) const {
  auto it = index_.find(std::string(user_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Document> UserCorpus::Flatten() const {
  std::vector<Document> docs;
  for (const auto& u : users_) {
    docs.insert(docs.end(), u.documents.begin(), u.documents.end());
  }
  return docs;
}

absl::StatusOr<UserCorpus> LoadUserCorpus(const std::string& path,
                                          const Vocabulary& vocab,
                                          bool lowercase) {
  auto records = ReadUserRecords(path);
  if (!records.ok()) return records.status();
  return UserCorpus::FromRecords(*records, vocab, lowercase);
}

std::vector<TrainingPair> GeneratePairs(const Document& doc,
                                        const PairOptions& options,
                                        Engine& rng) {
  std::vector<TrainingPair> pairs;
  const auto& ids = doc.token_ids;
  const int n = static_cast<int>(ids.size());
  if (n < 2 || options.window < 1) return pairs;
  boost::random::uniform_int_distribution<int> span(1, options.window);
  for (int t = 0; t < n; ++t) {
    const int b = options.dynamic_window ? span(rng) : options.window;
    const int lo = std::max(0, t - b);
    const int hi = std::min(n - 1, t + b);
    for (int j = lo; j <= hi; ++j) {
      if (j == t) continue;
      pairs.push_back({ids[t], ids[j]});
    }
  }
  return pairs;
}

Document SubsampleFrequent(const Document& doc, const Vocabulary& vocab,
                           double threshold, Engine& rng) {
  if (threshold <= 0.0) return doc;
  boost::random::uniform_real_distribution<double> unif(0.0, 1.0);
  const double scaled = threshold * static_cast<double>(vocab.total_tokens());
  Document out;
  out.token_ids.reserve(doc.token_ids.size());
  for (WordId id : doc.token_ids) {
    const double f = static_cast<double>(vocab.Count(id));
    const double keep = f > 0 ? (std::sqrt(f / scaled) + 1.0) * scaled / f : 1.0;
    if (keep >= 1.0 || unif(rng) < keep) out.token_ids.push_back(id);
  }
  return out;
}

}  // namespace dpugc
