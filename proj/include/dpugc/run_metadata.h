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

// Metadata shipped next to every model file: how it was trained and what
// privacy guarantee it carries.

#ifndef DPUGC_RUN_METADATA_H_
#define DPUGC_RUN_METADATA_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpugc/corpus.h"
#include "dpugc/dp_sgd.h"
#include "json.hpp"

namespace dpugc {

inline constexpr int kMetadataSchemaVersion = 1;
inline constexpr char kToolVersion[] = "0.1.0";

struct CorpusSettings {
  std::string corpus_path;
  std::string user_corpus_path;
  std::string vocab_path;
  std::int64_t min_count = 5;
  std::int64_t max_size = 0;
  std::int64_t max_tokens = 0;  // 0 = whole corpus
  bool lowercase = true;
  PairOptions pairs;
  double subsample = 0.0;
};

struct RunMetadata {
  std::string mode;  // plain | dp | personalized | gold
  DpConfig config;
  CorpusSettings corpus;
  std::string corpus_fingerprint;
  std::int64_t step = 0;
  // Absent for runs without a privacy guarantee.
  std::optional<double> epsilon;
  double delta = 0.0;
  std::optional<double> delta_at_target_epsilon;
  std::string spend_report;
  std::string created_at;  // excluded from reproducibility comparisons
  std::string tool_version = kToolVersion;
  int schema_version = kMetadataSchemaVersion;

  bool is_private() const { return mode == "dp" || mode == "personalized"; }
};

nlohmann::ordered_json MetadataToJson(const RunMetadata& meta);
absl::StatusOr<RunMetadata> MetadataFromJson(const nlohmann::json& j);

absl::Status WriteMetadata(const std::string& path, const RunMetadata& meta);
absl::StatusOr<RunMetadata> ReadMetadata(const std::string& path);

// `model.vec` -> `model.json`.
std::string MetadataPathFor(const std::string& model_path);

// Lower-case hex SHA-256 of the file contents.
absl::StatusOr<std::string> Sha256File(const std::string& path);

std::string UtcTimestamp();

}  // namespace dpugc

#endif  // DPUGC_RUN_METADATA_H_
