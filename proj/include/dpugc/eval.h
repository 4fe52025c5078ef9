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

// Semantic-drift evaluation: how far a model's top-K neighbour lists move away
// from those of a reference ("gold") model.

#ifndef DPUGC_EVAL_H_
#define DPUGC_EVAL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpugc/model.h"

namespace dpugc {

inline constexpr int kDefaultTopK = 100;

// (sum over hit positions p of hits_upto_p / p) / K, K = |gold|.
double AveragePrecision(std::span<const std::string> returned,
                        std::span<const std::string> gold);

// Dice coefficient of character-bigram multisets, words padded as ^word$.
double BigramDice(std::string_view a, std::string_view b);

// Best bigram Dice against any gold word; 1.0 for an exact member.
double CharRelevance(std::string_view word, std::span<const std::string> gold);

// Graded AP: sum_p rel_p * (sum_{j<=p} rel_j) / p, over sum_p rel_p.
// Zero when every relevance is zero.
double GradedAveragePrecision(std::span<const double> relevances);

struct QueryScore {
  std::string query;
  double ap_word = 0.0;
  double ap_char = 0.0;
};

struct MapResult {
  double map_word = 0.0;
  double map_char = 0.0;
  std::vector<QueryScore> per_query;
  // Queries missing from either vocabulary; they do not count towards Q.
  std::vector<std::string> skipped;
};

// Both MAP-Word and MAP-Char for one model against the gold model.
MapResult EvaluateMap(const Embeddings& model, const Embeddings& gold,
                      std::span<const std::string> queries, int k);

double MapWord(const Embeddings& model, const Embeddings& gold,
               std::span<const std::string> queries, int k);
double MapChar(const Embeddings& model, const Embeddings& gold,
               std::span<const std::string> queries, int k);

// The eleven default queries: "three", "eight", "they" and eight frequent
// text8 words.
std::vector<std::string> DefaultQueries();

absl::StatusOr<std::vector<std::string>> LoadQueries(const std::string& path);

struct DriftCheckpoint {
  std::int64_t step = 0;
  std::string variant;  // e.g. "dp", "nonedp"
  const Embeddings* model = nullptr;
  double epsilon = 0.0;
  double delta = 0.0;
};

struct DriftRow {
  std::int64_t step = 0;
  std::string variant;
  MapResult scores;
  double epsilon = 0.0;
  double delta = 0.0;
};

struct EvalReport {
  std::vector<DriftRow> rows;

  // `step,variant,map_word,map_char,epsilon,delta`
  std::string ToCsv() const;
  absl::Status WriteCsv(const std::string& path) const;
};

EvalReport DriftReport(std::span<const DriftCheckpoint> checkpoints,
                       const Embeddings& gold,
                       std::span<const std::string> queries, int k);

}  // namespace dpugc

#endif  // DPUGC_EVAL_H_
