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

// Classic online skip-gram trainer (one SGD update per pair, no clipping by
// default). Used to produce gold and public reference models.

#ifndef DPUGC_WORD2VEC_H_
#define DPUGC_WORD2VEC_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "dpugc/corpus.h"
#include "dpugc/model.h"

namespace dpugc {

struct SkipGramOptions {
  int dim = 100;
  PairOptions pairs;
  int negatives = kDefaultNegatives;
  int epochs = 5;
  double lr_initial = 0.025;
  double lr_final = 0.0001;
  std::optional<double> clip_norm;
  // Frequent-word subsampling threshold; 0 disables.
  double subsample = 0.0;
  std::uint64_t seed = 1;
};

absl::StatusOr<EmbeddingModel> TrainSkipGram(const std::vector<Document>& docs,
                                             const Vocabulary& vocab,
                                             const SkipGramOptions& options);

}  // namespace dpugc

#endif  // DPUGC_WORD2VEC_H_
