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

#include "dpugc/word2vec.h"

#include <algorithm>
#include <cmath>

#include "dpugc/dp_sgd.h"
#include "dpugc/status_macros.h"
#include "absl/strings/str_cat.h"

namespace dpugc {

absl::StatusOr<EmbeddingModel> TrainSkipGram(const std::vector<Document>& docs,
                                             const Vocabulary& vocab,
                                             const SkipGramOptions& options) {
  if (options.dim < 1 || options.epochs < 0 || options.negatives < 1) {
    return absl::InvalidArgumentError("bad skip-gram options");
  }
  EmbeddingModel model = InitModel(vocab.size(), options.dim, options.seed);
  const NegativeSampler sampler(vocab.counts());
  Engine pair_rng = MakeEngine(options.seed, RngStream::kPairs);
  Engine sampling_rng = MakeEngine(options.seed, RngStream::kSampling);

  std::int64_t total_tokens = 0;
  for (const auto& d : docs) total_tokens += static_cast<std::int64_t>(d.token_ids.size());
  const double budget = std::max<double>(
      1.0, static_cast<double>(total_tokens) * options.epochs);
  std::int64_t processed = 0;

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (const auto& raw : docs) {
      const Document doc =
          options.subsample > 0
              ? SubsampleFrequent(raw, vocab, options.subsample, pair_rng)
              : raw;
      const auto pairs = GeneratePairs(doc, options.pairs, pair_rng);
      const double doc_len = static_cast<double>(raw.token_ids.size());
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const TrainingPair& pair = pairs[i];
        // Linear decay by token position, as in the reference implementation.
        const double progress =
            (static_cast<double>(processed) +
             doc_len * static_cast<double>(i) / static_cast<double>(pairs.size())) /
            budget;
        const double lr = std::max(
            options.lr_final,
            options.lr_initial + (options.lr_final - options.lr_initial) * progress);
        ASSIGN_OR_RETURN(auto negatives,
                         SampleNegatives(sampler, options.negatives,
                                         pair.context, sampling_rng));
        SparseGradient g = NegGradient(model, pair, negatives);
        if (options.clip_norm) g = ClipGradient(std::move(g), *options.clip_norm);
        if (!g.AllFinite()) {
          return absl::InternalError(
              absl::StrCat("numerical blow-up in epoch ", epoch));
        }
        for (std::size_t r = 0; r < g.num_rows(); ++r) {
          const RowKey key = g.keys()[r];
          auto theta = key.matrix == Matrix::kInput ? model.input_row(key.row)
                                                    : model.output_row(key.row);
          const auto grad = g.row(r);
          for (int j = 0; j < options.dim; ++j) theta[j] -= lr * grad[j];
        }
      }
      processed += static_cast<std::int64_t>(raw.token_ids.size());
    }
  }
  return model;
}

}  // namespace dpugc
