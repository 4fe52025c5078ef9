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

// Differentially private SGD for skip-gram: per-example clipping, Poisson lot
// sampling, Gaussian noise over the full parameter vector, and the training
// loop that drives it. The clipped non-private baseline shares the same code
// path with the noise switched off.

#ifndef DPUGC_DP_SGD_H_
#define DPUGC_DP_SGD_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpugc/accountant.h"
#include "dpugc/corpus.h"
#include "dpugc/model.h"
#include "dpugc/random.h"

namespace dpugc {

enum class TrainMode { kPlain, kDp };

struct DpConfig {
  TrainMode mode = TrainMode::kDp;
  int dim = 100;
  int negatives = kDefaultNegatives;
  double clip_norm = 1.0;
  // Plain mode only: skip clipping entirely.
  bool clip = true;
  double noise_multiplier = 1.0;
  // Expected lot size L. The sampling ratio is L / N.
  std::int64_t lot_size = 1000;
  // N, the number of examples. Filled in from the data when left at 0.
  std::int64_t total_examples = 0;
  std::int64_t steps = 1000;
  double lr_initial = 0.025;
  double lr_final = 0.0001;
  double target_delta = 1e-5;
  // Fixed epsilon for the (epsilon, delta(epsilon)) view of the ledger.
  double target_epsilon = 0.125;
  std::uint64_t seed = 1;
  // Noise only on touched rows. Fast, but carries no formal guarantee.
  bool sparse_noise = false;
  int threads = 1;
  // Steps after which the checkpoint callback fires (0 = initial model).
  std::vector<std::int64_t> checkpoints;

  double sampling_ratio() const {
    return static_cast<double>(lot_size) / static_cast<double>(total_examples);
  }
  bool noisy() const {
    return mode == TrainMode::kDp && noise_multiplier > 0.0;
  }
};

absl::Status ValidateConfig(const DpConfig& config);

// eta_t, interpolated linearly from lr_initial (t = 0) to lr_final
// (t = steps - 1).
double LearningRate(const DpConfig& config, std::int64_t t);

// g * min(1, C / ||g||_2), norm taken jointly over all touched coordinates.
SparseGradient ClipGradient(SparseGradient g, double clip_norm);

// Each index in [0, n) is kept independently with probability q. Indices come
// back in ascending order.
std::vector<std::int64_t> PoissonSample(std::int64_t n, double q, Engine& rng);

// Same, over an explicit candidate list; returns positions into `candidates`.
std::vector<std::int64_t> PoissonSamplePositions(std::size_t n, double q,
                                                 Engine& rng);

struct StepParams {
  std::int64_t step = 0;  // 0-based, used in error messages
  double lr = 0.025;
  std::optional<double> clip_norm = 1.0;
  // Divisor applied to the gradient sum (the configured L for DP-SGD).
  double normalizer = 1.0;
  double noise_stddev = 0.0;  // sigma * C; 0 disables noise
  bool sparse_noise = false;
  int negatives = kDefaultNegatives;
  int threads = 1;
};

struct StepStats {
  double mean_loss = std::numeric_limits<double>::quiet_NaN();
  std::int64_t lot_size = 0;
  double max_clipped_norm = 0.0;
};

// One descent step on `lot`: draw negatives (from `sampling_rng`, in lot
// order), compute per-example gradients, clip, sum, add noise (from
// `noise_rng`), scale by 1/normalizer and descend. The model is left
// untouched when an error is returned for a non-finite gradient.
absl::StatusOr<StepStats> ApplyLotStep(EmbeddingModel& model,
                                       std::span<const TrainingPair> lot,
                                       const NegativeSampler& sampler,
                                       const StepParams& params,
                                       Engine& sampling_rng,
                                       Engine* noise_rng);

// Step parameters for step t of a run configured by `config`.
StepParams StepParamsFor(const DpConfig& config, std::int64_t step);

// Non-private baseline: theta -= lr / |pairs| * sum clip(g_i, C). Pass
// `normalizer` to divide by a fixed L instead of the realized lot size.
absl::StatusOr<StepStats> SgdStep(EmbeddingModel& model,
                                  std::span<const TrainingPair> pairs,
                                  const NegativeSampler& sampler, double lr,
                                  std::optional<double> clip_norm,
                                  Engine& sampling_rng,
                                  std::optional<double> normalizer = std::nullopt,
                                  int negatives = kDefaultNegatives);

// One step of Algorithm-style DP-SGD on an already sampled lot. Charges the
// accountant once with (q, sigma) when sigma > 0.
absl::StatusOr<StepStats> DpSgdStep(EmbeddingModel& model,
                                    std::span<const TrainingPair> lot,
                                    const NegativeSampler& sampler,
                                    const DpConfig& config, std::int64_t step,
                                    PrivacyAccountant* accountant,
                                    Engine& sampling_rng, Engine& noise_rng);

struct StepRecord {
  std::int64_t step = 0;  // 1-based: state after this many steps
  double loss = std::numeric_limits<double>::quiet_NaN();
  double epsilon = std::numeric_limits<double>::infinity();  // at target delta
  double delta = 1.0;                 // the target delta the epsilon refers to
  double delta_at_target_epsilon = 1.0;
  std::int64_t lot_size = 0;
  std::int64_t valid_examples = -1;  // personalized mode only
};

struct TrainingLog {
  std::vector<StepRecord> records;

  // `step,loss,epsilon,delta,lot_size` (+`,valid_examples` when present).
  std::string ToCsv() const;
  absl::Status WriteCsv(const std::string& path) const;
};

// Fired after each step with the sampled lot (indices into the example list).
struct StepTrace {
  std::int64_t step = 0;
  std::span<const std::int64_t> lot;
  const StepRecord* record = nullptr;
};

using CheckpointFn = std::function<absl::Status(
    std::int64_t step, const EmbeddingModel& model, const StepRecord& record)>;
using TraceFn = std::function<void(const StepTrace&)>;

struct TrainResult {
  EmbeddingModel model;
  TrainingLog log;
  PrivacyAccountant accountant;
};

struct TrainHooks {
  CheckpointFn on_checkpoint;
  TraceFn on_step;
};

// Runs config.steps rounds of Poisson sampling + (DP-)SGD over `examples`.
// On a numerical failure the error is returned and checkpoints already
// emitted stay valid.
absl::StatusOr<TrainResult> TrainDp(std::span<const TrainingPair> examples,
                                    const Vocabulary& vocab, DpConfig config,
                                    const TrainHooks& hooks = {});

// Pairs for every document, generated from the kPairs stream of `seed`.
std::vector<TrainingPair> BuildExamples(const std::vector<Document>& docs,
                                        const PairOptions& options,
                                        std::uint64_t seed);

}  // namespace dpugc

#endif  // DPUGC_DP_SGD_H_
