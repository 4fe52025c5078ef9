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

#include "dpugc/dp_sgd.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>
#include <unordered_map>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dpugc/status_macros.h"
#include <boost/random/geometric_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

namespace dpugc {
namespace {

std::uint64_t PackKey(RowKey key) {
  return (static_cast<std::uint64_t>(key.matrix) << 32) |
         static_cast<std::uint32_t>(key.row);
}

absl::Status NumericalBlowUp(std::int64_t step) {
  return absl::InternalError(absl::StrCat("numerical blow-up at step ", step));
}

// Runs fn(i) for i in [0, n) over up to `threads` workers. Callers write
// results into per-index slots, so completion order does not matter.
template <typename Fn>
void ParallelFor(std::size_t n, int threads, const Fn& fn) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n / 64, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&fn, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return absl::StrFormat("%.10g", v);
}

}  // namespace

absl::Status ValidateConfig(const DpConfig& config) {
  if (config.dim < 1) return absl::InvalidArgumentError("dim must be >= 1");
  if (config.negatives < 1) {
    return absl::InvalidArgumentError("negatives must be >= 1");
  }
  if (!(config.clip_norm > 0.0)) {
    return absl::InvalidArgumentError("clip norm C must be > 0");
  }
  if (!(config.noise_multiplier >= 0.0)) {
    return absl::InvalidArgumentError("noise multiplier must be >= 0");
  }
  if (config.lot_size < 1) {
    return absl::InvalidArgumentError("lot size must be >= 1");
  }
  if (config.total_examples < 1) {
    return absl::InvalidArgumentError("no training examples");
  }
  if (config.lot_size > config.total_examples) {
    return absl::InvalidArgumentError(
        absl::StrCat("lot size ", config.lot_size, " exceeds example count ",
                     config.total_examples));
  }
  if (config.steps < 0) return absl::InvalidArgumentError("steps must be >= 0");
  if (!(config.lr_initial > 0.0) || !(config.lr_final > 0.0)) {
    return absl::InvalidArgumentError("learning rates must be > 0");
  }
  if (!(config.target_delta > 0.0 && config.target_delta < 1.0)) {
    return absl::InvalidArgumentError("delta must be in (0, 1)");
  }
  if (!(config.target_epsilon > 0.0)) {
    return absl::InvalidArgumentError("target epsilon must be > 0");
  }
  for (std::int64_t c : config.checkpoints) {
    if (c < 0 || c > config.steps) {
      return absl::InvalidArgumentError(
          absl::StrCat("checkpoint ", c, " outside [0, ", config.steps, "]"));
    }
  }
  return absl::OkStatus();
}

double LearningRate(const DpConfig& config, std::int64_t t) {
  if (config.steps <= 1) return config.lr_initial;
  const double frac =
      static_cast<double>(t) / static_cast<double>(config.steps - 1);
  return (1.0 - frac) * config.lr_initial + frac * config.lr_final;
}

SparseGradient ClipGradient(SparseGradient g, double clip_norm) {
  const double norm = g.Norm();
  if (norm > clip_norm) g.Scale(clip_norm / norm);
  return g;
}

std::vector<std::int64_t> PoissonSample(std::int64_t n, double q, Engine& rng) {
  std::vector<std::int64_t> out;
  if (n <= 0 || q <= 0.0) return out;
  if (q >= 1.0) {
    out.resize(n);
    for (std::int64_t i = 0; i < n; ++i) out[i] = i;
    return out;
  }
  // Gaps between kept indices are geometric, so the cost is O(lot size).
  boost::random::geometric_distribution<std::int64_t, double> gap(q);
  out.reserve(static_cast<std::size_t>(q * static_cast<double>(n) * 1.2) + 16);
  std::int64_t pos = -1;
  while (true) {
    const std::int64_t g = gap(rng);
    if (g >= n - pos - 1) break;
    pos += 1 + g;
    out.push_back(pos);
  }
  return out;
}

std::vector<std::int64_t> PoissonSamplePositions(std::size_t n, double q,
                                                 Engine& rng) {
  return PoissonSample(static_cast<std::int64_t>(n), q, rng);
}

absl::StatusOr<StepStats> ApplyLotStep(EmbeddingModel& model,
                                       std::span<const TrainingPair> lot,
                                       const NegativeSampler& sampler,
                                       const StepParams& params,
                                       Engine& sampling_rng,
                                       Engine* noise_rng) {
  const int dim = model.dim();
  const int m = params.negatives;
  StepStats stats;
  stats.lot_size = static_cast<std::int64_t>(lot.size());

  std::vector<WordId> negatives(lot.size() * m);
  for (std::size_t i = 0; i < lot.size(); ++i) {
    ASSIGN_OR_RETURN(auto drawn,
                     SampleNegatives(sampler, m, lot[i].context, sampling_rng));
    std::copy(drawn.begin(), drawn.end(), negatives.begin() + i * m);
  }

  std::vector<SparseGradient> grads(lot.size());
  std::vector<double> losses(lot.size(), 0.0);
  ParallelFor(lot.size(), params.threads, [&](std::size_t i) {
    std::span<const WordId> neg(negatives.data() + i * m, m);
    grads[i] = NegGradientAndLoss(model, lot[i], neg, &losses[i]);
    if (params.clip_norm) grads[i] = ClipGradient(std::move(grads[i]), *params.clip_norm);
  });

  // Fixed-order reduction: lot order, then row order within an example.
  std::unordered_map<std::uint64_t, std::size_t> slot_of;
  std::vector<RowKey> slot_keys;
  std::vector<double> sums;
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < grads.size(); ++i) {
    const SparseGradient& g = grads[i];
    if (!g.AllFinite() || !std::isfinite(losses[i])) {
      return NumericalBlowUp(params.step);
    }
    const double norm = g.Norm();
    stats.max_clipped_norm = std::max(stats.max_clipped_norm, norm);
    if (params.clip_norm) {
      assert(norm <= *params.clip_norm * (1.0 + 1e-12));
    }
    loss_sum += losses[i];
    for (std::size_t r = 0; r < g.num_rows(); ++r) {
      auto [it, inserted] = slot_of.try_emplace(PackKey(g.keys()[r]), slot_keys.size());
      if (inserted) {
        slot_keys.push_back(g.keys()[r]);
        sums.resize(sums.size() + dim, 0.0);
      }
      double* dst = sums.data() + it->second * dim;
      const auto src = g.row(r);
      for (int j = 0; j < dim; ++j) dst[j] += src[j];
    }
  }
  if (!lot.empty()) stats.mean_loss = loss_sum / static_cast<double>(lot.size());

  const double scale = params.lr / params.normalizer;
  auto row_of = [&](RowKey key) {
    return key.matrix == Matrix::kInput ? model.input_row(key.row)
                                        : model.output_row(key.row);
  };

  if (params.noise_stddev > 0.0 && noise_rng != nullptr) {
    boost::random::normal_distribution<double> noise(0.0, params.noise_stddev);
    if (params.sparse_noise) {
      for (std::size_t s = 0; s < slot_keys.size(); ++s) {
        auto theta = row_of(slot_keys[s]);
        const double* sum = sums.data() + s * dim;
        for (int j = 0; j < dim; ++j) theta[j] -= scale * (sum[j] + noise(*noise_rng));
      }
    } else {
      // Every coordinate of W then W' gets fresh noise, touched or not.
      bool finite = true;
      for (Matrix mat : {Matrix::kInput, Matrix::kOutput}) {
        auto& params_vec = mat == Matrix::kInput ? model.input() : model.output();
        for (WordId r = 0; r < model.vocab_size(); ++r) {
          auto it = slot_of.find(PackKey({mat, r}));
          const double* sum = it == slot_of.end() ? nullptr : sums.data() + it->second * dim;
          double* theta = params_vec.data() + static_cast<std::size_t>(r) * dim;
          for (int j = 0; j < dim; ++j) {
            const double g = (sum ? sum[j] : 0.0) + noise(*noise_rng);
            theta[j] -= scale * g;
            finite &= std::isfinite(theta[j]);
          }
        }
      }
      if (!finite) return NumericalBlowUp(params.step);
      return stats;
    }
  } else {
    for (std::size_t s = 0; s < slot_keys.size(); ++s) {
      auto theta = row_of(slot_keys[s]);
      const double* sum = sums.data() + s * dim;
      for (int j = 0; j < dim; ++j) theta[j] -= scale * sum[j];
    }
  }
  for (const RowKey& key : slot_keys) {
    for (double v : row_of(key)) {
      if (!std::isfinite(v)) return NumericalBlowUp(params.step);
    }
  }
  return stats;
}

absl::StatusOr<StepStats> SgdStep(EmbeddingModel& model,
                                  std::span<const TrainingPair> pairs,
                                  const NegativeSampler& sampler, double lr,
                                  std::optional<double> clip_norm,
                                  Engine& sampling_rng,
                                  std::optional<double> normalizer,
                                  int negatives) {
  StepParams params;
  params.lr = lr;
  params.clip_norm = clip_norm;
  params.normalizer = normalizer.value_or(
      std::max<double>(1.0, static_cast<double>(pairs.size())));
  params.negatives = negatives;
  return ApplyLotStep(model, pairs, sampler, params, sampling_rng, nullptr);
}

StepParams StepParamsFor(const DpConfig& config, std::int64_t step) {
  StepParams params;
  params.step = step;
  params.lr = LearningRate(config, step);
  params.clip_norm = config.clip ? std::optional<double>(config.clip_norm)
                                 : std::nullopt;
  params.normalizer = static_cast<double>(config.lot_size);
  params.noise_stddev =
      config.noisy() ? config.noise_multiplier * config.clip_norm : 0.0;
  params.sparse_noise = config.sparse_noise;
  params.negatives = config.negatives;
  params.threads = config.threads;
  return params;
}

absl::StatusOr<StepStats> DpSgdStep(EmbeddingModel& model,
                                    std::span<const TrainingPair> lot,
                                    const NegativeSampler& sampler,
                                    const DpConfig& config, std::int64_t step,
                                    PrivacyAccountant* accountant,
                                    Engine& sampling_rng, Engine& noise_rng) {
  const StepParams params = StepParamsFor(config, step);
  ASSIGN_OR_RETURN(StepStats stats, ApplyLotStep(model, lot, sampler, params,
                                                 sampling_rng, &noise_rng));
  if (config.noisy() && accountant != nullptr) {
    RETURN_IF_ERROR(
        accountant->Accumulate(config.sampling_ratio(), config.noise_multiplier));
  }
  return stats;
}

std::string TrainingLog::ToCsv() const {
  const bool with_valid = !records.empty() && records.front().valid_examples >= 0;
  std::string out = "step,loss,epsilon,delta,lot_size";
  if (with_valid) out += ",valid_examples";
  out += "\n";
  for (const auto& r : records) {
    absl::StrAppend(&out, r.step, ",", FormatDouble(r.loss), ",",
                    FormatDouble(r.epsilon), ",", FormatDouble(r.delta), ",",
                    r.lot_size);
    if (with_valid) absl::StrAppend(&out, ",", r.valid_examples);
    out += "\n";
  }
  return out;
}

absl::Status TrainingLog::WriteCsv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << ToCsv();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<TrainResult> TrainDp(std::span<const TrainingPair> examples,
                                    const Vocabulary& vocab, DpConfig config,
                                    const TrainHooks& hooks) {
  if (config.total_examples == 0) {
    config.total_examples = static_cast<std::int64_t>(examples.size());
  }
  RETURN_IF_ERROR(ValidateConfig(config));

  TrainResult result{InitModel(vocab.size(), config.dim, config.seed), {}, {}};
  const NegativeSampler sampler(vocab.counts());
  Engine sampling_rng = MakeEngine(config.seed, RngStream::kSampling);
  Engine noise_rng = MakeEngine(config.seed, RngStream::kNoise);
  const double q = config.sampling_ratio();

  auto is_checkpoint = [&](std::int64_t step) {
    return std::find(config.checkpoints.begin(), config.checkpoints.end(),
                     step) != config.checkpoints.end();
  };
  if (hooks.on_checkpoint && is_checkpoint(0)) {
    StepRecord initial;
    initial.epsilon = config.noisy() ? 0.0 : initial.epsilon;
    initial.delta = config.target_delta;
    initial.delta_at_target_epsilon = config.noisy() ? 0.0 : 1.0;
    RETURN_IF_ERROR(hooks.on_checkpoint(0, result.model, initial));
  }

  std::vector<TrainingPair> lot;
  for (std::int64_t t = 0; t < config.steps; ++t) {
    const std::vector<std::int64_t> indices = PoissonSample(
        static_cast<std::int64_t>(examples.size()), q, sampling_rng);
    lot.clear();
    for (std::int64_t i : indices) lot.push_back(examples[i]);

    ASSIGN_OR_RETURN(StepStats stats,
                     DpSgdStep(result.model, lot, sampler, config, t,
                               &result.accountant, sampling_rng, noise_rng));
    StepRecord rec;
    rec.step = t + 1;
    rec.loss = stats.mean_loss;
    rec.lot_size = stats.lot_size;
    rec.delta = config.target_delta;
    if (config.noisy()) {
      rec.epsilon = result.accountant.GetEpsilon(config.target_delta).epsilon;
      rec.delta_at_target_epsilon =
          result.accountant.GetDelta(config.target_epsilon).delta;
    }
    result.log.records.push_back(rec);
    if (hooks.on_step) hooks.on_step({rec.step, indices, &result.log.records.back()});
    if (hooks.on_checkpoint && is_checkpoint(rec.step)) {
      RETURN_IF_ERROR(hooks.on_checkpoint(rec.step, result.model, rec));
    }
  }
  return result;
}

std::vector<TrainingPair> BuildExamples(const std::vector<Document>& docs,
                                        const PairOptions& options,
                                        std::uint64_t seed) {
  Engine rng = MakeEngine(seed, RngStream::kPairs);
  std::vector<TrainingPair> out;
  for (const auto& d : docs) {
    auto pairs = GeneratePairs(d, options, rng);
    out.insert(out.end(), pairs.begin(), pairs.end());
  }
  return out;
}

}  // namespace dpugc
