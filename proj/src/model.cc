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

#include "dpugc/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include <boost/random/uniform_real_distribution.hpp>

namespace dpugc {
namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

constexpr int kMaxRedraws = 1000;

}  // namespace

EmbeddingModel::EmbeddingModel(std::int32_t vocab_size, int dim)
    : vocab_size_(vocab_size),
      dim_(dim),
      input_(static_cast<std::size_t>(vocab_size) * dim, 0.0),
      output_(static_cast<std::size_t>(vocab_size) * dim, 0.0) {}

bool EmbeddingModel::AllFinite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(input_.begin(), input_.end(), finite) &&
         std::all_of(output_.begin(), output_.end(), finite);
}

EmbeddingModel InitModel(std::int32_t vocab_size, int dim, std::uint64_t seed) {
  EmbeddingModel model(vocab_size, dim);
  Engine rng = MakeEngine(seed, RngStream::kInit);
  const double half = 0.5 / dim;
  boost::random::uniform_real_distribution<double> unif(-half, half);
  for (double& v : model.input()) v = unif(rng);
  return model;
}

NegativeSampler::NegativeSampler(const std::vector<std::int64_t>& counts,
                                 double alpha) {
  cumulative_.resize(counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double mass =
        counts[i] > 0 ? std::pow(static_cast<double>(counts[i]), alpha) : 0.0;
    total += mass;
    cumulative_[i] = total;
    if (mass > 0) last_positive_ = static_cast<WordId>(i);
  }
  if (total > 0) {
    for (double& c : cumulative_) c /= total;
  }
}

double NegativeSampler::Probability(WordId id) const {
  return id == 0 ? cumulative_[0] : cumulative_[id] - cumulative_[id - 1];
}

WordId NegativeSampler::Draw(Engine& rng) const {
  boost::random::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return last_positive_;
  return static_cast<WordId>(it - cumulative_.begin());
}

absl::StatusOr<std::vector<WordId>> SampleNegatives(
    const NegativeSampler& sampler, int count, WordId exclude, Engine& rng) {
  std::vector<WordId> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    int attempts = 0;
    WordId id = sampler.Draw(rng);
    while (id == exclude) {
      if (++attempts >= kMaxRedraws) {
        return absl::FailedPreconditionError("degenerate sampler");
      }
      id = sampler.Draw(rng);
    }
    out.push_back(id);
  }
  return out;
}

std::span<double> SparseGradient::Row(RowKey key) {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i] == key) return row(i);
  }
  keys_.push_back(key);
  values_.resize(values_.size() + dim_, 0.0);
  return row(keys_.size() - 1);
}

double SparseGradient::SquaredNorm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

double SparseGradient::Norm() const { return std::sqrt(SquaredNorm()); }

void SparseGradient::Scale(double factor) {
  for (double& v : values_) v *= factor;
}

bool SparseGradient::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

double LogSigmoid(double x) {
  x = std::clamp(x, -kLogitClamp, kLogitClamp);
  return -std::log1p(std::exp(-x));
}

double Sigmoid(double x) {
  x = std::clamp(x, -kLogitClamp, kLogitClamp);
  return 1.0 / (1.0 + std::exp(-x));
}

double NegLoss(const EmbeddingModel& model, const TrainingPair& pair,
               std::span<const WordId> negatives) {
  const auto center = model.input_row(pair.center);
  double loss = -LogSigmoid(Dot(model.output_row(pair.context), center));
  for (WordId n : negatives) {
    loss -= LogSigmoid(-Dot(model.output_row(n), center));
  }
  return loss;
}

SparseGradient NegGradientAndLoss(const EmbeddingModel& model,
                                  const TrainingPair& pair,
                                  std::span<const WordId> negatives,
                                  double* loss) {
  SparseGradient grad(model.dim());
  const auto center = model.input_row(pair.center);
  // Create the center row first so that it always leads the key list.
  grad.Row({Matrix::kInput, pair.center});
  double total = 0.0;

  auto accumulate = [&](WordId row, double coef) {
    const auto out_row = model.output_row(row);
    Axpy(coef, center, grad.Row({Matrix::kOutput, row}));
    Axpy(coef, out_row, grad.row(0));
  };

  const double x_pos = Dot(model.output_row(pair.context), center);
  total -= LogSigmoid(x_pos);
  accumulate(pair.context, Sigmoid(x_pos) - 1.0);
  for (WordId n : negatives) {
    const double x = Dot(model.output_row(n), center);
    total -= LogSigmoid(-x);
    accumulate(n, Sigmoid(x));
  }
  if (loss != nullptr) *loss = total;
  return grad;
}

SparseGradient NegGradient(const EmbeddingModel& model,
                           const TrainingPair& pair,
                           std::span<const WordId> negatives) {
  return NegGradientAndLoss(model, pair, negatives, nullptr);
}

void Embeddings::Reindex() {
  index.clear();
  index.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) index.emplace(words[i], i);
}

std::optional<std::size_t> Embeddings::Find(std::string_view word) const {
  if (!index.empty()) {
    auto it = index.find(std::string(word));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i] == word) return i;
  }
  return std::nullopt;
}

Embeddings ExportEmbeddings(const EmbeddingModel& model,
                            const Vocabulary& vocab) {
  Embeddings e;
  e.words = vocab.words();
  e.dim = model.dim();
  e.vectors = model.input();
  e.Reindex();
  return e;
}

absl::StatusOr<std::vector<Neighbor>> NearestNeighbors(
    const Embeddings& embeddings, std::string_view query, int k) {
  if (k < 1) return absl::InvalidArgumentError("K must be >= 1");
  const auto q = embeddings.Find(query);
  if (!q) {
    return absl::NotFoundError(absl::StrCat("unknown word: ", std::string(query)));
  }
  const auto qrow = embeddings.row(*q);
  const double qnorm = std::sqrt(Dot(qrow, qrow));

  struct Scored {
    double cosine;
    std::size_t index;
  };
  std::vector<Scored> scored;
  scored.reserve(embeddings.words.size());
  for (std::size_t i = 0; i < embeddings.words.size(); ++i) {
    if (i == *q || embeddings.words[i] == Vocabulary::kUnkToken) continue;
    const auto r = embeddings.row(i);
    const double denom = qnorm * std::sqrt(Dot(r, r));
    scored.push_back({denom > 0 ? Dot(qrow, r) / denom : 0.0, i});
  }
  const std::size_t take = std::min<std::size_t>(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                    [](const Scored& a, const Scored& b) {
                      if (a.cosine != b.cosine) return a.cosine > b.cosine;
                      return a.index < b.index;
                    });
  std::vector<Neighbor> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back({embeddings.words[scored[i].index], scored[i].cosine});
  }
  return out;
}

}  // namespace dpugc
