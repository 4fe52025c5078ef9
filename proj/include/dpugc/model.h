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

// Skip-gram model state and the negative-sampling (NEG) objective.

#ifndef DPUGC_MODEL_H_
#define DPUGC_MODEL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "dpugc/corpus.h"
#include "dpugc/random.h"

namespace dpugc {

// Input (embedding) matrix W and output (context) matrix W', both V x k,
// stored row-major. Row i of W is the embedding of vocabulary id i.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(std::int32_t vocab_size, int dim);

  std::int32_t vocab_size() const { return vocab_size_; }
  int dim() const { return dim_; }

  std::span<double> input_row(WordId id) {
    return {input_.data() + static_cast<std::size_t>(id) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  std::span<const double> input_row(WordId id) const {
    return {input_.data() + static_cast<std::size_t>(id) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  std::span<double> output_row(WordId id) {
    return {output_.data() + static_cast<std::size_t>(id) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  std::span<const double> output_row(WordId id) const {
    return {output_.data() + static_cast<std::size_t>(id) * dim_,
            static_cast<std::size_t>(dim_)};
  }

  std::vector<double>& input() { return input_; }
  const std::vector<double>& input() const { return input_; }
  std::vector<double>& output() { return output_; }
  const std::vector<double>& output() const { return output_; }

  bool AllFinite() const;

  friend bool operator==(const EmbeddingModel&, const EmbeddingModel&) = default;

 private:
  std::int32_t vocab_size_ = 0;
  int dim_ = 0;
  std::vector<double> input_;
  std::vector<double> output_;
};

// W ~ U[-0.5/k, 0.5/k], W' = 0 (word2vec initialization).
EmbeddingModel InitModel(std::int32_t vocab_size, int dim, std::uint64_t seed);

inline constexpr double kDefaultDistortion = 0.75;
inline constexpr int kDefaultNegatives = 5;
// Logits are clamped to this magnitude before exponentiation.
inline constexpr double kLogitClamp = 30.0;

// Noise distribution Q(w) proportional to count(w)^alpha, stored as a
// cumulative table for inverse-CDF sampling.
class NegativeSampler {
 public:
  explicit NegativeSampler(const std::vector<std::int64_t>& counts,
                           double alpha = kDefaultDistortion);

  const std::vector<double>& cumulative() const { return cumulative_; }
  double Probability(WordId id) const;
  WordId Draw(Engine& rng) const;

 private:
  std::vector<double> cumulative_;
  WordId last_positive_ = 0;
};

// Draws `count` ids i.i.d. from Q, redrawing any that equal `exclude`.
// Fails with "degenerate sampler" when redraws keep hitting `exclude`.
absl::StatusOr<std::vector<WordId>> SampleNegatives(
    const NegativeSampler& sampler, int count, WordId exclude, Engine& rng);

enum class Matrix : std::uint8_t { kInput = 0, kOutput = 1 };

struct RowKey {
  Matrix matrix;
  WordId row;
  friend bool operator==(const RowKey&, const RowKey&) = default;
};

// Gradient restricted to the rows one example touches: the W row of the
// center word and the W' rows of the context word and each negative.
class SparseGradient {
 public:
  SparseGradient() = default;
  explicit SparseGradient(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  std::size_t num_rows() const { return keys_.size(); }
  const std::vector<RowKey>& keys() const { return keys_; }

  // Returns the row for `key`, creating a zero row on first use.
  std::span<double> Row(RowKey key);
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<double> row(std::size_t i) {
    return {values_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& values() const { return values_; }

  double SquaredNorm() const;
  double Norm() const;
  void Scale(double factor);
  bool AllFinite() const;

 private:
  int dim_ = 0;
  std::vector<RowKey> keys_;
  std::vector<double> values_;
};

// log(sigmoid(x)) with the logit clamped to +-kLogitClamp.
double LogSigmoid(double x);
double Sigmoid(double x);

// NEG loss: -[log s(w'_O . w_I) + sum_i log s(-w'_i . w_I)]. Always >= 0.
double NegLoss(const EmbeddingModel& model, const TrainingPair& pair,
               std::span<const WordId> negatives);

// Analytic gradient of NegLoss with respect to the touched rows.
SparseGradient NegGradient(const EmbeddingModel& model,
                           const TrainingPair& pair,
                           std::span<const WordId> negatives);

// Same as NegGradient, also returning the loss at the current parameters.
SparseGradient NegGradientAndLoss(const EmbeddingModel& model,
                                  const TrainingPair& pair,
                                  std::span<const WordId> negatives,
                                  double* loss);

// Word vectors detached from training state, e.g. as read back from a
// word2vec text file.
struct Embeddings {
  std::vector<std::string> words;
  int dim = 0;
  std::vector<double> vectors;  // words.size() x dim, row-major

  std::span<const double> row(std::size_t i) const {
    return {vectors.data() + i * dim, static_cast<std::size_t>(dim)};
  }
  // Optional word -> row index; Find falls back to a linear scan when empty.
  std::unordered_map<std::string, std::size_t> index;

  void Reindex();
  std::optional<std::size_t> Find(std::string_view word) const;
};

Embeddings ExportEmbeddings(const EmbeddingModel& model,
                            const Vocabulary& vocab);

struct Neighbor {
  std::string word;
  double cosine = 0.0;
};

// Top-K rows of W by cosine similarity to `query`, excluding the query and
// UNK. Ties go to the lower row index.
absl::StatusOr<std::vector<Neighbor>> NearestNeighbors(
    const Embeddings& embeddings, std::string_view query, int k);

}  // namespace dpugc

#endif  // DPUGC_MODEL_H_
