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

// Reference implementations used only by tests. They are written directly
// from the formulas and share no code with the library beyond its types.

#ifndef DPUGC_TESTS_ORACLES_H_
#define DPUGC_TESTS_ORACLES_H_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "dpugc/corpus.h"
#include "dpugc/model.h"

namespace dpugc::oracle {

// -[log s(u_O . v_I) + sum log s(-u_i . v_I)], no clamping.
double NegLoss(const EmbeddingModel& model, const TrainingPair& pair,
               const std::vector<WordId>& negatives);

struct GradientCheck {
  int coordinates = 0;
  double max_relative_error = 0.0;
};

// Central differences of NegLoss over every touched coordinate, compared
// with the analytic gradient the library returns.
GradientCheck CheckGradient(const EmbeddingModel& model, const TrainingPair& pair,
                            const std::vector<WordId>& negatives, double h);

// Random model with entries N(0, scale^2) in both matrices.
EmbeddingModel RandomModel(int vocab, int dim, double scale, std::uint64_t seed);

// log A_alpha for one subsampled Gaussian step, A_alpha = E_{x~N(0,s^2)}
// [(1 - q + q exp((2x - 1) / (2 s^2)))^alpha], by a log-space trapezoid rule.
double LogMomentTrapezoid(double q, double sigma, double alpha);

// Per-step RDP, log A / (alpha - 1).
double Rdp(double q, double sigma, double alpha);

// min over alpha of steps * rdp(alpha) + log(1/delta) / (alpha - 1) on the
// given orders.
double Epsilon(double q, double sigma, std::int64_t steps, double delta,
               const std::vector<double>& orders);

// Full-batch case: grid search of steps * alpha / (2 sigma^2) +
// log(1/delta) / (alpha - 1) over alpha in (1, max_alpha] with step `h`.
struct GridMin {
  double epsilon;
  double alpha;
};
GridMin FullBatchEpsilonGrid(double sigma, std::int64_t steps, double delta,
                             double max_alpha = 200.0, double h = 1e-5);

// Average precision straight from the definition: the precision at each
// rank holding a gold word, summed and divided by |gold|.
double AveragePrecision(const std::vector<std::string>& returned,
                        const std::set<std::string>& gold);

// Every (i, j) with 0 < |i - j| <= window, ordered by i then j.
std::vector<TrainingPair> AllPairs(const Document& doc, int window);

struct ScoredWord {
  std::string word;
  double cosine;
};

// Full scan, sorted by cosine descending, then row index ascending.
std::vector<ScoredWord> NeighborsByScan(const Embeddings& e,
                                        const std::string& query, int k);

}  // namespace dpugc::oracle

#endif  // DPUGC_TESTS_ORACLES_H_
