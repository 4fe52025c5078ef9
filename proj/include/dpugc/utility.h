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

// Downstream utility: embedding features per user, ridge regression, and the
// 80/20 regression experiment comparing public-only features against public
// features concatenated with a privately trained model.

#ifndef DPUGC_UTILITY_H_
#define DPUGC_UTILITY_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpugc/model.h"

namespace dpugc {

struct LabeledUser {
  std::string user_id;
  double score = 0.0;
  std::vector<std::vector<std::string>> documents;  // tokenized
};

using LabeledUserSet = std::vector<LabeledUser>;

// `user_id<TAB>score<TAB>text`; repeated lines for a user must agree on the
// score. Users keep first-appearance order.
absl::StatusOr<LabeledUserSet> LoadLabeledUsers(const std::string& path,
                                                bool lowercase = true);
absl::Status WriteLabeledUsers(const std::string& path,
                               const LabeledUserSet& users);

struct UserFeatures {
  Eigen::VectorXd values;
  std::int64_t tokens_used = 0;  // 0 means the zero vector was returned
};

// Mean of the embedding rows of every token in the user's documents. Tokens
// missing from the model fall back to its UNK row; if it has none they are
// skipped.
UserFeatures ComputeUserFeatures(const LabeledUser& user,
                                 const Embeddings& model);

struct FeatureBlock {
  std::string name;
  int offset = 0;
  int width = 0;
};

struct FeatureMatrix {
  Eigen::MatrixXd x;
  std::vector<FeatureBlock> layout;
  // Users for which a block had no usable tokens.
  std::vector<std::string> warnings;
};

// Rows are [public features | private features]; without a private model the
// matrix holds the public block only.
FeatureMatrix ConcatFeatures(const Embeddings& public_model,
                             const Embeddings* private_model,
                             const LabeledUserSet& users);

struct RidgeModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  // Every column had zero variance; the model predicts mean(y).
  bool intercept_only = false;

  Eigen::VectorXd Predict(const Eigen::MatrixXd& x) const;
};

inline constexpr double kDefaultRidgeLambda = 1.0;

// Minimizes ||Xc w - yc||^2 + lambda ||w||^2 on centered data; the intercept
// is not penalized. lambda == 0 gives the minimum-norm least-squares fit.
absl::StatusOr<RidgeModel> RidgeFit(const Eigen::MatrixXd& x,
                                    const Eigen::VectorXd& y, double lambda);

double Rmse(std::span<const double> predicted, std::span<const double> truth);
double Rmse(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Deterministic user-level 80/20 split.
Split TrainTestSplit(std::size_t n, std::uint64_t seed, double train_frac = 0.8);

struct RegressionResult {
  double baseline_rmse = 0.0;
  std::optional<double> dp_rmse;
  std::optional<double> nonedp_rmse;
};

struct RegressionOptions {
  double lambda = kDefaultRidgeLambda;
  // Columns are z-scored with training-split statistics before fitting.
  bool standardize = true;
};

// Fits the baseline (public only), DP (public + DP-private) and NoneDP
// (public + non-DP private) configurations on one split and reports test RMSE.
absl::StatusOr<RegressionResult> RegressionExperiment(
    const LabeledUserSet& users, const Embeddings& public_model,
    const Embeddings* dp_private, const Embeddings* nonedp_private,
    std::uint64_t split_seed, const RegressionOptions& options = {});

struct RegressionRow {
  std::int64_t step = 0;
  RegressionResult result;
  double epsilon = 0.0;
  double delta = 0.0;
};

// `step,baseline_rmse,dp_rmse,nonedp_rmse,epsilon,delta`.
std::string RegressionReportCsv(std::span<const RegressionRow> rows);

}  // namespace dpugc

#endif  // DPUGC_UTILITY_H_
