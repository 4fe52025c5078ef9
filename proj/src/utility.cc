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

#include "dpugc/utility.h"

#include <cmath>
#include <fstream>
#include <unordered_map>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "dpugc/corpus.h"
#include "dpugc/random.h"
#include "dpugc/status_macros.h"
#include <boost/random/uniform_int_distribution.hpp>

namespace dpugc {
namespace {

Eigen::MatrixXd Rows(const Eigen::MatrixXd& x,
                     const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(idx[i]));
  }
  return out;
}

Eigen::VectorXd Rows(const Eigen::VectorXd& y,
                     const std::vector<std::size_t>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(idx[i]));
  }
  return out;
}

absl::StatusOr<double> FitAndScore(const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& y, const Split& split,
                                   const RegressionOptions& options) {
  Eigen::MatrixXd train = Rows(x, split.train);
  Eigen::MatrixXd test = Rows(x, split.test);
  if (options.standardize) {
    const Eigen::RowVectorXd mean = train.colwise().mean();
    Eigen::RowVectorXd scale =
        ((train.rowwise() - mean).array().square().colwise().sum() /
         static_cast<double>(train.rows()))
            .sqrt();
    for (Eigen::Index j = 0; j < scale.size(); ++j) {
      if (!(scale(j) > 1e-12)) scale(j) = 1.0;
    }
    train = (train.rowwise() - mean).array().rowwise() / scale.array();
    test = (test.rowwise() - mean).array().rowwise() / scale.array();
  }
  ASSIGN_OR_RETURN(RidgeModel model,
                   RidgeFit(train, Rows(y, split.train), options.lambda));
  return Rmse(model.Predict(test), Rows(y, split.test));
}

std::string FormatOptional(const std::optional<double>& v) {
  return v ? absl::StrFormat("%.10g", *v) : "";
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return absl::StrFormat("%.10g", v);
}

}  // namespace

absl::StatusOr<LabeledUserSet> LoadLabeledUsers(const std::string& path,
                                                bool lowercase) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open labeled users: ", path));
  }
  LabeledUserSet users;
  std::unordered_map<std::string, std::size_t> index;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || t1 == 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ":", line_no, ": expected user_id<TAB>score<TAB>text"));
    }
    double score = 0.0;
    if (!absl::SimpleAtod(line.substr(t1 + 1, t2 - t1 - 1), &score) ||
        !std::isfinite(score)) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": bad score"));
    }
    const std::string id = line.substr(0, t1);
    auto [it, inserted] = index.try_emplace(id, users.size());
    if (inserted) {
      users.push_back(LabeledUser{id, score, {}});
    } else if (users[it->second].score != score) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ":", line_no, ": conflicting score for user ", id));
    }
    users[it->second].documents.push_back(Tokenize(line.substr(t2 + 1), lowercase));
  }
  return users;
}

absl::Status WriteLabeledUsers(const std::string& path,
                               const LabeledUserSet& users) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  for (const auto& u : users) {
    for (const auto& doc : u.documents) {
      out << u.user_id << '\t' << absl::StrFormat("%.10g", u.score) << '\t'
          << absl::StrJoin(doc, " ") << '\n';
    }
  }
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

UserFeatures ComputeUserFeatures(const LabeledUser& user,
                                 const Embeddings& model) {
  UserFeatures f{Eigen::VectorXd::Zero(model.dim), 0};
  const auto unk = model.Find(Vocabulary::kUnkToken);
  for (const auto& doc : user.documents) {
    for (const auto& tok : doc) {
      auto row = model.Find(tok);
      if (!row) row = unk;
      if (!row) continue;
      const auto v = model.row(*row);
      for (int j = 0; j < model.dim; ++j) f.values(j) += v[j];
      ++f.tokens_used;
    }
  }
  if (f.tokens_used > 0) f.values /= static_cast<double>(f.tokens_used);
  return f;
}

FeatureMatrix ConcatFeatures(const Embeddings& public_model,
                             const Embeddings* private_model,
                             const LabeledUserSet& users) {
  FeatureMatrix fm;
  const int pub = public_model.dim;
  const int priv = private_model ? private_model->dim : 0;
  fm.layout.push_back({"public", 0, pub});
  if (private_model) fm.layout.push_back({"private", pub, priv});
  fm.x.resize(static_cast<Eigen::Index>(users.size()), pub + priv);
  for (std::size_t i = 0; i < users.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const UserFeatures a = ComputeUserFeatures(users[i], public_model);
    if (a.tokens_used == 0) {
      fm.warnings.push_back(absl::StrCat(users[i].user_id, ": no public tokens"));
    }
    fm.x.row(r).head(pub) = a.values.transpose();
    if (private_model) {
      const UserFeatures b = ComputeUserFeatures(users[i], *private_model);
      if (b.tokens_used == 0) {
        fm.warnings.push_back(
            absl::StrCat(users[i].user_id, ": no private tokens"));
      }
      fm.x.row(r).tail(priv) = b.values.transpose();
    }
  }
  return fm;
}

Eigen::VectorXd RidgeModel::Predict(const Eigen::MatrixXd& x) const {
  return (x * weights).array() + intercept;
}

absl::StatusOr<RidgeModel> RidgeFit(const Eigen::MatrixXd& x,
                                    const Eigen::VectorXd& y, double lambda) {
  if (!(lambda >= 0.0)) return absl::InvalidArgumentError("lambda must be >= 0");
  if (x.rows() < 2) return absl::InvalidArgumentError("need at least 2 rows");
  if (x.rows() != y.size()) {
    return absl::InvalidArgumentError("X and y row counts differ");
  }
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;

  RidgeModel model;
  if (x.cols() == 0 || xc.cwiseAbs().maxCoeff() == 0.0) {
    model.weights = Eigen::VectorXd::Zero(x.cols());
    model.intercept = y_mean;
    model.intercept_only = true;
    return model;
  }
  if (lambda > 0.0) {
    Eigen::MatrixXd gram = xc.transpose() * xc;
    gram.diagonal().array() += lambda;
    model.weights = gram.ldlt().solve(xc.transpose() * yc);
  } else {
    model.weights = xc.completeOrthogonalDecomposition().solve(yc);
  }
  model.intercept = y_mean - x_mean.dot(model.weights);
  return model;
}

double Rmse(std::span<const double> predicted, std::span<const double> truth) {
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - truth[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(predicted.size()));
}

double Rmse(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth) {
  return Rmse(std::span<const double>(predicted.data(), predicted.size()),
              std::span<const double>(truth.data(), truth.size()));
}

Split TrainTestSplit(std::size_t n, std::uint64_t seed, double train_frac) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Engine rng = MakeEngine(seed, RngStream::kSplit);
  for (std::size_t i = n; i > 1; --i) {
    boost::random::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
  const auto n_train = static_cast<std::size_t>(
      std::floor(train_frac * static_cast<double>(n)));
  Split s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.test.assign(order.begin() + n_train, order.end());
  return s;
}

absl::StatusOr<RegressionResult> RegressionExperiment(
    const LabeledUserSet& users, const Embeddings& public_model,
    const Embeddings* dp_private, const Embeddings* nonedp_private,
    std::uint64_t split_seed, const RegressionOptions& options) {
  if (users.size() < 10) {
    return absl::InvalidArgumentError("regression experiment needs >= 10 users");
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(users.size()));
  for (std::size_t i = 0; i < users.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = users[i].score;
  }
  const Split split = TrainTestSplit(users.size(), split_seed);

  RegressionResult result;
  ASSIGN_OR_RETURN(result.baseline_rmse,
                   FitAndScore(ConcatFeatures(public_model, nullptr, users).x,
                               y, split, options));
  if (dp_private) {
    ASSIGN_OR_RETURN(result.dp_rmse,
                     FitAndScore(ConcatFeatures(public_model, dp_private, users).x,
                                 y, split, options));
  }
  if (nonedp_private) {
    ASSIGN_OR_RETURN(
        result.nonedp_rmse,
        FitAndScore(ConcatFeatures(public_model, nonedp_private, users).x, y,
                    split, options));
  }
  return result;
}

std::string RegressionReportCsv(std::span<const RegressionRow> rows) {
  std::string out = "step,baseline_rmse,dp_rmse,nonedp_rmse,epsilon,delta\n";
  for (const auto& r : rows) {
    absl::StrAppend(&out, r.step, ",",
                    absl::StrFormat("%.10g", r.result.baseline_rmse), ",",
                    FormatOptional(r.result.dp_rmse), ",",
                    FormatOptional(r.result.nonedp_rmse), ",",
                    FormatDouble(r.epsilon), ",", FormatDouble(r.delta), "\n");
  }
  return out;
}

}  // namespace dpugc
