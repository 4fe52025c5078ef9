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

// User-level DP-SGD with personal privacy budgets. Every user carries an
// (epsilon, delta) budget; each step's marginal privacy spend is split over
// the lot and charged to the users who contributed to it, and users whose
// spend exceeds their budget are dropped from all later lots.

#ifndef DPUGC_PERSONALIZED_H_
#define DPUGC_PERSONALIZED_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpugc/accountant.h"
#include "dpugc/corpus.h"
#include "dpugc/dp_sgd.h"
#include "dpugc/model.h"

namespace dpugc {

struct Budget {
  double epsilon = 0.0;
  double delta = 0.0;
};

struct UserAccount {
  std::string user_id;
  Budget budget;
  double epsilon_spent = 0.0;
  double delta_spent = 0.0;
  bool active = true;
  std::optional<std::int64_t> excluded_at_step;
};

enum class ChargeDivisor {
  kLotSize,     // (eps_t, delta_t) / L, the default
  kUsersInLot,  // (eps_t, delta_t) / |U_Lt|, experimental
};

class BudgetLedger {
 public:
  // One account per corpus user, all with `budget`.
  static BudgetLedger Uniform(const UserCorpus& corpus, Budget budget);

  // Parses `user_id,epsilon_budget,delta_budget` lines. Users missing from
  // the text get `default_budget`; ids not in the corpus are skipped and
  // reported through `warnings`.
  static absl::StatusOr<BudgetLedger> FromCsv(
      std::string_view csv, const UserCorpus& corpus, Budget default_budget,
      std::vector<std::string>* warnings = nullptr);

  // `path` may be empty, meaning every user gets the default.
  static absl::StatusOr<BudgetLedger> Load(
      const std::string& path, const UserCorpus& corpus, Budget default_budget,
      std::vector<std::string>* warnings = nullptr);

  const std::vector<UserAccount>& accounts() const { return accounts_; }
  const UserAccount& account(std::size_t user) const { return accounts_[user]; }
  bool active(std::size_t user) const { return accounts_[user].active; }
  std::size_t num_active() const;

  // Adds (eps_t, delta_t) / divisor to each listed user, then deactivates
  // anyone now over budget. Returns the users excluded by this call.
  std::vector<std::size_t> Charge(const std::vector<std::size_t>& users_in_lot,
                                  double epsilon_step, double delta_step,
                                  double divisor, std::int64_t step);

  // `user_id,epsilon_spent,delta_spent,excluded_at_step`.
  std::string SpendReportCsv() const;
  absl::Status WriteSpendReport(const std::string& path) const;

 private:
  std::vector<UserAccount> accounts_;
};

// Training pairs for all users, plus the index of the owning user per pair.
// The pair sequence is identical to BuildExamples(corpus.Flatten(), ...).
struct UserExamples {
  std::vector<TrainingPair> pairs;
  std::vector<std::size_t> owner;
};

UserExamples BuildUserExamples(const UserCorpus& corpus,
                               const PairOptions& options, std::uint64_t seed);

// Indices of the examples whose owner is still active.
std::vector<std::int64_t> ValidExamples(const BudgetLedger& ledger,
                                        const UserExamples& examples);

struct StepCharge {
  std::int64_t step = 0;  // 1-based
  double epsilon = 0.0;   // marginal spend at the target delta
  double delta = 0.0;     // marginal spend at the target epsilon
  double divisor = 1.0;
  std::vector<std::size_t> users;  // U_Lt, ascending
  std::vector<std::size_t> excluded;
};

struct PersonalizedOptions {
  ChargeDivisor divisor = ChargeDivisor::kLotSize;
};

struct PersonalizedResult {
  EmbeddingModel model;
  TrainingLog log;
  BudgetLedger ledger;
  PrivacyAccountant accountant;
  std::vector<StepCharge> charges;
  std::int64_t steps_run = 0;
  // Set when every user ran out of budget before config.steps.
  bool budgets_exhausted = false;
};

// The lot is Poisson-sampled from the valid examples with ratio L / |K|, the
// accountant is charged with that realized ratio, and the step's marginal
// (epsilon, delta) is charged to the users in the lot. The run stops early,
// without error, once no valid examples remain.
absl::StatusOr<PersonalizedResult> TrainPersonalized(
    const UserExamples& examples, const Vocabulary& vocab, DpConfig config,
    BudgetLedger ledger, const PersonalizedOptions& options = {},
    const TrainHooks& hooks = {});

}  // namespace dpugc

#endif  // DPUGC_PERSONALIZED_H_
