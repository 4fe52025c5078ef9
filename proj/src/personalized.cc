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

#include "dpugc/personalized.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "dpugc/status_macros.h"

namespace dpugc {
namespace {

std::string FormatSpend(double v) { return absl::StrFormat("%.12g", v); }

}  // namespace

BudgetLedger BudgetLedger::Uniform(const UserCorpus& corpus, Budget budget) {
  BudgetLedger ledger;
  ledger.accounts_.reserve(corpus.num_users());
  for (const auto& u : corpus.users()) {
    UserAccount a;
    a.user_id = u.user_id;
    a.budget = budget;
    ledger.accounts_.push_back(std::move(a));
  }
  return ledger;
}

absl::StatusOr<BudgetLedger> BudgetLedger::FromCsv(
    std::string_view input, const UserCorpus& corpus, Budget default_budget,
    std::vector<std::string>* warnings) {
  const absl::string_view csv(input.data(), input.size());
  if (default_budget.epsilon < 0 || default_budget.delta < 0) {
    return absl::InvalidArgumentError("negative default budget");
  }
  BudgetLedger ledger = Uniform(corpus, default_budget);
  int line_no = 0;
  for (absl::string_view raw : absl::StrSplit(csv, '\n')) {
    ++line_no;
    absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
    if (line_no == 1 && absl::StripAsciiWhitespace(fields[0]) == "user_id") {
      continue;
    }
    if (fields.size() != 3) {
      return absl::InvalidArgumentError(
          absl::StrCat("budget line ", line_no, ": expected 3 fields"));
    }
    const std::string user(absl::StripAsciiWhitespace(fields[0]));
    Budget b;
    if (!absl::SimpleAtod(absl::StripAsciiWhitespace(fields[1]), &b.epsilon) ||
        !absl::SimpleAtod(absl::StripAsciiWhitespace(fields[2]), &b.delta) ||
        std::isnan(b.epsilon) || std::isnan(b.delta)) {
      return absl::InvalidArgumentError(
          absl::StrCat("budget line ", line_no, ": unparsable number"));
    }
    if (b.epsilon < 0 || b.delta < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("budget line ", line_no, ": negative budget for ", user));
    }
    const auto idx = corpus.Find(user);
    if (!idx) {
      if (warnings) {
        warnings->push_back(
            absl::StrCat("budget for unknown user '", user, "' ignored"));
      }
      continue;
    }
    ledger.accounts_[*idx].budget = b;
  }
  return ledger;
}

absl::StatusOr<BudgetLedger> BudgetLedger::Load(
    const std::string& path, const UserCorpus& corpus, Budget default_budget,
    std::vector<std::string>* warnings) {
  if (path.empty()) return FromCsv("", corpus, default_budget, warnings);
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open budget file: ", path));
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return FromCsv(buf.str(), corpus, default_budget, warnings);
}

std::size_t BudgetLedger::num_active() const {
  return static_cast<std::size_t>(
      std::count_if(accounts_.begin(), accounts_.end(),
                    [](const UserAccount& a) { return a.active; }));
}

std::vector<std::size_t> BudgetLedger::Charge(
    const std::vector<std::size_t>& users_in_lot, double epsilon_step,
    double delta_step, double divisor, std::int64_t step) {
  std::vector<std::size_t> excluded;
  for (std::size_t u : users_in_lot) {
    UserAccount& a = accounts_[u];
    a.epsilon_spent += epsilon_step / divisor;
    a.delta_spent += delta_step / divisor;
    if (a.active && (a.epsilon_spent > a.budget.epsilon ||
                     a.delta_spent > a.budget.delta)) {
      a.active = false;
      a.excluded_at_step = step;
      excluded.push_back(u);
    }
  }
  return excluded;
}

std::string BudgetLedger::SpendReportCsv() const {
  std::string out = "user_id,epsilon_spent,delta_spent,excluded_at_step\n";
  for (const auto& a : accounts_) {
    absl::StrAppend(&out, a.user_id, ",", FormatSpend(a.epsilon_spent), ",",
                    FormatSpend(a.delta_spent), ",");
    if (a.excluded_at_step) absl::StrAppend(&out, *a.excluded_at_step);
    out += "\n";
  }
  return out;
}

absl::Status BudgetLedger::WriteSpendReport(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << SpendReportCsv();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

UserExamples BuildUserExamples(const UserCorpus& corpus,
                               const PairOptions& options, std::uint64_t seed) {
  Engine rng = MakeEngine(seed, RngStream::kPairs);
  UserExamples out;
  for (std::size_t u = 0; u < corpus.num_users(); ++u) {
    for (const auto& doc : corpus.users()[u].documents) {
      auto pairs = GeneratePairs(doc, options, rng);
      out.pairs.insert(out.pairs.end(), pairs.begin(), pairs.end());
      out.owner.insert(out.owner.end(), pairs.size(), u);
    }
  }
  return out;
}

std::vector<std::int64_t> ValidExamples(const BudgetLedger& ledger,
                                        const UserExamples& examples) {
  std::vector<std::int64_t> valid;
  valid.reserve(examples.pairs.size());
  for (std::size_t i = 0; i < examples.owner.size(); ++i) {
    if (ledger.active(examples.owner[i])) {
      valid.push_back(static_cast<std::int64_t>(i));
    }
  }
  return valid;
}

absl::StatusOr<PersonalizedResult> TrainPersonalized(
    const UserExamples& examples, const Vocabulary& vocab, DpConfig config,
    BudgetLedger ledger, const PersonalizedOptions& options,
    const TrainHooks& hooks) {
  config.mode = TrainMode::kDp;
  if (config.total_examples == 0) {
    config.total_examples = static_cast<std::int64_t>(examples.pairs.size());
  }
  RETURN_IF_ERROR(ValidateConfig(config));
  if (!(config.noise_multiplier > 0.0)) {
    return absl::InvalidArgumentError(
        "personalized training needs a positive noise multiplier");
  }
  if (config.sparse_noise) {
    return absl::InvalidArgumentError(
        "sparse noise is not supported with personal budgets");
  }
  if (ledger.accounts().empty() && !examples.pairs.empty()) {
    return absl::InvalidArgumentError("budget ledger has no users");
  }

  PersonalizedResult result{InitModel(vocab.size(), config.dim, config.seed),
                            {},
                            std::move(ledger),
                            {},
                            {}};
  const NegativeSampler sampler(vocab.counts());
  Engine sampling_rng = MakeEngine(config.seed, RngStream::kSampling);
  Engine noise_rng = MakeEngine(config.seed, RngStream::kNoise);
  const double lot_size = static_cast<double>(config.lot_size);

  auto is_checkpoint = [&](std::int64_t step) {
    return std::find(config.checkpoints.begin(), config.checkpoints.end(),
                     step) != config.checkpoints.end();
  };
  if (hooks.on_checkpoint && is_checkpoint(0)) {
    StepRecord initial;
    initial.epsilon = 0.0;
    initial.delta = config.target_delta;
    initial.delta_at_target_epsilon = 0.0;
    RETURN_IF_ERROR(hooks.on_checkpoint(0, result.model, initial));
  }

  std::vector<std::int64_t> valid = ValidExamples(result.ledger, examples);
  std::vector<std::int64_t> lot_indices;
  std::vector<TrainingPair> lot;
  double eps_before = 0.0;
  double delta_before = 0.0;
  for (std::int64_t t = 0; t < config.steps; ++t) {
    if (valid.empty()) {
      result.budgets_exhausted = true;
      break;
    }
    const double q = std::min(1.0, lot_size / static_cast<double>(valid.size()));
    const auto positions = PoissonSamplePositions(valid.size(), q, sampling_rng);
    lot_indices.clear();
    lot.clear();
    std::vector<std::size_t> users;
    for (std::int64_t p : positions) {
      const std::int64_t idx = valid[p];
      lot_indices.push_back(idx);
      lot.push_back(examples.pairs[idx]);
      users.push_back(examples.owner[idx]);
    }
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());

    const StepParams params = StepParamsFor(config, t);
    ASSIGN_OR_RETURN(StepStats stats,
                     ApplyLotStep(result.model, lot, sampler, params,
                                  sampling_rng, &noise_rng));
    RETURN_IF_ERROR(result.accountant.Accumulate(q, config.noise_multiplier));
    const double eps_after =
        result.accountant.GetEpsilon(config.target_delta).epsilon;
    const double delta_after =
        result.accountant.GetDelta(config.target_epsilon).delta;

    StepCharge charge;
    charge.step = t + 1;
    charge.epsilon = eps_after - eps_before;
    charge.delta = delta_after - delta_before;
    charge.divisor = options.divisor == ChargeDivisor::kLotSize
                         ? lot_size
                         : std::max<double>(1.0, static_cast<double>(users.size()));
    charge.users = users;
    charge.excluded = result.ledger.Charge(users, charge.epsilon, charge.delta,
                                           charge.divisor, charge.step);
    eps_before = eps_after;
    delta_before = delta_after;

    StepRecord rec;
    rec.step = t + 1;
    rec.loss = stats.mean_loss;
    rec.epsilon = eps_after;
    rec.delta = config.target_delta;
    rec.delta_at_target_epsilon = delta_after;
    rec.lot_size = stats.lot_size;
    rec.valid_examples = static_cast<std::int64_t>(valid.size());
    result.log.records.push_back(rec);
    const bool shrank = !charge.excluded.empty();
    result.charges.push_back(std::move(charge));
    result.steps_run = t + 1;

    if (hooks.on_step) {
      hooks.on_step({rec.step, lot_indices, &result.log.records.back()});
    }
    if (hooks.on_checkpoint && is_checkpoint(rec.step)) {
      RETURN_IF_ERROR(hooks.on_checkpoint(rec.step, result.model, rec));
    }
    if (shrank) valid = ValidExamples(result.ledger, examples);
  }
  return result;
}

}  // namespace dpugc
