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

// dpugc: train, evaluate and inspect word embeddings under differential
// privacy.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "dpugc/accountant.h"
#include "dpugc/corpus.h"
#include "dpugc/dp_sgd.h"
#include "dpugc/embedding_io.h"
#include "dpugc/eval.h"
#include "dpugc/model.h"
#include "dpugc/personalized.h"
#include "dpugc/run_metadata.h"
#include "dpugc/status_macros.h"
#include "dpugc/synthetic.h"
#include "dpugc/utility.h"
#include "dpugc/word2vec.h"

namespace dpugc {
namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

const std::vector<std::int64_t> kDefaultSchedule = {
    20, 200, 500, 1000, 5000, 10000, 50000, 90000, 100000};

int ExitCodeFor(const absl::Status& s) {
  if (s.ok()) return kExitOk;
  std::cerr << "dpugc: " << s.message() << "\n";
  return s.code() == absl::StatusCode::kInternal ? kExitNumeric : kExitUsage;
}

int DefaultThreads() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("DPUGC_THREADS")) {
    int cap = 0;
    if (absl::SimpleAtoi(env, &cap) && cap >= 1) n = std::min(n, cap);
  }
  return n;
}

std::string Fmt(double v) { return absl::StrFormat("%.10g", v); }

absl::Status EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return absl::PermissionDeniedError(absl::StrCat("cannot create ", dir));
  return absl::OkStatus();
}

absl::Status WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << text;
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------
// Shared corpus flags.

struct CorpusFlags {
  std::string corpus;
  std::string user_corpus;
  std::string vocab;
  std::int64_t min_count = 5;
  std::int64_t max_size = 0;
  std::int64_t max_tokens = 0;
  bool no_lowercase = false;

  bool lowercase() const { return !no_lowercase; }
  std::optional<std::int64_t> token_limit() const {
    if (max_tokens > 0) return max_tokens;
    return std::nullopt;
  }
};

void AddCorpusFlags(CLI::App* app, CorpusFlags& f) {
  app->add_option("--corpus", f.corpus,
                  "Plain-text corpus, one document per line")
      ->check(CLI::ExistingFile);
  app->add_option("--user-corpus", f.user_corpus,
                  "User corpus, `user_id<TAB>text` per line")
      ->check(CLI::ExistingFile);
  app->add_option("--min-count", f.min_count, "Minimum word count")
      ->capture_default_str();
  app->add_option("--max-size", f.max_size,
                  "Maximum vocabulary size excluding UNK (0 = unbounded)")
      ->capture_default_str();
  app->add_option("--max-tokens", f.max_tokens,
                  "Read at most this many tokens of --corpus (0 = all)")
      ->capture_default_str();
  app->add_flag("--no-lowercase", f.no_lowercase, "Keep the original case");
}

absl::StatusOr<Vocabulary> BuildVocabFromFlags(const CorpusFlags& f) {
  VocabOptions opts;
  opts.min_count = f.min_count;
  opts.max_size = f.max_size;
  VocabBuilder builder;
  if (!f.corpus.empty()) {
    RETURN_IF_ERROR(ForEachFileToken(
        f.corpus, f.lowercase(), f.token_limit(),
        [&](std::string_view tok) { builder.Add(tok); }));
  } else if (!f.user_corpus.empty()) {
    ASSIGN_OR_RETURN(auto records, ReadUserRecords(f.user_corpus));
    for (const auto& r : records) {
      for (const auto& tok : Tokenize(r.text, f.lowercase())) builder.Add(tok);
    }
  } else {
    return absl::InvalidArgumentError("one of --corpus or --user-corpus is required");
  }
  return builder.Build(opts);
}

// ---------------------------------------------------------------------------
// build-vocab

struct BuildVocabArgs {
  CorpusFlags corpus;
  std::string out;
};

int RunBuildVocab(const BuildVocabArgs& a) {
  if (!a.corpus.corpus.empty() && !a.corpus.user_corpus.empty()) {
    return ExitCodeFor(
        absl::InvalidArgumentError("give --corpus or --user-corpus, not both"));
  }
  auto vocab = BuildVocabFromFlags(a.corpus);
  if (!vocab.ok()) return ExitCodeFor(vocab.status());
  if (absl::Status s = vocab->Save(a.out); !s.ok()) return ExitCodeFor(s);
  std::cout << "vocab_size " << vocab->size() << "\n"
            << "total_tokens " << vocab->total_tokens() << "\n"
            << "unk_count " << vocab->Count(Vocabulary::kUnkId) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  CorpusFlags corpus;
  std::string mode = "dp";
  int dim = 100;
  int window = 5;
  bool fixed_window = false;
  int negatives = kDefaultNegatives;
  double clip_norm = 1.0;
  bool no_clip = false;
  double sigma = 1.0;
  std::int64_t lot_size = 1000;
  std::int64_t steps = 1000;
  double lr = 0.025;
  double lr_final = 0.0001;
  double delta = 1e-5;
  double target_epsilon = 0.125;
  std::string budget_file;
  std::string default_budget = "1,1e-3";
  std::string charge_divisor = "lot";
  std::vector<std::int64_t> checkpoints;
  std::uint64_t seed = 1;
  bool deterministic = false;
  bool sparse_noise = false;
  int threads = 0;
  int epochs = 5;
  double subsample = 0.0;
  std::string out_dir;
  std::int64_t progress = 0;
};

absl::StatusOr<Budget> ParseBudget(const std::string& text) {
  std::vector<std::string> parts = absl::StrSplit(text, ',');
  Budget b;
  if (parts.size() != 2 || !absl::SimpleAtod(parts[0], &b.epsilon) ||
      !absl::SimpleAtod(parts[1], &b.delta) || b.epsilon < 0 || b.delta < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("--default-budget expects `epsilon,delta`, got '", text, "'"));
  }
  return b;
}

std::vector<std::int64_t> CheckpointSchedule(const TrainArgs& a) {
  std::vector<std::int64_t> out = a.checkpoints;
  if (out.empty()) {
    for (std::int64_t s : kDefaultSchedule) {
      if (s <= a.steps) out.push_back(s);
    }
    out.push_back(a.steps);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<double> Finite(double v) {
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

class TrainJob {
 public:
  explicit TrainJob(const TrainArgs& args) : a_(args) {}

  absl::Status Run() {
    RETURN_IF_ERROR(Validate());
    RETURN_IF_ERROR(EnsureDir(a_.out_dir));
    RETURN_IF_ERROR(PrepareVocab());
    FillMetadata();
    if (a_.mode == "gold") return RunGold();
    if (a_.mode == "personalized") return RunPersonalized();
    return RunDp();
  }

 private:
  absl::Status Validate() {
    if (a_.mode != "plain" && a_.mode != "dp" && a_.mode != "personalized" &&
        a_.mode != "gold") {
      return absl::InvalidArgumentError(absl::StrCat("unknown mode ", a_.mode));
    }
    const bool have_plain = !a_.corpus.corpus.empty();
    const bool have_users = !a_.corpus.user_corpus.empty();
    if (have_plain == have_users) {
      return absl::InvalidArgumentError(
          "exactly one of --corpus or --user-corpus is required");
    }
    if (a_.mode == "personalized" && !have_users) {
      return absl::InvalidArgumentError("personalized mode requires --user-corpus");
    }
    if (a_.out_dir.empty()) {
      return absl::InvalidArgumentError("--out-dir is required");
    }
    if (a_.window < 1) return absl::InvalidArgumentError("--window must be >= 1");
    if (a_.charge_divisor != "lot" && a_.charge_divisor != "users") {
      return absl::InvalidArgumentError("--charge-divisor must be lot or users");
    }
    if (a_.sparse_noise) {
      std::cerr << "dpugc: warning: --sparse-noise adds noise to touched rows "
                   "only; the resulting model has NO formal privacy guarantee\n";
    }
    return absl::OkStatus();
  }

  absl::Status PrepareVocab() {
    if (!a_.corpus.vocab.empty()) {
      ASSIGN_OR_RETURN(vocab_, Vocabulary::Load(a_.corpus.vocab));
      return absl::OkStatus();
    }
    ASSIGN_OR_RETURN(vocab_, BuildVocabFromFlags(a_.corpus));
    return vocab_.Save((fs::path(a_.out_dir) / "vocab.txt").string());
  }

  void FillMetadata() {
    meta_.mode = a_.mode;
    meta_.created_at = UtcTimestamp();
    meta_.corpus.corpus_path = a_.corpus.corpus;
    meta_.corpus.user_corpus_path = a_.corpus.user_corpus;
    meta_.corpus.vocab_path = a_.corpus.vocab;
    meta_.corpus.min_count = a_.corpus.min_count;
    meta_.corpus.max_size = a_.corpus.max_size;
    meta_.corpus.max_tokens = a_.corpus.max_tokens;
    meta_.corpus.lowercase = a_.corpus.lowercase();
    meta_.corpus.pairs = Pairs();
    meta_.corpus.subsample = a_.subsample;
  }

  PairOptions Pairs() const {
    PairOptions p;
    p.window = a_.window;
    p.dynamic_window = !a_.fixed_window;
    return p;
  }

  DpConfig Config() const {
    DpConfig c;
    c.mode = a_.mode == "plain" ? TrainMode::kPlain : TrainMode::kDp;
    c.dim = a_.dim;
    c.negatives = a_.negatives;
    c.clip_norm = a_.clip_norm;
    c.clip = !a_.no_clip;
    c.noise_multiplier = a_.mode == "plain" ? 0.0 : a_.sigma;
    c.lot_size = a_.lot_size;
    c.steps = a_.steps;
    c.lr_initial = a_.lr;
    c.lr_final = a_.lr_final;
    c.target_delta = a_.delta;
    c.target_epsilon = a_.target_epsilon;
    c.seed = a_.seed;
    c.sparse_noise = a_.sparse_noise;
    c.threads = a_.threads > 0 ? a_.threads : DefaultThreads();
    c.checkpoints = CheckpointSchedule(a_);
    return c;
  }

  absl::Status Fingerprint() {
    const std::string& path =
        a_.corpus.corpus.empty() ? a_.corpus.user_corpus : a_.corpus.corpus;
    ASSIGN_OR_RETURN(meta_.corpus_fingerprint, Sha256File(path));
    return absl::OkStatus();
  }

  std::string Path(const std::string& name) const {
    return (fs::path(a_.out_dir) / name).string();
  }

  absl::Status SaveModel(const std::string& stem, const EmbeddingModel& model,
                         const RunMetadata& meta) {
    RETURN_IF_ERROR(
        SaveWord2VecText(Path(stem + ".vec"), ExportEmbeddings(model, vocab_)));
    return WriteMetadata(Path(stem + ".json"), meta);
  }

  CheckpointFn Checkpointer(const DpConfig& config) {
    return [this, config](std::int64_t step, const EmbeddingModel& model,
                          const StepRecord& rec) -> absl::Status {
      RunMetadata m = meta_;
      m.config = config;
      m.step = step;
      m.delta = config.target_delta;
      if (config.noisy()) {
        m.epsilon = step == 0 ? std::optional<double>(0.0) : Finite(rec.epsilon);
        m.delta_at_target_epsilon =
            step == 0 ? std::optional<double>(0.0)
                      : Finite(rec.delta_at_target_epsilon);
      }
      if (a_.progress > 0) {
        std::cerr << "checkpoint " << step << "\n";
      }
      return SaveModel(absl::StrCat("ckpt_", step), model, m);
    };
  }

  TraceFn Progress() {
    if (a_.progress <= 0) return nullptr;
    const std::int64_t every = a_.progress;
    return [every](const StepTrace& t) {
      if (t.record && t.step % every == 0) {
        std::cerr << absl::StrFormat("step %d loss %.6f eps %.6g lot %d\n",
                                     t.step, t.record->loss, t.record->epsilon,
                                     t.record->lot_size);
      }
    };
  }

  absl::Status FinishRun(const DpConfig& config, const TrainingLog& log,
                         std::int64_t steps_run) {
    RETURN_IF_ERROR(log.WriteCsv(Path("train_log.csv")));
    meta_.config = config;
    meta_.step = steps_run;
    meta_.delta = config.target_delta;
    if (config.noisy() && !log.records.empty()) {
      meta_.epsilon = Finite(log.records.back().epsilon);
      meta_.delta_at_target_epsilon =
          Finite(log.records.back().delta_at_target_epsilon);
    } else if (config.noisy()) {
      meta_.epsilon = 0.0;
      meta_.delta_at_target_epsilon = 0.0;
    }
    RETURN_IF_ERROR(WriteMetadata(Path("run.json"), meta_));
    std::cout << "steps " << steps_run << "\n";
    if (meta_.epsilon) {
      std::cout << "epsilon " << Fmt(*meta_.epsilon) << " at delta "
                << Fmt(config.target_delta) << "\n";
    }
    if (meta_.delta_at_target_epsilon) {
      std::cout << "delta " << Fmt(*meta_.delta_at_target_epsilon)
                << " at epsilon " << Fmt(config.target_epsilon) << "\n";
    }
    return absl::OkStatus();
  }

  absl::StatusOr<std::vector<Document>> Documents() {
    if (!a_.corpus.corpus.empty()) {
      return LoadPlainCorpus(a_.corpus.corpus, vocab_, a_.corpus.lowercase(),
                             a_.corpus.token_limit());
    }
    ASSIGN_OR_RETURN(UserCorpus users, LoadUserCorpus(a_.corpus.user_corpus, vocab_,
                                                      a_.corpus.lowercase()));
    return users.Flatten();
  }

  absl::Status RunDp() {
    RETURN_IF_ERROR(Fingerprint());
    ASSIGN_OR_RETURN(std::vector<Document> docs, Documents());
    const std::vector<TrainingPair> examples = BuildExamples(docs, Pairs(), a_.seed);
    DpConfig config = Config();
    config.total_examples = static_cast<std::int64_t>(examples.size());
    TrainHooks hooks;
    hooks.on_checkpoint = Checkpointer(config);
    hooks.on_step = Progress();
    ASSIGN_OR_RETURN(TrainResult result, TrainDp(examples, vocab_, config, hooks));
    return FinishRun(config, result.log, config.steps);
  }

  absl::Status RunPersonalized() {
    RETURN_IF_ERROR(Fingerprint());
    ASSIGN_OR_RETURN(UserCorpus users, LoadUserCorpus(a_.corpus.user_corpus, vocab_,
                                                      a_.corpus.lowercase()));
    ASSIGN_OR_RETURN(Budget fallback, ParseBudget(a_.default_budget));
    std::vector<std::string> warnings;
    ASSIGN_OR_RETURN(BudgetLedger ledger,
                     BudgetLedger::Load(a_.budget_file, users, fallback, &warnings));
    for (const auto& w : warnings) std::cerr << "dpugc: warning: " << w << "\n";
    const UserExamples examples = BuildUserExamples(users, Pairs(), a_.seed);
    DpConfig config = Config();
    config.total_examples = static_cast<std::int64_t>(examples.pairs.size());
    PersonalizedOptions options;
    options.divisor = a_.charge_divisor == "users" ? ChargeDivisor::kUsersInLot
                                                   : ChargeDivisor::kLotSize;
    meta_.spend_report = "spend.csv";
    TrainHooks hooks;
    hooks.on_checkpoint = Checkpointer(config);
    hooks.on_step = Progress();
    ASSIGN_OR_RETURN(PersonalizedResult result,
                     TrainPersonalized(examples, vocab_, config, std::move(ledger),
                                       options, hooks));
    RETURN_IF_ERROR(result.ledger.WriteSpendReport(Path("spend.csv")));
    if (result.budgets_exhausted) {
      std::cout << "all budgets exhausted after step " << result.steps_run << "\n";
    }
    return FinishRun(config, result.log, result.steps_run);
  }

  absl::Status RunGold() {
    RETURN_IF_ERROR(Fingerprint());
    ASSIGN_OR_RETURN(std::vector<Document> docs, Documents());
    SkipGramOptions opts;
    opts.dim = a_.dim;
    opts.pairs = Pairs();
    opts.negatives = a_.negatives;
    opts.epochs = a_.epochs;
    opts.lr_initial = a_.lr;
    opts.lr_final = a_.lr_final;
    opts.subsample = a_.subsample;
    opts.seed = a_.seed;
    ASSIGN_OR_RETURN(EmbeddingModel model, TrainSkipGram(docs, vocab_, opts));
    DpConfig config = Config();
    config.noise_multiplier = 0.0;
    config.steps = a_.epochs;
    config.checkpoints = {};
    meta_.config = config;
    meta_.step = a_.epochs;
    meta_.delta = config.target_delta;
    RETURN_IF_ERROR(SaveModel("gold", model, meta_));
    RETURN_IF_ERROR(WriteMetadata(Path("run.json"), meta_));
    std::cout << "epochs " << a_.epochs << "\n";
    return absl::OkStatus();
  }

  const TrainArgs& a_;
  Vocabulary vocab_;
  RunMetadata meta_;
};

void AddTrainFlags(CLI::App* app, TrainArgs& a) {
  AddCorpusFlags(app, a.corpus);
  app->add_option("--vocab", a.corpus.vocab, "Vocabulary file from build-vocab")
      ->check(CLI::ExistingFile);
  app->add_option("--mode", a.mode,
                  "plain | dp | personalized, or gold for classic online "
                  "skip-gram")
      ->check(CLI::IsMember({"plain", "dp", "personalized", "gold"}))
      ->capture_default_str();
  app->add_option("--dim", a.dim, "Embedding dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--window", a.window, "Maximum context window")
      ->capture_default_str();
  app->add_flag("--fixed-window", a.fixed_window,
                "Always use the full window instead of sampling its width");
  app->add_option("--negatives", a.negatives, "Negative samples per pair")
      ->capture_default_str();
  app->add_option("--clip-norm", a.clip_norm, "Per-example clipping norm C")
      ->capture_default_str();
  app->add_flag("--no-clip", a.no_clip, "Plain mode: disable clipping");
  app->add_option("--sigma", a.sigma, "Noise multiplier")->capture_default_str();
  app->add_option("--lot-size", a.lot_size, "Expected lot size L")
      ->capture_default_str();
  app->add_option("--steps", a.steps, "Training steps T")->capture_default_str();
  app->add_option("--lr", a.lr, "Initial learning rate")->capture_default_str();
  app->add_option("--lr-final", a.lr_final, "Final learning rate")
      ->capture_default_str();
  app->add_option("--delta", a.delta, "Target delta")->capture_default_str();
  app->add_option("--target-epsilon", a.target_epsilon,
                  "Target epsilon for the delta(epsilon) view")
      ->capture_default_str();
  app->add_option("--budget-file", a.budget_file,
                  "CSV `user_id,epsilon_budget,delta_budget`")
      ->check(CLI::ExistingFile);
  app->add_option("--default-budget", a.default_budget,
                  "Budget `epsilon,delta` for users absent from the budget file")
      ->capture_default_str();
  app->add_option("--charge-divisor", a.charge_divisor,
                  "lot: divide step spend by L; users: by users in the lot "
                  "(experimental)")
      ->capture_default_str();
  app->add_option("--checkpoints", a.checkpoints,
                  "Comma-separated checkpoint steps")
      ->delimiter(',');
  app->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  app->add_flag("--deterministic", a.deterministic,
                "Require bit-reproducible output (always the case)");
  app->add_flag("--sparse-noise", a.sparse_noise,
                "Noise on touched rows only. NO formal privacy guarantee.");
  app->add_option("--threads", a.threads,
                  "Worker threads (default: all cores, capped by DPUGC_THREADS)");
  app->add_option("--epochs", a.epochs, "Gold mode: passes over the corpus")
      ->capture_default_str();
  app->add_option("--subsample", a.subsample,
                  "Gold mode: frequent-word subsampling threshold")
      ->capture_default_str();
  app->add_option("--out-dir", a.out_dir, "Output directory")->required();
  app->add_option("--progress", a.progress, "Log every N steps to stderr");
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string gold;
  std::vector<std::string> models;
  std::string queries;
  int topk = kDefaultTopK;
  std::string out;
  bool allow_unlabeled = false;
};

int RunEval(const EvalArgs& a) {
  auto gold = LoadWord2VecText(a.gold);
  if (!gold.ok()) return ExitCodeFor(gold.status());
  std::vector<std::string> queries = DefaultQueries();
  if (!a.queries.empty()) {
    auto q = LoadQueries(a.queries);
    if (!q.ok()) return ExitCodeFor(q.status());
    queries = *std::move(q);
  }
  if (a.topk < 1) return ExitCodeFor(absl::InvalidArgumentError("--topk must be >= 1"));
  std::vector<Embeddings> models;
  std::vector<DriftCheckpoint> checkpoints;
  models.reserve(a.models.size());
  for (const auto& path : a.models) {
    DriftCheckpoint c;
    auto meta = ReadMetadata(MetadataPathFor(path));
    if (meta.ok()) {
      c.step = meta->step;
      c.variant = meta->mode;
      c.epsilon = meta->epsilon.value_or(std::numeric_limits<double>::infinity());
      c.delta = meta->delta;
    } else if (a.allow_unlabeled) {
      c.variant = "unlabeled";
      c.epsilon = std::numeric_limits<double>::infinity();
      c.delta = 1.0;
    } else {
      return ExitCodeFor(absl::FailedPreconditionError(absl::StrCat(
          "model ", path, " has no usable metadata (", meta.status().message(),
          "); pass --allow-unlabeled to evaluate it anyway")));
    }
    auto m = LoadWord2VecText(path);
    if (!m.ok()) return ExitCodeFor(m.status());
    models.push_back(*std::move(m));
    checkpoints.push_back(c);
  }
  for (std::size_t i = 0; i < models.size(); ++i) checkpoints[i].model = &models[i];
  const EvalReport report = DriftReport(checkpoints, *gold, queries, a.topk);
  for (const auto& row : report.rows) {
    for (const auto& s : row.scores.skipped) {
      std::cerr << "dpugc: warning: query '" << s << "' skipped for step "
                << row.step << "\n";
    }
  }
  if (a.out.empty()) {
    std::cout << report.ToCsv();
    return kExitOk;
  }
  return ExitCodeFor(report.WriteCsv(a.out));
}

// ---------------------------------------------------------------------------
// regress

struct RegressArgs {
  std::string labeled;
  std::string public_model;
  std::string dp_model;
  std::string nonedp_model;
  std::uint64_t split_seed = 1;
  int splits = 1;
  double lambda = kDefaultRidgeLambda;
  bool no_standardize = false;
  std::string out;
};

int RunRegress(const RegressArgs& a) {
  auto users = LoadLabeledUsers(a.labeled);
  if (!users.ok()) return ExitCodeFor(users.status());
  auto pub = LoadWord2VecText(a.public_model);
  if (!pub.ok()) return ExitCodeFor(pub.status());
  std::optional<Embeddings> dp, nonedp;
  RegressionRow row;
  row.epsilon = std::numeric_limits<double>::infinity();
  row.delta = 1.0;
  if (!a.dp_model.empty()) {
    auto m = LoadWord2VecText(a.dp_model);
    if (!m.ok()) return ExitCodeFor(m.status());
    dp = *std::move(m);
    if (auto meta = ReadMetadata(MetadataPathFor(a.dp_model)); meta.ok()) {
      row.step = meta->step;
      row.epsilon = meta->epsilon.value_or(row.epsilon);
      row.delta = meta->delta;
    }
  }
  if (!a.nonedp_model.empty()) {
    auto m = LoadWord2VecText(a.nonedp_model);
    if (!m.ok()) return ExitCodeFor(m.status());
    nonedp = *std::move(m);
  }
  if (a.splits < 1) return ExitCodeFor(absl::InvalidArgumentError("--splits must be >= 1"));
  RegressionOptions options;
  options.lambda = a.lambda;
  options.standardize = !a.no_standardize;
  double base = 0, dp_sum = 0, nonedp_sum = 0;
  for (int i = 0; i < a.splits; ++i) {
    auto r = RegressionExperiment(*users, *pub, dp ? &*dp : nullptr,
                                  nonedp ? &*nonedp : nullptr,
                                  a.split_seed + static_cast<std::uint64_t>(i),
                                  options);
    if (!r.ok()) return ExitCodeFor(r.status());
    base += r->baseline_rmse;
    if (r->dp_rmse) dp_sum += *r->dp_rmse;
    if (r->nonedp_rmse) nonedp_sum += *r->nonedp_rmse;
  }
  row.result.baseline_rmse = base / a.splits;
  if (dp) row.result.dp_rmse = dp_sum / a.splits;
  if (nonedp) row.result.nonedp_rmse = nonedp_sum / a.splits;
  const std::string csv = RegressionReportCsv({&row, 1});
  if (a.out.empty()) {
    std::cout << csv;
    return kExitOk;
  }
  return ExitCodeFor(WriteText(a.out, csv));
}

// ---------------------------------------------------------------------------
// query

struct QueryArgs {
  std::string model;
  std::string word;
  int topk = 10;
};

int RunQuery(const QueryArgs& a) {
  auto model = LoadWord2VecText(a.model);
  if (!model.ok()) return ExitCodeFor(model.status());
  auto neighbors = NearestNeighbors(*model, a.word, a.topk);
  if (!neighbors.ok()) return ExitCodeFor(neighbors.status());
  for (const auto& n : *neighbors) {
    std::cout << n.word << "\t" << absl::StrFormat("%.17g", n.cosine) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  SyntheticOptions options;
  std::string out_dir;
};

int RunSynth(const SynthArgs& a) {
  if (absl::Status s = EnsureDir(a.out_dir); !s.ok()) return ExitCodeFor(s);
  const SyntheticData data = GenerateSynthetic(a.options);
  const fs::path dir(a.out_dir);
  if (absl::Status s = WriteLabeledUsers((dir / "labeled.tsv").string(), data.users);
      !s.ok()) {
    return ExitCodeFor(s);
  }
  std::string users_tsv;
  for (const auto& u : data.users) {
    for (const auto& doc : u.documents) {
      absl::StrAppend(&users_tsv, u.user_id, "\t", absl::StrJoin(doc, " "), "\n");
    }
  }
  std::string public_txt;
  for (const auto& doc : data.public_docs) {
    absl::StrAppend(&public_txt, absl::StrJoin(doc, " "), "\n");
  }
  for (const auto& [name, text] :
       {std::pair<std::string, const std::string*>{"user_corpus.tsv", &users_tsv},
        {"public.txt", &public_txt}}) {
    if (absl::Status s = WriteText((dir / name).string(), *text); !s.ok()) {
      return ExitCodeFor(s);
    }
  }
  std::cout << "users " << data.users.size() << "\n"
            << "public_docs " << data.public_docs.size() << "\n";
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Differentially private word embeddings for user-generated text"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  BuildVocabArgs vocab_args;
  auto* build_vocab = app.add_subcommand("build-vocab", "Count a corpus into a vocabulary");
  AddCorpusFlags(build_vocab, vocab_args.corpus);
  build_vocab->add_option("--out", vocab_args.out, "Vocabulary file")->required();

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train an embedding model");
  train->set_config("--config", "", "Flat key = value config file");
  AddTrainFlags(train, train_args);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "MAP-Word / MAP-Char against a gold model");
  eval->add_option("--gold", eval_args.gold, "Gold model")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--model", eval_args.models, "Model to score (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--queries", eval_args.queries, "One query word per line")
      ->check(CLI::ExistingFile);
  eval->add_option("--topk", eval_args.topk, "Neighbors per query")
      ->capture_default_str();
  eval->add_option("--out", eval_args.out, "Report CSV (default: stdout)");
  eval->add_flag("--allow-unlabeled", eval_args.allow_unlabeled,
                 "Score models that have no metadata file");

  RegressArgs regress_args;
  auto* regress = app.add_subcommand("regress", "Downstream regression utility");
  regress->add_option("--labeled", regress_args.labeled,
                      "`user_id<TAB>score<TAB>text` per line")
      ->required()
      ->check(CLI::ExistingFile);
  regress->add_option("--public", regress_args.public_model, "Public model")
      ->required()
      ->check(CLI::ExistingFile);
  regress->add_option("--dp", regress_args.dp_model, "DP private model")
      ->check(CLI::ExistingFile);
  regress->add_option("--nonedp", regress_args.nonedp_model, "Non-DP private model")
      ->check(CLI::ExistingFile);
  regress->add_option("--split-seed", regress_args.split_seed, "First split seed")
      ->capture_default_str();
  regress->add_option("--splits", regress_args.splits,
                      "Average over this many consecutive split seeds")
      ->capture_default_str();
  regress->add_option("--lambda", regress_args.lambda, "Ridge penalty")
      ->capture_default_str();
  regress->add_flag("--no-standardize", regress_args.no_standardize,
                    "Fit on raw features");
  regress->add_option("--out", regress_args.out, "Report CSV (default: stdout)");

  QueryArgs query_args;
  auto* query = app.add_subcommand("query", "Nearest neighbors of a word");
  query->add_option("--model", query_args.model, "Model file")
      ->required()
      ->check(CLI::ExistingFile);
  query->add_option("--word", query_args.word, "Query word")->required();
  query->add_option("--topk", query_args.topk, "Neighbors to print")
      ->capture_default_str();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Write a synthetic labeled-user dataset");
  synth->add_option("--out-dir", synth_args.out_dir, "Output directory")->required();
  synth->add_option("--users", synth_args.options.num_users, "Users")
      ->capture_default_str();
  synth->add_option("--public-docs", synth_args.options.public_docs,
                    "Public documents")
      ->capture_default_str();
  synth->add_option("--seed", synth_args.options.seed, "Random seed")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (build_vocab->parsed()) return RunBuildVocab(vocab_args);
  if (train->parsed()) return ExitCodeFor(TrainJob(train_args).Run());
  if (eval->parsed()) return RunEval(eval_args);
  if (regress->parsed()) return RunRegress(regress_args);
  if (query->parsed()) return RunQuery(query_args);
  if (synth->parsed()) return RunSynth(synth_args);
  return kExitUsage;
}

}  // namespace
}  // namespace dpugc

int main(int argc, char** argv) { return dpugc::Main(argc, argv); }
