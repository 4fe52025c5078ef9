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

#include "dpugc/run_metadata.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include <openssl/evp.h>

namespace dpugc {
namespace {

nlohmann::ordered_json Optional(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

std::optional<double> OptionalFrom(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

nlohmann::ordered_json MetadataToJson(const RunMetadata& m) {
  const DpConfig& c = m.config;
  nlohmann::ordered_json j;
  j["schema_version"] = m.schema_version;
  j["tool_version"] = m.tool_version;
  j["created_at"] = m.created_at;
  j["mode"] = m.mode;
  j["seed"] = c.seed;
  j["step"] = m.step;
  j["config"] = {
      {"dim", c.dim},
      {"negatives", c.negatives},
      {"clip", c.clip},
      {"clip_norm", c.clip_norm},
      {"noise_multiplier", c.noise_multiplier},
      {"lot_size", c.lot_size},
      {"total_examples", c.total_examples},
      {"steps", c.steps},
      {"lr_initial", c.lr_initial},
      {"lr_final", c.lr_final},
      {"target_delta", c.target_delta},
      {"target_epsilon", c.target_epsilon},
      {"sparse_noise", c.sparse_noise},
      {"checkpoints", c.checkpoints},
  };
  j["corpus"] = {
      {"corpus", m.corpus.corpus_path},
      {"user_corpus", m.corpus.user_corpus_path},
      {"vocab", m.corpus.vocab_path},
      {"min_count", m.corpus.min_count},
      {"max_size", m.corpus.max_size},
      {"max_tokens", m.corpus.max_tokens},
      {"lowercase", m.corpus.lowercase},
      {"window", m.corpus.pairs.window},
      {"dynamic_window", m.corpus.pairs.dynamic_window},
      {"subsample", m.corpus.subsample},
      {"fingerprint", m.corpus_fingerprint},
  };
  j["privacy"] = {
      {"formal_guarantee", m.is_private() && !c.sparse_noise && m.epsilon.has_value()},
      {"epsilon", Optional(m.epsilon)},
      {"delta", m.delta},
      {"target_epsilon", c.target_epsilon},
      {"delta_at_target_epsilon", Optional(m.delta_at_target_epsilon)},
  };
  if (!m.spend_report.empty()) j["spend_report"] = m.spend_report;
  return j;
}

absl::StatusOr<RunMetadata> MetadataFromJson(const nlohmann::json& j) {
  try {
    RunMetadata m;
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != kMetadataSchemaVersion) {
      return absl::InvalidArgumentError(
          absl::StrCat("unsupported metadata schema ", m.schema_version));
    }
    m.tool_version = j.at("tool_version").get<std::string>();
    m.created_at = j.value("created_at", "");
    m.mode = j.at("mode").get<std::string>();
    m.step = j.at("step").get<std::int64_t>();
    const auto& c = j.at("config");
    m.config.seed = j.at("seed").get<std::uint64_t>();
    m.config.dim = c.at("dim").get<int>();
    m.config.negatives = c.at("negatives").get<int>();
    m.config.clip = c.at("clip").get<bool>();
    m.config.clip_norm = c.at("clip_norm").get<double>();
    m.config.noise_multiplier = c.at("noise_multiplier").get<double>();
    m.config.lot_size = c.at("lot_size").get<std::int64_t>();
    m.config.total_examples = c.at("total_examples").get<std::int64_t>();
    m.config.steps = c.at("steps").get<std::int64_t>();
    m.config.lr_initial = c.at("lr_initial").get<double>();
    m.config.lr_final = c.at("lr_final").get<double>();
    m.config.target_delta = c.at("target_delta").get<double>();
    m.config.target_epsilon = c.at("target_epsilon").get<double>();
    m.config.sparse_noise = c.at("sparse_noise").get<bool>();
    m.config.checkpoints = c.at("checkpoints").get<std::vector<std::int64_t>>();
    const auto& corpus = j.at("corpus");
    m.corpus.corpus_path = corpus.at("corpus").get<std::string>();
    m.corpus.user_corpus_path = corpus.at("user_corpus").get<std::string>();
    m.corpus.vocab_path = corpus.at("vocab").get<std::string>();
    m.corpus.min_count = corpus.at("min_count").get<std::int64_t>();
    m.corpus.max_size = corpus.at("max_size").get<std::int64_t>();
    m.corpus.max_tokens = corpus.at("max_tokens").get<std::int64_t>();
    m.corpus.lowercase = corpus.at("lowercase").get<bool>();
    m.corpus.pairs.window = corpus.at("window").get<int>();
    m.corpus.pairs.dynamic_window = corpus.at("dynamic_window").get<bool>();
    m.corpus.subsample = corpus.at("subsample").get<double>();
    m.corpus_fingerprint = corpus.at("fingerprint").get<std::string>();
    const auto& p = j.at("privacy");
    m.epsilon = OptionalFrom(p, "epsilon");
    m.delta = p.at("delta").get<double>();
    m.delta_at_target_epsilon = OptionalFrom(p, "delta_at_target_epsilon");
    m.spend_report = j.value("spend_report", "");
    return m;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("bad metadata: ", e.what()));
  }
}

absl::Status WriteMetadata(const std::string& path, const RunMetadata& meta) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << MetadataToJson(meta).dump(2) << '\n';
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<RunMetadata> ReadMetadata(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("no metadata at ", path));
  nlohmann::json j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": invalid JSON"));
  }
  return MetadataFromJson(j);
}

std::string MetadataPathFor(const std::string& model_path) {
  std::filesystem::path p(model_path);
  p.replace_extension(".json");
  return p.string();
}

absl::StatusOr<std::string> Sha256File(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    return absl::InternalError("sha256 init failed");
  }
  std::vector<char> buf(1 << 20);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) {
      EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) absl::StrAppendFormat(&hex, "%02x", digest[i]);
  return hex;
}

std::string UtcTimestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace dpugc
