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

#include "dpugc/eval.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_set>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace dpugc {
namespace {

std::map<std::string, int> Bigrams(std::string_view word) {
  const std::string padded = "^" + std::string(word) + "$";
  std::map<std::string, int> grams;
  for (std::size_t i = 0; i + 1 < padded.size(); ++i) {
    ++grams[padded.substr(i, 2)];
  }
  return grams;
}

std::vector<std::string> NeighborWords(const Embeddings& e,
                                       std::string_view query, int k) {
  std::vector<std::string> words;
  auto nn = NearestNeighbors(e, query, k);
  if (!nn.ok()) return words;
  words.reserve(nn->size());
  for (auto& n : *nn) words.push_back(std::move(n.word));
  return words;
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return absl::StrFormat("%.10g", v);
}

}  // namespace

double AveragePrecision(std::span<const std::string> returned,
                        std::span<const std::string> gold) {
  if (gold.empty()) return 0.0;
  const std::unordered_set<std::string> gold_set(gold.begin(), gold.end());
  double sum = 0.0;
  int hits = 0;
  for (std::size_t p = 0; p < returned.size(); ++p) {
    if (gold_set.contains(returned[p])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(p + 1);
    }
  }
  return sum / static_cast<double>(gold.size());
}

double BigramDice(std::string_view a, std::string_view b) {
  const auto ga = Bigrams(a);
  const auto gb = Bigrams(b);
  int na = 0, nb = 0, overlap = 0;
  for (const auto& [g, c] : ga) na += c;
  for (const auto& [g, c] : gb) nb += c;
  for (const auto& [g, c] : ga) {
    auto it = gb.find(g);
    if (it != gb.end()) overlap += std::min(c, it->second);
  }
  if (na + nb == 0) return 0.0;
  return 2.0 * overlap / static_cast<double>(na + nb);
}

double CharRelevance(std::string_view word, std::span<const std::string> gold) {
  double best = 0.0;
  for (const auto& g : gold) {
    if (g == word) return 1.0;
    best = std::max(best, BigramDice(word, g));
  }
  return best;
}

double GradedAveragePrecision(std::span<const double> relevances) {
  double total = 0.0;
  double running = 0.0;
  double weighted = 0.0;
  for (std::size_t p = 0; p < relevances.size(); ++p) {
    running += relevances[p];
    total += relevances[p];
    weighted += relevances[p] * running / static_cast<double>(p + 1);
  }
  return total > 0.0 ? weighted / total : 0.0;
}

MapResult EvaluateMap(const Embeddings& model, const Embeddings& gold,
                      std::span<const std::string> queries, int k) {
  MapResult result;
  for (const auto& q : queries) {
    if (!model.Find(q) || !gold.Find(q)) {
      result.skipped.push_back(q);
      continue;
    }
    const auto returned = NeighborWords(model, q, k);
    const auto expected = NeighborWords(gold, q, k);
    std::vector<double> rel;
    rel.reserve(returned.size());
    for (const auto& w : returned) rel.push_back(CharRelevance(w, expected));
    QueryScore s{q, AveragePrecision(returned, expected),
                 GradedAveragePrecision(rel)};
    result.map_word += s.ap_word;
    result.map_char += s.ap_char;
    result.per_query.push_back(std::move(s));
  }
  if (!result.per_query.empty()) {
    result.map_word /= static_cast<double>(result.per_query.size());
    result.map_char /= static_cast<double>(result.per_query.size());
  }
  return result;
}

double MapWord(const Embeddings& model, const Embeddings& gold,
               std::span<const std::string> queries, int k) {
  return EvaluateMap(model, gold, queries, k).map_word;
}

double MapChar(const Embeddings& model, const Embeddings& gold,
               std::span<const std::string> queries, int k) {
  return EvaluateMap(model, gold, queries, k).map_char;
}

std::vector<std::string> DefaultQueries() {
  return {"three", "eight", "they",  "city",  "music", "war",
          "king",  "water", "state", "church", "language"};
}

absl::StatusOr<std::vector<std::string>> LoadQueries(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open queries: ", path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const absl::string_view w = absl::StripAsciiWhitespace(line);
    if (!w.empty()) out.emplace_back(w.data(), w.size());
  }
  if (out.empty()) return absl::InvalidArgumentError("query file is empty");
  return out;
}

std::string EvalReport::ToCsv() const {
  std::string out = "step,variant,map_word,map_char,epsilon,delta\n";
  for (const auto& r : rows) {
    absl::StrAppend(&out, r.step, ",", r.variant, ",",
                    FormatDouble(r.scores.map_word), ",",
                    FormatDouble(r.scores.map_char), ",",
                    FormatDouble(r.epsilon), ",", FormatDouble(r.delta), "\n");
  }
  return out;
}

absl::Status EvalReport::WriteCsv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << ToCsv();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

EvalReport DriftReport(std::span<const DriftCheckpoint> checkpoints,
                       const Embeddings& gold,
                       std::span<const std::string> queries, int k) {
  EvalReport report;
  for (const auto& c : checkpoints) {
    report.rows.push_back({c.step, c.variant,
                           EvaluateMap(*c.model, gold, queries, k), c.epsilon,
                           c.delta});
  }
  return report;
}

}  // namespace dpugc
