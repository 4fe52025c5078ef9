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

#include "dpugc/embedding_io.h"

#include <fstream>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"

namespace dpugc {

std::string FormatWord2VecText(const Embeddings& e) {
  std::string out = absl::StrCat(e.words.size(), " ", e.dim, "\n");
  out.reserve(out.size() + e.words.size() * (16 + 16 * e.dim));
  for (std::size_t i = 0; i < e.words.size(); ++i) {
    out += e.words[i];
    for (double v : e.row(i)) absl::StrAppendFormat(&out, " %.9g", v);
    out += '\n';
  }
  return out;
}

absl::Status SaveWord2VecText(const std::string& path, const Embeddings& e) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << FormatWord2VecText(e);
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<Embeddings> ParseWord2VecText(std::string_view input) {
  const absl::string_view text(input.data(), input.size());
  std::vector<absl::string_view> lines =
      absl::StrSplit(text, '\n', absl::SkipEmpty());
  if (lines.empty()) return absl::InvalidArgumentError("empty embedding file");
  std::vector<absl::string_view> header =
      absl::StrSplit(lines[0], ' ', absl::SkipEmpty());
  std::int64_t rows = 0;
  int dim = 0;
  if (header.size() != 2 || !absl::SimpleAtoi(header[0], &rows) ||
      !absl::SimpleAtoi(header[1], &dim) || rows < 0 || dim < 1) {
    return absl::InvalidArgumentError("bad word2vec header");
  }
  if (static_cast<std::int64_t>(lines.size()) - 1 != rows) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected ", rows, " vectors, found ", lines.size() - 1));
  }
  Embeddings e;
  e.dim = dim;
  e.words.reserve(rows);
  e.vectors.reserve(static_cast<std::size_t>(rows) * dim);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<absl::string_view> fields =
        absl::StrSplit(lines[i], ' ', absl::SkipEmpty());
    if (static_cast<int>(fields.size()) != dim + 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", i + 1, ": expected ", dim, " values"));
    }
    e.words.emplace_back(fields[0].data(), fields[0].size());
    for (int j = 1; j <= dim; ++j) {
      double v = 0.0;
      if (!absl::SimpleAtod(fields[j], &v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", i + 1, ": bad number '", fields[j], "'"));
      }
      e.vectors.push_back(v);
    }
  }
  e.Reindex();
  if (e.index.size() != e.words.size()) {
    return absl::InvalidArgumentError("duplicate words in embedding file");
  }
  return e;
}

absl::StatusOr<Embeddings> LoadWord2VecText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open model: ", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseWord2VecText(buf.str());
}

}  // namespace dpugc
