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

// word2vec text format: a `V k` header line, then `word v1 ... vk` per row.

#ifndef DPUGC_EMBEDDING_IO_H_
#define DPUGC_EMBEDDING_IO_H_

#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpugc/model.h"

namespace dpugc {

std::string FormatWord2VecText(const Embeddings& embeddings);
absl::Status SaveWord2VecText(const std::string& path,
                              const Embeddings& embeddings);
absl::StatusOr<Embeddings> ParseWord2VecText(std::string_view text);
absl::StatusOr<Embeddings> LoadWord2VecText(const std::string& path);

}  // namespace dpugc

#endif  // DPUGC_EMBEDDING_IO_H_
