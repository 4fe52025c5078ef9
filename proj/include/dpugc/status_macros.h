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

#ifndef DPUGC_STATUS_MACROS_H_
#define DPUGC_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define DPUGC_CONCAT_INNER_(a, b) a##b
#define DPUGC_CONCAT_(a, b) DPUGC_CONCAT_INNER_(a, b)

#define RETURN_IF_ERROR(expr)                \
  do {                                       \
    absl::Status _dpugc_status = (expr);     \
    if (!_dpugc_status.ok()) {               \
      return _dpugc_status;                  \
    }                                        \
  } while (0)

#define DPUGC_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                 \
  if (!tmp.ok()) {                                   \
    return tmp.status();                             \
  }                                                  \
  lhs = std::move(tmp).value()

#define ASSIGN_OR_RETURN(lhs, expr) \
  DPUGC_ASSIGN_OR_RETURN_IMPL_(DPUGC_CONCAT_(_dpugc_statusor_, __LINE__), lhs, expr)

#endif  // DPUGC_STATUS_MACROS_H_
