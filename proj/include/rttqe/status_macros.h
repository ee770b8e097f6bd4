// Copyright 2026 The rttqe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RTTQE_STATUS_MACROS_H_
#define RTTQE_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define RTTQE_CONCAT_IMPL(a, b) a##b
#define RTTQE_CONCAT(a, b) RTTQE_CONCAT_IMPL(a, b)

#define RTTQE_RETURN_IF_ERROR(expr)          \
  do {                                       \
    const absl::Status _rttqe_status = (expr); \
    if (!_rttqe_status.ok()) return _rttqe_status; \
  } while (0)

#define RTTQE_ASSIGN_OR_RETURN_IMPL(tmp, lhs, rexpr) \
  auto tmp = (rexpr);                                \
  if (!tmp.ok()) return tmp.status();                \
  lhs = std::move(tmp).value()

// Usage: RTTQE_ASSIGN_OR_RETURN(auto x, MaybeX());
#define RTTQE_ASSIGN_OR_RETURN(lhs, rexpr) \
  RTTQE_ASSIGN_OR_RETURN_IMPL(RTTQE_CONCAT(_rttqe_statusor_, __LINE__), lhs, rexpr)

#endif  // RTTQE_STATUS_MACROS_H_
