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

// Content-addressed on-disk cache for provider responses.
//
// Layout: <root>/<hex[0:2]>/<hex[2:4]>/<hex>       value, stored verbatim
//         <root>/<hex[0:2]>/<hex[2:4]>/<hex>.meta  JSON sidecar
// Entries never expire.

#ifndef RTTQE_CACHE_H_
#define RTTQE_CACHE_H_

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>

#include "absl/status/status.h"
#include "absl/strings/string_view.h"

namespace rttqe {

// SHA-256 (hex) of the length-prefixed fields.
struct CacheKey {
  std::string hex;

  static CacheKey For(absl::string_view provider_id, absl::string_view source,
                      absl::string_view target, absl::string_view text);
};

std::string Sha256Hex(absl::string_view data);

// Writes to a sibling temporary file, then renames it over `path`.
absl::Status WriteFileAtomically(const std::filesystem::path& path,
                                 absl::string_view contents);

class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path root);

  DiskCache(const DiskCache&) = delete;
  DiskCache& operator=(const DiskCache&) = delete;

  std::optional<std::string> Load(const CacheKey& key) const;

  // Writes to a temporary file and renames it into place.
  absl::Status Store(const CacheKey& key, absl::string_view value,
                     absl::string_view provider_id);

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path PathFor(const CacheKey& key) const;

  std::filesystem::path root_;
  mutable std::shared_mutex mu_;
};

}  // namespace rttqe

#endif  // RTTQE_CACHE_H_
