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

#include "rttqe/cache.h"

#include <openssl/evp.h>
#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <mutex>
#include <sstream>
#include <system_error>

#include "absl/strings/str_cat.h"
#include "absl/strings/escaping.h"
#include "absl/time/clock.h"
#include "absl/time/time.h"
#include "json.hpp"

namespace rttqe {

namespace {

void AppendField(std::string& buf, absl::string_view field) {
  const uint64_t n = field.size();
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((n >> (8 * i)) & 0xFF));
  buf.append(field.data(), field.size());
}

}  // namespace

absl::Status WriteFileAtomically(const std::filesystem::path& path,
                                 absl::string_view contents) {
  static std::atomic<uint64_t> counter{0};
  std::filesystem::path tmp = path;
  tmp += absl::StrCat(".tmp", ::getpid(), "_", counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      return absl::InternalError(absl::StrCat("cannot write ", tmp.string()));
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) return absl::InternalError(absl::StrCat("short write to ", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    return absl::InternalError(
        absl::StrCat("cannot move ", tmp.string(), " into place: ", ec.message()));
  }
  return absl::OkStatus();
}

std::string Sha256Hex(absl::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  return absl::BytesToHexString(
      absl::string_view(reinterpret_cast<const char*>(digest), len));
}

CacheKey CacheKey::For(absl::string_view provider_id, absl::string_view source,
                       absl::string_view target, absl::string_view text) {
  std::string buf;
  AppendField(buf, provider_id);
  AppendField(buf, source);
  AppendField(buf, target);
  AppendField(buf, text);
  return CacheKey{Sha256Hex(buf)};
}

DiskCache::DiskCache(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path DiskCache::PathFor(const CacheKey& key) const {
  return root_ / key.hex.substr(0, 2) / key.hex.substr(2, 2) / key.hex;
}

std::optional<std::string> DiskCache::Load(const CacheKey& key) const {
  std::shared_lock lock(mu_);
  std::ifstream in(PathFor(key), std::ios::binary);
  if (!in) return std::nullopt;
  return std::string(std::istreambuf_iterator<char>(in), {});
}

absl::Status DiskCache::Store(const CacheKey& key, absl::string_view value,
                              absl::string_view provider_id) {
  std::unique_lock lock(mu_);
  const std::filesystem::path path = PathFor(key);
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) {
    return absl::InternalError(absl::StrCat("cannot create cache directory ",
                                            path.parent_path().string(), ": ",
                                            ec.message()));
  }
  if (absl::Status s = WriteFileAtomically(path, value); !s.ok()) return s;
  nlohmann::json meta = {
      {"provider", std::string(provider_id)},
      {"created_at", absl::FormatTime(absl::RFC3339_sec, absl::Now(),
                                      absl::UTCTimeZone())},
      {"bytes", value.size()},
  };
  std::filesystem::path meta_path = path;
  meta_path += ".meta";
  return WriteFileAtomically(meta_path, meta.dump(2) + "\n");
}

}  // namespace rttqe
