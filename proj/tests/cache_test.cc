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

#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "absl/strings/str_cat.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "test_util.h"

namespace rttqe {
namespace {

namespace fs = std::filesystem;

TEST(Sha256Test, KnownDigest) {
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(CacheKeyTest, StableAcrossBuilds) {
  // Frozen from an independent SHA-256 over the same length-prefixed layout.
  EXPECT_EQ(CacheKey::For("echo", "en", "de", "hello").hex,
            "97cd3dc64dac1f2f45f61d420cdba35dd96bbc8c6aabc4deacc1c4dd4f91daec");
}

TEST(CacheKeyTest, FieldBoundariesMatter) {
  const CacheKey a = CacheKey::For("ab", "c", "", "");
  const CacheKey b = CacheKey::For("a", "bc", "", "");
  EXPECT_NE(a.hex, b.hex);
  EXPECT_EQ(a.hex, "dfc818cdbb344b7cdf60bfa1366733cfa24f49570e5dc27dca1e83b3bd197941");
}

TEST(DiskCacheTest, MissThenHit) {
  test_util::TempDir dir;
  DiskCache cache(dir.path());
  const CacheKey key = CacheKey::For("p", "en", "de", "text");
  EXPECT_FALSE(cache.Load(key).has_value());
  ASSERT_TRUE(cache.Store(key, "value\nline", "p").ok());
  EXPECT_EQ(cache.Load(key), "value\nline");
}

TEST(DiskCacheTest, BinaryValuesRoundTrip) {
  test_util::TempDir dir;
  DiskCache cache(dir.path());
  const std::string value("a\0b\xff", 4);
  const CacheKey key = CacheKey::For("p", "en", "de", "bin");
  ASSERT_TRUE(cache.Store(key, value, "p").ok());
  EXPECT_EQ(cache.Load(key), value);
}

TEST(DiskCacheTest, ShardedLayoutWithMetaSidecar) {
  test_util::TempDir dir;
  DiskCache cache(dir.path());
  const CacheKey key = CacheKey::For("prov", "en", "de", "hi");
  ASSERT_TRUE(cache.Store(key, "xyz", "prov").ok());
  const fs::path entry = dir.path() / key.hex.substr(0, 2) / key.hex.substr(2, 2) / key.hex;
  EXPECT_EQ(test_util::ReadFileOrDie(entry), "xyz");
  const auto meta = nlohmann::json::parse(test_util::ReadFileOrDie(entry.string() + ".meta"));
  EXPECT_EQ(meta["provider"], "prov");
  EXPECT_EQ(meta["bytes"], 3);
  EXPECT_TRUE(meta.contains("created_at"));
  // Nothing but the entry and its sidecar: temporaries were renamed away.
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir.path())) {
    files += e.is_regular_file();
  }
  EXPECT_EQ(files, 2);
}

TEST(DiskCacheTest, OverwriteReplacesValue) {
  test_util::TempDir dir;
  DiskCache cache(dir.path());
  const CacheKey key = CacheKey::For("p", "en", "de", "t");
  ASSERT_TRUE(cache.Store(key, "old", "p").ok());
  ASSERT_TRUE(cache.Store(key, "new", "p").ok());
  EXPECT_EQ(cache.Load(key), "new");
}

TEST(DiskCacheTest, ConcurrentWritersAndReaders) {
  test_util::TempDir dir;
  DiskCache cache(dir.path());
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&cache, t] {
      for (int i = 0; i < 50; ++i) {
        const CacheKey key = CacheKey::For("p", "en", "de", absl::StrCat(i % 10));
        ASSERT_TRUE(cache.Store(key, absl::StrCat("v", i % 10), "p").ok());
        auto got = cache.Load(key);
        ASSERT_TRUE(got.has_value());
        EXPECT_EQ(*got, absl::StrCat("v", i % 10)) << "thread " << t;
      }
    });
  }
  for (auto& th : threads) th.join();
}

TEST(DiskCacheTest, SeparateInstancesShareEntries) {
  test_util::TempDir dir;
  const CacheKey key = CacheKey::For("p", "en", "de", "shared");
  ASSERT_TRUE(DiskCache(dir.path()).Store(key, "v", "p").ok());
  EXPECT_EQ(DiskCache(dir.path()).Load(key), "v");
}

TEST(WriteFileAtomicallyTest, FailsForMissingDirectory) {
  test_util::TempDir dir;
  EXPECT_FALSE(WriteFileAtomically(dir.path() / "no" / "such" / "file", "x").ok());
}

}  // namespace
}  // namespace rttqe
