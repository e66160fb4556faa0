// Copyright 2026 The kvldp Authors
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

#include "kvldp/model.h"

#include <algorithm>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace kvldp {

absl::StatusOr<Dataset> Dataset::Create(
    int d, const std::vector<std::vector<KvPair>>& users) {
  if (d < 1) {
    return absl::InvalidArgumentError(absl::StrCat("d must be >= 1, got ", d));
  }
  if (users.empty()) {
    return absl::InvalidArgumentError("dataset must contain at least one user");
  }
  Dataset data;
  data.d_ = d;
  data.offsets_.reserve(users.size() + 1);
  data.offsets_.push_back(0);
  size_t total = 0;
  for (const auto& u : users) total += u.size();
  data.pairs_.reserve(total);

  for (size_t u = 0; u < users.size(); ++u) {
    const auto begin = data.pairs_.size();
    for (const KvPair& kv : users[u]) {
      if (kv.key < 1 || kv.key > d) {
        return absl::InvalidArgumentError(absl::StrCat(
            "user ", u, ": key ", kv.key, " outside domain 1..", d));
      }
      if (!(kv.value >= -1.0 && kv.value <= 1.0)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "user ", u, ": value ", kv.value, " outside [-1, 1]"));
      }
      data.pairs_.push_back(kv);
    }
    auto first = data.pairs_.begin() + static_cast<std::ptrdiff_t>(begin);
    std::sort(first, data.pairs_.end(),
              [](const KvPair& x, const KvPair& y) { return x.key < y.key; });
    auto dup = std::adjacent_find(
        first, data.pairs_.end(),
        [](const KvPair& x, const KvPair& y) { return x.key == y.key; });
    if (dup != data.pairs_.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("user ", u, ": duplicate key ", dup->key));
    }
    data.max_record_size_ =
        std::max(data.max_record_size_, static_cast<int>(users[u].size()));
    data.offsets_.push_back(static_cast<int64_t>(data.pairs_.size()));
  }
  return data;
}

TrueStats ComputeTrueStats(const Dataset& data) {
  const int d = data.d();
  std::vector<int64_t> holders(d, 0);
  std::vector<double> sums(d, 0.0);
  for (int64_t u = 0; u < data.n(); ++u) {
    for (const KvPair& kv : data.user(u)) {
      ++holders[kv.key - 1];
      sums[kv.key - 1] += kv.value;
    }
  }
  TrueStats stats;
  stats.freq.resize(d);
  stats.mean.resize(d);
  const double n = static_cast<double>(data.n());
  for (int k = 0; k < d; ++k) {
    stats.freq[k] = static_cast<double>(holders[k]) / n;
    if (holders[k] > 0) {
      stats.mean[k] = sums[k] / static_cast<double>(holders[k]);
    }
  }
  return stats;
}

}  // namespace kvldp
