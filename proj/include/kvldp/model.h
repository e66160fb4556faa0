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

#ifndef KVLDP_MODEL_H_
#define KVLDP_MODEL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace kvldp {

// Keys are dense 1-based identifiers. Real keys are 1..d, dummy keys used by
// padding are d+1..d+ell.
using Key = int32_t;

struct KvPair {
  Key key = 0;
  double value = 0.0;

  friend bool operator==(const KvPair&, const KvPair&) = default;
};

// The pairs held by one user, sorted by key with no duplicates.
using UserRecord = std::span<const KvPair>;

// An immutable population of user records over the key domain 1..d. Records
// are stored contiguously; user(i) is a view into that storage.
class Dataset {
 public:
  // Validates and takes ownership of `users`. Each record is sorted by key.
  // Fails on n == 0, d < 1, a key outside 1..d, a duplicate key within one
  // record, or a value outside [-1, 1].
  static absl::StatusOr<Dataset> Create(
      int d, const std::vector<std::vector<KvPair>>& users);

  int d() const { return d_; }
  int64_t n() const { return static_cast<int64_t>(offsets_.size()) - 1; }

  UserRecord user(int64_t i) const {
    return UserRecord(pairs_.data() + offsets_[i],
                      pairs_.data() + offsets_[i + 1]);
  }

  // Largest record size; the padding length at which frequency estimation is
  // unbiased.
  int max_record_size() const { return max_record_size_; }
  int64_t total_pairs() const { return static_cast<int64_t>(pairs_.size()); }

 private:
  Dataset() = default;

  int d_ = 0;
  int max_record_size_ = 0;
  std::vector<KvPair> pairs_;
  std::vector<int64_t> offsets_;
};

// Ground truth per key. Index i holds key i + 1.
struct TrueStats {
  std::vector<double> freq;
  // Unset when no user holds the key.
  std::vector<std::optional<double>> mean;

  int d() const { return static_cast<int>(freq.size()); }
};

TrueStats ComputeTrueStats(const Dataset& data);

}  // namespace kvldp

#endif  // KVLDP_MODEL_H_
