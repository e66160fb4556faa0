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

#ifndef KVLDP_DATAGEN_H_
#define KVLDP_DATAGEN_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "kvldp/model.h"

namespace kvldp {

enum class KeyDistribution { kUniform, kGaussian };

// How a Gaussian draw z ~ N(0, sigma_key) becomes a key.
//   kLowerEdge: key = round(z), kept only if 1 <= key <= d. The mode sits at
//               key 1 and frequencies decay with the key id.
//   kCentered:  key = round(z) + d/2 + 1, kept only if
//               round(z) is in [-d/2, d/2 - 1]. The mode sits mid-domain.
// Rejected draws are redrawn.
enum class GaussianKeyMapping { kLowerEdge, kCentered };

struct SynthConfig {
  int64_t n = 1'000'000;
  int d = 100;
  KeyDistribution distribution = KeyDistribution::kUniform;
  GaussianKeyMapping key_mapping = GaussianKeyMapping::kLowerEdge;
  double sigma_key = 50.0;
  double sigma_mean = 1.0;
  int pairs_per_user = 1;
  // Half-width of uniform noise added to each user's value (then clamped to
  // [-1, 1]). Zero makes every holder of key k report exactly key_means[k].
  double value_noise = 0.0;
  uint64_t seed = 1;
};

struct SyntheticData {
  Dataset data;
  TrueStats truth;
  // Generating mean per key (index k - 1), defined even for unheld keys.
  std::vector<double> key_means;
};

// Deterministic in `cfg`: each user draws from its own stream keyed by
// (seed, user index), per-key means from streams keyed by (seed, key).
absl::StatusOr<SyntheticData> GenerateSynthetic(const SynthConfig& cfg);

struct LoadedDataset {
  Dataset data;
  // Original identifiers; key_names[k - 1] is the source id of key k.
  std::vector<std::string> key_names;
  std::vector<std::string> user_names;
};

// Reads header-less `user_id,key,value` lines. Values are mapped linearly
// from [rating_min, rating_max] onto [-1, 1]. Users and keys are
// dictionary-encoded in sorted order (numerically when both ids parse as
// integers), so the result does not depend on row order. Repeated
// (user, key) rows are merged by averaging.
absl::StatusOr<LoadedDataset> ParseRatingsCsv(std::istream& in,
                                              double rating_min,
                                              double rating_max);
absl::StatusOr<LoadedDataset> LoadRatingsCsv(const std::string& path,
                                             double rating_min,
                                             double rating_max);

// Writes `data` as `user_index,key,value` lines with 1-based user indices.
void WriteDatasetCsv(const Dataset& data, std::ostream& out);

}  // namespace kvldp

#endif  // KVLDP_DATAGEN_H_
