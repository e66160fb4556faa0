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

#include "kvldp/sampling.h"

#include <algorithm>

namespace kvldp {

double RealPairRate(int record_size, int ell) {
  if (record_size == 0) return 0.0;
  return static_cast<double>(record_size) / std::max(record_size, ell);
}

SampledPair PadAndSample(UserRecord record, int ell, int d, Rng& rng) {
  const int size = static_cast<int>(record.size());
  // Drawing one slot out of max{|S|, ell} is the same as B ~ Bernoulli(eta)
  // followed by a uniform real pair or a uniform dummy.
  const int slots = std::max(size, ell);
  const auto slot = static_cast<int>(rng.UniformInt(0, slots - 1));
  Key key;
  double raw;
  if (slot < size) {
    key = record[slot].key;
    raw = record[slot].value;
  } else {
    key = static_cast<Key>(d + 1 + rng.UniformInt(0, ell - 1));
    raw = 0.0;
  }
  const int value = rng.Bernoulli((1.0 + raw) / 2.0) ? 1 : -1;
  return {key, value};
}

std::map<SampledPair, double> SampleDistribution(UserRecord record, int ell,
                                                 int d) {
  std::map<SampledPair, double> out;
  const int size = static_cast<int>(record.size());
  const double eta = RealPairRate(size, ell);
  auto add = [&out](Key key, double weight, double raw) {
    const double up = (1.0 + raw) / 2.0;
    if (up > 0) out[{key, 1}] += weight * up;
    if (up < 1) out[{key, -1}] += weight * (1.0 - up);
  };
  for (const KvPair& kv : record) add(kv.key, eta / size, kv.value);
  if (eta < 1.0) {
    for (int j = 1; j <= ell; ++j) add(d + j, (1.0 - eta) / ell, 0.0);
  }
  return out;
}

}  // namespace kvldp
