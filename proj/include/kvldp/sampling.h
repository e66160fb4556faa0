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

#ifndef KVLDP_SAMPLING_H_
#define KVLDP_SAMPLING_H_

#include <compare>
#include <map>

#include "kvldp/model.h"
#include "kvldp/random.h"

namespace kvldp {

// A sampled pair after value discretization; value is +1 or -1.
struct SampledPair {
  Key key = 0;
  int value = 1;

  friend auto operator<=>(const SampledPair&, const SampledPair&) = default;
};

// Probability that padding-and-sampling picks a real pair:
// |S| / max{|S|, ell}.
double RealPairRate(int record_size, int ell);

// Draws one pair from `record` after padding it to `ell` with dummy keys
// d+1..d+ell, then discretizes the value to +1 w.p. (1+v)/2. Dummy keys carry
// value 0 before discretization. An empty record always yields a dummy.
SampledPair PadAndSample(UserRecord record, int ell, int d, Rng& rng);

// Exact distribution of PadAndSample's output. Intended for small domains.
std::map<SampledPair, double> SampleDistribution(UserRecord record, int ell,
                                                 int d);

}  // namespace kvldp

#endif  // KVLDP_SAMPLING_H_
