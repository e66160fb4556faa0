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

#ifndef KVLDP_MECHANISMS_H_
#define KVLDP_MECHANISMS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "kvldp/budget.h"
#include "kvldp/model.h"
#include "kvldp/random.h"
#include "kvldp/sampling.h"

namespace kvldp {

// Largest padded domain for which the UE output space (3^d') is enumerated.
inline constexpr int kMaxEnumerableUeDomain = 10;

// Length-d' vector over {+1, -1, 0}; bits[i] describes key i + 1.
struct UeReport {
  std::vector<int8_t> bits;

  friend bool operator==(const UeReport&, const UeReport&) = default;
};

struct GrrReport {
  Key key = 1;
  int value = 1;

  friend bool operator==(const GrrReport&, const GrrReport&) = default;
};

// Baseline report: sampled index, perturbed possession bit, and a value that
// is +1/-1 when the bit is 1 and 0 otherwise.
struct PrivKvReport {
  Key index = 1;
  int key_bit = 0;
  int value = 0;

  friend bool operator==(const PrivKvReport&, const PrivKvReport&) = default;
};

// Checks 1/2 <= a <= 1, 0 <= b <= 1/2, 1/2 <= p <= 1. The closed ends admit
// the noiseless limits used in tests.
absl::Status ValidateProbs(const PerturbProbs& probs);

// Additionally requires b == (1 - a) / (d' - 1).
absl::Status ValidateGrrProbs(const PerturbProbs& probs, int d_prime);

// Correlated unary-encoding perturbation. The sampled position reports its
// discretized value v w.p. a*p, -v w.p. a*(1-p), 0 w.p. 1-a; every other
// position independently reports +1 or -1 w.p. b/2 each.
UeReport PerturbUe(UserRecord record, const PerturbProbs& probs, int ell,
                   int d, Rng& rng);

// Same draws as PerturbUe, delivered as (key, sign) for each nonzero
// position in increasing key order. Cost is O(1 + b * d') per call.
template <typename Visitor>
void VisitUeReport(UserRecord record, const PerturbProbs& probs, int ell,
                   int d, Rng& rng, Visitor&& visit);

// Correlated GRR perturbation over d' = d + ell keys.
absl::StatusOr<GrrReport> PerturbGrr(UserRecord record,
                                     const PerturbProbs& probs, int ell, int d,
                                     Rng& rng);

// Unchecked variant for hot loops; probs must satisfy ValidateGrrProbs.
GrrReport PerturbGrrUnchecked(UserRecord record, const PerturbProbs& probs,
                              int ell, int d, Rng& rng);

// Baseline with one iteration: key budget eps/2, value budget eps/2.
PrivKvReport PerturbPrivKv(UserRecord record, double eps_total, int d,
                           Rng& rng);

// Probability of keeping a bit under randomized response with budget eps.
double RandomizedResponseKeep(double eps);

// Dense index of a UE output: digit i (base 3) encodes bits[i] as
// 0 -> 0, 1 -> +1, 2 -> -1.
int64_t EncodeUeOutput(const UeReport& y);
UeReport DecodeUeOutput(int64_t code, int d_prime);

// Exact Pr(y | S) for every y in {+1,-1,0}^d', indexed by EncodeUeOutput.
// Raw values in [-1, 1] are accepted; the kept-value probability of a real
// key is (1 + (2p-1) v) / 2. Fails when d' > kMaxEnumerableUeDomain.
absl::StatusOr<std::vector<double>> OutputDistributionUe(
    UserRecord record, const PerturbProbs& probs, int ell, int d);

// Dense index of a GRR output: 2 * (key - 1) + (value == +1 ? 0 : 1).
int64_t EncodeGrrOutput(const GrrReport& y);
GrrReport DecodeGrrOutput(int64_t code);

// Exact Pr(y' | S) for all 2d' outputs, indexed by EncodeGrrOutput.
absl::StatusOr<std::vector<double>> OutputDistributionGrr(
    UserRecord record, const PerturbProbs& probs, int ell, int d);

// Line formats: UE as a d'-character string over {+,-,0}; GRR as `k,v`;
// the baseline as `j,bit,v`.
std::string FormatReport(const UeReport& r);
std::string FormatReport(const GrrReport& r);
std::string FormatReport(const PrivKvReport& r);
absl::StatusOr<UeReport> ParseUeReport(std::string_view line);
absl::StatusOr<GrrReport> ParseGrrReport(std::string_view line);
absl::StatusOr<PrivKvReport> ParsePrivKvReport(std::string_view line);

// --- implementation details ---

template <typename Visitor>
void VisitUeReport(UserRecord record, const PerturbProbs& probs, int ell,
                   int d, Rng& rng, Visitor&& visit) {
  const SampledPair x = PadAndSample(record, ell, d, rng);
  const int d_prime = d + ell;
  // Sampled position first so that the noise stream below is independent of
  // where x landed.
  int sampled_sign = 0;
  const double u = rng.UniformDouble();
  if (u < probs.a * probs.p) {
    sampled_sign = x.value;
  } else if (u < probs.a) {
    sampled_sign = -x.value;
  }
  // Non-sampled positions are nonzero w.p. b each; jump between them with
  // geometric gaps.
  int64_t pos = rng.Geometric(probs.b);
  bool sampled_done = false;
  while (pos < d_prime) {
    const Key key = static_cast<Key>(pos + 1);
    if (!sampled_done && key >= x.key) {
      if (sampled_sign != 0) visit(x.key, sampled_sign);
      sampled_done = true;
    }
    if (key != x.key) visit(key, rng.FairSign());
    pos += 1 + rng.Geometric(probs.b);
  }
  if (!sampled_done && sampled_sign != 0) visit(x.key, sampled_sign);
}

}  // namespace kvldp

#endif  // KVLDP_MECHANISMS_H_
