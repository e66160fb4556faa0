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

#ifndef KVLDP_ESTIMATION_H_
#define KVLDP_ESTIMATION_H_

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "kvldp/budget.h"
#include "kvldp/mechanisms.h"

namespace kvldp {

// Per-key tallies of +1 (n1) and -1 (n2) supports over the padded domain.
// Index i holds key i + 1; keys d+1..d' are dummies kept for diagnostics.
struct SupportCounts {
  int64_t n = 0;
  std::vector<int64_t> n1;
  std::vector<int64_t> n2;

  explicit SupportCounts(int d_prime = 0) : n1(d_prime, 0), n2(d_prime, 0) {}

  int d_prime() const { return static_cast<int>(n1.size()); }

  void AddUe(const UeReport& report);
  void AddGrr(const GrrReport& report);
  // Associative and commutative; fails on mismatched domains.
  absl::Status Merge(const SupportCounts& other);

  friend bool operator==(const SupportCounts&, const SupportCounts&) = default;
};

using Report = std::variant<UeReport, GrrReport>;

absl::StatusOr<SupportCounts> Aggregate(std::span<const UeReport> reports,
                                        int d_prime);
absl::StatusOr<SupportCounts> Aggregate(std::span<const GrrReport> reports,
                                        int d_prime);
// Fails when the reports mix UE and GRR outputs.
absl::StatusOr<SupportCounts> Aggregate(std::span<const Report> reports,
                                        int d_prime);

// Frequency estimate ((n1 + n2)/n - b) / (a - b) * ell for keys 1..d,
// unclipped.
absl::StatusOr<std::vector<double>> EstimateFrequency(
    const SupportCounts& counts, const PerturbProbs& probs, int ell, int d);

// Mean estimate (n1 - n2)(a - b) / (a (2p - 1) (n1 + n2 - n b)) for keys 1..d,
// unclipped. A key with n1 + n2 == n b yields a non-finite entry.
absl::StatusOr<std::vector<double>> EstimateMeanBaseline(
    const SupportCounts& counts, const PerturbProbs& probs, int ell, int d);

// Unbiased estimates of the sampled (+1, -1) counts for one key: solves
//   [n1 - n b/2, n2 - n b/2]^T = A [n1*, n2*]^T,
//   A = [[a p - b/2, a (1-p) - b/2], [a (1-p) - b/2, a p - b/2]].
struct CalibratedCounts {
  double n1 = 0;
  double n2 = 0;
};
absl::StatusOr<CalibratedCounts> CalibrateCounts(double n1, double n2,
                                                 const PerturbProbs& probs,
                                                 double n);

struct KeyEstimate {
  double f_hat = 0;
  double m_hat = 0;
  double f_hat_raw = 0;
  double m_hat_raw = 0;
};

// Frequency clipped to [1/n, 1], calibrated counts clipped to
// [0, n f_hat / ell], then m_hat = ell (n1 - n2) / (n f_hat).
absl::StatusOr<std::vector<KeyEstimate>> EstimateCorrected(
    const SupportCounts& counts, const PerturbProbs& probs, int ell, int d);

// Baseline (index-sampling) tallies: for each key, how many users sampled it
// (n_k), reported possession (ones), and the +1/-1 split among those.
struct PrivKvCounts {
  int64_t n = 0;
  std::vector<int64_t> sampled;
  std::vector<int64_t> ones;
  std::vector<int64_t> plus;
  std::vector<int64_t> minus;

  explicit PrivKvCounts(int d = 0)
      : sampled(d, 0), ones(d, 0), plus(d, 0), minus(d, 0) {}

  void Add(const PrivKvReport& report);
  absl::Status Merge(const PrivKvCounts& other);
};

// f_hat = (ones/n_k - (1 - p1)) / (2 p1 - 1) clipped to [1/n, 1]; the value
// counts are calibrated by randomized response, clipped to [0, ones], and
// m_hat = (plus_hat - minus_hat) / ones. Keys never sampled get (1/n, 0).
absl::StatusOr<std::vector<KeyEstimate>> EstimatePrivKv(
    const PrivKvCounts& counts, double eps_total);

}  // namespace kvldp

#endif  // KVLDP_ESTIMATION_H_
