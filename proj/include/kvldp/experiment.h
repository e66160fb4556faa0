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

#ifndef KVLDP_EXPERIMENT_H_
#define KVLDP_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "kvldp/budget.h"
#include "kvldp/estimation.h"
#include "kvldp/model.h"

namespace kvldp {

enum class Protocol { kPckvUe, kPckvGrr, kPrivKv };

// Accepts pckv-ue/ue, pckv-grr/grr and privkv.
absl::StatusOr<Protocol> ParseProtocol(std::string_view name);
std::string ProtocolName(Protocol protocol);

struct ExperimentConfig {
  Protocol protocol = Protocol::kPckvUe;
  double eps = 1.0;
  int ell = 1;
  AllocationStrategy strategy = AllocationStrategy::kOptimized;
  // Used only with AllocationStrategy::kManual.
  double eps_key = 0;
  double eps_value = 0;
  int repeats = 1;
  // Restricts the scored keys to the top_n keys by true frequency.
  std::optional<int> top_n;
  uint64_t seed = 1;
  // Worker threads for the user loop; 0 picks the hardware concurrency.
  // Results do not depend on this value.
  int threads = 0;
};

// Seed of repeat r. User i of that repeat draws from Rng(RepeatSeed(s, r), i).
uint64_t RepeatSeed(uint64_t seed, int repeat);

// Perturbs every user and tallies the reports over d' = d + ell keys.
absl::StatusOr<SupportCounts> CollectCounts(const Dataset& data,
                                            Mechanism mechanism,
                                            const PerturbProbs& probs, int ell,
                                            uint64_t seed, int threads = 0);

absl::StatusOr<PrivKvCounts> CollectPrivKvCounts(const Dataset& data,
                                                 double eps_total,
                                                 uint64_t seed,
                                                 int threads = 0);

// Budget of a PCKV configuration over the dataset's domain.
absl::StatusOr<BudgetSpec> ExperimentBudget(const ExperimentConfig& cfg, int d);

// Corrected estimates for keys 1..d from one repeat.
absl::StatusOr<std::vector<KeyEstimate>> EstimateOnce(
    const Dataset& data, const ExperimentConfig& cfg, int repeat);

struct KeyMetrics {
  Key key = 0;
  double f_true = 0;
  std::optional<double> m_true;
  // Averages over repeats.
  double f_hat = 0;
  double m_hat = 0;
  double f_hat_raw = 0;
  double m_hat_raw = 0;
  // PCKV only, for keys with f_true > 0.
  std::optional<double> pred_var_f;
  std::optional<double> pred_mse_m_approx;
};

struct MetricsReport {
  Protocol protocol = Protocol::kPckvUe;
  double eps = 0;
  int ell = 1;
  int64_t n = 0;
  int d = 0;
  int repeats = 0;
  std::optional<BudgetSpec> budget;
  std::optional<PerturbProbs> probs;
  std::string scope;  // "all-keys" or "top-N-true"
  int scored_keys = 0;
  double mse_freq = 0;
  double mse_mean = 0;
  std::vector<double> mse_freq_per_repeat;
  std::vector<double> mse_mean_per_repeat;
  std::optional<double> precision_top_n;
  std::vector<KeyMetrics> keys;
};

absl::StatusOr<MetricsReport> RunExperiment(const Dataset& data,
                                            const TrueStats& truth,
                                            const ExperimentConfig& cfg);

// Keys (1-based) of the n largest values, ties broken by ascending key.
std::vector<Key> TopKeys(std::span<const double> values, int n);

// |top-n(estimated) intersect top-n(truth)| / n.
double PrecisionTopN(std::span<const double> estimated,
                     std::span<const double> truth, int n);

struct AllocationRow {
  double eps = 0;
  AllocationStrategy strategy = AllocationStrategy::kOptimized;
  double mse_freq = 0;
  double mse_mean = 0;
};

// Runs the optimized, naive and non-optimized allocations at each eps with
// the seeds of `base`.
absl::StatusOr<std::vector<AllocationRow>> CompareAllocations(
    const Dataset& data, const TrueStats& truth,
    std::span<const double> eps_list, const ExperimentConfig& base);

struct DatasetPreset {
  std::string_view name;
  int64_t ratings;
  int64_t users;
  int keys;
  int ell;
};

// Padding lengths chosen for the public rating datasets.
std::span<const DatasetPreset> DatasetPresets();
absl::StatusOr<DatasetPreset> FindPreset(std::string_view name);

}  // namespace kvldp

#endif  // KVLDP_EXPERIMENT_H_
