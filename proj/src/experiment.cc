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

#include "kvldp/experiment.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <thread>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "kvldp/mechanisms.h"
#include "kvldp/random.h"
#include "kvldp/theory.h"

namespace kvldp {
namespace {

int ResolveThreads(int threads, int64_t n) {
  int t = threads > 0 ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  t = std::max(t, 1);
  return static_cast<int>(std::min<int64_t>(t, std::max<int64_t>(n / 4096, 1)));
}

// Runs body(shard, begin, end) over contiguous user ranges and returns the
// per-shard results in shard order.
template <typename Result, typename Body>
std::vector<Result> ForShards(int64_t n, int threads, Body body) {
  const int shards = ResolveThreads(threads, n);
  std::vector<Result> results(shards);
  auto run = [&](int s) {
    const int64_t begin = n * s / shards;
    const int64_t end = n * (s + 1) / shards;
    results[s] = body(begin, end);
  };
  if (shards == 1) {
    run(0);
    return results;
  }
  std::vector<std::thread> workers;
  workers.reserve(shards);
  for (int s = 0; s < shards; ++s) workers.emplace_back(run, s);
  for (std::thread& w : workers) w.join();
  return results;
}

constexpr std::array<DatasetPreset, 4> kPresets = {{
    {"ecommerce", 23'486, 23'486, 1'206, 1},
    {"clothing", 192'544, 105'508, 5'850, 2},
    {"amazon", 2'023'070, 1'210'271, 249'274, 2},
    {"movie", 20'000'263, 138'493, 26'744, 100},
}};

}  // namespace

absl::StatusOr<Protocol> ParseProtocol(std::string_view name) {
  const std::string lower = absl::AsciiStrToLower(std::string(name));
  if (lower == "pckv-ue" || lower == "ue") return Protocol::kPckvUe;
  if (lower == "pckv-grr" || lower == "grr") return Protocol::kPckvGrr;
  if (lower == "privkv") return Protocol::kPrivKv;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown mechanism '", std::string(name), "'"));
}

std::string ProtocolName(Protocol protocol) {
  switch (protocol) {
    case Protocol::kPckvUe:
      return "pckv-ue";
    case Protocol::kPckvGrr:
      return "pckv-grr";
    case Protocol::kPrivKv:
      return "privkv";
  }
  return "unknown";
}

uint64_t RepeatSeed(uint64_t seed, int repeat) {
  return DeriveSeed(seed, static_cast<uint64_t>(repeat));
}

absl::StatusOr<SupportCounts> CollectCounts(const Dataset& data,
                                            Mechanism mechanism,
                                            const PerturbProbs& probs, int ell,
                                            uint64_t seed, int threads) {
  if (ell < 1) return absl::InvalidArgumentError("ell must be >= 1");
  const int d = data.d();
  const int d_prime = d + ell;
  if (mechanism == Mechanism::kGrr) {
    if (absl::Status s = ValidateGrrProbs(probs, d_prime); !s.ok()) return s;
  } else if (absl::Status s = ValidateProbs(probs); !s.ok()) {
    return s;
  }
  std::vector<SupportCounts> shards = ForShards<SupportCounts>(
      data.n(), threads, [&](int64_t begin, int64_t end) {
        SupportCounts counts(d_prime);
        for (int64_t u = begin; u < end; ++u) {
          Rng rng(seed, static_cast<uint64_t>(u));
          if (mechanism == Mechanism::kUe) {
            VisitUeReport(data.user(u), probs, ell, d, rng,
                          [&counts](Key k, int sign) {
                            if (sign > 0) {
                              ++counts.n1[k - 1];
                            } else {
                              ++counts.n2[k - 1];
                            }
                          });
            ++counts.n;
          } else {
            counts.AddGrr(PerturbGrrUnchecked(data.user(u), probs, ell, d, rng));
          }
        }
        return counts;
      });
  SupportCounts total(d_prime);
  for (const SupportCounts& s : shards) {
    if (absl::Status st = total.Merge(s); !st.ok()) return st;
  }
  return total;
}

absl::StatusOr<PrivKvCounts> CollectPrivKvCounts(const Dataset& data,
                                                 double eps_total,
                                                 uint64_t seed, int threads) {
  if (!(eps_total > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be > 0, got ", eps_total));
  }
  const int d = data.d();
  std::vector<PrivKvCounts> shards = ForShards<PrivKvCounts>(
      data.n(), threads, [&](int64_t begin, int64_t end) {
        PrivKvCounts counts(d);
        for (int64_t u = begin; u < end; ++u) {
          Rng rng(seed, static_cast<uint64_t>(u));
          counts.Add(PerturbPrivKv(data.user(u), eps_total, d, rng));
        }
        return counts;
      });
  PrivKvCounts total(d);
  for (const PrivKvCounts& s : shards) {
    if (absl::Status st = total.Merge(s); !st.ok()) return st;
  }
  return total;
}

absl::StatusOr<BudgetSpec> ExperimentBudget(const ExperimentConfig& cfg,
                                            int d) {
  if (cfg.protocol == Protocol::kPrivKv) {
    return absl::InvalidArgumentError("the baseline has no budget split");
  }
  const Mechanism mechanism =
      cfg.protocol == Protocol::kPckvUe ? Mechanism::kUe : Mechanism::kGrr;
  if (cfg.strategy == AllocationStrategy::kManual) {
    return ManualBudget(mechanism, cfg.eps_key, cfg.eps_value, cfg.ell, d);
  }
  return PlanBudget(mechanism, cfg.strategy, cfg.eps, cfg.ell, d);
}

absl::StatusOr<std::vector<KeyEstimate>> EstimateOnce(
    const Dataset& data, const ExperimentConfig& cfg, int repeat) {
  const uint64_t seed = RepeatSeed(cfg.seed, repeat);
  if (cfg.protocol == Protocol::kPrivKv) {
    absl::StatusOr<PrivKvCounts> counts =
        CollectPrivKvCounts(data, cfg.eps, seed, cfg.threads);
    if (!counts.ok()) return counts.status();
    return EstimatePrivKv(*counts, cfg.eps);
  }
  absl::StatusOr<BudgetSpec> spec = ExperimentBudget(cfg, data.d());
  if (!spec.ok()) return spec.status();
  absl::StatusOr<PerturbProbs> probs = ProbsFor(*spec);
  if (!probs.ok()) return probs.status();
  absl::StatusOr<SupportCounts> counts = CollectCounts(
      data, spec->mechanism, *probs, spec->ell, seed, cfg.threads);
  if (!counts.ok()) return counts.status();
  return EstimateCorrected(*counts, *probs, spec->ell, data.d());
}

absl::StatusOr<MetricsReport> RunExperiment(const Dataset& data,
                                            const TrueStats& truth,
                                            const ExperimentConfig& cfg) {
  if (cfg.repeats < 1) {
    return absl::InvalidArgumentError("repeats must be >= 1");
  }
  if (cfg.ell < 1) return absl::InvalidArgumentError("ell must be >= 1");
  const int d = data.d();
  if (truth.d() != d) {
    return absl::InvalidArgumentError("ground truth does not match the dataset");
  }
  if (cfg.top_n && (*cfg.top_n < 1 || *cfg.top_n > d)) {
    return absl::InvalidArgumentError(
        absl::StrCat("top_n must be in 1..", d, ", got ", *cfg.top_n));
  }

  MetricsReport report;
  report.protocol = cfg.protocol;
  report.eps = cfg.eps;
  report.ell = cfg.ell;
  report.n = data.n();
  report.d = d;
  report.repeats = cfg.repeats;
  if (cfg.protocol != Protocol::kPrivKv) {
    absl::StatusOr<BudgetSpec> spec = ExperimentBudget(cfg, d);
    if (!spec.ok()) return spec.status();
    absl::StatusOr<PerturbProbs> probs = ProbsFor(*spec);
    if (!probs.ok()) return probs.status();
    report.budget = *spec;
    report.probs = *probs;
    report.eps = spec->eps_total;
  }

  std::vector<Key> scope;
  if (cfg.top_n) {
    scope = TopKeys(truth.freq, *cfg.top_n);
    report.scope = absl::StrCat("top-", *cfg.top_n, "-true");
  } else {
    scope.resize(d);
    std::iota(scope.begin(), scope.end(), 1);
    report.scope = "all-keys";
  }
  report.scored_keys = static_cast<int>(scope.size());

  report.keys.resize(d);
  for (int k = 0; k < d; ++k) {
    KeyMetrics& km = report.keys[k];
    km.key = k + 1;
    km.f_true = truth.freq[k];
    km.m_true = truth.mean[k];
    if (report.probs && km.f_true > 0) {
      absl::StatusOr<ErrorPrediction> pred =
          PredictErrors(*report.probs, cfg.ell, data.n(), km.f_true,
                        km.m_true.value_or(0.0));
      if (pred.ok()) {
        km.pred_var_f = pred->var_f;
        km.pred_mse_m_approx = pred->mse_m_approx;
      }
    }
  }

  double precision_sum = 0;
  for (int r = 0; r < cfg.repeats; ++r) {
    absl::StatusOr<std::vector<KeyEstimate>> est = EstimateOnce(data, cfg, r);
    if (!est.ok()) return est.status();
    double sq_f = 0;
    double sq_m = 0;
    int mean_keys = 0;
    for (Key key : scope) {
      const KeyEstimate& e = (*est)[key - 1];
      sq_f += (e.f_hat - truth.freq[key - 1]) * (e.f_hat - truth.freq[key - 1]);
      if (truth.mean[key - 1]) {
        const double diff = e.m_hat - *truth.mean[key - 1];
        sq_m += diff * diff;
        ++mean_keys;
      }
    }
    report.mse_freq_per_repeat.push_back(sq_f / scope.size());
    report.mse_mean_per_repeat.push_back(mean_keys > 0 ? sq_m / mean_keys : 0);
    std::vector<double> f_hat(d);
    for (int k = 0; k < d; ++k) {
      const KeyEstimate& e = (*est)[k];
      f_hat[k] = e.f_hat;
      KeyMetrics& km = report.keys[k];
      km.f_hat += e.f_hat / cfg.repeats;
      km.m_hat += e.m_hat / cfg.repeats;
      km.f_hat_raw += e.f_hat_raw / cfg.repeats;
      km.m_hat_raw += e.m_hat_raw / cfg.repeats;
    }
    if (cfg.top_n) precision_sum += PrecisionTopN(f_hat, truth.freq, *cfg.top_n);
  }
  report.mse_freq = std::accumulate(report.mse_freq_per_repeat.begin(),
                                    report.mse_freq_per_repeat.end(), 0.0) /
                    cfg.repeats;
  report.mse_mean = std::accumulate(report.mse_mean_per_repeat.begin(),
                                    report.mse_mean_per_repeat.end(), 0.0) /
                    cfg.repeats;
  if (cfg.top_n) report.precision_top_n = precision_sum / cfg.repeats;
  return report;
}

std::vector<Key> TopKeys(std::span<const double> values, int n) {
  std::vector<Key> keys(values.size());
  std::iota(keys.begin(), keys.end(), 1);
  n = std::clamp(n, 0, static_cast<int>(keys.size()));
  std::partial_sort(keys.begin(), keys.begin() + n, keys.end(),
                    [&](Key x, Key y) {
                      const double vx = values[x - 1];
                      const double vy = values[y - 1];
                      if (vx != vy) return vx > vy;
                      return x < y;
                    });
  keys.resize(n);
  return keys;
}

double PrecisionTopN(std::span<const double> estimated,
                     std::span<const double> truth, int n) {
  if (n < 1) return 0.0;
  std::vector<Key> a = TopKeys(estimated, n);
  std::vector<Key> b = TopKeys(truth, n);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<Key> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(common));
  return static_cast<double>(common.size()) / n;
}

absl::StatusOr<std::vector<AllocationRow>> CompareAllocations(
    const Dataset& data, const TrueStats& truth,
    std::span<const double> eps_list, const ExperimentConfig& base) {
  if (base.protocol == Protocol::kPrivKv) {
    return absl::InvalidArgumentError(
        "allocation comparison needs a PCKV mechanism");
  }
  std::vector<AllocationRow> rows;
  for (double eps : eps_list) {
    for (AllocationStrategy strategy :
         {AllocationStrategy::kOptimized, AllocationStrategy::kNonOptimized,
          AllocationStrategy::kNaive}) {
      ExperimentConfig cfg = base;
      cfg.eps = eps;
      cfg.strategy = strategy;
      absl::StatusOr<MetricsReport> r = RunExperiment(data, truth, cfg);
      if (!r.ok()) return r.status();
      rows.push_back({eps, strategy, r->mse_freq, r->mse_mean});
    }
  }
  return rows;
}

std::span<const DatasetPreset> DatasetPresets() { return kPresets; }

absl::StatusOr<DatasetPreset> FindPreset(std::string_view name) {
  const std::string lower = absl::AsciiStrToLower(std::string(name));
  for (const DatasetPreset& p : kPresets) {
    if (p.name == lower) return p;
  }
  return absl::NotFoundError(absl::StrCat("unknown dataset preset '", std::string(name), "'"));
}

}  // namespace kvldp
