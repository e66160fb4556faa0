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

#ifndef KVLDP_BUDGET_H_
#define KVLDP_BUDGET_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace kvldp {

// Tolerance for budget identities that hold algebraically.
inline constexpr double kBudgetTolerance = 1e-12;

enum class Mechanism { kUe, kGrr };

enum class AllocationStrategy { kOptimized, kNaive, kNonOptimized, kManual };

absl::StatusOr<Mechanism> ParseMechanism(std::string_view name);
absl::StatusOr<AllocationStrategy> ParseStrategy(std::string_view name);
std::string MechanismName(Mechanism m);
std::string StrategyName(AllocationStrategy s);

// Key/value budget split.
struct BudgetSplit {
  double eps_key = 0;
  double eps_value = 0;
};

struct BudgetSpec {
  Mechanism mechanism = Mechanism::kUe;
  AllocationStrategy strategy = AllocationStrategy::kOptimized;
  double eps_total = 0;
  double eps_key = 0;
  double eps_value = 0;
  int ell = 1;
  int d = 2;
  int d_prime = 3;  // d + ell
};

// Perturbation probabilities: a keeps the true key reported, b reports a key
// that was not sampled, p keeps the true value.
struct PerturbProbs {
  double a = 0.5;
  double b = 0.5;
  double p = 0.5;
};

// Total budget of correlated UE perturbation with key budget eps_key and value
// budget eps_value: max{eps_value, eps_key + ln(2 / (1 + e^-eps_value))}.
absl::StatusOr<double> ComposeUe(double eps_key, double eps_value);

// Total budget of correlated GRR perturbation after padding to `ell`:
//   ln[(e^(e1+e2) + lambda) / (min{e^e1, (e^e2+1)/2} + lambda)],
//   lambda = (ell-1)(e^e2+1)/2.
absl::StatusOr<double> ComposeGrr(double eps_key, double eps_value, int ell);

absl::StatusOr<double> Compose(Mechanism mechanism, double eps_key,
                               double eps_value, int ell);

// Splits eps_total.
//   kOptimized, UE or ell == 1: (ln[(e^eps+1)/2], eps).
//   kOptimized, GRR:            (ln[ell(e^eps-1)/2+1], ln[ell(e^eps-1)+1]).
//   kNaive:                     (eps/2, eps/2).
//   kNonOptimized:              value budget eps/2, key budget the largest
//                               one that still composes to eps.
// kManual has no rule and is rejected; use ManualBudget.
absl::StatusOr<BudgetSplit> Allocate(double eps_total, int ell,
                                     Mechanism mechanism,
                                     AllocationStrategy strategy);

// Allocates eps_total for a domain of d real keys padded to ell.
absl::StatusOr<BudgetSpec> PlanBudget(Mechanism mechanism,
                                      AllocationStrategy strategy,
                                      double eps_total, int ell, int d);

// Accepts an arbitrary split and reports what it composes to.
absl::StatusOr<BudgetSpec> ManualBudget(Mechanism mechanism, double eps_key,
                                        double eps_value, int ell, int d);

// OUE-style probabilities: a = 1/2, b = 1/(e^e1+1), p = e^e2/(e^e2+1).
// Fails when both budgets are zero.
absl::StatusOr<PerturbProbs> ProbsUe(double eps_key, double eps_value);

// GRR probabilities over d_prime keys: a = e^e1/(e^e1+d'-1),
// b = (1-a)/(d'-1), p = e^e2/(e^e2+1).
absl::StatusOr<PerturbProbs> ProbsGrr(double eps_key, double eps_value,
                                      int d_prime);

// Closed form of ProbsGrr under the optimized GRR split.
PerturbProbs OptimizedGrrProbsClosedForm(double eps_total, int ell,
                                         int d_prime);

absl::StatusOr<PerturbProbs> ProbsFor(const BudgetSpec& spec);

// Budget split (ln theta, ln[1/(2 theta e^-eps - 1)]) on the UE composition
// frontier, theta in [(e^eps+1)/2, e^eps).
BudgetSplit UeFrontierSplit(double eps_total, double theta);

}  // namespace kvldp

#endif  // KVLDP_BUDGET_H_
