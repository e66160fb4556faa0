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

#include "kvldp/budget.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace kvldp {
namespace {

absl::Status CheckSplit(double eps_key, double eps_value) {
  if (!(eps_key >= 0) || !(eps_value >= 0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "budgets must be non-negative, got (", eps_key, ", ", eps_value, ")"));
  }
  return absl::OkStatus();
}

absl::Status CheckTotal(double eps_total, int ell) {
  if (!(eps_total > 0) || !std::isfinite(eps_total)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be a positive finite number, got ", eps_total));
  }
  if (ell < 1) {
    return absl::InvalidArgumentError(absl::StrCat("ell must be >= 1, got ", ell));
  }
  return absl::OkStatus();
}

// p = e^e / (e^e + 1) written to stay accurate for large e.
double KeepProbability(double eps) { return 1.0 / (1.0 + std::exp(-eps)); }

}  // namespace

absl::StatusOr<Mechanism> ParseMechanism(std::string_view name) {
  if (name == "ue" || name == "pckv-ue") return Mechanism::kUe;
  if (name == "grr" || name == "pckv-grr") return Mechanism::kGrr;
  return absl::InvalidArgumentError(absl::StrCat("unknown mechanism '", std::string(name), "'"));
}

absl::StatusOr<AllocationStrategy> ParseStrategy(std::string_view name) {
  if (name == "optimized") return AllocationStrategy::kOptimized;
  if (name == "naive") return AllocationStrategy::kNaive;
  if (name == "non_optimized" || name == "non-optimized") {
    return AllocationStrategy::kNonOptimized;
  }
  if (name == "manual") return AllocationStrategy::kManual;
  return absl::InvalidArgumentError(absl::StrCat("unknown strategy '", std::string(name), "'"));
}

std::string MechanismName(Mechanism m) {
  return m == Mechanism::kUe ? "ue" : "grr";
}

std::string StrategyName(AllocationStrategy s) {
  switch (s) {
    case AllocationStrategy::kOptimized:
      return "optimized";
    case AllocationStrategy::kNaive:
      return "naive";
    case AllocationStrategy::kNonOptimized:
      return "non_optimized";
    case AllocationStrategy::kManual:
      return "manual";
  }
  return "unknown";
}

absl::StatusOr<double> ComposeUe(double eps_key, double eps_value) {
  if (absl::Status s = CheckSplit(eps_key, eps_value); !s.ok()) return s;
  const double key_route =
      eps_key + std::numbers::ln2 - std::log1p(std::exp(-eps_value));
  return std::max(eps_value, key_route);
}

absl::StatusOr<double> ComposeGrr(double eps_key, double eps_value, int ell) {
  if (absl::Status s = CheckSplit(eps_key, eps_value); !s.ok()) return s;
  if (ell < 1) {
    return absl::InvalidArgumentError(absl::StrCat("ell must be >= 1, got ", ell));
  }
  if (ell == 1) return ComposeUe(eps_key, eps_value);
  const double half = (std::exp(eps_value) + 1.0) / 2.0;
  const double lambda = (ell - 1) * half;
  const double num = std::exp(eps_key + eps_value) + lambda;
  const double den = std::min(std::exp(eps_key), half) + lambda;
  return std::log(num / den);
}

absl::StatusOr<double> Compose(Mechanism mechanism, double eps_key,
                               double eps_value, int ell) {
  return mechanism == Mechanism::kUe ? ComposeUe(eps_key, eps_value)
                                     : ComposeGrr(eps_key, eps_value, ell);
}

absl::StatusOr<BudgetSplit> Allocate(double eps_total, int ell,
                                     Mechanism mechanism,
                                     AllocationStrategy strategy) {
  if (absl::Status s = CheckTotal(eps_total, ell); !s.ok()) return s;
  const double e = std::exp(eps_total);
  switch (strategy) {
    case AllocationStrategy::kOptimized:
      if (mechanism == Mechanism::kUe || ell == 1) {
        return BudgetSplit{std::log((e + 1.0) / 2.0), eps_total};
      }
      return BudgetSplit{std::log1p(ell * std::expm1(eps_total) / 2.0),
                         std::log1p(ell * std::expm1(eps_total))};
    case AllocationStrategy::kNaive:
      return BudgetSplit{eps_total / 2.0, eps_total / 2.0};
    case AllocationStrategy::kNonOptimized: {
      const double eps_value = eps_total / 2.0;
      const double e2 = std::exp(eps_value);
      // With the value budget pinned, the composition is increasing in the
      // key budget and reaches eps on the branch min{...} = (e^e2+1)/2.
      const int pad = mechanism == Mechanism::kUe ? 1 : ell;
      const double half = (e2 + 1.0) / 2.0;
      const double theta = half * (pad * std::expm1(eps_total) + 1.0) / e2;
      return BudgetSplit{std::log(theta), eps_value};
    }
    case AllocationStrategy::kManual:
      return absl::InvalidArgumentError(
          "manual strategy needs an explicit (eps_key, eps_value) split");
  }
  return absl::InvalidArgumentError("unknown strategy");
}

absl::StatusOr<BudgetSpec> PlanBudget(Mechanism mechanism,
                                      AllocationStrategy strategy,
                                      double eps_total, int ell, int d) {
  if (d < 2) {
    return absl::InvalidArgumentError(absl::StrCat("d must be >= 2, got ", d));
  }
  absl::StatusOr<BudgetSplit> split = Allocate(eps_total, ell, mechanism, strategy);
  if (!split.ok()) return split.status();
  return BudgetSpec{mechanism, strategy,       eps_total, split->eps_key,
                    split->eps_value, ell, d, d + ell};
}

absl::StatusOr<BudgetSpec> ManualBudget(Mechanism mechanism, double eps_key,
                                        double eps_value, int ell, int d) {
  if (d < 2) {
    return absl::InvalidArgumentError(absl::StrCat("d must be >= 2, got ", d));
  }
  absl::StatusOr<double> total = Compose(mechanism, eps_key, eps_value, ell);
  if (!total.ok()) return total.status();
  return BudgetSpec{mechanism, AllocationStrategy::kManual, *total, eps_key,
                    eps_value, ell, d, d + ell};
}

absl::StatusOr<PerturbProbs> ProbsUe(double eps_key, double eps_value) {
  if (absl::Status s = CheckSplit(eps_key, eps_value); !s.ok()) return s;
  if (eps_key == 0 && eps_value == 0) {
    return absl::InvalidArgumentError(
        "key and value budgets are both zero; estimators are undefined");
  }
  return PerturbProbs{0.5, 1.0 / (std::exp(eps_key) + 1.0),
                      KeepProbability(eps_value)};
}

absl::StatusOr<PerturbProbs> ProbsGrr(double eps_key, double eps_value,
                                      int d_prime) {
  if (absl::Status s = CheckSplit(eps_key, eps_value); !s.ok()) return s;
  if (d_prime < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("d_prime must be >= 2, got ", d_prime));
  }
  const double a = 1.0 / (1.0 + (d_prime - 1) * std::exp(-eps_key));
  return PerturbProbs{a, (1.0 - a) / (d_prime - 1), KeepProbability(eps_value)};
}

PerturbProbs OptimizedGrrProbsClosedForm(double eps_total, int ell,
                                         int d_prime) {
  const double l = ell * std::expm1(eps_total);
  const double a = (l + 2.0) / (l + 2.0 * d_prime);
  return PerturbProbs{a, (1.0 - a) / (d_prime - 1), (l + 1.0) / (l + 2.0)};
}

absl::StatusOr<PerturbProbs> ProbsFor(const BudgetSpec& spec) {
  return spec.mechanism == Mechanism::kUe
             ? ProbsUe(spec.eps_key, spec.eps_value)
             : ProbsGrr(spec.eps_key, spec.eps_value, spec.d_prime);
}

BudgetSplit UeFrontierSplit(double eps_total, double theta) {
  return BudgetSplit{std::log(theta),
                     -std::log(2.0 * theta * std::exp(-eps_total) - 1.0)};
}

}  // namespace kvldp
