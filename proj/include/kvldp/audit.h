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

#ifndef KVLDP_AUDIT_H_
#define KVLDP_AUDIT_H_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "kvldp/budget.h"
#include "kvldp/model.h"

namespace kvldp {

// Log-space tolerance for soundness and attainment checks.
inline constexpr double kAuditTolerance = 1e-9;

// Largest padded domain accepted by exact-rational auditing.
inline constexpr int kMaxExactDomain = 5;

struct AuditOptions {
  // Adds 0 to the {-1, +1} input value grid.
  bool include_zero_values = false;
  // Recomputes every probability as an exact rational.
  bool exact = false;
};

struct AuditResult {
  double max_ratio = 1;
  double log_max_ratio = 0;
  // Inputs S1 (numerator) and S2 (denominator) and the output y at which the
  // largest ratio occurs. y is a report string as written by FormatReport.
  std::vector<KvPair> s1;
  std::vector<KvPair> s2;
  std::string y;
  double theoretical_eps = 0;
  double slack = 0;  // theoretical_eps - log_max_ratio
  int64_t inputs = 0;
  int64_t outputs = 0;

  // Exact mode only: the largest ratio and the composed bound e^eps as
  // reduced fractions, and their exact comparison.
  std::string exact_max_ratio;
  std::string exact_bound;
  bool exact_sound = false;
  bool exact_attained = false;

  bool sound() const { return slack >= -kAuditTolerance; }
  bool attained() const { return std::abs(slack) <= kAuditTolerance; }
};

// Enumerates every input set of real keys with |S| <= min(d, max(ell, 3)),
// including the empty set, and every output, and reports the largest
// probability ratio. spec supplies d, ell and the budget split; the
// perturbation probabilities are derived from it.
absl::StatusOr<AuditResult> AuditUe(const BudgetSpec& spec,
                                    const AuditOptions& options = {});
absl::StatusOr<AuditResult> AuditGrr(const BudgetSpec& spec,
                                     const AuditOptions& options = {});
absl::StatusOr<AuditResult> Audit(const BudgetSpec& spec,
                                  const AuditOptions& options = {});

// The input sets enumerated by the auditor.
std::vector<std::vector<KvPair>> AuditInputSets(int d, int ell,
                                                bool include_zero_values);

}  // namespace kvldp

#endif  // KVLDP_AUDIT_H_
