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

#ifndef KVLDP_THEORY_H_
#define KVLDP_THEORY_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "kvldp/budget.h"

namespace kvldp {

// Error model of the baseline (uncorrected) estimators for one key with true
// frequency f and mean m. Fields suffixed _approx are Taylor approximations.
struct ErrorPrediction {
  double var_f = 0;           // exact variance of the frequency estimate
  double e_m_approx = 0;      // expectation of the mean estimate
  double var_m_approx = 0;    // approximate upper bound on its variance
  double delta = 0;           // (a - b) f / ell
  double gamma = 0;           // a (2p - 1) f / ell
  double mu = 0;              // ell^2 / (n f^2)
  double g = 0;               // b / (a^2 (2p - 1)^2)
  double h = 0;               // (1 - b) b / (a - b)^2
  double mse_f_approx = 0;    // ell^2 h / n
  double mse_m_approx = 0;    // mu (g + h m^2)
};

absl::StatusOr<ErrorPrediction> PredictErrors(const PerturbProbs& probs,
                                              int ell, int64_t n,
                                              double f_star, double m_star);

struct GhParams {
  double g = 0;
  double h = 0;
};

// g and h of a probability triple.
GhParams ComputeGh(const PerturbProbs& probs);

// g and h of GRR in terms of the budgets:
//   g = (e^-e1 + (d'-1) e^-2e1) / (2/(1+e^-e2) - 1)^2,
//   h = (e^e1 + d' - 2) / (e^e1 - 1)^2.
GhParams GrrGh(double eps_key, double eps_value, int d_prime);

// UE objective along the composition frontier parameterized by theta:
//   g = 4 / ((theta+1)(e^eps/theta - 1)^2),  h = 4 theta / (theta-1)^2.
GhParams UeFrontierGh(double eps_total, double theta);

struct AllocationObjective {
  double theta = 0;
  double phi = 0;  // g + h m^2
  double g = 0;
  double h = 0;
};

struct ObjectiveScan {
  double theta0 = 0;  // (e^eps + 1)/2, the optimized split
  AllocationObjective at_theta0;
  AllocationObjective argmin;
  std::vector<AllocationObjective> curve;
};

// Evaluates the UE objective on a log-spaced grid over
// [(e^eps+1)/2, e^eps), right end excluded.
absl::StatusOr<ObjectiveScan> AllocationObjectiveScan(double eps_total,
                                                      double m_star_sq,
                                                      int grid_size = 10'000);

enum class Objective { kFrequency, kMean };

// Frequency: UE iff 2(d-1) > ell(4 ell - 1)(e^eps + 1).
// Mean:      UE iff 2d > ell(4 ell (e^eps+1)/(e^eps+3) - 1)(e^eps + 1).
Mechanism ChooseMechanism(int d, int ell, double eps_total, Objective objective);

}  // namespace kvldp

#endif  // KVLDP_THEORY_H_
