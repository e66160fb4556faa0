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

#include "kvldp/theory.h"

#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace kvldp {

absl::StatusOr<ErrorPrediction> PredictErrors(const PerturbProbs& probs,
                                              int ell, int64_t n,
                                              double f_star, double m_star) {
  if (!(f_star > 0) || f_star > 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("f_star must be in (0, 1], got ", f_star));
  }
  if (ell < 1 || n < 1) {
    return absl::InvalidArgumentError("ell and n must be positive");
  }
  const auto [a, b, p] = probs;
  if (!(a > b) || !(p > 0.5)) {
    return absl::InvalidArgumentError(
        "predictions need a > b and p > 1/2");
  }
  const double nd = static_cast<double>(n);
  const double l = ell;
  ErrorPrediction e;
  e.var_f = l * l * b * (1 - b) / (nd * (a - b) * (a - b)) +
            l * f_star * (1 - a - b) / (nd * (a - b));
  e.delta = (a - b) * f_star / l;
  e.gamma = a * (2 * p - 1) * f_star / l;
  e.e_m_approx =
      m_star * (1 + (1 - b - e.delta) * b / (nd * e.delta * e.delta));
  e.var_m_approx = (b + e.delta) / (nd * e.gamma * e.gamma) +
                   (b * (1 - b) - e.delta) / (nd * e.delta * e.delta) *
                       m_star * m_star;
  const GhParams gh = ComputeGh(probs);
  e.g = gh.g;
  e.h = gh.h;
  e.mu = l * l / (nd * f_star * f_star);
  e.mse_f_approx = l * l * e.h / nd;
  e.mse_m_approx = e.mu * (e.g + e.h * m_star * m_star);
  return e;
}

GhParams ComputeGh(const PerturbProbs& probs) {
  const auto [a, b, p] = probs;
  const double s = 2 * p - 1;
  return {b / (a * a * s * s), (1 - b) * b / ((a - b) * (a - b))};
}

GhParams GrrGh(double eps_key, double eps_value, int d_prime) {
  const double s = 2 / (1 + std::exp(-eps_value)) - 1;
  const double t = std::exp(eps_key);
  return {(1 / t + (d_prime - 1) / (t * t)) / (s * s),
          (t + d_prime - 2) / ((t - 1) * (t - 1))};
}

GhParams UeFrontierGh(double eps_total, double theta) {
  const double r = std::exp(eps_total) / theta - 1;
  return {4 / ((theta + 1) * r * r), 4 * theta / ((theta - 1) * (theta - 1))};
}

absl::StatusOr<ObjectiveScan> AllocationObjectiveScan(double eps_total,
                                                      double m_star_sq,
                                                      int grid_size) {
  if (!(eps_total > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be > 0, got ", eps_total));
  }
  if (grid_size < 100) {
    return absl::InvalidArgumentError(
        absl::StrCat("grid_size must be >= 100, got ", grid_size));
  }
  if (!(m_star_sq >= 0)) {
    return absl::InvalidArgumentError("m_star_sq must be >= 0");
  }
  auto eval = [&](double theta) {
    const GhParams gh = UeFrontierGh(eps_total, theta);
    return AllocationObjective{theta, gh.g + gh.h * m_star_sq, gh.g, gh.h};
  };
  ObjectiveScan scan;
  scan.theta0 = (std::exp(eps_total) + 1) / 2;
  scan.at_theta0 = eval(scan.theta0);
  // ln(e^eps / theta0), the log-width of the range.
  const double span = eps_total - std::log(scan.theta0);
  scan.curve.reserve(grid_size);
  scan.argmin.phi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_size; ++i) {
    const double theta =
        scan.theta0 * std::exp(span * static_cast<double>(i) / grid_size);
    const AllocationObjective point = eval(theta);
    scan.curve.push_back(point);
    if (point.phi < scan.argmin.phi) scan.argmin = point;
  }
  return scan;
}

Mechanism ChooseMechanism(int d, int ell, double eps_total,
                          Objective objective) {
  const double e = std::exp(eps_total);
  const double l = ell;
  if (objective == Objective::kFrequency) {
    return 2.0 * (d - 1) > l * (4 * l - 1) * (e + 1) ? Mechanism::kUe
                                                      : Mechanism::kGrr;
  }
  return 2.0 * d > l * (4 * l * (e + 1) / (e + 3) - 1) * (e + 1)
             ? Mechanism::kUe
             : Mechanism::kGrr;
}

}  // namespace kvldp
