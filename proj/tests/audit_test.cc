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

#include "kvldp/audit.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "kvldp/budget.h"
#include "kvldp/mechanisms.h"
#include "kvldp/random.h"
#include "kvldp/sampling.h"
#include "test_util.h"

namespace kvldp {
namespace {

BudgetSpec Optimized(Mechanism m, double eps, int ell, int d) {
  absl::StatusOr<BudgetSpec> spec =
      PlanBudget(m, AllocationStrategy::kOptimized, eps, ell, d);
  EXPECT_TRUE(spec.ok()) << spec.status();
  return *spec;
}

BudgetSpec Manual(Mechanism m, double e1, double e2, int ell, int d) {
  absl::StatusOr<BudgetSpec> spec = ManualBudget(m, e1, e2, ell, d);
  EXPECT_TRUE(spec.ok()) << spec.status();
  return *spec;
}

// Brute-force GRR audit: output probabilities from the sampled-pair
// distribution and the perturbation table, maximized over all input pairs.
double GrrLogMaxRatioOracle(const BudgetSpec& spec) {
  const PerturbProbs q = *ProbsGrr(spec.eps_key, spec.eps_value, spec.d_prime);
  std::vector<std::vector<double>> dists;
  for (const auto& s : AuditInputSets(spec.d, spec.ell, false)) {
    std::vector<double> out(2 * spec.d_prime, 0.0);
    for (const auto& [x, w] : SampleDistribution(s, spec.ell, spec.d)) {
      for (Key k = 1; k <= spec.d_prime; ++k) {
        for (int v : {1, -1}) {
          const double pr = k != x.key     ? q.b / 2
                            : v == x.value ? q.a * q.p
                                           : q.a * (1 - q.p);
          out[EncodeGrrOutput({k, v})] += w * pr;
        }
      }
    }
    dists.push_back(out);
  }
  double best = 0;
  for (const auto& p1 : dists) {
    for (const auto& p2 : dists) {
      for (size_t y = 0; y < p1.size(); ++y) {
        best = std::max(best, std::log(p1[y] / p2[y]));
      }
    }
  }
  return best;
}

TEST(AuditInputSetsTest, Enumeration) {
  // d = 2, ell = 1: sizes 0..2; 1 + 2*2 + 1*4 sets over {-1, +1}.
  EXPECT_EQ(AuditInputSets(2, 1, false).size(), 9u);
  // With 0 added: 1 + 2*3 + 1*9.
  EXPECT_EQ(AuditInputSets(2, 1, true).size(), 16u);
  for (const auto& s : AuditInputSets(4, 1, false)) EXPECT_LE(s.size(), 3u);
}

TEST(AuditUeTest, OptimizedSplitAttainsBound) {
  ASSERT_OK_AND_ASSIGN(AuditResult r, AuditUe(Optimized(Mechanism::kUe, 1.0, 1, 2)));
  EXPECT_NEAR(r.max_ratio, std::exp(1.0), 1e-9);
  EXPECT_TRUE(r.sound());
  EXPECT_TRUE(r.attained());
  EXPECT_NE(r.s1, r.s2);
  EXPECT_EQ(r.y.size(), 3u);
}

TEST(AuditUeTest, KeyOnlyBudget) {
  for (double e1 : {0.5, 1.0, 2.0}) {
    ASSERT_OK_AND_ASSIGN(AuditResult r,
                         AuditUe(Manual(Mechanism::kUe, e1, 0.0, 1, 3)));
    EXPECT_NEAR(r.log_max_ratio, e1, 1e-9);
  }
}

TEST(AuditUeTest, NoBenefitFromPadding) {
  for (double eps : {0.5, 1.0, 2.0}) {
    ASSERT_OK_AND_ASSIGN(BudgetSplit s, Allocate(eps, 1, Mechanism::kUe,
                                                 AllocationStrategy::kOptimized));
    double first = 0;
    for (int ell : {1, 2, 3}) {
      ASSERT_OK_AND_ASSIGN(
          AuditResult r,
          AuditUe(Manual(Mechanism::kUe, s.eps_key, s.eps_value, ell, 3)));
      if (ell == 1) first = r.max_ratio;
      EXPECT_NEAR(r.max_ratio, first, 1e-9 * first) << eps << " " << ell;
    }
  }
}

TEST(AuditUeTest, RejectsLargeDomain) {
  EXPECT_FALSE(AuditUe(Optimized(Mechanism::kUe, 1.0, 2, 9)).ok());
}

TEST(AuditGrrTest, EllOneMatchesUeBound) {
  for (double e1 : {0.4, 1.0, 2.2}) {
    for (double e2 : {0.3, 1.0, 1.7}) {
      ASSERT_OK_AND_ASSIGN(AuditResult r,
                           AuditGrr(Manual(Mechanism::kGrr, e1, e2, 1, 3)));
      ASSERT_OK_AND_ASSIGN(double ue, ComposeUe(e1, e2));
      EXPECT_NEAR(r.log_max_ratio, ue, 1e-9);
      EXPECT_NEAR(r.theoretical_eps, ue, 1e-12);
    }
  }
}

TEST(AuditGrrTest, StrictlyDecreasingInEll) {
  ASSERT_OK_AND_ASSIGN(BudgetSplit s, Allocate(1.0, 1, Mechanism::kGrr,
                                               AllocationStrategy::kOptimized));
  double prev = INFINITY;
  for (int ell : {1, 2, 4}) {
    ASSERT_OK_AND_ASSIGN(
        AuditResult r,
        AuditGrr(Manual(Mechanism::kGrr, s.eps_key, s.eps_value, ell, 3)));
    EXPECT_LT(r.log_max_ratio, prev) << ell;
    EXPECT_TRUE(r.sound());
    prev = r.log_max_ratio;
  }
}

TEST(AuditGrrTest, KeyOnlyAtEllTwo) {
  for (double e1 : {0.5, 1.0, 2.0}) {
    ASSERT_OK_AND_ASSIGN(AuditResult r,
                         AuditGrr(Manual(Mechanism::kGrr, e1, 0.0, 2, 3)));
    EXPECT_NEAR(r.log_max_ratio, std::log((std::exp(e1) + 1) / 2), 1e-9);
  }
}

TEST(AuditGrrTest, MatchesBruteForceOracle) {
  Rng rng(1, 0);
  for (int i = 0; i < 30; ++i) {
    const double e1 = 0.1 + 3 * rng.UniformDouble();
    const double e2 = 0.1 + 3 * rng.UniformDouble();
    const int ell = static_cast<int>(rng.UniformInt(1, 4));
    const int d = static_cast<int>(rng.UniformInt(2, 4));
    const BudgetSpec spec = Manual(Mechanism::kGrr, e1, e2, ell, d);
    ASSERT_OK_AND_ASSIGN(AuditResult r, AuditGrr(spec));
    EXPECT_NEAR(r.log_max_ratio, GrrLogMaxRatioOracle(spec), 1e-12);
  }
}

TEST(AuditPropertyTest, SoundAcrossGrid) {
  for (Mechanism m : {Mechanism::kUe, Mechanism::kGrr}) {
    for (double eps : {0.5, 1.0, 2.0}) {
      for (int d : {2, 3}) {
        for (int ell : {1, 2, 3}) {
          ASSERT_OK_AND_ASSIGN(AuditResult r, Audit(Optimized(m, eps, ell, d)));
          EXPECT_TRUE(r.sound()) << MechanismName(m) << eps << d << ell;
          EXPECT_NEAR(r.theoretical_eps, eps, 1e-12);
          // Optimized GRR always attains; UE attains once d >= ell.
          if (m == Mechanism::kGrr || d >= ell) {
            EXPECT_TRUE(r.attained()) << MechanismName(m) << eps << d << ell;
          }
        }
      }
    }
  }
}

TEST(AuditPropertyTest, RandomManualSplitsAreSound) {
  Rng rng(2, 0);
  for (int i = 0; i < 40; ++i) {
    const Mechanism m = rng.Bernoulli(0.5) ? Mechanism::kUe : Mechanism::kGrr;
    const double e1 = 3 * rng.UniformDouble();
    const double e2 = 0.05 + 3 * rng.UniformDouble();
    const int ell = static_cast<int>(rng.UniformInt(1, 3));
    const int d = static_cast<int>(rng.UniformInt(2, 3));
    ASSERT_OK_AND_ASSIGN(AuditResult r, Audit(Manual(m, e1, e2, ell, d)));
    EXPECT_TRUE(r.sound()) << e1 << " " << e2;
  }
}

TEST(AuditPropertyTest, VertexValuesSuffice) {
  for (Mechanism m : {Mechanism::kUe, Mechanism::kGrr}) {
    for (int ell : {1, 2}) {
      const BudgetSpec spec = Manual(m, 0.8, 1.3, ell, 2);
      ASSERT_OK_AND_ASSIGN(AuditResult vertices, Audit(spec));
      ASSERT_OK_AND_ASSIGN(AuditResult with_zero,
                           Audit(spec, {.include_zero_values = true}));
      EXPECT_GT(with_zero.inputs, vertices.inputs);
      EXPECT_LE(with_zero.max_ratio, vertices.max_ratio * (1 + 1e-12));
    }
  }
}

TEST(AuditExactTest, AgreesWithDoubleMode) {
  for (Mechanism m : {Mechanism::kUe, Mechanism::kGrr}) {
    for (int ell : {1, 2}) {
      const BudgetSpec spec = Optimized(m, 1.0, ell, 2);
      ASSERT_OK_AND_ASSIGN(AuditResult fast, Audit(spec));
      ASSERT_OK_AND_ASSIGN(AuditResult exact, Audit(spec, {.exact = true}));
      EXPECT_NEAR(exact.max_ratio, fast.max_ratio, 1e-12 * fast.max_ratio);
      EXPECT_TRUE(exact.exact_sound);
      EXPECT_FALSE(exact.exact_max_ratio.empty());
      EXPECT_NE(exact.exact_max_ratio.find('/'), std::string::npos);
    }
  }
}

TEST(AuditExactTest, UeAttainmentIsExact) {
  ASSERT_OK_AND_ASSIGN(AuditResult r, AuditUe(Optimized(Mechanism::kUe, 1.0, 1, 2),
                                              {.exact = true}));
  EXPECT_TRUE(r.exact_attained);
  EXPECT_EQ(r.exact_max_ratio, r.exact_bound);
}

TEST(AuditExactTest, RejectsLargeDomain) {
  EXPECT_FALSE(
      AuditUe(Optimized(Mechanism::kUe, 1.0, 2, 4), {.exact = true}).ok());
}

}  // namespace
}  // namespace kvldp
