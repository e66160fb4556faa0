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

#include "gtest/gtest.h"
#include "kvldp/random.h"
#include "test_util.h"

namespace kvldp {
namespace {

constexpr double kTol = 1e-12;

// Independent route to the UE composition: the largest output-probability
// ratio between two sampled pairs, written in terms of the perturbation
// probabilities. Same-key pairs give p/(1-p); different keys give
// (a p / (b/2)) * ((1-b) / (1-a)) = 2p(1-b)/b at a = 1/2.
double ComposeUeOracle(double e1, double e2) {
  const double b = 1 / (std::exp(e1) + 1);
  const double p = std::exp(e2) / (std::exp(e2) + 1);
  return std::log(std::max(p / (1 - p), 2 * p * (1 - b) / b));
}

// The GRR bound written with E1 = e^e1 and E2 = e^e2 spelled out term by
// term.
double ComposeGrrOracle(double e1, double e2, int ell) {
  const double E1 = std::exp(e1);
  const double E2 = std::exp(e2);
  const double lambda = (ell - 1) * (E2 + 1) / 2;
  return std::log((E1 * E2 + lambda) / (std::min(E1, (E2 + 1) / 2) + lambda));
}

TEST(ComposeUeTest, WorkedExample) {
  // Oracle: max{ln 3, ln 2 + ln(2 / (1 + 1/3))} = max{ln 3, ln 3}.
  ASSERT_NEAR(ComposeUeOracle(std::log(2.0), std::log(3.0)), std::log(3.0),
              kTol);
  ASSERT_OK_AND_ASSIGN(double eps, ComposeUe(std::log(2.0), std::log(3.0)));
  EXPECT_NEAR(eps, std::log(3.0), kTol);
}

TEST(ComposeUeTest, SingleBudgetLimits) {
  ASSERT_OK_AND_ASSIGN(double key_only, ComposeUe(1.7, 0));
  EXPECT_NEAR(key_only, 1.7, kTol);
  ASSERT_OK_AND_ASSIGN(double value_only, ComposeUe(0, 1.3));
  EXPECT_NEAR(value_only, 1.3, kTol);
}

TEST(ComposeUeTest, RejectsNegative) {
  EXPECT_FALSE(ComposeUe(-0.1, 1).ok());
  EXPECT_FALSE(ComposeUe(1, -0.1).ok());
  EXPECT_FALSE(ComposeGrr(1, 1, 0).ok());
  EXPECT_FALSE(ComposeGrr(-1, 1, 2).ok());
}

TEST(ComposeGrrTest, WorkedExample) {
  // Oracle with exact rationals: lambda = 1 * (3 + 1) / 2 = 2,
  // (3 * 3 + 2) / (min{3, 2} + 2) = 11 / 4.
  const double frozen = std::log(11.0 / 4.0);
  ASSERT_NEAR(ComposeGrrOracle(std::log(3.0), std::log(3.0), 2), frozen, kTol);
  ASSERT_OK_AND_ASSIGN(double eps,
                       ComposeGrr(std::log(3.0), std::log(3.0), 2));
  EXPECT_NEAR(eps, frozen, kTol);
}

TEST(ComposeGrrTest, ReducesToUeAtEllOne) {
  Rng rng(1, 0);
  for (int i = 0; i < 200; ++i) {
    const double e1 = 4 * rng.UniformDouble();
    const double e2 = 4 * rng.UniformDouble();
    ASSERT_OK_AND_ASSIGN(double grr, ComposeGrr(e1, e2, 1));
    ASSERT_OK_AND_ASSIGN(double ue, ComposeUe(e1, e2));
    EXPECT_NEAR(grr, ue, kTol);
  }
}

TEST(ComposeGrrTest, KeyOnlyReduction) {
  for (int ell : {1, 2, 5, 40}) {
    for (double e1 : {0.3, 1.0, 2.5}) {
      ASSERT_OK_AND_ASSIGN(double eps, ComposeGrr(e1, 0, ell));
      EXPECT_NEAR(eps, std::log((std::exp(e1) + ell - 1) / ell), kTol);
    }
  }
}

TEST(ComposePropertyTest, MatchesRatioOracles) {
  Rng rng(2, 0);
  for (int i = 0; i < 500; ++i) {
    const double e1 = 5 * rng.UniformDouble();
    const double e2 = 5 * rng.UniformDouble();
    const int ell = static_cast<int>(rng.UniformInt(1, 50));
    ASSERT_OK_AND_ASSIGN(double ue, ComposeUe(e1, e2));
    EXPECT_NEAR(ue, ComposeUeOracle(e1, e2), 1e-10);
    ASSERT_OK_AND_ASSIGN(double grr, ComposeGrr(e1, e2, ell));
    EXPECT_NEAR(grr, ComposeGrrOracle(e1, e2, ell), 1e-10);
  }
}

TEST(ComposePropertyTest, TighterThanSequentialComposition) {
  Rng rng(3, 0);
  for (int i = 0; i < 500; ++i) {
    const double e1 = 4 * rng.UniformDouble();
    const double e2 = 1e-3 + 4 * rng.UniformDouble();
    ASSERT_OK_AND_ASSIGN(double eps, ComposeUe(e1, e2));
    EXPECT_LT(eps, e1 + e2);
  }
  ASSERT_OK_AND_ASSIGN(double eq, ComposeUe(2.0, 0.0));
  EXPECT_NEAR(eq, 2.0, kTol);
}

TEST(ComposePropertyTest, GrrStrictlyDecreasingInEll) {
  Rng rng(4, 0);
  for (int i = 0; i < 200; ++i) {
    const double e1 = 0.05 + 4 * rng.UniformDouble();
    const double e2 = 0.05 + 4 * rng.UniformDouble();
    double prev = 0;
    for (int ell = 1; ell <= 20; ++ell) {
      ASSERT_OK_AND_ASSIGN(double eps, ComposeGrr(e1, e2, ell));
      if (ell > 1) {
        EXPECT_LT(eps, prev) << e1 << " " << e2 << " " << ell;
      }
      prev = eps;
    }
  }
}

TEST(ComposePropertyTest, FrontierSplitComposesToTotal) {
  Rng rng(5, 0);
  for (int i = 0; i < 500; ++i) {
    const double eps = 0.05 + 6 * rng.UniformDouble();
    const double lo = (std::exp(eps) + 1) / 2;
    const double theta = lo + (std::exp(eps) - lo) * rng.UniformDouble() * 0.999;
    const BudgetSplit s = UeFrontierSplit(eps, theta);
    EXPECT_NEAR(s.eps_key, std::log(theta), kTol);
    ASSERT_OK_AND_ASSIGN(double total, ComposeUe(s.eps_key, s.eps_value));
    EXPECT_NEAR(total, eps, 1e-10);
  }
}

TEST(AllocateTest, OptimizedUeExample) {
  // Closed form at e^eps = 3: (ln((3+1)/2), ln 3).
  ASSERT_OK_AND_ASSIGN(BudgetSplit s, Allocate(std::log(3.0), 1, Mechanism::kUe,
                                               AllocationStrategy::kOptimized));
  EXPECT_NEAR(s.eps_key, std::log(2.0), kTol);
  EXPECT_NEAR(s.eps_value, std::log(3.0), kTol);
}

TEST(AllocateTest, OptimizedGrrExample) {
  // Closed form at e^eps = 3, ell = 2: (ln(2*2/2+1), ln(2*2+1)).
  ASSERT_OK_AND_ASSIGN(BudgetSplit s,
                       Allocate(std::log(3.0), 2, Mechanism::kGrr,
                                AllocationStrategy::kOptimized));
  EXPECT_NEAR(s.eps_key, std::log(3.0), kTol);
  EXPECT_NEAR(s.eps_value, std::log(5.0), kTol);
  // UE ignores ell.
  ASSERT_OK_AND_ASSIGN(BudgetSplit u, Allocate(std::log(3.0), 2, Mechanism::kUe,
                                               AllocationStrategy::kOptimized));
  EXPECT_NEAR(u.eps_key, std::log(2.0), kTol);
}

TEST(AllocateTest, NaiveSplitsEvenly) {
  ASSERT_OK_AND_ASSIGN(BudgetSplit s, Allocate(2.0, 1, Mechanism::kUe,
                                               AllocationStrategy::kNaive));
  EXPECT_DOUBLE_EQ(s.eps_key, 1.0);
  EXPECT_DOUBLE_EQ(s.eps_value, 1.0);
}

TEST(AllocateTest, NonOptimizedUe) {
  for (double eps : {0.5, 1.0, 2.0, 4.0}) {
    ASSERT_OK_AND_ASSIGN(BudgetSplit s, Allocate(eps, 1, Mechanism::kUe,
                                                 AllocationStrategy::kNonOptimized));
    EXPECT_NEAR(s.eps_key, std::log((std::exp(eps) + std::exp(eps / 2)) / 2),
                kTol);
    EXPECT_NEAR(s.eps_value, eps / 2, kTol);
  }
}

TEST(AllocateTest, RejectsManualAndBadInput) {
  EXPECT_FALSE(Allocate(1, 1, Mechanism::kUe, AllocationStrategy::kManual).ok());
  EXPECT_FALSE(Allocate(0, 1, Mechanism::kUe, AllocationStrategy::kNaive).ok());
  EXPECT_FALSE(Allocate(1, 0, Mechanism::kUe, AllocationStrategy::kNaive).ok());
  EXPECT_FALSE(ParseStrategy("greedy").ok());
  EXPECT_FALSE(ParseMechanism("oue").ok());
}

TEST(AllocatePropertyTest, RoundTripsToTotal) {
  for (Mechanism m : {Mechanism::kUe, Mechanism::kGrr}) {
    for (AllocationStrategy st :
         {AllocationStrategy::kOptimized, AllocationStrategy::kNonOptimized}) {
      for (int ell : {1, 2, 3, 10, 100}) {
        for (double eps = 0.1; eps <= 8.0 + 1e-9; eps += 0.1) {
          ASSERT_OK_AND_ASSIGN(BudgetSplit s, Allocate(eps, ell, m, st));
          ASSERT_OK_AND_ASSIGN(double total,
                               Compose(m, s.eps_key, s.eps_value, ell));
          EXPECT_NEAR(total, eps, kTol)
              << MechanismName(m) << " " << StrategyName(st) << " " << ell;
        }
      }
    }
  }
}

TEST(AllocatePropertyTest, NaiveComposesBelowTotal) {
  for (double eps = 0.1; eps <= 8.0; eps += 0.3) {
    ASSERT_OK_AND_ASSIGN(double total, ComposeUe(eps / 2, eps / 2));
    EXPECT_LT(total, eps);
  }
}

TEST(ManualBudgetTest, ReportsComposedTotal) {
  ASSERT_OK_AND_ASSIGN(BudgetSpec spec,
                       ManualBudget(Mechanism::kGrr, std::log(3.0),
                                    std::log(3.0), 2, 10));
  EXPECT_NEAR(spec.eps_total, std::log(11.0 / 4.0), kTol);
  EXPECT_EQ(spec.d_prime, 12);
  EXPECT_EQ(spec.strategy, AllocationStrategy::kManual);
  EXPECT_FALSE(ManualBudget(Mechanism::kUe, 1, 1, 1, 1).ok());
}

TEST(ProbsUeTest, WorkedExample) {
  ASSERT_OK_AND_ASSIGN(PerturbProbs p, ProbsUe(std::log(2.0), std::log(3.0)));
  EXPECT_NEAR(p.a, 0.5, kTol);
  EXPECT_NEAR(p.b, 1.0 / 3, kTol);
  EXPECT_NEAR(p.p, 0.75, kTol);
}

TEST(ProbsUeTest, Limits) {
  ASSERT_OK_AND_ASSIGN(PerturbProbs big, ProbsUe(800, 1));
  EXPECT_EQ(big.b, 0.0);
  ASSERT_OK_AND_ASSIGN(PerturbProbs flat, ProbsUe(1, 0));
  EXPECT_DOUBLE_EQ(flat.p, 0.5);
  EXPECT_FALSE(ProbsUe(0, 0).ok());
}

TEST(ProbsGrrTest, WorkedExample) {
  // Closed-form oracle with l = ell (e^eps - 1) = 2, d' = 3:
  // a = 4 / (2 + 6), b = (1 - a) / 2, p = 3 / 4.
  ASSERT_OK_AND_ASSIGN(BudgetSpec spec,
                       PlanBudget(Mechanism::kGrr, AllocationStrategy::kOptimized,
                                  std::log(3.0), 1, 2));
  ASSERT_OK_AND_ASSIGN(PerturbProbs p, ProbsFor(spec));
  EXPECT_NEAR(p.a, 0.5, kTol);
  EXPECT_NEAR(p.b, 0.25, kTol);
  EXPECT_NEAR(p.p, 0.75, kTol);
}

TEST(ProbsGrrTest, ZeroKeyBudgetIsUniform) {
  ASSERT_OK_AND_ASSIGN(PerturbProbs p, ProbsGrr(0, 1, 7));
  EXPECT_NEAR(p.a, 1.0 / 7, kTol);
  EXPECT_NEAR(p.b, 1.0 / 7, kTol);
  EXPECT_FALSE(ProbsGrr(1, 1, 1).ok());
}

TEST(ProbsGrrPropertyTest, OptimizedSplitMatchesClosedForm) {
  for (double eps : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    for (int ell : {1, 2, 5, 100}) {
      for (int d : {2, 10, 1000, 50000}) {
        ASSERT_OK_AND_ASSIGN(BudgetSpec spec,
                             PlanBudget(Mechanism::kGrr,
                                        AllocationStrategy::kOptimized, eps,
                                        ell, d));
        ASSERT_OK_AND_ASSIGN(PerturbProbs p, ProbsFor(spec));
        const PerturbProbs c = OptimizedGrrProbsClosedForm(eps, ell, d + ell);
        EXPECT_NEAR(p.a, c.a, kTol);
        EXPECT_NEAR(p.b, c.b, kTol);
        EXPECT_NEAR(p.p, c.p, kTol);
        // The kept-value-flip mass equals the per-sign fake mass.
        EXPECT_NEAR(p.a * (1 - p.p), p.b / 2, kTol);
      }
    }
  }
}

TEST(ProbsPropertyTest, InvariantsHold) {
  Rng rng(6, 0);
  for (int i = 0; i < 500; ++i) {
    const double e1 = 1e-3 + 6 * rng.UniformDouble();
    const double e2 = 1e-3 + 6 * rng.UniformDouble();
    const int dp = static_cast<int>(rng.UniformInt(2, 1000));
    ASSERT_OK_AND_ASSIGN(PerturbProbs ue, ProbsUe(e1, e2));
    EXPECT_GT(ue.b, 0);
    EXPECT_LE(ue.b, 0.5);
    EXPECT_GE(ue.p, 0.5);
    EXPECT_LT(ue.p, 1);
    ASSERT_OK_AND_ASSIGN(PerturbProbs grr, ProbsGrr(e1, e2, dp));
    EXPECT_NEAR(grr.a + (dp - 1) * grr.b, 1.0, kTol);
    EXPECT_NEAR(grr.a / grr.b, std::exp(e1), 1e-9 * std::exp(e1));
  }
}

}  // namespace
}  // namespace kvldp
