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

#include "kvldp/sampling.h"

#include <cmath>
#include <map>
#include <vector>

#include "gtest/gtest.h"
#include "kvldp/random.h"
#include "test_util.h"

namespace kvldp {
namespace {

using ::kvldp::testing::BinomialSigma;
using ::kvldp::testing::RandomRecord;

constexpr int kDraws = 200000;

std::map<SampledPair, int> Tally(const std::vector<KvPair>& record, int ell,
                                 int d, uint64_t seed) {
  Rng rng(seed, 0);
  std::map<SampledPair, int> counts;
  for (int i = 0; i < kDraws; ++i) ++counts[PadAndSample(record, ell, d, rng)];
  return counts;
}

// Pearson statistic against the exact map, plus its degrees of freedom.
// Fails outright if a sampled outcome has zero exact probability.
std::pair<double, int> ChiSquare(const std::map<SampledPair, int>& counts,
                                 const std::map<SampledPair, double>& exact) {
  double stat = 0;
  for (const auto& [y, prob] : exact) {
    const auto it = counts.find(y);
    const double observed = it == counts.end() ? 0 : it->second;
    const double expected = prob * kDraws;
    stat += (observed - expected) * (observed - expected) / expected;
  }
  for (const auto& [y, c] : counts) {
    EXPECT_TRUE(exact.contains(y)) << y.key << " " << y.value;
  }
  return {stat, static_cast<int>(exact.size()) - 1};
}

TEST(RealPairRateTest, Values) {
  EXPECT_EQ(RealPairRate(0, 3), 0.0);
  EXPECT_EQ(RealPairRate(1, 1), 1.0);
  EXPECT_EQ(RealPairRate(4, 2), 1.0);
  EXPECT_DOUBLE_EQ(RealPairRate(1, 4), 0.25);
}

TEST(PadAndSampleTest, SinglePairAtEllOne) {
  const std::vector<KvPair> s = {{5, 0.5}};
  const auto counts = Tally(s, 1, 10, 1);
  int up = 0;
  for (const auto& [y, c] : counts) {
    EXPECT_EQ(y.key, 5);
    if (y.value == 1) up += c;
  }
  EXPECT_NEAR(up / double(kDraws), 0.75, 5 * BinomialSigma(0.75, kDraws));
}

TEST(PadAndSampleTest, EmptyRecordYieldsDummies) {
  const auto counts = Tally({}, 2, 10, 2);
  ASSERT_EQ(counts.size(), 4u);
  for (const auto& [y, c] : counts) {
    EXPECT_TRUE(y.key == 11 || y.key == 12);
    EXPECT_NEAR(c / double(kDraws), 0.25, 5 * BinomialSigma(0.25, kDraws));
  }
}

TEST(PadAndSampleTest, LargeRecordNeverPads) {
  const std::vector<KvPair> s = {{1, 1}, {2, 1}, {3, 1}, {4, 1}};
  const auto counts = Tally(s, 2, 4, 3);
  ASSERT_EQ(counts.size(), 4u);
  for (const auto& [y, c] : counts) {
    EXPECT_LE(y.key, 4);
    EXPECT_EQ(y.value, 1);
    EXPECT_NEAR(c / double(kDraws), 0.25, 5 * BinomialSigma(0.25, kDraws));
  }
}

TEST(SampleDistributionTest, DeterministicDiscretization) {
  const std::vector<KvPair> s = {{1, 1.0}};
  const auto dist = SampleDistribution(s, 1, 2);
  ASSERT_EQ(dist.size(), 1u);
  EXPECT_DOUBLE_EQ(dist.at({1, 1}), 1.0);
}

TEST(SampleDistributionTest, HalfPaddedExample) {
  const std::vector<KvPair> s = {{1, 0.0}};
  const auto dist = SampleDistribution(s, 2, 2);
  ASSERT_EQ(dist.size(), 6u);
  EXPECT_DOUBLE_EQ(dist.at({1, 1}), 0.25);
  EXPECT_DOUBLE_EQ(dist.at({1, -1}), 0.25);
  for (Key k : {3, 4}) {
    EXPECT_DOUBLE_EQ(dist.at({k, 1}), 0.125);
    EXPECT_DOUBLE_EQ(dist.at({k, -1}), 0.125);
  }
}

TEST(SamplingPropertyTest, DistributionSumsToOne) {
  Rng rng(10, 0);
  for (int i = 0; i < 300; ++i) {
    const int d = static_cast<int>(rng.UniformInt(1, 12));
    const int ell = static_cast<int>(rng.UniformInt(1, 6));
    const auto s = RandomRecord(rng, d, d);
    double total = 0;
    for (const auto& [y, p] : SampleDistribution(s, ell, d)) {
      EXPECT_GT(p, 0);
      EXPECT_GE(y.key, 1);
      EXPECT_LE(y.key, d + ell);
      total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(SamplingPropertyTest, DiscretizationIsUnbiased) {
  Rng rng(11, 0);
  for (int i = 0; i < 300; ++i) {
    const int d = static_cast<int>(rng.UniformInt(1, 8));
    const int ell = static_cast<int>(rng.UniformInt(1, 4));
    const auto s = RandomRecord(rng, d, d);
    const auto dist = SampleDistribution(s, ell, d);
    for (const KvPair& kv : s) {
      double mass = 0;
      double signed_mass = 0;
      for (int v : {1, -1}) {
        const auto it = dist.find({kv.key, v});
        if (it == dist.end()) continue;
        mass += it->second;
        signed_mass += v * it->second;
      }
      ASSERT_GT(mass, 0);
      EXPECT_NEAR(signed_mass / mass, kv.value, 1e-12);
    }
  }
}

TEST(SamplingPropertyTest, SmallRecordsSampleAtRateOneOverEll) {
  Rng rng(12, 0);
  for (int i = 0; i < 300; ++i) {
    const int ell = static_cast<int>(rng.UniformInt(1, 8));
    const int d = static_cast<int>(rng.UniformInt(1, 10));
    const auto s = RandomRecord(rng, d, ell);
    const auto dist = SampleDistribution(s, ell, d);
    for (const KvPair& kv : s) {
      double mass = 0;
      for (int v : {1, -1}) {
        const auto it = dist.find({kv.key, v});
        if (it != dist.end()) mass += it->second;
      }
      EXPECT_NEAR(mass, 1.0 / ell, 1e-12);
    }
  }
}

TEST(SamplingPropertyTest, MonteCarloMatchesExactDistribution) {
  Rng gen(13, 0);
  for (int trial = 0; trial < 8; ++trial) {
    const int d = static_cast<int>(gen.UniformInt(2, 6));
    const int ell = static_cast<int>(gen.UniformInt(1, 4));
    const auto s = RandomRecord(gen, d, d);
    const auto exact = SampleDistribution(s, ell, d);
    const auto counts = Tally(s, ell, d, 100 + trial);
    const auto [stat, df] = ChiSquare(counts, exact);
    if (df == 0) continue;
    // Normal approximation to the chi-square tail, 6 standard deviations.
    EXPECT_LT(stat, df + 6 * std::sqrt(2.0 * df)) << "trial " << trial;
  }
}

}  // namespace
}  // namespace kvldp
