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

#ifndef KVLDP_RANDOM_H_
#define KVLDP_RANDOM_H_

#include <cstdint>
#include <limits>

namespace kvldp {

// Mixes two 64-bit words into a new seed. Used for every seed derivation in
// the library (experiment -> repeat -> user stream) so that tables are
// reproducible across machines and thread counts.
uint64_t DeriveSeed(uint64_t seed, uint64_t tag);

// Counter-based generator: output i of stream (seed, stream) is
// SplitMix64(base + i * golden) with base = DeriveSeed(seed, stream). Streams
// are cheap to construct, so each user gets its own. Satisfies
// UniformRandomBitGenerator.
//
// All distributions below are implemented here instead of through <random>
// so that a fixed seed yields the same draws on every standard library.
class Rng {
 public:
  using result_type = uint64_t;

  Rng(uint64_t seed, uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return Next(); }

  uint64_t Next();

  // Uniform on [0, 1) with 53 random bits.
  double UniformDouble();

  // True with probability p; p <= 0 is never, p >= 1 is always.
  bool Bernoulli(double p);

  // Uniform integer on the closed range [lo, hi]. Requires lo <= hi.
  int64_t UniformInt(int64_t lo, int64_t hi);

  // +1 or -1 with equal probability.
  int FairSign();

  // Standard normal via Box-Muller (one value per call).
  double Normal();

  // Number of failures before the first success of Bernoulli(p) trials.
  // Returns a huge value when p <= 0.
  int64_t Geometric(double p);

 private:
  uint64_t base_;
  uint64_t counter_ = 0;
};

}  // namespace kvldp

#endif  // KVLDP_RANDOM_H_
