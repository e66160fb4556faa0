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
#include <limits>

#include "absl/strings/str_cat.h"
#include "boost/multiprecision/cpp_int.hpp"
#include "kvldp/mechanisms.h"
#include "kvldp/sampling.h"

namespace kvldp {
namespace {

using Rational = boost::multiprecision::cpp_rational;
using boost::multiprecision::cpp_int;

// Every finite double is a dyadic rational; convert without rounding.
Rational ExactRational(double x) {
  int exp = 0;
  const double m = std::frexp(x, &exp);
  const auto mantissa = static_cast<int64_t>(std::ldexp(m, 53));
  exp -= 53;
  Rational r(mantissa);
  if (exp > 0) {
    r *= Rational(cpp_int(1) << exp);
  } else if (exp < 0) {
    r /= Rational(cpp_int(1) << -exp);
  }
  return r;
}

std::string RationalString(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

// Position of the largest ratio Pr(y | S1) / Pr(y | S2).
template <typename T>
struct Extreme {
  T ratio{1};
  bool infinite = false;
  size_t s1 = 0;
  size_t s2 = 0;
  int64_t y = -1;
};

// dist[s][y] = Pr(y | input s).
template <typename T>
Extreme<T> LargestRatio(const std::vector<std::vector<T>>& dist) {
  Extreme<T> best;
  const int64_t outputs = dist.empty() ? 0 : dist[0].size();
  for (int64_t y = 0; y < outputs; ++y) {
    size_t hi = 0;
    size_t lo = 0;
    for (size_t s = 1; s < dist.size(); ++s) {
      if (dist[s][y] > dist[hi][y]) hi = s;
      if (dist[s][y] < dist[lo][y]) lo = s;
    }
    if (dist[hi][y] == T(0)) continue;
    if (dist[lo][y] == T(0)) {
      if (!best.infinite) best = {T(1), true, hi, lo, y};
      continue;
    }
    const T ratio = dist[hi][y] / dist[lo][y];
    if (!best.infinite && (best.y < 0 || ratio > best.ratio)) {
      best = {ratio, false, hi, lo, y};
    }
  }
  return best;
}

struct ExactProbs {
  Rational a, b, p;
};

// Sampling weights of padding-and-sampling followed by discretization, as
// exact rationals: (key, sign, weight).
struct Weighted {
  Key key;
  int sign;
  Rational w;
};

std::vector<Weighted> ExactSampleWeights(const std::vector<KvPair>& s,
                                         int ell, int d) {
  std::vector<Weighted> out;
  const int size = static_cast<int>(s.size());
  const int slots = std::max(size, ell);
  for (const KvPair& kv : s) {
    const Rational up = (Rational(1) + ExactRational(kv.value)) / 2;
    const Rational w = Rational(1, slots);
    out.push_back({kv.key, 1, w * up});
    out.push_back({kv.key, -1, w * (Rational(1) - up)});
  }
  if (slots > size) {
    const Rational w = Rational(slots - size, slots) / ell / 2;
    for (int j = 1; j <= ell; ++j) {
      out.push_back({d + j, 1, w});
      out.push_back({d + j, -1, w});
    }
  }
  return out;
}

std::vector<Rational> ExactUeDistribution(const std::vector<KvPair>& s,
                                          const ExactProbs& q, int ell,
                                          int d) {
  const int d_prime = d + ell;
  int64_t outputs = 1;
  for (int i = 0; i < d_prime; ++i) outputs *= 3;
  const std::vector<Weighted> weights = ExactSampleWeights(s, ell, d);
  std::vector<Rational> dist(outputs);
  for (int64_t code = 0; code < outputs; ++code) {
    const UeReport y = DecodeUeOutput(code, d_prime);
    Rational total = 0;
    for (const Weighted& x : weights) {
      Rational prob = x.w;
      for (int i = 0; i < d_prime; ++i) {
        const int bit = y.bits[i];
        if (i + 1 == x.key) {
          if (bit == 0) {
            prob *= 1 - q.a;
          } else if (bit == x.sign) {
            prob *= q.a * q.p;
          } else {
            prob *= q.a * (1 - q.p);
          }
        } else {
          prob *= bit == 0 ? Rational(1) - q.b : q.b / 2;
        }
      }
      total += prob;
    }
    dist[code] = total;
  }
  return dist;
}

std::vector<Rational> ExactGrrDistribution(const std::vector<KvPair>& s,
                                           const ExactProbs& q, int ell,
                                           int d) {
  const int d_prime = d + ell;
  std::vector<Rational> dist(2 * static_cast<size_t>(d_prime));
  for (const Weighted& x : ExactSampleWeights(s, ell, d)) {
    for (Key k = 1; k <= d_prime; ++k) {
      for (int v : {1, -1}) {
        Rational prob;
        if (k != x.key) {
          prob = q.b / 2;
        } else if (v == x.sign) {
          prob = q.a * q.p;
        } else {
          prob = q.a * (1 - q.p);
        }
        dist[EncodeGrrOutput({k, v})] += x.w * prob;
      }
    }
  }
  return dist;
}

// e^eps of the composition theorems written in terms of (a, b, p).
Rational ExactBound(Mechanism mechanism, const ExactProbs& q, int ell) {
  const Rational e2 = q.p / (1 - q.p);
  if (mechanism == Mechanism::kUe) {
    const Rational e1 = (1 - q.b) / q.b;
    const Rational attained = e1 * 2 * q.p;
    return e2 > attained ? e2 : attained;
  }
  const Rational e1 = q.a / q.b;
  const Rational lambda = Rational(ell - 1) * (e2 + 1) / 2;
  const Rational half = (e2 + 1) / 2;
  const Rational low = e1 < half ? e1 : half;
  return (e1 * e2 + lambda) / (low + lambda);
}

std::string FormatOutput(Mechanism mechanism, int64_t y, int d_prime) {
  if (y < 0) return "";
  if (mechanism == Mechanism::kUe) {
    return FormatReport(DecodeUeOutput(y, d_prime));
  }
  return FormatReport(DecodeGrrOutput(y));
}

constexpr double kMaxAuditInputs = 1e6;

double InputSetCount(int d, int ell, bool include_zero_values) {
  const int cap = std::min(d, std::max(ell, 3));
  const double values = include_zero_values ? 3 : 2;
  double total = 0;
  double choose = 1;  // C(d, size)
  for (int size = 0; size <= cap; ++size) {
    total += choose * std::pow(values, size);
    choose = choose * (d - size) / (size + 1);
  }
  return total;
}

absl::StatusOr<AuditResult> RunAudit(Mechanism mechanism,
                                     const BudgetSpec& spec,
                                     const AuditOptions& options) {
  const int d = spec.d;
  const int ell = spec.ell;
  const int d_prime = d + ell;
  if (d < 1 || ell < 1) {
    return absl::InvalidArgumentError("audit needs d >= 1 and ell >= 1");
  }
  if (mechanism == Mechanism::kUe && d_prime > kMaxEnumerableUeDomain) {
    return absl::InvalidArgumentError(
        absl::StrCat("UE audit needs d' <= ", kMaxEnumerableUeDomain,
                     ", got ", d_prime));
  }
  if (mechanism == Mechanism::kGrr && d_prime > 1000) {
    return absl::InvalidArgumentError(
        absl::StrCat("GRR audit needs d' <= 1000, got ", d_prime));
  }
  if (InputSetCount(d, ell, options.include_zero_values) > kMaxAuditInputs) {
    return absl::InvalidArgumentError(
        absl::StrCat("too many input sets to enumerate for d = ", d));
  }
  if (options.exact && d_prime > kMaxExactDomain) {
    return absl::InvalidArgumentError(absl::StrCat(
        "exact audit needs d' <= ", kMaxExactDomain, ", got ", d_prime));
  }
  absl::StatusOr<PerturbProbs> probs =
      mechanism == Mechanism::kUe
          ? ProbsUe(spec.eps_key, spec.eps_value)
          : ProbsGrr(spec.eps_key, spec.eps_value, d_prime);
  if (!probs.ok()) return probs.status();
  absl::StatusOr<double> eps =
      Compose(mechanism, spec.eps_key, spec.eps_value, ell);
  if (!eps.ok()) return eps.status();

  const std::vector<std::vector<KvPair>> inputs =
      AuditInputSets(d, ell, options.include_zero_values);
  std::vector<std::vector<double>> dist;
  dist.reserve(inputs.size());
  for (const auto& s : inputs) {
    absl::StatusOr<std::vector<double>> row =
        mechanism == Mechanism::kUe
            ? OutputDistributionUe(s, *probs, ell, d)
            : OutputDistributionGrr(s, *probs, ell, d);
    if (!row.ok()) return row.status();
    dist.push_back(*std::move(row));
  }

  AuditResult result;
  result.inputs = static_cast<int64_t>(inputs.size());
  result.outputs = static_cast<int64_t>(dist.front().size());
  result.theoretical_eps = *eps;

  const Extreme<double> best = LargestRatio(dist);
  result.max_ratio =
      best.infinite ? std::numeric_limits<double>::infinity() : best.ratio;
  result.s1 = inputs[best.s1];
  result.s2 = inputs[best.s2];
  result.y = FormatOutput(mechanism, best.y, d_prime);

  if (options.exact) {
    const ExactProbs q{ExactRational(probs->a), ExactRational(probs->b),
                       ExactRational(probs->p)};
    if (q.b == 0 || q.p == 1) {
      return absl::InvalidArgumentError(
          "exact audit needs b > 0 and p < 1");
    }
    std::vector<std::vector<Rational>> exact;
    exact.reserve(inputs.size());
    for (const auto& s : inputs) {
      exact.push_back(mechanism == Mechanism::kUe
                          ? ExactUeDistribution(s, q, ell, d)
                          : ExactGrrDistribution(s, q, ell, d));
    }
    const Extreme<Rational> ebest = LargestRatio(exact);
    const Rational bound = ExactBound(mechanism, q, ell);
    result.exact_bound = RationalString(bound);
    if (ebest.infinite) {
      result.exact_max_ratio = "inf";
      result.exact_sound = false;
      result.max_ratio = std::numeric_limits<double>::infinity();
    } else {
      result.exact_max_ratio = RationalString(ebest.ratio);
      result.exact_sound = ebest.ratio <= bound;
      result.exact_attained = ebest.ratio == bound;
      result.max_ratio = ebest.ratio.convert_to<double>();
      result.s1 = inputs[ebest.s1];
      result.s2 = inputs[ebest.s2];
      result.y = FormatOutput(mechanism, ebest.y, d_prime);
    }
  }
  result.log_max_ratio = std::log(result.max_ratio);
  result.slack = result.theoretical_eps - result.log_max_ratio;
  return result;
}

}  // namespace

std::vector<std::vector<KvPair>> AuditInputSets(int d, int ell,
                                                bool include_zero_values) {
  const int cap = std::min(d, std::max(ell, 3));
  std::vector<double> grid = {-1.0, 1.0};
  if (include_zero_values) grid = {-1.0, 0.0, 1.0};
  std::vector<std::vector<KvPair>> out;
  // Key subsets in lexicographic order by size, then every value assignment.
  for (int size = 0; size <= cap; ++size) {
    std::vector<Key> keys(size);
    for (int i = 0; i < size; ++i) keys[i] = i + 1;
    while (true) {
      std::vector<size_t> digit(size, 0);
      while (true) {
        std::vector<KvPair> s;
        for (int i = 0; i < size; ++i) s.push_back({keys[i], grid[digit[i]]});
        out.push_back(std::move(s));
        int i = 0;
        while (i < size && ++digit[i] == grid.size()) digit[i++] = 0;
        if (i == size) break;
      }
      int i = size - 1;
      while (i >= 0 && keys[i] == d - size + i + 1) --i;
      if (i < 0) break;
      ++keys[i];
      for (int j = i + 1; j < size; ++j) keys[j] = keys[j - 1] + 1;
    }
  }
  return out;
}

absl::StatusOr<AuditResult> AuditUe(const BudgetSpec& spec,
                                    const AuditOptions& options) {
  return RunAudit(Mechanism::kUe, spec, options);
}

absl::StatusOr<AuditResult> AuditGrr(const BudgetSpec& spec,
                                     const AuditOptions& options) {
  return RunAudit(Mechanism::kGrr, spec, options);
}

absl::StatusOr<AuditResult> Audit(const BudgetSpec& spec,
                                  const AuditOptions& options) {
  return RunAudit(spec.mechanism, spec, options);
}

}  // namespace kvldp
