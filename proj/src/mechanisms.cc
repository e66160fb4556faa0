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

#include "kvldp/mechanisms.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace kvldp {
namespace {

constexpr double kProbTolerance = 1e-12;

}  // namespace

absl::Status ValidateProbs(const PerturbProbs& probs) {
  const auto [a, b, p] = probs;
  if (!(a >= 0.5 && a <= 1.0) || !(b >= 0.0 && b <= 0.5) ||
      !(p >= 0.5 && p <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "perturbation probabilities out of range: a=", a, " b=", b, " p=", p));
  }
  return absl::OkStatus();
}

absl::Status ValidateGrrProbs(const PerturbProbs& probs, int d_prime) {
  if (d_prime < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("d_prime must be >= 2, got ", d_prime));
  }
  if (!(probs.a > 0 && probs.a <= 1.0) || !(probs.p >= 0.5 && probs.p <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "perturbation probabilities out of range: a=", probs.a, " p=", probs.p));
  }
  const double expected_b = (1.0 - probs.a) / (d_prime - 1);
  if (std::abs(probs.b - expected_b) > kProbTolerance) {
    return absl::InvalidArgumentError(absl::StrCat(
        "b=", probs.b, " inconsistent with a=", probs.a, " and d'=", d_prime,
        "; expected ", expected_b));
  }
  return absl::OkStatus();
}

UeReport PerturbUe(UserRecord record, const PerturbProbs& probs, int ell,
                   int d, Rng& rng) {
  UeReport report;
  report.bits.assign(d + ell, 0);
  VisitUeReport(record, probs, ell, d, rng, [&report](Key key, int sign) {
    report.bits[key - 1] = static_cast<int8_t>(sign);
  });
  return report;
}

GrrReport PerturbGrrUnchecked(UserRecord record, const PerturbProbs& probs,
                              int ell, int d, Rng& rng) {
  const SampledPair x = PadAndSample(record, ell, d, rng);
  const int d_prime = d + ell;
  const double u = rng.UniformDouble();
  if (u < probs.a * probs.p) return {x.key, x.value};
  if (u < probs.a) return {x.key, -x.value};
  // Uniform over the d' - 1 other keys.
  auto other = static_cast<Key>(rng.UniformInt(1, d_prime - 1));
  if (other >= x.key) ++other;
  return {other, rng.FairSign()};
}

absl::StatusOr<GrrReport> PerturbGrr(UserRecord record,
                                     const PerturbProbs& probs, int ell, int d,
                                     Rng& rng) {
  if (absl::Status s = ValidateGrrProbs(probs, d + ell); !s.ok()) return s;
  return PerturbGrrUnchecked(record, probs, ell, d, rng);
}

double RandomizedResponseKeep(double eps) { return 1.0 / (1.0 + std::exp(-eps)); }

PrivKvReport PerturbPrivKv(UserRecord record, double eps_total, int d,
                           Rng& rng) {
  const double keep = RandomizedResponseKeep(eps_total / 2.0);
  PrivKvReport report;
  report.index = static_cast<Key>(rng.UniformInt(1, d));
  const auto it = std::lower_bound(
      record.begin(), record.end(), report.index,
      [](const KvPair& kv, Key k) { return kv.key < k; });
  const bool held = it != record.end() && it->key == report.index;
  const bool keep_bit = rng.Bernoulli(keep);
  report.key_bit = (held == keep_bit) ? 1 : 0;
  if (report.key_bit == 0) {
    report.value = 0;
    return report;
  }
  // A fake pair carries value 0, which discretizes to a fair sign.
  const double raw = held ? it->value : 0.0;
  const int discretized = rng.Bernoulli((1.0 + raw) / 2.0) ? 1 : -1;
  report.value = rng.Bernoulli(keep) ? discretized : -discretized;
  return report;
}

int64_t EncodeUeOutput(const UeReport& y) {
  int64_t code = 0;
  for (auto it = y.bits.rbegin(); it != y.bits.rend(); ++it) {
    const int digit = *it == 0 ? 0 : (*it > 0 ? 1 : 2);
    code = code * 3 + digit;
  }
  return code;
}

UeReport DecodeUeOutput(int64_t code, int d_prime) {
  UeReport y;
  y.bits.resize(d_prime);
  for (int i = 0; i < d_prime; ++i) {
    const int digit = static_cast<int>(code % 3);
    y.bits[i] = static_cast<int8_t>(digit == 0 ? 0 : (digit == 1 ? 1 : -1));
    code /= 3;
  }
  return y;
}

absl::StatusOr<std::vector<double>> OutputDistributionUe(
    UserRecord record, const PerturbProbs& probs, int ell, int d) {
  const int d_prime = d + ell;
  if (d_prime > kMaxEnumerableUeDomain) {
    return absl::InvalidArgumentError(absl::StrCat(
        "d' = ", d_prime, " too large to enumerate (max ",
        kMaxEnumerableUeDomain, ")"));
  }
  const auto [a, b, p] = probs;
  const int size = static_cast<int>(record.size());
  const double eta = RealPairRate(size, ell);

  // Pr(y | S) = sum_k w_k * Pr(y[k] | sampled k) * prod_{i != k} Pr(y[i] | 0),
  // with w_k the sampling weight of key k and raw value v_k.
  std::vector<std::pair<Key, double>> weights;  // (key, weight)
  std::vector<double> raw;
  for (const KvPair& kv : record) {
    weights.emplace_back(kv.key, eta / size);
    raw.push_back(kv.value);
  }
  if (eta < 1.0) {
    for (int j = 1; j <= ell; ++j) {
      weights.emplace_back(d + j, (1.0 - eta) / ell);
      raw.push_back(0.0);
    }
  }

  int64_t outputs = 1;
  for (int i = 0; i < d_prime; ++i) outputs *= 3;
  std::vector<double> dist(outputs, 0.0);
  std::vector<int8_t> bits(d_prime);
  for (int64_t code = 0; code < outputs; ++code) {
    int64_t c = code;
    for (int i = 0; i < d_prime; ++i) {
      const int digit = static_cast<int>(c % 3);
      bits[i] = static_cast<int8_t>(digit == 0 ? 0 : (digit == 1 ? 1 : -1));
      c /= 3;
    }
    double total = 0.0;
    for (size_t s = 0; s < weights.size(); ++s) {
      const Key k = weights[s].first;
      double prob = weights[s].second;
      for (int i = 0; i < d_prime && prob > 0; ++i) {
        const int bit = bits[i];
        if (i + 1 == k) {
          const double up = (1.0 + (2.0 * p - 1.0) * raw[s]) / 2.0;
          prob *= bit == 0 ? 1.0 - a : (bit > 0 ? a * up : a * (1.0 - up));
        } else {
          prob *= bit == 0 ? 1.0 - b : b / 2.0;
        }
      }
      total += prob;
    }
    dist[code] = total;
  }
  return dist;
}

int64_t EncodeGrrOutput(const GrrReport& y) {
  return 2 * static_cast<int64_t>(y.key - 1) + (y.value > 0 ? 0 : 1);
}

GrrReport DecodeGrrOutput(int64_t code) {
  return {static_cast<Key>(code / 2 + 1), code % 2 == 0 ? 1 : -1};
}

absl::StatusOr<std::vector<double>> OutputDistributionGrr(
    UserRecord record, const PerturbProbs& probs, int ell, int d) {
  const int d_prime = d + ell;
  if (d_prime < 2) {
    return absl::InvalidArgumentError("d' must be >= 2");
  }
  const auto [a, b, p] = probs;
  const int size = static_cast<int>(record.size());
  const double eta = RealPairRate(size, ell);

  // Every sampled key contributes b/2 to each output on another key; the
  // sampled key's own two outputs get the kept-key mass instead.
  std::vector<double> dist(2 * static_cast<size_t>(d_prime), b / 2.0);
  auto place = [&](Key k, double weight, double raw) {
    const double up = (1.0 + (2.0 * p - 1.0) * raw) / 2.0;
    dist[EncodeGrrOutput({k, 1})] += weight * (a * up - b / 2.0);
    dist[EncodeGrrOutput({k, -1})] += weight * (a * (1.0 - up) - b / 2.0);
  };
  for (const KvPair& kv : record) place(kv.key, eta / size, kv.value);
  if (eta < 1.0) {
    for (int j = 1; j <= ell; ++j) place(d + j, (1.0 - eta) / ell, 0.0);
  }
  return dist;
}

std::string FormatReport(const UeReport& r) {
  std::string s(r.bits.size(), '0');
  for (size_t i = 0; i < r.bits.size(); ++i) {
    if (r.bits[i] > 0) s[i] = '+';
    if (r.bits[i] < 0) s[i] = '-';
  }
  return s;
}

std::string FormatReport(const GrrReport& r) {
  return absl::StrCat(r.key, ",", r.value);
}

std::string FormatReport(const PrivKvReport& r) {
  return absl::StrCat(r.index, ",", r.key_bit, ",", r.value);
}

absl::StatusOr<UeReport> ParseUeReport(std::string_view line) {
  UeReport r;
  r.bits.reserve(line.size());
  for (char c : line) {
    switch (c) {
      case '+':
        r.bits.push_back(1);
        break;
      case '-':
        r.bits.push_back(-1);
        break;
      case '0':
        r.bits.push_back(0);
        break;
      default:
        return absl::InvalidArgumentError(
            absl::StrCat("invalid UE symbol '", std::string(1, c), "'"));
    }
  }
  if (r.bits.empty()) return absl::InvalidArgumentError("empty UE report");
  return r;
}

namespace {

absl::StatusOr<std::vector<int>> ParseInts(std::string_view text, size_t count) {
  const absl::string_view line(text.data(), text.size());
  std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
  if (fields.size() != count) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected ", count, " comma-separated fields in '", line, "'"));
  }
  std::vector<int> out;
  for (absl::string_view f : fields) {
    int v = 0;
    if (!absl::SimpleAtoi(f, &v)) {
      return absl::InvalidArgumentError(absl::StrCat("bad integer '", f, "'"));
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

absl::StatusOr<GrrReport> ParseGrrReport(std::string_view line) {
  absl::StatusOr<std::vector<int>> f = ParseInts(line, 2);
  if (!f.ok()) return f.status();
  if ((*f)[0] < 1 || ((*f)[1] != 1 && (*f)[1] != -1)) {
    return absl::InvalidArgumentError(absl::StrCat("invalid GRR report '", std::string(line), "'"));
  }
  return GrrReport{(*f)[0], (*f)[1]};
}

absl::StatusOr<PrivKvReport> ParsePrivKvReport(std::string_view line) {
  absl::StatusOr<std::vector<int>> f = ParseInts(line, 3);
  if (!f.ok()) return f.status();
  const int index = (*f)[0], bit = (*f)[1], value = (*f)[2];
  const bool valid = index >= 1 && (bit == 0 || bit == 1) &&
                     (bit == 0 ? value == 0 : (value == 1 || value == -1));
  if (!valid) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid baseline report '", std::string(line), "'"));
  }
  return PrivKvReport{index, bit, value};
}

}  // namespace kvldp
