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

#include "kvldp/estimation.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace kvldp {
namespace {

// Smallest acceptable det(A) = a (a - b) (2p - 1).
constexpr double kMinDeterminant = 1e-12;

absl::Status CheckDomain(const SupportCounts& counts, int d) {
  if (d < 1 || d > counts.d_prime()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "d = ", d, " incompatible with counts over ", counts.d_prime(), " keys"));
  }
  if (counts.n <= 0) {
    return absl::InvalidArgumentError("counts contain no users");
  }
  return absl::OkStatus();
}

absl::Status CheckKeySeparation(const PerturbProbs& probs) {
  if (!(probs.a > probs.b)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "a (", probs.a, ") must exceed b (", probs.b, ")"));
  }
  return absl::OkStatus();
}

}  // namespace

void SupportCounts::AddUe(const UeReport& report) {
  ++n;
  for (size_t i = 0; i < report.bits.size(); ++i) {
    if (report.bits[i] > 0) ++n1[i];
    if (report.bits[i] < 0) ++n2[i];
  }
}

void SupportCounts::AddGrr(const GrrReport& report) {
  ++n;
  if (report.value > 0) {
    ++n1[report.key - 1];
  } else {
    ++n2[report.key - 1];
  }
}

absl::Status SupportCounts::Merge(const SupportCounts& other) {
  if (other.d_prime() != d_prime()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot merge counts over ", other.d_prime(), " keys into ", d_prime()));
  }
  n += other.n;
  for (int i = 0; i < d_prime(); ++i) {
    n1[i] += other.n1[i];
    n2[i] += other.n2[i];
  }
  return absl::OkStatus();
}

absl::StatusOr<SupportCounts> Aggregate(std::span<const UeReport> reports,
                                        int d_prime) {
  SupportCounts counts(d_prime);
  for (const UeReport& r : reports) {
    if (static_cast<int>(r.bits.size()) != d_prime) {
      return absl::InvalidArgumentError(absl::StrCat(
          "UE report of length ", r.bits.size(), ", expected ", d_prime));
    }
    counts.AddUe(r);
  }
  return counts;
}

absl::StatusOr<SupportCounts> Aggregate(std::span<const GrrReport> reports,
                                        int d_prime) {
  SupportCounts counts(d_prime);
  for (const GrrReport& r : reports) {
    if (r.key < 1 || r.key > d_prime) {
      return absl::InvalidArgumentError(
          absl::StrCat("GRR report key ", r.key, " outside 1..", d_prime));
    }
    counts.AddGrr(r);
  }
  return counts;
}

absl::StatusOr<SupportCounts> Aggregate(std::span<const Report> reports,
                                        int d_prime) {
  SupportCounts counts(d_prime);
  if (reports.empty()) return counts;
  const size_t kind = reports.front().index();
  for (const Report& r : reports) {
    if (r.index() != kind) {
      return absl::InvalidArgumentError("reports mix UE and GRR outputs");
    }
    if (const auto* ue = std::get_if<UeReport>(&r)) {
      if (static_cast<int>(ue->bits.size()) != d_prime) {
        return absl::InvalidArgumentError(absl::StrCat(
            "UE report of length ", ue->bits.size(), ", expected ", d_prime));
      }
      counts.AddUe(*ue);
    } else {
      const GrrReport& grr = std::get<GrrReport>(r);
      if (grr.key < 1 || grr.key > d_prime) {
        return absl::InvalidArgumentError(
            absl::StrCat("GRR report key ", grr.key, " outside 1..", d_prime));
      }
      counts.AddGrr(grr);
    }
  }
  return counts;
}

absl::StatusOr<std::vector<double>> EstimateFrequency(
    const SupportCounts& counts, const PerturbProbs& probs, int ell, int d) {
  if (absl::Status s = CheckDomain(counts, d); !s.ok()) return s;
  if (absl::Status s = CheckKeySeparation(probs); !s.ok()) return s;
  const double n = static_cast<double>(counts.n);
  std::vector<double> f(d);
  for (int k = 0; k < d; ++k) {
    const double observed = static_cast<double>(counts.n1[k] + counts.n2[k]) / n;
    f[k] = (observed - probs.b) / (probs.a - probs.b) * ell;
  }
  return f;
}

absl::StatusOr<std::vector<double>> EstimateMeanBaseline(
    const SupportCounts& counts, const PerturbProbs& probs, int ell, int d) {
  if (absl::Status s = CheckDomain(counts, d); !s.ok()) return s;
  if (absl::Status s = CheckKeySeparation(probs); !s.ok()) return s;
  if (!(probs.p > 0.5)) {
    return absl::InvalidArgumentError(
        absl::StrCat("p must exceed 1/2, got ", probs.p));
  }
  (void)ell;  // cancels between the sum and count estimates
  const auto [a, b, p] = probs;
  const double n = static_cast<double>(counts.n);
  std::vector<double> m(d);
  for (int k = 0; k < d; ++k) {
    const double n1 = static_cast<double>(counts.n1[k]);
    const double n2 = static_cast<double>(counts.n2[k]);
    m[k] = (n1 - n2) * (a - b) / (a * (2 * p - 1) * (n1 + n2 - n * b));
  }
  return m;
}

absl::StatusOr<CalibratedCounts> CalibrateCounts(double n1, double n2,
                                                 const PerturbProbs& probs,
                                                 double n) {
  const auto [a, b, p] = probs;
  const double det = a * (a - b) * (2 * p - 1);
  if (!(det > kMinDeterminant)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "degenerate perturbation parameters: det(A) = ", det));
  }
  const double diag = a * p - b / 2;
  const double off = a * (1 - p) - b / 2;
  const double r1 = n1 - n * b / 2;
  const double r2 = n2 - n * b / 2;
  return CalibratedCounts{(diag * r1 - off * r2) / det,
                          (diag * r2 - off * r1) / det};
}

absl::StatusOr<std::vector<KeyEstimate>> EstimateCorrected(
    const SupportCounts& counts, const PerturbProbs& probs, int ell, int d) {
  absl::StatusOr<std::vector<double>> f_raw =
      EstimateFrequency(counts, probs, ell, d);
  if (!f_raw.ok()) return f_raw.status();
  absl::StatusOr<std::vector<double>> m_raw =
      EstimateMeanBaseline(counts, probs, ell, d);
  if (!m_raw.ok()) return m_raw.status();

  const double n = static_cast<double>(counts.n);
  std::vector<KeyEstimate> out(d);
  for (int k = 0; k < d; ++k) {
    KeyEstimate& e = out[k];
    e.f_hat_raw = (*f_raw)[k];
    e.m_hat_raw = (*m_raw)[k];
    e.f_hat = std::clamp(e.f_hat_raw, 1.0 / n, 1.0);
    absl::StatusOr<CalibratedCounts> c = CalibrateCounts(
        static_cast<double>(counts.n1[k]), static_cast<double>(counts.n2[k]),
        probs, n);
    if (!c.ok()) return c.status();
    const double cap = n * e.f_hat / ell;
    const double n1 = std::clamp(c->n1, 0.0, cap);
    const double n2 = std::clamp(c->n2, 0.0, cap);
    e.m_hat = ell * (n1 - n2) / (n * e.f_hat);
  }
  return out;
}

void PrivKvCounts::Add(const PrivKvReport& report) {
  ++n;
  const int k = report.index - 1;
  ++sampled[k];
  if (report.key_bit == 1) {
    ++ones[k];
    if (report.value > 0) {
      ++plus[k];
    } else {
      ++minus[k];
    }
  }
}

absl::Status PrivKvCounts::Merge(const PrivKvCounts& other) {
  if (other.sampled.size() != sampled.size()) {
    return absl::InvalidArgumentError("cannot merge baseline counts over different domains");
  }
  n += other.n;
  for (size_t k = 0; k < sampled.size(); ++k) {
    sampled[k] += other.sampled[k];
    ones[k] += other.ones[k];
    plus[k] += other.plus[k];
    minus[k] += other.minus[k];
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<KeyEstimate>> EstimatePrivKv(
    const PrivKvCounts& counts, double eps_total) {
  if (!(eps_total > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be > 0, got ", eps_total));
  }
  if (counts.n <= 0) {
    return absl::InvalidArgumentError("counts contain no users");
  }
  const double keep = RandomizedResponseKeep(eps_total / 2.0);
  const double scale = 2 * keep - 1;
  const double n = static_cast<double>(counts.n);
  const int d = static_cast<int>(counts.sampled.size());
  std::vector<KeyEstimate> out(d);
  for (int k = 0; k < d; ++k) {
    KeyEstimate& e = out[k];
    if (counts.sampled[k] == 0) {
      e.f_hat_raw = std::numeric_limits<double>::quiet_NaN();
      e.m_hat_raw = std::numeric_limits<double>::quiet_NaN();
      e.f_hat = 1.0 / n;
      e.m_hat = 0.0;
      continue;
    }
    const double ones = static_cast<double>(counts.ones[k]);
    const double plus = static_cast<double>(counts.plus[k]);
    const double minus = static_cast<double>(counts.minus[k]);
    e.f_hat_raw =
        (ones / static_cast<double>(counts.sampled[k]) - (1 - keep)) / scale;
    e.f_hat = std::clamp(e.f_hat_raw, 1.0 / n, 1.0);
    if (ones == 0) {
      e.m_hat_raw = std::numeric_limits<double>::quiet_NaN();
      e.m_hat = 0.0;
      continue;
    }
    e.m_hat_raw = (plus - minus) / (scale * ones);
    const double plus_hat = std::clamp((plus - ones * (1 - keep)) / scale, 0.0, ones);
    const double minus_hat = std::clamp((minus - ones * (1 - keep)) / scale, 0.0, ones);
    e.m_hat = (plus_hat - minus_hat) / ones;
  }
  return out;
}

}  // namespace kvldp
