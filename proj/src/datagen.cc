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

#include "kvldp/datagen.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <tuple>
#include <unordered_map>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "absl/strings/ascii.h"
#include "kvldp/random.h"

namespace kvldp {
namespace {

constexpr uint64_t kUserStreamTag = 0x5553455253ULL;  // "USERS"
constexpr uint64_t kMeanStreamTag = 0x4d45414e53ULL;  // "MEANS"

absl::Status ValidateConfig(const SynthConfig& cfg) {
  if (cfg.n < 1) {
    return absl::InvalidArgumentError(absl::StrCat("n must be >= 1, got ", cfg.n));
  }
  if (cfg.d < 2) {
    return absl::InvalidArgumentError(absl::StrCat("d must be >= 2, got ", cfg.d));
  }
  if (cfg.pairs_per_user < 1 || cfg.pairs_per_user > cfg.d) {
    return absl::InvalidArgumentError(absl::StrCat(
        "pairs_per_user must be in 1..d, got ", cfg.pairs_per_user));
  }
  if (!(cfg.sigma_key > 0) || !(cfg.sigma_mean > 0)) {
    return absl::InvalidArgumentError("sigma_key and sigma_mean must be > 0");
  }
  if (!(cfg.value_noise >= 0)) {
    return absl::InvalidArgumentError("value_noise must be >= 0");
  }
  return absl::OkStatus();
}

Key DrawKey(const SynthConfig& cfg, Rng& rng) {
  if (cfg.distribution == KeyDistribution::kUniform) {
    return static_cast<Key>(rng.UniformInt(1, cfg.d));
  }
  const int64_t half = cfg.d / 2;
  while (true) {
    const auto r = static_cast<int64_t>(std::round(cfg.sigma_key * rng.Normal()));
    if (cfg.key_mapping == GaussianKeyMapping::kLowerEdge) {
      if (r >= 1 && r <= cfg.d) return static_cast<Key>(r);
    } else {
      if (r >= -half && r <= half - 1) return static_cast<Key>(r + half + 1);
    }
  }
}

double DrawMean(const SynthConfig& cfg, Rng& rng) {
  if (cfg.distribution == KeyDistribution::kUniform) {
    return 2.0 * rng.UniformDouble() - 1.0;
  }
  while (true) {
    const double m = cfg.sigma_mean * rng.Normal();
    if (m >= -1.0 && m <= 1.0) return m;
  }
}

// Orders ids numerically when both parse as integers, otherwise bytewise;
// numeric ids sort before non-numeric ones.
bool IdLess(const std::string& x, const std::string& y) {
  int64_t xi = 0, yi = 0;
  const bool xn = absl::SimpleAtoi(x, &xi);
  const bool yn = absl::SimpleAtoi(y, &yi);
  if (xn && yn) return xi != yi ? xi < yi : x < y;
  if (xn != yn) return xn;
  return x < y;
}

// Assigns dense 0-based codes in IdLess order.
std::vector<int32_t> SortedCodes(const std::vector<std::string>& names,
                                 std::vector<std::string>& sorted_names) {
  std::vector<int32_t> order(names.size());
  for (size_t i = 0; i < names.size(); ++i) order[i] = static_cast<int32_t>(i);
  std::sort(order.begin(), order.end(), [&](int32_t x, int32_t y) {
    return IdLess(names[x], names[y]);
  });
  std::vector<int32_t> code(names.size());
  sorted_names.clear();
  sorted_names.reserve(names.size());
  for (size_t rank = 0; rank < order.size(); ++rank) {
    code[order[rank]] = static_cast<int32_t>(rank);
    sorted_names.push_back(names[order[rank]]);
  }
  return code;
}

}  // namespace

absl::StatusOr<SyntheticData> GenerateSynthetic(const SynthConfig& cfg) {
  if (absl::Status s = ValidateConfig(cfg); !s.ok()) return s;

  std::vector<double> key_means(cfg.d);
  const uint64_t mean_seed = DeriveSeed(cfg.seed, kMeanStreamTag);
  for (int k = 0; k < cfg.d; ++k) {
    Rng rng(mean_seed, static_cast<uint64_t>(k));
    key_means[k] = DrawMean(cfg, rng);
  }

  const uint64_t user_seed = DeriveSeed(cfg.seed, kUserStreamTag);
  std::vector<std::vector<KvPair>> users(cfg.n);
  for (int64_t u = 0; u < cfg.n; ++u) {
    Rng rng(user_seed, static_cast<uint64_t>(u));
    auto& record = users[u];
    record.reserve(cfg.pairs_per_user);
    while (static_cast<int>(record.size()) < cfg.pairs_per_user) {
      const Key key = DrawKey(cfg, rng);
      const bool held = std::any_of(record.begin(), record.end(),
                                    [key](const KvPair& kv) { return kv.key == key; });
      if (held) continue;
      double value = key_means[key - 1];
      if (cfg.value_noise > 0) {
        value += cfg.value_noise * (2.0 * rng.UniformDouble() - 1.0);
        value = std::clamp(value, -1.0, 1.0);
      }
      record.push_back({key, value});
    }
  }

  absl::StatusOr<Dataset> data = Dataset::Create(cfg.d, users);
  if (!data.ok()) return data.status();
  TrueStats truth = ComputeTrueStats(*data);
  return SyntheticData{*std::move(data), std::move(truth), std::move(key_means)};
}

absl::StatusOr<LoadedDataset> ParseRatingsCsv(std::istream& in,
                                              double rating_min,
                                              double rating_max) {
  if (!(rating_min < rating_max)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "rating_min (", rating_min, ") must be < rating_max (", rating_max, ")"));
  }
  std::unordered_map<std::string, int32_t> user_ids, key_ids;
  std::vector<std::string> user_names, key_names;
  struct Row {
    int32_t user;
    int32_t key;
    double value;
  };
  std::vector<Row> rows;

  auto intern = [](std::unordered_map<std::string, int32_t>& ids,
                   std::vector<std::string>& names, absl::string_view id) {
    auto [it, inserted] =
        ids.try_emplace(std::string(id), static_cast<int32_t>(names.size()));
    if (inserted) names.emplace_back(id);
    return it->second;
  };

  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view view = absl::StripAsciiWhitespace(line);
    if (view.empty()) continue;
    std::vector<absl::string_view> fields = absl::StrSplit(view, ',');
    if (fields.size() != 3) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_no, ": expected 3 fields user_id,key,value, got ",
          fields.size()));
    }
    const absl::string_view user = absl::StripAsciiWhitespace(fields[0]);
    const absl::string_view key = absl::StripAsciiWhitespace(fields[1]);
    double rating = 0;
    if (user.empty() || key.empty() ||
        !absl::SimpleAtod(absl::StripAsciiWhitespace(fields[2]), &rating) ||
        !std::isfinite(rating)) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": cannot parse '", view, "'"));
    }
    if (rating < rating_min || rating > rating_max) {
      return absl::OutOfRangeError(absl::StrCat(
          "line ", line_no, ": value ", rating, " outside [", rating_min, ", ",
          rating_max, "]"));
    }
    const double value =
        2.0 * (rating - rating_min) / (rating_max - rating_min) - 1.0;
    rows.push_back({intern(user_ids, user_names, user),
                    intern(key_ids, key_names, key), std::clamp(value, -1.0, 1.0)});
  }
  if (rows.empty()) {
    return absl::InvalidArgumentError("no rows in input");
  }

  std::vector<std::string> sorted_users, sorted_keys;
  const std::vector<int32_t> user_code = SortedCodes(user_names, sorted_users);
  const std::vector<int32_t> key_code = SortedCodes(key_names, sorted_keys);
  for (Row& r : rows) {
    r.user = user_code[r.user];
    r.key = key_code[r.key];
  }
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    return std::tie(x.user, x.key) < std::tie(y.user, y.key);
  });

  std::vector<std::vector<KvPair>> users(user_names.size());
  for (size_t i = 0; i < rows.size();) {
    size_t j = i;
    double sum = 0;
    while (j < rows.size() && rows[j].user == rows[i].user &&
           rows[j].key == rows[i].key) {
      sum += rows[j].value;
      ++j;
    }
    users[rows[i].user].push_back(
        {rows[i].key + 1, sum / static_cast<double>(j - i)});
    i = j;
  }
  absl::StatusOr<Dataset> data =
      Dataset::Create(static_cast<int>(key_names.size()), users);
  if (!data.ok()) return data.status();
  return LoadedDataset{*std::move(data), std::move(sorted_keys),
                       std::move(sorted_users)};
}

absl::StatusOr<LoadedDataset> LoadRatingsCsv(const std::string& path,
                                             double rating_min,
                                             double rating_max) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open ", path));
  }
  return ParseRatingsCsv(in, rating_min, rating_max);
}

void WriteDatasetCsv(const Dataset& data, std::ostream& out) {
  for (int64_t u = 0; u < data.n(); ++u) {
    for (const KvPair& kv : data.user(u)) {
      char buf[32];
      const char* end = std::to_chars(buf, buf + sizeof(buf), kv.value).ptr;
      out << (u + 1) << ',' << kv.key << ',' << std::string_view(buf, end - buf)
          << '\n';
    }
  }
}

}  // namespace kvldp
