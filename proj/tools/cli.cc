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

#include "cli.h"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "kvldp/datagen.h"
#include "kvldp/estimation.h"
#include "kvldp/mechanisms.h"
#include "kvldp/random.h"

namespace kvldp::cli {
namespace {

using nlohmann::json;

struct GlobalOptions {
  uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  int threads = 0;
};

// Where a command reads its users from: a ratings CSV or the generator.
struct DataOptions {
  std::string input;
  double rating_min = -1.0;
  double rating_max = 1.0;
  int64_t n = 1'000'000;
  int d = 100;
  std::string distribution = "uniform";
  std::string key_mapping = "lower-edge";
  double sigma_key = 50.0;
  double sigma_mean = 1.0;
  int pairs_per_user = 1;
  double value_noise = 0.0;
  std::optional<uint64_t> data_seed;
};

struct LoadedData {
  std::optional<Dataset> data;
  TrueStats truth;
};

struct BudgetOptions {
  std::string mechanism = "ue";
  std::string strategy = "optimized";
  double eps = 1.0;
  int ell = 1;
  double eps_key = 0;
  double eps_value = 0;
};

void AddDataOptions(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("--input", o.input, "ratings CSV (user_id,key,value)");
  cmd->add_option("--rating-min", o.rating_min, "lowest rating on the scale");
  cmd->add_option("--rating-max", o.rating_max, "highest rating on the scale");
  cmd->add_option("--n", o.n, "synthetic user count");
  cmd->add_option("--d", o.d, "synthetic domain size");
  cmd->add_option("--distribution", o.distribution)
      ->check(CLI::IsMember({"uniform", "gaussian"}));
  cmd->add_option("--key-mapping", o.key_mapping)
      ->check(CLI::IsMember({"lower-edge", "centered"}));
  cmd->add_option("--sigma-key", o.sigma_key);
  cmd->add_option("--sigma-mean", o.sigma_mean);
  cmd->add_option("--pairs-per-user", o.pairs_per_user);
  cmd->add_option("--value-noise", o.value_noise);
  cmd->add_option("--data-seed", o.data_seed,
                  "generator seed (defaults to --seed)");
}

void AddBudgetOptions(CLI::App* cmd, BudgetOptions& o) {
  cmd->add_option("--mechanism", o.mechanism);
  cmd->add_option("--strategy", o.strategy)
      ->check(CLI::IsMember({"optimized", "naive", "non_optimized",
                             "non-optimized", "manual"}));
  cmd->add_option("--eps", o.eps, "total privacy budget");
  cmd->add_option("--ell", o.ell, "padding length");
  cmd->add_option("--eps-key", o.eps_key, "key budget (manual strategy)");
  cmd->add_option("--eps-value", o.eps_value, "value budget (manual strategy)");
}

SynthConfig ToSynthConfig(const DataOptions& o, uint64_t seed) {
  SynthConfig cfg;
  cfg.n = o.n;
  cfg.d = o.d;
  cfg.distribution = o.distribution == "gaussian" ? KeyDistribution::kGaussian
                                                  : KeyDistribution::kUniform;
  cfg.key_mapping = o.key_mapping == "centered"
                        ? GaussianKeyMapping::kCentered
                        : GaussianKeyMapping::kLowerEdge;
  cfg.sigma_key = o.sigma_key;
  cfg.sigma_mean = o.sigma_mean;
  cfg.pairs_per_user = o.pairs_per_user;
  cfg.value_noise = o.value_noise;
  cfg.seed = o.data_seed.value_or(seed);
  return cfg;
}

absl::StatusOr<LoadedData> LoadData(const DataOptions& o, uint64_t seed) {
  LoadedData loaded;
  if (!o.input.empty()) {
    absl::StatusOr<LoadedDataset> csv =
        LoadRatingsCsv(o.input, o.rating_min, o.rating_max);
    if (!csv.ok()) return csv.status();
    loaded.truth = ComputeTrueStats(csv->data);
    loaded.data.emplace(std::move(csv->data));
    return loaded;
  }
  absl::StatusOr<SyntheticData> synth =
      GenerateSynthetic(ToSynthConfig(o, seed));
  if (!synth.ok()) return synth.status();
  loaded.truth = std::move(synth->truth);
  loaded.data.emplace(std::move(synth->data));
  return loaded;
}

absl::StatusOr<BudgetSpec> ResolveBudget(const BudgetOptions& o, int d) {
  absl::StatusOr<Mechanism> mechanism = ParseMechanism(o.mechanism);
  if (!mechanism.ok()) return mechanism.status();
  absl::StatusOr<AllocationStrategy> strategy = ParseStrategy(o.strategy);
  if (!strategy.ok()) return strategy.status();
  if (*strategy == AllocationStrategy::kManual) {
    return ManualBudget(*mechanism, o.eps_key, o.eps_value, o.ell, d);
  }
  return PlanBudget(*mechanism, *strategy, o.eps, o.ell, d);
}

json Optional(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json PairsJson(const std::vector<KvPair>& pairs) {
  json arr = json::array();
  for (const KvPair& kv : pairs) arr.push_back({kv.key, kv.value});
  return arr;
}

std::string CsvNumber(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::string CsvNumber(const std::optional<double>& v) {
  return v ? CsvNumber(*v) : "";
}

void WriteJson(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

// --- commands ---

absl::Status CmdGen(const GlobalOptions& g, const DataOptions& o,
                    std::ostream& out) {
  absl::StatusOr<SyntheticData> synth =
      GenerateSynthetic(ToSynthConfig(o, g.seed));
  if (!synth.ok()) return synth.status();
  WriteDatasetCsv(synth->data, out);
  return absl::OkStatus();
}

absl::Status CmdStats(const GlobalOptions& g, const DataOptions& o,
                      std::ostream& out) {
  absl::StatusOr<LoadedData> loaded = LoadData(o, g.seed);
  if (!loaded.ok()) return loaded.status();
  const Dataset& data = *loaded->data;
  const TrueStats& truth = loaded->truth;
  if (g.format == "csv") {
    out << "key,f_true,m_true\n";
    for (int k = 0; k < truth.d(); ++k) {
      out << k + 1 << ',' << CsvNumber(truth.freq[k]) << ','
          << CsvNumber(truth.mean[k]) << '\n';
    }
    return absl::OkStatus();
  }
  json keys = json::array();
  for (int k = 0; k < truth.d(); ++k) {
    keys.push_back({{"key", k + 1},
                    {"f_true", truth.freq[k]},
                    {"m_true", Optional(truth.mean[k])}});
  }
  WriteJson(out, {{"n", data.n()},
                  {"d", data.d()},
                  {"total_pairs", data.total_pairs()},
                  {"max_record_size", data.max_record_size()},
                  {"keys", keys}});
  return absl::OkStatus();
}

absl::Status CmdAllocate(const GlobalOptions& g, const BudgetOptions& b,
                         int domain, std::ostream& out) {
  absl::StatusOr<BudgetSpec> spec = ResolveBudget(b, domain);
  if (!spec.ok()) return spec.status();
  absl::StatusOr<PerturbProbs> probs = ProbsFor(*spec);
  if (!probs.ok()) return probs.status();
  const json j = ToJson(*spec, *probs);
  if (g.format == "csv") {
    out << "mechanism,strategy,eps,eps_key,eps_value,ell,d,d_prime,a,b,p\n"
        << MechanismName(spec->mechanism) << ','
        << StrategyName(spec->strategy) << ',' << CsvNumber(spec->eps_total)
        << ',' << CsvNumber(spec->eps_key) << ','
        << CsvNumber(spec->eps_value) << ',' << spec->ell << ',' << spec->d
        << ',' << spec->d_prime << ',' << CsvNumber(probs->a) << ','
        << CsvNumber(probs->b) << ',' << CsvNumber(probs->p) << '\n';
    return absl::OkStatus();
  }
  WriteJson(out, j);
  return absl::OkStatus();
}

absl::Status CmdAudit(const BudgetOptions& b, int d, const AuditOptions& opts,
                      std::ostream& out) {
  absl::StatusOr<BudgetSpec> spec = ResolveBudget(b, d);
  if (!spec.ok()) return spec.status();
  absl::StatusOr<AuditResult> result = Audit(*spec, opts);
  if (!result.ok()) return result.status();
  json j = ToJson(*result);
  j["mechanism"] = MechanismName(spec->mechanism);
  j["d"] = d;
  j["ell"] = spec->ell;
  j["eps_key"] = spec->eps_key;
  j["eps_value"] = spec->eps_value;
  WriteJson(out, j);
  return absl::OkStatus();
}

absl::Status CmdScan(const GlobalOptions& g, double eps, double m2, int grid,
                     std::ostream& out) {
  absl::StatusOr<ObjectiveScan> scan = AllocationObjectiveScan(eps, m2, grid);
  if (!scan.ok()) return scan.status();
  if (g.format == "csv") {
    out << "theta,phi,g,h\n";
    for (const AllocationObjective& p : scan->curve) {
      out << CsvNumber(p.theta) << ',' << CsvNumber(p.phi) << ','
          << CsvNumber(p.g) << ',' << CsvNumber(p.h) << '\n';
    }
    return absl::OkStatus();
  }
  auto point = [](const AllocationObjective& p) {
    return json{{"theta", p.theta}, {"phi", p.phi}, {"g", p.g}, {"h", p.h}};
  };
  json curve = json::array();
  for (const AllocationObjective& p : scan->curve) curve.push_back(point(p));
  WriteJson(out, {{"eps", eps},
                  {"m_star_sq", m2},
                  {"grid_size", grid},
                  {"theta0", scan->theta0},
                  {"at_theta0", point(scan->at_theta0)},
                  {"argmin", point(scan->argmin)},
                  {"curve", curve}});
  return absl::OkStatus();
}

absl::Status CmdPredict(const GlobalOptions& g, const BudgetOptions& b, int d,
                        int64_t n, const std::vector<double>& f_list,
                        double m, std::ostream& out) {
  absl::StatusOr<BudgetSpec> spec = ResolveBudget(b, d);
  if (!spec.ok()) return spec.status();
  absl::StatusOr<PerturbProbs> probs = ProbsFor(*spec);
  if (!probs.ok()) return probs.status();
  std::vector<ErrorPrediction> rows;
  for (double f : f_list) {
    absl::StatusOr<ErrorPrediction> p =
        PredictErrors(*probs, spec->ell, n, f, m);
    if (!p.ok()) return p.status();
    rows.push_back(*p);
  }
  if (g.format == "csv") {
    out << "f_star,m_star,var_f,e_m_approx,var_m_approx,delta,gamma,mu,g,h,"
           "mse_f_approx,mse_m_approx\n";
    for (size_t i = 0; i < rows.size(); ++i) {
      const ErrorPrediction& p = rows[i];
      out << CsvNumber(f_list[i]) << ',' << CsvNumber(m) << ','
          << CsvNumber(p.var_f) << ',' << CsvNumber(p.e_m_approx) << ','
          << CsvNumber(p.var_m_approx) << ',' << CsvNumber(p.delta) << ','
          << CsvNumber(p.gamma) << ',' << CsvNumber(p.mu) << ','
          << CsvNumber(p.g) << ',' << CsvNumber(p.h) << ','
          << CsvNumber(p.mse_f_approx) << ',' << CsvNumber(p.mse_m_approx)
          << '\n';
    }
    return absl::OkStatus();
  }
  json arr = json::array();
  for (size_t i = 0; i < rows.size(); ++i) {
    json j = ToJson(rows[i]);
    j["f_star"] = f_list[i];
    j["m_star"] = m;
    arr.push_back(j);
  }
  WriteJson(out, {{"budget", ToJson(*spec, *probs)},
                  {"n", n},
                  {"predictions", arr}});
  return absl::OkStatus();
}

struct RunOptions {
  std::string mechanism = "pckv-ue";
  std::string strategy = "optimized";
  double eps = 1.0;
  std::optional<int> ell;
  double eps_key = 0;
  double eps_value = 0;
  int repeats = 1;
  std::optional<int> top_n;
  std::string preset;
  bool per_key = false;
};

absl::StatusOr<ExperimentConfig> ToExperimentConfig(const GlobalOptions& g,
                                                    const RunOptions& r) {
  ExperimentConfig cfg;
  absl::StatusOr<Protocol> protocol = ParseProtocol(r.mechanism);
  if (!protocol.ok()) return protocol.status();
  absl::StatusOr<AllocationStrategy> strategy = ParseStrategy(r.strategy);
  if (!strategy.ok()) return strategy.status();
  cfg.protocol = *protocol;
  cfg.strategy = *strategy;
  cfg.eps = r.eps;
  cfg.ell = 1;
  if (!r.preset.empty()) {
    absl::StatusOr<DatasetPreset> preset = FindPreset(r.preset);
    if (!preset.ok()) return preset.status();
    cfg.ell = preset->ell;
  }
  if (r.ell) cfg.ell = *r.ell;
  cfg.eps_key = r.eps_key;
  cfg.eps_value = r.eps_value;
  cfg.repeats = r.repeats;
  cfg.top_n = r.top_n;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  return cfg;
}

absl::Status CmdRun(const GlobalOptions& g, const DataOptions& o,
                    const RunOptions& r, std::ostream& out) {
  absl::StatusOr<ExperimentConfig> cfg = ToExperimentConfig(g, r);
  if (!cfg.ok()) return cfg.status();
  absl::StatusOr<LoadedData> loaded = LoadData(o, g.seed);
  if (!loaded.ok()) return loaded.status();
  absl::StatusOr<MetricsReport> report =
      RunExperiment(*loaded->data, loaded->truth, *cfg);
  if (!report.ok()) return report.status();
  if (g.format == "csv") {
    out << "key,f_true,m_true,f_hat,m_hat,f_hat_raw,m_hat_raw,pred_var_f,"
           "pred_mse_m_approx\n";
    for (const KeyMetrics& k : report->keys) {
      out << k.key << ',' << CsvNumber(k.f_true) << ',' << CsvNumber(k.m_true)
          << ',' << CsvNumber(k.f_hat) << ',' << CsvNumber(k.m_hat) << ','
          << CsvNumber(k.f_hat_raw) << ',' << CsvNumber(k.m_hat_raw) << ','
          << CsvNumber(k.pred_var_f) << ',' << CsvNumber(k.pred_mse_m_approx)
          << '\n';
    }
    return absl::OkStatus();
  }
  WriteJson(out, ToJson(*report, r.per_key));
  return absl::OkStatus();
}

absl::Status CmdCompare(const GlobalOptions& g, const DataOptions& o,
                        const RunOptions& r, const std::vector<double>& eps,
                        std::ostream& out) {
  absl::StatusOr<ExperimentConfig> cfg = ToExperimentConfig(g, r);
  if (!cfg.ok()) return cfg.status();
  absl::StatusOr<LoadedData> loaded = LoadData(o, g.seed);
  if (!loaded.ok()) return loaded.status();
  absl::StatusOr<std::vector<AllocationRow>> rows =
      CompareAllocations(*loaded->data, loaded->truth, eps, *cfg);
  if (!rows.ok()) return rows.status();
  if (g.format == "csv") {
    out << "eps,strategy,mse_freq,mse_mean\n";
    for (const AllocationRow& row : *rows) {
      out << CsvNumber(row.eps) << ',' << StrategyName(row.strategy) << ','
          << CsvNumber(row.mse_freq) << ',' << CsvNumber(row.mse_mean) << '\n';
    }
    return absl::OkStatus();
  }
  json arr = json::array();
  for (const AllocationRow& row : *rows) {
    arr.push_back({{"eps", row.eps},
                   {"strategy", StrategyName(row.strategy)},
                   {"mse_freq", row.mse_freq},
                   {"mse_mean", row.mse_mean}});
  }
  WriteJson(out, {{"mechanism", ProtocolName(cfg->protocol)},
                  {"ell", cfg->ell},
                  {"repeats", cfg->repeats},
                  {"rows", arr}});
  return absl::OkStatus();
}

absl::Status CmdPerturb(const GlobalOptions& g, const DataOptions& o,
                        const RunOptions& r, std::ostream& out) {
  absl::StatusOr<ExperimentConfig> cfg = ToExperimentConfig(g, r);
  if (!cfg.ok()) return cfg.status();
  absl::StatusOr<LoadedData> loaded = LoadData(o, g.seed);
  if (!loaded.ok()) return loaded.status();
  const Dataset& data = *loaded->data;
  const uint64_t seed = RepeatSeed(cfg->seed, 0);
  if (cfg->protocol == Protocol::kPrivKv) {
    if (!(cfg->eps > 0)) return absl::InvalidArgumentError("eps must be > 0");
    for (int64_t u = 0; u < data.n(); ++u) {
      Rng rng(seed, static_cast<uint64_t>(u));
      out << FormatReport(PerturbPrivKv(data.user(u), cfg->eps, data.d(), rng))
          << '\n';
    }
    return absl::OkStatus();
  }
  absl::StatusOr<BudgetSpec> spec = ExperimentBudget(*cfg, data.d());
  if (!spec.ok()) return spec.status();
  absl::StatusOr<PerturbProbs> probs = ProbsFor(*spec);
  if (!probs.ok()) return probs.status();
  for (int64_t u = 0; u < data.n(); ++u) {
    Rng rng(seed, static_cast<uint64_t>(u));
    if (spec->mechanism == Mechanism::kUe) {
      out << FormatReport(PerturbUe(data.user(u), *probs, spec->ell, data.d(), rng))
          << '\n';
    } else {
      absl::StatusOr<GrrReport> rep =
          PerturbGrr(data.user(u), *probs, spec->ell, data.d(), rng);
      if (!rep.ok()) return rep.status();
      out << FormatReport(*rep) << '\n';
    }
  }
  return absl::OkStatus();
}

absl::Status CmdEstimate(const GlobalOptions& g, const RunOptions& r, int d,
                         const std::string& reports, bool diagnostics,
                         std::ostream& out) {
  absl::StatusOr<ExperimentConfig> cfg = ToExperimentConfig(g, r);
  if (!cfg.ok()) return cfg.status();
  std::ifstream in(reports);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", reports));
  std::vector<KeyEstimate> est;
  std::optional<SupportCounts> counts;
  std::string line;
  int64_t line_no = 0;
  if (cfg->protocol == Protocol::kPrivKv) {
    PrivKvCounts pk(d);
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      absl::StatusOr<PrivKvReport> rep = ParsePrivKvReport(line);
      if (!rep.ok() || rep->index > d) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", line_no, ": invalid report"));
      }
      pk.Add(*rep);
    }
    absl::StatusOr<std::vector<KeyEstimate>> e = EstimatePrivKv(pk, cfg->eps);
    if (!e.ok()) return e.status();
    est = *std::move(e);
  } else {
    absl::StatusOr<BudgetSpec> spec = ExperimentBudget(*cfg, d);
    if (!spec.ok()) return spec.status();
    absl::StatusOr<PerturbProbs> probs = ProbsFor(*spec);
    if (!probs.ok()) return probs.status();
    counts.emplace(spec->d_prime);
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      if (spec->mechanism == Mechanism::kUe) {
        absl::StatusOr<UeReport> rep = ParseUeReport(line);
        if (!rep.ok() || static_cast<int>(rep->bits.size()) != spec->d_prime) {
          return absl::InvalidArgumentError(
              absl::StrCat("line ", line_no, ": invalid UE report"));
        }
        counts->AddUe(*rep);
      } else {
        absl::StatusOr<GrrReport> rep = ParseGrrReport(line);
        if (!rep.ok() || rep->key > spec->d_prime) {
          return absl::InvalidArgumentError(
              absl::StrCat("line ", line_no, ": invalid GRR report"));
        }
        counts->AddGrr(*rep);
      }
    }
    absl::StatusOr<std::vector<KeyEstimate>> e =
        EstimateCorrected(*counts, *probs, spec->ell, d);
    if (!e.ok()) return e.status();
    est = *std::move(e);
  }
  if (g.format == "csv") {
    out << "key,f_hat,m_hat,f_hat_raw,m_hat_raw\n";
    for (int k = 0; k < d; ++k) {
      out << k + 1 << ',' << CsvNumber(est[k].f_hat) << ','
          << CsvNumber(est[k].m_hat) << ',' << CsvNumber(est[k].f_hat_raw)
          << ',' << CsvNumber(est[k].m_hat_raw) << '\n';
    }
    return absl::OkStatus();
  }
  json keys = json::array();
  for (int k = 0; k < d; ++k) {
    keys.push_back({{"key", k + 1},
                    {"f_hat", est[k].f_hat},
                    {"m_hat", est[k].m_hat},
                    {"f_hat_raw", est[k].f_hat_raw},
                    {"m_hat_raw", est[k].m_hat_raw}});
  }
  json j = {{"mechanism", ProtocolName(cfg->protocol)}, {"keys", keys}};
  if (diagnostics && counts) {
    json dummies = json::array();
    for (int i = d; i < counts->d_prime(); ++i) {
      dummies.push_back(
          {{"key", i + 1}, {"n1", counts->n1[i]}, {"n2", counts->n2[i]}});
    }
    j["n"] = counts->n;
    j["dummy_counts"] = dummies;
  }
  WriteJson(out, j);
  return absl::OkStatus();
}

void WriteError(std::ostream& err, const std::string& code,
                const std::string& message) {
  err << json{{"error", {{"code", code}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

json ToJson(const BudgetSpec& spec, const PerturbProbs& probs) {
  return {{"mechanism", MechanismName(spec.mechanism)},
          {"strategy", StrategyName(spec.strategy)},
          {"eps", spec.eps_total},
          {"eps_key", spec.eps_key},
          {"eps_value", spec.eps_value},
          {"ell", spec.ell},
          {"d", spec.d},
          {"d_prime", spec.d_prime},
          {"a", probs.a},
          {"b", probs.b},
          {"p", probs.p}};
}

json ToJson(const AuditResult& r) {
  json j = {{"max_ratio", r.max_ratio},
            {"log_max_ratio", r.log_max_ratio},
            {"theoretical_eps", r.theoretical_eps},
            {"slack", r.slack},
            {"sound", r.sound()},
            {"attained", r.attained()},
            {"achieved_at",
             {{"s1", PairsJson(r.s1)}, {"s2", PairsJson(r.s2)}, {"y", r.y}}},
            {"inputs", r.inputs},
            {"outputs", r.outputs}};
  if (!r.exact_bound.empty()) {
    j["exact"] = {{"max_ratio", r.exact_max_ratio},
                  {"bound", r.exact_bound},
                  {"sound", r.exact_sound},
                  {"attained", r.exact_attained}};
  }
  return j;
}

json ToJson(const ErrorPrediction& p) {
  return {{"var_f", p.var_f},
          {"e_m_approx", p.e_m_approx},
          {"var_m_approx", p.var_m_approx},
          {"delta", p.delta},
          {"gamma", p.gamma},
          {"mu", p.mu},
          {"g", p.g},
          {"h", p.h},
          {"mse_f_approx", p.mse_f_approx},
          {"mse_m_approx", p.mse_m_approx}};
}

json ToJson(const MetricsReport& r, bool per_key) {
  json j = {{"mechanism", ProtocolName(r.protocol)},
            {"eps", r.eps},
            {"ell", r.ell},
            {"n", r.n},
            {"d", r.d},
            {"repeats", r.repeats},
            {"scope", r.scope},
            {"scored_keys", r.scored_keys},
            {"mse_freq", r.mse_freq},
            {"mse_mean", r.mse_mean},
            {"mse_freq_per_repeat", r.mse_freq_per_repeat},
            {"mse_mean_per_repeat", r.mse_mean_per_repeat},
            {"precision_top_n", Optional(r.precision_top_n)}};
  if (r.budget && r.probs) j["budget"] = ToJson(*r.budget, *r.probs);
  if (per_key) {
    json keys = json::array();
    for (const KeyMetrics& k : r.keys) {
      keys.push_back({{"key", k.key},
                      {"f_true", k.f_true},
                      {"m_true", Optional(k.m_true)},
                      {"f_hat", k.f_hat},
                      {"m_hat", k.m_hat},
                      {"f_hat_raw", k.f_hat_raw},
                      {"m_hat_raw", k.m_hat_raw},
                      {"pred_var_f", Optional(k.pred_var_f)},
                      {"pred_mse_m_approx", Optional(k.pred_mse_m_approx)}});
    }
    j["keys"] = keys;
  }
  return j;
}

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Local differential privacy for key-value data"};
  app.require_subcommand(1);
  // Lets global options appear after the subcommand name.
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--seed", g.seed, "experiment seed");
  app.add_option("--out", g.out, "write results to this file");
  app.add_option("--format", g.format)->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)");

  DataOptions data;
  BudgetOptions budget;
  RunOptions run;
  int domain = 100;
  int64_t n = 1'000'000;
  std::vector<double> f_list = {0.01};
  double m_star = 0.0;
  double m_star_sq = 0.0;
  int grid = 10'000;
  std::vector<double> eps_list = {0.5, 1, 2, 4};
  AuditOptions audit_opts;
  std::string reports;
  bool diagnostics = false;

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic dataset CSV");
  AddDataOptions(gen, data);

  CLI::App* stats = app.add_subcommand("stats", "true per-key statistics");
  AddDataOptions(stats, data);

  CLI::App* allocate = app.add_subcommand("allocate", "split a privacy budget");
  AddBudgetOptions(allocate, budget);
  allocate->add_option("--domain", domain, "number of real keys d");

  CLI::App* run_cmd = app.add_subcommand("run", "simulate one protocol");
  auto add_run_options = [&](CLI::App* cmd) {
    AddDataOptions(cmd, data);
    cmd->add_option("--mechanism", run.mechanism)
        ->check(CLI::IsMember({"pckv-ue", "pckv-grr", "privkv", "ue", "grr"}));
    cmd->add_option("--strategy", run.strategy);
    cmd->add_option("--eps", run.eps);
    cmd->add_option("--ell", run.ell);
    cmd->add_option("--eps-key", run.eps_key);
    cmd->add_option("--eps-value", run.eps_value);
    cmd->add_option("--repeats", run.repeats);
    cmd->add_option("--preset", run.preset,
                    "ecommerce, clothing, amazon or movie (sets --ell)");
  };
  add_run_options(run_cmd);
  run_cmd->add_option("--top-n", run.top_n);
  run_cmd->add_flag("--per-key", run.per_key, "include the per-key table");

  CLI::App* audit = app.add_subcommand("audit", "exact LDP audit");
  AddBudgetOptions(audit, budget);
  audit->add_option("--d", domain, "number of real keys")->required();
  audit->add_flag("--exact", audit_opts.exact, "exact rational arithmetic");
  audit->add_flag("--zero-values", audit_opts.include_zero_values,
                  "also use value 0 in input sets");

  CLI::App* scan = app.add_subcommand("scan", "allocation objective curve");
  scan->add_option("--eps", budget.eps);
  scan->add_option("--m2", m_star_sq, "squared true mean");
  scan->add_option("--grid", grid);

  CLI::App* compare = app.add_subcommand("compare", "compare allocations");
  add_run_options(compare);
  compare->add_option("--eps-list", eps_list)->delimiter(',');

  CLI::App* predict = app.add_subcommand("predict", "theoretical errors");
  AddBudgetOptions(predict, budget);
  predict->add_option("--domain", domain);
  predict->add_option("--users", n);
  predict->add_option("--f", f_list, "true frequencies")->delimiter(',');
  predict->add_option("--m", m_star, "true mean");

  CLI::App* perturb = app.add_subcommand("perturb", "emit one report per user");
  add_run_options(perturb);

  CLI::App* estimate = app.add_subcommand("estimate", "estimate from reports");
  estimate->add_option("--reports", reports)->required();
  estimate->add_option("--domain", domain)->required();
  estimate->add_option("--mechanism", run.mechanism);
  estimate->add_option("--strategy", run.strategy);
  estimate->add_option("--eps", run.eps);
  estimate->add_option("--ell", run.ell);
  estimate->add_option("--eps-key", run.eps_key);
  estimate->add_option("--eps-value", run.eps_value);
  estimate->add_flag("--diagnostics", diagnostics, "include dummy-key counts");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    const std::vector<CLI::App*> parsed = app.get_subcommands();
    out << (parsed.empty() ? app.help() : parsed.back()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    WriteError(err, "INVALID_ARGUMENT", e.what());
    return 2;
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!g.out.empty()) {
    file.open(g.out);
    if (!file) {
      WriteError(err, "NOT_FOUND", "cannot open " + g.out);
      return 1;
    }
    sink = &file;
  }

  absl::Status status;
  if (gen->parsed()) {
    status = CmdGen(g, data, *sink);
  } else if (stats->parsed()) {
    status = CmdStats(g, data, *sink);
  } else if (allocate->parsed()) {
    status = CmdAllocate(g, budget, domain, *sink);
  } else if (run_cmd->parsed()) {
    status = CmdRun(g, data, run, *sink);
  } else if (audit->parsed()) {
    status = CmdAudit(budget, domain, audit_opts, *sink);
  } else if (scan->parsed()) {
    status = CmdScan(g, budget.eps, m_star_sq, grid, *sink);
  } else if (compare->parsed()) {
    status = CmdCompare(g, data, run, eps_list, *sink);
  } else if (predict->parsed()) {
    status = CmdPredict(g, budget, domain, n, f_list, m_star, *sink);
  } else if (perturb->parsed()) {
    status = CmdPerturb(g, data, run, *sink);
  } else if (estimate->parsed()) {
    status = CmdEstimate(g, run, domain, reports, diagnostics, *sink);
  }
  if (!status.ok()) {
    WriteError(err, absl::StatusCodeToString(status.code()),
               std::string(status.message()));
    return 1;
  }
  return 0;
}

}  // namespace kvldp::cli
