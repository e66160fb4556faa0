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

#ifndef KVLDP_TOOLS_CLI_H_
#define KVLDP_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "kvldp/audit.h"
#include "kvldp/budget.h"
#include "kvldp/experiment.h"
#include "kvldp/theory.h"

namespace kvldp::cli {

// Runs one command line; args[0] is the program name. Results go to `out`
// unless --out names a file. Failures are reported on `err` as
// {"error": {"code": ..., "message": ...}}. Returns the exit code.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

nlohmann::json ToJson(const BudgetSpec& spec, const PerturbProbs& probs);
nlohmann::json ToJson(const AuditResult& result);
nlohmann::json ToJson(const ErrorPrediction& prediction);
nlohmann::json ToJson(const MetricsReport& report, bool per_key);

}  // namespace kvldp::cli

#endif  // KVLDP_TOOLS_CLI_H_
