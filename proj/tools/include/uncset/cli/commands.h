// Copyright 2026 The uncset Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UNCSET_CLI_COMMANDS_H_
#define UNCSET_CLI_COMMANDS_H_

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "uncset/cli/config.h"
#include "uncset/uncertainty_set.h"

namespace uncset::cli {

// Each command reads its inputs from and writes its outputs to
// config.out_dir, which must exist. Progress goes to `log`. Failures are
// reported as CliError.
void CmdGenData(const ExperimentConfig& config, std::ostream& log);
void CmdTrain(const ExperimentConfig& config, std::ostream& log);
void CmdSolve(const ExperimentConfig& config, std::ostream& log);
void CmdEvaluate(const ExperimentConfig& config, std::ostream& log);
void CmdExperiment(const ExperimentConfig& config, std::ostream& log);

// One row of eval.csv / experiment.csv.
struct EvalRow {
  std::string type;  // data family
  std::size_t n = 0;
  std::size_t m = 0;
  std::string method;
  double avg = 0.0;
  double q90 = 0.0;
  double feas_frac = 1.0;
  std::uint64_t seed = 0;

  bool SameKey(const EvalRow& other) const;
};

inline constexpr char kEvalHeader[] = "type,N,m,method,avg,q90,feas_frac,seed";
std::string FormatEvalRow(const EvalRow& row);
std::vector<EvalRow> ReadEvalCsv(std::istream& in);

// Equal-width histogram over [min, max] of the values.
struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
};
Histogram MakeHistogram(const Vector& values, int bins);

// Entry point shared by the executable and the tests. Returns the exit code.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace uncset::cli

#endif  // UNCSET_CLI_COMMANDS_H_
