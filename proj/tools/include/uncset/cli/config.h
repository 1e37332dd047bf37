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

#ifndef UNCSET_CLI_CONFIG_H_
#define UNCSET_CLI_CONFIG_H_

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "uncset/datagen.h"
#include "uncset/master.h"
#include "uncset/nn_adversarial.h"
#include "uncset/svdd_train.h"

namespace uncset::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitTraining = 3;
inline constexpr int kExitSolve = 4;

// Failure carrying the exit code the command should end with.
class CliError : public std::runtime_error {
 public:
  CliError(int exit_code, const std::string& message)
      : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

enum class Method { kNn, kSvc, kDiscrete };
const char* MethodName(Method method);
Method ParseMethod(const std::string& name);

struct ExperimentConfig {
  DatasetSpec data;
  // Scenario files; empty means <out>/train.csv and <out>/test.csv.
  std::string train_csv;
  std::string test_csv;

  Method method = Method::kNn;
  double nu = 0.1;
  double radius_quantile = 0.9;
  NormKind norm = NormKind::kL2;
  NnOracle oracle = NnOracle::kDecomposed;

  TrainConfig train;
  // Empty widths mean DefaultArchitecture(). Without explicit activations
  // the hidden layers are ReLU and the output layer is identity.
  Architecture arch;

  ProblemKind problem = ProblemKind::kObjectiveUncertain;
  SolveOptions solve;
  double eval_quantile = 0.9;

  std::string out_dir = ".";
  // Adds wall-clock columns to logs, which makes them nondeterministic.
  bool log_timing = false;
  std::uint64_t seed = 0;

  std::vector<std::uint64_t> seeds;  // empty = {seed}
  std::vector<Method> methods{Method::kNn, Method::kSvc};
  std::vector<DataFamily> families;  // empty = {data.family}
  // Fractions of training points left outside the set; each one sets
  // nu = f for svc and radius_quantile = 1 - f for nn. Empty = one cell.
  std::vector<double> outside_fractions;
  int bins = 50;

  std::string TrainPath() const;
  std::string TestPath() const;
  std::string OutPath(const std::string& name) const;
  Architecture ResolvedArchitecture() const;
  // Sets the base seed and the dataset/training seeds derived from it.
  void SetSeed(std::uint64_t value);
};

// INI text with [data], [method], [train], [problem], [eval], [output],
// [run] and [experiment] sections. Throws CliError(kExitConfig) on unknown
// keys and malformed values.
ExperimentConfig ParseConfig(std::istream& in);
ExperimentConfig LoadConfig(const std::string& path);

}  // namespace uncset::cli

#endif  // UNCSET_CLI_CONFIG_H_
