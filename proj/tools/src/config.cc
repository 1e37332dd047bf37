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

#include "uncset/cli/config.h"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "uncset/error.h"
#include "uncset/text_io.h"

namespace uncset::cli {

const char* MethodName(Method method) {
  switch (method) {
    case Method::kNn:
      return "nn";
    case Method::kSvc:
      return "svc";
    case Method::kDiscrete:
      return "discrete";
  }
  return "?";
}

Method ParseMethod(const std::string& name) {
  if (name == "nn") return Method::kNn;
  if (name == "svc") return Method::kSvc;
  if (name == "discrete") return Method::kDiscrete;
  throw CliError(kExitConfig, "unknown method '" + name + "'");
}

std::string ExperimentConfig::TrainPath() const {
  return train_csv.empty() ? OutPath("train.csv") : train_csv;
}

std::string ExperimentConfig::TestPath() const {
  return test_csv.empty() ? OutPath("test.csv") : test_csv;
}

std::string ExperimentConfig::OutPath(const std::string& name) const {
  return (std::filesystem::path(out_dir) / name).string();
}

Architecture ExperimentConfig::ResolvedArchitecture() const {
  return arch.widths.empty() ? DefaultArchitecture() : arch;
}

void ExperimentConfig::SetSeed(std::uint64_t value) {
  seed = value;
  data.seed = value;
  train.seed = value;
}

namespace {

using Values = std::vector<std::string>;
using Handler = std::function<void(ExperimentConfig&, const Values&)>;

const std::string& Single(const std::string& key, const Values& v) {
  if (v.size() != 1 || v[0].empty()) {
    throw CliError(kExitConfig, "key '" + key + "' needs exactly one value");
  }
  return v[0];
}

template <typename T>
T Convert(const std::string& key, const std::string& text,
          T (*parse)(const std::string&)) {
  try {
    return parse(text);
  } catch (const Error&) {
    throw CliError(kExitConfig,
                   "bad value '" + text + "' for key '" + key + "'");
  }
}

double ToDouble(const std::string& s) { return ParseDouble(s); }
std::int64_t ToInt(const std::string& s) { return ParseInt(s); }

std::int64_t NonNegativeInt(const std::string& key, const std::string& text) {
  const std::int64_t v = Convert(key, text, &ToInt);
  if (v < 0) throw CliError(kExitConfig, "key '" + key + "' must be >= 0");
  return v;
}

bool ToBool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw CliError(kExitConfig, "key '" + key + "' expects true or false");
}

PwaActivation ToActivation(const std::string& name) {
  if (name == "relu") return PwaActivation::Relu();
  if (name == "identity") return PwaActivation::Identity();
  if (name == "hat") return PwaActivation::BinaryHat();
  throw CliError(kExitConfig, "unknown activation '" + name + "'");
}

DataFamily ToFamily(const std::string& name) {
  try {
    return ParseDataFamily(name);
  } catch (const Error&) {
    throw CliError(kExitConfig, "unknown data family '" + name + "'");
  }
}

// Real values as written in the file.
#define UNCSET_REAL(key, field)                         \
  {key, [](ExperimentConfig& c, const Values& v) {      \
     c.field = Convert(key, Single(key, v), &ToDouble); \
   }}
#define UNCSET_COUNT(key, field, type)                                 \
  {key, [](ExperimentConfig& c, const Values& v) {                     \
     c.field = static_cast<type>(NonNegativeInt(key, Single(key, v))); \
   }}

const std::map<std::string, Handler>& Handlers() {
  static const auto* handlers = new std::map<std::string, Handler>{
      {"data.family",
       [](ExperimentConfig& c, const Values& v) {
         c.data.family = ToFamily(Single("data.family", v));
       }},
      UNCSET_COUNT("data.dim", data.dim, std::size_t),
      UNCSET_COUNT("data.train_size", data.train_size, std::size_t),
      UNCSET_COUNT("data.test_size", data.test_size, std::size_t),
      UNCSET_REAL("data.outlier_fraction", data.outlier_fraction),
      UNCSET_REAL("data.budget", data.budget),
      {"data.train_csv",
       [](ExperimentConfig& c, const Values& v) {
         c.train_csv = Single("data.train_csv", v);
       }},
      {"data.test_csv",
       [](ExperimentConfig& c, const Values& v) {
         c.test_csv = Single("data.test_csv", v);
       }},
      {"method.name",
       [](ExperimentConfig& c, const Values& v) {
         c.method = ParseMethod(Single("method.name", v));
       }},
      UNCSET_REAL("method.nu", nu),
      UNCSET_REAL("method.radius_quantile", radius_quantile),
      {"method.norm",
       [](ExperimentConfig& c, const Values& v) {
         const std::string& s = Single("method.norm", v);
         if (s != "1" && s != "2") {
           throw CliError(kExitConfig, "method.norm must be 1 or 2");
         }
         c.norm = s == "1" ? NormKind::kL1 : NormKind::kL2;
       }},
      {"method.oracle",
       [](ExperimentConfig& c, const Values& v) {
         const std::string& s = Single("method.oracle", v);
         if (s != "decomposed" && s != "exact") {
           throw CliError(kExitConfig,
                          "method.oracle must be decomposed or exact");
         }
         c.oracle = s == "exact" ? NnOracle::kExact : NnOracle::kDecomposed;
       }},
      UNCSET_COUNT("train.epochs", train.epochs, int),
      UNCSET_REAL("train.learning_rate", train.learning_rate),
      UNCSET_REAL("train.weight_decay", train.weight_decay),
      {"train.regularize_quantile",
       [](ExperimentConfig& c, const Values& v) {
         c.train.regularize_quantile =
             ToBool("train.regularize_quantile",
                    Single("train.regularize_quantile", v));
       }},
      {"train.loss",
       [](ExperimentConfig& c, const Values& v) {
         const std::string& s = Single("train.loss", v);
         if (s != "quantile" && s != "svdd") {
           throw CliError(kExitConfig, "train.loss must be quantile or svdd");
         }
         c.train.loss = s == "svdd" ? LossKind::kSvdd : LossKind::kQuantile;
       }},
      UNCSET_REAL("train.epsilon", train.quantile.epsilon),
      UNCSET_COUNT("train.k", train.quantile.k, int),
      UNCSET_COUNT("train.restarts", train.restarts, int),
      {"train.widths",
       [](ExperimentConfig& c, const Values& v) {
         c.arch.widths.clear();
         for (const std::string& s : v) {
           c.arch.widths.push_back(
               static_cast<std::size_t>(NonNegativeInt("train.widths", s)));
         }
       }},
      {"train.activations",
       [](ExperimentConfig& c, const Values& v) {
         c.arch.activations.clear();
         for (const std::string& s : v) {
           c.arch.activations.push_back(ToActivation(s));
         }
       }},
      {"problem.kind",
       [](ExperimentConfig& c, const Values& v) {
         const std::string& s = Single("problem.kind", v);
         if (s != "obj" && s != "feas") {
           throw CliError(kExitConfig, "problem.kind must be obj or feas");
         }
         c.problem = s == "obj" ? ProblemKind::kObjectiveUncertain
                                : ProblemKind::kConstraintUncertain;
       }},
      UNCSET_REAL("problem.tol", solve.tol),
      UNCSET_COUNT("problem.max_iterations", solve.max_iterations, int),
      UNCSET_REAL("eval.quantile", eval_quantile),
      {"output.dir",
       [](ExperimentConfig& c, const Values& v) {
         c.out_dir = Single("output.dir", v);
       }},
      {"output.log_timing",
       [](ExperimentConfig& c, const Values& v) {
         c.log_timing =
             ToBool("output.log_timing", Single("output.log_timing", v));
       }},
      {"run.seed",
       [](ExperimentConfig& c, const Values& v) {
         c.SetSeed(static_cast<std::uint64_t>(
             NonNegativeInt("run.seed", Single("run.seed", v))));
       }},
      {"experiment.seeds",
       [](ExperimentConfig& c, const Values& v) {
         c.seeds.clear();
         for (const std::string& s : v) {
           c.seeds.push_back(static_cast<std::uint64_t>(
               NonNegativeInt("experiment.seeds", s)));
         }
       }},
      {"experiment.methods",
       [](ExperimentConfig& c, const Values& v) {
         c.methods.clear();
         for (const std::string& s : v) c.methods.push_back(ParseMethod(s));
       }},
      {"experiment.families",
       [](ExperimentConfig& c, const Values& v) {
         c.families.clear();
         for (const std::string& s : v) c.families.push_back(ToFamily(s));
       }},
      {"experiment.outside_fractions",
       [](ExperimentConfig& c, const Values& v) {
         c.outside_fractions.clear();
         for (const std::string& s : v) {
           c.outside_fractions.push_back(
               Convert("experiment.outside_fractions", s, &ToDouble));
         }
       }},
      UNCSET_COUNT("experiment.bins", bins, int),
  };
  return *handlers;
}

#undef UNCSET_REAL
#undef UNCSET_COUNT

void Validate(const ExperimentConfig& c) {
  try {
    c.data.Validate();
  } catch (const Error& e) {
    throw CliError(kExitConfig, e.what());
  }
  if (!(c.nu > 0.0 && c.nu <= 1.0)) {
    throw CliError(kExitConfig, "method.nu must lie in (0, 1]");
  }
  if (!(c.radius_quantile > 0.0 && c.radius_quantile <= 1.0)) {
    throw CliError(kExitConfig, "method.radius_quantile must lie in (0, 1]");
  }
  if (!(c.eval_quantile > 0.0 && c.eval_quantile <= 1.0)) {
    throw CliError(kExitConfig, "eval.quantile must lie in (0, 1]");
  }
  if (!(c.train.quantile.epsilon > 0.0 && c.train.quantile.epsilon < 1.0)) {
    throw CliError(kExitConfig, "train.epsilon must lie in (0, 1)");
  }
  if (c.train.restarts < 1 || c.train.quantile.k < 1) {
    throw CliError(kExitConfig, "train.restarts and train.k must be >= 1");
  }
  if (!(c.solve.tol >= 0.0) || c.solve.max_iterations < 1) {
    throw CliError(kExitConfig, "bad problem tolerances");
  }
  if (c.arch.widths.size() != c.arch.activations.size()) {
    throw CliError(kExitConfig,
                   "train.widths and train.activations differ in length");
  }
  for (double f : c.outside_fractions) {
    if (!(f > 0.0 && f < 1.0)) {
      throw CliError(kExitConfig, "outside fractions must lie in (0, 1)");
    }
  }
  if (c.bins < 1) throw CliError(kExitConfig, "experiment.bins must be >= 1");
}

}  // namespace

ExperimentConfig ParseConfig(std::istream& in) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw CliError(kExitConfig, std::string("config syntax: ") + e.what());
  }
  ExperimentConfig config;
  const auto& handlers = Handlers();
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    const std::string key = item.fullname();
    const auto it = handlers.find(key);
    if (it == handlers.end()) {
      throw CliError(kExitConfig, "unknown config key '" + key + "'");
    }
    it->second(config, item.inputs);
  }
  if (config.arch.activations.empty() && !config.arch.widths.empty()) {
    config.arch.activations.assign(config.arch.widths.size() - 1,
                                   PwaActivation::Relu());
    config.arch.activations.push_back(PwaActivation::Identity());
  }
  Validate(config);
  return config;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(kExitConfig, "cannot open config '" + path + "'");
  return ParseConfig(in);
}

}  // namespace uncset::cli
