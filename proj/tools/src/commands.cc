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

#include "uncset/cli/commands.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "uncset/error.h"
#include "uncset/svc_baseline.h"
#include "uncset/text_io.h"

namespace uncset::cli {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void RequireOutDir(const ExperimentConfig& config) {
  if (!std::filesystem::is_directory(config.out_dir)) {
    throw CliError(kExitConfig,
                   "output directory '" + config.out_dir + "' does not exist");
  }
}

std::string ReadText(const std::string& path) {
  try {
    return ReadFile(path);
  } catch (const Error& e) {
    throw CliError(kExitConfig, e.what());
  }
}

void WriteText(const std::string& path, const std::string& contents) {
  try {
    WriteFile(path, contents);
  } catch (const Error& e) {
    throw CliError(kExitConfig, e.what());
  }
}

Matrix LoadScenarios(const std::string& path) {
  std::istringstream in(ReadText(path));
  try {
    return ReadScenarioCsv(in);
  } catch (const Error& e) {
    throw CliError(kExitConfig, path + ": " + e.what());
  }
}

RobustProblem ProblemFor(ProblemKind kind, std::size_t n) {
  return kind == ProblemKind::kObjectiveUncertain ? BuildObjProblem(n)
                                                  : BuildFeasProblem(n);
}

// ceil(q m)-th smallest training radius in the set's norm.
double Calibrate(const NetworkSet& set, const Matrix& data, double q) {
  if (set.norm == NormKind::kL2) {
    return CalibrateRadius(set.network, set.center, data, q);
  }
  Vector r(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    r[i] = RadiusOf(set.network, set.center, set.norm, data.row(i));
  }
  std::sort(r.begin(), r.end());
  const auto k = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(r.size()) - 1e-9));
  return r[std::clamp<std::size_t>(k, 1, r.size()) - 1];
}

// Runs fn, turning library errors into CliError with the given exit code.
// Parse and I/O errors always map to the config code.
template <typename F>
auto Guard(int exit_code, const std::string& what, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    const bool input =
        e.code() == ErrorCode::kParseError || e.code() == ErrorCode::kIoError;
    throw CliError(
        input ? kExitConfig : exit_code,
        what + ": " + std::string(ErrorCodeName(e.code())) + ": " + e.what());
  }
}

TrainedModel TrainNetwork(const ExperimentConfig& config, const Matrix& train,
                          std::uint64_t seed, double radius_quantile) {
  TrainConfig cfg = config.train;
  cfg.seed = seed;
  cfg.radius_quantile = radius_quantile;
  TrainedModel model = Train(train, config.ResolvedArchitecture(), cfg);
  model.set.norm = config.norm;
  model.set.radius = Calibrate(model.set, train, radius_quantile);
  return model;
}

constexpr char kDiscreteHeader[] = "discrete v1";

std::unique_ptr<UncertaintySet> LoadSet(const ExperimentConfig& config,
                                        const Matrix& train) {
  const std::string path = config.OutPath("model.txt");
  std::istringstream in(ReadText(path));
  std::string magic, version;
  in >> magic >> version;
  in.seekg(0);
  const char* expected = config.method == Method::kNn    ? "pwanet"
                         : config.method == Method::kSvc ? "svcmodel"
                                                         : "discrete";
  if (magic != expected) {
    throw CliError(kExitConfig, path + " does not hold a " +
                                    MethodName(config.method) + " model");
  }
  return Guard(kExitConfig, path, [&]() -> std::unique_ptr<UncertaintySet> {
    switch (config.method) {
      case Method::kNn:
        return std::make_unique<NnUncertaintySet>(ReadModel(in), train,
                                                  config.oracle);
      case Method::kSvc:
        return std::make_unique<SvcUncertaintySet>(
            SetFromFile(ReadSvcModel(in), DataBox(train)));
      case Method::kDiscrete:
        break;
    }
    std::string line;
    std::getline(in, line);
    std::string source;
    std::getline(in, source);
    std::filesystem::path source_path(source);
    if (source_path.is_relative()) source_path = config.out_dir / source_path;
    return std::make_unique<DiscreteUncertaintySet>(
        LoadScenarios(source_path.string()));
  });
}

std::string LogCsv(const MasterState& state, bool timing) {
  std::ostringstream out;
  out << "iteration,master_objective,violation"
      << (timing ? ",oracle_seconds" : "") << '\n';
  for (const IterationLog& row : state.log) {
    out << row.iteration << ',' << FormatDouble(row.master_objective) << ','
        << FormatDouble(row.violation);
    if (timing) out << ',' << FormatDouble(row.oracle_seconds);
    out << '\n';
  }
  return out.str();
}

EvalRow MakeRow(const ExperimentConfig& config, DataFamily family,
                const std::string& method, std::size_t m, std::uint64_t seed,
                const EvalReport& report) {
  EvalRow row;
  row.type = DataFamilyName(family);
  row.n = config.data.dim;
  row.m = m;
  row.method = method;
  row.avg = report.mean;
  row.q90 = report.quantile;
  row.feas_frac = report.feasible_fraction;
  row.seed = seed;
  return row;
}

std::optional<double> RhsFor(const RobustProblem& problem) {
  if (problem.kind == ProblemKind::kConstraintUncertain) return problem.rhs;
  return std::nullopt;
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

bool EvalRow::SameKey(const EvalRow& other) const {
  return type == other.type && n == other.n && m == other.m &&
         method == other.method && seed == other.seed;
}

std::string FormatEvalRow(const EvalRow& row) {
  std::ostringstream out;
  out << row.type << ',' << row.n << ',' << row.m << ',' << row.method << ','
      << FormatDouble(row.avg) << ',' << FormatDouble(row.q90) << ','
      << FormatDouble(row.feas_frac) << ',' << row.seed;
  return out.str();
}

std::vector<EvalRow> ReadEvalCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kEvalHeader) {
    throw Error(ErrorCode::kParseError, "missing eval CSV header");
  }
  std::vector<EvalRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != 8) {
      throw Error(ErrorCode::kParseError, "eval CSV row needs 8 fields");
    }
    EvalRow row;
    row.type = f[0];
    row.n = static_cast<std::size_t>(ParseInt(f[1]));
    row.m = static_cast<std::size_t>(ParseInt(f[2]));
    row.method = f[3];
    row.avg = ParseDouble(f[4]);
    row.q90 = ParseDouble(f[5]);
    row.feas_frac = ParseDouble(f[6]);
    row.seed = static_cast<std::uint64_t>(ParseInt(f[7]));
    rows.push_back(row);
  }
  return rows;
}

Histogram MakeHistogram(const Vector& values, int bins) {
  Histogram h;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  if (values.empty()) {
    h.edges.assign(h.counts.size() + 1, 0.0);
    return h;
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double width = (*hi_it - lo) / bins;
  for (int b = 0; b <= bins; ++b) h.edges.push_back(lo + b * width);
  h.edges.back() = *hi_it;
  for (double v : values) {
    auto b = width > 0.0 ? static_cast<std::size_t>((v - lo) / width) : 0;
    h.counts[std::min(b, h.counts.size() - 1)]++;
  }
  return h;
}

void CmdGenData(const ExperimentConfig& config, std::ostream& log) {
  RequireOutDir(config);
  const Dataset d =
      Guard(kExitConfig, "gen-data", [&] { return Generate(config.data); });
  std::ostringstream train, test;
  WriteScenarioCsv(train, d.train);
  WriteScenarioCsv(test, d.test);
  WriteText(config.TrainPath(), train.str());
  WriteText(config.TestPath(), test.str());
  log << "wrote " << d.train.rows() << " training and " << d.test.rows()
      << " test scenarios\n";
}

void CmdTrain(const ExperimentConfig& config, std::ostream& log) {
  RequireOutDir(config);
  const Matrix train = LoadScenarios(config.TrainPath());
  const auto start = Clock::now();
  std::ostringstream out;
  switch (config.method) {
    case Method::kNn: {
      const TrainedModel model = Guard(kExitTraining, "train", [&] {
        return TrainNetwork(config, train, config.train.seed,
                            config.radius_quantile);
      });
      WriteModel(out, model.set);
      log << "final_loss=" << FormatDouble(model.final_loss) << '\n';
      break;
    }
    case Method::kSvc: {
      Guard(kExitTraining, "train", [&] {
        const SvcModel model =
            SolveDual(train, WeightingMatrix(train), config.nu);
        WriteSvcModel(out, model, BuildSet(model).theta());
        log << "support_vectors=" << model.sv.size()
            << " boundary=" << model.bsv.size() << '\n';
        return 0;
      });
      break;
    }
    case Method::kDiscrete:
      // Default scenario files are recorded relative to the output directory.
      out << kDiscreteHeader << '\n'
          << (config.train_csv.empty()
                  ? std::string("train.csv")
                  : std::filesystem::absolute(config.train_csv).string())
          << '\n';
      break;
  }
  WriteText(config.OutPath("model.txt"), out.str());
  log << "train_seconds=" << SecondsSince(start) << '\n';
}

void CmdSolve(const ExperimentConfig& config, std::ostream& log) {
  RequireOutDir(config);
  const Matrix train = LoadScenarios(config.TrainPath());
  const std::unique_ptr<UncertaintySet> set = LoadSet(config, train);
  const RobustProblem problem = ProblemFor(config.problem, set->dim());
  const auto start = Clock::now();
  const MasterState state = Guard(kExitSolve, "solve", [&] {
    return SolveRobust(problem, *set, config.solve);
  });
  std::ostringstream solution;
  WriteSolution(solution, state);
  WriteText(config.OutPath("solution.txt"), solution.str());
  WriteText(config.OutPath("solve_log.csv"), LogCsv(state, config.log_timing));
  log << "status=" << SolveStatusName(state.status)
      << " objective=" << FormatDouble(state.objective)
      << " iterations=" << state.iterations
      << " solve_seconds=" << SecondsSince(start) << '\n';
  if (state.status != SolveStatus::kConverged) {
    throw CliError(kExitSolve, "no convergence after " +
                                   std::to_string(state.iterations) +
                                   " iterations; incumbent written");
  }
}

void CmdEvaluate(const ExperimentConfig& config, std::ostream& log) {
  RequireOutDir(config);
  std::istringstream sol_in(ReadText(config.OutPath("solution.txt")));
  const MasterState state =
      Guard(kExitConfig, "solution.txt", [&] { return ReadSolution(sol_in); });
  const Matrix test = LoadScenarios(config.TestPath());
  const Matrix train = LoadScenarios(config.TrainPath());
  if (test.cols() != state.x.size()) {
    throw CliError(kExitConfig, "test scenarios have dimension " +
                                    std::to_string(test.cols()) +
                                    " but the solution has " +
                                    std::to_string(state.x.size()));
  }
  const RobustProblem problem = ProblemFor(config.problem, state.x.size());
  const EvalReport report = Guard(kExitConfig, "evaluate", [&] {
    return Evaluate(state.x, test, config.eval_quantile, RhsFor(problem));
  });
  EvalRow row = MakeRow(config, config.data.family, MethodName(config.method),
                        train.rows(), config.seed, report);
  row.n = state.x.size();

  const std::string path = config.OutPath("eval.csv");
  std::vector<EvalRow> rows;
  if (std::filesystem::exists(path)) {
    std::istringstream in(ReadText(path));
    rows = Guard(kExitConfig, path, [&] { return ReadEvalCsv(in); });
  }
  const auto same =
      std::find_if(rows.begin(), rows.end(),
                   [&](const EvalRow& r) { return r.SameKey(row); });
  if (same != rows.end()) {
    *same = row;
  } else {
    rows.push_back(row);
  }
  std::ostringstream out;
  out << kEvalHeader << '\n';
  for (const EvalRow& r : rows) out << FormatEvalRow(r) << '\n';
  WriteText(path, out.str());
  log << kEvalHeader << '\n' << FormatEvalRow(row) << '\n';
}

namespace {

struct Cell {
  EvalRow row;
  double fraction = 0.0;
  double objective = 0.0;
  int iterations = 0;
  std::string status = "ok";
  double train_seconds = 0.0;
  double solve_seconds = 0.0;
};

std::string FractionTag(double f) {
  std::string s = FormatDouble(f);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

void WriteHistogram(const ExperimentConfig& config, const Cell& cell,
                    const Vector& values, bool tag_fraction) {
  const Histogram h = MakeHistogram(values, config.bins);
  std::ostringstream out;
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    out << FormatDouble(h.edges[b]) << ',' << FormatDouble(h.edges[b + 1])
        << ',' << h.counts[b] << '\n';
  }
  std::string name = "hist_" + cell.row.type + "_" + cell.row.method + "_s" +
                     std::to_string(cell.row.seed);
  if (tag_fraction) name += "_f" + FractionTag(cell.fraction);
  WriteText(config.OutPath(name + ".csv"), out.str());
}

}  // namespace

void CmdExperiment(const ExperimentConfig& config, std::ostream& log) {
  RequireOutDir(config);
  const std::vector<std::uint64_t> seeds =
      config.seeds.empty() ? std::vector<std::uint64_t>{config.seed}
                           : config.seeds;
  const std::vector<DataFamily> families =
      config.families.empty() ? std::vector<DataFamily>{config.data.family}
                              : config.families;
  const bool sweep = !config.outside_fractions.empty();
  std::vector<Cell> cells;

  for (DataFamily family : families) {
    for (std::uint64_t seed : seeds) {
      DatasetSpec spec = config.data;
      spec.family = family;
      spec.seed = seed;
      const Dataset d =
          Guard(kExitConfig, "experiment", [&] { return Generate(spec); });
      const RobustProblem problem = ProblemFor(config.problem, spec.dim);
      for (Method method : config.methods) {
        std::vector<double> fractions = config.outside_fractions;
        if (!sweep || method == Method::kDiscrete) {
          // Rounded so 1 - 0.9 prints as 0.1.
          fractions = {method == Method::kSvc
                           ? config.nu
                           : std::round((1.0 - config.radius_quantile) * 1e12) /
                                 1e12};
        }
        std::optional<TrainedModel> network;
        double network_seconds = 0.0;
        for (double fraction : fractions) {
          Cell cell;
          cell.fraction = fraction;
          cell.row = MakeRow(config, family, MethodName(method), d.train.rows(),
                             seed, EvalReport{});
          try {
            auto start = Clock::now();
            std::unique_ptr<UncertaintySet> set;
            switch (method) {
              case Method::kNn: {
                // One network per seed; only the radius follows the fraction.
                if (!network) {
                  network = TrainNetwork(config, d.train, seed,
                                         config.radius_quantile);
                  network_seconds = SecondsSince(start);
                }
                NetworkSet s = network->set;
                s.radius = Calibrate(s, d.train, 1.0 - fraction);
                set = std::make_unique<NnUncertaintySet>(s, d.train,
                                                         config.oracle);
                cell.train_seconds = network_seconds;
                break;
              }
              case Method::kSvc:
                set = std::make_unique<SvcUncertaintySet>(BuildSet(
                    SolveDual(d.train, WeightingMatrix(d.train), fraction)));
                cell.train_seconds = SecondsSince(start);
                break;
              case Method::kDiscrete:
                set = std::make_unique<DiscreteUncertaintySet>(d.train);
                break;
            }
            start = Clock::now();
            const MasterState state = SolveRobust(problem, *set, config.solve);
            cell.solve_seconds = SecondsSince(start);
            cell.objective = state.objective;
            cell.iterations = state.iterations;
            if (state.status != SolveStatus::kConverged) {
              cell.status = SolveStatusName(state.status);
            }
            const EvalReport report = Evaluate(
                state.x, d.test, config.eval_quantile, RhsFor(problem));
            cell.row = MakeRow(config, family, MethodName(method),
                               d.train.rows(), seed, report);
            Vector values(d.test.rows());
            for (std::size_t i = 0; i < d.test.rows(); ++i) {
              values[i] = Dot(state.x, d.test.row(i));
            }
            WriteHistogram(config, cell, values, sweep);
          } catch (const Error& e) {
            cell.status = ErrorCodeName(e.code());
          }
          log << cell.row.type << " seed " << seed << ' ' << cell.row.method
              << " fraction " << FormatDouble(fraction) << ": " << cell.status
              << " avg " << FormatDouble(cell.row.avg) << '\n';
          cells.push_back(cell);
        }
      }
    }
  }

  std::ostringstream runs;
  runs << kEvalHeader << ",outside_fraction,objective,iterations,status"
       << (config.log_timing ? ",train_seconds,solve_seconds" : "") << '\n';
  for (const Cell& c : cells) {
    runs << FormatEvalRow(c.row) << ',' << FormatDouble(c.fraction) << ','
         << FormatDouble(c.objective) << ',' << c.iterations << ',' << c.status;
    if (config.log_timing) {
      runs << ',' << FormatDouble(c.train_seconds) << ','
           << FormatDouble(c.solve_seconds);
    }
    runs << '\n';
  }
  WriteText(config.OutPath("experiment.csv"), runs.str());

  // Seed averages per (type, fraction index, method) over successful runs.
  struct Mean {
    double avg = 0.0, q90 = 0.0;
    int count = 0;
  };
  std::map<std::pair<std::string, std::string>, std::map<std::string, Mean>>
      table;
  std::vector<std::pair<std::string, std::string>> order;
  for (const Cell& c : cells) {
    const std::string frac = sweep && c.row.method != "discrete"
                                 ? FormatDouble(c.fraction)
                                 : std::string();
    const auto key = std::make_pair(c.row.type, frac);
    if (!table.count(key)) order.push_back(key);
    Mean& mean = table[key][c.row.method];
    if (c.status != "ok") continue;
    mean.avg += c.row.avg;
    mean.q90 += c.row.q90;
    ++mean.count;
  }
  std::ostringstream summary;
  summary << "type,N,m,outside_fraction";
  for (Method method : config.methods) {
    summary << ',' << MethodName(method) << "_avg," << MethodName(method)
            << "_q90," << MethodName(method) << "_runs";
  }
  summary << ",gap\n";
  for (const auto& key : order) {
    auto& row = table[key];
    summary << key.first << ',' << config.data.dim << ','
            << config.data.train_size << ',' << key.second;
    for (Method method : config.methods) {
      const Mean& mean = row[MethodName(method)];
      if (mean.count == 0) {
        summary << ",,,0";
        continue;
      }
      summary << ',' << FormatDouble(mean.avg / mean.count) << ','
              << FormatDouble(mean.q90 / mean.count) << ',' << mean.count;
    }
    const Mean& nn = row["nn"];
    const Mean& svc = row["svc"];
    summary << ',';
    if (nn.count > 0 && svc.count > 0) {
      summary << FormatDouble(
          100.0 * ((svc.avg / svc.count) / (nn.avg / nn.count) - 1.0));
    }
    summary << '\n';
  }
  WriteText(config.OutPath("summary.csv"), summary.str());
}

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Learned uncertainty sets for robust linear optimization"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  struct Command {
    const char* name;
    const char* help;
    void (*run)(const ExperimentConfig&, std::ostream&);
  };
  const Command commands[] = {
      {"gen-data", "Generate training and test scenarios", &CmdGenData},
      {"train", "Train the configured uncertainty set", &CmdTrain},
      {"solve", "Solve the robust problem by scenario generation", &CmdSolve},
      {"evaluate", "Evaluate the solution on the test scenarios", &CmdEvaluate},
      {"experiment", "Run the full comparison over seeds and methods",
       &CmdExperiment},
  };
  std::vector<CLI::App*> subs;
  std::vector<CLI::Option*> seed_opts;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "INI configuration file")
        ->required();
    seed_opts.push_back(
        sub->add_option("--seed", seed, "Override the configured seed"));
    sub->add_option("--out", out_dir, "Override the output directory");
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      ExperimentConfig config = LoadConfig(config_path);
      if (seed_opts[i]->count() > 0) {
        config.SetSeed(seed);
        config.seeds.clear();
      }
      if (!out_dir.empty()) config.out_dir = out_dir;
      commands[i].run(config, out);
    }
  } catch (const CliError& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace uncset::cli
