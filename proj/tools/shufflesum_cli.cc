// Copyright 2026 The shufflesum Authors
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

// Command-line front end for calibration, experiments, sweeps and audits.
//
//   shufflesum params --eps 0.95 --delta 0.5
//   shufflesum run --trials 30 --out-dir out
//   shufflesum sweep --axis t --values 1,2,3,4,5 --out-dir out
//   shufflesum audit --trials 10000000
//   shufflesum ingest-check --dataset mitbih_train.csv --drop-label
//
// Options may also come from a flat key=value file given with --config;
// command-line flags take precedence.
//
// Exit codes: 0 success, 1 usage error, 2 infeasible parameters, 3 I/O error,
// 4 audit failure.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "shufflesum/accuracy.h"
#include "shufflesum/audit.h"
#include "shufflesum/dataset.h"
#include "shufflesum/experiment.h"
#include "shufflesum/params.h"
#include "shufflesum/randomizer.h"

namespace {

using ::shufflesum::ExperimentConfig;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitIo = 3;
constexpr int kExitAuditFailure = 4;

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kFailedPrecondition:
      return kExitInfeasible;
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kDataLoss:
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kPermissionDenied:
      return kExitIo;
    default:
      return kExitUsage;
  }
}

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status.message() << "\n";
  return ExitCodeFor(status);
}

// Raw flag values, before they are turned into an ExperimentConfig.
struct Flags {
  int d = 100;
  std::string k = "3";
  int n = 50000;
  int t = 1;
  double eps = 0.95;
  double delta = 0.5;
  int trials = 30;
  uint64_t seed = 1;
  std::string axis = "none";
  std::vector<double> values;
  std::string dataset;
  bool drop_label = false;
  std::string normalize = "clamp";
  std::string calibration = "auto";
  double gamma = -1.0;
  std::string out_dir;
  unsigned threads = 0;
};

absl::StatusOr<ExperimentConfig> BuildConfig(const Flags& flags) {
  ExperimentConfig config;
  config.d = flags.d;
  config.n = flags.n;
  config.t = flags.t;
  config.epsilon = flags.eps;
  config.delta = flags.delta;
  config.trials = flags.trials;
  config.seed = flags.seed;
  config.values = flags.values;
  config.dataset_path = flags.dataset;
  config.drop_label = flags.drop_label;
  config.threads = flags.threads;
  if (flags.k == "auto") {
    config.k_auto = true;
  } else {
    const char* end = flags.k.data() + flags.k.size();
    auto [ptr, ec] = std::from_chars(flags.k.data(), end, config.k);
    if (ec != std::errc() || ptr != end) {
      return absl::InvalidArgumentError(
          absl::StrFormat("--k must be an integer or 'auto', got '%s'", flags.k));
    }
  }
  absl::StatusOr<shufflesum::SweepAxis> axis = shufflesum::ParseAxis(flags.axis);
  if (!axis.ok()) return axis.status();
  config.axis = *axis;
  absl::StatusOr<shufflesum::Normalization> norm =
      shufflesum::ParseNormalization(flags.normalize);
  if (!norm.ok()) return norm.status();
  config.normalize = *norm;
  absl::StatusOr<shufflesum::CalibrationMode> mode =
      shufflesum::ParseCalibration(flags.calibration);
  if (!mode.ok()) return mode.status();
  config.calibration = *mode;
  if (flags.gamma >= 0.0) {
    config.manual_gamma = flags.gamma;
    if (config.calibration == shufflesum::CalibrationMode::kAuto) {
      config.calibration = shufflesum::CalibrationMode::kManual;
    }
  } else if (config.calibration == shufflesum::CalibrationMode::kManual) {
    return absl::InvalidArgumentError("--calibration manual requires --gamma");
  }
  if (absl::Status s = shufflesum::ValidateConfig(config); !s.ok()) return s;
  return config;
}

void PrintResults(const shufflesum::SweepResults& results) {
  for (const std::string& warning : results.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  for (const std::string& note : results.provenance) {
    std::cerr << "data: " << note << "\n";
  }
  std::cout << absl::StrFormat("%-8s %6s %10s %14s %12s %14s %14s\n", "value",
                               "k", "gamma", "mean_nmse", "stderr",
                               "median_nmse", "bound_mse");
  for (const shufflesum::PointSummary& p : results.points) {
    if (p.skipped) {
      std::cout << absl::StrFormat("%-8g skipped: %s\n", p.value, p.reason);
      continue;
    }
    std::cout << absl::StrFormat("%-8g %6d %10.6g %14.6g %12.4g %14.6g %14.6g\n",
                                 p.value, p.k, p.gamma, p.mean_normalized_mse,
                                 p.stderr_normalized_mse,
                                 p.median_normalized_mse, p.bound_mse);
  }
  if (results.fit) {
    std::cout << absl::StrFormat(
        "fitted exponent %.4f (log coefficient %.4f, r^2 %.4f)\n",
        results.fit->exponent, results.fit->log_coefficient,
        results.fit->r_squared);
  }
}

int RunExperiment(const ExperimentConfig& config, const std::string& out_dir) {
  absl::StatusOr<shufflesum::SweepResults> results =
      shufflesum::RunSweep(config);
  if (!results.ok()) return Fail(results.status());
  PrintResults(*results);
  if (!out_dir.empty()) {
    absl::StatusOr<shufflesum::OutputPaths> paths =
        shufflesum::EmitOutputs(*results, out_dir);
    if (!paths.ok()) return Fail(paths.status());
    std::cerr << "wrote " << paths->trials << ", " << paths->summary << ", "
              << paths->plot << "\n";
  }
  return kExitOk;
}

int RunParams(const ExperimentConfig& config) {
  if (config.delta >= 1.0 / config.n) {
    std::cerr << absl::StrFormat("warning: delta = %g is not below 1/n = %g\n",
                                 config.delta, 1.0 / config.n);
  }
  int exit_code = kExitOk;
  for (double value : shufflesum::AxisValues(config)) {
    absl::StatusOr<shufflesum::PointSetup> setup =
        shufflesum::ResolvePoint(config, value);
    if (config.axis != shufflesum::SweepAxis::kNone) {
      std::cout << shufflesum::AxisName(config.axis) << " = " << value << "\n";
    }
    if (!setup.ok()) {
      std::cout << "  infeasible: " << setup.status().message() << "\n";
      exit_code = std::max(exit_code, ExitCodeFor(setup.status()));
      continue;
    }
    const shufflesum::ProtocolParams& p = setup->params;
    std::cout << absl::StrFormat(
        "  d=%d k=%d n=%d t=%d eps=%g delta=%g regime=%s calibration=%s\n",
        p.d, p.k, p.n, p.t, setup->budget.epsilon, setup->budget.delta,
        shufflesum::RegimeName(setup->budget.regime()),
        shufflesum::CalibrationName(setup->calibration));
    std::cout << absl::StrFormat("  gamma=%.10g\n", p.gamma);
    if (absl::StatusOr<shufflesum::ComposedBudget> composed =
            shufflesum::ComposeEpsilonPrime(setup->budget, p.t);
        composed.ok()) {
      std::cout << absl::StrFormat("  per-coordinate eps'=%.10g delta'=%.10g\n",
                                   composed->epsilon_prime,
                                   composed->delta_prime);
    }
    absl::StatusOr<shufflesum::BoundReport> bound =
        shufflesum::BoundSigma(p, setup->budget, setup->bound_kind);
    if (bound.ok()) {
      std::cout << absl::StrFormat("  mse_bound=%.10g sigma_bound=%.10g\n",
                                   bound->mse_bound, bound->sigma_bound);
    }
    absl::StatusOr<int> k_choice =
        p.t == 1 ? shufflesum::ChooseKT1(setup->budget, p.d, p.n)
                 : shufflesum::ChooseKGeneral(setup->budget, p.d, p.n, p.t);
    if (k_choice.ok()) {
      std::cout << absl::StrFormat("  recommended k=%d\n", *k_choice);
    }
  }
  return exit_code;
}

// Audit defaults describe an enumerable instance; the experiment defaults
// would make the outcome space far too large.
int RunAudit(Flags flags, const CLI::App& app) {
  if (app.count("--n") == 0) flags.n = 10;
  if (app.count("--d") == 0) flags.d = 1;
  if (app.count("--k") == 0) flags.k = "1";
  if (app.count("--eps") == 0) flags.eps = 5.5;
  if (app.count("--delta") == 0) flags.delta = 0.1;
  if (app.count("--trials") == 0) flags.trials = 1000000;
  absl::StatusOr<ExperimentConfig> config = BuildConfig(flags);
  if (!config.ok()) return Fail(config.status());
  shufflesum::ProtocolParams p;
  shufflesum::PrivacyBudget budget;
  if (config->calibration == shufflesum::CalibrationMode::kManual) {
    // The gamma = 1 control is a valid mechanism to audit even though it
    // carries no signal for estimation.
    p = {config->d, config->k, config->n, config->t, config->manual_gamma};
    if (absl::Status s = shufflesum::ValidateParams(p); !s.ok()) return Fail(s);
    absl::StatusOr<shufflesum::PrivacyBudget> b =
        shufflesum::PrivacyBudget::Create(config->epsilon, config->delta);
    if (!b.ok()) return Fail(b.status());
    budget = *b;
  } else {
    absl::StatusOr<shufflesum::PointSetup> setup =
        shufflesum::ResolvePoint(*config, 0.0);
    if (!setup.ok()) return Fail(setup.status());
    p = setup->params;
    budget = setup->budget;
  }

  shufflesum::NeighborPair pair;
  pair.dataset.assign(p.n, std::vector<double>(p.d, 0.0));
  pair.alt_last.assign(p.d, 1.0);
  shufflesum::Rng rng(config->seed);
  absl::StatusOr<shufflesum::AuditVerdict> verdict = shufflesum::MonteCarloAudit(
      pair, p, budget, config->trials, rng);
  if (!verdict.ok()) return Fail(verdict.status());
  std::cout << absl::StrFormat(
      "audit n=%d d=%d k=%d t=%d gamma=%.6g trials=%d cells=%d\n"
      "  empirical eps=%.6f conservative eps=%.6f theoretical eps=%.6f\n"
      "  hard failure=%s verdict=%s\n",
      p.n, p.d, p.k, p.t, p.gamma, verdict->trials, verdict->cells,
      verdict->empirical_epsilon, verdict->conservative_epsilon,
      verdict->theoretical_epsilon, verdict->hard_failure ? "yes" : "no",
      verdict->pass ? "PASS" : "FAIL");
  return verdict->pass ? kExitOk : kExitAuditFailure;
}

int RunIngestCheck(const Flags& flags, const CLI::App& app) {
  if (flags.dataset.empty()) {
    return Fail(absl::InvalidArgumentError("ingest-check requires --dataset"));
  }
  absl::StatusOr<shufflesum::Normalization> norm =
      shufflesum::ParseNormalization(flags.normalize);
  if (!norm.ok()) return Fail(norm.status());
  shufflesum::IngestOptions options;
  options.drop_label = flags.drop_label;
  options.normalize = *norm;
  absl::StatusOr<shufflesum::DatasetMatrix> data =
      shufflesum::IngestCsv(flags.dataset, options);
  if (!data.ok()) return Fail(data.status());
  shufflesum::DatasetMatrix shaped = *std::move(data);
  if (app.count("--n") > 0 || app.count("--d") > 0) {
    shaped = shufflesum::Reshape(shaped, app.count("--n") ? flags.n : shaped.rows(),
                                 app.count("--d") ? flags.d : shaped.cols());
  }
  double lo = 1.0, hi = 0.0;
  for (double v : shaped.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::cout << absl::StrFormat("rows=%d cols=%d min=%g max=%g\n", shaped.rows(),
                               shaped.cols(), lo, hi);
  for (const std::string& note : shaped.provenance()) {
    std::cout << "  " << note << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private vector summation in the shuffle model"};
  app.set_config("--config", "", "Flat key=value file mirroring the flags");
  app.require_subcommand(1);

  Flags flags;
  app.add_option("--d", flags.d, "Vector dimension")->capture_default_str();
  app.add_option("--k", flags.k, "Quantization level, or 'auto'")
      ->capture_default_str();
  app.add_option("--n", flags.n, "Number of users")->capture_default_str();
  app.add_option("--t", flags.t, "Coordinates reported per user")
      ->capture_default_str();
  app.add_option("--eps", flags.eps, "Target epsilon")->capture_default_str();
  app.add_option("--delta", flags.delta, "Target delta")->capture_default_str();
  app.add_option("--trials", flags.trials, "Trials per point")
      ->capture_default_str();
  app.add_option("--seed", flags.seed, "Master seed")->capture_default_str();
  app.add_option("--axis", flags.axis, "Sweep axis: t|k|d|n|eps")
      ->capture_default_str();
  app.add_option("--values", flags.values, "Sweep values")->delimiter(',');
  app.add_option("--dataset", flags.dataset, "CSV dataset (default synthetic)");
  app.add_flag("--drop-label", flags.drop_label, "Drop the last CSV column");
  app.add_option("--normalize", flags.normalize, "clamp|minmax")
      ->capture_default_str();
  app.add_option("--calibration", flags.calibration,
                 "auto|general|t1|manual (theorem1 is an alias for general)")
      ->capture_default_str();
  app.add_option("--gamma", flags.gamma, "Blanket probability (manual mode)");
  app.add_option("--out-dir", flags.out_dir, "Directory for CSV outputs");
  app.add_option("--threads", flags.threads, "Worker threads (0 = all cores)");

  CLI::App* params = app.add_subcommand("params", "Print the calibration");
  CLI::App* run = app.add_subcommand("run", "Run a single experiment point");
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep one parameter axis");
  CLI::App* audit = app.add_subcommand("audit", "Monte-Carlo privacy audit");
  CLI::App* ingest = app.add_subcommand("ingest-check", "Validate a dataset");
  for (CLI::App* sub : {params, run, sweep, audit, ingest}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (audit->parsed()) return RunAudit(flags, app);
  if (ingest->parsed()) return RunIngestCheck(flags, app);

  if (run->parsed()) {
    flags.axis = "none";
    flags.values.clear();
  }
  if (sweep->parsed() && (flags.axis == "none" || flags.values.empty())) {
    return Fail(absl::InvalidArgumentError("sweep requires --axis and --values"));
  }
  absl::StatusOr<ExperimentConfig> config = BuildConfig(flags);
  if (!config.ok()) return Fail(config.status());
  if (params->parsed()) return RunParams(*config);
  return RunExperiment(*config, flags.out_dir);
}
