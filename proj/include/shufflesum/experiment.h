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

// Seeded experiment harness: resolves each sweep point into calibrated
// protocol parameters, runs independent trials of the full pipeline
// (randomize, shuffle, analyze, score), and reads/writes the CSV artifacts.

#ifndef SHUFFLESUM_EXPERIMENT_H_
#define SHUFFLESUM_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "shufflesum/accuracy.h"
#include "shufflesum/dataset.h"
#include "shufflesum/params.h"

namespace shufflesum {

enum class SweepAxis { kNone, kT, kK, kD, kN, kEpsilon };

std::string AxisName(SweepAxis axis);
absl::StatusOr<SweepAxis> ParseAxis(const std::string& name);

// kAuto picks kT1 when t == 1 and kGeneral otherwise.
enum class CalibrationMode { kAuto, kGeneral, kT1, kManual };

std::string CalibrationName(CalibrationMode mode);
absl::StatusOr<CalibrationMode> ParseCalibration(const std::string& name);

struct ExperimentConfig {
  int d = 100;
  int k = 3;
  bool k_auto = false;  // pick k analytically at every point
  int n = 50000;
  int t = 1;
  double epsilon = 0.95;
  double delta = 0.5;
  CalibrationMode calibration = CalibrationMode::kAuto;
  double manual_gamma = 0.0;
  SweepAxis axis = SweepAxis::kNone;
  std::vector<double> values;
  int trials = 30;
  uint64_t seed = 1;
  std::string dataset_path;  // empty: synthetic heartbeats
  bool drop_label = false;
  Normalization normalize = Normalization::kClamp;
  unsigned threads = 0;  // 0: hardware concurrency
};

absl::Status ValidateConfig(const ExperimentConfig& config);

// A sweep point after calibration.
struct PointSetup {
  double value = 0.0;
  ProtocolParams params;
  PrivacyBudget budget;
  CalibrationMode calibration = CalibrationMode::kAuto;  // as resolved
  BoundKind bound_kind = BoundKind::kGeneral;
};

// FailedPrecondition when the point is infeasible (gamma > 1 or gamma == 1);
// InvalidArgument when the configuration itself is malformed.
absl::StatusOr<PointSetup> ResolvePoint(const ExperimentConfig& config,
                                        double value);

// Axis values in sweep order; a single 0 for SweepAxis::kNone.
std::vector<double> AxisValues(const ExperimentConfig& config);

struct TrialOutcome {
  TrialResult score;
  double estimated_total = 0.0;  // sum_l z_l
  double sampled_total = 0.0;    // sum_l s_l
};

// One trial of the full pipeline on `data` (exactly n rows of d columns).
absl::StatusOr<TrialOutcome> RunTrial(const DatasetMatrix& data,
                                      const ProtocolParams& params,
                                      uint64_t seed);

// Seed for trial `trial` of point `point_index`.
uint64_t TrialSeed(uint64_t master_seed, int point_index, int trial);

// One long-form result row.
struct TrialRow {
  std::string axis;
  double value = 0.0;
  int trial = 0;
  uint64_t seed = 0;
  double total_sq_err = 0.0;
  double normalized_mse = 0.0;
  double bound_mse = 0.0;
};

struct PointSummary {
  std::string axis;
  double value = 0.0;
  bool skipped = false;
  std::string reason;
  int k = 0;
  double gamma = 0.0;
  std::string calibration;
  int trials = 0;
  double mean_normalized_mse = 0.0;
  double stderr_normalized_mse = 0.0;
  double median_normalized_mse = 0.0;
  double bound_mse = 0.0;
};

struct SweepResults {
  std::string axis;
  std::vector<TrialRow> rows;
  std::vector<PointSummary> points;  // feasible and skipped, in sweep order
  std::optional<PowerLawFit> fit;    // d, n, and eps sweeps only
  std::vector<std::string> provenance;
  std::vector<std::string> warnings;
};

// Loads the configured dataset (or generates the synthetic one) sized to
// cover every point of the sweep.
absl::StatusOr<DatasetMatrix> LoadExperimentData(const ExperimentConfig& config);

absl::StatusOr<SweepResults> RunSweep(const ExperimentConfig& config,
                                      const DatasetMatrix& data);
absl::StatusOr<SweepResults> RunSweep(const ExperimentConfig& config);

// Per-point statistics computed from long-form rows alone, grouped by
// (axis, value) in order of first appearance. Only the statistics fields are
// populated.
std::vector<PointSummary> Summarize(const std::vector<TrialRow>& rows);

// Power-law fit of mean normalized MSE against the axis value over feasible
// points, for the d, n and eps axes.
std::optional<PowerLawFit> FitSummary(const std::string& axis,
                                      const std::vector<PointSummary>& points);

inline constexpr char kLongFormHeader[] =
    "axis,value,trial,seed,total_sq_err,normalized_mse,bound_mse";

std::string FormatLongForm(const std::vector<TrialRow>& rows);
absl::StatusOr<std::vector<TrialRow>> ParseLongForm(const std::string& text);
absl::StatusOr<std::vector<TrialRow>> ReadLongFormCsv(const std::string& path);

std::string FormatSummary(const SweepResults& results);
std::string FormatPlotData(const SweepResults& results);

struct OutputPaths {
  std::string trials;
  std::string summary;
  std::string plot;
};

// Writes trials.csv, summary.csv and, when `plot_data` is set, plot.csv into
// `out_dir` (created if missing). Unavailable when a file cannot be written.
absl::StatusOr<OutputPaths> EmitOutputs(const SweepResults& results,
                                        const std::string& out_dir,
                                        bool plot_data = true);

}  // namespace shufflesum

#endif  // SHUFFLESUM_EXPERIMENT_H_
