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

#include "shufflesum/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_replace.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "absl/strings/strip.h"
#include "shufflesum/randomizer.h"
#include "shufflesum/shuffle_analyze.h"

namespace shufflesum {
namespace {

// The synthetic dataset stands in for a fixed input file, so its seed does
// not follow the experiment's master seed.
constexpr uint64_t kSyntheticDataSeed = 0x5eed'ec60'0000'0001ULL;

// Shortest representation that parses back to the same double.
std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename Fn>
void ParallelFor(int count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> workers;
  const unsigned used = std::min<unsigned>(threads, count);
  workers.reserve(used);
  for (unsigned w = 0; w < used; ++w) {
    workers.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  }
}

absl::StatusOr<int> AsInteger(double value, const char* what) {
  if (value != std::round(value) || std::abs(value) > 1e9) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s sweep value %g is not an integer", what, value));
  }
  return static_cast<int>(std::lround(value));
}

absl::StatusOr<double> BoundFor(const PointSetup& setup) {
  absl::StatusOr<BoundReport> report =
      setup.bound_kind == BoundKind::kTightT1
          ? BoundMseT1(setup.params, setup.budget)
          : BoundMseGeneral(setup.params, setup.budget);
  if (!report.ok()) return report.status();
  return report->mse_bound;
}

double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::string CsvSafe(std::string text) {
  return absl::StrReplaceAll(text, {{",", ";"}, {"\n", " "}});
}

}  // namespace

std::string AxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNone: return "none";
    case SweepAxis::kT: return "t";
    case SweepAxis::kK: return "k";
    case SweepAxis::kD: return "d";
    case SweepAxis::kN: return "n";
    case SweepAxis::kEpsilon: return "eps";
  }
  return "none";
}

absl::StatusOr<SweepAxis> ParseAxis(const std::string& name) {
  for (SweepAxis axis : {SweepAxis::kNone, SweepAxis::kT, SweepAxis::kK,
                         SweepAxis::kD, SweepAxis::kN, SweepAxis::kEpsilon}) {
    if (AxisName(axis) == name) return axis;
  }
  if (name == "epsilon") return SweepAxis::kEpsilon;
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown sweep axis '%s' (t|k|d|n|eps)", name));
}

std::string CalibrationName(CalibrationMode mode) {
  switch (mode) {
    case CalibrationMode::kAuto: return "auto";
    case CalibrationMode::kGeneral: return "general";
    case CalibrationMode::kT1: return "t1";
    case CalibrationMode::kManual: return "manual";
  }
  return "auto";
}

absl::StatusOr<CalibrationMode> ParseCalibration(const std::string& name) {
  for (CalibrationMode mode :
       {CalibrationMode::kAuto, CalibrationMode::kGeneral, CalibrationMode::kT1,
        CalibrationMode::kManual}) {
    if (CalibrationName(mode) == name) return mode;
  }
  if (name == "t1-tight") return CalibrationMode::kT1;
  if (name == "theorem1") return CalibrationMode::kGeneral;
  return absl::InvalidArgumentError(absl::StrFormat(
      "unknown calibration '%s' (general|t1|manual|auto)", name));
}

absl::Status ValidateConfig(const ExperimentConfig& config) {
  if (config.trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (config.axis != SweepAxis::kNone && config.values.empty()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sweep axis '%s' needs at least one value",
                        AxisName(config.axis)));
  }
  if (config.calibration == CalibrationMode::kManual &&
      !(config.manual_gamma >= 0.0 && config.manual_gamma <= 1.0)) {
    return absl::InvalidArgumentError("manual gamma must lie in [0, 1]");
  }
  return absl::OkStatus();
}

std::vector<double> AxisValues(const ExperimentConfig& config) {
  if (config.axis == SweepAxis::kNone) return {0.0};
  return config.values;
}

absl::StatusOr<PointSetup> ResolvePoint(const ExperimentConfig& config,
                                        double value) {
  ProtocolParams params{config.d, config.k, config.n, config.t, 0.0};
  double epsilon = config.epsilon;
  bool k_from_axis = false;
  switch (config.axis) {
    case SweepAxis::kNone:
      break;
    case SweepAxis::kT: {
      absl::StatusOr<int> v = AsInteger(value, "t");
      if (!v.ok()) return v.status();
      params.t = *v;
      break;
    }
    case SweepAxis::kK: {
      absl::StatusOr<int> v = AsInteger(value, "k");
      if (!v.ok()) return v.status();
      params.k = *v;
      k_from_axis = true;
      break;
    }
    case SweepAxis::kD: {
      absl::StatusOr<int> v = AsInteger(value, "d");
      if (!v.ok()) return v.status();
      params.d = *v;
      break;
    }
    case SweepAxis::kN: {
      absl::StatusOr<int> v = AsInteger(value, "n");
      if (!v.ok()) return v.status();
      params.n = *v;
      break;
    }
    case SweepAxis::kEpsilon:
      epsilon = value;
      break;
  }

  absl::StatusOr<PrivacyBudget> budget =
      PrivacyBudget::Create(epsilon, config.delta);
  if (!budget.ok()) return budget.status();

  CalibrationMode mode = config.calibration;
  if (mode == CalibrationMode::kAuto) {
    mode = params.t == 1 ? CalibrationMode::kT1 : CalibrationMode::kGeneral;
  }
  if (mode == CalibrationMode::kT1 && params.t != 1) {
    return absl::InvalidArgumentError(
        "t1 calibration only applies when t = 1");
  }
  const bool tight = params.t == 1 && mode != CalibrationMode::kGeneral;

  if (config.k_auto && !k_from_axis) {
    absl::StatusOr<int> k =
        tight ? ChooseKT1(*budget, params.d, params.n)
              : ChooseKGeneral(*budget, params.d, params.n, params.t);
    if (!k.ok()) return k.status();
    params.k = *k;
  }

  absl::StatusOr<double> gamma;
  switch (mode) {
    case CalibrationMode::kT1:
      gamma = CalibrateGammaT1(*budget, params.d, params.k, params.n);
      break;
    case CalibrationMode::kGeneral:
      gamma = CalibrateGammaGeneral(*budget, params.d, params.k, params.n,
                                    params.t);
      break;
    default:
      gamma = config.manual_gamma;
      break;
  }
  if (!gamma.ok()) return gamma.status();
  if (*gamma >= 1.0) {
    return absl::FailedPreconditionError(
        "infeasible parameters: gamma = 1 leaves no signal to debias");
  }
  params.gamma = *gamma;
  if (absl::Status s = ValidateParams(params); !s.ok()) return s;

  PointSetup setup;
  setup.value = value;
  setup.params = params;
  setup.budget = *budget;
  setup.calibration = mode;
  setup.bound_kind = tight ? BoundKind::kTightT1 : BoundKind::kGeneral;
  return setup;
}

uint64_t TrialSeed(uint64_t master_seed, int point_index, int trial) {
  const uint64_t path[] = {static_cast<uint64_t>(point_index),
                           static_cast<uint64_t>(trial)};
  return DeriveSeed(master_seed, path);
}

absl::StatusOr<TrialOutcome> RunTrial(const DatasetMatrix& data,
                                      const ProtocolParams& params,
                                      uint64_t seed) {
  if (data.rows() != params.n || data.cols() != params.d) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dataset is %d x %d, params need %d x %d", data.rows(), data.cols(),
        params.n, params.d));
  }
  Rng rng(seed);
  std::vector<Message> messages;
  messages.reserve(params.n);
  std::vector<double> sampled_truth(params.d, 0.0);
  for (int i = 0; i < params.n; ++i) {
    std::span<const double> x = data.row(i);
    absl::StatusOr<Message> message = RandomizeVector(x, params, rng);
    if (!message.ok()) return message.status();
    for (const MessageEntry& e : message->entries) {
      sampled_truth[e.coordinate] += x[e.coordinate];
    }
    messages.push_back(*std::move(message));
  }
  ShuffledBatch batch = Shuffle(std::move(messages), rng);
  absl::StatusOr<EstimateVector> est = Analyze(batch, params);
  if (!est.ok()) return est.status();
  absl::StatusOr<TrialResult> score = EmpiricalMse(*est, sampled_truth, params.n);
  if (!score.ok()) return score.status();

  TrialOutcome outcome;
  outcome.score = *std::move(score);
  for (int l = 0; l < params.d; ++l) {
    outcome.estimated_total += est->values[l];
    outcome.sampled_total += sampled_truth[l];
  }
  return outcome;
}

absl::StatusOr<DatasetMatrix> LoadExperimentData(
    const ExperimentConfig& config) {
  int max_n = config.n;
  int max_d = config.d;
  if (config.axis == SweepAxis::kN || config.axis == SweepAxis::kD) {
    for (double v : config.values) {
      const int iv = static_cast<int>(std::lround(v));
      if (config.axis == SweepAxis::kN) max_n = std::max(max_n, iv);
      if (config.axis == SweepAxis::kD) max_d = std::max(max_d, iv);
    }
  }
  if (config.dataset_path.empty()) {
    return SyntheticHeartbeats(max_n, max_d, kSyntheticDataSeed);
  }
  IngestOptions options;
  options.drop_label = config.drop_label;
  options.normalize = config.normalize;
  return IngestCsv(config.dataset_path, options);
}

absl::StatusOr<SweepResults> RunSweep(const ExperimentConfig& config) {
  absl::StatusOr<DatasetMatrix> data = LoadExperimentData(config);
  if (!data.ok()) return data.status();
  return RunSweep(config, *data);
}

absl::StatusOr<SweepResults> RunSweep(const ExperimentConfig& config,
                                      const DatasetMatrix& data) {
  if (absl::Status s = ValidateConfig(config); !s.ok()) return s;
  if (!data.InUnitRange()) {
    return absl::InvalidArgumentError("dataset entries must lie in [0, 1]");
  }
  const unsigned threads = config.threads > 0
                               ? config.threads
                               : std::max(1u, std::thread::hardware_concurrency());
  SweepResults results;
  results.axis = AxisName(config.axis);
  results.provenance = data.provenance();
  std::set<std::string> seen_provenance(results.provenance.begin(),
                                        results.provenance.end());
  std::set<std::string> seen_warnings;

  const std::vector<double> values = AxisValues(config);
  for (size_t point_index = 0; point_index < values.size(); ++point_index) {
    const double value = values[point_index];
    absl::StatusOr<PointSetup> setup = ResolvePoint(config, value);
    if (!setup.ok()) {
      if (setup.status().code() != absl::StatusCode::kFailedPrecondition) {
        return setup.status();
      }
      PointSummary skipped;
      skipped.axis = results.axis;
      skipped.value = value;
      skipped.skipped = true;
      skipped.reason = std::string(setup.status().message());
      results.points.push_back(std::move(skipped));
      continue;
    }
    const ProtocolParams& params = setup->params;
    if (config.delta >= 1.0 / params.n) {
      std::string warning = absl::StrFormat(
          "delta = %g is not below 1/n = %g (n = %d); the guarantee is weak",
          config.delta, 1.0 / params.n, params.n);
      if (seen_warnings.insert(warning).second) {
        results.warnings.push_back(std::move(warning));
      }
    }
    absl::StatusOr<double> bound = BoundFor(*setup);
    if (!bound.ok()) return bound.status();

    const DatasetMatrix point_data = Reshape(data, params.n, params.d);
    for (const std::string& note : point_data.provenance()) {
      if (seen_provenance.insert(note).second) {
        results.provenance.push_back(note);
      }
    }

    std::vector<absl::StatusOr<TrialOutcome>> outcomes(
        config.trials, absl::UnknownError("trial not run"));
    std::vector<uint64_t> seeds(config.trials);
    for (int trial = 0; trial < config.trials; ++trial) {
      seeds[trial] = TrialSeed(config.seed, static_cast<int>(point_index), trial);
    }
    ParallelFor(config.trials, threads, [&](int trial) {
      outcomes[trial] = RunTrial(point_data, params, seeds[trial]);
    });

    std::vector<TrialRow> point_rows;
    for (int trial = 0; trial < config.trials; ++trial) {
      if (!outcomes[trial].ok()) return outcomes[trial].status();
      TrialRow row;
      row.axis = results.axis;
      row.value = value;
      row.trial = trial;
      row.seed = seeds[trial];
      row.total_sq_err = outcomes[trial]->score.total_squared_error;
      row.normalized_mse = outcomes[trial]->score.normalized_mse;
      row.bound_mse = *bound;
      point_rows.push_back(row);
    }
    PointSummary summary = Summarize(point_rows).front();
    summary.k = params.k;
    summary.gamma = params.gamma;
    summary.calibration = CalibrationName(setup->calibration);
    results.points.push_back(std::move(summary));
    results.rows.insert(results.rows.end(), point_rows.begin(),
                        point_rows.end());
  }
  if (results.rows.empty()) {
    return absl::FailedPreconditionError(
        "infeasible parameters: no sweep point is feasible");
  }
  results.fit = FitSummary(results.axis, results.points);
  return results;
}

std::vector<PointSummary> Summarize(const std::vector<TrialRow>& rows) {
  std::vector<PointSummary> out;
  std::map<std::pair<std::string, double>, std::vector<double>> samples;
  for (const TrialRow& row : rows) {
    auto key = std::make_pair(row.axis, row.value);
    auto [it, inserted] = samples.try_emplace(key);
    if (inserted) {
      PointSummary point;
      point.axis = row.axis;
      point.value = row.value;
      point.bound_mse = row.bound_mse;
      out.push_back(point);
    }
    it->second.push_back(row.normalized_mse);
  }
  for (PointSummary& point : out) {
    const std::vector<double>& v = samples[{point.axis, point.value}];
    const double m = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= m;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    point.trials = static_cast<int>(v.size());
    point.mean_normalized_mse = mean;
    point.stderr_normalized_mse = v.size() > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
    point.median_normalized_mse = Median(v);
  }
  return out;
}

std::optional<PowerLawFit> FitSummary(const std::string& axis,
                                      const std::vector<PointSummary>& points) {
  if (axis != "d" && axis != "n" && axis != "eps") return std::nullopt;
  std::vector<double> xs, ys;
  for (const PointSummary& p : points) {
    if (p.skipped || !(p.mean_normalized_mse > 0.0)) continue;
    xs.push_back(p.value);
    ys.push_back(p.mean_normalized_mse);
  }
  absl::StatusOr<PowerLawFit> fit = FitPowerLaw(xs, ys);
  if (!fit.ok()) return std::nullopt;
  return *fit;
}

std::string FormatLongForm(const std::vector<TrialRow>& rows) {
  std::string out = absl::StrCat(kLongFormHeader, "\n");
  for (const TrialRow& r : rows) {
    absl::StrAppend(&out, r.axis, ",", FormatDouble(r.value), ",", r.trial, ",",
                    r.seed, ",", FormatDouble(r.total_sq_err), ",",
                    FormatDouble(r.normalized_mse), ",",
                    FormatDouble(r.bound_mse), "\n");
  }
  return out;
}

absl::StatusOr<std::vector<TrialRow>> ParseLongForm(const std::string& text) {
  std::vector<TrialRow> rows;
  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  auto parse_double = [](absl::string_view s, double& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
  };
  while (std::getline(in, line)) {
    ++line_number;
    absl::string_view view = absl::StripTrailingAsciiWhitespace(line);
    if (line_number == 1) {
      if (view != kLongFormHeader) {
        return absl::DataLossError("long-form CSV header mismatch");
      }
      continue;
    }
    if (view.empty()) continue;
    std::vector<absl::string_view> cells = absl::StrSplit(view, ',');
    TrialRow row;
    bool ok = cells.size() == 7;
    if (ok) {
      row.axis = std::string(cells[0]);
      auto [p1, e1] = std::from_chars(cells[2].data(),
                                      cells[2].data() + cells[2].size(), row.trial);
      auto [p2, e2] = std::from_chars(cells[3].data(),
                                      cells[3].data() + cells[3].size(), row.seed);
      ok = e1 == std::errc() && e2 == std::errc() &&
           p1 == cells[2].data() + cells[2].size() &&
           p2 == cells[3].data() + cells[3].size() &&
           parse_double(cells[1], row.value) &&
           parse_double(cells[4], row.total_sq_err) &&
           parse_double(cells[5], row.normalized_mse) &&
           parse_double(cells[6], row.bound_mse);
    }
    if (!ok) {
      return absl::DataLossError(
          absl::StrFormat("long-form CSV line %d is malformed", line_number));
    }
    rows.push_back(std::move(row));
  }
  if (line_number == 0) return absl::DataLossError("long-form CSV is empty");
  return rows;
}

absl::StatusOr<std::vector<TrialRow>> ReadLongFormCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrFormat("cannot open '%s'", path));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseLongForm(buffer.str());
}

std::string FormatSummary(const SweepResults& results) {
  std::string out =
      "axis,value,status,k,gamma,calibration,trials,mean_normalized_mse,"
      "stderr_normalized_mse,median_normalized_mse,bound_mse,fitted_exponent,"
      "fit_r_squared,reason\n";
  const std::string exponent =
      results.fit ? FormatDouble(results.fit->exponent) : "";
  const std::string r2 = results.fit ? FormatDouble(results.fit->r_squared) : "";
  for (const PointSummary& p : results.points) {
    if (p.skipped) {
      absl::StrAppend(&out, p.axis, ",", FormatDouble(p.value),
                      ",skipped,,,,0,,,,,", exponent, ",", r2, ",",
                      CsvSafe(p.reason), "\n");
      continue;
    }
    absl::StrAppend(&out, p.axis, ",", FormatDouble(p.value), ",ok,", p.k, ",",
                    FormatDouble(p.gamma), ",", p.calibration, ",", p.trials,
                    ",", FormatDouble(p.mean_normalized_mse), ",",
                    FormatDouble(p.stderr_normalized_mse), ",",
                    FormatDouble(p.median_normalized_mse), ",",
                    FormatDouble(p.bound_mse), ",", exponent, ",", r2, ",\n");
  }
  return out;
}

std::string FormatPlotData(const SweepResults& results) {
  std::string out = "x,mean,stderr,fitted,bound\n";
  for (const PointSummary& p : results.points) {
    if (p.skipped) continue;
    std::string fitted;
    if (results.fit && p.value > 0.0) {
      fitted = FormatDouble(std::exp(results.fit->log_coefficient) *
                            std::pow(p.value, results.fit->exponent));
    }
    absl::StrAppend(&out, FormatDouble(p.value), ",",
                    FormatDouble(p.mean_normalized_mse), ",",
                    FormatDouble(p.stderr_normalized_mse), ",", fitted, ",",
                    FormatDouble(p.bound_mse), "\n");
  }
  return out;
}

absl::StatusOr<OutputPaths> EmitOutputs(const SweepResults& results,
                                        const std::string& out_dir,
                                        bool plot_data) {
  if (results.rows.empty()) {
    return absl::InvalidArgumentError("no results to write");
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    return absl::UnavailableError(absl::StrFormat(
        "cannot create output directory '%s': %s", out_dir, ec.message()));
  }
  auto write = [](const fs::path& path, const std::string& text) -> absl::Status {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      return absl::UnavailableError(
          absl::StrFormat("cannot write '%s'", path.string()));
    }
    out << text;
    out.close();
    if (!out) {
      return absl::UnavailableError(
          absl::StrFormat("failed writing '%s'", path.string()));
    }
    return absl::OkStatus();
  };
  OutputPaths paths;
  paths.trials = (fs::path(out_dir) / "trials.csv").string();
  paths.summary = (fs::path(out_dir) / "summary.csv").string();
  if (absl::Status s = write(paths.trials, FormatLongForm(results.rows)); !s.ok())
    return s;
  if (absl::Status s = write(paths.summary, FormatSummary(results)); !s.ok())
    return s;
  if (plot_data) {
    paths.plot = (fs::path(out_dir) / "plot.csv").string();
    if (absl::Status s = write(paths.plot, FormatPlotData(results)); !s.ok())
      return s;
  }
  return paths;
}

}  // namespace shufflesum
