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

// Acceptance suite: reproduces the accuracy experiments at full scale and
// checks the privacy analysis, printing one PASS/FAIL line per criterion.
//
//   acceptance_test [output_dir]
//
// When output_dir is given, each sweep's CSV files are written below it.
// Exit status is 0 only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "shufflesum/accuracy.h"
#include "shufflesum/audit.h"
#include "shufflesum/dataset.h"
#include "shufflesum/experiment.h"
#include "shufflesum/params.h"
#include "shufflesum/randomizer.h"

namespace shufflesum {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string g_output_dir;

// Runs a sweep on the synthetic data; aborts the criterion on error.
absl::StatusOr<SweepResults> Sweep(const ExperimentConfig& config,
                                   const std::string& name) {
  absl::StatusOr<SweepResults> results = RunSweep(config);
  if (results.ok() && !g_output_dir.empty()) {
    absl::StatusOr<OutputPaths> paths =
        EmitOutputs(*results, (std::filesystem::path(g_output_dir) / name).string());
    if (!paths.ok()) return paths.status();
  }
  return results;
}

std::vector<double> LogSpaced(double lo, double hi, int count, bool integral) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    double v = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    if (integral) v = std::round(v);
    out.push_back(v);
  }
  return out;
}

std::string Means(const SweepResults& r) {
  std::vector<std::string> parts;
  for (const PointSummary& p : r.points) {
    parts.push_back(p.skipped ? absl::StrFormat("%g:skipped", p.value)
                              : absl::StrFormat("%g:%.4g", p.value,
                                                p.mean_normalized_mse));
  }
  return absl::StrJoin(parts, " ");
}

const PointSummary* Feasible(const SweepResults& r, double value) {
  for (const PointSummary& p : r.points) {
    if (p.value == value && !p.skipped) return &p;
  }
  return nullptr;
}

// 1. t = 1 minimizes the error, by at least 3 combined standard errors over t = 2.
Outcome OptimalT() {
  ExperimentConfig config;
  config.axis = SweepAxis::kT;
  config.values = {1, 2, 3, 4, 5};
  config.trials = 30;
  config.seed = 101;
  absl::StatusOr<SweepResults> r = Sweep(config, "t_sweep");
  if (!r.ok()) return {false, r.status().ToString()};
  const PointSummary* t1 = Feasible(*r, 1);
  const PointSummary* t2 = Feasible(*r, 2);
  if (t1 == nullptr || t2 == nullptr) return {false, "t=1 or t=2 infeasible"};
  bool minimal = true;
  for (const PointSummary& p : r->points) {
    if (!p.skipped && p.mean_normalized_mse < t1->mean_normalized_mse) minimal = false;
  }
  const double gap = t2->mean_normalized_mse - t1->mean_normalized_mse;
  const double combined = std::hypot(t1->stderr_normalized_mse, t2->stderr_normalized_mse);
  return {minimal && gap >= 3 * combined,
          absl::StrFormat("means {%s}; t2-t1 gap = %.1f combined SE", Means(*r),
                          gap / combined)};
}

// 2. The k sweep is minimized at k in {2, 3, 4}.
Outcome OptimalK() {
  ExperimentConfig config;
  config.axis = SweepAxis::kK;
  config.values = {1, 2, 3, 4, 5, 6, 7};
  config.trials = 30;
  config.seed = 202;
  absl::StatusOr<SweepResults> r = Sweep(config, "k_sweep");
  if (!r.ok()) return {false, r.status().ToString()};
  const PointSummary* best = nullptr;
  for (const PointSummary& p : r->points) {
    if (p.skipped) continue;
    if (best == nullptr || p.mean_normalized_mse < best->mean_normalized_mse) best = &p;
  }
  if (best == nullptr) return {false, "no feasible k"};
  return {best->value >= 2 && best->value <= 4,
          absl::StrFormat("argmin k = %g; means {%s}", best->value, Means(*r))};
}

// 3. Median normalized MSE at the defaults is below 0.3.
Outcome AbsoluteError() {
  ExperimentConfig config;
  config.trials = 31;
  config.seed = 303;
  absl::StatusOr<SweepResults> r = Sweep(config, "defaults");
  if (!r.ok()) return {false, r.status().ToString()};
  const PointSummary& p = r->points.front();
  return {p.median_normalized_mse < 0.3,
          absl::StrFormat("median = %.5f, mean = %.5f, bound = %.5f over %d trials",
                          p.median_normalized_mse, p.mean_normalized_mse,
                          p.bound_mse, p.trials)};
}

Outcome ExponentCheck(ExperimentConfig config, const std::string& name, double lo,
                      double hi) {
  absl::StatusOr<SweepResults> r = Sweep(config, name);
  if (!r.ok()) return {false, r.status().ToString()};
  int feasible = 0;
  for (const PointSummary& p : r->points) feasible += !p.skipped;
  if (!r->fit || feasible < 6) {
    return {false, absl::StrFormat("only %d feasible points", feasible)};
  }
  std::vector<std::string> ks;
  for (const PointSummary& p : r->points) {
    if (!p.skipped) ks.push_back(absl::StrCat(p.k));
  }
  return {r->fit->exponent >= lo && r->fit->exponent <= hi,
          absl::StrFormat("exponent %.3f (target [%g, %g]), r^2 %.3f; k per point {%s}; means {%s}",
                          r->fit->exponent, lo, hi, r->fit->r_squared,
                          absl::StrJoin(ks, ","), Means(*r))};
}

// 4-6. Power-law dependence on d, n and eps. Gamma is recalibrated and k
// chosen analytically at every point.
Outcome DDependence() {
  ExperimentConfig config;
  config.axis = SweepAxis::kD;
  config.values = LogSpaced(50, 400, 8, true);
  config.k_auto = true;
  config.trials = 30;
  config.seed = 404;
  return ExponentCheck(config, "d_sweep", 2.0, 3.3);
}

Outcome NDependence() {
  ExperimentConfig config;
  config.axis = SweepAxis::kN;
  config.values = LogSpaced(10000, 100000, 8, true);
  config.k_auto = true;
  config.trials = 60;
  config.seed = 505;
  return ExponentCheck(config, "n_sweep", -1.9, -0.9);
}

Outcome EpsDependence() {
  ExperimentConfig low;
  low.axis = SweepAxis::kEpsilon;
  low.values = LogSpaced(0.3, 0.95, 8, false);
  low.k_auto = true;
  low.trials = 30;
  low.seed = 606;
  Outcome a = ExponentCheck(low, "eps_low_sweep", -2.0, -0.7);
  ExperimentConfig high = low;
  high.values = LogSpaced(1.0, 5.5, 8, false);
  high.seed = 607;
  Outcome b = ExponentCheck(high, "eps_high_sweep", -2.3, -0.4);
  return {a.pass && b.pass,
          absl::StrCat("eps<1: ", a.detail, " | 1<=eps<6: ", b.detail)};
}

// 7. Unbiasedness of the summed estimate on a small instance.
Outcome Unbiasedness() {
  const ProtocolParams params{5, 3, 200, 1, 0.3};
  const DatasetMatrix data = SyntheticHeartbeats(params.n, params.d, 707);
  constexpr int kTrials = 100000;
  double sum_diff = 0.0, sum_diff_sq = 0.0, sum_est = 0.0, sum_truth = 0.0;
  for (int trial = 0; trial < kTrials; ++trial) {
    absl::StatusOr<TrialOutcome> o = RunTrial(data, params, TrialSeed(707, 0, trial));
    if (!o.ok()) return {false, o.status().ToString()};
    const double diff = o->estimated_total - o->sampled_total;
    sum_diff += diff;
    sum_diff_sq += diff * diff;
    sum_est += o->estimated_total;
    sum_truth += o->sampled_total;
  }
  const double mean = sum_diff / kTrials;
  const double se = std::sqrt((sum_diff_sq / kTrials - mean * mean) / (kTrials - 1));
  return {std::abs(mean) <= 3 * se,
          absl::StrFormat("mean estimate %.5f vs mean sampled truth %.5f; "
                          "difference %.5f = %.2f standard errors",
                          sum_est / kTrials, sum_truth / kTrials, mean,
                          std::abs(mean) / se)};
}

// 8. Mean normalized MSE sits below the matching bound on a random grid.
Outcome BoundDominance() {
  std::mt19937_64 rng(808);
  std::uniform_int_distribution<int> d_dist(20, 200), t_dist(1, 3);
  std::uniform_real_distribution<double> log_n(std::log(2e4), std::log(1e5));
  std::uniform_real_distribution<double> eps_dist(0.3, 5.5);
  std::uniform_real_distribution<double> log_delta(std::log(1e-3), std::log(0.5));
  int points = 0, attempts = 0, violations = 0;
  double worst_ratio = 0.0;
  std::string worst;
  while (points < 20 && attempts < 10000) {
    ++attempts;
    ExperimentConfig config;
    config.d = d_dist(rng);
    config.n = static_cast<int>(std::exp(log_n(rng)));
    config.t = std::min(t_dist(rng), config.d);
    config.epsilon = eps_dist(rng);
    config.delta = std::exp(log_delta(rng));
    config.k_auto = true;
    config.trials = 30;
    config.seed = 808 + attempts;
    if (!ResolvePoint(config, 0.0).ok()) continue;
    absl::StatusOr<SweepResults> r = RunSweep(config);
    if (!r.ok()) return {false, r.status().ToString()};
    ++points;
    const PointSummary& p = r->points.front();
    const double ratio = p.mean_normalized_mse / p.bound_mse;
    if (ratio > 1.0) ++violations;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst = absl::StrFormat("d=%d n=%d t=%d eps=%.3f delta=%.4g k=%d gamma=%.3f",
                              config.d, config.n, config.t, config.epsilon,
                              config.delta, p.k, p.gamma);
    }
  }
  return {points == 20 && violations == 0,
          absl::StrFormat("%d points, %d violations; largest mean/bound = %.3f at %s",
                          points, violations, worst_ratio, worst)};
}

// 9. Exact tail with general calibration meets delta / t, and never
// exceeds the Chernoff bound where that bound applies.
Outcome TailEndpoint() {
  int points = 0, endpoint_failures = 0, chernoff_checked = 0, chernoff_failures = 0;
  double worst = 0.0;
  const int d = 10, k = 2, n = 1000001;
  for (double eps : {0.3, 0.6, 0.9, 2.0, 4.0}) {
    for (double delta : {1e-4, 1e-2, 0.3}) {
      for (int t : {1, 2, 4}) {
        const PrivacyBudget budget = PrivacyBudget::Create(eps, delta).value();
        absl::StatusOr<double> gamma = CalibrateGammaGeneral(budget, d, k, n, t);
        if (!gamma.ok()) continue;
        absl::StatusOr<ComposedBudget> composed = ComposeEpsilonPrime(budget, t);
        if (!composed.ok()) return {false, composed.status().ToString()};
        const int64_t expected_s = static_cast<int64_t>(n - 1) * t / d;
        absl::StatusOr<TailParams> tp = MakeTailParams(
            expected_s, *gamma, k, composed->epsilon_prime, t, delta);
        if (!tp.ok()) return {false, tp.status().ToString()};
        absl::StatusOr<TailProbability> exact = ExactTailProbability(*tp, *gamma, k);
        if (!exact.ok()) return {false, exact.status().ToString()};
        ++points;
        worst = std::max(worst, exact->value / (delta / t));
        if (exact->value > delta / t) ++endpoint_failures;
        for (double scale : {1.0, 1.5, 2.0, 2.5, 4.0}) {
          const int64_t s = static_cast<int64_t>(scale * expected_s);
          absl::StatusOr<TailParams> sp =
              MakeTailParams(s, *gamma, k, composed->epsilon_prime, t, delta);
          if (!sp.ok()) return {false, sp.status().ToString()};
          absl::StatusOr<double> bound = ChernoffUpperBound(*sp);
          if (!bound.ok()) continue;
          absl::StatusOr<TailProbability> e = ExactTailProbability(*sp, *gamma, k);
          if (!e.ok()) return {false, e.status().ToString()};
          ++chernoff_checked;
          if (e->value > *bound) ++chernoff_failures;
        }
      }
    }
  }
  return {points >= 10 && endpoint_failures == 0 && chernoff_checked > 0 &&
              chernoff_failures == 0,
          absl::StrFormat("%d feasible points, %d above delta/t (largest ratio %.3g); "
                          "exact <= Chernoff at %d/%d applicable points",
                          points, endpoint_failures, worst,
                          chernoff_checked - chernoff_failures, chernoff_checked)};
}

// 10. Monte-Carlo audit of the calibrated tiny instance, plus the gamma = 1
// control.
Outcome Audit() {
  constexpr int64_t kTrials = 10000000;
  const PrivacyBudget budget = PrivacyBudget::Create(5.5, 0.1).value();
  absl::StatusOr<double> gamma = CalibrateGammaT1(budget, 1, 1, 10);
  if (!gamma.ok()) return {false, gamma.status().ToString()};
  NeighborPair pair;
  pair.dataset.assign(10, std::vector<double>{0.0});
  pair.alt_last = {1.0};
  Rng rng(1010);
  absl::StatusOr<AuditVerdict> calibrated =
      MonteCarloAudit(pair, {1, 1, 10, 1, *gamma}, budget, kTrials, rng);
  if (!calibrated.ok()) return {false, calibrated.status().ToString()};
  absl::StatusOr<AuditVerdict> control =
      MonteCarloAudit(pair, {1, 1, 10, 1, 1.0}, budget, kTrials, rng);
  if (!control.ok()) return {false, control.status().ToString()};
  return {calibrated->pass && control->empirical_epsilon <= 0.02,
          absl::StrFormat("calibrated gamma %.4f: empirical eps %.4f, conservative %.4f "
                          "vs %.2f, %s; gamma=1 control: empirical eps %.5f",
                          *gamma, calibrated->empirical_epsilon,
                          calibrated->conservative_epsilon,
                          calibrated->theoretical_epsilon,
                          calibrated->pass ? "pass" : "fail",
                          control->empirical_epsilon)};
}

// 11. Re-running a sweep with the same seed yields a byte-identical CSV.
Outcome Determinism() {
  ExperimentConfig config;
  config.axis = SweepAxis::kT;
  config.values = {1, 2, 3};
  config.trials = 10;
  config.seed = 1111;
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "shufflesum_acceptance";
  std::vector<std::string> contents;
  for (const char* run : {"first", "second"}) {
    absl::StatusOr<SweepResults> r = RunSweep(config);
    if (!r.ok()) return {false, r.status().ToString()};
    absl::StatusOr<OutputPaths> paths = EmitOutputs(*r, (dir / run).string());
    if (!paths.ok()) return {false, paths.status().ToString()};
    std::ifstream in(paths->trials, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    contents.push_back(buffer.str());
  }
  return {!contents[0].empty() && contents[0] == contents[1],
          absl::StrFormat("%d bytes per long-form CSV, identical: %s",
                          contents[0].size(), contents[0] == contents[1] ? "yes" : "no")};
}

}  // namespace
}  // namespace shufflesum

int main(int argc, char** argv) {
  if (argc > 1) shufflesum::g_output_dir = argv[1];
  struct Entry {
    int id;
    const char* name;
    std::function<shufflesum::Outcome()> run;
  };
  const std::vector<Entry> entries = {
      {1, "optimal t", shufflesum::OptimalT},
      {2, "optimal k", shufflesum::OptimalK},
      {3, "absolute error", shufflesum::AbsoluteError},
      {4, "d dependence", shufflesum::DDependence},
      {5, "n dependence", shufflesum::NDependence},
      {6, "eps dependence", shufflesum::EpsDependence},
      {7, "unbiasedness", shufflesum::Unbiasedness},
      {8, "bound dominance", shufflesum::BoundDominance},
      {9, "tail endpoint", shufflesum::TailEndpoint},
      {10, "Monte-Carlo audit", shufflesum::Audit},
      {11, "determinism", shufflesum::Determinism},
  };
  int passed = 0;
  for (const Entry& e : entries) {
    const auto start = std::chrono::steady_clock::now();
    const shufflesum::Outcome o = e.run();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    passed += o.pass;
    std::cout << absl::StrFormat("[%s] criterion %d (%s, %.1fs): %s\n",
                                 o.pass ? "PASS" : "FAIL", e.id, e.name, seconds,
                                 o.detail)
              << std::flush;
  }
  std::cout << absl::StrFormat("%d/%d criteria passed\n", passed, entries.size());
  return passed == static_cast<int>(entries.size()) ? 0 : 1;
}
