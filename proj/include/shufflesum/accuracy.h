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

// Empirical error scoring, closed-form error bounds, and log-log power-law
// fitting for the parameter-dependence experiments.

#ifndef SHUFFLESUM_ACCURACY_H_
#define SHUFFLESUM_ACCURACY_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "shufflesum/params.h"
#include "shufflesum/shuffle_analyze.h"

namespace shufflesum {

// One trial's error against the sampled-coordinate truth
// s_l = sum of x_i^(l) over users that reported coordinate l.
struct TrialResult {
  double total_squared_error = 0.0;  // sum_l (z_l - s_l)^2
  double normalized_mse = 0.0;       // total_squared_error * (d / n)^2
  std::vector<double> per_coordinate_sq_errors;
};

absl::StatusOr<TrialResult> EmpiricalMse(const EstimateVector& estimates,
                                         std::span<const double> sampled_truth,
                                         int n);

enum class BoundKind { kGeneral, kTightT1 };

struct BoundReport {
  double mse_bound = 0.0;
  double sigma_bound = 0.0;
  EpsilonRegime regime = EpsilonRegime::kBelowOne;
  BoundKind kind = BoundKind::kGeneral;
};

// Normalized MSE bound for general t. Uses params.gamma as calibrated; it is
// not recomputed here.
absl::StatusOr<BoundReport> BoundMseGeneral(const ProtocolParams& params,
                                            const PrivacyBudget& budget);

// Tightened normalized MSE bound; only defined for t = 1.
absl::StatusOr<BoundReport> BoundMseT1(const ProtocolParams& params,
                                       const PrivacyBudget& budget);

// Standard-deviation bounds, transcribed directly from their own closed forms
// (not as square roots of the MSE bounds). `kind` selects general or t = 1.
absl::StatusOr<BoundReport> BoundSigma(const ProtocolParams& params,
                                       const PrivacyBudget& budget,
                                       BoundKind kind);

struct PowerLawFit {
  double exponent = 0.0;
  double log_coefficient = 0.0;  // y ~ exp(log_coefficient) * x^exponent
  double r_squared = 0.0;
};

// Least-squares line through (ln x, ln y). Needs at least 3 positive points
// and non-constant xs.
absl::StatusOr<PowerLawFit> FitPowerLaw(std::span<const double> xs,
                                        std::span<const double> ys);

}  // namespace shufflesum

#endif  // SHUFFLESUM_ACCURACY_H_
