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

#include "shufflesum/accuracy.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"

namespace shufflesum {
namespace {

absl::Status CheckBoundInputs(const ProtocolParams& params,
                              const PrivacyBudget& budget) {
  if (absl::Status s = ValidateParams(params); !s.ok()) return s;
  if (absl::Status s = ValidateBudget(budget); !s.ok()) return s;
  if (params.gamma >= 1.0) {
    return absl::FailedPreconditionError(
        "infeasible parameters: error bound undefined for gamma >= 1");
  }
  return absl::OkStatus();
}

// Factors shared by every bound: d^{8/3} / ((1-gamma)^2 n^{5/3}).
double MseScale(const ProtocolParams& p) {
  const double one_minus = 1.0 - p.gamma;
  return std::pow(p.d, 8.0 / 3.0) /
         (one_minus * one_minus * std::pow(p.n, 5.0 / 3.0));
}

// d^{4/3} / ((1-gamma) n^{5/6}).
double SigmaScale(const ProtocolParams& p) {
  return std::pow(p.d, 4.0 / 3.0) / ((1.0 - p.gamma) * std::pow(p.n, 5.0 / 6.0));
}

double GeneralMse(const ProtocolParams& p, const PrivacyBudget& b) {
  const double logs =
      std::log(1.0 / b.delta) * std::log(2.0 * p.t / b.delta);
  const double eps43 = std::pow(b.epsilon, 4.0 / 3.0);
  if (b.regime() == EpsilonRegime::kBelowOne) {
    return 2.0 * p.t * std::pow(14.0 * logs, 2.0 / 3.0) * MseScale(p) / eps43;
  }
  return 8.0 * p.t * std::pow(63.0 * logs, 2.0 / 3.0) * MseScale(p) / eps43;
}

double GeneralSigma(const ProtocolParams& p, const PrivacyBudget& b) {
  const double logs =
      std::log(1.0 / b.delta) * std::log(2.0 * p.t / b.delta);
  const double eps23 = std::pow(b.epsilon, 2.0 / 3.0);
  if (b.regime() == EpsilonRegime::kBelowOne) {
    return std::sqrt(2.0 * p.t) * std::cbrt(14.0 * logs) * SigmaScale(p) /
           eps23;
  }
  return std::sqrt(8.0 * p.t) * std::cbrt(63.0 * logs) * SigmaScale(p) / eps23;
}

double TightMse(const ProtocolParams& p, const PrivacyBudget& b) {
  const double log2d = std::log(2.0 / b.delta);
  const double eps = b.epsilon;
  const double scale = MseScale(p);
  if (b.regime() == EpsilonRegime::kBelowOne) {
    const double first = std::cbrt(98.0) * std::pow(log2d, 2.0 / 3.0) * scale /
                         std::pow(eps, 4.0 / 3.0);
    const double second = 18.0 * scale / std::pow(4.0 * eps, 2.0 / 3.0);
    return std::max(first, second);
  }
  const double first = 2.0 * std::pow(20.0 * log2d, 2.0 / 3.0) * scale /
                       std::pow(eps, 4.0 / 3.0);
  const double second = 2.0 * std::pow(9.0, 2.0 / 3.0) * scale /
                        std::pow(11.0 * eps, 2.0 / 3.0);
  return std::max(first, second);
}

double TightSigma(const ProtocolParams& p, const PrivacyBudget& b) {
  const double log2d = std::log(2.0 / b.delta);
  const double eps = b.epsilon;
  const double scale = SigmaScale(p);
  if (b.regime() == EpsilonRegime::kBelowOne) {
    const double first = std::pow(98.0, 1.0 / 6.0) * std::cbrt(log2d) * scale /
                         std::pow(eps, 2.0 / 3.0);
    const double second = std::sqrt(18.0) * scale / std::cbrt(4.0 * eps);
    return std::max(first, second);
  }
  const double first = std::sqrt(2.0) * std::cbrt(20.0 * log2d) * scale /
                       std::pow(eps, 2.0 / 3.0);
  const double second =
      std::sqrt(2.0) * std::cbrt(9.0) * scale / std::cbrt(11.0 * eps);
  return std::max(first, second);
}

}  // namespace

absl::StatusOr<TrialResult> EmpiricalMse(const EstimateVector& estimates,
                                         std::span<const double> sampled_truth,
                                         int n) {
  if (estimates.values.size() != sampled_truth.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dimension mismatch: %d estimates vs %d truth values",
        estimates.values.size(), sampled_truth.size()));
  }
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  const double d = static_cast<double>(sampled_truth.size());
  TrialResult result;
  result.per_coordinate_sq_errors.resize(sampled_truth.size());
  for (size_t l = 0; l < sampled_truth.size(); ++l) {
    const double err = estimates.values[l] - sampled_truth[l];
    result.per_coordinate_sq_errors[l] = err * err;
    result.total_squared_error += err * err;
  }
  const double scale = d / n;
  result.normalized_mse = result.total_squared_error * scale * scale;
  return result;
}

absl::StatusOr<BoundReport> BoundMseGeneral(const ProtocolParams& params,
                                            const PrivacyBudget& budget) {
  if (absl::Status s = CheckBoundInputs(params, budget); !s.ok()) return s;
  BoundReport report;
  report.regime = budget.regime();
  report.kind = BoundKind::kGeneral;
  report.mse_bound = GeneralMse(params, budget);
  report.sigma_bound = GeneralSigma(params, budget);
  return report;
}

absl::StatusOr<BoundReport> BoundMseT1(const ProtocolParams& params,
                                       const PrivacyBudget& budget) {
  if (absl::Status s = CheckBoundInputs(params, budget); !s.ok()) return s;
  if (params.t != 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "the tightened bound only applies to t = 1; got t=%d", params.t));
  }
  BoundReport report;
  report.regime = budget.regime();
  report.kind = BoundKind::kTightT1;
  report.mse_bound = TightMse(params, budget);
  report.sigma_bound = TightSigma(params, budget);
  return report;
}

absl::StatusOr<BoundReport> BoundSigma(const ProtocolParams& params,
                                       const PrivacyBudget& budget,
                                       BoundKind kind) {
  return kind == BoundKind::kGeneral ? BoundMseGeneral(params, budget)
                                     : BoundMseT1(params, budget);
}

absl::StatusOr<PowerLawFit> FitPowerLaw(std::span<const double> xs,
                                        std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    return absl::InvalidArgumentError("xs and ys differ in length");
  }
  if (xs.size() < 3) {
    return absl::InvalidArgumentError("power-law fit needs at least 3 points");
  }
  const size_t m = xs.size();
  std::vector<double> lx(m), ly(m);
  for (size_t i = 0; i < m; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      return absl::InvalidArgumentError(
          "power-law fit needs strictly positive values");
    }
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mean_x = 0.0, mean_y = 0.0;
  for (size_t i = 0; i < m; ++i) {
    mean_x += lx[i];
    mean_y += ly[i];
  }
  mean_x /= m;
  mean_y /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mean_x) * (lx[i] - mean_x);
    sxy += (lx[i] - mean_x) * (ly[i] - mean_y);
    syy += (ly[i] - mean_y) * (ly[i] - mean_y);
  }
  if (!(sxx > 0.0)) {
    return absl::InvalidArgumentError("degenerate fit: xs are all equal");
  }
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.log_coefficient = mean_y - fit.exponent * mean_x;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace shufflesum
