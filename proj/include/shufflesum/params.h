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

// Parameter calibration for the single-message shuffled vector-sum protocol.
//
// Everything here is a pure function of its arguments. Logarithms are
// natural. Calibration never clamps: a blanket probability above 1 is
// reported as a FailedPrecondition ("infeasible parameters") error, and
// malformed inputs are InvalidArgument.

#ifndef SHUFFLESUM_PARAMS_H_
#define SHUFFLESUM_PARAMS_H_

#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace shufflesum {

// The analysis splits on epsilon: one set of constants for eps < 1 and a
// scaled set for 1 <= eps < 6. eps == 1 belongs to the upper regime.
enum class EpsilonRegime { kBelowOne, kOneToSix };

std::string RegimeName(EpsilonRegime regime);

// Target (epsilon, delta) privacy budget. Valid budgets have
// 0 < epsilon < 6 and 0 < delta <= 1.
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;

  static absl::StatusOr<PrivacyBudget> Create(double epsilon, double delta);

  EpsilonRegime regime() const {
    return epsilon < 1.0 ? EpsilonRegime::kBelowOne : EpsilonRegime::kOneToSix;
  }
};

absl::Status ValidateBudget(const PrivacyBudget& budget);

// Fully calibrated mechanism configuration.
//   d      vector dimension
//   k      quantization level; encoded values live in {0, ..., k}
//   n      number of users (>= 2)
//   t      coordinates each user reports, 1 <= t <= d
//   gamma  blanket probability in [0, 1]
struct ProtocolParams {
  int d = 0;
  int k = 0;
  int n = 0;
  int t = 0;
  double gamma = 0.0;
};

absl::Status ValidateParams(const ProtocolParams& params);

// Per-fold budget for an r-fold composition.
struct ComposedBudget {
  double epsilon_prime = 0.0;
  double delta_prime = 0.0;
  int r = 0;
};

// Splits `budget` across r adaptively composed mechanisms:
//   eps' = eps / (2 sqrt(2 r ln(1/delta)))    for eps < 1
//   eps' = eps / (12 sqrt(2 r ln(1/delta)))   for 1 <= eps < 6
//   delta' = delta / r
// delta == 1 makes the denominator vanish and is reported as infeasible.
absl::StatusOr<ComposedBudget> ComposeEpsilonPrime(const PrivacyBudget& budget,
                                                   int r);

// Total loss of r folds of an (eps', delta')-DP mechanism:
//   sqrt(2 r ln(1/delta)) eps' + r eps' (e^{eps'} - 1).
absl::StatusOr<double> AdvancedComposition(double epsilon_prime, int r,
                                           double delta);

// Unclamped blanket probability for general t. May exceed 1.
absl::StatusOr<double> GammaGeneralFormula(const PrivacyBudget& budget, int d,
                                           int k, int n, int t);

// Unclamped blanket probability for the single-coordinate (t = 1) analysis,
// which needs no composition step. May exceed 1.
absl::StatusOr<double> GammaT1Formula(const PrivacyBudget& budget, int d, int k,
                                      int n);

// gamma = A d k ln(1/delta) ln(2t/delta) / ((n-1) eps^2), A = 56 or 2016.
// FailedPrecondition when the value exceeds 1.
absl::StatusOr<double> CalibrateGammaGeneral(const PrivacyBudget& budget, int d,
                                             int k, int n, int t);

// Tightened t = 1 calibration:
//   eps < 1:      max{14 dk ln(2/delta) / ((n-1) eps^2), 27 dk / ((n-1) eps)}
//   1 <= eps < 6: max{80 dk ln(2/delta) / ((n-1) eps^2),
//                     36 dk / (11 (n-1) eps)}
// FailedPrecondition when the value exceeds 1.
absl::StatusOr<double> CalibrateGammaT1(const PrivacyBudget& budget, int d,
                                        int k, int n);

// Real-valued minimizer of the error objective 1/(4k^2) + C k used to pick k
// for general t: ((n-1) eps^2 / (2 A d ln(1/delta) ln(2t/delta)))^{1/3},
// A = 28 or 1008. +inf when delta == 1.
absl::StatusOr<double> ContinuousKGeneral(const PrivacyBudget& budget, int d,
                                          int n, int t);

// Real-valued k for t = 1, the smaller of two cube roots per regime.
absl::StatusOr<double> ContinuousKT1(const PrivacyBudget& budget, int d, int n);

// The integer minimizer of an objective of the form a/k^2 + b k whose real
// minimizer is `k_star`. Always >= 1.
int IntegerMinimizer(double k_star);

absl::StatusOr<int> ChooseKGeneral(const PrivacyBudget& budget, int d, int n,
                                   int t);
absl::StatusOr<int> ChooseKT1(const PrivacyBudget& budget, int d, int n);

}  // namespace shufflesum

#endif  // SHUFFLESUM_PARAMS_H_
