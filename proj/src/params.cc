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

#include "shufflesum/params.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_format.h"

namespace shufflesum {
namespace {

// Upper cap on the quantization level returned by the k selectors.
constexpr int kMaxQuantization = 1 << 20;

absl::Status CheckDimensions(int d, int k, int n, int t) {
  if (d < 1) return absl::InvalidArgumentError("d must be >= 1");
  if (k < 1) return absl::InvalidArgumentError("k must be >= 1");
  if (n < 2) return absl::InvalidArgumentError("n must be >= 2");
  if (t < 1 || t > d) {
    return absl::InvalidArgumentError(
        absl::StrFormat("t must lie in [1, d]; got t=%d, d=%d", t, d));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> RequireFeasible(double gamma, const char* what) {
  if (!(gamma <= 1.0)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "infeasible parameters: %s calibration gives gamma = %.6g > 1", what,
        gamma));
  }
  return gamma;
}

}  // namespace

std::string RegimeName(EpsilonRegime regime) {
  return regime == EpsilonRegime::kBelowOne ? "eps<1" : "1<=eps<6";
}

absl::Status ValidateBudget(const PrivacyBudget& budget) {
  if (!(budget.epsilon > 0.0)) {
    return absl::InvalidArgumentError("epsilon must be > 0");
  }
  if (!(budget.epsilon < 6.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "epsilon must be < 6 for the calibrated analysis; got %g",
        budget.epsilon));
  }
  if (!(budget.delta > 0.0 && budget.delta <= 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1]");
  }
  return absl::OkStatus();
}

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon,
                                                    double delta) {
  PrivacyBudget budget{epsilon, delta};
  if (absl::Status s = ValidateBudget(budget); !s.ok()) return s;
  return budget;
}

absl::Status ValidateParams(const ProtocolParams& params) {
  if (absl::Status s =
          CheckDimensions(params.d, params.k, params.n, params.t);
      !s.ok()) {
    return s;
  }
  if (!(params.gamma >= 0.0 && params.gamma <= 1.0)) {
    return absl::InvalidArgumentError("gamma must lie in [0, 1]");
  }
  return absl::OkStatus();
}

absl::StatusOr<ComposedBudget> ComposeEpsilonPrime(const PrivacyBudget& budget,
                                                   int r) {
  if (absl::Status s = ValidateBudget(budget); !s.ok()) return s;
  if (r < 1) return absl::InvalidArgumentError("r must be >= 1");
  const double log_inv_delta = std::log(1.0 / budget.delta);
  if (!(log_inv_delta > 0.0)) {
    return absl::FailedPreconditionError(
        "infeasible budget: ln(1/delta) = 0, per-fold epsilon is undefined");
  }
  const double scale =
      budget.regime() == EpsilonRegime::kBelowOne ? 2.0 : 12.0;
  ComposedBudget out;
  out.epsilon_prime =
      budget.epsilon / (scale * std::sqrt(2.0 * r * log_inv_delta));
  out.delta_prime = budget.delta / r;
  out.r = r;
  return out;
}

absl::StatusOr<double> AdvancedComposition(double epsilon_prime, int r,
                                           double delta) {
  if (!(epsilon_prime >= 0.0) || !std::isfinite(epsilon_prime)) {
    return absl::InvalidArgumentError("epsilon' must be a finite value >= 0");
  }
  if (r < 1) return absl::InvalidArgumentError("r must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  return std::sqrt(2.0 * r * std::log(1.0 / delta)) * epsilon_prime +
         r * epsilon_prime * std::expm1(epsilon_prime);
}

absl::StatusOr<double> GammaGeneralFormula(const PrivacyBudget& budget, int d,
                                           int k, int n, int t) {
  if (absl::Status s = ValidateBudget(budget); !s.ok()) return s;
  if (absl::Status s = CheckDimensions(d, k, n, t); !s.ok()) return s;
  const double constant =
      budget.regime() == EpsilonRegime::kBelowOne ? 56.0 : 2016.0;
  const double eps = budget.epsilon;
  return constant * d * k * std::log(1.0 / budget.delta) *
         std::log(2.0 * t / budget.delta) / ((n - 1.0) * eps * eps);
}

absl::StatusOr<double> GammaT1Formula(const PrivacyBudget& budget, int d, int k,
                                      int n) {
  if (absl::Status s = ValidateBudget(budget); !s.ok()) return s;
  if (absl::Status s = CheckDimensions(d, k, n, 1); !s.ok()) return s;
  const double eps = budget.epsilon;
  const double dk = static_cast<double>(d) * k;
  const double log_term = std::log(2.0 / budget.delta);
  if (budget.regime() == EpsilonRegime::kBelowOne) {
    return std::max(14.0 * dk * log_term / ((n - 1.0) * eps * eps),
                    27.0 * dk / ((n - 1.0) * eps));
  }
  return std::max(80.0 * dk * log_term / ((n - 1.0) * eps * eps),
                  36.0 * dk / (11.0 * (n - 1.0) * eps));
}

absl::StatusOr<double> CalibrateGammaGeneral(const PrivacyBudget& budget, int d,
                                             int k, int n, int t) {
  absl::StatusOr<double> gamma = GammaGeneralFormula(budget, d, k, n, t);
  if (!gamma.ok()) return gamma.status();
  return RequireFeasible(*gamma, "general");
}

absl::StatusOr<double> CalibrateGammaT1(const PrivacyBudget& budget, int d,
                                        int k, int n) {
  absl::StatusOr<double> gamma = GammaT1Formula(budget, d, k, n);
  if (!gamma.ok()) return gamma.status();
  return RequireFeasible(*gamma, "t1");
}

absl::StatusOr<double> ContinuousKGeneral(const PrivacyBudget& budget, int d,
                                          int n, int t) {
  if (absl::Status s = ValidateBudget(budget); !s.ok()) return s;
  if (absl::Status s = CheckDimensions(d, 1, n, t); !s.ok()) return s;
  const double half_constant =
      budget.regime() == EpsilonRegime::kBelowOne ? 28.0 : 1008.0;
  const double eps = budget.epsilon;
  const double denom = 2.0 * half_constant * d * std::log(1.0 / budget.delta) *
                       std::log(2.0 * t / budget.delta);
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return std::cbrt((n - 1.0) * eps * eps / denom);
}

absl::StatusOr<double> ContinuousKT1(const PrivacyBudget& budget, int d,
                                     int n) {
  if (absl::Status s = ValidateBudget(budget); !s.ok()) return s;
  if (absl::Status s = CheckDimensions(d, 1, n, 1); !s.ok()) return s;
  const double eps = budget.epsilon;
  const double log_term = std::log(2.0 / budget.delta);
  if (budget.regime() == EpsilonRegime::kBelowOne) {
    return std::min(std::cbrt(n * eps * eps / (28.0 * d * log_term)),
                    std::cbrt(n * eps / (54.0 * d)));
  }
  return std::min(std::cbrt(n * eps * eps / (160.0 * d * log_term)),
                  std::cbrt(11.0 * n * eps / (72.0 * d)));
}

int IntegerMinimizer(double k_star) {
  if (!(k_star > 1.0)) return 1;
  if (k_star >= kMaxQuantization) return kMaxQuantization;
  // a/k^2 + b k with minimizer k_star is proportional to 1/k^2 + 2k/k_star^3.
  const double cube = k_star * k_star * k_star;
  auto objective = [cube](double k) { return 1.0 / (k * k) + 2.0 * k / cube; };
  const double lo = std::floor(k_star);
  const double hi = lo + 1.0;
  return static_cast<int>(objective(lo) <= objective(hi) ? lo : hi);
}

absl::StatusOr<int> ChooseKGeneral(const PrivacyBudget& budget, int d, int n,
                                   int t) {
  absl::StatusOr<double> k_star = ContinuousKGeneral(budget, d, n, t);
  if (!k_star.ok()) return k_star.status();
  return IntegerMinimizer(*k_star);
}

absl::StatusOr<int> ChooseKT1(const PrivacyBudget& budget, int d, int n) {
  absl::StatusOr<double> k_star = ContinuousKT1(budget, d, n);
  if (!k_star.ok()) return k_star.status();
  return IntegerMinimizer(*k_star);
}

}  // namespace shufflesum
