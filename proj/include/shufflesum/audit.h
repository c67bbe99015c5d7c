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

// Executable privacy analysis.
//
// Two independent views of the privacy claim:
//  * exact binomial tail probabilities for the per-coordinate blanket
//    argument, alongside the closed-form Chernoff bounds that dominate them;
//  * a Monte-Carlo audit that runs the full mechanism on two neighbouring
//    datasets, estimates both output distributions, and reads off the
//    smallest epsilon consistent with the observed hockey-stick divergence.

#ifndef SHUFFLESUM_AUDIT_H_
#define SHUFFLESUM_AUDIT_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "shufflesum/params.h"
#include "shufflesum/randomizer.h"

namespace shufflesum {

// Per-coordinate tail setting: s submissions for the audited coordinate,
// c = gamma s / k expected blanket hits on any single value.
struct TailParams {
  int64_t s = 0;
  double c = 0.0;
  double eps_prime = 0.0;
  int t = 1;
  double delta = 0.0;
};

absl::StatusOr<TailParams> MakeTailParams(int64_t s, double gamma, int k,
                                          double eps_prime, int t,
                                          double delta);

struct TailProbability {
  double value = 0.0;
  // c == 0: no blanket at all, the lower event is certain.
  bool degenerate = false;
};

// Exact union probability
//   Pr[N_theta >= c e^{eps'/2}] + Pr[N_phi <= c e^{-eps'/2}]
// with N_phi ~ Bin(s, gamma / k) and N_theta = N_phi + 1, summed over the
// binomial pmf in log space.
absl::StatusOr<TailProbability> ExactTailProbability(const TailParams& tp,
                                                      double gamma, int k);

// Closed-form Chernoff bound on the same union. FailedPrecondition when c is
// below 14 ln(2t/delta)/eps'^2 (eps' < 1) or 80 ln(2t/delta)/eps'^2
// (1 <= eps' < 6).
absl::StatusOr<double> ChernoffUpperBound(const TailParams& tp);

// exp(-(n-1) t / (3 d)): Chernoff bound on Pr[s >= 2 E[s]].
absl::StatusOr<double> SampleCountTail(int n, int t, int d);

// Two datasets that differ only in the last user.
struct NeighborPair {
  std::vector<std::vector<double>> dataset;
  std::vector<double> alt_last;
};

// Smallest eps >= 0 with sum_i max(0, p_i - e^eps q_i) <= delta, i.e. the
// tightest epsilon that the pair (p, q) admits at this delta for every
// event. +inf when mass on q-null cells already exceeds delta.
double HockeyStickEpsilon(std::span<const double> p, std::span<const double> q,
                          double delta);

// Wilson score interval for a binomial proportion.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
Interval WilsonInterval(int64_t successes, int64_t trials, double z);

struct AuditOptions {
  double z = 3.0;
  // Cells whose relative interval width exceeds this are pooled together.
  double max_relative_width = 0.25;
};

struct AuditVerdict {
  double empirical_epsilon = 0.0;     // point estimate, both directions
  double conservative_epsilon = 0.0;  // from Wilson-bounded cell masses
  double theoretical_epsilon = 0.0;
  double slack = 0.0;                 // empirical - conservative
  int64_t trials = 0;
  int cells = 0;                      // outcome cells after pooling
  bool hard_failure = false;          // some event has zero mass under one side
  bool pass = false;                  // empirical <= theoretical + slack
};

// Runs the shuffled mechanism `trials` times on each side of `pair` and
// compares the empirical per-coordinate histogram distributions. The outcome
// space must be small: (n + 1)^(d (k + 1)) has to fit in 63 bits.
// ResourceExhausted when so few trials were run that pooling collapses every
// outcome into one cell.
absl::StatusOr<AuditVerdict> MonteCarloAudit(const NeighborPair& pair,
                                             const ProtocolParams& params,
                                             const PrivacyBudget& budget,
                                             int64_t trials, Rng& rng,
                                             const AuditOptions& options = {});

}  // namespace shufflesum

#endif  // SHUFFLESUM_AUDIT_H_
