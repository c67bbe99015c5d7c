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

#include "shufflesum/audit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "absl/strings/str_format.h"

namespace shufflesum {
namespace {

// log of the Bin(s, p) pmf at j, for 0 < p < 1.
double LogBinomialPmf(int64_t s, int64_t j, double log_p, double log_q) {
  return std::lgamma(s + 1.0) - std::lgamma(j + 1.0) -
         std::lgamma(static_cast<double>(s - j) + 1.0) + j * log_p +
         (s - j) * log_q;
}

// Sums pmf terms from `start` one step at a time in direction `step`
// (away from the mode) until `end`, stopping once the remainder is
// negligible. Beyond the mode successive term ratios only shrink, so the
// remainder is bounded by term / (1 - ratio).
double SumAwayFromMode(int64_t s, double log_p, double log_q, int64_t start,
                       int64_t end, int step) {
  double total = 0.0;
  double prev = 0.0;
  for (int64_t j = start; step > 0 ? j <= end : j >= end; j += step) {
    const double term = std::exp(LogBinomialPmf(s, j, log_p, log_q));
    total += term;
    if (term == 0.0) break;
    if (prev > 0.0) {
      const double ratio = term / prev;
      if (ratio < 1.0 && term / (1.0 - ratio) < 1e-18 * total) break;
    }
    prev = term;
  }
  return total;
}

// Pr[lo <= X <= hi] for X ~ Bin(s, p).
double BinomialRange(int64_t s, double p, int64_t lo, int64_t hi) {
  lo = std::max<int64_t>(lo, 0);
  hi = std::min<int64_t>(hi, s);
  if (lo > hi) return 0.0;
  if (p <= 0.0) return lo == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return hi == s ? 1.0 : 0.0;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const int64_t mode = std::min<int64_t>(
      s, static_cast<int64_t>(std::floor((static_cast<double>(s) + 1.0) * p)));
  double total = 0.0;
  if (hi <= mode) {
    total = SumAwayFromMode(s, log_p, log_q, hi, lo, -1);
  } else if (lo > mode) {
    total = SumAwayFromMode(s, log_p, log_q, lo, hi, +1);
  } else {
    total = SumAwayFromMode(s, log_p, log_q, mode, lo, -1) +
            SumAwayFromMode(s, log_p, log_q, mode + 1, hi, +1);
  }
  return std::min(total, 1.0);
}

double HockeyStickDivergence(std::span<const double> p,
                             std::span<const double> q, double eps) {
  const double scale = std::exp(eps);
  double total = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    total += std::max(0.0, p[i] - scale * q[i]);
  }
  return total;
}

struct CellCounts {
  int64_t p = 0;
  int64_t q = 0;
};

bool CellIsNarrow(const CellCounts& cell, int64_t trials,
                  const AuditOptions& options) {
  for (int64_t count : {cell.p, cell.q}) {
    if (count == 0) continue;
    const Interval ci = WilsonInterval(count, trials, options.z);
    const double estimate = static_cast<double>(count) / trials;
    if ((ci.hi - ci.lo) / estimate > options.max_relative_width) return false;
  }
  return true;
}

// Coarsens the outcome space: sparse cells are merged into one pooled cell,
// and the pooled cell absorbs the smallest remaining cells until its own
// estimate is tight enough. Merging outcomes is post-processing, so the
// coarsened distributions can only under-state the true epsilon.
std::vector<CellCounts> PoolSparseCells(std::vector<CellCounts> cells,
                                        int64_t trials,
                                        const AuditOptions& options) {
  CellCounts pooled;
  std::vector<CellCounts> kept;
  for (const CellCounts& cell : cells) {
    if (CellIsNarrow(cell, trials, options)) {
      kept.push_back(cell);
    } else {
      pooled.p += cell.p;
      pooled.q += cell.q;
    }
  }
  std::sort(kept.begin(), kept.end(),
            [](const CellCounts& a, const CellCounts& b) {
              return a.p + a.q > b.p + b.q;
            });
  while ((pooled.p + pooled.q) > 0 && !CellIsNarrow(pooled, trials, options) &&
         !kept.empty()) {
    pooled.p += kept.back().p;
    pooled.q += kept.back().q;
    kept.pop_back();
  }
  if (pooled.p + pooled.q > 0) kept.push_back(pooled);
  return kept;
}

}  // namespace

absl::StatusOr<TailParams> MakeTailParams(int64_t s, double gamma, int k,
                                          double eps_prime, int t,
                                          double delta) {
  if (s < 0) return absl::InvalidArgumentError("s must be >= 0");
  if (k < 1) return absl::InvalidArgumentError("k must be >= 1");
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    return absl::InvalidArgumentError("gamma must lie in [0, 1]");
  }
  if (!(eps_prime > 0.0)) {
    return absl::InvalidArgumentError("eps' must be > 0");
  }
  if (t < 1) return absl::InvalidArgumentError("t must be >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1]");
  }
  return TailParams{s, gamma * static_cast<double>(s) / k, eps_prime, t, delta};
}

absl::StatusOr<TailProbability> ExactTailProbability(const TailParams& tp,
                                                      double gamma, int k) {
  if (k < 1) return absl::InvalidArgumentError("k must be >= 1");
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    return absl::InvalidArgumentError("gamma must lie in [0, 1]");
  }
  if (tp.s < 0 || !(tp.eps_prime > 0.0)) {
    return absl::InvalidArgumentError("tail parameters out of domain");
  }
  const double p = gamma / k;
  const double expected = p * static_cast<double>(tp.s);
  if (std::abs(expected - tp.c) > 1e-9 * std::max(1.0, tp.c)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "c = %g disagrees with gamma s / k = %g", tp.c, expected));
  }
  TailProbability out;
  if (tp.c == 0.0) {
    out.value = 1.0;
    out.degenerate = true;
    return out;
  }
  // N_theta = X + 1 >= c e^{eps'/2}  <=>  X >= ceil(c e^{eps'/2} - 1).
  const double upper_threshold = tp.c * std::exp(tp.eps_prime / 2.0) - 1.0;
  const int64_t upper_from =
      static_cast<int64_t>(std::ceil(std::max(upper_threshold, 0.0)));
  // N_phi <= c e^{-eps'/2}  <=>  X <= floor(c e^{-eps'/2}).
  const int64_t lower_to =
      static_cast<int64_t>(std::floor(tp.c * std::exp(-tp.eps_prime / 2.0)));
  out.value = BinomialRange(tp.s, p, upper_from, tp.s) +
              BinomialRange(tp.s, p, 0, lower_to);
  return out;
}

absl::StatusOr<double> ChernoffUpperBound(const TailParams& tp) {
  if (!(tp.eps_prime > 0.0 && tp.eps_prime < 6.0)) {
    return absl::InvalidArgumentError("eps' must lie in (0, 6)");
  }
  if (tp.t < 1 || !(tp.delta > 0.0 && tp.delta <= 1.0)) {
    return absl::InvalidArgumentError("tail parameters out of domain");
  }
  const bool small = tp.eps_prime < 1.0;
  const double constant = small ? 14.0 : 80.0;
  const double eps2 = tp.eps_prime * tp.eps_prime;
  const double required = constant * std::log(2.0 * tp.t / tp.delta) / eps2;
  if (tp.c < required) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "Chernoff bound needs c >= %g, got c = %g", required, tp.c));
  }
  // Lower-tail deviation is at least eps'/sqrt(7) (eps' < 1) or
  // eps'/(2 sqrt(10)) (eps' < 6) after the regime's linearization.
  const double lower_dev =
      small ? tp.eps_prime / std::sqrt(7.0)
            : tp.eps_prime / (2.0 * std::sqrt(10.0));
  return std::exp(-(tp.c / 3.0) * eps2 / 4.0) +
         std::exp(-(tp.c / 2.0) * lower_dev * lower_dev);
}

absl::StatusOr<double> SampleCountTail(int n, int t, int d) {
  if (n < 2) return absl::InvalidArgumentError("n must be >= 2");
  if (d < 1 || t < 1 || t > d) {
    return absl::InvalidArgumentError("need 1 <= t <= d");
  }
  return std::exp(-(n - 1.0) * t / (3.0 * d));
}

double HockeyStickEpsilon(std::span<const double> p, std::span<const double> q,
                          double delta) {
  if (HockeyStickDivergence(p, q, 0.0) <= delta) return 0.0;
  double null_mass = 0.0;
  double max_ratio = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (q[i] <= 0.0) {
      null_mass += p[i];
    } else if (p[i] > 0.0) {
      max_ratio = std::max(max_ratio, p[i] / q[i]);
    }
  }
  if (null_mass > delta) return std::numeric_limits<double>::infinity();
  // At eps = ln(max_ratio) only q-null cells contribute.
  double lo = 0.0;
  double hi = std::log(std::max(max_ratio, 1.0));
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (HockeyStickDivergence(p, q, mid) <= delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

Interval WilsonInterval(int64_t successes, int64_t trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z / denom * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

absl::StatusOr<AuditVerdict> MonteCarloAudit(const NeighborPair& pair,
                                             const ProtocolParams& params,
                                             const PrivacyBudget& budget,
                                             int64_t trials, Rng& rng,
                                             const AuditOptions& options) {
  if (absl::Status s = ValidateParams(params); !s.ok()) return s;
  if (absl::Status s = ValidateBudget(budget); !s.ok()) return s;
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (static_cast<int>(pair.dataset.size()) != params.n) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dataset has %d users, params say n=%d", pair.dataset.size(),
        params.n));
  }
  if (static_cast<int>(pair.alt_last.size()) != params.d) {
    return absl::InvalidArgumentError("alternate last user has wrong length");
  }
  const int cells_per_outcome = params.d * (params.k + 1);
  const double key_bits =
      cells_per_outcome * std::log2(static_cast<double>(params.n) + 1.0);
  if (key_bits > 63.0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "outcome space too large to enumerate (%.1f bits); use a tiny "
        "instance",
        key_bits));
  }

  std::unordered_map<uint64_t, CellCounts> histogram;
  std::vector<int> counts(cells_per_outcome);
  const uint64_t radix = static_cast<uint64_t>(params.n) + 1;

  // Runs the mechanism once; the outcome is the per-coordinate histogram of
  // reported values, which is all a shuffled batch reveals.
  auto run_once = [&](bool use_alt) -> absl::StatusOr<uint64_t> {
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < params.n; ++i) {
      std::span<const double> row =
          (use_alt && i == params.n - 1) ? std::span<const double>(pair.alt_last)
                                         : std::span<const double>(pair.dataset[i]);
      absl::StatusOr<Message> message = RandomizeVector(row, params, rng);
      if (!message.ok()) return message.status();
      for (const MessageEntry& e : message->entries) {
        ++counts[e.coordinate * (params.k + 1) + e.value];
      }
    }
    uint64_t key = 0;
    for (int c : counts) key = key * radix + static_cast<uint64_t>(c);
    return key;
  };

  for (int64_t trial = 0; trial < trials; ++trial) {
    absl::StatusOr<uint64_t> original = run_once(false);
    if (!original.ok()) return original.status();
    ++histogram[*original].p;
    absl::StatusOr<uint64_t> neighbour = run_once(true);
    if (!neighbour.ok()) return neighbour.status();
    ++histogram[*neighbour].q;
  }

  // Ordered traversal keeps pooling independent of hash-map iteration order.
  std::map<uint64_t, CellCounts> ordered(histogram.begin(), histogram.end());
  std::vector<CellCounts> raw;
  raw.reserve(ordered.size());
  for (const auto& [key, cell] : ordered) raw.push_back(cell);
  std::vector<CellCounts> cells = PoolSparseCells(std::move(raw), trials, options);
  if (cells.size() < 2) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "insufficient trials: %d trials leave no outcome cell with a relative "
        "confidence interval narrower than %g",
        trials, options.max_relative_width));
  }

  const double n_trials = static_cast<double>(trials);
  std::vector<double> p_hat, q_hat, p_lo, p_hi, q_lo, q_hi;
  for (const CellCounts& cell : cells) {
    p_hat.push_back(cell.p / n_trials);
    q_hat.push_back(cell.q / n_trials);
    const Interval pi = WilsonInterval(cell.p, trials, options.z);
    const Interval qi = WilsonInterval(cell.q, trials, options.z);
    p_lo.push_back(pi.lo);
    p_hi.push_back(pi.hi);
    q_lo.push_back(qi.lo);
    q_hi.push_back(qi.hi);
  }

  AuditVerdict verdict;
  verdict.trials = trials;
  verdict.cells = static_cast<int>(cells.size());
  verdict.theoretical_epsilon = budget.epsilon;
  verdict.empirical_epsilon =
      std::max(HockeyStickEpsilon(p_hat, q_hat, budget.delta),
               HockeyStickEpsilon(q_hat, p_hat, budget.delta));
  verdict.conservative_epsilon =
      std::max(HockeyStickEpsilon(p_lo, q_hi, budget.delta),
               HockeyStickEpsilon(q_lo, p_hi, budget.delta));
  verdict.hard_failure = std::isinf(verdict.empirical_epsilon);
  verdict.slack =
      verdict.hard_failure
          ? 0.0
          : std::max(0.0, verdict.empirical_epsilon -
                              verdict.conservative_epsilon);
  verdict.pass = !verdict.hard_failure &&
                 verdict.empirical_epsilon <=
                     verdict.theoretical_epsilon + verdict.slack;
  return verdict;
}

}  // namespace shufflesum
