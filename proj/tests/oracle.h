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

// Independent 50-digit transcriptions of the calibration and bound formulas.
// They are written directly from the closed forms, without sharing any code
// with the library, and serve as reference values in the tests.

#ifndef SHUFFLESUM_TESTS_ORACLE_H_
#define SHUFFLESUM_TESTS_ORACLE_H_

#include <algorithm>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace shufflesum {
namespace oracle {

using Real = boost::multiprecision::cpp_bin_float_50;

inline Real Ln(Real x) { return boost::multiprecision::log(x); }
inline Real Sqrt(Real x) { return boost::multiprecision::sqrt(x); }
inline Real Pow(Real x, Real y) { return boost::multiprecision::pow(x, y); }
inline Real Cbrt(Real x) { return Pow(x, Real(1) / 3); }
inline Real Max(Real a, Real b) { return a > b ? a : b; }
inline Real Min(Real a, Real b) { return a < b ? a : b; }

inline double EpsilonPrime(Real eps, Real delta, int r) {
  const Real scale = eps < 1 ? Real(2) : Real(12);
  return static_cast<double>(eps / (scale * Sqrt(2 * Real(r) * Ln(1 / delta))));
}

inline double Advanced(Real eps_prime, int r, Real delta) {
  return static_cast<double>(
      Sqrt(2 * Real(r) * Ln(1 / delta)) * eps_prime +
      Real(r) * eps_prime * (boost::multiprecision::exp(eps_prime) - 1));
}

inline double GammaGeneral(Real eps, Real delta, int d, int k, int n, int t) {
  const Real a = eps < 1 ? Real(56) : Real(2016);
  return static_cast<double>(a * d * k * Ln(1 / delta) * Ln(2 * Real(t) / delta) /
                             ((Real(n) - 1) * eps * eps));
}

inline double GammaT1(Real eps, Real delta, int d, int k, int n) {
  const Real dk = Real(d) * k;
  const Real m = Real(n) - 1;
  if (eps < 1) {
    return static_cast<double>(Max(14 * dk * Ln(2 / delta) / (m * eps * eps),
                                   27 * dk / (m * eps)));
  }
  return static_cast<double>(Max(80 * dk * Ln(2 / delta) / (m * eps * eps),
                                 36 * dk / (11 * m * eps)));
}

inline double KGeneral(Real eps, Real delta, int d, int n, int t) {
  const Real a = eps < 1 ? Real(28) : Real(1008);
  return static_cast<double>(Cbrt((Real(n) - 1) * eps * eps /
                                  (2 * a * d * Ln(1 / delta) *
                                   Ln(2 * Real(t) / delta))));
}

inline double KT1(Real eps, Real delta, int d, int n) {
  if (eps < 1) {
    return static_cast<double>(
        Min(Cbrt(Real(n) * eps * eps / (28 * Real(d) * Ln(2 / delta))),
            Cbrt(Real(n) * eps / (54 * Real(d)))));
  }
  return static_cast<double>(
      Min(Cbrt(Real(n) * eps * eps / (160 * Real(d) * Ln(2 / delta))),
          Cbrt(11 * Real(n) * eps / (72 * Real(d)))));
}

inline double BoundGeneral(Real eps, Real delta, int d, int n, int t,
                           Real gamma) {
  const Real ll = Ln(1 / delta) * Ln(2 * Real(t) / delta);
  const Real denom = (1 - gamma) * (1 - gamma) * Pow(Real(n), Real(5) / 3) *
                     Pow(eps, Real(4) / 3);
  const Real d83 = Pow(Real(d), Real(8) / 3);
  if (eps < 1) {
    return static_cast<double>(2 * Real(t) * d83 * Pow(14 * ll, Real(2) / 3) /
                               denom);
  }
  return static_cast<double>(8 * Real(t) * d83 * Pow(63 * ll, Real(2) / 3) /
                             denom);
}

inline double BoundT1(Real eps, Real delta, int d, int n, Real gamma) {
  const Real d83 = Pow(Real(d), Real(8) / 3);
  const Real base = (1 - gamma) * (1 - gamma) * Pow(Real(n), Real(5) / 3);
  const Real l2 = Ln(2 / delta);
  if (eps < 1) {
    return static_cast<double>(Max(
        Cbrt(Real(98)) * d83 * Pow(l2, Real(2) / 3) /
            (base * Pow(eps, Real(4) / 3)),
        18 * d83 / (base * Pow(4 * eps, Real(2) / 3))));
  }
  return static_cast<double>(
      Max(2 * d83 * Pow(20 * l2, Real(2) / 3) / (base * Pow(eps, Real(4) / 3)),
          2 * Pow(Real(9), Real(2) / 3) * d83 /
              (base * Pow(11 * eps, Real(2) / 3))));
}

// The objective whose minimizer over k is k_star: 1/k^2 + 2 k / k_star^3.
inline double KObjective(double k, double k_star) {
  return 1.0 / (k * k) + 2.0 * k / (k_star * k_star * k_star);
}

}  // namespace oracle
}  // namespace shufflesum

#endif  // SHUFFLESUM_TESTS_ORACLE_H_
