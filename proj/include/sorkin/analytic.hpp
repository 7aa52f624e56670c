// Copyright 2026 The sorkin-sim Authors
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

// Closed-form values for the Kerr cascade, the saturating tritter and the
// two-photon Fock example.

#ifndef SORKIN_ANALYTIC_HPP_
#define SORKIN_ANALYTIC_HPP_

#include <cmath>
#include <complex>

#include "sorkin/common.hpp"

namespace sorkin {

/// <alpha|alpha e^{-i theta}> = exp(-|alpha|^2 (1 - e^{-i theta})).
inline complex_t coherent_overlap(complex_t alpha, double theta) {
  return std::exp(-std::norm(alpha) * (1.0 - std::polar(1.0, -theta)));
}

struct KerrCascadeParams {
  double mean_n = 1.0;
  double theta = 0.0;
  std::size_t modes = 3;
  double phi1 = 0.0;
  double phi2 = 0.0;
};

struct FringeResult {
  double magnitude = 0.0;
  double offset = 0.0;
  double value = 0.0;
};

/// Coefficient A = <n>/2 (<alpha|alpha e^{-i theta}> - 1)^{M-2} of the cascade
/// with equal input intensities.
inline complex_t kerr_cascade_coefficient(double mean_n, double theta, std::size_t modes) {
  const complex_t base = coherent_overlap(std::sqrt(mean_n), theta) - 1.0;
  return 0.5 * mean_n * std::pow(base, static_cast<int>(modes - 2));
}

/// I_M = 2|A| cos(phi2 - phi1 - offset) for the cascade read out at port 0
/// behind the [[1, 1], [-1, 1]]/sqrt2 splitter; offset = -arg A in (-pi, pi].
inline FringeResult kerr_cascade_interference(const KerrCascadeParams& p) {
  if (p.modes < 3) throw InvalidArgument("cascade needs at least three modes");
  if (!(p.mean_n >= 0)) throw InvalidArgument("mean photon number must be >= 0");
  const complex_t a = kerr_cascade_coefficient(p.mean_n, p.theta, p.modes);
  FringeResult r;
  r.magnitude = 2 * std::abs(a);
  r.offset = a == 0.0 ? 0.0 : -std::arg(a);
  if (r.offset <= -kPi) r.offset += 2 * kPi;
  r.value = r.magnitude * std::cos(p.phi2 - p.phi1 - r.offset);
  return r;
}

/// -4 eps <n>^2, the tritter with operator-form saturating detection.
inline double saturating_tritter_i3(double epsilon, double mean_n) {
  if (!(epsilon >= 0)) throw InvalidArgument("saturation strength must be >= 0");
  return -4.0 * epsilon * mean_n * mean_n;
}

/// -sin^2(theta/2), the usual closed form quoted for the two-photon example.
inline double fock_example_i3(double theta) {
  const double s = std::sin(theta / 2);
  return -s * s;
}

/// Value of the two-photon example detected at port 0 behind the
/// [[1, 1], [-1, 1]]/sqrt2 splitter: -sin^2(theta/2) / 2.
inline double fock_example_i3_port_one(double theta) { return 0.5 * fock_example_i3(theta); }

}  // namespace sorkin

#endif  // SORKIN_ANALYTIC_HPP_
