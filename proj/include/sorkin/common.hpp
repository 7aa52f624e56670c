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

#ifndef SORKIN_COMMON_HPP_
#define SORKIN_COMMON_HPP_

#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

namespace sorkin {

using complex_t = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;

/// Default tolerances. Algebraic identities are checked at 1e-12; anything
/// limited by Fock-space truncation at 1e-8.
struct Tolerance {
  static constexpr double kAlgebraic = 1e-12;
  static constexpr double kTruncation = 1e-8;
  static constexpr double kCoherentTail = 1e-10;
  static constexpr double kBoundaryMass = 1e-10;
  static constexpr double kNegativeEigenvalue = 1e-10;
};

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments that violate a documented precondition (bad mode index, pattern
/// length mismatch, non-Hermitian generator, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Operands built on incompatible Fock bases or grids.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Coherent-state truncation tail exceeds the requested tolerance.
class TailTooLarge : public Error {
 public:
  using Error::Error;
};

/// A numerical safety monitor tripped (boundary mass, lost norm, ...).
class NumericalDiagnostic : public Error {
 public:
  using Error::Error;
};

// Warnings are advisory diagnostics (state mass near the truncation cap, large
// nonlinear phase per step). They go to a process-wide sink, stderr by default.
using WarningHandler = std::function<void(std::string_view)>;

namespace detail {
inline std::mutex& warning_mutex() {
  static std::mutex m;
  return m;
}
inline WarningHandler& warning_handler() {
  static WarningHandler handler = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return handler;
}

// Three significant digits, for diagnostics.
inline std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}
}  // namespace detail

/// Installs a new warning sink and returns the previous one.
inline WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(detail::warning_mutex());
  return std::exchange(detail::warning_handler(), std::move(handler));
}

inline void warn(std::string_view message) {
  std::lock_guard lock(detail::warning_mutex());
  if (detail::warning_handler()) detail::warning_handler()(message);
}

}  // namespace sorkin

#endif  // SORKIN_COMMON_HPP_
