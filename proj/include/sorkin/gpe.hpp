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

// One-dimensional Gross-Pitaevskii evolution
//
//   i hbar dpsi/dt = -(hbar^2 / 2m) d^2psi/dx^2 + (4 pi hbar^2 N a / m) |psi|^2 psi
//
// on a periodic grid, by Strang splitting with a spectral kinetic step. The
// coupling is used as written, with psi normalized on the line (SI units,
// density in 1/m). Templated on the real type: double, or __float128 through
// FFTW's quad-precision interface. Position-resolved third-order interference
// of a condensate prepared in three Gaussian packets is obtained by running
// all block patterns, where blocking removes a packet from the initial state
// without renormalizing.

#ifndef SORKIN_GPE_HPP_
#define SORKIN_GPE_HPP_

#include <quadmath.h>

#include <fftw3.h>

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <string>
#include <vector>

#include "sorkin/common.hpp"
#include "sorkin/fock.hpp"
#include "sorkin/parallel.hpp"

namespace sorkin {

inline constexpr double kHbar = 1.054571817e-34;

namespace detail {
// The FFTW planner is not thread-safe; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

template <class Real>
struct FftTraits;

template <>
struct FftTraits<double> {
  using Complex = fftw_complex;
  using Plan = fftw_plan;
  static constexpr const char* kName = "double";
  static constexpr double kEpsilon = std::numeric_limits<double>::epsilon();
  static double pi() { return kPi; }
  static Complex* alloc(std::size_t n) { return fftw_alloc_complex(n); }
  static void release(Complex* p) { fftw_free(p); }
  static Plan plan(int n, Complex* buf, int sign) { return fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE); }
  static void execute(Plan p, Complex* buf) { fftw_execute_dft(p, buf, buf); }
  static void destroy(Plan p) { fftw_destroy_plan(p); }
  static double exp(double x) { return std::exp(x); }
  static double sqrt(double x) { return std::sqrt(x); }
  static void sincos(double x, double* s, double* c) {
    *s = std::sin(x);
    *c = std::cos(x);
  }
};

template <>
struct FftTraits<__float128> {
  using Complex = fftwq_complex;
  using Plan = fftwq_plan;
  static constexpr const char* kName = "quad";
  static constexpr double kEpsilon = 1.925929944387235853e-34;  // 2^-112
  static __float128 pi() { return M_PIq; }
  static Complex* alloc(std::size_t n) { return fftwq_alloc_complex(n); }
  static void release(Complex* p) { fftwq_free(p); }
  static Plan plan(int n, Complex* buf, int sign) { return fftwq_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE); }
  static void execute(Plan p, Complex* buf) { fftwq_execute_dft(p, buf, buf); }
  static void destroy(Plan p) { fftwq_destroy_plan(p); }
  static __float128 exp(__float128 x) { return expq(x); }
  static __float128 sqrt(__float128 x) { return sqrtq(x); }
  static void sincos(__float128 x, __float128* s, __float128* c) { sincosq(x, s, c); }
};

/// Uniform periodic grid x_j = x_min + j dx, j < points, dx = (x_max - x_min) / points.
class Grid1D {
 public:
  Grid1D(double x_min, double x_max, std::size_t points) : x_min_(x_min), x_max_(x_max), points_(points) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
      throw InvalidArgument("grid needs finite x_max > x_min");
    }
    if (points < 256 || !std::has_single_bit(points)) {
      throw InvalidArgument("grid point count must be a power of two >= 256");
    }
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t points() const { return points_; }
  double length() const { return x_max_ - x_min_; }
  double dx() const { return length() / static_cast<double>(points_); }
  double x(std::size_t j) const { return x_min_ + static_cast<double>(j) * dx(); }
  Grid1D refined() const { return Grid1D(x_min_, x_max_, 2 * points_); }
  bool operator==(const Grid1D&) const = default;

 private:
  double x_min_, x_max_;
  std::size_t points_;
};

struct CondensateParams {
  double atom_count = 1000;
  double scattering_length = 0;  // m
  double mass = 1.45e-25;        // kg
  double tau = 1e-3;             // s

  void validate() const {
    if (!(atom_count > 0) || !std::isfinite(atom_count)) throw InvalidArgument("atom count must be > 0");
    if (!(mass > 0) || !std::isfinite(mass)) throw InvalidArgument("atomic mass must be > 0");
    if (!(tau >= 0) || !std::isfinite(tau)) throw InvalidArgument("evolution time must be >= 0");
    if (!std::isfinite(scattering_length)) throw InvalidArgument("scattering length must be finite");
  }

  /// g / hbar = 4 pi hbar N a / m, in m/s.
  double coupling_over_hbar() const { return 4 * kPi * kHbar * atom_count * scattering_length / mass; }
};

/// Rb-87: N = 1000, a = 5.8 nm, m = 1.45e-25 kg, tau = 1 ms.
inline CondensateParams rubidium87() { return {1000, 5.8e-9, 1.45e-25, 1e-3}; }
/// Li-7: N = 500, a = -1.2 nm, m = 1.16e-26 kg, tau = 1 ms.
inline CondensateParams lithium7() { return {500, -1.2e-9, 1.16e-26, 1e-3}; }

/// w exp(-(x - center)^2 / (4 sigma^2)); sigma is the standard deviation of |psi|^2.
struct GaussianComponent {
  double center = 0;
  double sigma = 1e-6;
  complex_t weight = 1.0;
};

/// Equal-weight packets at -spacing, 0, +spacing with optional phases.
inline std::vector<GaussianComponent> three_gaussians(double spacing = 5e-6, double sigma = 1e-6,
                                                      std::array<double, 3> phases = {0, 0, 0}) {
  std::vector<GaussianComponent> out;
  for (int i = 0; i < 3; ++i) {
    out.push_back({(i - 1) * spacing, sigma, std::polar(1 / std::sqrt(3.0), phases[static_cast<std::size_t>(i)])});
  }
  return out;
}

template <class Real>
struct WaveField {
  Grid1D grid;
  std::vector<std::array<Real, 2>> values;
  Normalization norm = Normalization::kNormalized;

  Real mass() const {
    Real acc = 0;
    for (const auto& v : values) acc += v[0] * v[0] + v[1] * v[1];
    return acc * static_cast<Real>(grid.dx());
  }
};

/// |psi|^2 (1/m), times `scale`.
template <class Real>
std::vector<double> density(const WaveField<Real>& field, double scale = 1.0) {
  std::vector<double> out(field.values.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const auto& v = field.values[j];
    out[j] = scale * static_cast<double>(v[0] * v[0] + v[1] * v[1]);
  }
  return out;
}

/// Mass fraction in the outer eighth of the domain (outer sixteenth per side).
template <class Real>
double edge_mass_fraction(const WaveField<Real>& field) {
  const std::size_t p = field.values.size();
  const std::size_t edge = p / 16;
  Real outer = 0, total = 0;
  for (std::size_t j = 0; j < p; ++j) {
    const Real d = field.values[j][0] * field.values[j][0] + field.values[j][1] * field.values[j][1];
    total += d;
    if (j < edge || j >= p - edge) outer += d;
  }
  return total > 0 ? static_cast<double>(outer / total) : 0.0;
}

/// psi = C sum_{unblocked i} w_i G_i, with C normalizing the full superposition
/// to unit mass; blocked variants reuse C and are flagged unnormalized.
template <class Real>
WaveField<Real> init_superposition(const std::vector<GaussianComponent>& components, const BlockPattern& blocked,
                                   const Grid1D& grid) {
  using T = FftTraits<Real>;
  if (components.empty()) throw InvalidArgument("superposition needs at least one component");
  if (blocked.size() != components.size()) throw InvalidArgument("block pattern length does not match components");
  for (const auto& c : components) {
    if (!(c.sigma > 0) || !std::isfinite(c.center)) throw InvalidArgument("Gaussian needs sigma > 0 and finite center");
  }
  const std::size_t p = grid.points();
  std::vector<std::array<Real, 2>> full(p, {0, 0}), part(p, {0, 0});
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    const Real inv = 1 / (4 * static_cast<Real>(c.sigma) * static_cast<Real>(c.sigma));
    const Real wr = static_cast<Real>(c.weight.real()), wi = static_cast<Real>(c.weight.imag());
    for (std::size_t j = 0; j < p; ++j) {
      const Real x = static_cast<Real>(grid.x_min()) + static_cast<Real>(j) * static_cast<Real>(grid.dx());
      const Real d = x - static_cast<Real>(c.center);
      const Real g = T::exp(-d * d * inv);
      full[j][0] += wr * g;
      full[j][1] += wi * g;
      if (!blocked.blocked(i)) {
        part[j][0] += wr * g;
        part[j][1] += wi * g;
      }
    }
  }
  WaveField<Real> f{grid, std::move(full), Normalization::kNormalized};
  const Real m = f.mass();
  if (!(m > 0)) throw InvalidArgument("superposition vanishes on the grid");
  Real central = 0;
  for (std::size_t j = p / 4; j < 3 * p / 4; ++j) central += f.values[j][0] * f.values[j][0] + f.values[j][1] * f.values[j][1];
  central *= static_cast<Real>(grid.dx());
  if (static_cast<double>(central / m) < 1 - 1e-8) {
    throw InvalidArgument("grid too small: initial mass outside the central half of the domain exceeds 1e-8");
  }
  const Real scale = 1 / T::sqrt(m);
  for (auto& v : part) {
    v[0] *= scale;
    v[1] *= scale;
  }
  return {grid, std::move(part), blocked.blocked_count() == 0 ? Normalization::kNormalized : Normalization::kUnnormalized};
}

struct SolverSettings {
  double dt = 1e-6;  // s
  /// Boundary monitor period in steps.
  std::size_t monitor_interval = 64;
  /// Abort when the edge mass fraction exceeds this.
  double boundary_tolerance = 1e-8;
  /// Warn when the peak nonlinear phase per step exceeds this (rad).
  double phase_warning = 0.1;
  std::size_t workers = 1;
};

namespace detail {

template <class Real>
class FftBuffer {
 public:
  using T = FftTraits<Real>;
  explicit FftBuffer(std::size_t n) : n_(n) {
    std::lock_guard lock(fftw_planner_mutex());
    buf_ = T::alloc(n);
    forward_ = T::plan(static_cast<int>(n), buf_, FFTW_FORWARD);
    backward_ = T::plan(static_cast<int>(n), buf_, FFTW_BACKWARD);
  }
  ~FftBuffer() {
    std::lock_guard lock(fftw_planner_mutex());
    T::destroy(forward_);
    T::destroy(backward_);
    T::release(buf_);
  }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  typename T::Complex* data() { return buf_; }
  void forward() { T::execute(forward_, buf_); }
  void backward() { T::execute(backward_, buf_); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  typename T::Complex* buf_ = nullptr;
  typename T::Plan forward_{}, backward_{};
};

}  // namespace detail

/// Evolves `field` for `duration` (may be negative) in steps of |dt|.
template <class Real>
WaveField<Real> propagate(const WaveField<Real>& field, const CondensateParams& params, double duration,
                          const SolverSettings& settings = {}) {
  using T = FftTraits<Real>;
  params.validate();
  const double dt = settings.dt;
  if (!(dt > 0) || !std::isfinite(dt)) throw InvalidArgument("time step must be > 0");
  if (!std::isfinite(duration)) throw InvalidArgument("duration must be finite");
  const double steps_real = std::abs(duration) / dt;
  const auto steps = static_cast<std::size_t>(std::llround(steps_real));
  if (std::abs(steps_real - static_cast<double>(steps)) > 1e-6) {
    throw InvalidArgument("evolution time is not an integer number of time steps");
  }
  if (steps == 0) return field;

  const std::size_t p = field.grid.points();
  const Real h = static_cast<Real>(duration < 0 ? -dt : dt);
  const Real g = static_cast<Real>(params.coupling_over_hbar());

  double peak = 0;
  for (const auto& v : field.values) peak = std::max(peak, static_cast<double>(v[0] * v[0] + v[1] * v[1]));
  if (std::abs(params.coupling_over_hbar()) * peak * dt > settings.phase_warning) {
    warn("nonlinear phase per step " + detail::format_g(std::abs(params.coupling_over_hbar()) * peak * dt) +
         " rad exceeds " + detail::format_g(settings.phase_warning));
  }

  // Kinetic propagator exp(-i hbar k^2 h / 2m), with the 1/P of the inverse
  // transform folded in.
  std::vector<std::array<Real, 2>> kinetic(p);
  const Real kl = 2 * T::pi() / static_cast<Real>(field.grid.length());
  const Real kin_coeff = static_cast<Real>(kHbar) / (2 * static_cast<Real>(params.mass)) * h;
  for (std::size_t j = 0; j < p; ++j) {
    const Real k = kl * (j < p / 2 ? static_cast<Real>(j) : static_cast<Real>(j) - static_cast<Real>(p));
    Real s, c;
    T::sincos(-kin_coeff * k * k, &s, &c);
    kinetic[j] = {c / static_cast<Real>(p), s / static_cast<Real>(p)};
  }

  detail::FftBuffer<Real> fft(p);
  auto* buf = fft.data();
  for (std::size_t j = 0; j < p; ++j) {
    buf[j][0] = field.values[j][0];
    buf[j][1] = field.values[j][1];
  }
  auto nonlinear = [&](Real step) {
    if (g == 0) return;
    for (std::size_t j = 0; j < p; ++j) {
      const Real d = buf[j][0] * buf[j][0] + buf[j][1] * buf[j][1];
      Real s, c;
      T::sincos(-g * d * step, &s, &c);
      const Real re = buf[j][0] * c - buf[j][1] * s;
      buf[j][1] = buf[j][0] * s + buf[j][1] * c;
      buf[j][0] = re;
    }
  };
  auto check_boundary = [&](std::size_t step) {
    const std::size_t edge = p / 16;
    Real outer = 0, total = 0;
    for (std::size_t j = 0; j < p; ++j) {
      const Real d = buf[j][0] * buf[j][0] + buf[j][1] * buf[j][1];
      total += d;
      if (j < edge || j >= p - edge) outer += d;
    }
    if (total > 0 && static_cast<double>(outer / total) > settings.boundary_tolerance) {
      throw NumericalDiagnostic("boundary mass fraction " + detail::format_g(static_cast<double>(outer / total)) +
                                " exceeds " + detail::format_g(settings.boundary_tolerance) + " at step " +
                                std::to_string(step) + "; enlarge the domain");
    }
  };

  nonlinear(h / 2);
  for (std::size_t s = 0; s < steps; ++s) {
    fft.forward();
    for (std::size_t j = 0; j < p; ++j) {
      const Real re = buf[j][0] * kinetic[j][0] - buf[j][1] * kinetic[j][1];
      buf[j][1] = buf[j][0] * kinetic[j][1] + buf[j][1] * kinetic[j][0];
      buf[j][0] = re;
    }
    fft.backward();
    nonlinear(s + 1 < steps ? h : h / 2);
    if (settings.monitor_interval && (s + 1) % settings.monitor_interval == 0) check_boundary(s + 1);
  }
  check_boundary(steps);

  WaveField<Real> out{field.grid, std::vector<std::array<Real, 2>>(p), field.norm};
  for (std::size_t j = 0; j < p; ++j) out.values[j] = {buf[j][0], buf[j][1]};
  return out;
}

/// Advances `field` to t = params.tau.
template <class Real>
WaveField<Real> evolve(const WaveField<Real>& field, const CondensateParams& params,
                       const SolverSettings& settings = {}) {
  return propagate(field, params, params.tau, settings);
}

/// I_3(x) = sum_x (-1)^{|x|} |psi_x(x, tau)|^2 with the eight per-pattern
/// densities, all in 1/m.
struct Sorkin3Profile {
  Grid1D grid;
  std::vector<double> i3;
  std::array<std::vector<double>, 8> densities;

  double max_abs() const {
    double m = 0;
    for (double v : i3) m = std::max(m, std::abs(v));
    return m;
  }
};

template <class Real>
Sorkin3Profile sorkin3_profile(const std::vector<GaussianComponent>& components, const CondensateParams& params,
                               const Grid1D& grid, const SolverSettings& settings = {}) {
  if (components.size() != 3) throw InvalidArgument("third-order profile needs exactly three components");
  params.validate();
  const std::size_t p = grid.points();
  std::vector<std::vector<Real>> dens(8, std::vector<Real>(p, Real(0)));
  // The all-blocked pattern is the zero field; skip it.
  parallel_for(7, settings.workers, [&](std::size_t i) {
    const auto pattern = BlockPattern::from_index(3, i);
    SolverSettings inner = settings;
    inner.workers = 1;
    const auto out = evolve(init_superposition<Real>(components, pattern, grid), params, inner);
    for (std::size_t j = 0; j < p; ++j) dens[i][j] = out.values[j][0] * out.values[j][0] + out.values[j][1] * out.values[j][1];
  });
  Sorkin3Profile prof{grid, std::vector<double>(p), {}};
  for (std::size_t j = 0; j < p; ++j) {
    Real acc = 0;
    for (std::size_t i = 0; i < 8; ++i) acc += (std::popcount(i) % 2 ? -dens[i][j] : dens[i][j]);
    prof.i3[j] = static_cast<double>(acc);
  }
  for (std::size_t i = 0; i < 8; ++i) {
    prof.densities[i].resize(p);
    for (std::size_t j = 0; j < p; ++j) prof.densities[i][j] = static_cast<double>(dens[i][j]);
  }
  return prof;
}

/// max_j |f(x_j) - f(-x_j)| / max |f|, using x_{P-j} = -x_j on a grid
/// symmetric about 0. Returns 0 for a zero profile.
inline double evenness_error(const std::vector<double>& f) {
  const std::size_t p = f.size();
  double diff = 0, peak = 0;
  for (std::size_t j = 0; j < p; ++j) {
    diff = std::max(diff, std::abs(f[j] - f[(p - j) % p]));
    peak = std::max(peak, std::abs(f[j]));
  }
  return peak > 0 ? diff / peak : 0.0;
}

struct ConvergenceReport {
  double coarse_max = 0;
  double fine_max = 0;
  /// max_j |I_fine(x_j) - I_coarse(x_j)| on the coarse points.
  double max_change = 0;
  double relative_change = 0;
  /// Profiles below this (1/m) count as zero; set from the working precision.
  double absolute_floor = 0;
  bool used_absolute = false;
  double threshold = 0.01;
  bool pass = false;
};

/// Compares sorkin3_profile at (dx, dt) and (dx/2, dt/2).
template <class Real>
ConvergenceReport convergence_report(const std::vector<GaussianComponent>& components, const CondensateParams& params,
                                     const Grid1D& grid, const SolverSettings& settings = {}, double threshold = 0.01) {
  const auto coarse = sorkin3_profile<Real>(components, params, grid, settings);
  SolverSettings fine_settings = settings;
  fine_settings.dt = settings.dt / 2;
  fine_settings.monitor_interval = settings.monitor_interval * 2;
  const auto fine = sorkin3_profile<Real>(components, params, grid.refined(), fine_settings);
  ConvergenceReport r;
  r.threshold = threshold;
  r.coarse_max = coarse.max_abs();
  r.fine_max = fine.max_abs();
  for (std::size_t j = 0; j < coarse.i3.size(); ++j) {
    r.max_change = std::max(r.max_change, std::abs(fine.i3[2 * j] - coarse.i3[j]));
  }
  double peak_density = 0;
  for (double v : coarse.densities[0]) peak_density = std::max(peak_density, v);
  r.absolute_floor = 1e4 * FftTraits<Real>::kEpsilon * peak_density;
  const double scale = std::max(r.coarse_max, r.fine_max);
  r.relative_change = scale > 0 ? r.max_change / scale : 0.0;
  if (scale < r.absolute_floor) {
    r.used_absolute = true;
    r.pass = r.max_change < r.absolute_floor;
  } else {
    r.pass = r.relative_change < threshold;
  }
  return r;
}

}  // namespace sorkin

#endif  // SORKIN_GPE_HPP_
