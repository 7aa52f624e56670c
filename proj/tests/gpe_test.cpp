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

#include "sorkin/gpe.hpp"

#include <gtest/gtest.h>

#include <numeric>

namespace sorkin {
namespace {

constexpr double kUm = 1e-6;

Grid1D small_grid() { return Grid1D(-30 * kUm, 30 * kUm, 256); }

// Rb-87 with the atom number raised until the nonlinear phase is O(1) rad,
// so splitting effects dominate double round-off.
CondensateParams strong_repulsive() {
  auto p = rubidium87();
  p.atom_count = 1e14;
  return p;
}

double max_abs_diff(const WaveField<double>& a, const WaveField<double>& b) {
  double m = 0;
  for (std::size_t j = 0; j < a.values.size(); ++j) {
    m = std::max(m, std::hypot(a.values[j][0] - b.values[j][0], a.values[j][1] - b.values[j][1]));
  }
  return m;
}

double second_moment(const WaveField<double>& f) {
  const auto d = density(f);
  double acc = 0;
  for (std::size_t j = 0; j < d.size(); ++j) acc += f.grid.x(j) * f.grid.x(j) * d[j];
  return acc * f.grid.dx();
}

// Closed-form integral of |sum_{open i} w_i G_i|^2 / |sum_i w_i G_i|^2 for
// real weights: int G_i G_j = sqrt(2 pi) sigma exp(-(c_i - c_j)^2 / (8 sigma^2)).
double gaussian_mass_ratio(const std::vector<GaussianComponent>& comps, const std::vector<bool>& open) {
  double part = 0, full = 0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (std::size_t j = 0; j < comps.size(); ++j) {
      const double s = comps[i].sigma;
      const double d = comps[i].center - comps[j].center;
      const double o = (comps[i].weight * std::conj(comps[j].weight)).real() * std::sqrt(2 * kPi) * s *
                       std::exp(-d * d / (8 * s * s));
      full += o;
      if (open[i] && open[j]) part += o;
    }
  }
  return part / full;
}

TEST(Grid1D, Validation) {
  EXPECT_THROW(Grid1D(0, 1, 100), InvalidArgument);
  EXPECT_THROW(Grid1D(0, 1, 128), InvalidArgument);
  EXPECT_THROW(Grid1D(1, 0, 256), InvalidArgument);
  const Grid1D g(-1, 1, 256);
  EXPECT_DOUBLE_EQ(g.dx(), 2.0 / 256);
  EXPECT_EQ(g.refined().points(), 512u);
}

TEST(InitSuperposition, NormalizationAndBlocking) {
  const auto comps = three_gaussians();
  const auto grid = small_grid();
  const auto full = init_superposition<double>(comps, BlockPattern::open(3), grid);
  EXPECT_NEAR(full.mass(), 1.0, 1e-10);
  EXPECT_EQ(full.norm, Normalization::kNormalized);
  const auto none = init_superposition<double>(comps, BlockPattern::parse("111"), grid);
  EXPECT_EQ(none.mass(), 0.0);
  const auto one = init_superposition<double>(comps, BlockPattern::parse("100"), grid);
  EXPECT_EQ(one.norm, Normalization::kUnnormalized);
  EXPECT_NEAR(one.mass(), gaussian_mass_ratio(comps, {false, true, true}), 1e-10);
  EXPECT_NEAR(one.mass(), 2.0 / 3, 1e-2);
  const auto two = init_superposition<double>(comps, BlockPattern::parse("101"), grid);
  EXPECT_NEAR(two.mass(), gaussian_mass_ratio(comps, {false, true, false}), 1e-10);
  const auto d = density(two);
  EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0) * grid.dx(), two.mass(), 1e-14);
}

TEST(InitSuperposition, RejectsBadInput) {
  const auto comps = three_gaussians();
  EXPECT_THROW(init_superposition<double>(comps, BlockPattern::open(2), small_grid()), InvalidArgument);
  EXPECT_THROW(init_superposition<double>({}, BlockPattern::open(0), small_grid()), InvalidArgument);
  // Packets at +-5 um do not fit in the central half of [-8, 8] um.
  EXPECT_THROW(init_superposition<double>(comps, BlockPattern::open(3), Grid1D(-8 * kUm, 8 * kUm, 256)),
               InvalidArgument);
}

TEST(Evolve, ZeroDurationIsIdentity) {
  const auto f = init_superposition<double>(three_gaussians(), BlockPattern::open(3), small_grid());
  auto p = strong_repulsive();
  p.tau = 0;
  EXPECT_EQ(max_abs_diff(evolve(f, p), f), 0.0);
}

TEST(Evolve, FreeGaussianSpreading) {
  const std::vector<GaussianComponent> one = {{0.0, 1 * kUm, 1.0}};
  const auto grid = small_grid();
  const auto f = init_superposition<double>(one, BlockPattern::open(1), grid);
  auto p = rubidium87();
  p.scattering_length = 0;
  SolverSettings s;
  s.dt = 1e-5;
  const auto out = evolve(f, p, s);
  const double sigma0 = 1 * kUm;
  const double spread = kHbar * p.tau / (2 * p.mass * sigma0 * sigma0);
  const double expected = sigma0 * sigma0 * (1 + spread * spread);
  EXPECT_NEAR(second_moment(f), sigma0 * sigma0, 1e-6 * sigma0 * sigma0);
  EXPECT_NEAR(second_moment(out), expected, 1e-6 * expected);
  EXPECT_NEAR(out.mass(), 1.0, 1e-12);
}

TEST(Evolve, NormConservedWithInteraction) {
  // Li-7 spreads faster than Rb-87, hence the wider grid.
  const auto f = init_superposition<double>(three_gaussians(), BlockPattern::parse("010"), Grid1D(-60 * kUm, 60 * kUm, 512));
  auto attractive = lithium7();
  attractive.atom_count = 1e13;
  for (auto p : {strong_repulsive(), attractive}) {
    const auto out = evolve(f, p);
    EXPECT_NEAR(out.mass() / f.mass(), 1.0, 1e-9);
  }
}

TEST(Evolve, TimeReversalWithoutInteraction) {
  const auto f = init_superposition<double>(three_gaussians(), BlockPattern::open(3), small_grid());
  auto p = rubidium87();
  p.scattering_length = 0;
  const auto there = propagate(f, p, p.tau);
  const auto back = propagate(there, p, -p.tau);
  double peak = 0;
  for (const auto& v : f.values) peak = std::max(peak, std::hypot(v[0], v[1]));
  EXPECT_LT(max_abs_diff(back, f), 1e-8 * peak);
  EXPECT_GT(max_abs_diff(there, f), 1e-3 * peak);
}

TEST(Evolve, RejectsNonIntegerStepCount) {
  const auto f = init_superposition<double>(three_gaussians(), BlockPattern::open(3), small_grid());
  SolverSettings s;
  s.dt = 3e-7;
  EXPECT_THROW(evolve(f, rubidium87(), s), InvalidArgument);
}

TEST(Evolve, BoundaryMonitorAborts) {
  const std::vector<GaussianComponent> one = {{0.0, 1 * kUm, 1.0}};
  const auto f = init_superposition<double>(one, BlockPattern::open(1), Grid1D(-12 * kUm, 12 * kUm, 256));
  auto p = lithium7();  // light atoms spread to ~4.6 um in 1 ms
  p.scattering_length = 0;
  EXPECT_THROW(evolve(f, p), NumericalDiagnostic);
}

TEST(Evolve, WarnsOnLargeNonlinearPhase) {
  const auto f = init_superposition<double>(three_gaussians(), BlockPattern::open(3), small_grid());
  auto p = strong_repulsive();
  p.atom_count = 1e17;
  p.tau = 1e-5;
  std::vector<std::string> seen;
  auto previous = set_warning_handler([&](std::string_view m) { seen.emplace_back(m); });
  SolverSettings s;
  s.dt = 1e-5;
  s.monitor_interval = 0;
  evolve(f, p, s);
  set_warning_handler(previous);
  ASSERT_EQ(seen.size(), 1u);
}

TEST(Evolve, SecondOrderInTimeStep) {
  const auto f = init_superposition<double>(three_gaussians(), BlockPattern::parse("010"), small_grid());
  auto p = strong_repulsive();
  p.atom_count = 1e15;
  auto run = [&](double dt) {
    SolverSettings s;
    s.dt = dt;
    return evolve(f, p, s);
  };
  const auto ref = run(2.5e-6);
  const double e1 = max_abs_diff(run(2e-5), ref);
  const double e2 = max_abs_diff(run(1e-5), ref);
  // The reference uses a quarter of the smaller step; a second-order scheme
  // gives (1 - 1/64) / (1/4 - 1/64) = 4.2.
  const double ratio = e1 / e2;
  EXPECT_GE(ratio, 3.0) << e1 << ' ' << e2;
  EXPECT_LE(ratio, 5.0) << e1 << ' ' << e2;
}

TEST(Sorkin3Profile, LinearNull) {
  auto p = rubidium87();
  p.scattering_length = 0;
  const auto prof = sorkin3_profile<double>(three_gaussians(), p, small_grid(), {1e-6, 64, 1e-8, 0.1, 0});
  EXPECT_LT(prof.max_abs() * kUm, 1e-9);
  double peak = 0;
  for (double v : prof.densities[0]) peak = std::max(peak, v);
  EXPECT_GT(peak * kUm, 0.05);
  for (double v : prof.densities[7]) EXPECT_EQ(v, 0.0);
}

TEST(Sorkin3Profile, InteractingProfilesEvenAndSignDependent) {
  SolverSettings s;
  s.workers = 0;
  const auto rep = sorkin3_profile<double>(three_gaussians(), strong_repulsive(), small_grid(), s);
  auto attractive = strong_repulsive();
  attractive.scattering_length = -attractive.scattering_length;
  const auto att = sorkin3_profile<double>(three_gaussians(), attractive, small_grid(), s);
  EXPECT_GT(rep.max_abs() * kUm, 1e-6);
  EXPECT_LT(evenness_error(rep.i3), 1e-6);
  EXPECT_LT(evenness_error(att.i3), 1e-6);
  double diff = 0;
  for (std::size_t j = 0; j < rep.i3.size(); ++j) diff = std::max(diff, std::abs(rep.i3[j] - att.i3[j]));
  EXPECT_GT(diff, 0.1 * std::max(rep.max_abs(), att.max_abs()));
}

TEST(Sorkin3Profile, DeterministicAcrossWorkers) {
  SolverSettings one, many;
  many.workers = 4;
  const auto a = sorkin3_profile<double>(three_gaussians(), strong_repulsive(), small_grid(), one);
  const auto b = sorkin3_profile<double>(three_gaussians(), strong_repulsive(), small_grid(), many);
  EXPECT_EQ(a.i3, b.i3);
}

TEST(ConvergenceReport, PassFailAndAbsoluteFloor) {
  SolverSettings s;
  s.workers = 0;
  auto free = rubidium87();
  free.scattering_length = 0;
  const auto zero = convergence_report<double>(three_gaussians(), free, small_grid(), s);
  EXPECT_TRUE(zero.used_absolute);
  EXPECT_TRUE(zero.pass);

  const auto good = convergence_report<double>(three_gaussians(), strong_repulsive(), small_grid(), s);
  EXPECT_FALSE(good.used_absolute);
  EXPECT_TRUE(good.pass) << good.relative_change;

  const auto coarse =
      convergence_report<double>(three_gaussians(), strong_repulsive(), Grid1D(-600 * kUm, 600 * kUm, 256), s);
  EXPECT_FALSE(coarse.pass) << coarse.relative_change;
}

}  // namespace
}  // namespace sorkin
