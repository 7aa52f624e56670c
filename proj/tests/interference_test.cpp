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

#include "sorkin/interference.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "dense_oracle.hpp"
#include "sorkin/analytic.hpp"

namespace sorkin {
namespace {

CVector random_vector(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CVector v(static_cast<Eigen::Index>(dim));
  for (auto& c : v) c = complex_t(g(rng), g(rng));
  return v.normalized();
}

// Random pure state with total photon number <= n_total.
QuantumState random_state(const OccupationBasis& basis, std::size_t n_total, std::uint64_t seed) {
  CVector v = random_vector(basis.dim(), seed);
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    if (basis.total_photons(i) > n_total) v(static_cast<Eigen::Index>(i)) = 0;
  }
  return QuantumState::pure(basis, v.normalized());
}

QuantumState two_photon_example(const OccupationBasis& basis) {
  const double h = 0.5;
  const std::vector<FockTerm> terms = {
      {h, {0, 1, 0}}, {h, {0, 1, 1}}, {h, {1, 0, 0}}, {h, {1, 0, 1}}};
  return make_superposition(basis, terms);
}

IntensityTable table_of(std::size_t m, const std::vector<double>& v) {
  IntensityTable t(m);
  for (std::size_t i = 0; i < v.size(); ++i) t.set(i, v[i]);
  return t;
}

Circuit single(const CircuitElement& e, std::size_t m) {
  Circuit c(m);
  c.append(e);
  return c;
}

TEST(Intensity, VacuumAndAllBlockedGiveZero) {
  OccupationBasis basis(3, 2);
  const auto circuit = single(random_linear_coupler(3, 1), 3);
  const auto vac = make_fock_state(basis, std::vector<std::size_t>{0, 0, 0});
  EXPECT_EQ(intensity(vac, BlockPattern::open(3), circuit, IdealDetector{}, 0), 0.0);
  const auto s = QuantumState::pure(basis, random_vector(basis.dim(), 2));
  EXPECT_NEAR(intensity(s, BlockPattern::parse("111"), circuit, IdealDetector{}, 1), 0.0, 1e-15);
  EXPECT_THROW(intensity(s, BlockPattern::parse("11"), circuit, IdealDetector{}, 0), InvalidArgument);
  EXPECT_THROW(intensity(s, BlockPattern::parse("111"), circuit, IdealDetector{}, 3), InvalidArgument);
}

TEST(Intensity, SinglePhotonTwoPaths) {
  OccupationBasis basis(2, 1);
  const std::vector<FockTerm> terms = {{1.0, {1, 0}}, {1.0, {0, 1}}};
  const auto s = make_superposition(basis, terms);
  const auto table = intensity_table(s, single(beam_splitter(2, 0, 1), 2), IdealDetector{}, 0);
  EXPECT_NEAR(table.at(BlockPattern::parse("00")), 1.0, 1e-15);
  EXPECT_NEAR(table.at(BlockPattern::parse("01")), 0.25, 1e-15);
  EXPECT_NEAR(table.at(BlockPattern::parse("10")), 0.25, 1e-15);
  EXPECT_NEAR(table.at(BlockPattern::parse("11")), 0.0, 1e-15);
  EXPECT_NEAR(sorkin_term(table), 0.5, 1e-15);
  // Destructive port.
  EXPECT_NEAR(intensity(s, BlockPattern::open(2), single(beam_splitter(2, 0, 1), 2), IdealDetector{}, 1), 0.0, 1e-15);
}

TEST(SorkinTerm, AlternatingSum) {
  EXPECT_EQ(sorkin_term(table_of(3, std::vector<double>(8, 0.7))), 0.0);
  EXPECT_EQ(sorkin_term(table_of(2, {1.0, 0.5, 0.5, 0.0})), 0.0);
  EXPECT_EQ(sorkin_term(table_of(1, {2.0, 0.5})), 1.5);
  IntensityTable partial(2);
  partial.set(0, 1.0);
  EXPECT_THROW(sorkin_term(partial), InvalidArgument);
}

TEST(SorkinSubsets, EdgeOrders) {
  std::vector<double> v(8);
  for (std::size_t i = 0; i < 8; ++i) v[i] = std::sin(1.0 + static_cast<double>(i * i));
  v[7] = 0;
  const auto t = table_of(3, v);
  const auto full = sorkin_subsets(t, 3);
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(full[0].value, sorkin_term(t));
  const auto singles = sorkin_subsets(t, 1, UnusedPaths::kBlocked);
  ASSERT_EQ(singles.size(), 3u);
  EXPECT_EQ(singles[0].value, t.at(BlockPattern::parse("011")));
  EXPECT_EQ(singles[1].value, t.at(BlockPattern::parse("101")));
  EXPECT_EQ(singles[2].value, t.at(BlockPattern::parse("110")));
  const auto open = sorkin_subsets(t, 1, UnusedPaths::kOpen);
  EXPECT_EQ(open[2].value, t.at(BlockPattern::parse("000")) - t.at(BlockPattern::parse("001")));
  EXPECT_EQ(sorkin_subsets(t, 2).size(), 3u);
  EXPECT_THROW(sorkin_subsets(t, 4), InvalidArgument);
}

TEST(SorkinSubsets, FourPathDecomposition) {
  // I_4 equals the difference of the order-3 terms on {0,1,2} with path 3
  // open and blocked.
  std::vector<double> v(16);
  for (std::size_t i = 0; i < 16; ++i) v[i] = std::cos(0.3 * static_cast<double>(i * i + 1));
  const auto t = table_of(4, v);
  const double open = sorkin_subsets(t, 3, UnusedPaths::kOpen)[0].value;
  const double blocked = sorkin_subsets(t, 3, UnusedPaths::kBlocked)[0].value;
  EXPECT_NEAR(sorkin_term(t), open - blocked, 1e-14);
}

TEST(FockExample, MatchesDenseOracle) {
  OccupationBasis basis(3, 2);
  const auto s = two_photon_example(basis);
  for (double theta : {0.0, kPi / 4, kPi / 2, kPi, 2.1}) {
    const auto circuit = build_kerr_cascade(3, theta);
    const double sim = sorkin_term(intensity_table(s, circuit, IdealDetector{}, 0));
    const CVector psi = s.amplitudes();
    const double ref = oracle::alternating_sum(oracle::intensities(
        basis, psi * psi.adjoint(), oracle::circuit_unitary(basis, circuit), oracle::number(basis, 0)));
    EXPECT_NEAR(sim, ref, 1e-12) << theta;
    EXPECT_NEAR(sim, fock_example_i3_port_one(theta), 1e-12) << theta;
  }
}

TEST(LinearNull, RandomCouplersCoherentAndFock) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto circuit = single(random_linear_coupler(3, seed), 3);
    const CoherentSpec spec{{complex_t(0.6, 0.2), complex_t(-0.4, 0.5), complex_t(0.1, -0.7)}};
    const auto basis = truncation_for(spec, circuit, 1e-13);
    const auto coh = make_coherent_state(spec, basis, 1e-13);
    for (std::size_t out = 0; out < 3; ++out) {
      EXPECT_LT(std::abs(sorkin_term(intensity_table(coh, circuit, IdealDetector{}, out))), 1e-10);
    }
    OccupationBasis small(3, 3);
    const auto fock = make_fock_state(small, std::vector<std::size_t>{1, 2, 0});
    EXPECT_LT(std::abs(sorkin_term(intensity_table(fock, circuit, IdealDetector{}, 0))), 1e-12);
  }
}

TEST(SingleParticleNull, NonlinearDiagonalGates) {
  OccupationBasis basis(3, 1);
  Circuit c(3);
  c.append(random_linear_coupler(3, 3)).append(CrossKerr(0, 1, 1.1)).append(CrossKerr(1, 2, -0.4));
  c.append(random_linear_coupler(3, 4));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CVector v = random_vector(basis.dim(), seed);
    for (std::size_t i = 0; i < basis.dim(); ++i) {
      if (basis.total_photons(i) != 1) v(static_cast<Eigen::Index>(i)) = 0;
    }
    const auto s = QuantumState::pure(basis, v.normalized());
    EXPECT_LT(std::abs(sorkin_term(intensity_table(s, c, IdealDetector{}, 0))), 1e-12);
  }
}

TEST(ClassicalNull, DiagonalProductInputs) {
  OccupationBasis basis(2, 4);
  CMatrix rho = CMatrix::Zero(25, 25);
  const double p0[3] = {0.5, 0.3, 0.2}, p1[3] = {0.1, 0.6, 0.3};
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      const auto i = static_cast<Eigen::Index>(basis.index(std::vector<std::size_t>{a, b}));
      rho(i, i) = p0[a] * p1[b];
    }
  }
  const auto s = QuantumState::mixed(basis, rho);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    EXPECT_LT(std::abs(sorkin_term(intensity_table(s, single(random_linear_coupler(2, seed), 2), IdealDetector{}, 0))),
              1e-12);
  }
}

TEST(Detectors, NoiseShiftsEveryIntensityByItsMean) {
  OccupationBasis basis(3, 2);
  const auto s = two_photon_example(basis);
  const auto circuit = build_kerr_cascade(3, 0.8);
  const auto ideal = intensity_table(s, circuit, IdealDetector{}, 0);
  for (const auto& det : {poisson_noise(0.7), two_point_noise(0.3, 4)}) {
    const double delta = noise_offset(std::get<NoisyDetector>(det));
    const auto noisy = intensity_table(s, circuit, det, 0);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(noisy.at(i) - ideal.at(i), delta, 1e-12);
    EXPECT_NEAR(sorkin_term(noisy), sorkin_term(ideal), 1e-12);
  }
  EXPECT_NEAR(noise_offset(std::get<NoisyDetector>(two_point_noise(0.3, 4))), 1.2, 1e-15);
  EXPECT_NEAR(noise_offset(std::get<NoisyDetector>(poisson_noise(0.7))), 0.7, 1e-14);
  EXPECT_THROW(noisy_detector({0.5, 0.4}), InvalidArgument);
}

TEST(Detectors, ResponsesOnKnownDistribution) {
  const std::vector<double> p = {0.2, 0.5, 0.3};  // <n> = 1.1, <n^2> = 1.7
  EXPECT_NEAR(detector_response(IdealDetector{}, p), 1.1, 1e-15);
  EXPECT_NEAR(detector_response(saturating_detector(0.1), p), 1.1 - 0.17, 1e-15);
  EXPECT_NEAR(detector_response(saturating_detector(0.1, SaturationForm::kScalar), p), 1.1 - 0.121, 1e-15);
  EXPECT_NEAR(detector_response(correlation_detector(2), p), 0.6, 1e-15);
  EXPECT_THROW(saturating_detector(-1.0), InvalidArgument);
}

TEST(Detectors, SaturatingTritter) {
  for (double n : {0.5, 1.0}) {
    const complex_t alpha(std::sqrt(n), 0.0);
    const CoherentSpec spec{{alpha, alpha, alpha}};
    const auto circuit = single(make_tritter(), 3);
    const auto basis = truncation_for(spec, circuit, 1e-14);
    const auto s = make_coherent_state(spec, basis, 1e-14);
    const double i3 = sorkin_term(intensity_table(s, circuit, saturating_detector(0.01), 0, {4}));
    EXPECT_NEAR(i3, saturating_tritter_i3(0.01, n), 1e-10);
  }
}

TEST(IntensityTable, DeterministicAcrossWorkerCounts) {
  const CoherentSpec spec{{0.5, complex_t(0.2, 0.6), -0.7}};
  const auto circuit = build_kerr_cascade(3, 0.9);
  const auto basis = truncation_for(spec, circuit, 1e-12);
  const auto s = make_coherent_state(spec, basis, 1e-12);
  const auto a = intensity_table(s, circuit, IdealDetector{}, 0, {1});
  const auto b = intensity_table(s, circuit, IdealDetector{}, 0, {8});
  EXPECT_EQ(a.values(), b.values());
}

TEST(InterferenceOperator, VacuumGivesZero) {
  OccupationBasis basis(3, 1);
  const auto op = interference_operator(make_fock_state(basis, std::vector<std::size_t>{0, 0, 0}), 3);
  EXPECT_EQ(op.matrix.norm(), 0.0);
}

TEST(InterferenceOperator, ProductCoherentFactorizes) {
  OccupationBasis basis(3, 4);
  const std::vector<complex_t> alpha = {0.5, complex_t(0.1, 0.4), -0.3};
  const auto s = make_coherent_state(CoherentSpec{alpha}, basis, 1e-3);
  const auto op = interference_operator(s, 3);
  CMatrix expected = CMatrix::Ones(1, 1);
  for (const auto& a : alpha) {
    const CVector c = detail::coherent_amplitudes(a, 4).normalized();
    CMatrix f = c * c.adjoint();
    f(0, 0) -= 1.0;
    CMatrix next(expected.rows() * f.rows(), expected.cols() * f.cols());
    for (Eigen::Index i = 0; i < expected.rows(); ++i) {
      for (Eigen::Index j = 0; j < expected.cols(); ++j) next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = expected(i, j) * f;
    }
    expected = next;
  }
  EXPECT_LT((op.matrix - expected).norm(), 1e-14);
}

TEST(InterferenceOperator, TraceIdentities) {
  OccupationBasis basis(std::vector<std::size_t>{2, 1, 2, 1});
  const auto s = QuantumState::pure(basis, random_vector(basis.dim(), 99));
  const auto op = interference_operator(s, 4);
  EXPECT_LT((op.matrix - op.matrix.adjoint()).norm(), 1e-15);
  for (std::size_t mask = 1; mask < 16; ++mask) {
    std::vector<std::size_t> modes;
    for (std::size_t m = 0; m < 4; ++m) {
      if (mask >> m & 1) modes.push_back(m);
    }
    EXPECT_LT(partial_trace_check(op, modes), 1e-14) << mask;
  }
  EXPECT_THROW(interference_operator(s, 3), DimensionMismatch);
}

TEST(Multipartite, FirstOrderIsIdealSorkin) {
  const CoherentSpec spec{{0.5, 0.6, complex_t(0, 0.5)}};
  const auto circuit = build_kerr_cascade(3, 1.0);
  const auto basis = truncation_for(spec, circuit, 1e-12);
  const auto s = make_coherent_state(spec, basis, 1e-12);
  const double a = multipartite_sorkin(s, circuit, 3, 1);
  EXPECT_EQ(a, sorkin_term(intensity_table(s, circuit, IdealDetector{}, 0)));
  EXPECT_GT(std::abs(a), 1e-3);
}

TEST(Multipartite, LinearVanishesAboveTwiceTheOrder) {
  OccupationBasis basis(4, 3);
  const auto s = random_state(basis, 3, 5);
  const auto circuit = single(random_linear_coupler(4, 6), 4);
  EXPECT_LT(std::abs(multipartite_sorkin(s, circuit, 4, 1)), 1e-12);
  // M <= 2n: not forced to vanish.
  EXPECT_GT(std::abs(multipartite_sorkin(s, circuit, 4, 2)), 1e-6);
  OccupationBasis tb(3, 3);
  EXPECT_LT(std::abs(multipartite_sorkin(random_state(tb, 3, 1), single(make_tritter(), 3), 3, 1)),
            1e-12);
}

TEST(Hierarchy, LinearFourPath) {
  const CoherentSpec spec{{0.4, complex_t(0.3, 0.3), -0.5, complex_t(0, 0.2)}};
  const auto circuit = single(random_linear_coupler(4, 12), 4);
  const auto basis = truncation_for(spec, circuit, 1e-11);
  const auto s = make_coherent_state(spec, basis, 1e-11);
  const auto t = intensity_table(s, circuit, IdealDetector{}, 2, {0});
  for (auto unused : {UnusedPaths::kOpen, UnusedPaths::kBlocked}) {
    for (const auto& term : sorkin_subsets(t, 3, unused)) EXPECT_LT(std::abs(term.value), 1e-9);
  }
  EXPECT_LT(std::abs(sorkin_term(t)), 1e-9);
}

}  // namespace
}  // namespace sorkin
