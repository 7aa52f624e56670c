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

// Brute-force reference: every operator is a dense matrix on the truncated
// space, blockers act through their Kraus operators |0><k|_m, and intensities
// are traces. Only usable for small dimensions.

#ifndef SORKIN_TESTS_DENSE_ORACLE_HPP_
#define SORKIN_TESTS_DENSE_ORACLE_HPP_

#include <bit>
#include <vector>

#include <Eigen/Dense>

#include "sorkin/circuits.hpp"
#include "sorkin/fock.hpp"

namespace sorkin::oracle {

inline CMatrix lowering(const OccupationBasis& basis, std::size_t mode) {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  CMatrix a = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    auto occ = basis.occupation(i);
    if (occ[mode] == 0) continue;
    const double amp = std::sqrt(static_cast<double>(occ[mode]));
    --occ[mode];
    a(static_cast<Eigen::Index>(basis.index(occ)), static_cast<Eigen::Index>(i)) = amp;
  }
  return a;
}

inline CMatrix number(const OccupationBasis& basis, std::size_t mode) {
  const CMatrix a = lowering(basis, mode);
  return a.adjoint() * a;
}

inline CMatrix exp_i(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian);
  const CVector ph = eig.eigenvalues().unaryExpr([](double l) { return std::polar(1.0, l); });
  return eig.eigenvectors() * ph.asDiagonal() * eig.eigenvectors().adjoint();
}

inline CMatrix linear_unitary(const OccupationBasis& basis, const CMatrix& h) {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  CMatrix big = CMatrix::Zero(d, d);
  std::vector<CMatrix> a;
  for (std::size_t m = 0; m < basis.mode_count(); ++m) a.push_back(lowering(basis, m));
  for (std::size_t n = 0; n < basis.mode_count(); ++n) {
    for (std::size_t m = 0; m < basis.mode_count(); ++m) {
      const complex_t c = h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
      if (c != 0.0) big += c * a[n].adjoint() * a[m];
    }
  }
  return exp_i(0.5 * (big + big.adjoint()));
}

inline CMatrix kerr_unitary(const OccupationBasis& basis, std::size_t j, std::size_t k, double theta) {
  return exp_i(theta * number(basis, j) * number(basis, k));
}

inline CMatrix circuit_unitary(const OccupationBasis& basis, const Circuit& circuit) {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  CMatrix u = CMatrix::Identity(d, d);
  for (const auto& e : circuit.elements()) {
    if (const auto* l = std::get_if<LinearCoupler>(&e)) {
      u = linear_unitary(basis, l->hamiltonian()) * u;
    } else {
      const auto& g = std::get<CrossKerr>(e);
      u = kerr_unitary(basis, g.mode_j, g.mode_k, g.theta) * u;
    }
  }
  return u;
}

// sum_k |0><k|_m rho |k><0|_m
inline CMatrix block(const OccupationBasis& basis, const CMatrix& rho, std::size_t mode) {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  CMatrix out = CMatrix::Zero(d, d);
  for (std::size_t k = 0; k <= basis.cap(mode); ++k) {
    CMatrix kraus = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < basis.dim(); ++i) {
      auto occ = basis.occupation(i);
      if (occ[mode] != k) continue;
      occ[mode] = 0;
      kraus(static_cast<Eigen::Index>(basis.index(occ)), static_cast<Eigen::Index>(i)) = 1.0;
    }
    out += kraus * rho * kraus.adjoint();
  }
  return out;
}

inline CMatrix blocked(const OccupationBasis& basis, CMatrix rho, std::size_t pattern_index) {
  const std::size_t m = basis.mode_count();
  for (std::size_t mode = 0; mode < m; ++mode) {
    if (pattern_index >> (m - 1 - mode) & 1) rho = block(basis, rho, mode);
  }
  return rho;
}

/// Intensities Tr(obs U rho_x U^dag) for every pattern index x.
inline std::vector<double> intensities(const OccupationBasis& basis, const CMatrix& rho, const CMatrix& u,
                                       const CMatrix& obs) {
  std::vector<double> out;
  for (std::size_t x = 0; x < (std::size_t{1} << basis.mode_count()); ++x) {
    out.push_back((obs * u * blocked(basis, rho, x) * u.adjoint()).trace().real());
  }
  return out;
}

inline double alternating_sum(const std::vector<double>& v) {
  double acc = 0;
  for (std::size_t x = 0; x < v.size(); ++x) acc += (std::popcount(x) % 2 ? -1.0 : 1.0) * v[x];
  return acc;
}

}  // namespace sorkin::oracle

#endif  // SORKIN_TESTS_DENSE_ORACLE_HPP_
