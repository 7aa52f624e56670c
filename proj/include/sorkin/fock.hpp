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

// Truncated multi-mode bosonic Fock space: occupation basis, pure and mixed
// states, coherent-state preparation, partial traces and the path blocker.
//
// Indexing convention: the flat index is row-major over occupation tuples,
// mode 0 being the most significant digit,
//
//   index(n_0, ..., n_{M-1}) = sum_m n_m * stride_m,
//   stride_{M-1} = 1,  stride_m = stride_{m+1} * (cap_{m+1} + 1).
//
// Modes are numbered from 0 throughout the library.

#ifndef SORKIN_FOCK_HPP_
#define SORKIN_FOCK_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sorkin/common.hpp"

namespace sorkin {

class OccupationBasis {
 public:
  OccupationBasis() = default;

  /// Uniform cap `n_max` (inclusive) on every mode.
  OccupationBasis(std::size_t mode_count, std::size_t n_max)
      : OccupationBasis(std::vector<std::size_t>(mode_count, n_max)) {}

  explicit OccupationBasis(std::vector<std::size_t> caps) : caps_(std::move(caps)) {
    if (caps_.empty()) throw InvalidArgument("OccupationBasis needs at least one mode");
    strides_.assign(caps_.size(), 1);
    std::size_t dim = 1;
    for (std::size_t m = caps_.size(); m-- > 0;) {
      strides_[m] = dim;
      const std::size_t levels = caps_[m] + 1;
      if (dim > std::numeric_limits<std::uint32_t>::max() / levels) {
        throw InvalidArgument("OccupationBasis dimension overflow");
      }
      dim *= levels;
    }
    dim_ = dim;
  }

  std::size_t mode_count() const { return caps_.size(); }
  std::size_t dim() const { return dim_; }
  std::size_t cap(std::size_t mode) const { return caps_.at(mode); }
  std::size_t levels(std::size_t mode) const { return caps_.at(mode) + 1; }
  const std::vector<std::size_t>& caps() const { return caps_; }
  std::size_t stride(std::size_t mode) const { return strides_.at(mode); }

  std::size_t index(std::span<const std::size_t> occupation) const {
    if (occupation.size() != caps_.size()) {
      throw InvalidArgument("occupation tuple length does not match mode count");
    }
    std::size_t idx = 0;
    for (std::size_t m = 0; m < caps_.size(); ++m) {
      if (occupation[m] > caps_[m]) throw InvalidArgument("occupation exceeds mode cap");
      idx += occupation[m] * strides_[m];
    }
    return idx;
  }

  std::size_t occupation_of(std::size_t index, std::size_t mode) const {
    return (index / strides_[mode]) % (caps_[mode] + 1);
  }

  std::vector<std::size_t> occupation(std::size_t index) const {
    if (index >= dim_) throw InvalidArgument("basis index out of range");
    std::vector<std::size_t> occ(caps_.size());
    for (std::size_t m = 0; m < caps_.size(); ++m) occ[m] = occupation_of(index, m);
    return occ;
  }

  std::size_t total_photons(std::size_t index) const {
    std::size_t n = 0;
    for (std::size_t m = 0; m < caps_.size(); ++m) n += occupation_of(index, m);
    return n;
  }

  /// Basis on the modes not listed in `removed` (original order kept).
  OccupationBasis without_modes(std::span<const std::size_t> removed) const {
    std::vector<std::size_t> kept;
    for (std::size_t m = 0; m < caps_.size(); ++m) {
      if (std::find(removed.begin(), removed.end(), m) == removed.end()) kept.push_back(caps_[m]);
    }
    return OccupationBasis(std::move(kept));
  }

  bool operator==(const OccupationBasis& other) const { return caps_ == other.caps_; }

 private:
  std::vector<std::size_t> caps_;
  std::vector<std::size_t> strides_;
  std::size_t dim_ = 0;
};

/// Open (0) / blocked (1) flag per path. `index()` reads the bits as a binary
/// number with mode 0 as the most significant bit, so "011" is index 3.
class BlockPattern {
 public:
  BlockPattern() = default;
  explicit BlockPattern(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) {
      if (b > 1) throw InvalidArgument("block pattern bits must be 0 or 1");
    }
  }

  static BlockPattern open(std::size_t mode_count) {
    return BlockPattern(std::vector<std::uint8_t>(mode_count, 0));
  }

  static BlockPattern from_index(std::size_t mode_count, std::size_t index) {
    if (mode_count < 64 && index >> mode_count) throw InvalidArgument("pattern index out of range");
    std::vector<std::uint8_t> bits(mode_count);
    for (std::size_t m = 0; m < mode_count; ++m) bits[m] = (index >> (mode_count - 1 - m)) & 1U;
    return BlockPattern(std::move(bits));
  }

  static BlockPattern parse(std::string_view text) {
    std::vector<std::uint8_t> bits;
    for (char c : text) {
      if (c != '0' && c != '1') throw InvalidArgument("block pattern must be a string of 0/1");
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return BlockPattern(std::move(bits));
  }

  std::size_t size() const { return bits_.size(); }
  bool blocked(std::size_t mode) const { return bits_.at(mode) != 0; }
  std::size_t blocked_count() const { return std::count(bits_.begin(), bits_.end(), 1); }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  std::size_t index() const {
    std::size_t idx = 0;
    for (auto b : bits_) idx = (idx << 1) | b;
    return idx;
  }

  std::string to_string() const {
    std::string s;
    for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  bool operator==(const BlockPattern&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

enum class Normalization { kNormalized, kUnnormalized };

/// Pure state vector or density operator on an OccupationBasis. Immutable;
/// every operation returns a new state.
class QuantumState {
 public:
  /// Validated construction of a pure state. Normalized states must have unit
  /// norm within `tol`.
  static QuantumState pure(OccupationBasis basis, CVector amplitudes,
                           Normalization norm = Normalization::kNormalized,
                           double tol = Tolerance::kAlgebraic) {
    if (static_cast<std::size_t>(amplitudes.size()) != basis.dim()) {
      throw DimensionMismatch("amplitude vector length does not match basis dimension");
    }
    if (!amplitudes.allFinite()) throw InvalidArgument("state amplitudes must be finite");
    if (norm == Normalization::kNormalized && std::abs(amplitudes.norm() - 1.0) > tol) {
      throw InvalidArgument("pure state is not normalized");
    }
    return QuantumState(std::move(basis), std::move(amplitudes), norm);
  }

  /// Validated construction of a density operator: Hermitian and (if
  /// normalized) unit trace within `tol`, eigenvalues >= -1e-10.
  static QuantumState mixed(OccupationBasis basis, CMatrix rho,
                            Normalization norm = Normalization::kNormalized,
                            double tol = Tolerance::kAlgebraic) {
    const auto d = static_cast<Eigen::Index>(basis.dim());
    if (rho.rows() != d || rho.cols() != d) {
      throw DimensionMismatch("density matrix shape does not match basis dimension");
    }
    if (!rho.allFinite()) throw InvalidArgument("density matrix must be finite");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) {
      throw InvalidArgument("density matrix is not Hermitian");
    }
    if (norm == Normalization::kNormalized && std::abs(rho.trace().real() - 1.0) > tol) {
      throw InvalidArgument("density matrix does not have unit trace");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -Tolerance::kNegativeEigenvalue) {
      throw InvalidArgument("density matrix has a negative eigenvalue");
    }
    return QuantumState(std::move(basis), std::move(rho), norm);
  }

  // Unchecked constructors, used by operations whose outputs are valid by
  // construction.
  QuantumState(OccupationBasis basis, CVector amplitudes, Normalization norm)
      : basis_(std::move(basis)), repr_(std::move(amplitudes)), norm_(norm) {}
  QuantumState(OccupationBasis basis, CMatrix rho, Normalization norm)
      : basis_(std::move(basis)), repr_(std::move(rho)), norm_(norm) {}

  const OccupationBasis& basis() const { return basis_; }
  std::size_t mode_count() const { return basis_.mode_count(); }
  bool is_pure() const { return std::holds_alternative<CVector>(repr_); }
  Normalization normalization() const { return norm_; }

  const CVector& amplitudes() const {
    if (!is_pure()) throw InvalidArgument("state is mixed; no amplitude vector");
    return std::get<CVector>(repr_);
  }

  const CMatrix& density_matrix() const {
    if (is_pure()) throw InvalidArgument("state is pure; use density()");
    return std::get<CMatrix>(repr_);
  }

  /// Density operator, promoting a pure state to |psi><psi|.
  CMatrix density() const {
    if (is_pure()) {
      const auto& psi = std::get<CVector>(repr_);
      return psi * psi.adjoint();
    }
    return std::get<CMatrix>(repr_);
  }

  double trace() const {
    if (is_pure()) return std::get<CVector>(repr_).squaredNorm();
    return std::get<CMatrix>(repr_).trace().real();
  }

  /// Diagonal of the density operator in the occupation basis.
  Eigen::VectorXd populations() const {
    if (is_pure()) return std::get<CVector>(repr_).cwiseAbs2();
    return std::get<CMatrix>(repr_).diagonal().real();
  }

 private:
  OccupationBasis basis_;
  std::variant<CVector, CMatrix> repr_;
  Normalization norm_ = Normalization::kNormalized;
};

/// Per-mode coherent amplitudes alpha_m; mean photon number |alpha_m|^2.
struct CoherentSpec {
  std::vector<complex_t> amplitudes;

  static CoherentSpec uniform(std::size_t modes, double mean_n, std::vector<double> phases = {}) {
    CoherentSpec spec;
    const double r = std::sqrt(mean_n);
    for (std::size_t m = 0; m < modes; ++m) {
      const double phi = m < phases.size() ? phases[m] : 0.0;
      spec.amplitudes.push_back(std::polar(r, phi));
    }
    return spec;
  }

  double mean_n(std::size_t mode) const { return std::norm(amplitudes.at(mode)); }
};

/// Probability mass of Poisson(mean) above `cap`.
inline double poisson_tail(double mean, std::size_t cap) {
  if (mean < 0) throw InvalidArgument("Poisson mean must be non-negative");
  if (mean == 0) return 0.0;
  // Sum upward from cap+1 in log space; terms past the mode decay
  // geometrically, so stop once they no longer change the sum.
  double sum = 0.0;
  for (std::size_t n = cap + 1;; ++n) {
    const double log_term = -mean + static_cast<double>(n) * std::log(mean) - std::lgamma(n + 1.0);
    const double term = std::exp(log_term);
    sum += term;
    if (static_cast<double>(n) > mean && (term < 1e-300 || term < sum * 1e-17)) break;
  }
  return std::min(sum, 1.0);
}

/// Smallest cap whose Poisson(mean) tail is below `tol`.
inline std::size_t cap_for_tail(double mean, double tol) {
  std::size_t cap = 0;
  while (poisson_tail(mean, cap) >= tol) ++cap;
  return cap;
}

namespace detail {

inline CVector coherent_amplitudes(complex_t alpha, std::size_t cap) {
  CVector c(static_cast<Eigen::Index>(cap + 1));
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (std::size_t n = 1; n <= cap; ++n) {
    c(static_cast<Eigen::Index>(n)) = c(static_cast<Eigen::Index>(n - 1)) * alpha / std::sqrt(static_cast<double>(n));
  }
  return c / c.norm();
}

inline CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

}  // namespace detail

/// Product of truncated coherent states, renormalized after truncation.
/// Throws TailTooLarge when a mode's Poisson tail above its cap exceeds `tol`.
inline QuantumState make_coherent_state(const CoherentSpec& spec, const OccupationBasis& basis,
                                        double tol = Tolerance::kCoherentTail) {
  if (spec.amplitudes.size() != basis.mode_count()) {
    throw DimensionMismatch("coherent spec and basis have different mode counts");
  }
  CVector psi = CVector::Ones(1);
  for (std::size_t m = 0; m < basis.mode_count(); ++m) {
    const double tail = poisson_tail(spec.mean_n(m), basis.cap(m));
    if (tail > tol) {
      throw TailTooLarge("coherent state on mode " + std::to_string(m) + " has truncation tail " +
                         detail::format_g(tail) + " above tolerance");
    }
    psi = detail::kron(psi, detail::coherent_amplitudes(spec.amplitudes[m], basis.cap(m)));
  }
  return QuantumState(basis, std::move(psi), Normalization::kNormalized);
}

inline QuantumState make_fock_state(const OccupationBasis& basis, std::span<const std::size_t> occupation) {
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(basis.dim()));
  psi(static_cast<Eigen::Index>(basis.index(occupation))) = 1.0;
  return QuantumState(basis, std::move(psi), Normalization::kNormalized);
}

struct FockTerm {
  complex_t amplitude;
  std::vector<std::size_t> occupation;
};

/// sum_i c_i |n_i>, normalized unless `normalize` is false.
inline QuantumState make_superposition(const OccupationBasis& basis, std::span<const FockTerm> terms,
                                       bool normalize = true) {
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(basis.dim()));
  for (const auto& t : terms) psi(static_cast<Eigen::Index>(basis.index(t.occupation))) += t.amplitude;
  if (!normalize) return QuantumState(basis, std::move(psi), Normalization::kUnnormalized);
  const double n = psi.norm();
  if (n == 0) throw InvalidArgument("superposition has zero norm");
  return QuantumState(basis, CVector(psi / n), Normalization::kNormalized);
}

/// Photon-number distribution p(k), k = 0..cap, of one mode. Sums to the state
/// trace.
inline std::vector<double> photon_distribution(const QuantumState& state, std::size_t mode) {
  const auto& basis = state.basis();
  if (mode >= basis.mode_count()) throw InvalidArgument("mode index out of range");
  std::vector<double> p(basis.levels(mode), 0.0);
  const Eigen::VectorXd pops = state.populations();
  for (std::size_t i = 0; i < basis.dim(); ++i) p[basis.occupation_of(i, mode)] += pops(static_cast<Eigen::Index>(i));
  return p;
}

/// <a_m^dag a_m>.
inline double number_expectation(const QuantumState& state, std::size_t mode) {
  const auto p = photon_distribution(state, mode);
  double n = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) n += static_cast<double>(k) * p[k];
  return n;
}

/// Probability mass on basis states with at least one mode at its cap.
inline double boundary_mass(const QuantumState& state) {
  const auto& basis = state.basis();
  const Eigen::VectorXd pops = state.populations();
  double mass = 0.0;
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    for (std::size_t m = 0; m < basis.mode_count(); ++m) {
      if (basis.occupation_of(i, m) == basis.cap(m)) {
        mass += pops(static_cast<Eigen::Index>(i));
        break;
      }
    }
  }
  return mass;
}

namespace detail {

// Splits each flat index into (kept-modes index, removed-modes index).
struct IndexSplit {
  OccupationBasis kept;
  OccupationBasis removed;
  std::vector<std::size_t> kept_index;
  std::vector<std::size_t> removed_index;
};

inline IndexSplit split_modes(const OccupationBasis& basis, std::span<const std::size_t> remove) {
  std::vector<bool> is_removed(basis.mode_count(), false);
  for (auto m : remove) {
    if (m >= basis.mode_count()) throw InvalidArgument("mode index out of range");
    if (is_removed[m]) throw InvalidArgument("duplicate mode in partial trace");
    is_removed[m] = true;
  }
  std::vector<std::size_t> kept_caps, removed_caps;
  for (std::size_t m = 0; m < basis.mode_count(); ++m) {
    (is_removed[m] ? removed_caps : kept_caps).push_back(basis.cap(m));
  }
  if (kept_caps.empty()) kept_caps.push_back(0);  // scalar
  if (removed_caps.empty()) removed_caps.push_back(0);
  IndexSplit s{OccupationBasis(kept_caps), OccupationBasis(removed_caps), {}, {}};
  s.kept_index.resize(basis.dim());
  s.removed_index.resize(basis.dim());
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    std::size_t k = 0, r = 0;
    for (std::size_t m = 0; m < basis.mode_count(); ++m) {
      const std::size_t n = basis.occupation_of(i, m);
      if (is_removed[m]) {
        r = r * (basis.cap(m) + 1) + n;
      } else {
        k = k * (basis.cap(m) + 1) + n;
      }
    }
    s.kept_index[i] = k;
    s.removed_index[i] = r;
  }
  return s;
}

/// Partial trace of an arbitrary operator over `remove` (may be all modes, in
/// which case the result is the 1x1 trace).
inline std::pair<OccupationBasis, CMatrix> partial_trace_operator(const OccupationBasis& basis,
                                                                  const CMatrix& op,
                                                                  std::span<const std::size_t> remove) {
  const auto split = split_modes(basis, remove);
  const auto dk = static_cast<Eigen::Index>(split.kept.dim());
  const std::size_t dr = split.removed.dim();
  // Group full indices by removed index so each group shares the traced label.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> groups(dr);
  for (std::size_t i = 0; i < basis.dim(); ++i) groups[split.removed_index[i]].push_back({split.kept_index[i], i});
  CMatrix out = CMatrix::Zero(dk, dk);
  for (const auto& g : groups) {
    for (const auto& [k, i] : g) {
      for (const auto& [kp, ip] : g) {
        out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(kp)) +=
            op(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ip));
      }
    }
  }
  return {split.kept, std::move(out)};
}

}  // namespace detail

/// Reduced density operator on the modes not in `modes_to_remove`, which must
/// be a non-empty proper subset.
inline QuantumState partial_trace(const QuantumState& state, std::span<const std::size_t> modes_to_remove) {
  const auto& basis = state.basis();
  if (modes_to_remove.empty() || modes_to_remove.size() >= basis.mode_count()) {
    throw InvalidArgument("partial trace needs a non-empty proper subset of modes");
  }
  if (!state.is_pure()) {
    auto [kept, rho] = detail::partial_trace_operator(basis, state.density_matrix(), modes_to_remove);
    return QuantumState(std::move(kept), std::move(rho), state.normalization());
  }
  const auto split = detail::split_modes(basis, modes_to_remove);
  const auto& psi = state.amplitudes();
  CMatrix a = CMatrix::Zero(static_cast<Eigen::Index>(split.kept.dim()),
                            static_cast<Eigen::Index>(split.removed.dim()));
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    a(static_cast<Eigen::Index>(split.kept_index[i]), static_cast<Eigen::Index>(split.removed_index[i])) =
        psi(static_cast<Eigen::Index>(i));
  }
  CMatrix rho = a * a.adjoint();
  return QuantumState(split.kept, std::move(rho), state.normalization());
}

inline QuantumState partial_trace(const QuantumState& state, std::initializer_list<std::size_t> modes) {
  return partial_trace(state, std::span<const std::size_t>(modes.begin(), modes.size()));
}

/// Path blocker: |0><0|_m (x) Tr_m(rho). A pure input stays a vector when it
/// factorizes across `mode` (relative residual below 1e-12); otherwise the
/// result is promoted to a density operator.
inline QuantumState block_mode(const QuantumState& state, std::size_t mode) {
  const auto& basis = state.basis();
  if (mode >= basis.mode_count()) throw InvalidArgument("mode index out of range");
  const std::size_t levels = basis.levels(mode);
  const std::size_t s = basis.stride(mode);
  const std::size_t block = s * levels;
  const std::size_t hi_count = basis.dim() / block;
  const std::size_t rest = hi_count * s;
  auto full_index = [&](std::size_t r, std::size_t n) { return (r / s) * block + n * s + (r % s); };

  if (state.is_pure()) {
    const auto& psi = state.amplitudes();
    // Rows of the (levels x rest) reshaping of psi.
    std::size_t best = 0;
    double best_norm = -1.0, total = 0.0;
    for (std::size_t n = 0; n < levels; ++n) {
      double row = 0.0;
      for (std::size_t r = 0; r < rest; ++r) row += std::norm(psi(static_cast<Eigen::Index>(full_index(r, n))));
      total += row;
      if (row > best_norm) {
        best_norm = row;
        best = n;
      }
    }
    CVector v(static_cast<Eigen::Index>(rest));
    for (std::size_t r = 0; r < rest; ++r) v(static_cast<Eigen::Index>(r)) = psi(static_cast<Eigen::Index>(full_index(r, best)));
    double residual = 0.0;
    if (best_norm > 0) {
      for (std::size_t n = 0; n < levels; ++n) {
        if (n == best) continue;
        complex_t ov = 0.0;
        for (std::size_t r = 0; r < rest; ++r) {
          ov += std::conj(v(static_cast<Eigen::Index>(r))) * psi(static_cast<Eigen::Index>(full_index(r, n)));
        }
        ov /= best_norm;
        for (std::size_t r = 0; r < rest; ++r) {
          residual += std::norm(psi(static_cast<Eigen::Index>(full_index(r, n))) - ov * v(static_cast<Eigen::Index>(r)));
        }
      }
    }
    if (best_norm <= 0 || residual <= Tolerance::kAlgebraic * Tolerance::kAlgebraic * total) {
      CVector out = CVector::Zero(psi.size());
      const double scale = best_norm > 0 ? std::sqrt(total / best_norm) : 0.0;
      for (std::size_t r = 0; r < rest; ++r) {
        out(static_cast<Eigen::Index>(full_index(r, 0))) = scale * v(static_cast<Eigen::Index>(r));
      }
      return QuantumState(basis, std::move(out), state.normalization());
    }
  }

  const CMatrix rho = state.density();
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t r = 0; r < rest; ++r) {
    const auto i0 = static_cast<Eigen::Index>(full_index(r, 0));
    for (std::size_t rp = 0; rp < rest; ++rp) {
      complex_t acc = 0.0;
      for (std::size_t n = 0; n < levels; ++n) {
        acc += rho(static_cast<Eigen::Index>(full_index(r, n)), static_cast<Eigen::Index>(full_index(rp, n)));
      }
      out(i0, static_cast<Eigen::Index>(full_index(rp, 0))) = acc;
    }
  }
  return QuantumState(basis, std::move(out), state.normalization());
}

/// Applies block_mode to every path flagged in `pattern`.
inline QuantumState apply_blocking(const QuantumState& state, const BlockPattern& pattern) {
  if (pattern.size() != state.mode_count()) throw InvalidArgument("block pattern length does not match mode count");
  QuantumState out = state;
  for (std::size_t m = 0; m < pattern.size(); ++m) {
    if (pattern.blocked(m)) out = block_mode(out, m);
  }
  return out;
}

/// Frobenius distance between the density operators of two states. For two
/// pure states this returns the upper bound (|x| + |y|) min_phi |x - e^{i phi} y|,
/// which avoids forming dim x dim matrices.
inline double state_distance(const QuantumState& a, const QuantumState& b) {
  if (!(a.basis() == b.basis())) throw DimensionMismatch("states live on different bases");
  if (a.is_pure() && b.is_pure()) {
    const auto& x = a.amplitudes();
    const auto& y = b.amplitudes();
    const complex_t ov = y.dot(x);  // <y|x>
    const complex_t phase = std::abs(ov) > 0 ? ov / std::abs(ov) : complex_t(1.0);
    return (x.norm() + y.norm()) * (x - phase * y).norm();
  }
  return (a.density() - b.density()).norm();
}

}  // namespace sorkin

#endif  // SORKIN_FOCK_HPP_
