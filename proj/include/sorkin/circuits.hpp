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

// Number-conserving unitaries on the truncated Fock space.
//
// A LinearCoupler with single-particle Hamiltonian h acts as U = exp(iH),
// H = sum_nm h_nm a_n^dag a_m, so that U a_j^dag U^dag = sum_i S_ij a_i^dag with
// S = exp(ih). A CrossKerr(j, k, theta) gate is the diagonal unitary
// exp(+i theta n_j n_k), the sign for which
//
//   U^dag a_j^dag U = a_j^dag exp(-i theta n_k).
//
// Circuits are compiled against a basis before use. Linear elements are
// applied per photon-number sector of the modes they touch, by exact
// diagonalization of the sector Hamiltonian. Sectors whose total photon number
// exceeds the smallest cap of those modes are incomplete in the truncated
// space; amplitude in them is reported as truncation mass.

#ifndef SORKIN_CIRCUITS_HPP_
#define SORKIN_CIRCUITS_HPP_

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sorkin/common.hpp"
#include "sorkin/fock.hpp"

namespace sorkin {

namespace detail {

/// exp(i h) for Hermitian h.
inline CMatrix exp_i_hermitian(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  const Eigen::VectorXcd phases =
      eig.eigenvalues().unaryExpr([](double l) { return std::polar(1.0, l); });
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

/// Hermitian h with exp(i h) = u for unitary u (principal branch).
inline CMatrix log_unitary(const CMatrix& u) {
  Eigen::ComplexSchur<CMatrix> schur(u);
  const CMatrix& t = schur.matrixT();
  const CMatrix& q = schur.matrixU();
  Eigen::VectorXcd angles(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) angles(i) = std::arg(t(i, i));
  CMatrix h = q * angles.asDiagonal() * q.adjoint();
  return 0.5 * (h + h.adjoint());
}

inline double hermiticity_error(const CMatrix& h) { return (h - h.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace detail

/// Linear mode coupler given by its single-particle Hamiltonian h (M x M,
/// Hermitian within 1e-12).
class LinearCoupler {
 public:
  explicit LinearCoupler(CMatrix h) : h_(std::move(h)) {
    if (h_.rows() != h_.cols() || h_.rows() < 1) throw InvalidArgument("coupler matrix must be square");
    if (!h_.allFinite()) throw InvalidArgument("coupler matrix must be finite");
    if (detail::hermiticity_error(h_) > Tolerance::kAlgebraic) {
      throw InvalidArgument("coupler Hamiltonian is not Hermitian");
    }
    h_ = 0.5 * (h_ + h_.adjoint());
  }

  /// Coupler whose single-particle matrix is the given unitary.
  static LinearCoupler from_unitary(const CMatrix& s) {
    if (s.rows() != s.cols()) throw InvalidArgument("unitary must be square");
    const CMatrix id = CMatrix::Identity(s.rows(), s.cols());
    if ((s.adjoint() * s - id).cwiseAbs().maxCoeff() > Tolerance::kAlgebraic) {
      throw InvalidArgument("matrix is not unitary");
    }
    return LinearCoupler(detail::log_unitary(s));
  }

  std::size_t mode_count() const { return static_cast<std::size_t>(h_.rows()); }
  const CMatrix& hamiltonian() const { return h_; }
  CMatrix single_particle_unitary() const { return detail::exp_i_hermitian(h_); }

 private:
  CMatrix h_;
};

/// Cross-phase modulation between two distinct modes; theta in radians per
/// photon pair.
struct CrossKerr {
  std::size_t mode_j = 0;
  std::size_t mode_k = 1;
  double theta = 0.0;

  CrossKerr(std::size_t j, std::size_t k, double th) : mode_j(j), mode_k(k), theta(th) {
    if (j == k) throw InvalidArgument("cross-Kerr gate needs two distinct modes");
    if (!std::isfinite(th)) throw InvalidArgument("cross-Kerr theta must be finite");
  }
};

using CircuitElement = std::variant<LinearCoupler, CrossKerr>;

/// Ordered list of elements; the first element acts first.
class Circuit {
 public:
  explicit Circuit(std::size_t mode_count) : mode_count_(mode_count) {
    if (mode_count == 0) throw InvalidArgument("circuit needs at least one mode");
  }

  Circuit& append(CircuitElement element) {
    if (const auto* c = std::get_if<LinearCoupler>(&element)) {
      if (c->mode_count() != mode_count_) throw DimensionMismatch("coupler acts on a different mode count");
    } else {
      const auto& k = std::get<CrossKerr>(element);
      if (k.mode_j >= mode_count_ || k.mode_k >= mode_count_) {
        throw InvalidArgument("cross-Kerr mode index out of range");
      }
    }
    elements_.push_back(std::move(element));
    return *this;
  }

  std::size_t mode_count() const { return mode_count_; }
  const std::vector<CircuitElement>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }

  bool is_linear() const {
    for (const auto& e : elements_) {
      if (std::holds_alternative<CrossKerr>(e)) return false;
    }
    return true;
  }

 private:
  std::size_t mode_count_;
  std::vector<CircuitElement> elements_;
};

/// 50-50 beam splitter between modes j and k with single-particle matrix
/// [[1, 1], [-1, 1]] / sqrt(2) on (j, k); the output intensity of mode j is
/// (n_j + n_k + a_j^dag a_k + a_k^dag a_j) / 2. Generator h_jk = -i pi/4.
inline LinearCoupler beam_splitter(std::size_t modes, std::size_t j, std::size_t k) {
  if (j == k || j >= modes || k >= modes) throw InvalidArgument("beam splitter needs two distinct modes in range");
  CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(modes), static_cast<Eigen::Index>(modes));
  h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = complex_t(0.0, -kPi / 4);
  h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = complex_t(0.0, kPi / 4);
  return LinearCoupler(std::move(h));
}

/// 50-50 beam splitter with real coupling h_jk = h_kj = pi/4, single-particle
/// matrix [[1, i], [i, 1]] / sqrt(2).
inline LinearCoupler symmetric_beam_splitter(std::size_t modes, std::size_t j, std::size_t k) {
  if (j == k || j >= modes || k >= modes) throw InvalidArgument("beam splitter needs two distinct modes in range");
  CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(modes), static_cast<Eigen::Index>(modes));
  h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = kPi / 4;
  h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = kPi / 4;
  return LinearCoupler(std::move(h));
}

/// Single-particle matrix of the symmetric tritter, U_ij = w^(ij) / sqrt(3)
/// with w = exp(2 pi i / 3) and i, j = 0, 1, 2. Row 0 is all ones, so
/// U^dag a_0^dag U = (a_0^dag + a_1^dag + a_2^dag) / sqrt(3).
inline CMatrix tritter_matrix() {
  CMatrix u(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) u(i, j) = std::polar(1.0 / std::sqrt(3.0), 2.0 * kPi * (i * j % 3) / 3.0);
  }
  return u;
}

inline LinearCoupler make_tritter() { return LinearCoupler::from_unitary(tritter_matrix()); }

/// Kerr cascade: CrossKerr(0, M-1), ..., CrossKerr(0, 2), then the 50-50
/// beam splitter on modes (0, 1). Detection happens on mode 0.
inline Circuit build_kerr_cascade(std::size_t modes, double theta) {
  if (modes < 3) throw InvalidArgument("Kerr cascade needs at least three modes");
  Circuit c(modes);
  for (std::size_t k = modes - 1; k >= 2; --k) c.append(CrossKerr(0, k, theta));
  c.append(beam_splitter(modes, 0, 1));
  return c;
}

/// Random Hermitian h with complex Gaussian entries (GUE-style), deterministic
/// in `seed` for a given standard library.
inline LinearCoupler random_linear_coupler(std::size_t modes, std::uint64_t seed) {
  if (modes < 2) throw InvalidArgument("random coupler needs at least two modes");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto m = static_cast<Eigen::Index>(modes);
  CMatrix g(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = complex_t(gauss(rng), gauss(rng)) / std::sqrt(2.0);
  }
  return LinearCoupler(0.5 * (g + g.adjoint()));
}

/// How couplers touching more than two modes are compiled.
enum class LinearMethod {
  /// Factor S = exp(ih) into two-mode rotations and phases; each rotation is
  /// applied per two-mode number sector.
  kFactorized,
  /// Diagonalize the Hamiltonian per number sector of all active modes.
  kFullSector,
};

struct CompileOptions {
  LinearMethod linear_method = LinearMethod::kFactorized;
  /// Emit a warning when the mass in incomplete sectors exceeds this.
  double warn_truncation_mass = Tolerance::kBoundaryMass;
};

struct ApplyReport {
  /// Largest per-step probability mass found in incomplete number sectors.
  double truncation_mass = 0.0;
};

/// A circuit lowered to diagonal-phase and sector-block steps on one basis.
/// Immutable after construction and safe to share between threads.
class CompiledCircuit {
 public:
  CompiledCircuit(const Circuit& circuit, OccupationBasis basis, CompileOptions options = {})
      : basis_(std::move(basis)), options_(options), mode_count_(circuit.mode_count()) {
    if (circuit.mode_count() != basis_.mode_count()) throw DimensionMismatch("circuit and basis mode counts differ");
    for (const auto& e : circuit.elements()) {
      if (const auto* k = std::get_if<CrossKerr>(&e)) {
        add_cross_kerr(*k);
      } else {
        add_linear(std::get<LinearCoupler>(e));
      }
    }
  }

  const OccupationBasis& basis() const { return basis_; }

  QuantumState apply(const QuantumState& state, ApplyReport* report = nullptr) const {
    if (!(state.basis() == basis_)) throw DimensionMismatch("state basis does not match compiled circuit");
    ApplyReport local;
    QuantumState out = [&] {
      if (state.is_pure()) {
        CVector psi = state.amplitudes();
        for (const auto& step : steps_) apply_step(step, psi, &local);
        return QuantumState(basis_, std::move(psi), state.normalization());
      }
      // U rho U^dag = (U (U rho)^dag)^dag for Hermitian rho.
      CMatrix rho = state.density_matrix();
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index c = 0; c < rho.cols(); ++c) {
          CVector col = rho.col(c);
          for (const auto& step : steps_) apply_step(step, col, pass == 0 ? &local : nullptr);
          rho.col(c) = col;
        }
        rho.adjointInPlace();
      }
      return QuantumState(basis_, std::move(rho), state.normalization());
    }();
    if (local.truncation_mass > options_.warn_truncation_mass) {
      warn("state mass " + detail::format_g(local.truncation_mass) +
           " reaches incomplete photon-number sectors at the truncation cap");
    }
    if (report) report->truncation_mass = std::max(report->truncation_mass, local.truncation_mass);
    return out;
  }

 private:
  struct DiagonalStep {
    CVector phases;
  };

  struct Sector {
    std::vector<std::size_t> offsets;
    CMatrix unitary;
    bool complete = true;
  };

  struct SectorStep {
    std::vector<std::size_t> rest_offsets;
    std::vector<Sector> sectors;
  };

  using Step = std::variant<DiagonalStep, SectorStep>;

  DiagonalStep& diagonal_tail() {
    if (steps_.empty() || !std::holds_alternative<DiagonalStep>(steps_.back())) {
      steps_.push_back(DiagonalStep{CVector::Ones(static_cast<Eigen::Index>(basis_.dim()))});
    }
    return std::get<DiagonalStep>(steps_.back());
  }

  void add_cross_kerr(const CrossKerr& gate) {
    auto& d = diagonal_tail();
    for (std::size_t i = 0; i < basis_.dim(); ++i) {
      const double nn = static_cast<double>(basis_.occupation_of(i, gate.mode_j) * basis_.occupation_of(i, gate.mode_k));
      if (nn != 0) d.phases(static_cast<Eigen::Index>(i)) *= std::polar(1.0, gate.theta * nn);
    }
  }

  void add_phases(const Eigen::VectorXd& phi) {
    auto& d = diagonal_tail();
    for (std::size_t i = 0; i < basis_.dim(); ++i) {
      double total = 0.0;
      for (std::size_t m = 0; m < mode_count_; ++m) {
        total += phi(static_cast<Eigen::Index>(m)) * static_cast<double>(basis_.occupation_of(i, m));
      }
      if (total != 0) d.phases(static_cast<Eigen::Index>(i)) *= std::polar(1.0, total);
    }
  }

  void add_linear(const LinearCoupler& coupler) {
    const CMatrix& h = coupler.hamiltonian();
    std::vector<std::size_t> active;
    bool off_diagonal = false;
    for (std::size_t m = 0; m < mode_count_; ++m) {
      bool touches = false;
      for (std::size_t n = 0; n < mode_count_; ++n) {
        if (n != m && (h(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) != 0.0 ||
                       h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)) != 0.0)) {
          touches = true;
        }
      }
      if (touches) {
        active.push_back(m);
        off_diagonal = true;
      }
    }
    if (!off_diagonal) {
      add_phases(h.diagonal().real());
      return;
    }
    if (active.size() <= 2 || options_.linear_method == LinearMethod::kFullSector) {
      // Modes with only a diagonal entry contribute a phase.
      Eigen::VectorXd phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mode_count_));
      bool any_phase = false;
      for (std::size_t m = 0; m < mode_count_; ++m) {
        if (std::find(active.begin(), active.end(), m) == active.end()) {
          phi(static_cast<Eigen::Index>(m)) = h(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)).real();
          any_phase = any_phase || phi(static_cast<Eigen::Index>(m)) != 0.0;
        }
      }
      if (any_phase) add_phases(phi);
      CMatrix sub(static_cast<Eigen::Index>(active.size()), static_cast<Eigen::Index>(active.size()));
      for (std::size_t a = 0; a < active.size(); ++a) {
        for (std::size_t b = 0; b < active.size(); ++b) {
          sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
              h(static_cast<Eigen::Index>(active[a]), static_cast<Eigen::Index>(active[b]));
        }
      }
      add_sector_step(active, sub);
      return;
    }
    add_factorized(coupler.single_particle_unitary());
  }

  // S = T_1^dag ... T_K^dag D with T_i two-mode rotations on adjacent rows
  // (Givens elimination below the diagonal). Acting on a state, D comes first.
  void add_factorized(const CMatrix& s) {
    CMatrix w = s;
    const auto m = w.rows();
    struct Rotation {
      Eigen::Index p, q;
      CMatrix t;
    };
    std::vector<Rotation> rotations;
    for (Eigen::Index c = 0; c + 1 < m; ++c) {
      for (Eigen::Index r = m - 1; r > c; --r) {
        const complex_t a = w(r - 1, c), b = w(r, c);
        if (std::abs(b) == 0.0) continue;
        const double n = std::hypot(std::abs(a), std::abs(b));
        CMatrix t(2, 2);
        t << std::conj(a) / n, std::conj(b) / n, -b / n, a / n;
        const CMatrix rows = t * w.middleRows(r - 1, 2);
        w.middleRows(r - 1, 2) = rows;
        rotations.push_back({r - 1, r, t});
      }
    }
    Eigen::VectorXd phi(m);
    for (Eigen::Index i = 0; i < m; ++i) phi(i) = std::arg(w(i, i));
    add_phases(phi);
    for (auto it = rotations.rbegin(); it != rotations.rend(); ++it) {
      const CMatrix g = detail::log_unitary(it->t.adjoint());
      add_sector_step({static_cast<std::size_t>(it->p), static_cast<std::size_t>(it->q)}, g);
    }
  }

  void add_sector_step(const std::vector<std::size_t>& active, const CMatrix& h) {
    const std::size_t k = active.size();
    std::vector<std::size_t> caps(k);
    std::size_t min_cap = std::numeric_limits<std::size_t>::max();
    for (std::size_t a = 0; a < k; ++a) {
      caps[a] = basis_.cap(active[a]);
      min_cap = std::min(min_cap, caps[a]);
    }
    // Enumerate active occupation tuples grouped by photon number.
    std::map<std::size_t, std::vector<std::vector<std::size_t>>> by_number;
    std::vector<std::size_t> t(k, 0);
    for (;;) {
      std::size_t n = 0;
      for (auto v : t) n += v;
      by_number[n].push_back(t);
      std::size_t a = k;
      while (a-- > 0) {
        if (++t[a] <= caps[a]) break;
        t[a] = 0;
      }
      if (a == static_cast<std::size_t>(-1)) break;
    }
    auto offset_of = [&](const std::vector<std::size_t>& tup) {
      std::size_t off = 0;
      for (std::size_t a = 0; a < k; ++a) off += tup[a] * basis_.stride(active[a]);
      return off;
    };

    SectorStep step;
    for (const auto& [n, tuples] : by_number) {
      Sector sector;
      sector.complete = n <= min_cap;
      std::unordered_map<std::size_t, Eigen::Index> position;
      for (const auto& tup : tuples) {
        position[offset_of(tup)] = static_cast<Eigen::Index>(sector.offsets.size());
        sector.offsets.push_back(offset_of(tup));
      }
      const auto size = static_cast<Eigen::Index>(tuples.size());
      CMatrix hs = CMatrix::Zero(size, size);
      for (Eigen::Index j = 0; j < size; ++j) {
        const auto& tj = tuples[static_cast<std::size_t>(j)];
        for (std::size_t a = 0; a < k; ++a) {
          for (std::size_t b = 0; b < k; ++b) {
            const complex_t coeff = h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            if (coeff == 0.0 || tj[b] == 0) continue;
            auto tp = tj;
            double amp = std::sqrt(static_cast<double>(tp[b]));
            --tp[b];
            ++tp[a];
            if (tp[a] > caps[a]) continue;  // leaves the truncated space
            amp *= std::sqrt(static_cast<double>(tp[a]));
            hs(position.at(offset_of(tp)), j) += coeff * amp;
          }
        }
      }
      sector.unitary = detail::exp_i_hermitian(0.5 * (hs + hs.adjoint()));
      step.sectors.push_back(std::move(sector));
    }

    // Offsets of the inactive modes.
    step.rest_offsets.push_back(0);
    for (std::size_t m = 0; m < mode_count_; ++m) {
      if (std::find(active.begin(), active.end(), m) != active.end()) continue;
      std::vector<std::size_t> next;
      next.reserve(step.rest_offsets.size() * basis_.levels(m));
      for (auto base : step.rest_offsets) {
        for (std::size_t v = 0; v <= basis_.cap(m); ++v) next.push_back(base + v * basis_.stride(m));
      }
      step.rest_offsets = std::move(next);
    }
    steps_.push_back(std::move(step));
  }

  static void apply_step(const Step& step, CVector& psi, ApplyReport* report) {
    if (const auto* d = std::get_if<DiagonalStep>(&step)) {
      psi.array() *= d->phases.array();
      return;
    }
    const auto& s = std::get<SectorStep>(step);
    double leaked = 0.0;
    CVector x, y;
    for (const auto& sector : s.sectors) {
      const auto size = static_cast<Eigen::Index>(sector.offsets.size());
      x.resize(size);
      for (auto base : s.rest_offsets) {
        for (Eigen::Index i = 0; i < size; ++i) x(i) = psi(static_cast<Eigen::Index>(base + sector.offsets[static_cast<std::size_t>(i)]));
        if (!sector.complete) leaked += x.squaredNorm();
        y.noalias() = sector.unitary * x;
        for (Eigen::Index i = 0; i < size; ++i) psi(static_cast<Eigen::Index>(base + sector.offsets[static_cast<std::size_t>(i)])) = y(i);
      }
    }
    if (report) report->truncation_mass = std::max(report->truncation_mass, leaked);
  }

  OccupationBasis basis_;
  CompileOptions options_;
  std::size_t mode_count_;
  std::vector<Step> steps_;
};

/// Per-mode caps for a coherent input to `circuit`: modes joined by linear
/// couplers share the cap at which the Poisson tail of their summed mean photon
/// number drops below `tail`. This bounds both the input truncation and the
/// mass reaching incomplete number sectors.
inline OccupationBasis truncation_for(const CoherentSpec& spec, const Circuit& circuit, double tail) {
  const std::size_t m = circuit.mode_count();
  if (spec.amplitudes.size() != m) throw DimensionMismatch("coherent spec and circuit mode counts differ");
  std::vector<std::size_t> group(m);
  std::iota(group.begin(), group.end(), 0);
  auto root = [&](std::size_t i) {
    while (group[i] != i) i = group[i] = group[group[i]];
    return i;
  };
  for (const auto& e : circuit.elements()) {
    const auto* c = std::get_if<LinearCoupler>(&e);
    if (!c) continue;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i != j && c->hamiltonian()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0.0) {
          group[root(i)] = root(j);
        }
      }
    }
  }
  std::vector<double> total(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) total[root(i)] += spec.mean_n(i);
  std::vector<std::size_t> caps(m);
  for (std::size_t i = 0; i < m; ++i) caps[i] = std::max<std::size_t>(1, cap_for_tail(total[root(i)], tail));
  return OccupationBasis(std::move(caps));
}

inline QuantumState apply_circuit(const QuantumState& state, const Circuit& circuit, CompileOptions options = {}) {
  return CompiledCircuit(circuit, state.basis(), options).apply(state);
}

inline QuantumState apply_linear(const QuantumState& state, const LinearCoupler& coupler, CompileOptions options = {}) {
  if (coupler.mode_count() != state.mode_count()) throw DimensionMismatch("coupler and state mode counts differ");
  Circuit c(state.mode_count());
  c.append(coupler);
  return apply_circuit(state, c, options);
}

inline QuantumState apply_cross_kerr(const QuantumState& state, const CrossKerr& gate) {
  Circuit c(state.mode_count());
  c.append(gate);
  return apply_circuit(state, c);
}

}  // namespace sorkin

#endif  // SORKIN_CIRCUITS_HPP_
