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

// Intensity tables over block patterns, the alternating Sorkin sum, the
// interference operator and detector models.
//
// An intensity is a functional of the photon-number distribution p(k) of the
// detected output mode after blocking and evolution.

#ifndef SORKIN_INTERFERENCE_HPP_
#define SORKIN_INTERFERENCE_HPP_

#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "sorkin/circuits.hpp"
#include "sorkin/common.hpp"
#include "sorkin/fock.hpp"
#include "sorkin/parallel.hpp"

namespace sorkin {

/// <a^dag a>.
struct IdealDetector {};

enum class SaturationForm {
  /// <n> - eps <n^2>, the expectation of the operator a^dag a - eps (a^dag a)^2.
  kOperator,
  /// I - eps I^2 applied to the ideal intensity I = <n>.
  kScalar,
};

struct SaturatingDetector {
  double epsilon = 0.0;
  SaturationForm form = SaturationForm::kOperator;
};

/// Dark counts: the recorded count is n + k with k ~ d independent of the
/// signal, so the recorded distribution is r = p * d.
struct NoisyDetector {
  std::vector<double> d;
};

/// Normally ordered n-th factorial moment <a^dag^n a^n> of the detected mode.
struct CorrelationDetector {
  std::size_t order = 1;
};

using DetectorModel = std::variant<IdealDetector, SaturatingDetector, NoisyDetector, CorrelationDetector>;

inline DetectorModel saturating_detector(double epsilon, SaturationForm form = SaturationForm::kOperator) {
  if (!(epsilon >= 0) || !std::isfinite(epsilon)) throw InvalidArgument("saturation strength must be >= 0");
  return SaturatingDetector{epsilon, form};
}

inline DetectorModel noisy_detector(std::vector<double> d) {
  if (d.empty()) throw InvalidArgument("noise distribution is empty");
  double total = 0;
  for (double v : d) {
    if (!(v >= 0) || !std::isfinite(v)) throw InvalidArgument("noise distribution has a negative entry");
    total += v;
  }
  if (std::abs(total - 1.0) > Tolerance::kAlgebraic) throw InvalidArgument("noise distribution does not sum to 1");
  return NoisyDetector{std::move(d)};
}

/// Poisson(mean) dark-count distribution, truncated where the tail drops below
/// `tail` and renormalized.
inline DetectorModel poisson_noise(double mean, double tail = 1e-16) {
  if (!(mean >= 0)) throw InvalidArgument("noise mean must be >= 0");
  const std::size_t cap = cap_for_tail(mean, tail);
  std::vector<double> d(cap + 1);
  double term = std::exp(-mean), total = 0;
  for (std::size_t n = 0; n <= cap; ++n) {
    if (n > 0) term *= mean / static_cast<double>(n);
    d[n] = term;
    total += term;
  }
  for (auto& v : d) v /= total;
  return noisy_detector(std::move(d));
}

/// Zero counts with probability 1 - p, `counts` with probability p.
inline DetectorModel two_point_noise(double p, std::size_t counts) {
  if (!(p >= 0 && p <= 1)) throw InvalidArgument("two-point probability must be in [0, 1]");
  std::vector<double> d(counts + 1, 0.0);
  d[0] += 1 - p;
  d[counts] += p;
  return noisy_detector(std::move(d));
}

inline DetectorModel correlation_detector(std::size_t order) {
  if (order < 1) throw InvalidArgument("correlation order must be >= 1");
  return CorrelationDetector{order};
}

/// Mean dark count sum_n n d(n).
inline double noise_offset(const NoisyDetector& det) {
  double delta = 0;
  for (std::size_t n = 0; n < det.d.size(); ++n) delta += static_cast<double>(n) * det.d[n];
  return delta;
}

/// Reading of `detector` for output photon-number distribution p.
inline double detector_response(const DetectorModel& detector, const std::vector<double>& p) {
  auto moment = [&](auto f) {
    double acc = 0;
    for (std::size_t k = 0; k < p.size(); ++k) acc += f(static_cast<double>(k)) * p[k];
    return acc;
  };
  return std::visit(
      [&](const auto& det) -> double {
        using T = std::decay_t<decltype(det)>;
        if constexpr (std::is_same_v<T, IdealDetector>) {
          return moment([](double k) { return k; });
        } else if constexpr (std::is_same_v<T, SaturatingDetector>) {
          if (det.form == SaturationForm::kScalar) {
            const double i = moment([](double k) { return k; });
            return i - det.epsilon * i * i;
          }
          return moment([&](double k) { return k - det.epsilon * k * k; });
        } else if constexpr (std::is_same_v<T, NoisyDetector>) {
          std::vector<double> r(p.size() + det.d.size() - 1, 0.0);
          for (std::size_t k = 0; k < p.size(); ++k) {
            for (std::size_t j = 0; j < det.d.size(); ++j) r[k + j] += p[k] * det.d[j];
          }
          double acc = 0;
          for (std::size_t n = 0; n < r.size(); ++n) acc += static_cast<double>(n) * r[n];
          return acc;
        } else {
          return moment([&](double k) {
            double f = 1;
            for (std::size_t j = 0; j < det.order; ++j) f *= k - static_cast<double>(j);
            return f;
          });
        }
      },
      detector);
}

/// Short text form, e.g. "saturating(eps=0.01,operator)".
inline std::string describe(const DetectorModel& detector) {
  std::ostringstream out;
  out.precision(17);
  std::visit(
      [&](const auto& det) {
        using T = std::decay_t<decltype(det)>;
        if constexpr (std::is_same_v<T, IdealDetector>) {
          out << "ideal";
        } else if constexpr (std::is_same_v<T, SaturatingDetector>) {
          out << "saturating(eps=" << det.epsilon << ','
              << (det.form == SaturationForm::kOperator ? "operator" : "scalar") << ')';
        } else if constexpr (std::is_same_v<T, NoisyDetector>) {
          out << "noisy(delta=" << noise_offset(det) << ",support=" << det.d.size() << ')';
        } else {
          out << "correlation(n=" << det.order << ')';
        }
      },
      detector);
  return out.str();
}

/// Intensities indexed by block pattern (BlockPattern::index ordering).
class IntensityTable {
 public:
  IntensityTable() = default;
  explicit IntensityTable(std::size_t mode_count) : mode_count_(mode_count) {
    if (mode_count == 0 || mode_count > 20) throw InvalidArgument("intensity table supports 1..20 modes");
    values_.assign(std::size_t{1} << mode_count, 0.0);
    present_.assign(values_.size(), false);
  }

  std::size_t mode_count() const { return mode_count_; }
  std::size_t size() const { return values_.size(); }

  void set(const BlockPattern& pattern, double value) { set(checked_index(pattern), value); }
  void set(std::size_t index, double value) {
    values_.at(index) = value;
    present_.at(index) = true;
  }

  double at(const BlockPattern& pattern) const { return at(checked_index(pattern)); }
  double at(std::size_t index) const {
    if (!present_.at(index)) throw InvalidArgument("intensity table entry missing");
    return values_[index];
  }

  bool has(std::size_t index) const { return present_.at(index); }
  bool complete() const { return std::all_of(present_.begin(), present_.end(), [](bool b) { return b; }); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t checked_index(const BlockPattern& pattern) const {
    if (pattern.size() != mode_count_) throw InvalidArgument("block pattern length does not match table");
    return pattern.index();
  }

  std::size_t mode_count_ = 0;
  std::vector<double> values_;
  std::vector<bool> present_;
};

/// Intensity at `out_mode` for input blocked by `pattern` and evolved by
/// `circuit`.
inline double intensity(const QuantumState& input, const BlockPattern& pattern, const CompiledCircuit& circuit,
                        const DetectorModel& detector, std::size_t out_mode, ApplyReport* report = nullptr) {
  if (pattern.size() != input.mode_count()) throw InvalidArgument("block pattern length does not match mode count");
  if (out_mode >= input.mode_count()) throw InvalidArgument("detector mode out of range");
  const auto evolved = circuit.apply(apply_blocking(input, pattern), report);
  return detector_response(detector, photon_distribution(evolved, out_mode));
}

inline double intensity(const QuantumState& input, const BlockPattern& pattern, const Circuit& circuit,
                        const DetectorModel& detector, std::size_t out_mode) {
  return intensity(input, pattern, CompiledCircuit(circuit, input.basis()), detector, out_mode);
}

struct TableOptions {
  std::size_t workers = 1;
  /// Multiplies every intensity (e.g. a particle number).
  double scale = 1.0;
};

/// All 2^M intensities; patterns may run concurrently, the table is filled by
/// pattern index.
inline IntensityTable intensity_table(const QuantumState& input, const CompiledCircuit& circuit,
                                      const DetectorModel& detector, std::size_t out_mode, TableOptions options = {},
                                      ApplyReport* report = nullptr) {
  const std::size_t m = input.mode_count();
  IntensityTable table(m);
  std::vector<double> values(table.size());
  std::vector<ApplyReport> reports(table.size());
  parallel_for(table.size(), options.workers, [&](std::size_t i) {
    values[i] = options.scale * intensity(input, BlockPattern::from_index(m, i), circuit, detector, out_mode, &reports[i]);
  });
  for (std::size_t i = 0; i < table.size(); ++i) {
    table.set(i, values[i]);
    if (report) report->truncation_mass = std::max(report->truncation_mass, reports[i].truncation_mass);
  }
  return table;
}

inline IntensityTable intensity_table(const QuantumState& input, const Circuit& circuit, const DetectorModel& detector,
                                      std::size_t out_mode, TableOptions options = {}) {
  return intensity_table(input, CompiledCircuit(circuit, input.basis()), detector, out_mode, options);
}

/// sum_x (-1)^{|x|} I_x over a complete table.
inline double sorkin_term(const IntensityTable& table) {
  if (!table.complete()) throw InvalidArgument("intensity table is incomplete");
  double acc = 0;
  for (std::size_t i = 0; i < table.size(); ++i) acc += (std::popcount(i) % 2 ? -1.0 : 1.0) * table.at(i);
  return acc;
}

/// State of the paths outside a subset in subset Sorkin terms.
enum class UnusedPaths { kOpen, kBlocked };

struct SubsetTerm {
  std::vector<std::size_t> modes;
  double value = 0;
};

/// k-subsets of {0..m-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> mode_subsets(std::size_t m, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > m) return out;
  std::vector<std::size_t> c(k);
  std::iota(c.begin(), c.end(), 0);
  for (;;) {
    out.push_back(c);
    std::size_t i = k;
    while (i-- > 0) {
      if (c[i] != i + m - k) break;
    }
    if (i == static_cast<std::size_t>(-1)) break;
    ++c[i];
    for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

/// The order-k Sorkin functional on every k-subset of paths.
inline std::vector<SubsetTerm> sorkin_subsets(const IntensityTable& table, std::size_t k,
                                              UnusedPaths unused = UnusedPaths::kOpen) {
  const std::size_t m = table.mode_count();
  if (k < 1 || k > m) throw InvalidArgument("subset order out of range");
  std::vector<SubsetTerm> out;
  for (auto& subset : mode_subsets(m, k)) {
    std::size_t base = 0;
    if (unused == UnusedPaths::kBlocked) {
      base = (std::size_t{1} << m) - 1;
      for (auto s : subset) base &= ~(std::size_t{1} << (m - 1 - s));
    }
    double acc = 0;
    for (std::size_t x = 0; x < (std::size_t{1} << k); ++x) {
      std::size_t idx = base;
      for (std::size_t b = 0; b < k; ++b) {
        if (x >> (k - 1 - b) & 1) idx |= std::size_t{1} << (m - 1 - subset[b]);
      }
      acc += (std::popcount(x) % 2 ? -1.0 : 1.0) * table.at(idx);
    }
    out.push_back({std::move(subset), acc});
  }
  return out;
}

/// sum_x (-1)^{|x|} rho_x as a dense operator.
struct InterferenceOperator {
  OccupationBasis basis;
  CMatrix matrix;
};

inline InterferenceOperator interference_operator(const QuantumState& input, std::size_t mode_count) {
  if (mode_count != input.mode_count()) throw DimensionMismatch("mode count does not match input state");
  const auto d = static_cast<Eigen::Index>(input.basis().dim());
  CMatrix acc = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < (std::size_t{1} << mode_count); ++i) {
    const auto blocked = apply_blocking(input, BlockPattern::from_index(mode_count, i));
    const double sign = std::popcount(i) % 2 ? -1.0 : 1.0;
    if (blocked.is_pure()) {
      const auto& v = blocked.amplitudes();
      acc.noalias() += sign * v * v.adjoint();
    } else {
      acc += sign * blocked.density_matrix();
    }
  }
  return {input.basis(), std::move(acc)};
}

/// Spectral norm of the partial trace of `op` over `modes`; |Tr op| when
/// `modes` covers every mode.
inline double partial_trace_check(const InterferenceOperator& op, std::span<const std::size_t> modes) {
  if (modes.empty()) throw InvalidArgument("mode subset is empty");
  const auto [kept, reduced] = detail::partial_trace_operator(op.basis, op.matrix, modes);
  if (reduced.rows() == 1) return std::abs(reduced(0, 0));
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (reduced + reduced.adjoint()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

inline double partial_trace_check(const InterferenceOperator& op, std::initializer_list<std::size_t> modes) {
  return partial_trace_check(op, std::span<const std::size_t>(modes.begin(), modes.size()));
}

/// Sorkin term of the n-th factorial moment <a^dag^n a^n> at `out_mode`.
inline double multipartite_sorkin(const QuantumState& input, const Circuit& circuit, std::size_t mode_count,
                                  std::size_t n, std::size_t out_mode = 0, TableOptions options = {}) {
  if (mode_count != input.mode_count() || circuit.mode_count() != mode_count) {
    throw DimensionMismatch("mode count does not match input state or circuit");
  }
  return sorkin_term(intensity_table(input, circuit, correlation_detector(n), out_mode, options));
}

}  // namespace sorkin

#endif  // SORKIN_INTERFERENCE_HPP_
