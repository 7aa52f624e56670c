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

// Executes resolved scenarios: one sweep point at a time, plus the invariant
// suite behind `check`.

#ifndef SORKIN_SCENARIO_HPP_
#define SORKIN_SCENARIO_HPP_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sorkin/analytic.hpp"
#include "sorkin/config.hpp"
#include "sorkin/gpe.hpp"
#include "sorkin/interference.hpp"

namespace sorkin::scenario {

using config::json;

struct PointResult {
  std::size_t modes = 0;
  /// I_M; for gpe the peak |I_3(x)| in 1/m.
  double sorkin = 0;
  std::optional<double> oracle;
  double truncation_mass = 0;
  std::string circuit_hash;
  /// Fock intensities by pattern index.
  std::vector<double> intensities;
  json extra = json::object();
  /// gpe profile and per-pattern densities, 1/m.
  std::vector<double> i3;
  std::array<std::vector<double>, 8> densities;
};

inline json to_json(const PointResult& r) {
  json j = {{"modes", r.modes},
            {"sorkin", r.sorkin},
            {"truncation_mass", r.truncation_mass},
            {"circuit_hash", r.circuit_hash},
            {"intensities", r.intensities},
            {"extra", r.extra},
            {"i3", r.i3},
            {"densities", r.densities}};
  j["oracle"] = r.oracle ? json(*r.oracle) : json(nullptr);
  return j;
}

inline PointResult from_json(const json& j) {
  PointResult r;
  r.modes = j.at("modes").get<std::size_t>();
  r.sorkin = j.at("sorkin").get<double>();
  if (!j.at("oracle").is_null()) r.oracle = j["oracle"].get<double>();
  r.truncation_mass = j.at("truncation_mass").get<double>();
  r.circuit_hash = j.at("circuit_hash").get<std::string>();
  r.intensities = j.at("intensities").get<std::vector<double>>();
  r.extra = j.at("extra");
  r.i3 = j.at("i3").get<std::vector<double>>();
  r.densities = j.at("densities").get<std::array<std::vector<double>, 8>>();
  return r;
}

namespace detail {

inline json subset_terms(const IntensityTable& table) {
  json out = json::object();
  const std::size_t m = table.mode_count();
  if (m > 8) return out;
  for (std::size_t k = 2; k < m; ++k) {
    json by = json::object();
    for (auto unused : {UnusedPaths::kOpen, UnusedPaths::kBlocked}) {
      json list = json::array();
      for (const auto& t : sorkin_subsets(table, k, unused)) list.push_back({{"modes", t.modes}, {"value", t.value}});
      by[unused == UnusedPaths::kOpen ? "open" : "blocked"] = std::move(list);
    }
    out[std::to_string(k)] = std::move(by);
  }
  return out;
}

inline IntensityTable run_table(const config::FockScenario& s, std::size_t workers, double* truncation_mass,
                                const DetectorModel* detector = nullptr) {
  const auto input = s.input();
  const CompiledCircuit cc(s.circuit, input.basis(), s.compile);
  ApplyReport rep;
  auto table = intensity_table(input, cc, detector ? *detector : s.detector, s.out_mode, {workers, s.scale}, &rep);
  if (rep.truncation_mass > s.max_truncation_mass) {
    throw NumericalDiagnostic("mass " + sorkin::detail::format_g(rep.truncation_mass) +
                              " reached incomplete photon-number sectors (limit " +
                              sorkin::detail::format_g(s.max_truncation_mass) +
                              "); raise the truncation caps or lower the tail");
  }
  if (truncation_mass) *truncation_mass = rep.truncation_mass;
  return table;
}

template <class Real>
Sorkin3Profile gpe_profile(const config::GpeScenario& g, std::size_t workers) {
  SolverSettings s = g.solver;
  s.workers = workers;
  return sorkin3_profile<Real>(g.components, g.params, g.grid, s);
}

inline Sorkin3Profile gpe_profile(const config::GpeScenario& g, std::size_t workers) {
  return g.precision == config::Precision::kQuad ? gpe_profile<__float128>(g, workers) : gpe_profile<double>(g, workers);
}

inline bool symmetric_packets(const std::vector<GaussianComponent>& c) {
  return c.size() == 3 && c[1].center == 0 && c[0].center == -c[2].center && c[0].sigma == c[2].sigma &&
         c[0].weight == c[2].weight;
}

}  // namespace detail

/// Runs one resolved point. `workers` parallelizes the 2^M patterns (fock) or
/// the blocked evolutions (gpe).
inline PointResult run_point(const config::Resolved& resolved, std::size_t workers) {
  PointResult r;
  if (const auto* s = std::get_if<config::FockScenario>(&resolved)) {
    const auto table = detail::run_table(*s, workers, &r.truncation_mass);
    r.modes = s->modes;
    r.sorkin = sorkin_term(table);
    r.oracle = s->oracle_value();
    r.circuit_hash = config::circuit_hash(s->circuit);
    r.intensities = table.values();
    r.extra["subsets"] = detail::subset_terms(table);
    r.extra["detector"] = describe(s->detector);
  } else if (const auto* a = std::get_if<config::AnalyticScenario>(&resolved)) {
    r.modes = a->modes();
    switch (a->formula) {
      case config::Formula::kKerrCascade: {
        const auto f = kerr_cascade_interference(a->cascade);
        r.sorkin = f.value;
        r.extra = {{"magnitude", f.magnitude}, {"offset_rad", f.offset}};
        break;
      }
      case config::Formula::kSaturatingTritter:
        r.sorkin = saturating_tritter_i3(a->epsilon, a->mean_n);
        break;
      case config::Formula::kFockExample:
        r.sorkin = fock_example_i3(a->cascade.theta);
        break;
      case config::Formula::kFockExamplePortOne:
        r.sorkin = fock_example_i3_port_one(a->cascade.theta);
        break;
    }
    r.oracle = r.sorkin;
  } else {
    const auto& g = std::get<config::GpeScenario>(resolved);
    auto prof = detail::gpe_profile(g, workers);
    r.modes = 3;
    r.sorkin = prof.max_abs();
    r.extra = {{"max_abs_i3_per_um", prof.max_abs() * 1e-6},
               {"evenness_error", evenness_error(prof.i3)},
               {"atom_count", g.params.atom_count}};
    r.i3 = std::move(prof.i3);
    r.densities = std::move(prof.densities);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Invariant suite

struct CheckResult {
  std::string name;
  double value = 0;
  double tolerance = 0;
  bool pass = true;
  bool skipped = false;
  std::string note;
};

inline json to_json(const CheckResult& c) {
  return {{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass},
          {"skipped", c.skipped}, {"note", c.note}};
}

namespace detail {

inline CheckResult below(std::string name, double value, double tol, std::string note = {}) {
  return {std::move(name), value, tol, std::abs(value) < tol, false, std::move(note)};
}

inline CheckResult skipped(std::string name, std::string why) { return {std::move(name), 0, 0, true, true, std::move(why)}; }

inline std::vector<CheckResult> fock_checks(const config::FockScenario& s, std::size_t workers) {
  std::vector<CheckResult> out;
  const auto input = s.input();
  const std::size_t m = s.modes;
  out.push_back(below("input_trace", input.trace() - (s.normalize ? 1.0 : input.trace()), Tolerance::kAlgebraic));
  out.push_back(below("input_boundary_mass", boundary_mass(input), std::max(s.tail * 10, Tolerance::kBoundaryMass),
                      "amplitude on occupation caps"));

  double tmass = 0;
  const auto table = run_table(s, workers, &tmass);
  const double im = sorkin_term(table);
  out.push_back(below("truncation_mass", tmass, s.max_truncation_mass));

  if (input.basis().dim() <= 4096 && m <= 6) {
    const auto op = interference_operator(input, m);
    out.push_back(below("interference_operator_trace", op.matrix.trace().real(), Tolerance::kAlgebraic));
    double worst = 0;
    for (std::size_t k = 1; k <= m; ++k) {
      for (const auto& sub : mode_subsets(m, k)) worst = std::max(worst, partial_trace_check(op, sub));
    }
    out.push_back(below("interference_operator_partial_traces", worst, Tolerance::kAlgebraic,
                        "max over nonempty mode subsets"));
  } else {
    out.push_back(skipped("interference_operator_partial_traces", "state space above 4096 states"));
  }

  if (m >= 3 && s.circuit.is_linear() && std::holds_alternative<IdealDetector>(s.detector)) {
    out.push_back(below("linear_null", im, Tolerance::kTruncation, "linear circuit, ideal detector"));
  } else {
    out.push_back(skipped("linear_null", "needs M >= 3, a linear circuit and an ideal detector"));
  }

  bool one_photon = !s.coherent;
  for (const auto& t : s.terms) one_photon = one_photon && std::accumulate(t.occupation.begin(), t.occupation.end(), std::size_t{0}) == 1;
  if (m >= 3 && one_photon && std::holds_alternative<IdealDetector>(s.detector)) {
    out.push_back(below("single_particle_null", im, Tolerance::kAlgebraic));
  } else {
    out.push_back(skipped("single_particle_null", "needs a one-photon input and an ideal detector"));
  }

  if (std::holds_alternative<IdealDetector>(s.detector) && m >= 2) {
    const auto noisy = poisson_noise(0.5);
    const double delta = noise_offset(std::get<NoisyDetector>(noisy)) * s.scale;
    const auto shifted = run_table(s, workers, nullptr, &noisy);
    double worst = 0;
    for (std::size_t i = 0; i < table.size(); ++i) worst = std::max(worst, std::abs(shifted.at(i) - table.at(i) - delta));
    out.push_back(below("noise_shift", worst, Tolerance::kAlgebraic, "Poisson dark counts, mean 0.5"));
    out.push_back(below("noise_invariance", sorkin_term(shifted) - im, Tolerance::kAlgebraic));
  } else {
    out.push_back(skipped("noise_invariance", "needs an ideal detector"));
  }

  if (m >= 4 && m <= 8) {
    const double tol = Tolerance::kTruncation;
    double third = 0, fourth = 0;
    for (auto unused : {UnusedPaths::kOpen, UnusedPaths::kBlocked}) {
      for (const auto& t : sorkin_subsets(table, 3, unused)) third = std::max(third, std::abs(t.value));
      const auto four = m == 4 ? std::vector<SubsetTerm>{{{0, 1, 2, 3}, im}} : sorkin_subsets(table, 4, unused);
      for (const auto& t : four) fourth = std::max(fourth, std::abs(t.value));
    }
    CheckResult c{"hierarchy", fourth, 10 * tol, third >= tol || fourth < 10 * tol, false,
                  third < tol ? "all order-3 terms below 1e-8" : "premise not met (order-3 terms nonzero)"};
    out.push_back(c);
  } else {
    out.push_back(skipped("hierarchy", "needs 4 <= M <= 8"));
  }

  if (const auto o = s.oracle_value()) {
    out.push_back(below("oracle", im - *o, Tolerance::kTruncation * std::max(1.0, std::abs(*o)),
                        std::string(config::oracle_name(s.oracle))));
  }
  return out;
}

inline std::vector<CheckResult> analytic_checks(const config::AnalyticScenario& a, std::size_t workers) {
  std::vector<CheckResult> out;
  const double oracle = run_point(a, 1).sorkin;
  double sim = 0, tol = 1e-10;
  std::string note;
  if (a.formula == config::Formula::kKerrCascade) {
    const double tail = 1e-13;
    std::vector<double> phases(a.cascade.modes, 0.0);
    phases[0] = a.cascade.phi1;
    phases[1] = a.cascade.phi2;
    const auto spec = CoherentSpec::uniform(a.cascade.modes, a.cascade.mean_n, phases);
    const auto circuit = build_kerr_cascade(a.cascade.modes, a.cascade.theta);
    const auto s = make_coherent_state(spec, truncation_for(spec, circuit, tail), tail);
    sim = sorkin_term(intensity_table(s, circuit, IdealDetector{}, 0, {workers}));
    tol = 1e-6 * std::max(kerr_cascade_interference(a.cascade).magnitude, 1e-300);
    note = "coherent simulation at tail 1e-13; tolerance 1e-6 of the magnitude";
  } else if (a.formula == config::Formula::kSaturatingTritter) {
    const complex_t alpha(std::sqrt(a.mean_n), 0.0);
    const CoherentSpec spec{{alpha, alpha, alpha}};
    Circuit c(3);
    c.append(make_tritter());
    const auto s = make_coherent_state(spec, truncation_for(spec, c, 1e-14), 1e-14);
    sim = sorkin_term(intensity_table(s, c, saturating_detector(a.epsilon), 0, {workers}));
    tol = 1e-6;
    note = "operator-form detector on port 0";
  } else {
    const OccupationBasis b(3, 2);
    const std::vector<FockTerm> terms = {{0.5, {0, 1, 0}}, {0.5, {0, 1, 1}}, {0.5, {1, 0, 0}}, {0.5, {1, 0, 1}}};
    sim = sorkin_term(intensity_table(make_superposition(b, terms), build_kerr_cascade(3, a.cascade.theta),
                                      IdealDetector{}, 0, {workers}));
    note = "exact two-photon simulation, ideal detector on port 0";
  }
  out.push_back(below("oracle_vs_simulation", sim - oracle, tol, note));
  return out;
}

inline std::vector<CheckResult> gpe_checks(const config::GpeScenario& g, std::size_t workers) {
  std::vector<CheckResult> out;
  SolverSettings s = g.solver;
  s.workers = workers;
  const auto run_norm = [&]<class Real>() {
    const auto f = init_superposition<Real>(g.components, BlockPattern::open(3), g.grid);
    SolverSettings one = s;
    one.workers = 1;
    const auto e = evolve(f, g.params, one);
    return static_cast<double>(e.mass() / f.mass() - Real(1));
  };
  const double drift = g.precision == config::Precision::kQuad ? run_norm.operator()<__float128>()
                                                                : run_norm.operator()<double>();
  out.push_back(below("norm_conservation", drift, 1e-9));

  auto free = g;
  free.params.scattering_length = 0;
  out.push_back(below("linear_null", gpe_profile(free, workers).max_abs() * 1e-6, 1e-9, "a = 0, max |I_3| in 1/um"));

  const auto prof = gpe_profile(g, workers);
  if (symmetric_packets(g.components) && std::abs(g.grid.x_min() + g.grid.x_max()) <= 1e-12 * g.grid.length()) {
    out.push_back(below("evenness", evenness_error(prof.i3), 1e-6, "relative to max |I_3|"));
  } else {
    out.push_back(skipped("evenness", "needs packets symmetric about 0 on a symmetric grid"));
  }
  return out;
}

}  // namespace detail

inline std::vector<CheckResult> run_checks(const config::Resolved& resolved, std::size_t workers) {
  if (const auto* s = std::get_if<config::FockScenario>(&resolved)) return detail::fock_checks(*s, workers);
  if (const auto* a = std::get_if<config::AnalyticScenario>(&resolved)) return detail::analytic_checks(*a, workers);
  return detail::gpe_checks(std::get<config::GpeScenario>(resolved), workers);
}

inline ConvergenceReport run_convergence(const config::GpeScenario& g, std::size_t workers) {
  SolverSettings s = g.solver;
  s.workers = workers;
  return g.precision == config::Precision::kQuad
             ? convergence_report<__float128>(g.components, g.params, g.grid, s, g.convergence_threshold)
             : convergence_report<double>(g.components, g.params, g.grid, s, g.convergence_threshold);
}

}  // namespace sorkin::scenario

#endif  // SORKIN_SCENARIO_HPP_
