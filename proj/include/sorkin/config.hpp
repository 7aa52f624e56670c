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

// Scenario configuration: JSON with comments, physical quantities as strings
// with a unit suffix ("5.8 nm", "1 ms", "0.5 pi rad"). Parsing is strict:
// unknown keys, bare numbers for dimensional fields and inconsistent mode
// counts are all ConfigError.

#ifndef SORKIN_CONFIG_HPP_
#define SORKIN_CONFIG_HPP_

#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sorkin/analytic.hpp"
#include "sorkin/circuits.hpp"
#include "sorkin/common.hpp"
#include "sorkin/fock.hpp"
#include "sorkin/gpe.hpp"
#include "sorkin/interference.hpp"

namespace sorkin::config {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Schema violation; `path()` is a JSON pointer into the config.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::string path, const std::string& message)
      : InvalidArgument(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// ---------------------------------------------------------------------------
// Units

enum class Dimension { kLength, kTime, kMass, kAngle };

inline std::string_view si_unit(Dimension d) {
  switch (d) {
    case Dimension::kLength: return "m";
    case Dimension::kTime: return "s";
    case Dimension::kMass: return "kg";
    case Dimension::kAngle: return "rad";
  }
  return "";
}

inline std::string_view dimension_name(Dimension d) {
  switch (d) {
    case Dimension::kLength: return "length";
    case Dimension::kTime: return "time";
    case Dimension::kMass: return "mass";
    case Dimension::kAngle: return "angle";
  }
  return "";
}

struct UnitDef {
  std::string_view name;
  Dimension dim;
  double scale;
};

// Both U+03BC (Greek mu) and U+00B5 (micro sign) are accepted.
inline constexpr UnitDef kUnits[] = {
    {"m", Dimension::kLength, 1.0},       {"mm", Dimension::kLength, 1e-3},
    {"um", Dimension::kLength, 1e-6},     {"μm", Dimension::kLength, 1e-6},
    {"µm", Dimension::kLength, 1e-6}, {"nm", Dimension::kLength, 1e-9},
    {"pm", Dimension::kLength, 1e-12},    {"s", Dimension::kTime, 1.0},
    {"ms", Dimension::kTime, 1e-3},       {"us", Dimension::kTime, 1e-6},
    {"μs", Dimension::kTime, 1e-6},  {"µs", Dimension::kTime, 1e-6},
    {"ns", Dimension::kTime, 1e-9},       {"kg", Dimension::kMass, 1.0},
    {"g", Dimension::kMass, 1e-3},        {"u", Dimension::kMass, 1.66053906660e-27},
    {"rad", Dimension::kAngle, 1.0},      {"mrad", Dimension::kAngle, 1e-3},
    {"deg", Dimension::kAngle, kPi / 180},
};

struct Quantity {
  double si = 0;
  Dimension dim = Dimension::kLength;
};

/// Parses "<number> [pi] <unit>"; the number may be omitted before "pi".
inline Quantity parse_quantity(std::string_view text, const std::string& path = {}) {
  static const std::regex re(
      R"(^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*(?:\*\s*)?([-+]?pi)?\s*([^\s\d.+*-][^\s]*)\s*$)");
  const std::string s(text);
  std::smatch m;
  if (!std::regex_match(s, m, re) || (!m[1].matched && !m[2].matched)) {
    throw ConfigError(path, "cannot parse quantity '" + s + "'; expected e.g. \"5.8 nm\" or \"0.5 pi rad\"");
  }
  double v = m[1].matched ? std::stod(m[1].str()) : 1.0;
  if (m[2].matched) {
    v *= kPi;
    if (m[2].str().front() == '-') v = -v;
  }
  for (const auto& u : kUnits) {
    if (u.name == m[3].str()) {
      if (m[2].matched && u.dim != Dimension::kAngle) throw ConfigError(path, "pi factor only allowed for angles");
      return {v * u.scale, u.dim};
    }
  }
  throw ConfigError(path, "unknown unit '" + m[3].str() + "'");
}

/// Round-trippable text form in SI units.
inline std::string format_quantity(double si, Dimension d) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g ", si);
  return buf + std::string(si_unit(d));
}

// ---------------------------------------------------------------------------
// Typed readers. Each takes the JSON pointer of the value for error messages.

inline std::string child(const std::string& path, std::string_view key) { return path + "/" + std::string(key); }
inline std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

inline void check_object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == it.key();
    if (!ok) throw ConfigError(child(path, it.key()), "unknown key");
  }
}

inline const json& require(const json& obj, std::string_view key, const std::string& path) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) throw ConfigError(child(path, key), "missing required field");
  return *it;
}

inline double quantity(const json& j, Dimension d, const std::string& path) {
  if (j.is_number()) {
    static constexpr std::string_view kExample[] = {"5.8 nm", "1 ms", "1.45e-25 kg", "0.5 pi rad"};
    throw ConfigError(path, std::string(dimension_name(d)) + " needs a unit suffix, e.g. \"" +
                                std::string(kExample[static_cast<int>(d)]) + "\"");
  }
  if (!j.is_string()) throw ConfigError(path, "expected a quantity string with unit");
  const auto q = parse_quantity(j.get<std::string>(), path);
  if (q.dim != d) {
    throw ConfigError(path, "expected a " + std::string(dimension_name(d)) + ", got a " +
                                std::string(dimension_name(q.dim)));
  }
  if (!std::isfinite(q.si)) throw ConfigError(path, "quantity must be finite");
  return q.si;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a dimensionless number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "number must be finite");
  return v;
}

inline std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) throw ConfigError(path, "expected a non-negative integer");
  return j.get<std::size_t>();
}

inline bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

inline std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

inline std::string choice(const json& j, const std::string& path, std::initializer_list<std::string_view> options) {
  const auto s = text(j, path);
  for (auto o : options) {
    if (o == s) return s;
  }
  std::string list;
  for (auto o : options) list += (list.empty() ? "" : ", ") + std::string(o);
  throw ConfigError(path, "expected one of {" + list + "}, got '" + s + "'");
}

/// Complex literal: a number, [re, im], or {"abs": r, "phase": "x rad"}.
inline complex_t complex_value(const json& j, const std::string& path) {
  if (j.is_number()) return number(j, path);
  if (j.is_array()) {
    if (j.size() != 2) throw ConfigError(path, "complex literal needs [re, im]");
    return {number(j[0], child(path, 0)), number(j[1], child(path, 1))};
  }
  if (j.is_object()) {
    check_object(j, path, {"abs", "phase"});
    return std::polar(number(require(j, "abs", path), child(path, "abs")),
                      quantity(require(j, "phase", path), Dimension::kAngle, child(path, "phase")));
  }
  throw ConfigError(path, "expected a complex literal");
}

inline json complex_json(complex_t z) { return json::array({z.real(), z.imag()}); }

inline std::vector<std::size_t> index_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(count(j[i], child(path, i)));
  return out;
}

// ---------------------------------------------------------------------------
// Document: top level, variables and sweep

enum class ScenarioKind { kFock, kGpe, kAnalytic };

inline std::string_view kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::kFock: return "fock";
    case ScenarioKind::kGpe: return "gpe";
    case ScenarioKind::kAnalytic: return "analytic";
  }
  return "";
}

struct SweepSpec {
  std::string var;
  /// One JSON value per point, substituted for "$var".
  std::vector<json> values;
  /// Set when the swept values are physical quantities.
  std::optional<Dimension> dim;

  /// Numeric value of point i (SI for quantities).
  double scalar(std::size_t i) const {
    return dim ? parse_quantity(values.at(i).get<std::string>()).si : values.at(i).get<double>();
  }
  std::string column() const { return dim ? var + "_" + std::string(si_unit(*dim)) : var; }
};

struct Document {
  json body;
  ScenarioKind kind = ScenarioKind::kFock;
  json vars = json::object();
  std::optional<SweepSpec> sweep;
  std::string stem;
  std::string format = "csv";
  std::uint64_t seed = 0;

  std::size_t point_count() const { return sweep ? sweep->values.size() : 1; }
};

namespace detail {

inline json substitute(const json& j, const json& vars, const std::string& path) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s.size() > 1 && s.front() == '$') {
      const auto it = vars.find(s.substr(1));
      if (it == vars.end()) throw ConfigError(path, "undefined variable '" + s + "'");
      return *it;
    }
    return j;
  }
  if (j.is_array()) {
    json out = json::array();
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(substitute(j[i], vars, child(path, i)));
    return out;
  }
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = substitute(it.value(), vars, child(path, it.key()));
    return out;
  }
  return j;
}

inline SweepSpec parse_sweep(const json& j, const json& vars) {
  const std::string path = "/sweep";
  check_object(j, path, {"var", "from", "to", "points", "endpoint", "values"});
  SweepSpec s;
  s.var = text(require(j, "var", path), child(path, "var"));
  if (!vars.contains(s.var)) throw ConfigError(child(path, "var"), "sweep variable '" + s.var + "' is not declared in /vars");
  if (j.contains("values")) {
    for (auto k : {"from", "to", "points", "endpoint"}) {
      if (j.contains(k)) throw ConfigError(child(path, k), "give either 'values' or a from/to range");
    }
    const auto& v = j["values"];
    if (!v.is_array() || v.empty()) throw ConfigError(child(path, "values"), "expected a non-empty array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto p = child(child(path, "values"), i);
      if (v[i].is_string()) {
        const auto q = parse_quantity(v[i].get<std::string>(), p);
        if (s.dim && *s.dim != q.dim) throw ConfigError(p, "sweep values mix dimensions");
        if (i > 0 && !s.dim) throw ConfigError(p, "sweep values mix quantities and numbers");
        s.dim = q.dim;
      } else if (v[i].is_number()) {
        if (s.dim) throw ConfigError(p, "sweep values mix quantities and numbers");
      } else {
        throw ConfigError(p, "sweep values must be numbers or quantities");
      }
      s.values.push_back(v[i]);
    }
    return s;
  }
  const std::size_t n = count(require(j, "points", path), child(path, "points"));
  if (n < 1) throw ConfigError(child(path, "points"), "need at least one point");
  const bool endpoint = j.contains("endpoint") ? boolean(j["endpoint"], child(path, "endpoint")) : true;
  const auto& from = require(j, "from", path);
  const auto& to = require(j, "to", path);
  double a, b;
  if (from.is_string()) {
    const auto q = parse_quantity(from.get<std::string>(), child(path, "from"));
    s.dim = q.dim;
    a = q.si;
    b = quantity(to, q.dim, child(path, "to"));
  } else {
    a = number(from, child(path, "from"));
    b = number(to, child(path, "to"));
  }
  const double denom = endpoint ? static_cast<double>(n > 1 ? n - 1 : 1) : static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = a + (b - a) * static_cast<double>(i) / denom;
    s.values.push_back(s.dim ? json(format_quantity(v, *s.dim)) : json(v));
  }
  return s;
}

}  // namespace detail

/// Parses the top level. Variable references are checked per point by
/// `point_config`.
inline Document parse_document(std::string_view text_in, std::string default_stem = "scenario") {
  Document doc;
  try {
    doc.body = json::parse(text_in.begin(), text_in.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }
  const auto& b = doc.body;
  if (!b.is_object()) throw ConfigError("", "config must be an object");
  if (b.contains("schema_version") && (!b["schema_version"].is_number_integer() || b["schema_version"] != kSchemaVersion)) {
    throw ConfigError("/schema_version", "unsupported schema version (this build reads " + std::to_string(kSchemaVersion) + ")");
  }
  const auto kind = choice(require(b, "kind", ""), "/kind", {"fock", "gpe", "analytic"});
  doc.kind = kind == "fock" ? ScenarioKind::kFock : kind == "gpe" ? ScenarioKind::kGpe : ScenarioKind::kAnalytic;
  if (b.contains("vars")) {
    const auto& v = b["vars"];
    if (!v.is_object()) throw ConfigError("/vars", "expected an object");
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!it->is_number() && !it->is_string()) throw ConfigError(child("/vars", it.key()), "variables hold numbers or quantities");
    }
    doc.vars = v;
  }
  if (b.contains("sweep")) doc.sweep = detail::parse_sweep(b["sweep"], doc.vars);
  doc.stem = std::move(default_stem);
  if (b.contains("output")) {
    check_object(b["output"], "/output", {"stem", "format"});
    if (b["output"].contains("stem")) {
      doc.stem = text(b["output"]["stem"], "/output/stem");
      if (doc.stem.empty() || doc.stem.find_first_of("/\\") != std::string::npos) {
        throw ConfigError("/output/stem", "stem must be a plain file name prefix");
      }
    }
    if (b["output"].contains("format")) doc.format = choice(b["output"]["format"], "/output/format", {"csv", "json"});
  }
  if (b.contains("seed")) doc.seed = count(b["seed"], "/seed");
  return doc;
}

/// Scenario body of point `i` with every "$var" substituted.
inline json point_config(const Document& doc, std::size_t i) {
  json vars = doc.vars;
  if (doc.sweep) vars[doc.sweep->var] = doc.sweep->values.at(i);
  json body = doc.body;
  for (auto k : {"schema_version", "kind", "vars", "sweep", "output", "seed"}) body.erase(k);
  return detail::substitute(body, vars, "");
}

// ---------------------------------------------------------------------------
// Circuits

namespace detail {

inline LinearCoupler embed(const CMatrix& h_small, std::size_t modes, const std::vector<std::size_t>& where) {
  CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(modes), static_cast<Eigen::Index>(modes));
  for (std::size_t a = 0; a < where.size(); ++a) {
    for (std::size_t b = 0; b < where.size(); ++b) {
      h(static_cast<Eigen::Index>(where[a]), static_cast<Eigen::Index>(where[b])) =
          h_small(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  return LinearCoupler(h);
}

inline CMatrix complex_matrix(const json& j, std::size_t n, const std::string& path) {
  if (!j.is_array() || j.size() != n) throw ConfigError(path, "expected " + std::to_string(n) + " rows");
  CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto rp = child(path, r);
    if (!j[r].is_array() || j[r].size() != n) throw ConfigError(rp, "expected " + std::to_string(n) + " entries");
    for (std::size_t c = 0; c < n; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_value(j[r][c], child(rp, c));
    }
  }
  return m;
}

inline std::vector<std::size_t> distinct_modes(const json& j, std::size_t expect, std::size_t modes,
                                               const std::string& path) {
  auto v = index_list(j, path);
  if (expect && v.size() != expect) throw ConfigError(path, "expected " + std::to_string(expect) + " mode indices");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] >= modes) throw ConfigError(child(path, i), "mode index out of range");
    for (std::size_t k = 0; k < i; ++k) {
      if (v[k] == v[i]) throw ConfigError(child(path, i), "repeated mode index");
    }
  }
  return v;
}

inline void wrap_library_errors(const std::string& path, auto&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  } catch (const DimensionMismatch& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace detail

/// Canonical config-format description: linear couplers by Hamiltonian,
/// cross-Kerr gates by mode pair and angle.
inline json circuit_to_json(const Circuit& c) {
  json elements = json::array();
  for (const auto& e : c.elements()) {
    if (const auto* l = std::get_if<LinearCoupler>(&e)) {
      json rows = json::array();
      const auto& h = l->hamiltonian();
      for (Eigen::Index r = 0; r < h.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index k = 0; k < h.cols(); ++k) row.push_back(complex_json(h(r, k)));
        rows.push_back(std::move(row));
      }
      elements.push_back({{"type", "linear"}, {"hamiltonian", std::move(rows)}});
    } else {
      const auto& k = std::get<CrossKerr>(e);
      elements.push_back({{"type", "cross_kerr"},
                          {"modes", {k.mode_j, k.mode_k}},
                          {"theta", format_quantity(k.theta, Dimension::kAngle)}});
    }
  }
  return {{"modes", c.mode_count()}, {"elements", std::move(elements)}};
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string circuit_hash(const Circuit& c) { return hex64(fnv1a(circuit_to_json(c).dump())); }

/// Builds a circuit on `modes` modes from the "elements" array. Elements
/// without a seed draw one from `seed` and their position. Returns the
/// circuit and the echo of the elements with every default filled in.
inline std::pair<Circuit, json> parse_circuit(const json& j, std::size_t modes, std::uint64_t seed,
                                              const std::string& path) {
  check_object(j, path, {"modes", "elements"});
  if (j.contains("modes") && count(j["modes"], child(path, "modes")) != modes) {
    throw ConfigError(child(path, "modes"), "circuit mode count does not match the input");
  }
  const auto& elems = require(j, "elements", path);
  const auto epath = child(path, "elements");
  if (!elems.is_array()) throw ConfigError(epath, "expected an array");
  Circuit c(modes);
  json echo = json::array();
  for (std::size_t i = 0; i < elems.size(); ++i) {
    const auto& e = elems[i];
    const auto p = child(epath, i);
    if (!e.is_object()) throw ConfigError(p, "expected an object");
    const auto type = choice(require(e, "type", p), child(p, "type"),
                             {"beam_splitter", "tritter", "unitary", "linear", "random_linear", "cross_kerr",
                              "kerr_cascade"});
    json out = {{"type", type}};
    detail::wrap_library_errors(p, [&] {
      if (type == "beam_splitter") {
        check_object(e, p, {"type", "modes", "convention"});
        const auto m = detail::distinct_modes(require(e, "modes", p), 2, modes, child(p, "modes"));
        const auto conv = e.contains("convention") ? choice(e["convention"], child(p, "convention"), {"real", "symmetric"})
                                                   : std::string("real");
        c.append(conv == "real" ? beam_splitter(modes, m[0], m[1]) : symmetric_beam_splitter(modes, m[0], m[1]));
        out["modes"] = m;
        out["convention"] = conv;
      } else if (type == "tritter") {
        check_object(e, p, {"type", "modes"});
        const auto m = e.contains("modes") ? detail::distinct_modes(e["modes"], 3, modes, child(p, "modes"))
                                           : std::vector<std::size_t>{0, 1, 2};
        if (m.back() >= modes) throw ConfigError(p, "tritter needs three modes");
        c.append(detail::embed(make_tritter().hamiltonian(), modes, m));
        out["modes"] = m;
      } else if (type == "unitary") {
        check_object(e, p, {"type", "modes", "matrix"});
        const auto m = detail::distinct_modes(require(e, "modes", p), 0, modes, child(p, "modes"));
        const auto u = detail::complex_matrix(require(e, "matrix", p), m.size(), child(p, "matrix"));
        c.append(detail::embed(LinearCoupler::from_unitary(u).hamiltonian(), modes, m));
        out["modes"] = m;
        out["matrix"] = e["matrix"];
      } else if (type == "linear") {
        check_object(e, p, {"type", "hamiltonian"});
        c.append(LinearCoupler(detail::complex_matrix(require(e, "hamiltonian", p), modes, child(p, "hamiltonian"))));
        out["hamiltonian"] = e["hamiltonian"];
      } else if (type == "random_linear") {
        check_object(e, p, {"type", "seed"});
        const std::uint64_t s = e.contains("seed") ? count(e["seed"], child(p, "seed")) : seed * 1000003ULL + i;
        c.append(random_linear_coupler(modes, s));
        out["seed"] = s;
      } else if (type == "cross_kerr") {
        check_object(e, p, {"type", "modes", "theta"});
        const auto m = detail::distinct_modes(require(e, "modes", p), 2, modes, child(p, "modes"));
        const double th = quantity(require(e, "theta", p), Dimension::kAngle, child(p, "theta"));
        c.append(CrossKerr(m[0], m[1], th));
        out["modes"] = m;
        out["theta"] = format_quantity(th, Dimension::kAngle);
      } else {
        check_object(e, p, {"type", "theta"});
        const double th = quantity(require(e, "theta", p), Dimension::kAngle, child(p, "theta"));
        const Circuit cascade = build_kerr_cascade(modes, th);
        for (const auto& g : cascade.elements()) c.append(g);
        out["theta"] = format_quantity(th, Dimension::kAngle);
      }
    });
    echo.push_back(std::move(out));
  }
  return {std::move(c), std::move(echo)};
}

// ---------------------------------------------------------------------------
// Resolved scenarios

enum class OracleKind { kNone, kKerrCascade, kSaturatingTritter, kFockExamplePortOne };

struct FockScenario {
  std::size_t modes = 0;
  std::optional<CoherentSpec> coherent;
  /// Fock or superposition input; used when `coherent` is empty.
  std::vector<FockTerm> terms;
  bool normalize = true;
  Circuit circuit{1};
  DetectorModel detector;
  std::size_t out_mode = 0;
  double scale = 1.0;
  double tail = 1e-12;
  std::vector<std::size_t> caps;
  CompileOptions compile;
  /// Incomplete-sector mass above this is a numerical failure.
  double max_truncation_mass = Tolerance::kTruncation;
  OracleKind oracle = OracleKind::kNone;
  KerrCascadeParams cascade;  // kKerrCascade; theta also for kFockExamplePortOne
  double epsilon = 0, mean_n = 0;  // kSaturatingTritter
  json effective;

  OccupationBasis basis() const { return OccupationBasis(caps); }
  QuantumState input() const {
    if (coherent) return make_coherent_state(*coherent, basis(), tail);
    return make_superposition(basis(), terms, normalize);
  }
  std::optional<double> oracle_value() const {
    switch (oracle) {
      case OracleKind::kNone: return std::nullopt;
      case OracleKind::kKerrCascade: return kerr_cascade_interference(cascade).value;
      case OracleKind::kSaturatingTritter: return saturating_tritter_i3(epsilon, mean_n);
      case OracleKind::kFockExamplePortOne: return fock_example_i3_port_one(cascade.theta);
    }
    return std::nullopt;
  }
};

enum class Formula { kKerrCascade, kSaturatingTritter, kFockExample, kFockExamplePortOne };

struct AnalyticScenario {
  Formula formula = Formula::kKerrCascade;
  KerrCascadeParams cascade;
  double epsilon = 0, mean_n = 0;
  json effective;

  std::size_t modes() const { return formula == Formula::kKerrCascade ? cascade.modes : 3; }
};

enum class Precision { kDouble, kQuad };

struct GpeScenario {
  CondensateParams params;
  std::vector<GaussianComponent> components;
  Grid1D grid{-60e-6, 60e-6, 1024};
  SolverSettings solver;
  Precision precision = Precision::kQuad;
  double convergence_threshold = 0.01;
  json effective;
};

using Resolved = std::variant<FockScenario, AnalyticScenario, GpeScenario>;

inline std::string_view oracle_name(OracleKind k) {
  switch (k) {
    case OracleKind::kNone: return "none";
    case OracleKind::kKerrCascade: return "kerr_cascade";
    case OracleKind::kSaturatingTritter: return "saturating_tritter";
    case OracleKind::kFockExamplePortOne: return "fock_example_port_one";
  }
  return "";
}

namespace detail {

inline std::vector<double> number_or_list(const json& j, std::size_t n, const std::string& path) {
  if (j.is_array()) {
    if (j.size() != n) throw ConfigError(path, "expected " + std::to_string(n) + " entries");
    std::vector<double> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(number(j[i], child(path, i)));
    return v;
  }
  return std::vector<double>(n, number(j, path));
}

/// Phases as a full array or an object {"mode": angle}; missing modes get 0.
inline std::vector<double> phase_list(const json& j, std::size_t n, const std::string& path) {
  std::vector<double> v(n, 0.0);
  if (j.is_array()) {
    if (j.size() != n) throw ConfigError(path, "expected " + std::to_string(n) + " phases");
    for (std::size_t i = 0; i < n; ++i) v[i] = quantity(j[i], Dimension::kAngle, child(path, i));
  } else if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      std::size_t pos = 0, m = 0;
      try {
        m = std::stoul(it.key(), &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != it.key().size() || m >= n) throw ConfigError(child(path, it.key()), "expected a mode index key");
      v[m] = quantity(it.value(), Dimension::kAngle, child(path, it.key()));
    }
  } else {
    throw ConfigError(path, "expected an array or object of angles");
  }
  return v;
}

inline DetectorModel parse_detector(const json& j, std::size_t modes, std::size_t& out_mode, double& scale,
                                    json& echo) {
  const std::string path = "/detector";
  check_object(j, path, {"type", "mode", "scale", "epsilon", "form", "noise", "order"});
  const auto type = choice(require(j, "type", path), child(path, "type"), {"ideal", "saturating", "noisy", "correlation"});
  out_mode = j.contains("mode") ? count(j["mode"], child(path, "mode")) : 0;
  if (out_mode >= modes) throw ConfigError(child(path, "mode"), "detector mode out of range");
  scale = j.contains("scale") ? number(j["scale"], child(path, "scale")) : 1.0;
  echo = {{"type", type}, {"mode", out_mode}, {"scale", scale}};
  auto forbid = [&](std::initializer_list<std::string_view> keys) {
    for (auto k : keys) {
      if (j.contains(std::string(k))) throw ConfigError(child(path, k), "not used by a '" + type + "' detector");
    }
  };
  DetectorModel det = IdealDetector{};
  wrap_library_errors(path, [&] {
    if (type == "ideal") {
      forbid({"epsilon", "form", "noise", "order"});
    } else if (type == "saturating") {
      forbid({"noise", "order"});
      const double eps = number(require(j, "epsilon", path), child(path, "epsilon"));
      const auto form = j.contains("form") ? choice(j["form"], child(path, "form"), {"operator", "scalar"})
                                           : std::string("operator");
      det = saturating_detector(eps, form == "operator" ? SaturationForm::kOperator : SaturationForm::kScalar);
      echo["epsilon"] = eps;
      echo["form"] = form;
    } else if (type == "noisy") {
      forbid({"epsilon", "form", "order"});
      const auto& n = require(j, "noise", path);
      const auto np = child(path, "noise");
      check_object(n, np, {"type", "mean", "p", "counts", "d"});
      const auto nt = choice(require(n, "type", np), child(np, "type"), {"poisson", "two_point", "table"});
      json ne = {{"type", nt}};
      if (nt == "poisson") {
        const double mean = number(require(n, "mean", np), child(np, "mean"));
        det = poisson_noise(mean);
        ne["mean"] = mean;
      } else if (nt == "two_point") {
        const double p = number(require(n, "p", np), child(np, "p"));
        const std::size_t k = count(require(n, "counts", np), child(np, "counts"));
        det = two_point_noise(p, k);
        ne["p"] = p;
        ne["counts"] = k;
      } else {
        const auto& d = require(n, "d", np);
        if (!d.is_array()) throw ConfigError(child(np, "d"), "expected an array of probabilities");
        std::vector<double> v;
        for (std::size_t i = 0; i < d.size(); ++i) v.push_back(number(d[i], child(child(np, "d"), i)));
        det = noisy_detector(v);
        ne["d"] = v;
      }
      echo["noise"] = ne;
    } else {
      forbid({"epsilon", "form", "noise"});
      const std::size_t order = count(require(j, "order", path), child(path, "order"));
      det = correlation_detector(order);
      echo["order"] = order;
    }
  });
  return det;
}

inline bool single_element(const json& echo, std::string_view type) {
  return echo.size() == 1 && echo[0]["type"] == type;
}

inline FockScenario resolve_fock(const json& cfg, std::uint64_t seed) {
  check_object(cfg, "", {"input", "circuit", "detector", "truncation", "oracle"});
  FockScenario s;
  json eff;

  const auto& in = require(cfg, "input", "");
  const std::string ip = "/input";
  if (!in.is_object()) throw ConfigError(ip, "expected an object");
  const auto type = choice(require(in, "type", ip), child(ip, "type"), {"coherent", "fock", "superposition"});
  json in_echo = {{"type", type}};
  if (type == "coherent") {
    check_object(in, ip, {"type", "modes", "mean_n", "phases", "amplitudes"});
    CoherentSpec spec;
    if (in.contains("amplitudes")) {
      for (auto k : {"mean_n", "phases"}) {
        if (in.contains(k)) throw ConfigError(child(ip, k), "give either 'amplitudes' or mean_n/phases");
      }
      const auto& a = in["amplitudes"];
      if (!a.is_array() || a.empty()) throw ConfigError(child(ip, "amplitudes"), "expected a non-empty array");
      for (std::size_t i = 0; i < a.size(); ++i) spec.amplitudes.push_back(complex_value(a[i], child(child(ip, "amplitudes"), i)));
      if (in.contains("modes") && count(in["modes"], child(ip, "modes")) != a.size()) {
        throw ConfigError(child(ip, "modes"), "mode count does not match the amplitude list");
      }
    } else {
      const std::size_t m = count(require(in, "modes", ip), child(ip, "modes"));
      if (m < 1 || m > 20) throw ConfigError(child(ip, "modes"), "mode count must be in 1..20");
      const auto n = number_or_list(require(in, "mean_n", ip), m, child(ip, "mean_n"));
      const auto ph = in.contains("phases") ? phase_list(in["phases"], m, child(ip, "phases")) : std::vector<double>(m, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        if (!(n[i] >= 0)) throw ConfigError(child(ip, "mean_n"), "mean photon number must be >= 0");
        spec.amplitudes.push_back(std::polar(std::sqrt(n[i]), ph[i]));
      }
    }
    s.modes = spec.amplitudes.size();
    json amps = json::array();
    for (auto z : spec.amplitudes) amps.push_back(complex_json(z));
    in_echo["amplitudes"] = amps;
    s.coherent = std::move(spec);
  } else if (type == "fock") {
    check_object(in, ip, {"type", "occupation"});
    auto occ = index_list(require(in, "occupation", ip), child(ip, "occupation"));
    if (occ.empty() || occ.size() > 20) throw ConfigError(child(ip, "occupation"), "mode count must be in 1..20");
    s.modes = occ.size();
    in_echo["occupation"] = occ;
    s.terms.push_back({1.0, std::move(occ)});
  } else {
    check_object(in, ip, {"type", "modes", "terms", "normalize"});
    const auto& t = require(in, "terms", ip);
    const auto tp = child(ip, "terms");
    if (!t.is_array() || t.empty()) throw ConfigError(tp, "expected a non-empty array of terms");
    s.normalize = in.contains("normalize") ? boolean(in["normalize"], child(ip, "normalize")) : true;
    json terms = json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto p = child(tp, i);
      check_object(t[i], p, {"amplitude", "occupation"});
      FockTerm term{complex_value(require(t[i], "amplitude", p), child(p, "amplitude")),
                    index_list(require(t[i], "occupation", p), child(p, "occupation"))};
      if (i == 0) s.modes = term.occupation.size();
      if (term.occupation.size() != s.modes || s.modes == 0 || s.modes > 20) {
        throw ConfigError(child(p, "occupation"), "every term needs the same mode count (1..20)");
      }
      terms.push_back({{"amplitude", complex_json(term.amplitude)}, {"occupation", term.occupation}});
      s.terms.push_back(std::move(term));
    }
    if (in.contains("modes") && count(in["modes"], child(ip, "modes")) != s.modes) {
      throw ConfigError(child(ip, "modes"), "mode count does not match the terms");
    }
    in_echo["terms"] = terms;
    in_echo["normalize"] = s.normalize;
  }
  in_echo["modes"] = s.modes;
  eff["input"] = in_echo;

  auto [circuit, elements] = parse_circuit(require(cfg, "circuit", ""), s.modes, seed, "/circuit");
  s.circuit = std::move(circuit);
  eff["circuit"] = {{"modes", s.modes}, {"elements", elements}, {"hash", circuit_hash(s.circuit)}};

  json det_echo;
  s.detector = parse_detector(require(cfg, "detector", ""), s.modes, s.out_mode, s.scale, det_echo);
  eff["detector"] = det_echo;

  const std::string tp = "/truncation";
  const json trunc = cfg.contains("truncation") ? cfg["truncation"] : json::object();
  check_object(trunc, tp, {"tail", "cap", "caps", "linear_method", "warn_truncation_mass", "max_truncation_mass"});
  if (trunc.contains("tail")) s.tail = number(trunc["tail"], child(tp, "tail"));
  if (!(s.tail > 0 && s.tail < 1)) throw ConfigError(child(tp, "tail"), "tail must be in (0, 1)");
  if (trunc.contains("linear_method")) {
    s.compile.linear_method = choice(trunc["linear_method"], child(tp, "linear_method"), {"factorized", "full_sector"}) ==
                                      "factorized"
                                  ? LinearMethod::kFactorized
                                  : LinearMethod::kFullSector;
  }
  if (trunc.contains("warn_truncation_mass")) {
    s.compile.warn_truncation_mass = number(trunc["warn_truncation_mass"], child(tp, "warn_truncation_mass"));
  }
  if (trunc.contains("max_truncation_mass")) {
    s.max_truncation_mass = number(trunc["max_truncation_mass"], child(tp, "max_truncation_mass"));
  }
  if (trunc.contains("cap") && trunc.contains("caps")) throw ConfigError(tp, "give either 'cap' or 'caps'");
  if (trunc.contains("cap")) {
    s.caps.assign(s.modes, count(trunc["cap"], child(tp, "cap")));
  } else if (trunc.contains("caps")) {
    s.caps = index_list(trunc["caps"], child(tp, "caps"));
    if (s.caps.size() != s.modes) throw ConfigError(child(tp, "caps"), "need one cap per mode");
  } else if (s.coherent) {
    s.caps = truncation_for(*s.coherent, s.circuit, s.tail).caps();
  } else {
    std::size_t n = 1;
    for (const auto& t : s.terms) n = std::max(n, std::accumulate(t.occupation.begin(), t.occupation.end(), std::size_t{0}));
    s.caps.assign(s.modes, n);
  }
  for (std::size_t i = 0; i < s.caps.size(); ++i) {
    if (s.caps[i] < 1) throw ConfigError(tp, "caps must be >= 1");
  }
  double dim = 1;
  for (auto c : s.caps) dim *= static_cast<double>(c + 1);
  if (dim > 5e7) throw ConfigError(tp, "truncated space too large (" + sorkin::detail::format_g(dim) + " states)");
  for (const auto& t : s.terms) {
    for (std::size_t m = 0; m < s.modes; ++m) {
      if (t.occupation[m] > s.caps[m]) throw ConfigError(tp, "input occupation exceeds the truncation cap");
    }
  }
  eff["truncation"] = {{"tail", s.tail},
                       {"caps", s.caps},
                       {"linear_method", s.compile.linear_method == LinearMethod::kFactorized ? "factorized" : "full_sector"},
                       {"warn_truncation_mass", s.compile.warn_truncation_mass},
                       {"max_truncation_mass", s.max_truncation_mass}};

  const auto oracle = cfg.contains("oracle") ? choice(cfg["oracle"], "/oracle",
                                                      {"none", "kerr_cascade", "saturating_tritter", "fock_example_port_one"})
                                             : std::string("none");
  eff["oracle"] = oracle;
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("/oracle", "oracle '" + oracle + "' needs " + what);
  };
  const bool ideal_port0 = std::holds_alternative<IdealDetector>(s.detector) && s.out_mode == 0 && s.scale == 1.0;
  if (oracle == "kerr_cascade" || oracle == "saturating_tritter") {
    need(s.coherent.has_value(), "a coherent input");
    const auto& a = s.coherent->amplitudes;
    for (const auto& z : a) need(std::abs(std::norm(z) - std::norm(a[0])) <= 1e-12 * std::norm(a[0]), "equal mean photon numbers");
    s.mean_n = std::norm(a[0]);
  }
  if (oracle == "kerr_cascade") {
    s.oracle = OracleKind::kKerrCascade;
    need(single_element(elements, "kerr_cascade"), "a circuit made of one kerr_cascade element");
    need(ideal_port0, "an ideal detector on mode 0 with scale 1");
    const auto& a = s.coherent->amplitudes;
    s.cascade = {s.mean_n, quantity(elements[0]["theta"], Dimension::kAngle, "/circuit/elements/0/theta"), s.modes,
                 std::arg(a[0]), std::arg(a[1])};
  } else if (oracle == "saturating_tritter") {
    s.oracle = OracleKind::kSaturatingTritter;
    need(s.modes == 3 && single_element(elements, "tritter"), "a 3-mode circuit made of one tritter element");
    for (const auto& z : s.coherent->amplitudes) need(std::abs(z - s.coherent->amplitudes[0]) <= 1e-12, "identical amplitudes");
    const auto* det = std::get_if<SaturatingDetector>(&s.detector);
    need(det && det->form == SaturationForm::kOperator && s.out_mode == 0 && s.scale == 1.0,
         "an operator-form saturating detector on mode 0 with scale 1");
    s.epsilon = det->epsilon;
  } else if (oracle == "fock_example_port_one") {
    s.oracle = OracleKind::kFockExamplePortOne;
    need(s.modes == 3 && single_element(elements, "kerr_cascade"), "a 3-mode circuit made of one kerr_cascade element");
    need(ideal_port0, "an ideal detector on mode 0 with scale 1");
    need(!s.coherent && s.normalize, "a normalized superposition input");
    const OccupationBasis b = s.basis();
    const std::vector<FockTerm> ref = {{0.5, {0, 1, 0}}, {0.5, {0, 1, 1}}, {0.5, {1, 0, 0}}, {0.5, {1, 0, 1}}};
    bool fits = true;
    for (const auto& t : ref) {
      for (std::size_t m = 0; m < 3; ++m) fits = fits && t.occupation[m] <= b.cap(m);
    }
    need(fits && state_distance(make_superposition(b, s.terms), make_superposition(b, ref)) < 1e-12,
         "the input (|01>+|10>)(|0>+|1>)/2 on modes (0,1)(2)");
    s.cascade.theta = quantity(elements[0]["theta"], Dimension::kAngle, "/circuit/elements/0/theta");
  }
  s.effective = std::move(eff);
  return s;
}

inline AnalyticScenario resolve_analytic(const json& cfg) {
  check_object(cfg, "", {"formula", "mean_n", "theta", "modes", "phi1", "phi2", "epsilon"});
  AnalyticScenario a;
  const auto f = choice(require(cfg, "formula", ""), "/formula",
                        {"kerr_cascade", "saturating_tritter", "fock_example", "fock_example_port_one"});
  json eff = {{"formula", f}};
  auto allow_only = [&](std::initializer_list<std::string_view> keys) {
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
      bool ok = it.key() == "formula";
      for (auto k : keys) ok = ok || k == it.key();
      if (!ok) throw ConfigError(child("", it.key()), "not used by formula '" + f + "'");
    }
  };
  wrap_library_errors("", [&] {
    if (f == "kerr_cascade") {
      allow_only({"mean_n", "theta", "modes", "phi1", "phi2"});
      a.formula = Formula::kKerrCascade;
      a.cascade.mean_n = number(require(cfg, "mean_n", ""), "/mean_n");
      a.cascade.theta = quantity(require(cfg, "theta", ""), Dimension::kAngle, "/theta");
      a.cascade.modes = count(require(cfg, "modes", ""), "/modes");
      a.cascade.phi1 = cfg.contains("phi1") ? quantity(cfg["phi1"], Dimension::kAngle, "/phi1") : 0.0;
      a.cascade.phi2 = cfg.contains("phi2") ? quantity(cfg["phi2"], Dimension::kAngle, "/phi2") : 0.0;
      if (a.cascade.modes < 3 || a.cascade.modes > 20) throw ConfigError("/modes", "cascade needs 3..20 modes");
      if (!(a.cascade.mean_n >= 0)) throw ConfigError("/mean_n", "mean photon number must be >= 0");
      eff["mean_n"] = a.cascade.mean_n;
      eff["theta"] = format_quantity(a.cascade.theta, Dimension::kAngle);
      eff["modes"] = a.cascade.modes;
      eff["phi1"] = format_quantity(a.cascade.phi1, Dimension::kAngle);
      eff["phi2"] = format_quantity(a.cascade.phi2, Dimension::kAngle);
    } else if (f == "saturating_tritter") {
      allow_only({"epsilon", "mean_n"});
      a.formula = Formula::kSaturatingTritter;
      a.epsilon = number(require(cfg, "epsilon", ""), "/epsilon");
      a.mean_n = number(require(cfg, "mean_n", ""), "/mean_n");
      if (!(a.epsilon >= 0)) throw ConfigError("/epsilon", "saturation strength must be >= 0");
      if (!(a.mean_n >= 0)) throw ConfigError("/mean_n", "mean photon number must be >= 0");
      eff["epsilon"] = a.epsilon;
      eff["mean_n"] = a.mean_n;
    } else {
      allow_only({"theta"});
      a.formula = f == "fock_example" ? Formula::kFockExample : Formula::kFockExamplePortOne;
      a.cascade.theta = quantity(require(cfg, "theta", ""), Dimension::kAngle, "/theta");
      eff["theta"] = format_quantity(a.cascade.theta, Dimension::kAngle);
    }
  });
  a.effective = std::move(eff);
  return a;
}

inline GpeScenario resolve_gpe(const json& cfg) {
  check_object(cfg, "", {"species", "atom_count", "scattering_length", "mass", "tau", "packets", "components", "grid",
                         "solver", "convergence"});
  GpeScenario g;
  const auto species = choice(require(cfg, "species", ""), "/species", {"rb87", "li7", "custom"});
  if (species == "rb87") g.params = rubidium87();
  if (species == "li7") g.params = lithium7();
  if (species == "custom") {
    for (auto k : {"atom_count", "scattering_length", "mass"}) require(cfg, k, "");
  }
  if (cfg.contains("atom_count")) g.params.atom_count = number(cfg["atom_count"], "/atom_count");
  if (cfg.contains("scattering_length")) {
    g.params.scattering_length = quantity(cfg["scattering_length"], Dimension::kLength, "/scattering_length");
  }
  if (cfg.contains("mass")) g.params.mass = quantity(cfg["mass"], Dimension::kMass, "/mass");
  if (cfg.contains("tau")) g.params.tau = quantity(cfg["tau"], Dimension::kTime, "/tau");
  wrap_library_errors("", [&] { g.params.validate(); });

  if (cfg.contains("packets") && cfg.contains("components")) throw ConfigError("", "give either 'packets' or 'components'");
  json comp_echo = json::array();
  if (cfg.contains("components")) {
    const auto& c = cfg["components"];
    if (!c.is_array() || c.size() != 3) throw ConfigError("/components", "expected three components");
    for (std::size_t i = 0; i < 3; ++i) {
      const auto p = child("/components", i);
      check_object(c[i], p, {"center", "sigma", "weight"});
      GaussianComponent gc;
      gc.center = quantity(require(c[i], "center", p), Dimension::kLength, child(p, "center"));
      gc.sigma = quantity(require(c[i], "sigma", p), Dimension::kLength, child(p, "sigma"));
      gc.weight = c[i].contains("weight") ? complex_value(c[i]["weight"], child(p, "weight")) : 1 / std::sqrt(3.0);
      if (!(gc.sigma > 0)) throw ConfigError(child(p, "sigma"), "sigma must be > 0");
      g.components.push_back(gc);
    }
  } else {
    const json pk = cfg.contains("packets") ? cfg["packets"] : json::object();
    check_object(pk, "/packets", {"spacing", "sigma", "phases"});
    const double spacing = pk.contains("spacing") ? quantity(pk["spacing"], Dimension::kLength, "/packets/spacing") : 5e-6;
    const double sigma = pk.contains("sigma") ? quantity(pk["sigma"], Dimension::kLength, "/packets/sigma") : 1e-6;
    if (!(sigma > 0)) throw ConfigError("/packets/sigma", "sigma must be > 0");
    const auto ph = pk.contains("phases") ? phase_list(pk["phases"], 3, "/packets/phases") : std::vector<double>(3, 0.0);
    g.components = three_gaussians(spacing, sigma, {ph[0], ph[1], ph[2]});
  }
  for (const auto& c : g.components) {
    comp_echo.push_back({{"center", format_quantity(c.center, Dimension::kLength)},
                         {"sigma", format_quantity(c.sigma, Dimension::kLength)},
                         {"weight", complex_json(c.weight)}});
  }

  const json grid = cfg.contains("grid") ? cfg["grid"] : json::object();
  check_object(grid, "/grid", {"x_min", "x_max", "points"});
  const double x0 = grid.contains("x_min") ? quantity(grid["x_min"], Dimension::kLength, "/grid/x_min") : -60e-6;
  const double x1 = grid.contains("x_max") ? quantity(grid["x_max"], Dimension::kLength, "/grid/x_max") : 60e-6;
  const std::size_t pts = grid.contains("points") ? count(grid["points"], "/grid/points") : 1024;
  wrap_library_errors("/grid", [&] { g.grid = Grid1D(x0, x1, pts); });

  const json solver = cfg.contains("solver") ? cfg["solver"] : json::object();
  const std::string sp = "/solver";
  check_object(solver, sp, {"dt", "monitor_interval", "boundary_tolerance", "phase_warning", "precision"});
  if (solver.contains("dt")) g.solver.dt = quantity(solver["dt"], Dimension::kTime, child(sp, "dt"));
  if (!(g.solver.dt > 0)) throw ConfigError(child(sp, "dt"), "dt must be > 0");
  const double steps = g.params.tau / g.solver.dt;
  if (std::abs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps)) {
    throw ConfigError(child(sp, "dt"), "tau / dt must be an integer");
  }
  if (solver.contains("monitor_interval")) g.solver.monitor_interval = count(solver["monitor_interval"], child(sp, "monitor_interval"));
  if (solver.contains("boundary_tolerance")) {
    g.solver.boundary_tolerance = number(solver["boundary_tolerance"], child(sp, "boundary_tolerance"));
  }
  if (solver.contains("phase_warning")) {
    g.solver.phase_warning = quantity(solver["phase_warning"], Dimension::kAngle, child(sp, "phase_warning"));
  }
  if (solver.contains("precision")) {
    g.precision = choice(solver["precision"], child(sp, "precision"), {"double", "quad"}) == "double" ? Precision::kDouble
                                                                                                    : Precision::kQuad;
  }
  const json conv = cfg.contains("convergence") ? cfg["convergence"] : json::object();
  check_object(conv, "/convergence", {"threshold"});
  if (conv.contains("threshold")) g.convergence_threshold = number(conv["threshold"], "/convergence/threshold");

  g.effective = {
      {"species", species},
      {"atom_count", g.params.atom_count},
      {"scattering_length", format_quantity(g.params.scattering_length, Dimension::kLength)},
      {"mass", format_quantity(g.params.mass, Dimension::kMass)},
      {"tau", format_quantity(g.params.tau, Dimension::kTime)},
      {"components", comp_echo},
      {"grid",
       {{"x_min", format_quantity(x0, Dimension::kLength)},
        {"x_max", format_quantity(x1, Dimension::kLength)},
        {"points", pts}}},
      {"solver",
       {{"dt", format_quantity(g.solver.dt, Dimension::kTime)},
        {"monitor_interval", g.solver.monitor_interval},
        {"boundary_tolerance", g.solver.boundary_tolerance},
        {"phase_warning", format_quantity(g.solver.phase_warning, Dimension::kAngle)},
        {"precision", g.precision == Precision::kQuad ? "quad" : "double"}}},
      {"convergence", {{"threshold", g.convergence_threshold}}},
  };
  return g;
}

}  // namespace detail

/// Typed scenario of point `i`; all schema errors surface here.
inline Resolved resolve(const Document& doc, std::size_t i) {
  const json cfg = point_config(doc, i);
  switch (doc.kind) {
    case ScenarioKind::kFock: return detail::resolve_fock(cfg, doc.seed);
    case ScenarioKind::kAnalytic: return detail::resolve_analytic(cfg);
    case ScenarioKind::kGpe: return detail::resolve_gpe(cfg);
  }
  throw ConfigError("/kind", "unknown kind");
}

inline const json& effective(const Resolved& r) {
  return std::visit([](const auto& s) -> const json& { return s.effective; }, r);
}

}  // namespace sorkin::config

#endif  // SORKIN_CONFIG_HPP_
