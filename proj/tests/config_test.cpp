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

#include "sorkin/config.hpp"

#include <gtest/gtest.h>

#include <random>

#include "sorkin/scenario.hpp"

namespace sorkin::config {
namespace {

std::string path_of(auto&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

TEST(Quantity, ParsesUnitsAndPi) {
  EXPECT_DOUBLE_EQ(parse_quantity("5.8 nm").si, 5.8e-9);
  EXPECT_EQ(parse_quantity("5.8 nm").dim, Dimension::kLength);
  EXPECT_DOUBLE_EQ(parse_quantity("3 um").si, 3e-6);
  EXPECT_DOUBLE_EQ(parse_quantity("3 μm").si, 3e-6);
  EXPECT_DOUBLE_EQ(parse_quantity("1 ms").si, 1e-3);
  EXPECT_DOUBLE_EQ(parse_quantity("1.45e-25 kg").si, 1.45e-25);
  EXPECT_DOUBLE_EQ(parse_quantity("0.5 pi rad").si, kPi / 2);
  EXPECT_DOUBLE_EQ(parse_quantity("pi rad").si, kPi);
  EXPECT_DOUBLE_EQ(parse_quantity("-pi rad").si, -kPi);
  EXPECT_DOUBLE_EQ(parse_quantity("90 deg").si, kPi / 2);
  EXPECT_EQ(parse_quantity("2 mrad").dim, Dimension::kAngle);
}

TEST(Quantity, RejectsMalformed) {
  for (const char* bad : {"5 parsec", "pi nm", "nm", "", "1e rad", "rad 1"}) {
    EXPECT_THROW(parse_quantity(bad), ConfigError) << bad;
  }
}

TEST(Quantity, FormatRoundTripsExactly) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mant(-10, 10);
  std::uniform_int_distribution<int> expo(-30, 5);
  for (int i = 0; i < 200; ++i) {
    const double v = mant(rng) * std::pow(10.0, expo(rng));
    for (auto d : {Dimension::kLength, Dimension::kTime, Dimension::kMass, Dimension::kAngle}) {
      const auto q = parse_quantity(format_quantity(v, d));
      EXPECT_EQ(q.si, v);
      EXPECT_EQ(q.dim, d);
    }
  }
}

TEST(Quantity, BareNumberNeedsUnit) {
  try {
    quantity(json(5.8), Dimension::kLength, "/scattering_length");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "/scattering_length");
    EXPECT_NE(std::string(e.what()).find("5.8 nm"), std::string::npos) << e.what();
  }
  EXPECT_THROW(quantity(json("1 ms"), Dimension::kLength, ""), ConfigError);
}

TEST(ComplexValue, AllForms) {
  EXPECT_EQ(complex_value(json(2.0), ""), complex_t(2, 0));
  EXPECT_EQ(complex_value(json::parse("[1, -3]"), ""), complex_t(1, -3));
  const auto z = complex_value(json::parse(R"({"abs": 2, "phase": "0.5 pi rad"})"), "");
  EXPECT_NEAR(z.real(), 0, 1e-15);
  EXPECT_NEAR(z.imag(), 2, 1e-15);
  EXPECT_THROW(complex_value(json::parse("[1, 2, 3]"), ""), ConfigError);
}

TEST(Fnv1a, ReferenceVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

constexpr const char* kFock = R"({
  // comment lines are allowed
  "schema_version": 1,
  "kind": "fock",
  "vars": {"theta": "0 rad"},
  "sweep": {"var": "theta", "from": "0 rad", "to": "pi rad", "points": 5},
  "input": {"type": "superposition", "terms": [
      {"amplitude": 0.5, "occupation": [0, 1, 0]}, {"amplitude": 0.5, "occupation": [0, 1, 1]},
      {"amplitude": 0.5, "occupation": [1, 0, 0]}, {"amplitude": 0.5, "occupation": [1, 0, 1]}]},
  "circuit": {"elements": [{"type": "kerr_cascade", "theta": "$theta"}]},
  "detector": {"type": "ideal"},
  "truncation": {"cap": 2},
  "oracle": "fock_example_port_one"
})";

TEST(Document, SweepRangeAndSubstitution) {
  const auto doc = parse_document(kFock);
  ASSERT_TRUE(doc.sweep);
  EXPECT_EQ(doc.point_count(), 5u);
  EXPECT_EQ(doc.sweep->column(), "theta_rad");
  for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(doc.sweep->scalar(i), kPi * static_cast<double>(i) / 4);
  EXPECT_EQ(point_config(doc, 2)["circuit"]["elements"][0]["theta"], doc.sweep->values[2]);
  EXPECT_FALSE(point_config(doc, 0).contains("sweep"));
}

TEST(Document, OpenEndedRange) {
  auto j = json::parse(kFock, nullptr, true, true);
  j["sweep"] = {{"var", "theta"}, {"from", 0}, {"to", 1}, {"points", 4}, {"endpoint", false}};
  const auto doc = parse_document(j.dump());
  EXPECT_FALSE(doc.sweep->dim);
  EXPECT_DOUBLE_EQ(doc.sweep->scalar(3), 0.75);
}

TEST(Document, SchemaErrorsCarryPaths) {
  auto edit = [](auto&& f) {
    auto j = json::parse(kFock, nullptr, true, true);
    f(j);
    return j.dump();
  };
  auto resolve_all = [](const std::string& text) {
    const auto doc = parse_document(text);
    for (std::size_t i = 0; i < doc.point_count(); ++i) resolve(doc, i);
  };
  EXPECT_EQ(path_of([&] { parse_document("{ not json"); }), "");
  EXPECT_EQ(path_of([&] { parse_document(edit([](json& j) { j["schema_version"] = 2; })); }), "/schema_version");
  EXPECT_EQ(path_of([&] { parse_document(edit([](json& j) { j.erase("kind"); })); }), "/kind");
  EXPECT_EQ(path_of([&] { parse_document(edit([](json& j) { j["sweep"]["var"] = "phi"; })); }), "/sweep/var");
  EXPECT_EQ(path_of([&] { resolve_all(edit([](json& j) { j["detecter"] = 1; })); }), "/detecter");
  EXPECT_EQ(path_of([&] { resolve_all(edit([](json& j) { j["detector"]["type"] = "perfect"; })); }), "/detector/type");
  EXPECT_EQ(path_of([&] { resolve_all(edit([](json& j) { j["circuit"]["elements"][0]["theta"] = "$phi"; })); }),
            "/circuit/elements/0/theta");
  EXPECT_EQ(path_of([&] { resolve_all(edit([](json& j) { j["circuit"]["elements"][0]["theta"] = 1.0; })); }),
            "/circuit/elements/0/theta");
  EXPECT_EQ(path_of([&] {
              resolve_all(edit([](json& j) {
                j["circuit"]["elements"][0] = {{"type", "beam_splitter"}, {"modes", {0, 3}}};
              }));
            }),
            "/circuit/elements/0/modes/1");
}

TEST(Document, FockExampleThroughConfig) {
  const auto doc = parse_document(kFock);
  for (std::size_t i = 0; i < doc.point_count(); ++i) {
    const auto r = scenario::run_point(resolve(doc, i), 1);
    const double s = std::sin(doc.sweep->scalar(i) / 2);
    EXPECT_NEAR(r.sorkin, -0.5 * s * s, 1e-12);
    ASSERT_TRUE(r.oracle);
    EXPECT_NEAR(*r.oracle, -0.5 * s * s, 1e-15);
    EXPECT_EQ(r.intensities.size(), 8u);
  }
}

TEST(Document, OracleRequiresMatchingSetup) {
  auto j = json::parse(kFock, nullptr, true, true);
  j["detector"] = {{"type", "ideal"}, {"mode", 1}};
  EXPECT_THROW(resolve(parse_document(j.dump()), 0), ConfigError);
}

constexpr const char* kCircuit = R"({"elements": [
  {"type": "random_linear"},
  {"type": "cross_kerr", "modes": [0, 2], "theta": "0.3 rad"},
  {"type": "beam_splitter", "modes": [1, 2], "convention": "symmetric"},
  {"type": "tritter", "modes": [3, 1, 0]},
  {"type": "random_linear", "seed": 5}
]})";

TEST(Circuit, JsonRoundTripPreservesAction) {
  const auto [c, echo] = parse_circuit(json::parse(kCircuit), 4, 9, "/circuit");
  EXPECT_EQ(echo[0]["seed"], 9u * 1000003u);
  const auto canon = circuit_to_json(c);
  const auto [c2, echo2] = parse_circuit(canon, 4, 0, "/circuit");
  EXPECT_EQ(circuit_to_json(c2), canon);
  EXPECT_EQ(circuit_hash(c2), circuit_hash(c));

  CoherentSpec spec{{0.4, {0.2, 0.5}, {0.0, -0.6}, 0.3}};
  const auto basis = truncation_for(spec, c, 1e-12);
  const auto psi = make_coherent_state(spec, basis, 1e-12);
  const auto a = apply_circuit(psi, c);
  const auto b = apply_circuit(psi, c2);
  EXPECT_LT(state_distance(a, b), 1e-14);
}

TEST(Circuit, HashTracksContent) {
  const auto [a, ea] = parse_circuit(json::parse(kCircuit), 4, 9, "");
  const auto [b, eb] = parse_circuit(json::parse(kCircuit), 4, 10, "");
  EXPECT_NE(circuit_hash(a), circuit_hash(b));
  EXPECT_EQ(circuit_hash(a), circuit_hash(parse_circuit(json::parse(kCircuit), 4, 9, "").first));
  EXPECT_EQ(circuit_hash(a).size(), 16u);
}

TEST(Circuit, RejectsBadElements) {
  EXPECT_EQ(path_of([] { parse_circuit(json::parse(R"({"elements": [{"type": "mirror"}]})"), 3, 0, "/c"); }),
            "/c/elements/0/type");
  EXPECT_EQ(path_of([] {
              parse_circuit(json::parse(R"({"elements": [{"type": "cross_kerr", "modes": [1, 1], "theta": "1 rad"}]})"),
                            3, 0, "/c");
            }),
            "/c/elements/0/modes/1");
  EXPECT_EQ(path_of([] {
              parse_circuit(json::parse(R"({"elements": [{"type": "unitary", "modes": [0, 1], "matrix": [[1, 1], [0, 1]]}]})"),
                            3, 0, "/c");
            }),
            "/c/elements/0");
  EXPECT_EQ(path_of([] { parse_circuit(json::parse(R"({"modes": 4, "elements": []})"), 3, 0, "/c"); }), "/c/modes");
}

TEST(Gpe, DefaultsAndStepValidation) {
  const char* base = R"({"kind": "gpe", "species": "rb87", "solver": {"precision": "double"}})";
  const auto r = resolve(parse_document(base), 0);
  const auto& g = std::get<GpeScenario>(r);
  EXPECT_EQ(g.precision, Precision::kDouble);
  EXPECT_EQ(g.components.size(), 3u);
  EXPECT_EQ(g.grid.points(), 1024u);
  auto j = json::parse(base);
  j["solver"]["dt"] = "0.3 us";
  EXPECT_EQ(path_of([&] { resolve(parse_document(j.dump()), 0); }), "/solver/dt");
  j = json::parse(base);
  j["atom_count"] = "500 kg";
  EXPECT_THROW(resolve(parse_document(j.dump()), 0), ConfigError);
}

}  // namespace
}  // namespace sorkin::config
