#include <doctest.h>

#include <cmath>
#include <fstream>

#include "saddlescope/result_io.hpp"
#include "saddlescope/spec_io.hpp"

using namespace saddlescope;

namespace {

const char* kEmmJson = R"({
  "dof": 3,
  "hbar_eff": 0.1,
  "potentials": [
    {"family": "eckart", "a": 1.0, "A": 0.5, "B": 5.0},
    {"family": "morse", "De": 1.0, "aM": 1.0},
    {"family": "morse", "De": 1.5, "aM": 1.0}
  ],
  "couplings": [{"type": "kinetic", "epsilon": 0.3}]
})";

}  // namespace

TEST_CASE("spec parsing: the EMM parameter set") {
  SystemSpec spec = parse_spec(kEmmJson);
  CHECK(spec.dof == 3);
  CHECK(spec.hbar_eff == 0.1);
  REQUIRE(spec.potentials.size() == 3);
  const auto& eck = std::get<EckartPotential>(spec.potentials[0]);
  CHECK(eck.a == 1.0);
  CHECK(eck.A == 0.5);
  CHECK(eck.B == 5.0);
  CHECK(std::get<MorsePotential>(spec.potentials[2]).De == 1.5);
  REQUIRE(spec.couplings.size() == 1);
  CHECK(std::get<KineticCoupling>(spec.couplings[0]).epsilon == 0.3);
}

TEST_CASE("spec parsing: rejection messages name the offending key") {
  // non-positive hbar
  CHECK_THROWS_AS(parse_spec(R"({"dof":1,"hbar_eff":-0.1,
    "potentials":[{"family":"morse","De":1.0,"aM":1.0}]})"),
                  StructuralError);
  // unknown key
  CHECK_THROWS_WITH_AS(parse_spec(R"({"dof":1,"hbar_eff":0.1,"typo":3,
    "potentials":[{"family":"morse","De":1.0,"aM":1.0}]})"),
                       doctest::Contains("typo"), StructuralError);
  // missing key inside a potential
  CHECK_THROWS_WITH_AS(parse_spec(R"({"dof":1,"hbar_eff":0.1,
    "potentials":[{"family":"eckart","a":1.0,"A":0.5}]})"),
                       doctest::Contains("B"), StructuralError);
  // eckart with B <= A
  CHECK_THROWS_AS(parse_spec(R"({"dof":1,"hbar_eff":0.1,
    "potentials":[{"family":"eckart","a":1.0,"A":5.0,"B":0.5}]})"),
                  StructuralError);
  // dof / potential count mismatch
  CHECK_THROWS_AS(parse_spec(R"({"dof":2,"hbar_eff":0.1,
    "potentials":[{"family":"morse","De":1.0,"aM":1.0}]})"),
                  StructuralError);
}

TEST_CASE("spec round trip: parse(serialize(spec)) is key-for-key identical") {
  SystemSpec spec = parse_spec(kEmmJson);
  SystemSpec again = parse_spec(serialize_spec(spec));
  CHECK(serialize_spec(again) == serialize_spec(spec));
}

TEST_CASE("polynomial coupling terms parse with q-only or full exponents") {
  SystemSpec spec = parse_spec(R"({
    "dof": 2, "hbar_eff": 0.1,
    "potentials": [
      {"family": "polynomial", "coefficients": [0.0, 0.0, -0.5]},
      {"family": "harmonic", "omega": 1.0}
    ],
    "couplings": [{"type": "polynomial",
                   "terms": [{"exponents": [1, 1], "coefficient": 0.2},
                             {"exponents": [0, 1, 1, 0], "coefficient": 0.1}]}]
  })");
  const auto& pc = std::get<PolynomialCoupling>(spec.couplings[0]);
  CHECK(pc.poly.size() == 2);
  // q1 q2 and q2 p1
  Monomial m1, m2;
  m1.set_slot(2, 0, 1);
  m1.set_slot(2, 1, 1);
  m2.set_slot(2, 1, 1);
  m2.set_slot(2, 2, 1);
  CHECK(pc.poly.coefficient(m1) == 0.2);
  CHECK(pc.poly.coefficient(m2) == 0.1);
}

TEST_CASE("polynomial PES file is consumed by spec ingestion") {
  std::ofstream pes("test_pes_terms.json");
  pes << R"([{"exponents": [1, 1], "coefficient": 0.25}])";
  pes.close();
  SystemSpec spec = parse_spec(R"({
    "dof": 2, "hbar_eff": 0.1,
    "potentials": [
      {"family": "polynomial", "coefficients": [0.0, 0.0, -0.5]},
      {"family": "harmonic", "omega": 1.0}
    ],
    "couplings": [{"type": "polynomial", "file": "test_pes_terms.json"}]
  })");
  const auto& pc = std::get<PolynomialCoupling>(spec.couplings[0]);
  Monomial m;
  m.set_slot(2, 0, 1);
  m.set_slot(2, 1, 1);
  CHECK(pc.poly.coefficient(m) == 0.25);
}

TEST_CASE("normal form result: bit-exact JSON round trip") {
  SystemSpec spec = parse_spec(kEmmJson);
  NormalFormResult result = qnf(spec, 4);
  std::string text = serialize_normal_form(result);
  NormalFormResult back = parse_normal_form(text);

  CHECK(back.order == result.order);
  CHECK(back.spectrum.lambda == result.spectrum.lambda);  // bitwise
  CHECK(back.spectrum.E0 == result.spectrum.E0);
  CHECK((back.map.M - result.map.M).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(back.generators.size() == result.generators.size());
  for (std::size_t i = 0; i < back.generators.size(); ++i) {
    REQUIRE(back.generators[i].size() == result.generators[i].size());
    for (std::size_t t = 0; t < back.generators[i].terms().size(); ++t) {
      CHECK(back.generators[i].terms()[t].first == result.generators[i].terms()[t].first);
      CHECK(back.generators[i].terms()[t].second == result.generators[i].terms()[t].second);
    }
  }
  REQUIRE(back.K_qnf_op.terms().size() == result.K_qnf_op.terms().size());
  for (std::size_t t = 0; t < back.K_qnf_op.terms().size(); ++t)
    CHECK(back.K_qnf_op.terms()[t].second == result.K_qnf_op.terms()[t].second);
  // serialize again: byte-identical
  CHECK(serialize_normal_form(back) == text);
}
