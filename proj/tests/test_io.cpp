#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "moduli/cartan.hpp"
#include "moduli/deformation.hpp"
#include "moduli/io.hpp"

using namespace moduli;
using nlohmann::json;

TEST_CASE("algebroid document round trip") {
  json doc = json::parse(R"({
    "num_vars": 2, "rank": 2,
    "anchor": [["0", "x0"], ["-x0", "0"]],
    "bracket": [{"i": 0, "j": 1, "coeffs": ["1", "0"]}]
  })");
  AlgebroidSpec spec = algebroid_from_json(doc);
  CHECK(spec.num_vars() == 2);
  CHECK(spec.rank() == 2);
  CHECK(validate_algebroid(spec).valid());
  CHECK(spec.anchor(0, 1) == Polynomial::parse("x0", 2));

  auto emitted = algebroid_to_json(spec);
  AlgebroidSpec again = algebroid_from_json(emitted);
  CHECK(again.anchor(0, 1) == spec.anchor(0, 1));
  CHECK(again.structure(0, 1)[0] == spec.structure(0, 1)[0]);
}

TEST_CASE("algebroid document errors") {
  CHECK_THROWS_AS(algebroid_from_json(json::parse(R"({"rank": 2})")), io_error);
  CHECK_THROWS_AS(algebroid_from_json(json::parse(R"({"num_vars": 1, "rank": 0})")), io_error);
  // bad polynomial
  CHECK_THROWS_AS(
      algebroid_from_json(json::parse(R"({"num_vars":1,"rank":1,"anchor":[["y0"]]})")), io_error);
  // variable out of range
  CHECK_THROWS_AS(
      algebroid_from_json(json::parse(R"({"num_vars":1,"rank":1,"anchor":[["x1"]]})")), io_error);
  // i >= j
  CHECK_THROWS_AS(algebroid_from_json(json::parse(
                      R"({"num_vars":0,"rank":2,"bracket":[{"i":1,"j":1,"coeffs":["0","0"]}]})")),
                  io_error);
  // degree cap
  CHECK_THROWS_AS(
      algebroid_from_json(json::parse(R"({"num_vars":1,"rank":1,"anchor":[["x0^13"]]})")),
      io_error);
  CHECK_NOTHROW(
      algebroid_from_json(json::parse(R"({"num_vars":1,"rank":1,"anchor":[["x0^13"]]})"), 13));
}

TEST_CASE("scalar entries") {
  CHECK(parse_scalar_entry("3/2") == GaussianRational(Rational(3, 2)));
  CHECK(parse_scalar_entry("-2") == GaussianRational(Rational(-2)));
  CHECK(parse_scalar_entry("i") == GaussianRational(Rational(0), Rational(1)));
  CHECK(parse_scalar_entry("-i") == GaussianRational(Rational(0), Rational(-1)));
  CHECK(parse_scalar_entry("3i") == GaussianRational(Rational(0), Rational(3)));
  CHECK(parse_scalar_entry("1/2 - 2/3i") == GaussianRational(Rational(1, 2), Rational(-2, 3)));
  CHECK(parse_scalar_entry("-1/2+i") == GaussianRational(Rational(-1, 2), Rational(1)));
  CHECK_THROWS_AS(parse_scalar_entry("i3"), io_error);
  CHECK_THROWS_AS(parse_scalar_entry(""), io_error);
}

TEST_CASE("rep document") {
  json doc = json::parse(R"({
    "lie_algebra": {"num_vars": 0, "rank": 2, "bracket": []},
    "dim_V": 2,
    "scalar_field": "real",
    "rho": [[["1","0"],["0","1"]], [["0","1/2"],["0","0"]]]
  })");
  RepSpec rep = rep_from_json(doc);
  CHECK(rep.rank() == 2);
  CHECK(rep.dim_v == 2);
  CHECK(rep.rho[1](0, 1) == GaussianRational(Rational(1, 2)));
  CHECK(validate_rep(rep).valid());
  CHECK(is_rep_document(doc));

  // complex entry in a real rep is rejected
  json bad = doc;
  bad["rho"][0][0][0] = "i";
  CHECK_THROWS_AS(rep_from_json(bad), io_error);

  // complex field accepts it
  bad["scalar_field"] = "complex";
  RepSpec crep = rep_from_json(bad);
  CHECK(crep.scalar_field == ScalarField::Complex);
  CHECK(crep.rho[0](0, 0) == GaussianRational(Rational(0), Rational(1)));

  // dimension errors
  json wrong = doc;
  wrong["rho"] = json::array();
  CHECK_THROWS_AS(rep_from_json(wrong), io_error);
  json wrong2 = doc;
  wrong2["dim_V"] = 0;
  CHECK_THROWS_AS(rep_from_json(wrong2), io_error);
}

TEST_CASE("connection and gauge documents") {
  AlgebroidSpec spec = make_tangent(2);
  json cdoc = json::parse(R"({
    "dim_E": 2,
    "alpha": [{"basis_index": 0, "matrix": [["0","x1"],["0","0"]]}]
  })");
  ConnectionForm A = connection_from_json(cdoc, spec);
  CHECK(A.dim() == 2);
  CHECK(A.alpha.component({0})(0, 1) == Polynomial::parse("x1", 2));
  CHECK(A.alpha.component({1}).is_zero());

  CHECK_THROWS_AS(connection_from_json(json::parse(
                      R"({"dim_E":2,"alpha":[{"basis_index":5,"matrix":[["0","0"],["0","0"]]}]})"),
                  spec),
                  io_error);

  json gdoc = json::parse(R"({
    "phi": [["1","x0"],["0","1"]],
    "phi_inv": [["1","-x0"],["0","1"]]
  })");
  GaugeMap phi = gauge_from_json(gdoc, spec);
  CHECK(phi.dim() == 2);

  // a wrong inverse is rejected by the GaugeMap invariant
  json gbad = gdoc;
  gbad["phi_inv"] = json::parse(R"([["1","x0"],["0","1"]])");
  CHECK_THROWS_AS(gauge_from_json(gbad, spec), io_error);
}

TEST_CASE("gallery files parse and validate") {
  const char* algebroids[] = {"tangent2.json", "poisson_x0.json", "nijenhuis_tangent2.json",
                              "aff1_action.json"};
  for (const char* name : algebroids) {
    auto doc = load_json_file(std::string(GALLERY_DIR) + "/" + name);
    CHECK_FALSE(is_rep_document(doc));
    AlgebroidSpec spec = algebroid_from_json(doc);
    CHECK(validate_algebroid(spec).valid());
  }
  const char* reps[] = {"heisenberg_m1.json", "sl2_standard.json", "abelian2_m2.json",
                        "abelian2_m1.json"};
  for (const char* name : reps) {
    auto doc = load_json_file(std::string(GALLERY_DIR) + "/" + name);
    CHECK(is_rep_document(doc));
    RepSpec rep = rep_from_json(doc);
    CHECK(validate_rep(rep).valid());
  }
  // the shipped connection/gauge pair works against the tangent algebroid
  AlgebroidSpec tangent = algebroid_from_json(
      load_json_file(std::string(GALLERY_DIR) + "/tangent2.json"));
  ConnectionForm A = connection_from_json(
      load_json_file(std::string(GALLERY_DIR) + "/connection_tangent2.json"), tangent);
  GaugeMap phi = gauge_from_json(
      load_json_file(std::string(GALLERY_DIR) + "/gauge_shear.json"), tangent);
  CHECK(bianchi_check(tangent, A).is_zero());
  ConnectionForm moved = gauge_transform(tangent, A, phi);
  CHECK((curvature(tangent, moved) - curvature(tangent, A).conjugate(phi.phi_inv, phi.phi))
            .is_zero());
}

TEST_CASE("missing files raise io_error") {
  CHECK_THROWS_AS(load_json_file("/nonexistent/nowhere.json"), io_error);
}
