#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "moduli/algebroid.hpp"
#include "moduli/random_gen.hpp"

using namespace moduli;

namespace {

Polynomial P(const std::string& s, std::size_t n) { return Polynomial::parse(s, n); }

AlgebroidSpec poisson_x0() {
  std::vector<std::vector<Polynomial>> pi(2, std::vector<Polynomial>(2, Polynomial::zero(2)));
  pi[0][1] = P("x0", 2);
  pi[1][0] = P("-x0", 2);
  return make_poisson(pi, 2);
}

// Jacobi-violating r=3 algebra: [e0,e1]=e2, [e0,e2]=e0.
AlgebroidSpec broken_r3() {
  AlgebroidSpec spec(0, 3);
  spec.set_bracket(0, 1, {P("0", 0), P("0", 0), P("1", 0)});
  spec.set_bracket(0, 2, {P("1", 0), P("0", 0), P("0", 0)});
  return spec;
}

SectionExpr section(const AlgebroidSpec& spec, const std::vector<std::string>& comps) {
  SectionExpr s = SectionExpr::zero(spec.rank(), spec.num_vars());
  for (std::size_t i = 0; i < comps.size(); ++i)
    s.components[i] = P(comps[i], spec.num_vars());
  return s;
}

}  // namespace

TEST_CASE("anchor_apply on the tangent algebroid") {
  auto spec = make_tangent(2);
  CHECK(anchor_apply(spec, SectionExpr::basis(2, 2, 0), P("x0^2", 2)) == P("2*x0", 2));
}

TEST_CASE("anchor_apply vanishes over a point") {
  auto spec = make_lie_algebra(2, {{{0, 1}, {Rational(1), Rational(0)}}});
  SectionExpr xi = SectionExpr::basis(2, 0, 0);
  CHECK(anchor_apply(spec, xi, P("5", 0)).is_zero());
}

TEST_CASE("anchor_apply on the Poisson x0 algebroid") {
  auto spec = poisson_x0();
  CHECK(anchor_apply(spec, SectionExpr::basis(2, 2, 0), P("x1", 2)) == P("x0", 2));
}

TEST_CASE("section_bracket basics") {
  auto spec = make_tangent(1);
  // [x0 e0, e0] = -e0 on the tangent line
  SectionExpr lhs = section_bracket(spec, section(spec, {"x0"}), section(spec, {"1"}));
  CHECK(lhs.components[0] == P("-1", 1));

  // vector-field algebroid: [f, g] = f a(e0)g - g a(e0)f
  auto lx = make_vector_field({P("x0^2", 2), P("x1", 2)});
  SectionExpr f = section(lx, {"x0"});
  SectionExpr g = section(lx, {"x1^2"});
  SectionExpr br = section_bracket(lx, f, g);
  Polynomial expect = P("x0", 2) * anchor_apply(lx, SectionExpr::basis(1, 2, 0), P("x1^2", 2)) -
                      P("x1^2", 2) * anchor_apply(lx, SectionExpr::basis(1, 2, 0), P("x0", 2));
  CHECK(br.components[0] == expect);
}

TEST_CASE("bracket of basis sections returns the structure functions") {
  auto spec = poisson_x0();
  SectionExpr br = section_bracket(spec, SectionExpr::basis(2, 2, 0), SectionExpr::basis(2, 2, 1));
  CHECK(br.components[0] == P("1", 2));  // [dx0, dx1] = d(x0) = e0
  CHECK(br.components[1].is_zero());
}

TEST_CASE("validate_algebroid accepts the gallery constructions") {
  CHECK(validate_algebroid(make_tangent(2)).valid());
  CHECK(validate_algebroid(poisson_x0()).valid());
}

TEST_CASE("validate_algebroid pinpoints the Jacobi residual e2 on (0,1,2)") {
  auto report = validate_algebroid(broken_r3());
  REQUIRE_FALSE(report.valid());
  bool found = false;
  for (const auto& issue : report.issues) {
    if (issue.condition != "jacobi") continue;
    REQUIRE(issue.indices.size() == 4);
    CHECK(issue.indices[0] == 0);
    CHECK(issue.indices[1] == 1);
    CHECK(issue.indices[2] == 2);
    // residual is exactly +1 on the e2 component and nothing else
    if (issue.indices[3] == 2) {
      CHECK(issue.residual == P("1", 0));
      found = true;
    } else {
      CHECK(issue.residual.is_zero());
    }
  }
  CHECK(found);
}

TEST_CASE("anchor morphism violation is reported") {
  // identity anchor but nonzero bracket: a([e0,e1]) = e0-row, commutator = 0
  AlgebroidSpec spec(2, 2);
  spec.set_anchor(0, 0, P("1", 2));
  spec.set_anchor(1, 1, P("1", 2));
  spec.set_bracket(0, 1, {P("1", 2), P("0", 2)});
  auto report = validate_algebroid(spec);
  REQUIRE_FALSE(report.valid());
  CHECK(report.issues[0].condition == "anchor_morphism");
}

TEST_CASE("poisson constructor matches the derived anchor and bracket") {
  auto spec = poisson_x0();
  CHECK(spec.anchor(0, 0).is_zero());
  CHECK(spec.anchor(0, 1) == P("x0", 2));
  CHECK(spec.anchor(1, 0) == P("-x0", 2));
  CHECK(spec.anchor(1, 1).is_zero());
  auto c = spec.structure(0, 1);
  CHECK(c[0] == P("1", 2));
  CHECK(c[1].is_zero());
}

TEST_CASE("poisson defining property [df,dg] = d{f,g}") {
  auto spec = poisson_x0();
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    RandomSource rs(derive_seed(31, trial));
    Polynomial f = rs.poly(2, 3, 4);
    Polynomial g = rs.poly(2, 3, 4);
    SectionExpr df = SectionExpr::zero(2, 2), dg = SectionExpr::zero(2, 2);
    for (std::size_t i = 0; i < 2; ++i) {
      df.components[i] = f.partial(i);
      dg.components[i] = g.partial(i);
    }
    // {f, g} = pi(df, dg) = x0 (d0 f d1 g - d1 f d0 g)
    Polynomial pb = P("x0", 2) * (f.partial(0) * g.partial(1) - f.partial(1) * g.partial(0));
    SectionExpr lhs = section_bracket(spec, df, dg);
    for (std::size_t i = 0; i < 2; ++i) CHECK(lhs.components[i] == pb.partial(i));
  }
}

TEST_CASE("poisson constructor rejects non-Poisson bivectors in n >= 3") {
  // pi(dx0,dx1) = x1, pi(dx1,dx2) = 1: the Jacobiator of {.,.} on
  // (x0,x1,x2) equals -1, so Schouten fails.
  std::vector<std::vector<Polynomial>> pi(3, std::vector<Polynomial>(3, Polynomial::zero(3)));
  pi[0][1] = P("x1", 3);
  pi[1][0] = P("-x1", 3);
  pi[1][2] = P("1", 3);
  pi[2][1] = P("-1", 3);
  CHECK_THROWS_AS(make_poisson(pi, 3), construct_error);

  // the rotational bivector pi = x2 dx0^dx1 + x0 dx1^dx2 + x1 dx2^dx0 is Poisson
  std::vector<std::vector<Polynomial>> so3(3, std::vector<Polynomial>(3, Polynomial::zero(3)));
  so3[0][1] = P("x2", 3);
  so3[1][0] = P("-x2", 3);
  so3[1][2] = P("x0", 3);
  so3[2][1] = P("-x0", 3);
  so3[2][0] = P("x1", 3);
  so3[0][2] = P("-x1", 3);
  CHECK(validate_algebroid(make_poisson(so3, 3)).valid());
}

TEST_CASE("nijenhuis deformation by a constant diagonal") {
  auto base = make_tangent(2);
  std::vector<std::vector<Polynomial>> N(2, std::vector<Polynomial>(2, Polynomial::zero(2)));
  N[0][0] = P("1", 2);
  N[1][1] = P("2", 2);
  auto spec = make_nijenhuis(base, N);
  CHECK(validate_algebroid(spec).valid());
  CHECK(spec.anchor(0, 0) == P("1", 2));
  CHECK(spec.anchor(1, 1) == P("2", 2));
  CHECK(spec.brackets().empty());
}

TEST_CASE("nijenhuis torsion failure is rejected") {
  // N(e0) = x1 e0, N(e1) = e1 on tangent R^2 has nonvanishing torsion.
  auto base = make_tangent(2);
  std::vector<std::vector<Polynomial>> N(2, std::vector<Polynomial>(2, Polynomial::zero(2)));
  N[0][0] = P("x1", 2);
  N[1][1] = P("1", 2);
  CHECK_THROWS_AS(make_nijenhuis(base, N), construct_error);
}

TEST_CASE("action algebroid of aff(1) acting on the line") {
  // [e0, e1] = -e1 with zeta(e0) = x0 d0, zeta(e1) = d0 is a homomorphism:
  // [x0 d0, d0] = -d0 = zeta([e0, e1]).
  auto algebra = make_lie_algebra(2, {{{0, 1}, {Rational(0), Rational(-1)}}});
  std::vector<std::vector<Polynomial>> zeta = {{P("x0", 1)}, {P("1", 1)}};
  auto spec = make_action(algebra, zeta, 1);
  CHECK(validate_algebroid(spec).valid());
  CHECK(spec.anchor(0, 0) == P("x0", 1));
  CHECK(spec.anchor(1, 0) == P("1", 1));
  auto c = spec.structure(0, 1);
  CHECK(c[0].is_zero());
  CHECK(c[1] == P("-1", 1));

  // flipping the bracket sign makes zeta an anti-homomorphism: rejected
  auto wrong = make_lie_algebra(2, {{{0, 1}, {Rational(0), Rational(1)}}});
  CHECK_THROWS_AS(make_action(wrong, zeta, 1), construct_error);
}

TEST_CASE("two-form and trivial-product constructors validate") {
  // closed (constant) 2-form on R^2
  std::vector<std::vector<Polynomial>> w(2, std::vector<Polynomial>(2, Polynomial::zero(2)));
  w[0][1] = P("3", 2);
  w[1][0] = P("-3", 2);
  auto lw = make_two_form(w, 2);
  CHECK(validate_algebroid(lw).valid());
  CHECK(lw.rank() == 3);
  auto c = lw.structure(0, 1);
  CHECK(c[2] == P("3", 2));

  // non-closed omega on R^3 is rejected
  std::vector<std::vector<Polynomial>> bad(3, std::vector<Polynomial>(3, Polynomial::zero(3)));
  bad[0][1] = P("x2^2", 3);
  bad[1][0] = P("-x2^2", 3);
  CHECK_THROWS_AS(make_two_form(bad, 3), construct_error);

  auto heis = make_lie_algebra(
      3, {{{0, 1}, {Rational(0), Rational(0), Rational(1)}}});
  auto triv = make_trivial_product(2, heis);
  CHECK(validate_algebroid(triv).valid());
  CHECK(triv.rank() == 5);
}

TEST_CASE("section_bracket properties on random sections") {
  auto specs = std::vector<AlgebroidSpec>{make_tangent(2), poisson_x0()};
  for (const auto& spec : specs) {
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
      RandomSource rs(derive_seed(77, trial));
      SectionExpr xi = rs.section(spec, 3);
      SectionExpr eta = rs.section(spec, 3);
      SectionExpr zeta = rs.section(spec, 3);
      Polynomial f = rs.poly(spec.num_vars(), 3, 2);

      // antisymmetry
      CHECK((section_bracket(spec, xi, eta) + section_bracket(spec, eta, xi)).is_zero());

      // Leibniz: [xi, f eta] = f [xi, eta] + (a(xi) f) eta
      SectionExpr lhs = section_bracket(spec, xi, eta * f);
      SectionExpr rhs = section_bracket(spec, xi, eta) * f + eta * anchor_apply(spec, xi, f);
      CHECK((lhs - rhs).is_zero());

      // anchor morphism at section level
      auto av = anchor_vector_field(spec, section_bracket(spec, xi, eta));
      auto ax = anchor_vector_field(spec, xi);
      auto ae = anchor_vector_field(spec, eta);
      for (std::size_t col = 0; col < spec.num_vars(); ++col) {
        Polynomial comm = Polynomial::zero(spec.num_vars());
        for (std::size_t l = 0; l < spec.num_vars(); ++l)
          comm += ax[l] * ae[col].partial(l) - ae[l] * ax[col].partial(l);
        CHECK(av[col] == comm);
      }

      // Jacobi identity for sections
      SectionExpr jac = section_bracket(spec, xi, section_bracket(spec, eta, zeta)) +
                        section_bracket(spec, eta, section_bracket(spec, zeta, xi)) +
                        section_bracket(spec, zeta, section_bracket(spec, xi, eta));
      CHECK(jac.is_zero());
    }
  }
}

TEST_CASE("ellipticity check") {
  auto tangent = make_tangent(2);
  auto res = ellipticity_check(tangent, {}, 5);
  CHECK(res.elliptic_at_samples);
  CHECK(res.certified_everywhere);

  auto algebra = make_lie_algebra(2, {});
  CHECK(ellipticity_check(algebra, {}, 5).elliptic_at_samples);
  CHECK(ellipticity_check(algebra, {}, 5).certified_everywhere);

  auto poisson = poisson_x0();
  std::vector<std::vector<Rational>> pts = {{Rational(1), Rational(1)},
                                            {Rational(0), Rational(0)}};
  auto pres = ellipticity_check(poisson, pts, 5);
  CHECK_FALSE(pres.elliptic_at_samples);
  REQUIRE(pres.witness.has_value());
  CHECK((*pres.witness)[0].is_zero());
  CHECK((*pres.witness)[1].is_zero());
  CHECK_FALSE(pres.certified_everywhere);

  // rank-1 over R^2 can never be elliptic
  auto lx = make_vector_field({P("1", 2), P("0", 2)});
  CHECK_FALSE(ellipticity_check(lx, {}, 5).elliptic_at_samples);
}

TEST_CASE("kernel_of_dL") {
  auto t1 = make_tangent(1);
  auto basis = kernel_of_dL(t1, 3);
  REQUIRE(basis.size() == 1);
  CHECK(basis[0].is_constant());

  auto algebra = make_lie_algebra(2, {});
  basis = kernel_of_dL(algebra, 2);
  REQUIRE(basis.size() == 1);
  CHECK(basis[0].is_constant());

  // L_X with X = d0 on R^2: functions of x1 only, degree <= 2
  auto lx = make_vector_field({P("1", 2), P("0", 2)});
  basis = kernel_of_dL(lx, 2);
  REQUIRE(basis.size() == 3);
  for (const auto& f : basis) {
    CHECK(anchor_apply(lx, SectionExpr::basis(1, 2, 0), f).is_zero());
    CHECK(f.total_degree() <= 2);
  }
}
