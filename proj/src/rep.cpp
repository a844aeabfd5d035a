#include "moduli/rep.hpp"

#include <cmath>
#include <sstream>

namespace moduli {

RepSpec::RepSpec(AlgebroidSpec alg, std::size_t m, ScalarField field)
    : algebra(std::move(alg)), dim_v(m), scalar_field(field) {
  if (algebra.num_vars() != 0)
    throw std::invalid_argument("RepSpec: the algebra must live over a one-point base");
  if (m == 0) throw std::invalid_argument("RepSpec: dim_V must be >= 1");
  rho.assign(algebra.rank(), ExactMatrix<GaussianRational>(m, m));
}

Rational RepSpec::structure_constant(std::size_t i, std::size_t j, std::size_t l) const {
  return algebra.structure(i, j)[l].constant_value();
}

RepValidationReport validate_rep(const RepSpec& rep) {
  RepValidationReport report;
  report.algebra_valid = validate_algebroid(rep.algebra).valid();
  const std::size_t r = rep.rank();
  const std::size_t m = rep.dim_v;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      ExactMatrix<GaussianRational> res = rep.rho[i] * rep.rho[j];
      ExactMatrix<GaussianRational> ji = rep.rho[j] * rep.rho[i];
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
          res(a, b) -= ji(a, b);
          for (std::size_t l = 0; l < r; ++l) {
            Rational c = rep.structure_constant(i, j, l);
            if (c.is_zero()) continue;
            res(a, b) -= GaussianRational(c) * rep.rho[l](a, b);
          }
        }
      if (!res.is_zero()) {
        double norm2 = 0;
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = 0; b < m; ++b) {
            double re = res(a, b).re.to_double();
            double im = res(a, b).im.to_double();
            norm2 += re * re + im * im;
          }
        report.issues.push_back({i, j, std::sqrt(norm2)});
      }
    }
  }
  return report;
}

std::string RepValidationReport::summary() const {
  if (valid()) return "valid";
  std::ostringstream os;
  if (!algebra_valid) os << "underlying algebra fails the Jacobi identity\n";
  for (const auto& issue : issues)
    os << "flatness fails at (" << issue.i << "," << issue.j << "): residual norm "
       << issue.residual_norm << "\n";
  return os.str();
}

RepSpec make_trivial_rep(std::size_t rank, std::size_t dim_v, ScalarField field) {
  RepSpec rep(make_lie_algebra(rank, {}), dim_v, field);
  return rep;
}

RepSpec make_sl2_standard() {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Rational>> br;
  br[{0, 1}] = {Rational(0), Rational(2), Rational(0)};
  br[{0, 2}] = {Rational(0), Rational(0), Rational(-2)};
  br[{1, 2}] = {Rational(1), Rational(0), Rational(0)};
  RepSpec rep(make_lie_algebra(3, br), 2, ScalarField::Real);
  rep.rho[0](0, 0) = GaussianRational(Rational(1));
  rep.rho[0](1, 1) = GaussianRational(Rational(-1));
  rep.rho[1](0, 1) = GaussianRational(Rational(1));
  rep.rho[2](1, 0) = GaussianRational(Rational(1));
  return rep;
}

RepSpec make_heisenberg_trivial() {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Rational>> br;
  br[{0, 1}] = {Rational(0), Rational(0), Rational(1)};
  return RepSpec(make_lie_algebra(3, br), 1, ScalarField::Real);
}

RepSpec make_heisenberg_adjoint() {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Rational>> br;
  br[{0, 1}] = {Rational(0), Rational(0), Rational(1)};
  RepSpec rep(make_lie_algebra(3, br), 3, ScalarField::Real);
  // ad(e0): e1 -> e2;  ad(e1): e0 -> -e2;  ad(e2) = 0.
  rep.rho[0](2, 1) = GaussianRational(Rational(1));
  rep.rho[1](2, 0) = GaussianRational(Rational(-1));
  return rep;
}

}  // namespace moduli
