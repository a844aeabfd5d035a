#ifndef MODULI_REP_HPP
#define MODULI_REP_HPP

#include <string>
#include <vector>

#include "moduli/algebroid.hpp"
#include "moduli/qlinalg.hpp"

namespace moduli {

enum class ScalarField { Real, Complex };

/// Lie algebra representation = flat connection over a one-point base.
/// Entries of rho are exact (Gaussian) rationals so flatness is decidable,
/// not approximate.
struct RepSpec {
  AlgebroidSpec algebra;  // num_vars == 0
  std::size_t dim_v = 0;
  ScalarField scalar_field = ScalarField::Real;
  std::vector<ExactMatrix<GaussianRational>> rho;  // rho[i] is dim_v x dim_v

  RepSpec(AlgebroidSpec alg, std::size_t m, ScalarField field);

  std::size_t rank() const { return algebra.rank(); }
  /// Structure constant c^l_{ij} of the underlying algebra.
  Rational structure_constant(std::size_t i, std::size_t j, std::size_t l) const;
};

struct RepFlatnessIssue {
  std::size_t i, j;
  double residual_norm;  // Frobenius norm of [rho_i, rho_j] - rho([e_i,e_j])
};

struct RepValidationReport {
  std::vector<RepFlatnessIssue> issues;
  bool algebra_valid = true;
  bool valid() const { return algebra_valid && issues.empty(); }
  std::string summary() const;
};

/// Exact flatness check: [rho_i, rho_j] = rho([e_i, e_j]) for all i < j,
/// plus validation of the underlying algebra.
RepValidationReport validate_rep(const RepSpec& rep);

// ---- convenience constructors used by tests and the gallery ----------------

/// Abelian algebra of the given rank with all rho matrices zero.
RepSpec make_trivial_rep(std::size_t rank, std::size_t dim_v,
                         ScalarField field = ScalarField::Real);

/// sl2 with brackets [e0,e1]=2e1, [e0,e2]=-2e2, [e1,e2]=e0 and the standard
/// two-dimensional matrices.
RepSpec make_sl2_standard();

/// Heisenberg algebra [e0,e1]=e2 with the zero representation on dim_v = 1.
RepSpec make_heisenberg_trivial();

/// Heisenberg algebra acting on itself by the adjoint representation.
RepSpec make_heisenberg_adjoint();

}  // namespace moduli

#endif
