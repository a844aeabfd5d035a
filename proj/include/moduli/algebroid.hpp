#ifndef MODULI_ALGEBROID_HPP
#define MODULI_ALGEBROID_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "moduli/polynomial.hpp"

namespace moduli {

/// Thrown when an example constructor rejects its parameters (failed
/// torsion / cocycle / homomorphism precondition); the message carries the
/// offending residual.
class construct_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Section of a rank-r algebroid, xi = sum_i components[i] * e_i.
struct SectionExpr {
  std::vector<Polynomial> components;

  static SectionExpr basis(std::size_t rank, std::size_t num_vars, std::size_t i);
  static SectionExpr zero(std::size_t rank, std::size_t num_vars);

  SectionExpr operator+(const SectionExpr& o) const;
  SectionExpr operator-(const SectionExpr& o) const;
  SectionExpr operator*(const Polynomial& f) const;
  SectionExpr operator*(const Rational& c) const;
  bool is_zero() const;
  bool operator==(const SectionExpr& o) const { return components == o.components; }
};

/// Rank-r Lie algebroid over R^n with polynomial anchor and bracket data.
///
/// Row i of the anchor gives a(e_i) = sum_j anchor[i][j] d/dx_j. Bracket
/// structure functions are stored for i<j only; antisymmetry is recovered by
/// sign, and c^k_{ii} is identically zero by construction.
class AlgebroidSpec {
public:
  AlgebroidSpec(std::size_t num_vars, std::size_t rank);

  std::size_t num_vars() const { return num_vars_; }
  std::size_t rank() const { return rank_; }

  const Polynomial& anchor(std::size_t i, std::size_t j) const { return anchor_[i][j]; }
  void set_anchor(std::size_t i, std::size_t j, Polynomial p);
  /// a(e_i) as a vector field (n polynomial components).
  const std::vector<Polynomial>& anchor_row(std::size_t i) const { return anchor_[i]; }

  /// Sets [e_i, e_j] = sum_k coeffs[k] e_k for i < j.
  void set_bracket(std::size_t i, std::size_t j, std::vector<Polynomial> coeffs);
  /// Structure functions of [e_i, e_j] for arbitrary i, j (sign handled).
  std::vector<Polynomial> structure(std::size_t i, std::size_t j) const;

  const std::map<std::pair<std::size_t, std::size_t>, std::vector<Polynomial>>& brackets() const {
    return bracket_;
  }

private:
  std::size_t num_vars_, rank_;
  std::vector<std::vector<Polynomial>> anchor_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Polynomial>> bracket_;
};

struct ValidationIssue {
  std::string condition;            // "anchor_morphism" or "jacobi"
  std::vector<std::size_t> indices; // (i,j) resp. (i,j,k,m)
  Polynomial residual;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool valid() const { return issues.empty(); }
  std::string summary() const;
};

/// a(xi) f = sum_i xi_i sum_j anchor[i][j] df/dx_j, exact.
Polynomial anchor_apply(const AlgebroidSpec& spec, const SectionExpr& xi, const Polynomial& f);

/// a(xi) as a polynomial vector field (n components).
std::vector<Polynomial> anchor_vector_field(const AlgebroidSpec& spec, const SectionExpr& xi);

/// Leibniz-extended bracket of two sections.
SectionExpr section_bracket(const AlgebroidSpec& spec, const SectionExpr& xi,
                            const SectionExpr& eta);

/// Checks (A) the anchor is a bracket morphism and (B) the Jacobi identity,
/// both as exact polynomial identities. Failures are report entries with the
/// offending index tuple and residual, never exceptions.
ValidationReport validate_algebroid(const AlgebroidSpec& spec);

// ---- example constructors ------------------------------------------------
// Each returned spec passes validate_algebroid; bad parameters throw
// construct_error carrying the first nonzero residual.

/// Tangent algebroid of R^n: identity anchor, zero brackets.
AlgebroidSpec make_tangent(std::size_t n);

/// Lie algebra (one-point base): zero anchor, constant structure functions.
/// brackets[{i,j}] (i<j) lists the r coefficients of [e_i,e_j].
AlgebroidSpec make_lie_algebra(
    std::size_t rank,
    const std::map<std::pair<std::size_t, std::size_t>, std::vector<Rational>>& brackets);

/// Rank-1 algebroid of the vector field X = sum_j X[j] d/dx_j on R^n.
AlgebroidSpec make_vector_field(const std::vector<Polynomial>& X);

/// Action algebroid of a Lie algebra acting by polynomial vector fields;
/// zeta[i] lists the n components of the fundamental field of e_i. The map
/// e_i -> zeta[i] must be a Lie algebra homomorphism (checked).
AlgebroidSpec make_action(const AlgebroidSpec& algebra,
                          const std::vector<std::vector<Polynomial>>& zeta, std::size_t n);

/// Extension TM + R by a closed 2-form, omega[i][j] antisymmetric (checked
/// closed); rank n+1 over R^n, last basis vector spans the trivial line.
AlgebroidSpec make_two_form(const std::vector<std::vector<Polynomial>>& omega, std::size_t n);

/// Cotangent algebroid of a Poisson bivector, pi[i][j] = pi(dx_i, dx_j)
/// antisymmetric; the Schouten identity is checked for n >= 3.
AlgebroidSpec make_poisson(const std::vector<std::vector<Polynomial>>& pi, std::size_t n);

/// Deformation of a validated base spec by a Nijenhuis tensor N (vanishing
/// torsion checked); N[i] lists the coefficients of N(e_i) in the basis.
AlgebroidSpec make_nijenhuis(const AlgebroidSpec& base,
                             const std::vector<std::vector<Polynomial>>& N);

/// Trivial algebroid TM + (M x g) for a Lie algebra g over R^n.
AlgebroidSpec make_trivial_product(std::size_t n, const AlgebroidSpec& algebra);

// ---- pointwise anchor rank -----------------------------------------------

struct EllipticityResult {
  bool elliptic_at_samples = true;
  std::optional<std::vector<Rational>> witness;  // first failing sample
  /// True when some n x n minor of the anchor has a constant nonzero
  /// determinant: a sufficient certificate valid at every point of R^n.
  bool certified_everywhere = false;
};

/// Tests whether the anchor has full rank n at each sample point (exact
/// rational ranks); when sample_points is empty, `seed` generates 16 random
/// small-rational points. Vacuously true for n = 0.
EllipticityResult ellipticity_check(const AlgebroidSpec& spec,
                                    const std::vector<std::vector<Rational>>& sample_points,
                                    std::uint64_t seed);

/// Basis of {f : total degree <= max_degree, a(e_i) f = 0 for all i},
/// computed by an exact linear solve on the coefficient space. Always
/// contains the constants; when the anchor is not pointwise surjective the
/// kernel is generally larger (this is a degree-truncated computation over
/// R^n, not a compactness argument).
std::vector<Polynomial> kernel_of_dL(const AlgebroidSpec& spec, std::size_t max_degree);

/// All monomials in n variables of total degree <= d, in increasing
/// lexicographic order.
std::vector<Monomial> monomials_up_to_degree(std::size_t n, std::size_t d);

}  // namespace moduli

#endif
