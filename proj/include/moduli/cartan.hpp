#ifndef MODULI_CARTAN_HPP
#define MODULI_CARTAN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "moduli/algebroid.hpp"
#include "moduli/lform.hpp"

namespace moduli {

/// Wedge product. Computed as the signed sum over shuffles of increasing
/// tuples, so wedges of basis covectors have coefficient 1. Values multiply
/// as matrices; a scalar (1x1) factor on either side broadcasts. Degrees
/// beyond the rank give the zero form.
LForm wedge(const LForm& omega, const LForm& tau);

/// Graded bracket [omega, tau] = omega ^ tau - (-1)^{pq} tau ^ omega on
/// square-matrix-valued forms.
LForm graded_bracket(const LForm& omega, const LForm& tau);

/// Lie algebroid differential, applied entrywise to matrix values (this is
/// the covariant derivative of the canonical flat connection when the value
/// dimension exceeds 1).
LForm d_L(const AlgebroidSpec& spec, const LForm& omega);

/// Insertion operator (i_xi omega)(xi_1,...) = omega(xi, xi_1, ...).
LForm insert(const AlgebroidSpec& spec, const SectionExpr& xi, const LForm& omega);

/// Lie derivative along a section.
LForm lie_derivative(const AlgebroidSpec& spec, const SectionExpr& xi, const LForm& omega);

enum class ValuedIn { E, EndE };

/// Covariant exterior derivative of nabla_0 + mu(alpha): entrywise d_L plus
/// alpha ^ omega (column-vector values) resp. [alpha, omega] (endomorphism
/// values).
LForm covariant_d(const AlgebroidSpec& spec, const ConnectionForm& A, const LForm& omega,
                  ValuedIn valued_in);

/// Curvature R = d_L alpha + alpha ^ alpha of nabla_0 + mu(alpha).
LForm curvature(const AlgebroidSpec& spec, const ConnectionForm& A);

/// Covariant derivative of the curvature; identically zero by the Bianchi
/// identity, returned so callers can assert it.
LForm bianchi_check(const AlgebroidSpec& spec, const ConnectionForm& A);

/// Gauge action on connection forms:
/// alpha^phi = phi^{-1} (d_L phi) + phi^{-1} alpha phi.
ConnectionForm gauge_transform(const AlgebroidSpec& spec, const ConnectionForm& A,
                               const GaugeMap& phi);

struct IdentityCheck {
  std::string name;
  std::size_t trials = 0;
  bool pass = true;
  std::string first_failure;  // empty when pass
};

struct SuiteReport {
  std::vector<IdentityCheck> checks;
  bool all_pass() const;
  std::size_t passed() const;
};

/// Runs the graded Cartan identities (insertion/Lie-derivative laws and the
/// differential laws; nine in total) on random forms and sections with
/// coefficient degree <= max_degree. Residuals must be the literal zero
/// polynomial. Per-trial seeds derive deterministically from (seed, trial).
SuiteReport cartan_identity_suite(const AlgebroidSpec& spec, std::size_t trials,
                                  std::uint64_t seed, std::size_t max_degree);

/// Connection-level identities on a rank-`dim` trivial bundle: flatness of
/// the reference connection, the two covariant Leibniz laws, the square of
/// the covariant derivative against the curvature, the Bianchi identity and
/// gauge covariance of the curvature.
SuiteReport connection_identity_suite(const AlgebroidSpec& spec, std::size_t dim,
                                      std::size_t trials, std::uint64_t seed,
                                      std::size_t max_degree);

}  // namespace moduli

#endif
