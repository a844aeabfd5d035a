#ifndef MODULI_DEFORMATION_HPP
#define MODULI_DEFORMATION_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "moduli/lform.hpp"
#include "moduli/rep.hpp"

namespace moduli {

/// The deformation complex of a flat connection over a point, in the basis
/// {increasing k-tuple x elementary matrix}: coordinate index of (T, a, b)
/// is tuple_index(T) * m^2 + a*m + b, tuples enumerated lexicographically.
template <typename Scalar>
struct DeformationComplex {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  std::size_t rank = 0;
  std::size_t dim_v = 0;
  std::vector<std::size_t> dims;                // C(r,k) m^2 for k = 0..r
  std::vector<std::vector<IndexTuple>> tuples;  // per degree
  std::vector<Mat> d;                           // d[k]: C^k -> C^{k+1}, k = 0..r-1

  std::size_t tuple_index(std::size_t k, const IndexTuple& t) const;
};

/// Hodge package of the complex under the orthonormal-basis inner products:
/// adjoints are conjugate transposes, Laplacians are PSD, Green operators
/// invert the Laplacian off the harmonic space.
template <typename Scalar>
struct HodgeData {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  double rank_tolerance = 1e-9;
  std::vector<Mat> delta;               // delta[k]: C^{k+1} -> C^k (adjoint of d[k])
  std::vector<Mat> laplacian;           // per degree
  std::vector<Mat> harmonic_projector;  // H_k
  std::vector<Mat> green;               // G_k, zero on the harmonic space
  std::vector<Mat> harmonic_basis;      // orthonormal columns spanning ker Delta_k
  std::vector<std::size_t> h_dims;
};

/// Builds the differentials exactly from the rational data, verifies
/// d_{k+1} d_k = 0 as an exact identity, and converts to floating point.
/// Throws std::invalid_argument if the representation is not flat.
template <typename Scalar>
DeformationComplex<Scalar> build_complex(const RepSpec& rep);

template <typename Scalar>
HodgeData<Scalar> hodge(const DeformationComplex<Scalar>& complex, double rank_tolerance = 1e-9);

/// dim H^k for k = 0..r (dispatches on the scalar field of the rep).
std::vector<std::size_t> cohomology_dims(const RepSpec& rep, double rank_tolerance = 1e-9);

/// Alternating sum of cohomology dimensions; equals the Euler characteristic
/// of the cochain spaces, hence 0 for every rank >= 1.
long rep_index(const RepSpec& rep, double rank_tolerance = 1e-9);

struct IrreducibilityResult {
  bool irreducible = false;
  std::size_t commutant_dim = 0;
};

/// The commutant is ker d_0; irreducible means it is exactly the scalars.
IrreducibilityResult irreducibility_test(const RepSpec& rep, double rank_tolerance = 1e-9);

}  // namespace moduli

#endif
