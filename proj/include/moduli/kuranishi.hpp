#ifndef MODULI_KURANISHI_HPP
#define MODULI_KURANISHI_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "moduli/deformation.hpp"

namespace moduli {

/// Fixed-point inversion left the contraction ball without converging.
class no_convergence : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SolverParams {
  double radius = 0;  // 0 = derive from the contraction estimate
  std::size_t max_iter = 200;
  double tol_fix = 1e-12;
  double rank_tolerance = 1e-9;
};

/// Local model of the moduli space at a flat connection: Hodge data plus the
/// quadratic correction operator of the Kuranishi map. Read-only once built.
template <typename Scalar>
struct KuranishiModel {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  DeformationComplex<Scalar> complex;
  HodgeData<Scalar> hodge;
  Mat quad;  // delta_1 G_2 : C^2 -> C^1
  double radius = 0;
  std::size_t max_iter = 200;
  double tol_fix = 1e-12;

  const Mat& h1_basis() const { return hodge.harmonic_basis[1]; }
  const Mat& h2_basis() const { return hodge.harmonic_basis.size() > 2 ? hodge.harmonic_basis[2] : empty_; }
  std::size_t h1_dim() const { return hodge.h_dims[1]; }
  std::size_t h2_dim() const { return hodge.h_dims.size() > 2 ? hodge.h_dims[2] : 0; }

private:
  static const Mat empty_;
};

template <typename Scalar>
KuranishiModel<Scalar> build_model(const RepSpec& rep, const SolverParams& params = {});

/// Graded bracket C^1 x C^1 -> C^2 in coordinates:
/// [x, y](e_i, e_j) = [X_i, Y_j] - [X_j, Y_i].
template <typename Scalar>
typename KuranishiModel<Scalar>::Vec bracket_c1(const DeformationComplex<Scalar>& complex,
                                                const typename KuranishiModel<Scalar>::Vec& x,
                                                const typename KuranishiModel<Scalar>::Vec& y);

/// Maurer-Cartan residual d_1 beta + 1/2 [beta, beta].
template <typename Scalar>
typename KuranishiModel<Scalar>::Vec mc_residual(const DeformationComplex<Scalar>& complex,
                                                 const typename KuranishiModel<Scalar>::Vec& beta);

/// K(beta) = beta + 1/2 (delta_1 G_2)([beta, beta]).
template <typename Scalar>
typename KuranishiModel<Scalar>::Vec kuranishi_map(const KuranishiModel<Scalar>& model,
                                                   const typename KuranishiModel<Scalar>::Vec& beta);

/// Inverse of the Kuranishi map by fixed-point iteration from 0; requires
/// |gamma| < radius, throws no_convergence otherwise.
template <typename Scalar>
typename KuranishiModel<Scalar>::Vec kuranishi_invert(
    const KuranishiModel<Scalar>& model, const typename KuranishiModel<Scalar>::Vec& gamma);

/// Obstruction of a harmonic deformation direction:
/// Phi(gamma) = 1/2 H_2([F(gamma), F(gamma)]), returned as a full C^2 vector
/// (lying in the harmonic subspace).
template <typename Scalar>
typename KuranishiModel<Scalar>::Vec obstruction(const KuranishiModel<Scalar>& model,
                                                 const typename KuranishiModel<Scalar>::Vec& gamma);

/// Independent brute-force solver for the gauge-fixed Maurer-Cartan system
/// {d_1 beta + 1/2[beta,beta] = 0, delta_0 beta = 0} by damped Gauss-Newton
/// from random seeds of norm <= seed_scale. Returns every converged solution
/// with stacked residual <= tol; non-convergent seeds are dropped.
template <typename Scalar>
std::vector<typename KuranishiModel<Scalar>::Vec> mc_slice_solve_bruteforce(
    const DeformationComplex<Scalar>& complex, std::size_t seeds, double tol,
    std::uint64_t rng_seed, double seed_scale);

/// Zeros of the obstruction map inside the ball, found by damped
/// Gauss-Newton on harmonic coordinates; trivially every sample when the
/// obstruction space is zero.
template <typename Scalar>
std::vector<typename KuranishiModel<Scalar>::Vec> sample_obstruction_zeros(
    const KuranishiModel<Scalar>& model, std::size_t count, double tol, std::uint64_t rng_seed);

/// Residual of the gauge-orbit tangent: |(alpha^phi(t) - alpha)/t - d_0 gamma|
/// for phi(t) = id + t gamma. Throws on singular phi(t).
template <typename Scalar>
double gauge_orbit_residual(const RepSpec& rep, const DeformationComplex<Scalar>& complex,
                            const typename KuranishiModel<Scalar>::Vec& gamma0, double t);

/// Splits x in C^1 as d_0 u + v with delta_0 v = 0 by least squares and
/// returns |delta_0 v|.
template <typename Scalar>
double slice_decomposition_residual(const DeformationComplex<Scalar>& complex,
                                    const typename KuranishiModel<Scalar>::Vec& x);

// ---- assembled report -------------------------------------------------------

struct ReportParams {
  std::size_t n_samples = 200;
  double sample_tol = 1e-2;
  SolverParams solver;
  std::uint64_t seed = 1;
};

struct ModuliReport {
  std::vector<std::size_t> h_dims;
  long index = 0;
  bool irreducible = false;
  std::size_t commutant_dim = 0;
  bool smooth = false;
  std::optional<std::size_t> expected_local_dim;  // set when smooth
  bool obstruction_vanishes = false;
  bool complex_scalars = false;
  /// quadratic_form[c][a][b] = <h2_c, 1/2 [h1_a, h1_b]> on harmonic bases.
  std::vector<std::vector<std::vector<std::complex<double>>>> quadratic_form;
  std::optional<double> zero_fraction;  // absent when n_samples == 0
  double max_phi_norm = 0;              // largest |Phi| seen over the samples
  std::size_t n_samples = 0;
  std::size_t n_converged = 0;
  double sample_tol = 0;
  double radius = 0;
  std::size_t max_iter = 0;
  double tol_fix = 0;
  std::uint64_t seed = 0;
};

/// Builds the model and assembles the local-model report; dispatches on the
/// scalar field of the representation.
ModuliReport local_model_report(const RepSpec& rep, const ReportParams& params = {});

}  // namespace moduli

#endif
