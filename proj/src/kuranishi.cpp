#include "moduli/kuranishi.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "moduli/random_gen.hpp"

namespace moduli {

namespace {

// |[x,y]| <= 2 sqrt(2) |x| |y| under the Frobenius-product norms.
constexpr double kBracketBound = 2.8284271247461903;

template <typename Scalar>
using MatT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// View of the i-th value matrix inside a C^k coordinate vector.
template <typename Scalar>
MatT<Scalar> block_matrix(const VecT<Scalar>& v, std::size_t index, std::size_t m) {
  MatT<Scalar> out(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      out(a, b) = v(static_cast<Eigen::Index>(index * m * m + a * m + b));
  return out;
}

template <typename Scalar>
void set_block(VecT<Scalar>& v, std::size_t index, const MatT<Scalar>& mat) {
  const std::size_t m = mat.rows();
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      v(static_cast<Eigen::Index>(index * m * m + a * m + b)) = mat(a, b);
}

template <typename Scalar>
MatT<Scalar> rho_matrix(const RepSpec& rep, std::size_t i) {
  const std::size_t m = rep.dim_v;
  MatT<Scalar> out(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      const GaussianRational& v = rep.rho[i](a, b);
      if constexpr (std::is_same_v<Scalar, double>)
        out(a, b) = v.re.to_double();
      else
        out(a, b) = Scalar(v.re.to_double(), v.im.to_double());
    }
  return out;
}

template <typename Scalar>
double operator_norm(const MatT<Scalar>& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<MatT<Scalar>> svd(m);
  return svd.singularValues()(0);
}

template <typename Scalar>
struct ScalarSampler {
  std::mt19937_64 rng;
  std::normal_distribution<double> gauss{0.0, 1.0};

  explicit ScalarSampler(std::uint64_t seed) : rng(seed) {}

  Scalar draw() {
    if constexpr (std::is_same_v<Scalar, double>)
      return gauss(rng);
    else
      return Scalar(gauss(rng), gauss(rng));
  }

  VecT<Scalar> vector(std::size_t n) {
    VecT<Scalar> v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = draw();
    return v;
  }

  double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }
};

}  // namespace

template <typename Scalar>
const typename KuranishiModel<Scalar>::Mat KuranishiModel<Scalar>::empty_ =
    KuranishiModel<Scalar>::Mat(0, 0);

template <typename Scalar>
typename KuranishiModel<Scalar>::Vec bracket_c1(const DeformationComplex<Scalar>& complex,
                                                const typename KuranishiModel<Scalar>::Vec& x,
                                                const typename KuranishiModel<Scalar>::Vec& y) {
  const std::size_t m = complex.dim_v;
  const auto& pairs = complex.tuples[2];
  VecT<Scalar> out = VecT<Scalar>::Zero(static_cast<Eigen::Index>(complex.dims[2]));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const std::size_t i = pairs[p][0];
    const std::size_t j = pairs[p][1];
    MatT<Scalar> xi = block_matrix<Scalar>(x, i, m), xj = block_matrix<Scalar>(x, j, m);
    MatT<Scalar> yi = block_matrix<Scalar>(y, i, m), yj = block_matrix<Scalar>(y, j, m);
    MatT<Scalar> value = xi * yj - yj * xi - (xj * yi - yi * xj);
    set_block(out, p, value);
  }
  return out;
}

template <typename Scalar>
typename KuranishiModel<Scalar>::Vec mc_residual(const DeformationComplex<Scalar>& complex,
                                                 const typename KuranishiModel<Scalar>::Vec& beta) {
  return complex.d[1] * beta + Scalar(0.5) * bracket_c1<Scalar>(complex, beta, beta);
}

template <typename Scalar>
KuranishiModel<Scalar> build_model(const RepSpec& rep, const SolverParams& params) {
  if (rep.rank() < 2)
    throw std::invalid_argument("build_model: the local model needs rank >= 2 (no 2-forms otherwise)");
  KuranishiModel<Scalar> model;
  model.complex = build_complex<Scalar>(rep);
  model.hodge = hodge(model.complex, params.rank_tolerance);
  model.quad = model.hodge.delta[1] * model.hodge.green[2];
  model.max_iter = params.max_iter;
  model.tol_fix = params.tol_fix;
  if (params.radius > 0) {
    model.radius = params.radius;
  } else {
    double denom = 4.0 * operator_norm<Scalar>(model.quad) * kBracketBound;
    // Purely quadratic-free models (quad = 0) have a globally defined inverse.
    model.radius = denom > 1e-14 ? 1.0 / denom : 1.0;
  }
  return model;
}

template <typename Scalar>
typename KuranishiModel<Scalar>::Vec kuranishi_map(const KuranishiModel<Scalar>& model,
                                                   const typename KuranishiModel<Scalar>::Vec& beta) {
  return beta + Scalar(0.5) * (model.quad * bracket_c1<Scalar>(model.complex, beta, beta));
}

template <typename Scalar>
typename KuranishiModel<Scalar>::Vec kuranishi_invert(
    const KuranishiModel<Scalar>& model, const typename KuranishiModel<Scalar>::Vec& gamma) {
  if (gamma.norm() >= model.radius)
    throw no_convergence("kuranishi_invert: |gamma| exceeds the contraction radius");
  VecT<Scalar> beta = VecT<Scalar>::Zero(gamma.size());
  for (std::size_t iter = 0; iter < model.max_iter; ++iter) {
    VecT<Scalar> next =
        gamma - Scalar(0.5) * (model.quad * bracket_c1<Scalar>(model.complex, beta, beta));
    double step = (next - beta).norm();
    beta = next;
    if (beta.norm() > 4.0 * model.radius)
      throw no_convergence("kuranishi_invert: iteration left the contraction ball");
    if (step <= model.tol_fix * std::max(1.0, gamma.norm())) return beta;
  }
  throw no_convergence("kuranishi_invert: no convergence within max_iter");
}

template <typename Scalar>
typename KuranishiModel<Scalar>::Vec obstruction(const KuranishiModel<Scalar>& model,
                                                 const typename KuranishiModel<Scalar>::Vec& gamma) {
  VecT<Scalar> beta = kuranishi_invert(model, gamma);
  return Scalar(0.5) *
         (model.hodge.harmonic_projector[2] * bracket_c1<Scalar>(model.complex, beta, beta));
}

// ---- damped Gauss-Newton oracle ---------------------------------------------

namespace {

// One Levenberg-Marquardt run on a residual function with analytic Jacobian.
template <typename Scalar, typename ResidualFn, typename JacobianFn>
bool lm_solve(VecT<Scalar>& state, const ResidualFn& residual, const JacobianFn& jacobian,
              double tol, std::size_t max_iter) {
  double lambda = 1e-3;
  VecT<Scalar> r = residual(state);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    if (r.norm() <= tol) return true;
    MatT<Scalar> J = jacobian(state);
    MatT<Scalar> JtJ = J.adjoint() * J;
    VecT<Scalar> g = J.adjoint() * r;
    bool accepted = false;
    for (int inner = 0; inner < 12; ++inner) {
      MatT<Scalar> A = JtJ;
      for (Eigen::Index i = 0; i < A.rows(); ++i) A(i, i) += Scalar(lambda);
      VecT<Scalar> step = A.ldlt().solve(-g);
      VecT<Scalar> candidate = state + step;
      VecT<Scalar> rc = residual(candidate);
      if (rc.norm() < r.norm()) {
        state = candidate;
        r = rc;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) return r.norm() <= tol;
  }
  return r.norm() <= tol;
}

}  // namespace

template <typename Scalar>
std::vector<typename KuranishiModel<Scalar>::Vec> mc_slice_solve_bruteforce(
    const DeformationComplex<Scalar>& complex, std::size_t seeds, double tol,
    std::uint64_t rng_seed, double seed_scale) {
  const std::size_t n1 = complex.dims[1];
  const std::size_t n2 = complex.dims[2];
  const std::size_t n0 = complex.dims[0];
  MatT<Scalar> delta0 = complex.d[0].adjoint();

  auto residual = [&](const VecT<Scalar>& beta) {
    VecT<Scalar> out(static_cast<Eigen::Index>(n2 + n0));
    out.head(static_cast<Eigen::Index>(n2)) = mc_residual<Scalar>(complex, beta);
    out.tail(static_cast<Eigen::Index>(n0)) = delta0 * beta;
    return out;
  };
  auto jacobian = [&](const VecT<Scalar>& beta) {
    MatT<Scalar> J(static_cast<Eigen::Index>(n2 + n0), static_cast<Eigen::Index>(n1));
    for (std::size_t c = 0; c < n1; ++c) {
      VecT<Scalar> e = VecT<Scalar>::Zero(static_cast<Eigen::Index>(n1));
      e(static_cast<Eigen::Index>(c)) = Scalar(1);
      J.col(static_cast<Eigen::Index>(c)).head(static_cast<Eigen::Index>(n2)) =
          complex.d[1] * e + bracket_c1<Scalar>(complex, beta, e);
      J.col(static_cast<Eigen::Index>(c)).tail(static_cast<Eigen::Index>(n0)) = delta0 * e;
    }
    return J;
  };

  std::vector<VecT<Scalar>> solutions;
  for (std::size_t s = 0; s < seeds; ++s) {
    ScalarSampler<Scalar> sampler(derive_seed(rng_seed, s));
    VecT<Scalar> beta = sampler.vector(n1);
    if (beta.norm() > 0) beta *= seed_scale * sampler.uniform01() / beta.norm();
    if (lm_solve<Scalar>(beta, residual, jacobian, tol, 150) &&
        residual(beta).norm() <= tol)
      solutions.push_back(beta);
  }
  return solutions;
}

template <typename Scalar>
std::vector<typename KuranishiModel<Scalar>::Vec> sample_obstruction_zeros(
    const KuranishiModel<Scalar>& model, std::size_t count, double tol, std::uint64_t rng_seed) {
  std::vector<VecT<Scalar>> zeros;
  const std::size_t h1 = model.h1_dim();
  const std::size_t h2 = model.h2_dim();
  if (h1 == 0) return zeros;

  const double cap = 0.8 * model.radius;
  for (std::size_t s = 0; s < count * 4 && zeros.size() < count; ++s) {
    ScalarSampler<Scalar> sampler(derive_seed(rng_seed, 7919 + s));
    VecT<Scalar> y = sampler.vector(h1);
    if (y.norm() > 0) y *= cap * sampler.uniform01() / y.norm();

    if (h2 == 0) {
      zeros.push_back(model.h1_basis() * y);
      continue;
    }

    auto phi_coords = [&](const VecT<Scalar>& yy) -> VecT<Scalar> {
      VecT<Scalar> gamma = model.h1_basis() * yy;
      return model.h2_basis().adjoint() * obstruction(model, gamma);
    };
    auto jac = [&](const VecT<Scalar>& yy) {
      const double h = 1e-6;
      MatT<Scalar> J(static_cast<Eigen::Index>(h2), static_cast<Eigen::Index>(h1));
      VecT<Scalar> base = phi_coords(yy);
      for (std::size_t c = 0; c < h1; ++c) {
        VecT<Scalar> yp = yy;
        yp(static_cast<Eigen::Index>(c)) += Scalar(h);
        J.col(static_cast<Eigen::Index>(c)) = (phi_coords(yp) - base) / Scalar(h);
      }
      return J;
    };

    try {
      if (!lm_solve<Scalar>(y, phi_coords, jac, tol * 0.1, 60)) continue;
    } catch (const no_convergence&) {
      continue;
    }
    VecT<Scalar> gamma = model.h1_basis() * y;
    if (gamma.norm() >= model.radius || gamma.norm() < 1e-14) continue;
    try {
      if (obstruction(model, gamma).norm() <= tol) zeros.push_back(gamma);
    } catch (const no_convergence&) {
    }
  }
  return zeros;
}

template <typename Scalar>
double gauge_orbit_residual(const RepSpec& rep, const DeformationComplex<Scalar>& complex,
                            const typename KuranishiModel<Scalar>::Vec& gamma0, double t) {
  const std::size_t m = rep.dim_v;
  const std::size_t r = rep.rank();
  MatT<Scalar> gamma = block_matrix<Scalar>(gamma0, 0, m);
  MatT<Scalar> phi = MatT<Scalar>::Identity(m, m) + Scalar(t) * gamma;
  Eigen::FullPivLU<MatT<Scalar>> lu(phi);
  if (!lu.isInvertible())
    throw std::invalid_argument("gauge_orbit_residual: phi(t) is singular");
  MatT<Scalar> phi_inv = lu.inverse();

  VecT<Scalar> tangent = complex.d[0] * gamma0;
  VecT<Scalar> diff(static_cast<Eigen::Index>(complex.dims[1]));
  for (std::size_t i = 0; i < r; ++i) {
    MatT<Scalar> rho = rho_matrix<Scalar>(rep, i);
    MatT<Scalar> transformed = phi_inv * rho * phi;
    set_block(diff, i, MatT<Scalar>((transformed - rho) / Scalar(t)));
  }
  return (diff - tangent).norm();
}

template <typename Scalar>
double slice_decomposition_residual(const DeformationComplex<Scalar>& complex,
                                    const typename KuranishiModel<Scalar>::Vec& x) {
  // Least-squares split x = d_0 u + v; independent of the Hodge package.
  VecT<Scalar> u = complex.d[0].completeOrthogonalDecomposition().solve(x);
  VecT<Scalar> v = x - complex.d[0] * u;
  return (complex.d[0].adjoint() * v).norm();
}

// ---- report -----------------------------------------------------------------

namespace {

template <typename Scalar>
ModuliReport make_report(const RepSpec& rep, const ReportParams& params) {
  KuranishiModel<Scalar> model = build_model<Scalar>(rep, params.solver);
  ModuliReport report;
  report.complex_scalars = rep.scalar_field == ScalarField::Complex;
  report.h_dims = model.hodge.h_dims;
  long sgn = 1;
  for (auto d : report.h_dims) {
    report.index += sgn * static_cast<long>(d);
    sgn = -sgn;
  }
  report.commutant_dim = report.h_dims[0];
  report.irreducible = report.commutant_dim == 1;
  report.smooth = model.h2_dim() == 0;
  if (report.smooth) report.expected_local_dim = model.h1_dim();
  report.radius = model.radius;
  report.max_iter = model.max_iter;
  report.tol_fix = model.tol_fix;
  report.seed = params.seed;
  report.sample_tol = params.sample_tol;
  report.n_samples = params.n_samples;

  const std::size_t h1 = model.h1_dim();
  const std::size_t h2 = model.h2_dim();

  // Quadratic form <h2_c, 1/2 [h1_a, h1_b]> on the harmonic bases.
  double quad_max = 0;
  report.quadratic_form.assign(
      h2, std::vector<std::vector<std::complex<double>>>(
              h1, std::vector<std::complex<double>>(h1, {0.0, 0.0})));
  for (std::size_t a = 0; a < h1; ++a)
    for (std::size_t b = 0; b < h1; ++b) {
      VecT<Scalar> br = Scalar(0.5) * bracket_c1<Scalar>(model.complex,
                                                         model.h1_basis().col(a),
                                                         model.h1_basis().col(b));
      for (std::size_t c = 0; c < h2; ++c) {
        Scalar v = model.h2_basis().col(c).dot(br);
        std::complex<double> value;
        if constexpr (std::is_same_v<Scalar, double>)
          value = {v, 0.0};
        else
          value = v;
        report.quadratic_form[c][a][b] = value;
        quad_max = std::max(quad_max, std::abs(value));
      }
    }

  // Sampled obstruction statistics inside the ball.
  double max_phi = 0;
  if (params.n_samples > 0) {
    std::size_t zero_count = 0;
    std::size_t converged = 0;
    for (std::size_t s = 0; s < params.n_samples; ++s) {
      ScalarSampler<Scalar> sampler(derive_seed(params.seed, s));
      VecT<Scalar> gamma;
      if (h1 == 0) {
        gamma = VecT<Scalar>::Zero(static_cast<Eigen::Index>(model.complex.dims[1]));
      } else {
        VecT<Scalar> y = sampler.vector(h1);
        if (y.norm() > 0) y *= 0.95 * model.radius * sampler.uniform01() / y.norm();
        gamma = model.h1_basis() * y;
      }
      try {
        double phi_norm = obstruction(model, gamma).norm();
        ++converged;
        max_phi = std::max(max_phi, phi_norm);
        if (phi_norm <= params.sample_tol) ++zero_count;
      } catch (const no_convergence&) {
      }
    }
    report.n_converged = converged;
    report.max_phi_norm = max_phi;
    if (converged > 0)
      report.zero_fraction = static_cast<double>(zero_count) / static_cast<double>(converged);
  }

  // "Identically zero" takes sampled evidence at roundoff level, not just
  // below the reporting tolerance: a vanishing quadratic form can hide a
  // nonzero cubic term.
  report.obstruction_vanishes =
      h2 == 0 ||
      (quad_max <= 1e-12 && report.n_converged > 0 && max_phi <= 1e-12);
  return report;
}

}  // namespace

ModuliReport local_model_report(const RepSpec& rep, const ReportParams& params) {
  if (rep.scalar_field == ScalarField::Real) return make_report<double>(rep, params);
  return make_report<std::complex<double>>(rep, params);
}

// ---- explicit instantiations --------------------------------------------------

#define MODULI_INSTANTIATE(S)                                                                   \
  template struct KuranishiModel<S>;                                                            \
  template KuranishiModel<S> build_model<S>(const RepSpec&, const SolverParams&);               \
  template KuranishiModel<S>::Vec bracket_c1<S>(const DeformationComplex<S>&,                   \
                                                const KuranishiModel<S>::Vec&,                  \
                                                const KuranishiModel<S>::Vec&);                 \
  template KuranishiModel<S>::Vec mc_residual<S>(const DeformationComplex<S>&,                  \
                                                 const KuranishiModel<S>::Vec&);                \
  template KuranishiModel<S>::Vec kuranishi_map<S>(const KuranishiModel<S>&,                    \
                                                   const KuranishiModel<S>::Vec&);              \
  template KuranishiModel<S>::Vec kuranishi_invert<S>(const KuranishiModel<S>&,                 \
                                                      const KuranishiModel<S>::Vec&);           \
  template KuranishiModel<S>::Vec obstruction<S>(const KuranishiModel<S>&,                      \
                                                 const KuranishiModel<S>::Vec&);                \
  template std::vector<KuranishiModel<S>::Vec> mc_slice_solve_bruteforce<S>(                    \
      const DeformationComplex<S>&, std::size_t, double, std::uint64_t, double);                \
  template std::vector<KuranishiModel<S>::Vec> sample_obstruction_zeros<S>(                     \
      const KuranishiModel<S>&, std::size_t, double, std::uint64_t);                            \
  template double gauge_orbit_residual<S>(const RepSpec&, const DeformationComplex<S>&,         \
                                          const KuranishiModel<S>::Vec&, double);               \
  template double slice_decomposition_residual<S>(const DeformationComplex<S>&,                 \
                                                  const KuranishiModel<S>::Vec&);

MODULI_INSTANTIATE(double)
MODULI_INSTANTIATE(std::complex<double>)

#undef MODULI_INSTANTIATE

}  // namespace moduli
