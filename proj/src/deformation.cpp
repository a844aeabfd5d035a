#include "moduli/deformation.hpp"

#include <map>

namespace moduli {

namespace {

std::vector<std::vector<IndexTuple>> enumerate_tuples(std::size_t r) {
  std::vector<std::vector<IndexTuple>> out(r + 1);
  out[0].push_back({});
  for (std::size_t k = 1; k <= r; ++k) {
    IndexTuple t(k);
    for (std::size_t i = 0; i < k; ++i) t[i] = i;
    for (;;) {
      out[k].push_back(t);
      std::size_t pos = k;
      bool advanced = false;
      while (pos-- > 0) {
        if (t[pos] < r - (k - pos)) {
          ++t[pos];
          for (std::size_t q = pos + 1; q < k; ++q) t[q] = t[q - 1] + 1;
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
    }
  }
  return out;
}

// Exact differentials over Gaussian rationals, one matrix per degree.
std::vector<ExactMatrix<GaussianRational>> exact_differentials(
    const RepSpec& rep, const std::vector<std::vector<IndexTuple>>& tuples) {
  const std::size_t r = rep.rank();
  const std::size_t m = rep.dim_v;
  const std::size_t m2 = m * m;

  std::vector<std::map<IndexTuple, std::size_t>> tuple_idx(r + 1);
  for (std::size_t k = 0; k <= r; ++k)
    for (std::size_t t = 0; t < tuples[k].size(); ++t) tuple_idx[k][tuples[k][t]] = t;

  std::vector<ExactMatrix<GaussianRational>> d;
  for (std::size_t k = 0; k < r; ++k) {
    const auto& rows = tuples[k + 1];
    const auto& cols = tuples[k];
    ExactMatrix<GaussianRational> D(rows.size() * m2, cols.size() * m2);

    for (std::size_t row_t = 0; row_t < rows.size(); ++row_t) {
      const IndexTuple& T = rows[row_t];
      // First sum: (-1)^s [rho(e_{T_s}), omega(T minus s)].
      for (std::size_t s = 0; s <= k; ++s) {
        IndexTuple rest;
        rest.reserve(k);
        for (std::size_t t = 0; t <= k; ++t)
          if (t != s) rest.push_back(T[t]);
        std::size_t col_t = tuple_idx[k].at(rest);
        const auto& rho = rep.rho[T[s]];
        int sgn = s % 2 == 0 ? 1 : -1;
        // [rho, E_{ab}]_{pq} = rho_{pa} delta_{qb} - delta_{pa} rho_{bq}
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = 0; b < m; ++b) {
            std::size_t col = col_t * m2 + a * m + b;
            for (std::size_t p = 0; p < m; ++p) {
              GaussianRational v = rho(p, a);
              if (!v.is_zero()) {
                auto& cell = D(row_t * m2 + p * m + b, col);
                cell = sgn > 0 ? cell + v : cell - v;
              }
            }
            for (std::size_t q = 0; q < m; ++q) {
              GaussianRational v = rho(b, q);
              if (!v.is_zero()) {
                auto& cell = D(row_t * m2 + a * m + q, col);
                cell = sgn > 0 ? cell - v : cell + v;
              }
            }
          }
      }
      // Second sum: (-1)^{s+u} omega([e_s, e_u], rest).
      for (std::size_t s = 0; s <= k; ++s) {
        for (std::size_t u = s + 1; u <= k; ++u) {
          IndexTuple rest;
          rest.reserve(k > 0 ? k - 1 : 0);
          for (std::size_t t = 0; t <= k; ++t)
            if (t != s && t != u) rest.push_back(T[t]);
          int base_sgn = (s + u) % 2 == 0 ? 1 : -1;
          for (std::size_t l = 0; l < r; ++l) {
            Rational c = rep.structure_constant(T[s], T[u], l);
            if (c.is_zero()) continue;
            IndexTuple full;
            full.reserve(k);
            full.push_back(l);
            full.insert(full.end(), rest.begin(), rest.end());
            IndexTuple sorted;
            int perm = sort_sign(full, sorted);
            if (perm == 0) continue;
            std::size_t col_t = tuple_idx[k].at(sorted);
            GaussianRational coeff(base_sgn * perm > 0 ? c : -c);
            for (std::size_t a = 0; a < m; ++a)
              for (std::size_t b = 0; b < m; ++b)
                D(row_t * m2 + a * m + b, col_t * m2 + a * m + b) += coeff;
          }
        }
      }
    }
    d.push_back(std::move(D));
  }
  return d;
}

double to_scalar(const GaussianRational& v, double*) {
  if (!v.im.is_zero())
    throw std::invalid_argument("complex entry encountered in a real representation");
  return v.re.to_double();
}

std::complex<double> to_scalar(const GaussianRational& v, std::complex<double>*) {
  return {v.re.to_double(), v.im.to_double()};
}

}  // namespace

template <typename Scalar>
std::size_t DeformationComplex<Scalar>::tuple_index(std::size_t k, const IndexTuple& t) const {
  const auto& list = tuples[k];
  auto it = std::lower_bound(list.begin(), list.end(), t);
  if (it == list.end() || *it != t)
    throw std::invalid_argument("DeformationComplex: unknown tuple");
  return static_cast<std::size_t>(it - list.begin());
}

template <typename Scalar>
DeformationComplex<Scalar> build_complex(const RepSpec& rep) {
  auto report = validate_rep(rep);
  if (!report.valid())
    throw std::invalid_argument("build_complex: representation is not flat:\n" +
                                report.summary());

  DeformationComplex<Scalar> out;
  out.rank = rep.rank();
  out.dim_v = rep.dim_v;
  out.tuples = enumerate_tuples(out.rank);
  for (std::size_t k = 0; k <= out.rank; ++k)
    out.dims.push_back(out.tuples[k].size() * rep.dim_v * rep.dim_v);

  auto exact = exact_differentials(rep, out.tuples);
  // Flatness makes this a complex; verify exactly before going numeric.
  for (std::size_t k = 0; k + 1 < exact.size(); ++k)
    if (!(exact[k + 1] * exact[k]).is_zero())
      throw std::logic_error("build_complex: d_{k+1} d_k != 0 (exact check failed)");

  for (std::size_t k = 0; k < exact.size(); ++k) {
    typename DeformationComplex<Scalar>::Mat D(out.dims[k + 1], out.dims[k]);
    for (std::size_t i = 0; i < out.dims[k + 1]; ++i)
      for (std::size_t j = 0; j < out.dims[k]; ++j)
        D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            to_scalar(exact[k](i, j), static_cast<Scalar*>(nullptr));
    out.d.push_back(std::move(D));
  }
  return out;
}

template <typename Scalar>
HodgeData<Scalar> hodge(const DeformationComplex<Scalar>& complex, double rank_tolerance) {
  using Mat = typename HodgeData<Scalar>::Mat;
  HodgeData<Scalar> out;
  out.rank_tolerance = rank_tolerance;
  const std::size_t r = complex.rank;

  for (std::size_t k = 0; k < r; ++k) out.delta.push_back(complex.d[k].adjoint());

  for (std::size_t k = 0; k <= r; ++k) {
    const auto n = static_cast<Eigen::Index>(complex.dims[k]);
    Mat lap = Mat::Zero(n, n);
    if (k < r) lap += out.delta[k] * complex.d[k];
    if (k > 0) lap += complex.d[k - 1] * out.delta[k - 1];
    out.laplacian.push_back(lap);

    Eigen::SelfAdjointEigenSolver<Mat> eig(lap);
    const auto& values = eig.eigenvalues();
    double lambda_max = values.size() ? values(values.size() - 1) : 0.0;
    double cliff = rank_tolerance * lambda_max;

    Mat harmonic(n, 0);
    Mat green = Mat::Zero(n, n);
    for (Eigen::Index c = 0; c < values.size(); ++c) {
      if (values(c) <= cliff) {
        harmonic.conservativeResize(n, harmonic.cols() + 1);
        harmonic.col(harmonic.cols() - 1) = eig.eigenvectors().col(c);
      } else {
        green += eig.eigenvectors().col(c) * eig.eigenvectors().col(c).adjoint() / values(c);
      }
    }
    out.harmonic_basis.push_back(harmonic);
    out.harmonic_projector.push_back(harmonic * harmonic.adjoint());
    out.green.push_back(std::move(green));
    out.h_dims.push_back(static_cast<std::size_t>(harmonic.cols()));
  }
  return out;
}

std::vector<std::size_t> cohomology_dims(const RepSpec& rep, double rank_tolerance) {
  if (rep.scalar_field == ScalarField::Real)
    return hodge(build_complex<double>(rep), rank_tolerance).h_dims;
  return hodge(build_complex<std::complex<double>>(rep), rank_tolerance).h_dims;
}

long rep_index(const RepSpec& rep, double rank_tolerance) {
  auto dims = cohomology_dims(rep, rank_tolerance);
  long idx = 0;
  long sgn = 1;
  for (auto d : dims) {
    idx += sgn * static_cast<long>(d);
    sgn = -sgn;
  }
  return idx;
}

IrreducibilityResult irreducibility_test(const RepSpec& rep, double rank_tolerance) {
  auto dims = cohomology_dims(rep, rank_tolerance);
  // ker d_0 = ker Delta_0 is the commutant of the representation.
  return {dims[0] == 1, dims[0]};
}

template struct DeformationComplex<double>;
template struct DeformationComplex<std::complex<double>>;
template struct HodgeData<double>;
template struct HodgeData<std::complex<double>>;
template DeformationComplex<double> build_complex<double>(const RepSpec&);
template DeformationComplex<std::complex<double>> build_complex<std::complex<double>>(
    const RepSpec&);
template HodgeData<double> hodge<double>(const DeformationComplex<double>&, double);
template HodgeData<std::complex<double>> hodge<std::complex<double>>(
    const DeformationComplex<std::complex<double>>&, double);

}  // namespace moduli
