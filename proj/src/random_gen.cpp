#include "moduli/random_gen.hpp"

namespace moduli {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 step on seed ^ golden-ratio-scaled index
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t RandomSource::uint(std::uint64_t bound) {
  if (bound == 0) return 0;
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng_);
}

Rational RandomSource::rational() {
  std::uniform_int_distribution<long> num(-9, 9);
  std::uniform_int_distribution<long> den(1, 4);
  return Rational(num(rng_), den(rng_));
}

Polynomial RandomSource::poly(std::size_t num_vars, std::size_t max_degree, std::size_t terms) {
  Polynomial p = Polynomial::zero(num_vars);
  for (std::size_t t = 0; t < terms; ++t) {
    Monomial m(num_vars, 0);
    std::size_t budget = max_degree == 0 ? 0 : uint(max_degree + 1);
    for (std::size_t v = 0; v < num_vars && budget > 0; ++v) {
      std::size_t e = uint(budget + 1);
      m[v] = static_cast<std::uint32_t>(e);
      budget -= e;
    }
    p += Polynomial::monomial(m, rational());
  }
  return p;
}

SectionExpr RandomSource::section(const AlgebroidSpec& spec, std::size_t max_degree) {
  SectionExpr s = SectionExpr::zero(spec.rank(), spec.num_vars());
  for (auto& c : s.components) c = poly(spec.num_vars(), max_degree, 2);
  return s;
}

LForm RandomSource::form(std::size_t degree, std::size_t rank, std::size_t num_vars,
                         std::size_t rows, std::size_t cols, std::size_t max_degree) {
  LForm f(degree, rank, num_vars, rows, cols);
  if (degree > rank) return f;

  IndexTuple t(degree);
  for (std::size_t i = 0; i < degree; ++i) t[i] = i;
  for (;;) {
    // fill roughly two thirds of the tuples
    if (uint(3) != 0) {
      PolyMatrix m(rows, cols, num_vars);
      for (std::size_t a = 0; a < rows; ++a)
        for (std::size_t b = 0; b < cols; ++b) m(a, b) = poly(num_vars, max_degree, 2);
      f.set_component(t, std::move(m));
    }
    if (degree == 0) break;
    std::size_t pos = degree;
    bool advanced = false;
    while (pos-- > 0) {
      if (t[pos] < rank - (degree - pos)) {
        ++t[pos];
        for (std::size_t q = pos + 1; q < degree; ++q) t[q] = t[q - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return f;
}

ConnectionForm RandomSource::connection(std::size_t rank, std::size_t num_vars, std::size_t dim,
                                        std::size_t max_degree) {
  return ConnectionForm(form(1, rank, num_vars, dim, dim, max_degree));
}

GaugeMap RandomSource::gauge(std::size_t dim, std::size_t num_vars, std::size_t max_degree) {
  // Product of random shears I + p E_{ab}; the inverse is the reversed
  // product of I - p E_{ab}, exact by construction.
  PolyMatrix phi = PolyMatrix::identity(dim, num_vars);
  PolyMatrix inv = PolyMatrix::identity(dim, num_vars);
  const std::size_t steps = dim == 1 ? 0 : 2 + uint(2);
  for (std::size_t s = 0; s < steps; ++s) {
    std::size_t a = uint(dim);
    std::size_t b = uint(dim);
    if (a == b) continue;
    Polynomial p = poly(num_vars, max_degree, 1);
    PolyMatrix shear = PolyMatrix::identity(dim, num_vars);
    shear(a, b) = p;
    PolyMatrix shear_inv = PolyMatrix::identity(dim, num_vars);
    shear_inv(a, b) = -p;
    phi = phi * shear;
    inv = shear_inv * inv;
  }
  // Mix in a constant diagonal with unit entries +-1 or small rationals.
  PolyMatrix diag(dim, dim, num_vars);
  PolyMatrix diag_inv(dim, dim, num_vars);
  for (std::size_t i = 0; i < dim; ++i) {
    long num = uint(2) == 0 ? 1 : -1;
    long den = 1 + static_cast<long>(uint(3));
    diag(i, i) = Polynomial::constant(num_vars, Rational(num * den, 1));
    diag_inv(i, i) = Polynomial::constant(num_vars, Rational(num, den));
  }
  return GaugeMap(phi * diag, diag_inv * inv);
}

GaugeMap RandomSource::constant_gauge(std::size_t dim, std::size_t num_vars) {
  // Same shear construction restricted to constant entries.
  PolyMatrix phi = PolyMatrix::identity(dim, num_vars);
  PolyMatrix inv = PolyMatrix::identity(dim, num_vars);
  const std::size_t steps = dim == 1 ? 0 : 3;
  for (std::size_t s = 0; s < steps; ++s) {
    std::size_t a = uint(dim);
    std::size_t b = uint(dim);
    if (a == b) continue;
    Polynomial p = Polynomial::constant(num_vars, rational());
    PolyMatrix shear = PolyMatrix::identity(dim, num_vars);
    shear(a, b) = p;
    PolyMatrix shear_inv = PolyMatrix::identity(dim, num_vars);
    shear_inv(a, b) = -p;
    phi = phi * shear;
    inv = shear_inv * inv;
  }
  PolyMatrix diag(dim, dim, num_vars);
  PolyMatrix diag_inv(dim, dim, num_vars);
  for (std::size_t i = 0; i < dim; ++i) {
    Rational d(1 + static_cast<long>(uint(3)), 1);
    if (uint(2) == 0) d = -d;
    diag(i, i) = Polynomial::constant(num_vars, d);
    diag_inv(i, i) = Polynomial::constant(num_vars, Rational(1) / d);
  }
  return GaugeMap(phi * diag, diag_inv * inv);
}

}  // namespace moduli
