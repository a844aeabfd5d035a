#include "moduli/algebroid.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "moduli/qlinalg.hpp"

namespace moduli {

SectionExpr SectionExpr::basis(std::size_t rank, std::size_t num_vars, std::size_t i) {
  SectionExpr s = zero(rank, num_vars);
  s.components[i] = Polynomial::constant(num_vars, Rational(1));
  return s;
}

SectionExpr SectionExpr::zero(std::size_t rank, std::size_t num_vars) {
  SectionExpr s;
  s.components.assign(rank, Polynomial::zero(num_vars));
  return s;
}

SectionExpr SectionExpr::operator+(const SectionExpr& o) const {
  SectionExpr r = *this;
  for (std::size_t i = 0; i < components.size(); ++i) r.components[i] += o.components[i];
  return r;
}

SectionExpr SectionExpr::operator-(const SectionExpr& o) const {
  SectionExpr r = *this;
  for (std::size_t i = 0; i < components.size(); ++i) r.components[i] -= o.components[i];
  return r;
}

SectionExpr SectionExpr::operator*(const Polynomial& f) const {
  SectionExpr r = *this;
  for (auto& c : r.components) c = c * f;
  return r;
}

SectionExpr SectionExpr::operator*(const Rational& c) const {
  SectionExpr r = *this;
  for (auto& p : r.components) p = p * c;
  return r;
}

bool SectionExpr::is_zero() const {
  return std::all_of(components.begin(), components.end(),
                     [](const Polynomial& p) { return p.is_zero(); });
}

AlgebroidSpec::AlgebroidSpec(std::size_t num_vars, std::size_t rank)
    : num_vars_(num_vars), rank_(rank) {
  if (rank == 0) throw std::invalid_argument("AlgebroidSpec: rank must be >= 1");
  anchor_.assign(rank, std::vector<Polynomial>(num_vars, Polynomial::zero(num_vars)));
}

void AlgebroidSpec::set_anchor(std::size_t i, std::size_t j, Polynomial p) {
  if (i >= rank_ || j >= num_vars_) throw std::out_of_range("set_anchor: index out of range");
  if (p.num_vars() != num_vars_)
    throw std::invalid_argument("set_anchor: wrong variable count");
  anchor_[i][j] = std::move(p);
}

void AlgebroidSpec::set_bracket(std::size_t i, std::size_t j, std::vector<Polynomial> coeffs) {
  if (!(i < j) || j >= rank_)
    throw std::invalid_argument("set_bracket: requires i < j < rank");
  if (coeffs.size() != rank_)
    throw std::invalid_argument("set_bracket: coefficient vector must have length rank");
  for (const auto& c : coeffs)
    if (c.num_vars() != num_vars_)
      throw std::invalid_argument("set_bracket: wrong variable count");
  bool all_zero = std::all_of(coeffs.begin(), coeffs.end(),
                              [](const Polynomial& p) { return p.is_zero(); });
  if (all_zero)
    bracket_.erase({i, j});
  else
    bracket_[{i, j}] = std::move(coeffs);
}

std::vector<Polynomial> AlgebroidSpec::structure(std::size_t i, std::size_t j) const {
  std::vector<Polynomial> zero(rank_, Polynomial::zero(num_vars_));
  if (i == j) return zero;
  bool flip = i > j;
  auto it = bracket_.find(flip ? std::make_pair(j, i) : std::make_pair(i, j));
  if (it == bracket_.end()) return zero;
  if (!flip) return it->second;
  std::vector<Polynomial> r = it->second;
  for (auto& p : r) p = -p;
  return r;
}

Polynomial anchor_apply(const AlgebroidSpec& spec, const SectionExpr& xi, const Polynomial& f) {
  if (xi.components.size() != spec.rank())
    throw std::invalid_argument("anchor_apply: section has wrong rank");
  if (f.num_vars() != spec.num_vars())
    throw std::invalid_argument("anchor_apply: function has wrong variable count");
  Polynomial out = Polynomial::zero(spec.num_vars());
  for (std::size_t i = 0; i < spec.rank(); ++i) {
    if (xi.components[i].is_zero()) continue;
    Polynomial di = Polynomial::zero(spec.num_vars());
    for (std::size_t j = 0; j < spec.num_vars(); ++j) di += spec.anchor(i, j) * f.partial(j);
    out += xi.components[i] * di;
  }
  return out;
}

std::vector<Polynomial> anchor_vector_field(const AlgebroidSpec& spec, const SectionExpr& xi) {
  std::vector<Polynomial> v(spec.num_vars(), Polynomial::zero(spec.num_vars()));
  for (std::size_t j = 0; j < spec.num_vars(); ++j)
    for (std::size_t i = 0; i < spec.rank(); ++i)
      v[j] += xi.components[i] * spec.anchor(i, j);
  return v;
}

SectionExpr section_bracket(const AlgebroidSpec& spec, const SectionExpr& xi,
                            const SectionExpr& eta) {
  const std::size_t r = spec.rank();
  if (xi.components.size() != r || eta.components.size() != r)
    throw std::invalid_argument("section_bracket: section has wrong rank");
  SectionExpr out = SectionExpr::zero(r, spec.num_vars());
  for (std::size_t i = 0; i < r; ++i) {
    if (xi.components[i].is_zero()) continue;
    for (std::size_t j = 0; j < r; ++j) {
      if (eta.components[j].is_zero()) continue;
      Polynomial fg = xi.components[i] * eta.components[j];
      auto c = spec.structure(i, j);
      for (std::size_t k = 0; k < r; ++k)
        if (!c[k].is_zero()) out.components[k] += fg * c[k];
    }
  }
  for (std::size_t k = 0; k < r; ++k) {
    out.components[k] += anchor_apply(spec, xi, eta.components[k]);
    out.components[k] -= anchor_apply(spec, eta, xi.components[k]);
  }
  return out;
}

namespace {

// Commutator [X, Y] of polynomial vector fields, component col:
// sum_l X_l d_l Y_col - Y_l d_l X_col.
std::vector<Polynomial> vf_commutator(const std::vector<Polynomial>& X,
                                      const std::vector<Polynomial>& Y, std::size_t n) {
  std::vector<Polynomial> out(n, Polynomial::zero(n));
  for (std::size_t col = 0; col < n; ++col)
    for (std::size_t l = 0; l < n; ++l) {
      out[col] += X[l] * Y[col].partial(l);
      out[col] -= Y[l] * X[col].partial(l);
    }
  return out;
}

}  // namespace

ValidationReport validate_algebroid(const AlgebroidSpec& spec) {
  ValidationReport report;
  const std::size_t r = spec.rank();
  const std::size_t n = spec.num_vars();

  // (A) anchor morphism: a([e_i, e_j]) = [a(e_i), a(e_j)] for all i < j.
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      auto c = spec.structure(i, j);
      auto comm = vf_commutator(spec.anchor_row(i), spec.anchor_row(j), n);
      for (std::size_t col = 0; col < n; ++col) {
        Polynomial lhs = Polynomial::zero(n);
        for (std::size_t k = 0; k < r; ++k) lhs += c[k] * spec.anchor(k, col);
        Polynomial res = lhs - comm[col];
        if (!res.is_zero())
          report.issues.push_back({"anchor_morphism", {i, j, col}, res});
      }
    }
  }

  // (B) Jacobiator: cyclic sum over (i,j,k) of
  //     sum_l c^l_{jk} c^m_{il} + a(e_i)(c^m_{jk}), for all i<j<k and m.
  auto e = [&](std::size_t i) { return SectionExpr::basis(r, n, i); };
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      for (std::size_t k = j + 1; k < r; ++k) {
        std::vector<std::array<std::size_t, 3>> cyc = {{i, j, k}, {j, k, i}, {k, i, j}};
        for (std::size_t m = 0; m < r; ++m) {
          Polynomial res = Polynomial::zero(n);
          for (auto [a, b, c3] : cyc) {
            auto cbc = spec.structure(b, c3);
            for (std::size_t l = 0; l < r; ++l) {
              if (cbc[l].is_zero()) continue;
              auto cal = spec.structure(a, l);
              res += cbc[l] * cal[m];
            }
            res += anchor_apply(spec, e(a), cbc[m]);
          }
          if (!res.is_zero()) report.issues.push_back({"jacobi", {i, j, k, m}, res});
        }
      }
    }
  }
  return report;
}

std::string ValidationReport::summary() const {
  if (valid()) return "valid";
  std::ostringstream os;
  for (const auto& issue : issues) {
    os << issue.condition << " fails at (";
    for (std::size_t t = 0; t < issue.indices.size(); ++t)
      os << (t ? "," : "") << issue.indices[t];
    os << "): residual " << issue.residual.str() << "\n";
  }
  return os.str();
}

// ---- constructors ----------------------------------------------------------

namespace {

void require_valid(const AlgebroidSpec& spec, const std::string& who) {
  auto report = validate_algebroid(spec);
  if (!report.valid())
    throw construct_error(who + ": resulting spec fails validation:\n" + report.summary());
}

}  // namespace

AlgebroidSpec make_tangent(std::size_t n) {
  if (n == 0) throw construct_error("make_tangent: n must be >= 1");
  AlgebroidSpec spec(n, n);
  for (std::size_t i = 0; i < n; ++i)
    spec.set_anchor(i, i, Polynomial::constant(n, Rational(1)));
  return spec;
}

AlgebroidSpec make_lie_algebra(
    std::size_t rank,
    const std::map<std::pair<std::size_t, std::size_t>, std::vector<Rational>>& brackets) {
  AlgebroidSpec spec(0, rank);
  for (const auto& [ij, coeffs] : brackets) {
    if (coeffs.size() != rank)
      throw construct_error("make_lie_algebra: coefficient vector must have length rank");
    std::vector<Polynomial> c;
    c.reserve(rank);
    for (const auto& q : coeffs) c.push_back(Polynomial::constant(0, q));
    spec.set_bracket(ij.first, ij.second, std::move(c));
  }
  require_valid(spec, "make_lie_algebra");
  return spec;
}

AlgebroidSpec make_vector_field(const std::vector<Polynomial>& X) {
  const std::size_t n = X.size();
  if (n == 0) throw construct_error("make_vector_field: empty vector field");
  AlgebroidSpec spec(n, 1);
  for (std::size_t j = 0; j < n; ++j) spec.set_anchor(0, j, X[j]);
  return spec;
}

AlgebroidSpec make_action(const AlgebroidSpec& algebra,
                          const std::vector<std::vector<Polynomial>>& zeta, std::size_t n) {
  if (algebra.num_vars() != 0)
    throw construct_error("make_action: the acting algebra must live over a point");
  const std::size_t r = algebra.rank();
  if (zeta.size() != r) throw construct_error("make_action: zeta must have one row per generator");
  for (const auto& row : zeta)
    if (row.size() != n) throw construct_error("make_action: zeta rows must have n components");

  // zeta must be a homomorphism: [zeta_i, zeta_j] = sum_k c^k_{ij} zeta_k.
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      auto comm = vf_commutator(zeta[i], zeta[j], n);
      auto c = algebra.structure(i, j);
      for (std::size_t col = 0; col < n; ++col) {
        Polynomial expect = Polynomial::zero(n);
        for (std::size_t k = 0; k < r; ++k)
          expect += zeta[k][col] * Polynomial::constant(n, c[k].constant_value());
        Polynomial res = comm[col] - expect;
        if (!res.is_zero())
          throw construct_error("make_action: zeta is not a homomorphism at (" +
                                std::to_string(i) + "," + std::to_string(j) +
                                "), residual " + res.str());
      }
    }
  }

  AlgebroidSpec spec(n, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < n; ++j) spec.set_anchor(i, j, zeta[i][j]);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      auto c = algebra.structure(i, j);
      std::vector<Polynomial> coeffs;
      coeffs.reserve(r);
      for (std::size_t k = 0; k < r; ++k)
        coeffs.push_back(Polynomial::constant(n, c[k].constant_value()));
      spec.set_bracket(i, j, std::move(coeffs));
    }
  }
  require_valid(spec, "make_action");
  return spec;
}

AlgebroidSpec make_two_form(const std::vector<std::vector<Polynomial>>& omega, std::size_t n) {
  if (omega.size() != n) throw construct_error("make_two_form: omega must be n x n");
  for (const auto& row : omega)
    if (row.size() != n) throw construct_error("make_two_form: omega must be n x n");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Polynomial res = omega[i][j] + omega[j][i];
      if (!res.is_zero())
        throw construct_error("make_two_form: omega is not antisymmetric, residual " + res.str());
    }
  // Closedness: d_i w_jk - d_j w_ik + d_k w_ij = 0.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        Polynomial res =
            omega[j][k].partial(i) - omega[i][k].partial(j) + omega[i][j].partial(k);
        if (!res.is_zero())
          throw construct_error("make_two_form: omega is not closed, residual " + res.str());
      }

  AlgebroidSpec spec(n, n + 1);
  for (std::size_t i = 0; i < n; ++i)
    spec.set_anchor(i, i, Polynomial::constant(n, Rational(1)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<Polynomial> coeffs(n + 1, Polynomial::zero(n));
      coeffs[n] = omega[i][j];
      spec.set_bracket(i, j, std::move(coeffs));
    }
  require_valid(spec, "make_two_form");
  return spec;
}

AlgebroidSpec make_poisson(const std::vector<std::vector<Polynomial>>& pi, std::size_t n) {
  if (pi.size() != n) throw construct_error("make_poisson: pi must be n x n");
  for (const auto& row : pi)
    if (row.size() != n) throw construct_error("make_poisson: pi must be n x n");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Polynomial res = pi[i][j] + pi[j][i];
      if (!res.is_zero())
        throw construct_error("make_poisson: pi is not antisymmetric, residual " + res.str());
    }
  // Schouten identity (only needed for n >= 3; any bivector on R^2 is Poisson).
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        Polynomial res = Polynomial::zero(n);
        std::vector<std::array<std::size_t, 3>> cyc = {{i, j, k}, {j, k, i}, {k, i, j}};
        for (auto [a, b, c] : cyc)
          for (std::size_t l = 0; l < n; ++l) res += pi[a][l] * pi[b][c].partial(l);
        if (!res.is_zero())
          throw construct_error("make_poisson: pi is not Poisson, residual " + res.str() +
                                " at (" + std::to_string(i) + "," + std::to_string(j) + "," +
                                std::to_string(k) + ")");
      }

  AlgebroidSpec spec(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) spec.set_anchor(i, j, pi[i][j]);
  // [dx_i, dx_j] = d(pi_ij), so c^k_{ij} = d pi_ij / d x_k.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<Polynomial> coeffs;
      coeffs.reserve(n);
      for (std::size_t k = 0; k < n; ++k) coeffs.push_back(pi[i][j].partial(k));
      spec.set_bracket(i, j, std::move(coeffs));
    }
  require_valid(spec, "make_poisson");
  return spec;
}

namespace {

SectionExpr apply_endo(const std::vector<std::vector<Polynomial>>& N, const SectionExpr& xi,
                       std::size_t r, std::size_t n) {
  SectionExpr out = SectionExpr::zero(r, n);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < r; ++i) out.components[j] += xi.components[i] * N[i][j];
  return out;
}

}  // namespace

AlgebroidSpec make_nijenhuis(const AlgebroidSpec& base,
                             const std::vector<std::vector<Polynomial>>& N) {
  const std::size_t r = base.rank();
  const std::size_t n = base.num_vars();
  if (!validate_algebroid(base).valid())
    throw construct_error("make_nijenhuis: base spec is not a Lie algebroid");
  if (N.size() != r) throw construct_error("make_nijenhuis: N must be rank x rank");
  for (const auto& row : N)
    if (row.size() != r) throw construct_error("make_nijenhuis: N must be rank x rank");

  auto e = [&](std::size_t i) { return SectionExpr::basis(r, n, i); };
  auto Ne = [&](const SectionExpr& xi) { return apply_endo(N, xi, r, n); };

  // Torsion is tensorial, so vanishing on basis pairs suffices.
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j) {
      SectionExpr t = section_bracket(base, Ne(e(i)), Ne(e(j)));
      t = t - Ne(section_bracket(base, Ne(e(i)), e(j)));
      t = t - Ne(section_bracket(base, e(i), Ne(e(j))));
      t = t + Ne(Ne(section_bracket(base, e(i), e(j))));
      if (!t.is_zero()) {
        std::string desc;
        for (std::size_t k = 0; k < r; ++k)
          if (!t.components[k].is_zero())
            desc += " (" + t.components[k].str() + ")*e" + std::to_string(k);
        throw construct_error("make_nijenhuis: nonzero torsion at (" + std::to_string(i) + "," +
                              std::to_string(j) + "):" + desc);
      }
    }

  AlgebroidSpec spec(n, r);
  for (std::size_t i = 0; i < r; ++i) {
    auto row = anchor_vector_field(base, Ne(e(i)));
    for (std::size_t j = 0; j < n; ++j) spec.set_anchor(i, j, row[j]);
  }
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j) {
      SectionExpr b = section_bracket(base, Ne(e(i)), e(j));
      b = b + section_bracket(base, e(i), Ne(e(j)));
      b = b - Ne(section_bracket(base, e(i), e(j)));
      spec.set_bracket(i, j, b.components);
    }
  require_valid(spec, "make_nijenhuis");
  return spec;
}

AlgebroidSpec make_trivial_product(std::size_t n, const AlgebroidSpec& algebra) {
  if (algebra.num_vars() != 0)
    throw construct_error("make_trivial_product: the algebra must live over a point");
  if (n == 0) throw construct_error("make_trivial_product: n must be >= 1");
  const std::size_t s = algebra.rank();
  AlgebroidSpec spec(n, n + s);
  for (std::size_t i = 0; i < n; ++i)
    spec.set_anchor(i, i, Polynomial::constant(n, Rational(1)));
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = a + 1; b < s; ++b) {
      auto c = algebra.structure(a, b);
      std::vector<Polynomial> coeffs(n + s, Polynomial::zero(n));
      for (std::size_t k = 0; k < s; ++k) coeffs[n + k] = Polynomial::constant(n, c[k].constant_value());
      spec.set_bracket(n + a, n + b, std::move(coeffs));
    }
  require_valid(spec, "make_trivial_product");
  return spec;
}

// ---- ellipticity ------------------------------------------------------------

namespace {

// Determinant of a square polynomial matrix by cofactor expansion; returns
// the polynomial. Desk-scale n only.
Polynomial poly_det_rec(const std::vector<std::vector<const Polynomial*>>& m, std::size_t n_vars) {
  const std::size_t n = m.size();
  if (n == 0) return Polynomial::constant(n_vars, Rational(1));
  if (n == 1) return *m[0][0];
  Polynomial det = Polynomial::zero(n_vars);
  for (std::size_t j = 0; j < n; ++j) {
    if (m[0][j]->is_zero()) continue;
    std::vector<std::vector<const Polynomial*>> minor;
    minor.reserve(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<const Polynomial*> row;
      row.reserve(n - 1);
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(m[i][k]);
      minor.push_back(std::move(row));
    }
    Polynomial term = *m[0][j] * poly_det_rec(minor, n_vars);
    if (j % 2 == 0)
      det += term;
    else
      det -= term;
  }
  return det;
}

bool next_combination(std::vector<std::size_t>& comb, std::size_t n) {
  const std::size_t k = comb.size();
  for (std::size_t i = k; i-- > 0;) {
    if (comb[i] < n - k + i) {
      ++comb[i];
      for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

EllipticityResult ellipticity_check(const AlgebroidSpec& spec,
                                    const std::vector<std::vector<Rational>>& sample_points,
                                    std::uint64_t seed) {
  EllipticityResult result;
  const std::size_t n = spec.num_vars();
  const std::size_t r = spec.rank();
  if (n == 0) {
    result.certified_everywhere = true;  // T*M = 0, condition is vacuous
    return result;
  }
  if (r < n) {
    // The anchor can never be surjective; witness any point.
    result.elliptic_at_samples = false;
    result.witness = std::vector<Rational>(n, Rational(0));
    return result;
  }

  // Exact sufficient certificate: some n x n minor with constant nonzero det.
  std::vector<std::size_t> comb(n);
  for (std::size_t i = 0; i < n; ++i) comb[i] = i;
  do {
    std::vector<std::vector<const Polynomial*>> minor(n, std::vector<const Polynomial*>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) minor[i][j] = &spec.anchor(comb[i], j);
    Polynomial det = poly_det_rec(minor, n);
    if (det.is_constant() && !det.is_zero()) {
      result.certified_everywhere = true;
      break;
    }
  } while (next_combination(comb, r));

  std::vector<std::vector<Rational>> points = sample_points;
  if (points.empty()) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> num(-6, 6);
    std::uniform_int_distribution<long> den(1, 4);
    for (int t = 0; t < 16; ++t) {
      std::vector<Rational> p;
      p.reserve(n);
      for (std::size_t j = 0; j < n; ++j) p.emplace_back(num(rng), den(rng));
      points.push_back(std::move(p));
    }
  }

  for (const auto& point : points) {
    if (point.size() != n)
      throw std::invalid_argument("ellipticity_check: sample point has wrong dimension");
    QMatrix m(r, n);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = spec.anchor(i, j).eval(point);
    if (m.rank() < n) {
      result.elliptic_at_samples = false;
      result.witness = point;
      break;
    }
  }
  return result;
}

// ---- kernel of d_L ----------------------------------------------------------

std::vector<Monomial> monomials_up_to_degree(std::size_t n, std::size_t d) {
  std::vector<Monomial> out;
  Monomial current(n, 0);
  // Enumerate recursively in increasing lexicographic order.
  auto rec = [&](auto&& self, std::size_t var, std::size_t remaining) -> void {
    if (var == n) {
      out.push_back(current);
      return;
    }
    for (std::size_t e = 0; e <= remaining; ++e) {
      current[var] = static_cast<std::uint32_t>(e);
      self(self, var + 1, remaining - e);
    }
    current[var] = 0;
  };
  rec(rec, 0, d);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Polynomial> kernel_of_dL(const AlgebroidSpec& spec, std::size_t max_degree) {
  const std::size_t n = spec.num_vars();
  const std::size_t r = spec.rank();
  auto mons = monomials_up_to_degree(n, max_degree);

  // Images a(e_i) x^mon for every input monomial.
  std::vector<std::vector<Polynomial>> images(mons.size(), std::vector<Polynomial>());
  std::map<Monomial, std::size_t> out_index;
  for (std::size_t col = 0; col < mons.size(); ++col) {
    Polynomial f = Polynomial::monomial(mons[col], Rational(1));
    for (std::size_t i = 0; i < r; ++i) {
      Polynomial g = anchor_apply(spec, SectionExpr::basis(r, n, i), f);
      for (const auto& [m, c] : g.terms())
        out_index.emplace(m, 0);
      images[col].push_back(std::move(g));
    }
  }
  std::size_t next = 0;
  for (auto& [m, idx] : out_index) idx = next++;

  QMatrix M(r * out_index.size() + 1, mons.size());  // +1 keeps the matrix nonempty
  for (std::size_t col = 0; col < mons.size(); ++col)
    for (std::size_t i = 0; i < r; ++i)
      for (const auto& [m, c] : images[col][i].terms())
        M(i * out_index.size() + out_index.at(m), col) = c;

  std::vector<Polynomial> basis;
  for (const auto& v : M.kernel_basis()) {
    Polynomial p = Polynomial::zero(n);
    for (std::size_t col = 0; col < mons.size(); ++col)
      if (!v[col].is_zero()) p += Polynomial::monomial(mons[col], v[col]);
    basis.push_back(std::move(p));
  }
  return basis;
}

}  // namespace moduli
