#include "moduli/cartan.hpp"

#include <algorithm>
#include <functional>
#include <iterator>
#include <sstream>

#include "moduli/random_gen.hpp"

namespace moduli {

namespace {

// Sign of concatenating two disjoint increasing tuples and sorting: parity of
// the number of pairs (a in I, b in J) with a > b.
int merge_sign(const IndexTuple& I, const IndexTuple& J, IndexTuple& merged) {
  int inversions = 0;
  for (auto a : I)
    for (auto b : J) {
      if (a == b) return 0;
      if (a > b) ++inversions;
    }
  merged.clear();
  merged.reserve(I.size() + J.size());
  std::merge(I.begin(), I.end(), J.begin(), J.end(), std::back_inserter(merged));
  return inversions % 2 == 0 ? 1 : -1;
}

void check_same_base(const LForm& a, const LForm& b, const char* who) {
  if (a.rank() != b.rank() || a.num_vars() != b.num_vars())
    throw std::invalid_argument(std::string(who) + ": forms live on different algebroids");
}

std::size_t wedge_rows(const LForm& a, const LForm& b) {
  if (a.is_scalar()) return b.value_rows();
  return a.value_rows();
}

std::size_t wedge_cols(const LForm& a, const LForm& b) {
  if (b.is_scalar()) return a.value_cols();
  return b.value_cols();
}

// d/dx along the anchor of e_i, applied entrywise.
PolyMatrix anchor_derive(const AlgebroidSpec& spec, std::size_t i, const PolyMatrix& m) {
  PolyMatrix out(m.rows(), m.cols(), m.num_vars());
  for (std::size_t a = 0; a < m.rows(); ++a)
    for (std::size_t b = 0; b < m.cols(); ++b) {
      Polynomial acc = Polynomial::zero(m.num_vars());
      for (std::size_t j = 0; j < spec.num_vars(); ++j)
        acc += spec.anchor(i, j) * m(a, b).partial(j);
      out(a, b) = acc;
    }
  return out;
}

}  // namespace

LForm wedge(const LForm& omega, const LForm& tau) {
  check_same_base(omega, tau, "wedge");
  if (!omega.is_scalar() && !tau.is_scalar() && omega.value_cols() != tau.value_rows())
    throw std::invalid_argument("wedge: incompatible value dimensions");
  LForm out(omega.degree() + tau.degree(), omega.rank(), omega.num_vars(),
            wedge_rows(omega, tau), wedge_cols(omega, tau));
  for (const auto& [I, A] : omega.components()) {
    for (const auto& [J, B] : tau.components()) {
      IndexTuple merged;
      int sign = merge_sign(I, J, merged);
      if (sign == 0) continue;
      PolyMatrix prod = A * B;
      if (sign < 0) prod = -prod;
      out.set_component(merged, out.component(merged) + prod);
    }
  }
  return out;
}

LForm graded_bracket(const LForm& omega, const LForm& tau) {
  check_same_base(omega, tau, "graded_bracket");
  if (omega.value_rows() != omega.value_cols() || tau.value_rows() != tau.value_cols() ||
      omega.value_rows() != tau.value_rows())
    throw std::invalid_argument("graded_bracket: values must be square of equal size");
  LForm anti = wedge(tau, omega);
  if ((omega.degree() * tau.degree()) % 2 == 0) anti = -anti;
  return wedge(omega, tau) + anti;
}

LForm d_L(const AlgebroidSpec& spec, const LForm& omega) {
  const std::size_t r = spec.rank();
  const std::size_t k = omega.degree();
  LForm out(k + 1, r, omega.num_vars(), omega.value_rows(), omega.value_cols());
  if (k >= r) return out;  // nothing to produce above top degree

  // Iterate over increasing (k+1)-tuples.
  IndexTuple T(k + 1);
  for (std::size_t i = 0; i <= k; ++i) T[i] = i;
  for (;;) {
    PolyMatrix acc(omega.value_rows(), omega.value_cols(), omega.num_vars());
    for (std::size_t s = 0; s <= k; ++s) {
      IndexTuple rest;
      rest.reserve(k);
      for (std::size_t t = 0; t <= k; ++t)
        if (t != s) rest.push_back(T[t]);
      PolyMatrix term = anchor_derive(spec, T[s], omega.component(rest));
      acc = s % 2 == 0 ? acc + term : acc - term;
    }
    for (std::size_t s = 0; s <= k; ++s) {
      for (std::size_t u = s + 1; u <= k; ++u) {
        auto c = spec.structure(T[s], T[u]);
        IndexTuple rest;
        rest.reserve(k - 1);
        for (std::size_t t = 0; t <= k; ++t)
          if (t != s && t != u) rest.push_back(T[t]);
        PolyMatrix inner(omega.value_rows(), omega.value_cols(), omega.num_vars());
        for (std::size_t l = 0; l < r; ++l) {
          if (c[l].is_zero()) continue;
          IndexTuple full;
          full.reserve(k);
          full.push_back(l);
          full.insert(full.end(), rest.begin(), rest.end());
          inner = inner + omega.eval(full).scale(c[l]);
        }
        acc = (s + u) % 2 == 0 ? acc + inner : acc - inner;
      }
    }
    out.set_component(T, acc);

    // next increasing tuple
    std::size_t pos = k + 1;
    while (pos-- > 0) {
      if (T[pos] < r - (k + 1 - pos)) {
        ++T[pos];
        for (std::size_t q = pos + 1; q <= k; ++q) T[q] = T[q - 1] + 1;
        break;
      }
      if (pos == 0) return out;
    }
  }
}

LForm insert(const AlgebroidSpec& spec, const SectionExpr& xi, const LForm& omega) {
  const std::size_t r = spec.rank();
  if (xi.components.size() != r) throw std::invalid_argument("insert: section has wrong rank");
  if (omega.degree() == 0)
    return LForm(0, r, omega.num_vars(), omega.value_rows(), omega.value_cols());
  LForm out(omega.degree() - 1, r, omega.num_vars(), omega.value_rows(), omega.value_cols());
  for (const auto& [T, M] : omega.components()) {
    for (std::size_t pos = 0; pos < T.size(); ++pos) {
      const Polynomial& f = xi.components[T[pos]];
      if (f.is_zero()) continue;
      IndexTuple rest;
      rest.reserve(T.size() - 1);
      for (std::size_t t = 0; t < T.size(); ++t)
        if (t != pos) rest.push_back(T[t]);
      PolyMatrix term = M.scale(f);
      if (pos % 2 == 1) term = -term;
      out.set_component(rest, out.component(rest) + term);
    }
  }
  return out;
}

LForm lie_derivative(const AlgebroidSpec& spec, const SectionExpr& xi, const LForm& omega) {
  const std::size_t r = spec.rank();
  const std::size_t k = omega.degree();
  LForm out(k, r, omega.num_vars(), omega.value_rows(), omega.value_cols());

  // Bracket sections [xi, e_j] as coefficient vectors, computed once.
  std::vector<SectionExpr> br;
  br.reserve(r);
  for (std::size_t j = 0; j < r; ++j)
    br.push_back(section_bracket(spec, xi, SectionExpr::basis(r, spec.num_vars(), j)));

  IndexTuple T(k);
  for (std::size_t i = 0; i < k; ++i) T[i] = i;
  bool done = (k > r);
  while (!done) {
    PolyMatrix acc(omega.value_rows(), omega.value_cols(), omega.num_vars());
    {
      const PolyMatrix m = omega.component(T);
      PolyMatrix derived(m.rows(), m.cols(), m.num_vars());
      for (std::size_t a = 0; a < m.rows(); ++a)
        for (std::size_t b = 0; b < m.cols(); ++b)
          derived(a, b) = anchor_apply(spec, xi, m(a, b));
      acc = acc + derived;
    }
    for (std::size_t t = 0; t < k; ++t) {
      for (std::size_t l = 0; l < r; ++l) {
        const Polynomial& coeff = br[T[t]].components[l];
        if (coeff.is_zero()) continue;
        IndexTuple replaced = T;
        replaced[t] = l;
        acc = acc - omega.eval(replaced).scale(coeff);
      }
    }
    out.set_component(T, acc);

    if (k == 0) break;
    std::size_t pos = k;
    done = true;
    while (pos-- > 0) {
      if (T[pos] < r - (k - pos)) {
        ++T[pos];
        for (std::size_t q = pos + 1; q < k; ++q) T[q] = T[q - 1] + 1;
        done = false;
        break;
      }
    }
  }
  return out;
}

LForm covariant_d(const AlgebroidSpec& spec, const ConnectionForm& A, const LForm& omega,
                  ValuedIn valued_in) {
  if (A.alpha.rank() != omega.rank() || A.alpha.num_vars() != omega.num_vars())
    throw std::invalid_argument("covariant_d: connection and form live on different algebroids");
  LForm base = d_L(spec, omega);
  if (valued_in == ValuedIn::E) {
    if (omega.value_rows() != A.dim())
      throw std::invalid_argument("covariant_d: E-valued form has wrong dimension");
    return base + wedge(A.alpha, omega);
  }
  if (omega.value_rows() != A.dim() || omega.value_cols() != A.dim())
    throw std::invalid_argument("covariant_d: End(E)-valued form has wrong dimension");
  return base + graded_bracket(A.alpha, omega);
}

LForm curvature(const AlgebroidSpec& spec, const ConnectionForm& A) {
  return d_L(spec, A.alpha) + wedge(A.alpha, A.alpha);
}

LForm bianchi_check(const AlgebroidSpec& spec, const ConnectionForm& A) {
  return covariant_d(spec, A, curvature(spec, A), ValuedIn::EndE);
}

ConnectionForm gauge_transform(const AlgebroidSpec& spec, const ConnectionForm& A,
                               const GaugeMap& phi) {
  if (phi.dim() != A.dim())
    throw std::invalid_argument("gauge_transform: gauge map has wrong dimension");
  LForm dphi = d_L(spec, LForm::from_matrix(A.alpha.rank(), phi.phi));
  LForm out = dphi.conjugate(phi.phi_inv, PolyMatrix::identity(phi.dim(), phi.phi.num_vars()));
  out = out + A.alpha.conjugate(phi.phi_inv, phi.phi);
  return ConnectionForm(std::move(out));
}

// ---- identity suites --------------------------------------------------------

namespace {

std::string describe_failure(const LForm& residual) {
  for (const auto& [t, m] : residual.components()) {
    for (std::size_t a = 0; a < m.rows(); ++a)
      for (std::size_t b = 0; b < m.cols(); ++b) {
        if (m(a, b).is_zero()) continue;
        std::ostringstream os;
        os << "nonzero residual on tuple (";
        for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
        os << "), entry (" << a << "," << b << "): " << m(a, b).str();
        return os.str();
      }
  }
  return "";
}

struct SuiteRunner {
  SuiteReport report;

  void run(const std::string& name, std::size_t trials,
           const std::function<LForm(RandomSource&)>& residual_fn, std::uint64_t seed) {
    IdentityCheck check{name, trials, true, ""};
    for (std::size_t t = 0; t < trials; ++t) {
      RandomSource rs(derive_seed(seed, t));
      LForm res = residual_fn(rs);
      if (!res.is_zero()) {
        check.pass = false;
        check.first_failure = "trial " + std::to_string(t) + ": " + describe_failure(res);
        break;
      }
    }
    report.checks.push_back(std::move(check));
  }
};

}  // namespace

bool SuiteReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.pass; });
}

std::size_t SuiteReport::passed() const {
  std::size_t n = 0;
  for (const auto& c : checks) n += c.pass;
  return n;
}

SuiteReport cartan_identity_suite(const AlgebroidSpec& spec, std::size_t trials,
                                  std::uint64_t seed, std::size_t max_degree) {
  const std::size_t r = spec.rank();
  const std::size_t n = spec.num_vars();
  auto deg = [&](RandomSource& rs, std::size_t lo = 0) {
    return lo + rs.uint(std::min<std::size_t>(r, 3) + 1 - lo);
  };
  auto scalar_form = [&](RandomSource& rs, std::size_t k) {
    return rs.form(k, r, n, 1, 1, max_degree);
  };

  SuiteRunner runner;
  std::uint64_t salt = 0;

  runner.run("insertion graded Leibniz", trials, [&](RandomSource& rs) {
    std::size_t p = deg(rs), q = deg(rs);
    LForm w = scalar_form(rs, p), t = scalar_form(rs, q);
    SectionExpr xi = rs.section(spec, max_degree);
    LForm lhs = insert(spec, xi, wedge(w, t));
    LForm rhs = wedge(insert(spec, xi, w), t);
    LForm second = wedge(w, insert(spec, xi, t));
    rhs = p % 2 == 0 ? rhs + second : rhs - second;
    return lhs - rhs;
  }, derive_seed(seed, 1000 + salt++));

  runner.run("Lie derivative is a derivation", trials, [&](RandomSource& rs) {
    std::size_t p = deg(rs), q = deg(rs);
    LForm w = scalar_form(rs, p), t = scalar_form(rs, q);
    SectionExpr xi = rs.section(spec, max_degree);
    LForm lhs = lie_derivative(spec, xi, wedge(w, t));
    LForm rhs = wedge(lie_derivative(spec, xi, w), t) + wedge(w, lie_derivative(spec, xi, t));
    return lhs - rhs;
  }, derive_seed(seed, 1000 + salt++));

  runner.run("[L_xi, i_eta] = i_[xi,eta]", trials, [&](RandomSource& rs) {
    std::size_t p = deg(rs, 1);
    LForm w = scalar_form(rs, p);
    SectionExpr xi = rs.section(spec, max_degree);
    SectionExpr eta = rs.section(spec, max_degree);
    LForm lhs = lie_derivative(spec, xi, insert(spec, eta, w)) -
                insert(spec, eta, lie_derivative(spec, xi, w));
    LForm rhs = insert(spec, section_bracket(spec, xi, eta), w);
    return lhs - rhs;
  }, derive_seed(seed, 1000 + salt++));

  runner.run("[L_xi, L_eta] = L_[xi,eta]", trials, [&](RandomSource& rs) {
    std::size_t p = deg(rs);
    LForm w = scalar_form(rs, p);
    SectionExpr xi = rs.section(spec, max_degree);
    SectionExpr eta = rs.section(spec, max_degree);
    LForm lhs = lie_derivative(spec, xi, lie_derivative(spec, eta, w)) -
                lie_derivative(spec, eta, lie_derivative(spec, xi, w));
    LForm rhs = lie_derivative(spec, section_bracket(spec, xi, eta), w);
    return lhs - rhs;
  }, derive_seed(seed, 1000 + salt++));

  runner.run("[i_xi, i_eta] = 0", trials, [&](RandomSource& rs) {
    std::size_t p = deg(rs, 1);
    LForm w = scalar_form(rs, p);
    SectionExpr xi = rs.section(spec, max_degree);
    SectionExpr eta = rs.section(spec, max_degree);
    return insert(spec, xi, insert(spec, eta, w)) + insert(spec, eta, insert(spec, xi, w));
  }, derive_seed(seed, 1000 + salt++));

  runner.run("d_L graded Leibniz", trials, [&](RandomSource& rs) {
    std::size_t p = deg(rs), q = deg(rs);
    LForm w = scalar_form(rs, p), t = scalar_form(rs, q);
    LForm lhs = d_L(spec, wedge(w, t));
    LForm rhs = wedge(d_L(spec, w), t);
    LForm second = wedge(w, d_L(spec, t));
    rhs = p % 2 == 0 ? rhs + second : rhs - second;
    return lhs - rhs;
  }, derive_seed(seed, 1000 + salt++));

  runner.run("d_L o d_L = 0", trials, [&](RandomSource& rs) {
    std::size_t p = deg(rs);
    LForm w = scalar_form(rs, p);
    return d_L(spec, d_L(spec, w));
  }, derive_seed(seed, 1000 + salt++));

  runner.run("[L_xi, d_L] = 0", trials, [&](RandomSource& rs) {
    std::size_t p = deg(rs);
    LForm w = scalar_form(rs, p);
    SectionExpr xi = rs.section(spec, max_degree);
    return lie_derivative(spec, xi, d_L(spec, w)) - d_L(spec, lie_derivative(spec, xi, w));
  }, derive_seed(seed, 1000 + salt++));

  runner.run("Cartan magic formula", trials, [&](RandomSource& rs) {
    std::size_t p = deg(rs);
    LForm w = scalar_form(rs, p);
    SectionExpr xi = rs.section(spec, max_degree);
    LForm lhs = insert(spec, xi, d_L(spec, w)) + d_L(spec, insert(spec, xi, w));
    return lhs - lie_derivative(spec, xi, w);
  }, derive_seed(seed, 1000 + salt++));

  return runner.report;
}

SuiteReport connection_identity_suite(const AlgebroidSpec& spec, std::size_t dim,
                                      std::size_t trials, std::uint64_t seed,
                                      std::size_t max_degree) {
  const std::size_t r = spec.rank();
  const std::size_t n = spec.num_vars();
  auto deg = [&](RandomSource& rs) { return rs.uint(std::min<std::size_t>(r, 2) + 1); };

  SuiteRunner runner;
  std::uint64_t salt = 0;

  runner.run("reference connection is flat", trials, [&](RandomSource& rs) {
    LForm w = rs.form(deg(rs), r, n, dim, 1, max_degree);
    ConnectionForm zero = ConnectionForm::zero(r, n, dim);
    return covariant_d(spec, zero, covariant_d(spec, zero, w, ValuedIn::E), ValuedIn::E);
  }, derive_seed(seed, 2000 + salt++));

  runner.run("covariant graded Leibniz (scalar x E)", trials, [&](RandomSource& rs) {
    std::size_t p = deg(rs), q = deg(rs);
    ConnectionForm A = rs.connection(r, n, dim, max_degree);
    LForm alpha = rs.form(p, r, n, 1, 1, max_degree);
    LForm w = rs.form(q, r, n, dim, 1, max_degree);
    LForm lhs = covariant_d(spec, A, wedge(alpha, w), ValuedIn::E);
    LForm rhs = wedge(d_L(spec, alpha), w);
    LForm second = wedge(alpha, covariant_d(spec, A, w, ValuedIn::E));
    rhs = p % 2 == 0 ? rhs + second : rhs - second;
    return lhs - rhs;
  }, derive_seed(seed, 2000 + salt++));

  runner.run("covariant derivative is a bracket derivation", trials, [&](RandomSource& rs) {
    std::size_t p = deg(rs), q = deg(rs);
    ConnectionForm A = rs.connection(r, n, dim, max_degree);
    LForm w = rs.form(p, r, n, dim, dim, max_degree);
    LForm t = rs.form(q, r, n, dim, dim, max_degree);
    LForm lhs = covariant_d(spec, A, graded_bracket(w, t), ValuedIn::EndE);
    LForm rhs = graded_bracket(covariant_d(spec, A, w, ValuedIn::EndE), t);
    LForm second = graded_bracket(w, covariant_d(spec, A, t, ValuedIn::EndE));
    rhs = p % 2 == 0 ? rhs + second : rhs - second;
    return lhs - rhs;
  }, derive_seed(seed, 2000 + salt++));

  runner.run("covariant square equals curvature action (E)", trials, [&](RandomSource& rs) {
    std::size_t p = deg(rs);
    ConnectionForm A = rs.connection(r, n, dim, max_degree);
    LForm w = rs.form(p, r, n, dim, 1, max_degree);
    LForm lhs = covariant_d(spec, A, covariant_d(spec, A, w, ValuedIn::E), ValuedIn::E);
    return lhs - wedge(curvature(spec, A), w);
  }, derive_seed(seed, 2000 + salt++));

  runner.run("covariant square equals curvature action (End E)", trials, [&](RandomSource& rs) {
    std::size_t p = deg(rs);
    ConnectionForm A = rs.connection(r, n, dim, max_degree);
    LForm g = rs.form(p, r, n, dim, dim, max_degree);
    LForm lhs = covariant_d(spec, A, covariant_d(spec, A, g, ValuedIn::EndE), ValuedIn::EndE);
    return lhs - graded_bracket(curvature(spec, A), g);
  }, derive_seed(seed, 2000 + salt++));

  runner.run("Bianchi identity", trials, [&](RandomSource& rs) {
    ConnectionForm A = rs.connection(r, n, dim, max_degree);
    return bianchi_check(spec, A);
  }, derive_seed(seed, 2000 + salt++));

  runner.run("gauge covariance of curvature", trials, [&](RandomSource& rs) {
    ConnectionForm A = rs.connection(r, n, dim, max_degree);
    GaugeMap phi = rs.gauge(dim, n, max_degree);
    LForm lhs = curvature(spec, gauge_transform(spec, A, phi));
    LForm rhs = curvature(spec, A).conjugate(phi.phi_inv, phi.phi);
    return lhs - rhs;
  }, derive_seed(seed, 2000 + salt++));

  return runner.report;
}

}  // namespace moduli
