#include "moduli/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace moduli {

Polynomial Polynomial::constant(std::size_t num_vars, const Rational& c) {
  Polynomial p(num_vars);
  p.add_term(Monomial(num_vars, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t num_vars, std::size_t i) {
  if (i >= num_vars) throw std::out_of_range("Polynomial::variable: index out of range");
  Monomial m(num_vars, 0);
  m[i] = 1;
  return monomial(m, Rational(1));
}

Polynomial Polynomial::monomial(const Monomial& exps, const Rational& c) {
  Polynomial p(exps.size());
  p.add_term(exps, c);
  return p;
}

bool Polynomial::is_constant() const {
  if (terms_.empty()) return true;
  return terms_.size() == 1 && terms_.begin()->first == Monomial(num_vars_, 0);
}

Rational Polynomial::constant_value() const {
  auto it = terms_.find(Monomial(num_vars_, 0));
  return it == terms_.end() ? Rational(0) : it->second;
}

std::size_t Polynomial::total_degree() const {
  std::size_t d = 0;
  for (const auto& [m, c] : terms_) {
    std::size_t t = 0;
    for (auto e : m) t += e;
    d = std::max(d, t);
  }
  return d;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void Polynomial::check_vars(const Polynomial& o) const {
  if (num_vars_ != o.num_vars_)
    throw std::invalid_argument("Polynomial: operands have different variable counts");
}

Polynomial Polynomial::operator-() const {
  Polynomial r(num_vars_);
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  check_vars(o);
  Polynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  check_vars(o);
  Polynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  check_vars(o);
  Polynomial r(num_vars_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      Monomial m(num_vars_);
      for (std::size_t i = 0; i < num_vars_; ++i) m[i] = ma[i] + mb[i];
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

Polynomial Polynomial::operator*(const Rational& c) const {
  Polynomial r(num_vars_);
  if (c.is_zero()) return r;
  for (const auto& [m, t] : terms_) r.terms_.emplace(m, t * c);
  return r;
}

Polynomial Polynomial::partial(std::size_t i) const {
  if (i >= num_vars_) throw std::out_of_range("Polynomial::partial: index out of range");
  Polynomial r(num_vars_);
  for (const auto& [m, c] : terms_) {
    if (m[i] == 0) continue;
    Monomial d = m;
    d[i] -= 1;
    r.add_term(d, c * Rational(static_cast<long>(m[i])));
  }
  return r;
}

Rational Polynomial::eval(const std::vector<Rational>& point) const {
  if (point.size() != num_vars_)
    throw std::invalid_argument("Polynomial::eval: point has wrong dimension");
  Rational acc(0);
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (std::size_t i = 0; i < num_vars_; ++i)
      for (std::uint32_t e = 0; e < m[i]; ++e) t *= point[i];
    acc += t;
  }
  return acc;
}

namespace {

struct Parser {
  const std::string& s;
  std::size_t pos = 0;
  std::size_t num_vars;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("polynomial parse error at position " + std::to_string(pos) +
                                ": " + what + " in '" + s + "'");
  }

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool peek(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }

  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos;
    return true;
  }

  mpz_class parse_uint() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) fail("expected a digit");
    return mpz_class(s.substr(start, pos - start));
  }

  // coeff := int | int "/" posint  (sign handled by the caller)
  Rational parse_coeff() {
    mpz_class num = parse_uint();
    if (accept('/')) {
      mpz_class den = parse_uint();
      if (sgn(den) == 0) fail("zero denominator");
      return Rational(mpq_class(num, den));
    }
    return Rational(mpq_class(num));
  }

  // factor := "x" index ("^" posint)?
  void parse_factor(Monomial& m) {
    skip_ws();
    if (pos >= s.size() || s[pos] != 'x') fail("expected 'x'");
    ++pos;
    mpz_class idx = parse_uint();
    if (idx >= static_cast<long>(num_vars))
      fail("variable index " + idx.get_str() + " out of range (num_vars = " +
           std::to_string(num_vars) + ")");
    std::uint32_t exp = 1;
    if (accept('^')) {
      mpz_class e = parse_uint();
      if (e == 0 || !e.fits_uint_p()) fail("exponent must be a small positive integer");
      exp = static_cast<std::uint32_t>(e.get_ui());
    }
    m[idx.get_ui()] += exp;
  }

  // term := coeff ("*" factor)* | factor ("*" factor)*
  void parse_term(Polynomial& out, bool negative) {
    skip_ws();
    Rational coeff(1);
    Monomial m(num_vars, 0);
    bool has_coeff = pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]));
    if (has_coeff)
      coeff = parse_coeff();
    else
      parse_factor(m);
    while (accept('*')) parse_factor(m);
    if (negative) coeff = -coeff;
    out += Polynomial::monomial(m, coeff);
  }

  Polynomial run() {
    Polynomial out(num_vars);
    skip_ws();
    if (pos >= s.size()) fail("empty input");
    bool negative = false;
    if (accept('-'))
      negative = true;
    else
      accept('+');
    parse_term(out, negative);
    for (;;) {
      skip_ws();
      if (pos >= s.size()) break;
      if (accept('-'))
        negative = true;
      else if (accept('+'))
        negative = false;
      else
        fail("expected '+' or '-'");
      parse_term(out, negative);
    }
    return out;
  }
};

}  // namespace

Polynomial Polynomial::parse(const std::string& text, std::size_t num_vars) {
  Parser p{text, 0, num_vars};
  return p.run();
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest exponent vector first.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    Rational a = c;
    if (first) {
      if (a.sign() < 0) {
        os << "-";
        a = -a;
      }
    } else {
      os << (a.sign() < 0 ? " - " : " + ");
      if (a.sign() < 0) a = -a;
    }
    bool is_const = std::all_of(m.begin(), m.end(), [](std::uint32_t e) { return e == 0; });
    bool wrote_coeff = false;
    if (is_const || !a.is_one()) {
      os << a.str();
      wrote_coeff = true;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (wrote_coeff) os << "*";
      wrote_coeff = true;
      os << "x" << i;
      if (m[i] > 1) os << "^" << m[i];
    }
    first = false;
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Polynomial& p) { return os << p.str(); }

}  // namespace moduli
