#ifndef MODULI_POLYNOMIAL_HPP
#define MODULI_POLYNOMIAL_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "moduli/rational.hpp"

namespace moduli {

/// Exponent vector of a monomial; length equals the ambient variable count.
using Monomial = std::vector<std::uint32_t>;

/// Exact multivariate polynomial over the rationals in variables x0..x{n-1}.
///
/// Canonical form: the term map never stores a zero coefficient, so two
/// polynomials are equal iff their term maps are equal. All operations are
/// exact; values are immutable in spirit (mutating ops are private helpers).
class Polynomial {
public:
  explicit Polynomial(std::size_t num_vars = 0) : num_vars_(num_vars) {}

  static Polynomial zero(std::size_t num_vars) { return Polynomial(num_vars); }
  static Polynomial constant(std::size_t num_vars, const Rational& c);
  /// The monomial x_i (requires i < num_vars).
  static Polynomial variable(std::size_t num_vars, std::size_t i);
  static Polynomial monomial(const Monomial& exps, const Rational& c);

  /// Parses the grammar
  ///   poly   := term (("+"|"-") term)* | "0"
  ///   term   := coeff ("*" factor)* | factor ("*" factor)*
  ///   factor := "x" index ("^" posint)?
  ///   coeff  := int | int "/" posint
  /// Whitespace is insignificant; a leading sign on the first term is allowed.
  /// Throws std::invalid_argument with the offending position on bad input or
  /// a variable index >= num_vars.
  static Polynomial parse(const std::string& text, std::size_t num_vars);

  std::size_t num_vars() const { return num_vars_; }
  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Constant term (zero if absent).
  Rational constant_value() const;
  std::size_t total_degree() const;

  Polynomial operator-() const;
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(const Rational& c) const;
  Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
  Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }

  bool operator==(const Polynomial& o) const {
    return num_vars_ == o.num_vars_ && terms_ == o.terms_;
  }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  /// Exact partial derivative with respect to x_i.
  Polynomial partial(std::size_t i) const;

  /// Exact evaluation at a rational point (size must equal num_vars).
  Rational eval(const std::vector<Rational>& point) const;

  /// Canonical text form: terms ordered lexicographically on exponent
  /// vectors, highest first. parse(format(p)) == p.
  std::string str() const;

private:
  void add_term(const Monomial& m, const Rational& c);
  void check_vars(const Polynomial& o) const;

  std::size_t num_vars_;
  std::map<Monomial, Rational> terms_;
};

inline Polynomial operator*(const Rational& c, const Polynomial& p) { return p * c; }

std::ostream& operator<<(std::ostream& os, const Polynomial& p);

}  // namespace moduli

#endif
