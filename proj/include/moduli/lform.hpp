#ifndef MODULI_LFORM_HPP
#define MODULI_LFORM_HPP

#include <map>
#include <vector>

#include "moduli/algebroid.hpp"
#include "moduli/polynomial.hpp"

namespace moduli {

/// Dense matrix with polynomial entries; all entries share num_vars.
class PolyMatrix {
public:
  PolyMatrix() : rows_(0), cols_(0), num_vars_(0) {}
  PolyMatrix(std::size_t rows, std::size_t cols, std::size_t num_vars)
      : rows_(rows), cols_(cols), num_vars_(num_vars),
        a_(rows * cols, Polynomial::zero(num_vars)) {}

  static PolyMatrix identity(std::size_t m, std::size_t num_vars);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t num_vars() const { return num_vars_; }
  Polynomial& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Polynomial& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  bool is_zero() const;
  PolyMatrix operator+(const PolyMatrix& o) const;
  PolyMatrix operator-(const PolyMatrix& o) const;
  PolyMatrix operator-() const;
  /// Matrix product; a 1x1 operand on either side acts as a scalar.
  PolyMatrix operator*(const PolyMatrix& o) const;
  PolyMatrix scale(const Polynomial& f) const;
  PolyMatrix scale(const Rational& c) const;
  /// Entrywise commutator product A*B - B*A (square matrices).
  PolyMatrix commutator_with(const PolyMatrix& o) const;

  bool operator==(const PolyMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

private:
  std::size_t rows_, cols_, num_vars_;
  std::vector<Polynomial> a_;
};

/// Index tuple of basis sections; components are stored on strictly
/// increasing tuples only.
using IndexTuple = std::vector<std::size_t>;

/// Degree-k form on a rank-r algebroid valued in rows x cols polynomial
/// matrices: scalar forms are 1x1, E-valued forms m x 1, End(E)-valued m x m.
///
/// Only strictly increasing index tuples are stored and zero components are
/// pruned, so equality of forms is equality of component maps. Values on
/// arbitrary tuples follow from full antisymmetry via the permutation sign.
class LForm {
public:
  LForm(std::size_t degree, std::size_t rank, std::size_t num_vars, std::size_t rows,
        std::size_t cols);

  static LForm scalar_zero(std::size_t degree, std::size_t rank, std::size_t num_vars) {
    return LForm(degree, rank, num_vars, 1, 1);
  }
  /// Degree-0 form wrapping a single matrix.
  static LForm from_matrix(std::size_t rank, const PolyMatrix& value);
  /// Basis covector e_i^* as a scalar 1-form.
  static LForm basis_covector(std::size_t rank, std::size_t num_vars, std::size_t i);

  std::size_t degree() const { return degree_; }
  std::size_t rank() const { return rank_; }
  std::size_t num_vars() const { return num_vars_; }
  std::size_t value_rows() const { return rows_; }
  std::size_t value_cols() const { return cols_; }
  bool is_scalar() const { return rows_ == 1 && cols_ == 1; }

  const std::map<IndexTuple, PolyMatrix>& components() const { return components_; }
  bool is_zero() const { return components_.empty(); }

  /// Component on a strictly increasing tuple (zero matrix if absent).
  PolyMatrix component(const IndexTuple& tuple) const;
  void set_component(const IndexTuple& tuple, PolyMatrix value);
  /// Value on an arbitrary tuple: zero on repeated indices, otherwise the
  /// sign of the sorting permutation times the stored component.
  PolyMatrix eval(const IndexTuple& tuple) const;

  LForm operator+(const LForm& o) const;
  LForm operator-(const LForm& o) const;
  LForm operator-() const;
  LForm scale(const Polynomial& f) const;
  LForm scale(const Rational& c) const;
  /// Left/right matrix multiplication of every component.
  LForm conjugate(const PolyMatrix& left, const PolyMatrix& right) const;

  bool operator==(const LForm& o) const;

private:
  void check_compatible(const LForm& o) const;

  std::size_t degree_, rank_, num_vars_, rows_, cols_;
  std::map<IndexTuple, PolyMatrix> components_;
};

/// Connection form alpha: the connection is nabla = nabla_0 + mu(alpha) with
/// nabla_0 the canonical flat connection a(xi) applied entrywise.
struct ConnectionForm {
  LForm alpha;

  ConnectionForm(LForm a);
  static ConnectionForm zero(std::size_t rank, std::size_t num_vars, std::size_t dim);
  std::size_t dim() const { return alpha.value_rows(); }
};

/// Gauge transformation with an exact polynomial inverse.
struct GaugeMap {
  PolyMatrix phi;
  PolyMatrix phi_inv;

  GaugeMap(PolyMatrix p, PolyMatrix p_inv);
  static GaugeMap identity(std::size_t m, std::size_t num_vars);
  std::size_t dim() const { return phi.rows(); }
};

/// Sign of the permutation sorting `tuple` increasingly, or 0 on repeats;
/// writes the sorted tuple through `sorted`.
int sort_sign(const IndexTuple& tuple, IndexTuple& sorted);

}  // namespace moduli

#endif
