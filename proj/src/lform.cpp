#include "moduli/lform.hpp"

#include <algorithm>

namespace moduli {

PolyMatrix PolyMatrix::identity(std::size_t m, std::size_t num_vars) {
  PolyMatrix id(m, m, num_vars);
  for (std::size_t i = 0; i < m; ++i) id(i, i) = Polynomial::constant(num_vars, Rational(1));
  return id;
}

bool PolyMatrix::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](const Polynomial& p) { return p.is_zero(); });
}

PolyMatrix PolyMatrix::operator+(const PolyMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::invalid_argument("PolyMatrix: shape mismatch in +");
  PolyMatrix r = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
  return r;
}

PolyMatrix PolyMatrix::operator-(const PolyMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::invalid_argument("PolyMatrix: shape mismatch in -");
  PolyMatrix r = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
  return r;
}

PolyMatrix PolyMatrix::operator-() const {
  PolyMatrix r = *this;
  for (auto& p : r.a_) p = -p;
  return r;
}

PolyMatrix PolyMatrix::operator*(const PolyMatrix& o) const {
  if (rows_ == 1 && cols_ == 1) return o.scale(a_[0]);
  if (o.rows_ == 1 && o.cols_ == 1) return scale(o.a_[0]);
  if (cols_ != o.rows_) throw std::invalid_argument("PolyMatrix: shape mismatch in *");
  PolyMatrix r(rows_, o.cols_, num_vars_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Polynomial& x = (*this)(i, k);
      if (x.is_zero()) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) {
        if (o(k, j).is_zero()) continue;
        r(i, j) += x * o(k, j);
      }
    }
  return r;
}

PolyMatrix PolyMatrix::scale(const Polynomial& f) const {
  PolyMatrix r = *this;
  for (auto& p : r.a_) p = p * f;
  return r;
}

PolyMatrix PolyMatrix::scale(const Rational& c) const {
  PolyMatrix r = *this;
  for (auto& p : r.a_) p = p * c;
  return r;
}

PolyMatrix PolyMatrix::commutator_with(const PolyMatrix& o) const {
  return *this * o - o * *this;
}

int sort_sign(const IndexTuple& tuple, IndexTuple& sorted) {
  sorted = tuple;
  int sign = 1;
  // Insertion sort, counting swaps; fine for the short tuples we use.
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    std::size_t j = i;
    while (j > 0 && sorted[j - 1] > sorted[j]) {
      std::swap(sorted[j - 1], sorted[j]);
      sign = -sign;
      --j;
    }
  }
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i - 1] == sorted[i]) return 0;
  return sign;
}

LForm::LForm(std::size_t degree, std::size_t rank, std::size_t num_vars, std::size_t rows,
             std::size_t cols)
    : degree_(degree), rank_(rank), num_vars_(num_vars), rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("LForm: value dimensions must be >= 1");
}

LForm LForm::from_matrix(std::size_t rank, const PolyMatrix& value) {
  LForm f(0, rank, value.num_vars(), value.rows(), value.cols());
  f.set_component({}, value);
  return f;
}

LForm LForm::basis_covector(std::size_t rank, std::size_t num_vars, std::size_t i) {
  LForm f(1, rank, num_vars, 1, 1);
  PolyMatrix one(1, 1, num_vars);
  one(0, 0) = Polynomial::constant(num_vars, Rational(1));
  f.set_component({i}, one);
  return f;
}

PolyMatrix LForm::component(const IndexTuple& tuple) const {
  auto it = components_.find(tuple);
  if (it != components_.end()) return it->second;
  return PolyMatrix(rows_, cols_, num_vars_);
}

void LForm::set_component(const IndexTuple& tuple, PolyMatrix value) {
  if (tuple.size() != degree_) throw std::invalid_argument("LForm: tuple length != degree");
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (tuple[i] >= rank_) throw std::invalid_argument("LForm: index out of range");
    if (i > 0 && tuple[i - 1] >= tuple[i])
      throw std::invalid_argument("LForm: tuple must be strictly increasing");
  }
  if (value.rows() != rows_ || value.cols() != cols_ || value.num_vars() != num_vars_)
    throw std::invalid_argument("LForm: component has wrong shape");
  if (value.is_zero())
    components_.erase(tuple);
  else
    components_[tuple] = std::move(value);
}

PolyMatrix LForm::eval(const IndexTuple& tuple) const {
  IndexTuple sorted;
  int sign = sort_sign(tuple, sorted);
  if (sign == 0) return PolyMatrix(rows_, cols_, num_vars_);
  PolyMatrix m = component(sorted);
  return sign > 0 ? m : -m;
}

void LForm::check_compatible(const LForm& o) const {
  if (degree_ != o.degree_ || rank_ != o.rank_ || num_vars_ != o.num_vars_ ||
      rows_ != o.rows_ || cols_ != o.cols_)
    throw std::invalid_argument("LForm: incompatible forms");
}

// The zero form has no well-defined degree (insertion on degree 0 produces
// one); sums absorb an empty operand of mismatched degree.
LForm LForm::operator+(const LForm& o) const {
  if (degree_ != o.degree_) {
    if (o.is_zero()) return *this;
    if (is_zero()) return o;
  }
  check_compatible(o);
  LForm r = *this;
  for (const auto& [t, m] : o.components_) r.set_component(t, r.component(t) + m);
  return r;
}

LForm LForm::operator-(const LForm& o) const {
  if (degree_ != o.degree_) {
    if (o.is_zero()) return *this;
    if (is_zero()) return -o;
  }
  check_compatible(o);
  LForm r = *this;
  for (const auto& [t, m] : o.components_) r.set_component(t, r.component(t) - m);
  return r;
}

LForm LForm::operator-() const {
  LForm r = *this;
  for (auto& [t, m] : r.components_) m = -m;
  return r;
}

LForm LForm::scale(const Polynomial& f) const {
  LForm r(degree_, rank_, num_vars_, rows_, cols_);
  if (f.is_zero()) return r;
  for (const auto& [t, m] : components_) r.set_component(t, m.scale(f));
  return r;
}

LForm LForm::scale(const Rational& c) const {
  LForm r(degree_, rank_, num_vars_, rows_, cols_);
  if (c.is_zero()) return r;
  for (const auto& [t, m] : components_) r.set_component(t, m.scale(c));
  return r;
}

LForm LForm::conjugate(const PolyMatrix& left, const PolyMatrix& right) const {
  LForm r(degree_, rank_, num_vars_, left.rows(), right.cols());
  for (const auto& [t, m] : components_) r.set_component(t, left * m * right);
  return r;
}

bool LForm::operator==(const LForm& o) const {
  return degree_ == o.degree_ && rank_ == o.rank_ && num_vars_ == o.num_vars_ &&
         rows_ == o.rows_ && cols_ == o.cols_ && components_ == o.components_;
}

ConnectionForm::ConnectionForm(LForm a) : alpha(std::move(a)) {
  if (alpha.degree() != 1) throw std::invalid_argument("ConnectionForm: degree must be 1");
  if (alpha.value_rows() != alpha.value_cols())
    throw std::invalid_argument("ConnectionForm: values must be square matrices");
}

ConnectionForm ConnectionForm::zero(std::size_t rank, std::size_t num_vars, std::size_t dim) {
  return ConnectionForm(LForm(1, rank, num_vars, dim, dim));
}

GaugeMap::GaugeMap(PolyMatrix p, PolyMatrix p_inv) : phi(std::move(p)), phi_inv(std::move(p_inv)) {
  if (phi.rows() != phi.cols() || phi_inv.rows() != phi_inv.cols() ||
      phi.rows() != phi_inv.rows())
    throw std::invalid_argument("GaugeMap: matrices must be square of equal size");
  PolyMatrix id = PolyMatrix::identity(phi.rows(), phi.num_vars());
  if (!(phi * phi_inv == id) || !(phi_inv * phi == id))
    throw std::invalid_argument("GaugeMap: phi_inv is not an exact two-sided inverse");
}

GaugeMap GaugeMap::identity(std::size_t m, std::size_t num_vars) {
  return GaugeMap(PolyMatrix::identity(m, num_vars), PolyMatrix::identity(m, num_vars));
}

}  // namespace moduli
