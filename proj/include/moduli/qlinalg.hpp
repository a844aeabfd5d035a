#ifndef MODULI_QLINALG_HPP
#define MODULI_QLINALG_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "moduli/rational.hpp"

namespace moduli {

/// Gaussian rational a + b*i; exact arithmetic on both parts.
struct GaussianRational {
  Rational re, im;

  GaussianRational() = default;
  GaussianRational(Rational r) : re(std::move(r)) {}
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  GaussianRational operator-() const { return {-re, -im}; }
  GaussianRational operator+(const GaussianRational& o) const { return {re + o.re, im + o.im}; }
  GaussianRational operator-(const GaussianRational& o) const { return {re - o.re, im - o.im}; }
  GaussianRational operator*(const GaussianRational& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  GaussianRational operator/(const GaussianRational& o) const {
    Rational n = o.re * o.re + o.im * o.im;
    if (n.is_zero()) throw std::domain_error("GaussianRational: division by zero");
    return {(re * o.re + im * o.im) / n, (im * o.re - re * o.im) / n};
  }
  GaussianRational& operator+=(const GaussianRational& o) { return *this = *this + o; }
  GaussianRational& operator-=(const GaussianRational& o) { return *this = *this - o; }
  bool operator==(const GaussianRational& o) const { return re == o.re && im == o.im; }
};

/// Dense matrix over an exact field (Rational or GaussianRational).
/// Just enough for rank/kernel computations on desk-scale problems.
template <typename K>
class ExactMatrix {
public:
  ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  K& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const K& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  bool is_zero() const {
    for (const auto& x : a_)
      if (!x.is_zero()) return false;
    return true;
  }

  ExactMatrix operator*(const ExactMatrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("ExactMatrix: dimension mismatch");
    ExactMatrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const K& x = (*this)(i, k);
        if (x.is_zero()) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += x * o(k, j);
      }
    return r;
  }

  /// Rank by exact Gaussian elimination (destructive on a copy).
  std::size_t rank() const {
    ExactMatrix m = *this;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols_ && rank < rows_; ++col) {
      std::size_t pivot = rank;
      while (pivot < rows_ && m(pivot, col).is_zero()) ++pivot;
      if (pivot == rows_) continue;
      for (std::size_t j = 0; j < cols_; ++j) std::swap(m(rank, j), m(pivot, j));
      K lead = m(rank, col);
      for (std::size_t i = rank + 1; i < rows_; ++i) {
        if (m(i, col).is_zero()) continue;
        K f = m(i, col) / lead;
        for (std::size_t j = col; j < cols_; ++j) m(i, j) -= f * m(rank, j);
      }
      ++rank;
    }
    return rank;
  }

  /// Basis of the right kernel {x : Mx = 0}, one column vector per element.
  std::vector<std::vector<K>> kernel_basis() const {
    ExactMatrix m = *this;
    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
      std::size_t pivot = row;
      while (pivot < rows_ && m(pivot, col).is_zero()) ++pivot;
      if (pivot == rows_) continue;
      for (std::size_t j = 0; j < cols_; ++j) std::swap(m(row, j), m(pivot, j));
      K lead = m(row, col);
      for (std::size_t j = col; j < cols_; ++j) m(row, j) = m(row, j) / lead;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i == row || m(i, col).is_zero()) continue;
        K f = m(i, col);
        for (std::size_t j = col; j < cols_; ++j) m(i, j) -= f * m(row, j);
      }
      pivot_col.push_back(col);
      ++row;
    }
    std::vector<bool> is_pivot(cols_, false);
    for (auto c : pivot_col) is_pivot[c] = true;

    std::vector<std::vector<K>> basis;
    for (std::size_t free = 0; free < cols_; ++free) {
      if (is_pivot[free]) continue;
      std::vector<K> v(cols_);
      v[free] = K(Rational(1));
      for (std::size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = -m(r, free);
      basis.push_back(std::move(v));
    }
    return basis;
  }

private:
  std::size_t rows_, cols_;
  std::vector<K> a_;
};

using QMatrix = ExactMatrix<Rational>;

}  // namespace moduli

#endif
