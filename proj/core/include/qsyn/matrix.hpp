#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "qsyn/errors.hpp"

namespace qsyn {

namespace detail {

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

template <typename T>
bool is_finite(const T& v) {
  if constexpr (is_complex<T>::value) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  } else {
    return std::isfinite(v);
  }
}

template <typename T>
T conj(const T& v) {
  if constexpr (is_complex<T>::value) {
    return std::conj(v);
  } else {
    return v;
  }
}

}  // namespace detail

/// Dense row-major matrix for the small (2 to 16 dimensional) problems this
/// library works with. Entries are validated finite on construction from data.
template <typename T>
class BasicMatrix {
 public:
  using value_type = T;

  BasicMatrix() = default;

  BasicMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, T{0}) {}

  BasicMatrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionError("matrix data size " + std::to_string(data_.size()) +
                           " does not match " + std::to_string(rows_) + "x" +
                           std::to_string(cols_));
    }
    check_finite();
  }

  BasicMatrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionError("ragged matrix initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
    check_finite();
  }

  static BasicMatrix zero(std::size_t rows, std::size_t cols) {
    return BasicMatrix(rows, cols);
  }

  static BasicMatrix identity(std::size_t n) {
    BasicMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  static BasicMatrix diagonal(std::span<const T> d) {
    BasicMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static BasicMatrix diagonal(std::initializer_list<T> d) {
    return diagonal(std::span<const T>(d.begin(), d.size()));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool is_square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<const T> data() const { return data_; }
  std::span<T> data() { return data_; }

  BasicMatrix transpose() const {
    BasicMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Conjugate transpose; identical to transpose() for real matrices.
  BasicMatrix adjoint() const {
    BasicMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        t(j, i) = detail::conj((*this)(i, j));
    return t;
  }

  BasicMatrix block(std::size_t r0, std::size_t c0, std::size_t nr,
                    std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) {
      throw DimensionError("block out of range");
    }
    BasicMatrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  void set_block(std::size_t r0, std::size_t c0, const BasicMatrix& b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) {
      throw DimensionError("set_block out of range");
    }
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  BasicMatrix col(std::size_t j) const { return block(0, j, rows_, 1); }

  T trace() const {
    require_square("trace");
    T t{0};
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, static_cast<double>(std::abs(v)));
    return m;
  }

  /// Induced 1-norm (max column sum).
  double norm1() const {
    double m = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
      m = std::max(m, s);
    }
    return m;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const T& v) { return detail::is_finite(v); });
  }

  BasicMatrix& operator+=(const BasicMatrix& o) {
    require_same_shape(o, "+");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  BasicMatrix& operator-=(const BasicMatrix& o) {
    require_same_shape(o, "-");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  BasicMatrix& operator*=(const T& s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend BasicMatrix operator+(BasicMatrix a, const BasicMatrix& b) { return a += b; }
  friend BasicMatrix operator-(BasicMatrix a, const BasicMatrix& b) { return a -= b; }
  friend BasicMatrix operator-(BasicMatrix a) {
    for (auto& v : a.data_) v = -v;
    return a;
  }
  friend BasicMatrix operator*(BasicMatrix a, const T& s) { return a *= s; }
  friend BasicMatrix operator*(const T& s, BasicMatrix a) { return a *= s; }

  friend BasicMatrix operator*(const BasicMatrix& a, const BasicMatrix& b) {
    if (a.cols_ != b.rows_) {
      throw DimensionError("product of " + a.shape_string() + " and " +
                           b.shape_string());
    }
    BasicMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T aik = a(i, k);
        if (aik == T{0}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend bool operator==(const BasicMatrix& a, const BasicMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  std::string shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

  void require_square(const char* what) const {
    if (!is_square()) {
      throw DimensionError(std::string(what) + " requires a square matrix, got " +
                           shape_string());
    }
  }

 private:
  void require_same_shape(const BasicMatrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw DimensionError(std::string("operator") + op + " on " + shape_string() +
                           " and " + o.shape_string());
    }
  }

  void check_finite() const {
    if (!all_finite()) throw ValidationError("matrix entries must be finite");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Complex = std::complex<double>;
using Matrix = BasicMatrix<double>;
using ComplexMatrix = BasicMatrix<Complex>;

/// [a b] side by side.
template <typename T>
BasicMatrix<T> hstack(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
  if (a.rows() != b.rows()) throw DimensionError("hstack row mismatch");
  BasicMatrix<T> m(a.rows(), a.cols() + b.cols());
  m.set_block(0, 0, a);
  m.set_block(0, a.cols(), b);
  return m;
}

/// [a; b] stacked.
template <typename T>
BasicMatrix<T> vstack(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
  if (a.cols() != b.cols()) throw DimensionError("vstack column mismatch");
  BasicMatrix<T> m(a.rows() + b.rows(), a.cols());
  m.set_block(0, 0, a);
  m.set_block(a.rows(), 0, b);
  return m;
}

/// [[a, b], [c, d]].
template <typename T>
BasicMatrix<T> block2x2(const BasicMatrix<T>& a, const BasicMatrix<T>& b,
                        const BasicMatrix<T>& c, const BasicMatrix<T>& d) {
  return vstack(hstack(a, b), hstack(c, d));
}

template <typename T>
BasicMatrix<T> block_diag(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
  BasicMatrix<T> m(a.rows() + b.rows(), a.cols() + b.cols());
  m.set_block(0, 0, a);
  m.set_block(a.rows(), a.cols(), b);
  return m;
}

inline ComplexMatrix to_complex(const Matrix& m) {
  ComplexMatrix c(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) c(i, j) = m(i, j);
  return c;
}

inline Matrix symmetrize(const Matrix& m) {
  m.require_square("symmetrize");
  return 0.5 * (m + m.transpose());
}

inline double asymmetry(const Matrix& m) {
  m.require_square("asymmetry");
  return (m - m.transpose()).max_abs();
}

/// 2x2 symplectic unit [[0, 1], [-1, 0]].
inline Matrix symplectic_j() { return Matrix{{0.0, 1.0}, {-1.0, 0.0}}; }

/// Canonical commutation matrix diag(J, ..., J) of even dimension n.
inline Matrix canonical_theta(std::size_t n) {
  if (n % 2 != 0) throw DimensionError("canonical theta needs even dimension");
  Matrix t(n, n);
  for (std::size_t k = 0; k < n; k += 2) {
    t(k, k + 1) = 1.0;
    t(k + 1, k) = -1.0;
  }
  return t;
}

/// True when every off-diagonal entry is exactly zero.
inline bool is_diagonal(const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

}  // namespace qsyn
