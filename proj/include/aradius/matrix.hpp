#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace aradius {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Dense complex matrix, row-major.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols);
  CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  /// Row-wise literal, e.g. CMatrix{{1, 2}, {3, 4}}.
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix zeros(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }
  static CMatrix identity(std::size_t n);
  static CMatrix diagonal(std::span<const Complex> diag);
  static CMatrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<Complex> entries() noexcept { return data_; }
  std::span<const Complex> entries() const noexcept { return data_; }

  CVector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const Complex> v);

  CMatrix adjoint() const;
  CMatrix hermitian_part() const;       // (M + M*) / 2
  CMatrix skew_hermitian_part() const;  // (M - M*) / (2i)
  Complex trace() const;

  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(Complex s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

CMatrix operator+(CMatrix lhs, const CMatrix& rhs);
CMatrix operator-(CMatrix lhs, const CMatrix& rhs);
CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs);
CMatrix operator*(Complex s, CMatrix m);
CMatrix operator*(CMatrix m, Complex s);
CVector operator*(const CMatrix& m, std::span<const Complex> x);

/// M^p for square M, p >= 0.
CMatrix power(const CMatrix& m, unsigned p);

/// Frobenius norm of lhs - rhs; throws DimensionMismatch on shape mismatch.
double distance(const CMatrix& lhs, const CMatrix& rhs);

void require_same_shape(const CMatrix& lhs, const CMatrix& rhs, const char* context);
void require_square(const CMatrix& m, const char* context);

// Vector helpers. dot(x, y) = x* y (conjugate-linear in the first slot).
Complex dot(std::span<const Complex> x, std::span<const Complex> y);
double norm(std::span<const Complex> x);
double squared_norm(std::span<const Complex> x);
CVector normalized(std::span<const Complex> x);
CVector scaled(std::span<const Complex> x, Complex s);
bool all_finite(std::span<const Complex> x);

}  // namespace aradius
