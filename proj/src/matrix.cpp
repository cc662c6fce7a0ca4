#include "aradius/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aradius/error.hpp"

namespace aradius {

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{0.0, 0.0}) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorKind::DimensionMismatch,
                "entry count " + std::to_string(data_.size()) + " does not match " +
                    std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) {
      throw Error(ErrorKind::DimensionMismatch, "ragged matrix literal");
    }
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> diag) {
  CMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMatrix CMatrix::diagonal(std::span<const double> diag) {
  CMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CVector CMatrix::column(std::size_t j) const {
  CVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void CMatrix::set_column(std::size_t j, std::span<const Complex> v) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  }
  return out;
}

CMatrix CMatrix::hermitian_part() const {
  require_square(*this, "hermitian_part");
  CMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      out(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
    }
  }
  return out;
}

CMatrix CMatrix::skew_hermitian_part() const {
  require_square(*this, "skew_hermitian_part");
  const Complex inv_2i{0.0, -0.5};
  CMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      out(i, j) = inv_2i * ((*this)(i, j) - std::conj((*this)(j, i)));
    }
  }
  return out;
}

Complex CMatrix::trace() const {
  Complex t{0.0, 0.0};
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::frobenius_norm() const { return norm(data_); }

double CMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

bool CMatrix::all_finite() const { return aradius::all_finite(data_); }

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix operator+(CMatrix lhs, const CMatrix& rhs) { return lhs += rhs; }
CMatrix operator-(CMatrix lhs, const CMatrix& rhs) { return lhs -= rhs; }

CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs) {
  if (lhs.cols() != rhs.rows()) {
    throw Error(ErrorKind::DimensionMismatch,
                "product of " + std::to_string(lhs.rows()) + "x" + std::to_string(lhs.cols()) +
                    " and " + std::to_string(rhs.rows()) + "x" + std::to_string(rhs.cols()));
  }
  CMatrix out(lhs.rows(), rhs.cols());
  for (std::size_t i = 0; i < lhs.rows(); ++i) {
    for (std::size_t k = 0; k < lhs.cols(); ++k) {
      const Complex a = lhs(i, k);
      if (a == Complex{0.0, 0.0}) continue;
      for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

CMatrix operator*(Complex s, CMatrix m) { return m *= s; }
CMatrix operator*(CMatrix m, Complex s) { return m *= s; }

CVector operator*(const CMatrix& m, std::span<const Complex> x) {
  if (m.cols() != x.size()) {
    throw Error(ErrorKind::DimensionMismatch, "matrix-vector product");
  }
  CVector y(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Complex acc{0.0, 0.0};
    for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

CMatrix power(const CMatrix& m, unsigned p) {
  require_square(m, "power");
  CMatrix out = CMatrix::identity(m.rows());
  for (unsigned i = 0; i < p; ++i) out = out * m;
  return out;
}

double distance(const CMatrix& lhs, const CMatrix& rhs) {
  require_same_shape(lhs, rhs, "distance");
  double s = 0.0;
  for (std::size_t i = 0; i < lhs.entries().size(); ++i) {
    s += std::norm(lhs.entries()[i] - rhs.entries()[i]);
  }
  return std::sqrt(s);
}

void require_same_shape(const CMatrix& lhs, const CMatrix& rhs, const char* context) {
  if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(context) + ": shapes differ");
  }
}

void require_square(const CMatrix& m, const char* context) {
  if (!m.is_square()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(context) + ": matrix is not square");
  }
}

Complex dot(std::span<const Complex> x, std::span<const Complex> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::DimensionMismatch, "dot");
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

double squared_norm(std::span<const Complex> x) {
  double s = 0.0;
  for (const auto& z : x) s += std::norm(z);
  return s;
}

double norm(std::span<const Complex> x) { return std::sqrt(squared_norm(x)); }

CVector normalized(std::span<const Complex> x) {
  const double n = norm(x);
  CVector out(x.begin(), x.end());
  if (n > 0.0) {
    for (auto& z : out) z /= n;
  }
  return out;
}

CVector scaled(std::span<const Complex> x, Complex s) {
  CVector out(x.begin(), x.end());
  for (auto& z : out) z *= s;
  return out;
}

bool all_finite(std::span<const Complex> x) {
  return std::all_of(x.begin(), x.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

}  // namespace aradius
