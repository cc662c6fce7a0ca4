#pragma once

// Shared helpers for the unit tests. Eigen is used only here, as an oracle
// that shares no code with the library.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "aradius/matrix.hpp"

namespace testing {

using aradius::CMatrix;
using aradius::Complex;
using aradius::CVector;
using EMat = Eigen::MatrixXcd;
using EVec = Eigen::VectorXcd;

inline EMat to_eigen(const CMatrix& m) {
  EMat e(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline CMatrix from_eigen(const EMat& e) {
  CMatrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

inline EVec to_eigen(const CVector& v) {
  EVec e(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) e(i) = v[i];
  return e;
}

inline CMatrix gaussian(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix m(r, c);
  for (auto& z : m.entries()) z = Complex{nd(rng), nd(rng)};
  return m;
}

inline CMatrix random_hermitian(std::size_t d, std::mt19937_64& rng) {
  return gaussian(d, d, rng).hermitian_part();
}

/// B* B with B of size rank x d.
inline CMatrix random_psd(std::size_t d, std::size_t rank, std::mt19937_64& rng) {
  const CMatrix b = gaussian(rank, d, rng);
  return (b.adjoint() * b).hermitian_part();
}

inline CVector random_unit(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CVector v(d);
  double s = 0.0;
  for (auto& z : v) {
    z = Complex{nd(rng), nd(rng)};
    s += std::norm(z);
  }
  for (auto& z : v) z /= std::sqrt(s);
  return v;
}

/// Eigen-side functional calculus of a PSD weight: A^{1/2}, (A^{1/2})^+, P.
struct EigenWeight {
  EMat sqrt;
  EMat sqrt_pinv;
  EMat proj;
  EMat range;  // orthonormal basis of range(A)
};

inline EigenWeight eigen_weight(const CMatrix& a, double rel = 1e-10) {
  Eigen::SelfAdjointEigenSolver<EMat> es(to_eigen(a));
  const auto& w = es.eigenvalues();
  const EMat& v = es.eigenvectors();
  const double cut = rel * std::max(w.maxCoeff(), 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) > cut) keep.push_back(i);
  const Eigen::Index n = w.size();
  EigenWeight out;
  out.sqrt = EMat::Zero(n, n);
  out.sqrt_pinv = EMat::Zero(n, n);
  out.proj = EMat::Zero(n, n);
  out.range = EMat(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const Eigen::Index i = keep[c];
    const EVec col = v.col(i);
    out.sqrt += std::sqrt(w(i)) * col * col.adjoint();
    out.sqrt_pinv += (1.0 / std::sqrt(w(i))) * col * col.adjoint();
    out.proj += col * col.adjoint();
    out.range.col(static_cast<Eigen::Index>(c)) = col;
  }
  return out;
}

/// Largest eigenvalue of the Hermitian part of e^{i theta} M, maximised on a
/// uniform theta grid; a lower bound of the classical numerical radius.
inline double grid_numrad(const EMat& m, int points) {
  double best = 0.0;
  for (int k = 0; k < points; ++k) {
    const double th = 2.0 * M_PI * k / points;
    const EMat r = std::polar(1.0, th) * m;
    const EMat h = 0.5 * (r + r.adjoint());
    Eigen::SelfAdjointEigenSolver<EMat> es(h, Eigen::EigenvaluesOnly);
    best = std::max(best, es.eigenvalues().maxCoeff());
  }
  return best;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testing
