#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "aradius/matrix.hpp"
#include "aradius/spectral.hpp"

namespace aradius {

inline constexpr double kDefaultClassifyTol = 1e-8;

/// Semi-Hilbert context induced by a PSD weight A on C^dim.
///
/// Immutable after construction. Besides the functional-calculus matrices it
/// keeps an orthonormal basis of range(A) (`range_basis`, dim x rank) and the
/// retained square-root eigenvalues, which the radii module uses to work in
/// rank-dimensional compressed coordinates.
class SpaceA {
 public:
  SpaceA() = default;

  std::size_t dim() const noexcept { return dim_; }
  std::size_t rank() const noexcept { return rank_; }
  bool zero_weight() const noexcept { return rank_ == 0; }
  double rank_tol() const noexcept { return rank_tol_; }

  const CMatrix& weight() const noexcept { return a_; }
  const HermEig& eig() const noexcept { return eig_; }
  const CMatrix& sqrt_a() const noexcept { return sqrt_a_; }
  const CMatrix& sqrt_a_pinv() const noexcept { return sqrt_a_pinv_; }
  const CMatrix& pinv_a() const noexcept { return pinv_a_; }
  const CMatrix& proj() const noexcept { return proj_; }
  const CMatrix& range_basis() const noexcept { return range_basis_; }
  std::span<const double> range_sqrt_eigenvalues() const noexcept { return range_sqrt_; }
  double weight_norm() const noexcept { return weight_norm_; }

  /// Q* reduce(T) Q, the rank x rank matrix of the compression on range(A).
  CMatrix compress(const CMatrix& t) const;
  /// Embeds compressed coordinates z (length rank) as y = Q z (length dim).
  CVector embed(std::span<const Complex> z) const;
  /// Pulls back reduced coordinates y to x = (A^{1/2})^dagger y, so ||x||_A = ||P y||.
  CVector pull_back(std::span<const Complex> y) const;

  friend SpaceA build_space(const CMatrix& a, double rank_tol);

 private:
  std::size_t dim_ = 0;
  std::size_t rank_ = 0;
  double rank_tol_ = kDefaultRankTol;
  double weight_norm_ = 0.0;
  CMatrix a_;
  HermEig eig_;
  CMatrix sqrt_a_;
  CMatrix sqrt_a_pinv_;
  CMatrix pinv_a_;
  CMatrix proj_;
  CMatrix range_basis_;
  std::vector<double> range_sqrt_;
};

/// Ordered n-tuple of dim x dim operators.
class OpTuple {
 public:
  OpTuple() = default;
  explicit OpTuple(std::vector<CMatrix> ops);

  std::size_t size() const noexcept { return ops_.size(); }
  std::size_t dim() const noexcept { return ops_.empty() ? 0 : ops_.front().rows(); }
  const CMatrix& operator[](std::size_t k) const { return ops_[k]; }
  std::span<const CMatrix> ops() const noexcept { return ops_; }

  auto begin() const noexcept { return ops_.begin(); }
  auto end() const noexcept { return ops_.end(); }

 private:
  std::vector<CMatrix> ops_;
};

struct OpFlags {
  bool a_bounded = false;
  bool in_B_A = false;
  bool a_selfadjoint = false;
  bool a_positive = false;
  bool a_isometry = false;
  bool a_unitary = false;
};

struct TuplePredicates {
  bool commuting = false;
  bool a_normal = false;
};

/// Throws NotPSD / NotHermitian when A is not Hermitian PSD within rank_tol.
SpaceA build_space(const CMatrix& a, double rank_tol = kDefaultRankTol);

/// <x, y>_A = <A x, y> = y* A x.
Complex a_inner(const SpaceA& space, std::span<const Complex> x, std::span<const Complex> y);
double a_norm(const SpaceA& space, std::span<const Complex> x);

/// A^{1/2} T (A^{1/2})^dagger.
CMatrix reduce_op(const SpaceA& space, const CMatrix& t);

/// T^{#A} = A^dagger T* A.
CMatrix a_adjoint(const SpaceA& space, const CMatrix& t);

OpFlags classify(const SpaceA& space, const CMatrix& t, double tol = kDefaultClassifyTol);

/// T maps null(A) into null(A): ||A T (I - P)||_F <= tol ||A||_F ||T||_F. In finite
/// dimension this is also the B_A(H) membership test, since ||(I - P) T* A|| is the
/// same quantity adjointed.
bool is_a_bounded(const SpaceA& space, const CMatrix& t, double tol = kDefaultClassifyTol);

TuplePredicates tuple_predicates(const SpaceA& space, const OpTuple& t,
                                 double tol = kDefaultClassifyTol);

/// A-Cartesian decomposition T = Re_A + i Im_A with Re_A = (T + T^#A)/2 and
/// Im_A = (T - T^#A)/(2i).
std::pair<CMatrix, CMatrix> cartesian_a(const SpaceA& space, const CMatrix& t);

/// Entrywise helpers on tuples.
OpTuple tuple_product(const OpTuple& t, const OpTuple& s);
OpTuple tuple_sum(const OpTuple& t, const OpTuple& s);
OpTuple tuple_scaled(const OpTuple& t, Complex lambda);
OpTuple tuple_a_adjoint(const SpaceA& space, const OpTuple& t);

}  // namespace aradius
