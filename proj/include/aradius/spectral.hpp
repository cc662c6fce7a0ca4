#pragma once

#include <cstddef>
#include <vector>

#include "aradius/estimate.hpp"
#include "aradius/matrix.hpp"

namespace aradius {

/// Spectral decomposition M = V diag(values) V* of a Hermitian matrix.
/// Eigenvalues are ascending; columns of `vectors` are orthonormal.
struct HermEig {
  std::vector<double> values;
  CMatrix vectors;
};

inline constexpr double kDefaultHermitianTol = 1e-10;
inline constexpr double kDefaultRankTol = 1e-10;

/// Cyclic complex Jacobi. Throws NotHermitian if ||M - M*||_F > tol ||M||_F,
/// NonFinite on NaN/Inf entries. The input is symmetrised before iterating.
HermEig hermitian_eig(const CMatrix& m, double tol = kDefaultHermitianTol);

/// Eigenvalues only (ascending); skips the eigenvector accumulation.
std::vector<double> hermitian_eigvals(const CMatrix& m, double tol = kDefaultHermitianTol);

/// Functional calculus of a PSD weight.
struct PsdCalculus {
  HermEig eig;
  CMatrix sqrt;
  CMatrix sqrt_pinv;
  CMatrix pinv;
  CMatrix projector;
  std::size_t rank = 0;
  bool zero_weight = false;
  // Eigenvalues at or below this threshold are treated as zero.
  double cutoff = 0.0;
};

/// Throws NotPSD when an eigenvalue is below -rank_tol * lambda_max(A).
PsdCalculus psd_calculus(const CMatrix& a, double rank_tol = kDefaultRankTol);

/// Largest singular value, sqrt(lambda_max(M* M)).
double spectral_norm(const CMatrix& m);

struct SweepConfig {
  std::size_t grid_points = 1024;
  double refine_width = 1e-10;
};

/// Classical numerical radius w(M) = max_theta lambda_max(Re(e^{i theta} M)).
///
/// The value is |y* M y| at the returned unit certificate y, hence a certified
/// lower bound; `upper_envelope` is the grid maximum plus the Lipschitz slack
/// ||M|| h / 2 of the sweep, a certified upper bound.
SupEstimate classical_numrad(const CMatrix& m, const SweepConfig& cfg = {});

}  // namespace aradius
