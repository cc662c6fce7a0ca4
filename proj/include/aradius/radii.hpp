#pragma once

#include <cstddef>
#include <vector>

#include "aradius/estimate.hpp"
#include "aradius/optimizer.hpp"
#include "aradius/space.hpp"
#include "aradius/spectral.hpp"

namespace aradius {

struct SeminormParams {
  double alpha = 1.0;
  double beta = 0.0;
};

/// Budget and tolerances shared by every radius computation.
struct RadiiConfig {
  OptConfig opt;
  // Deterministic seeded starts added before the random ones.
  std::size_t seeded_starts = 8;
  SweepConfig sweep;
  double classify_tol = kDefaultClassifyTol;
  // alpha = 0 / beta = 0 are routed to joint_op_norm / euclid_radius when set.
  bool dispatch_special_cases = true;
  // Additional starts in reduced coordinates (length dim); projected onto range(A).
  std::vector<CVector> extra_seeds;
};

// Every certificate below is a unit vector y in reduced coordinates lying in
// range(A); the corresponding A-unit vector is space.pull_back(y). A zero
// weight gives value 0 and an empty certificate.

/// ||T||_A = ||reduce(T)||. Throws NotABounded.
SupEstimate a_op_seminorm(const SpaceA& space, const CMatrix& t, const RadiiConfig& cfg = {});

/// omega_A(T) = w(reduce(T)) by the theta sweep. Throws NotABounded.
SupEstimate a_numrad(const SpaceA& space, const CMatrix& t, const RadiiConfig& cfg = {});

/// ||T||_A = ||sum T_k^#A T_k||_A^{1/2}.
SupEstimate joint_op_norm(const SpaceA& space, const OpTuple& t, const RadiiConfig& cfg = {});

/// sup over A-unit x of sqrt(sum ||T_k x||_A^2), by sphere optimisation.
SupEstimate joint_op_norm_by_definition(const SpaceA& space, const OpTuple& t,
                                        const RadiiConfig& cfg = {});

/// omega_A(T) = sup sqrt(sum |<T_k x, x>_A|^2), by sphere optimisation.
SupEstimate euclid_radius(const SpaceA& space, const OpTuple& t, const RadiiConfig& cfg = {});

/// The same radius as sup over complex unit lambda of omega_A(sum lambda_k T_k),
/// by alternating maximisation in lambda and x.
SupEstimate euclid_radius_dual(const SpaceA& space, const OpTuple& t,
                               const RadiiConfig& cfg = {});

/// c_A(T) = inf sqrt(sum |<T_k x, x>_A|^2). Upper bound. Throws ZeroWeight.
InfEstimate joint_crawford(const SpaceA& space, const OpTuple& t, const RadiiConfig& cfg = {});

/// m_A(T) = inf sqrt(sum <T_k^#A T_k x, x>_A), smallest eigenvalue. Throws ZeroWeight.
InfEstimate joint_min_modulus(const SpaceA& space, const OpTuple& t,
                              const RadiiConfig& cfg = {});

/// ||T||_{A_{alpha,beta}} = sup sqrt(sum alpha |<T_k x, x>_A|^2 + beta ||T_k x||_A^2).
/// Throws InvalidParams for negative, non-finite or (0, 0) parameters.
SupEstimate alpha_beta_seminorm(const SpaceA& space, const OpTuple& t, SeminormParams p,
                                const RadiiConfig& cfg = {});

/// Compressed tuple reduce(T_k) on range(A), after the A-boundedness check.
std::vector<CMatrix> compressed_tuple(const SpaceA& space, const OpTuple& t,
                                      const RadiiConfig& cfg = {});

}  // namespace aradius
