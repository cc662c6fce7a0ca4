#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "aradius/estimate.hpp"
#include "aradius/matrix.hpp"

namespace aradius {

/// Real, phase-invariant objective on the complex unit sphere of C^dim.
///
/// `wirtinger_grad` returns d f / d conj(y); the real gradient in R^{2 dim} is
/// twice this vector.
struct SphereObjective {
  std::size_t dim = 0;
  std::function<double(std::span<const Complex>)> eval;
  std::function<CVector(std::span<const Complex>)> wirtinger_grad;
};

struct OptConfig {
  std::size_t starts = 32;
  std::size_t max_iter = 500;
  double grad_tol = 1e-9;
  double step_init = 1.0;
  double backtrack_factor = 0.5;
  std::size_t max_backtracks = 30;
  std::uint64_t seed = 0;
};

/// Multistart projected gradient ascent with renormalisation retraction and
/// Armijo backtracking. After the first acceptable step the step keeps halving
/// while the value still improves. `seeds` are run first (in order), then
/// `cfg.starts` random starts. Ties keep the earliest start.
///
/// A start counts as converged when the tangential gradient drops below
/// grad_tol (1 + |value|), or when no trial step changes the value in floating
/// point while the gradient is below 1e-6 (1 + |value|).
SupEstimate sphere_maximize(const SphereObjective& obj, const OptConfig& cfg,
                            std::span<const CVector> seeds = {});

/// Descent counterpart; the returned estimate is an upper bound of the infimum.
InfEstimate sphere_minimize(const SphereObjective& obj, const OptConfig& cfg,
                            std::span<const CVector> seeds = {});

struct BruteForceResult {
  double lo = 0.0;
  double hi = 0.0;
  CVector argmin;
  CVector argmax;
};

/// Extremes of `obj` over `samples` normalised complex Gaussian draws.
BruteForceResult brute_force_extremum(const SphereObjective& obj, std::size_t samples,
                                      std::uint64_t seed);

CVector random_unit_vector(std::size_t dim, std::mt19937_64& rng);

/// h(y) = ||M y||^2.
SphereObjective quadratic_objective(const CMatrix& m);

/// g(y) = |y* M y|^2.
SphereObjective numrad_objective(const CMatrix& m);

/// f(y) = sum_k alpha |y* T_k y|^2 + beta ||T_k y||^2 over square matrices of equal size.
SphereObjective weighted_tuple_objective(std::vector<CMatrix> ops, double alpha, double beta);

}  // namespace aradius
