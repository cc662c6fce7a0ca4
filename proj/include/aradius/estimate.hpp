#pragma once

#include <cstddef>
#include <limits>

#include "aradius/matrix.hpp"

namespace aradius {

enum class Method { eigen_exact, theta_sweep, sphere_opt, sampling };

/// Which side of the true extremum a reported value is guaranteed to lie on.
enum class Bound { exact, lower_bound, upper_bound };

const char* to_string(Method m);
const char* to_string(Bound b);

/// Extremum value together with a witnessing unit vector.
///
/// `certificate` lives in the coordinates the optimisation ran in (reduced
/// coordinates y = A^{1/2} x for the radii module). It may be empty when the
/// value comes from a closed formula with no natural witness.
struct Estimate {
  double value = 0.0;
  CVector certificate;
  Method method = Method::eigen_exact;
  Bound bound = Bound::exact;
  // |objective(certificate) - value| as re-evaluated by the producer.
  double residual = 0.0;
  // Upper envelope for sweep-based values; +inf when not available.
  double upper_envelope = std::numeric_limits<double>::infinity();
  std::size_t converged_starts = 0;
  std::size_t total_starts = 0;
};

using SupEstimate = Estimate;
using InfEstimate = Estimate;

inline const char* to_string(Method m) {
  switch (m) {
    case Method::eigen_exact: return "eigen_exact";
    case Method::theta_sweep: return "theta_sweep";
    case Method::sphere_opt: return "sphere_opt";
    case Method::sampling: return "sampling";
  }
  return "unknown";
}

inline const char* to_string(Bound b) {
  switch (b) {
    case Bound::exact: return "exact";
    case Bound::lower_bound: return "lower_bound";
    case Bound::upper_bound: return "upper_bound";
  }
  return "unknown";
}

}  // namespace aradius
