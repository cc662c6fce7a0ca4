#include "aradius/radii.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aradius/error.hpp"

namespace aradius {
namespace {

constexpr std::size_t kDualRandomStarts = 4;
constexpr std::size_t kDualMaxRounds = 30;
constexpr double kDualStallTol = 1e-14;

void require_a_bounded(const SpaceA& space, const CMatrix& t, const RadiiConfig& cfg,
                       const char* context) {
  if (!is_a_bounded(space, t, cfg.classify_tol)) {
    throw Error(ErrorKind::NotABounded,
                std::string(context) + ": operator does not map null(A) into null(A)");
  }
}

Estimate zero_estimate() {
  Estimate e;
  e.method = Method::eigen_exact;
  e.bound = Bound::exact;
  e.upper_envelope = 0.0;
  return e;
}

CMatrix gram_sum(const std::vector<CMatrix>& ops) {
  CMatrix g = CMatrix::zeros(ops.front().rows(), ops.front().rows());
  for (const auto& op : ops) g += op.adjoint() * op;
  return g.hermitian_part();
}

CVector top_abs_eigenvector(const CMatrix& h) {
  const HermEig e = hermitian_eig(h);
  const std::size_t n = e.values.size();
  const std::size_t k = std::abs(e.values.front()) > std::abs(e.values.back()) ? 0 : n - 1;
  return e.vectors.column(k);
}

// Seeds in compressed coordinates: eigenvectors of sum T^_k* T^_k (descending),
// interleaved after the first with the dominant eigenvectors of the Hermitian and
// skew-Hermitian parts of each T^_k, then the caller's extra seeds.
std::vector<CVector> build_seeds(const SpaceA& space, const std::vector<CMatrix>& ops,
                                 const RadiiConfig& cfg) {
  std::vector<CVector> seeds;
  const std::size_t r = ops.front().rows();
  if (cfg.seeded_starts > 0) {
    const HermEig g = hermitian_eig(gram_sum(ops));
    std::vector<CVector> pool;
    pool.push_back(g.vectors.column(r - 1));
    for (const auto& op : ops) {
      pool.push_back(top_abs_eigenvector(op.hermitian_part()));
      pool.push_back(top_abs_eigenvector(op.skew_hermitian_part()));
    }
    for (std::size_t k = 1; k < r; ++k) pool.push_back(g.vectors.column(r - 1 - k));
    const std::size_t take = std::min(cfg.seeded_starts, pool.size());
    seeds.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
  }
  const CMatrix qh = space.range_basis().adjoint();
  for (const auto& y : cfg.extra_seeds) {
    if (y.size() != space.dim()) {
      throw Error(ErrorKind::DimensionMismatch, "extra seed length != dim");
    }
    CVector z = qh * std::span<const Complex>(y);
    if (norm(z) > 1e-12) seeds.push_back(normalized(z));
  }
  return seeds;
}

std::vector<CMatrix> scaled_ops(const std::vector<CMatrix>& ops, double s) {
  std::vector<CMatrix> out;
  out.reserve(ops.size());
  for (const auto& op : ops) out.push_back(Complex{s, 0.0} * op);
  return out;
}

// Sup or inf of sqrt(f) for f = sum alpha |y* T_k y|^2 + beta ||T_k y||^2 in
// compressed coordinates; the result is renormalised by `scale`.
Estimate optimise_tuple(const SpaceA& space, const std::vector<CMatrix>& ops, double alpha,
                        double beta, double scale, bool maximise, const RadiiConfig& cfg) {
  const std::vector<CVector> seeds = build_seeds(space, ops, cfg);
  const SphereObjective obj =
      weighted_tuple_objective(scale == 1.0 ? ops : scaled_ops(ops, 1.0 / scale), alpha, beta);
  Estimate raw = maximise ? sphere_maximize(obj, cfg.opt, seeds)
                          : sphere_minimize(obj, cfg.opt, seeds);
  Estimate out = raw;
  out.value = scale * std::sqrt(std::max(raw.value, 0.0));
  const double check = scale * std::sqrt(std::max(obj.eval(raw.certificate), 0.0));
  out.residual = std::abs(check - out.value);
  out.certificate = space.embed(raw.certificate);
  return out;
}

}  // namespace

std::vector<CMatrix> compressed_tuple(const SpaceA& space, const OpTuple& t,
                                      const RadiiConfig& cfg) {
  if (t.size() == 0) throw Error(ErrorKind::DimensionMismatch, "empty operator tuple");
  std::vector<CMatrix> ops;
  ops.reserve(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    const std::string ctx = "T_" + std::to_string(k + 1);
    if (t[k].rows() != space.dim()) {
      throw Error(ErrorKind::DimensionMismatch, ctx + ": dimension differs from the weight");
    }
    require_a_bounded(space, t[k], cfg, ctx.c_str());
    ops.push_back(space.compress(t[k]));
  }
  return ops;
}

SupEstimate a_op_seminorm(const SpaceA& space, const CMatrix& t, const RadiiConfig& cfg) {
  const std::vector<CMatrix> ops = compressed_tuple(space, OpTuple({t}), cfg);
  if (space.zero_weight()) return zero_estimate();
  const CMatrix g = gram_sum(ops);
  const HermEig e = hermitian_eig(g);
  Estimate est = zero_estimate();
  est.value = std::sqrt(std::max(e.values.back(), 0.0));
  est.upper_envelope = est.value;
  const CVector z = e.vectors.column(e.values.size() - 1);
  est.residual = std::abs(norm(ops.front() * std::span<const Complex>(z)) - est.value);
  est.certificate = space.embed(z);
  return est;
}

SupEstimate a_numrad(const SpaceA& space, const CMatrix& t, const RadiiConfig& cfg) {
  const std::vector<CMatrix> ops = compressed_tuple(space, OpTuple({t}), cfg);
  if (space.zero_weight()) return zero_estimate();
  Estimate est = classical_numrad(ops.front(), cfg.sweep);
  est.certificate = space.embed(est.certificate);
  return est;
}

SupEstimate joint_op_norm(const SpaceA& space, const OpTuple& t, const RadiiConfig& cfg) {
  const std::vector<CMatrix> ops = compressed_tuple(space, t, cfg);
  if (space.zero_weight()) return zero_estimate();
  // sum T_k^# T_k compresses to sum T^_k* T^_k; its top eigenvalue is the squared norm.
  const HermEig e = hermitian_eig(gram_sum(ops));
  Estimate est = zero_estimate();
  est.value = std::sqrt(std::max(e.values.back(), 0.0));
  est.upper_envelope = est.value;
  const CVector z = e.vectors.column(e.values.size() - 1);
  double s = 0.0;
  for (const auto& op : ops) s += squared_norm(op * std::span<const Complex>(z));
  est.residual = std::abs(std::sqrt(s) - est.value);
  est.certificate = space.embed(z);
  return est;
}

SupEstimate joint_op_norm_by_definition(const SpaceA& space, const OpTuple& t,
                                        const RadiiConfig& cfg) {
  const std::vector<CMatrix> ops = compressed_tuple(space, t, cfg);
  if (space.zero_weight()) return zero_estimate();
  return optimise_tuple(space, ops, 0.0, 1.0, 1.0, true, cfg);
}

SupEstimate euclid_radius(const SpaceA& space, const OpTuple& t, const RadiiConfig& cfg) {
  const std::vector<CMatrix> ops = compressed_tuple(space, t, cfg);
  if (space.zero_weight()) return zero_estimate();
  const double scale = std::sqrt(std::max(hermitian_eigvals(gram_sum(ops)).back(), 0.0));
  if (scale == 0.0) return zero_estimate();
  return optimise_tuple(space, ops, 1.0, 0.0, scale, true, cfg);
}

SupEstimate euclid_radius_dual(const SpaceA& space, const OpTuple& t, const RadiiConfig& cfg) {
  const std::vector<CMatrix> ops = compressed_tuple(space, t, cfg);
  if (space.zero_weight()) return zero_estimate();
  const std::size_t r = space.rank();
  std::vector<CVector> starts = build_seeds(space, ops, cfg);
  std::mt19937_64 rng(cfg.opt.seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t k = 0; k < kDualRandomStarts; ++k) starts.push_back(random_unit_vector(r, rng));

  auto moments = [&](const CVector& z) {
    CVector c(ops.size());
    for (std::size_t k = 0; k < ops.size(); ++k) c[k] = dot(z, ops[k] * std::span<const Complex>(z));
    return c;
  };

  Estimate best;
  best.method = Method::theta_sweep;
  best.bound = Bound::lower_bound;
  bool have = false;
  for (CVector z : starts) {
    double value = norm(moments(z));
    for (std::size_t round = 0; round < kDualMaxRounds; ++round) {
      CVector c = moments(z);
      const double len = norm(c);
      CMatrix m = CMatrix::zeros(r, r);
      for (std::size_t k = 0; k < ops.size(); ++k) {
        const Complex lambda = len > 0.0 ? std::conj(c[k]) / len : Complex{k == 0 ? 1.0 : 0.0, 0.0};
        m += lambda * ops[k];
      }
      const Estimate w = classical_numrad(m, cfg.sweep);
      const double next = norm(moments(w.certificate));
      if (next <= value + kDualStallTol * (1.0 + value)) break;
      value = next;
      z = w.certificate;
    }
    ++best.total_starts;
    ++best.converged_starts;
    if (!have || value > best.value) {
      best.value = value;
      best.certificate = z;
      have = true;
    }
  }
  best.residual = std::abs(norm(moments(best.certificate)) - best.value);
  best.certificate = space.embed(best.certificate);
  return best;
}

InfEstimate joint_crawford(const SpaceA& space, const OpTuple& t, const RadiiConfig& cfg) {
  const std::vector<CMatrix> ops = compressed_tuple(space, t, cfg);
  if (space.zero_weight()) throw Error(ErrorKind::ZeroWeight, "joint_crawford needs A != 0");
  const double scale = std::sqrt(std::max(hermitian_eigvals(gram_sum(ops)).back(), 0.0));
  if (scale == 0.0) return zero_estimate();
  return optimise_tuple(space, ops, 1.0, 0.0, scale, false, cfg);
}

InfEstimate joint_min_modulus(const SpaceA& space, const OpTuple& t, const RadiiConfig& cfg) {
  const std::vector<CMatrix> ops = compressed_tuple(space, t, cfg);
  if (space.zero_weight()) throw Error(ErrorKind::ZeroWeight, "joint_min_modulus needs A != 0");
  const HermEig e = hermitian_eig(gram_sum(ops));
  Estimate est = zero_estimate();
  est.value = std::sqrt(std::max(e.values.front(), 0.0));
  est.upper_envelope = est.value;
  const CVector z = e.vectors.column(0);
  double s = 0.0;
  for (const auto& op : ops) s += squared_norm(op * std::span<const Complex>(z));
  est.residual = std::abs(std::sqrt(s) - est.value);
  est.certificate = space.embed(z);
  return est;
}

SupEstimate alpha_beta_seminorm(const SpaceA& space, const OpTuple& t, SeminormParams p,
                                const RadiiConfig& cfg) {
  if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || p.alpha < 0.0 || p.beta < 0.0) {
    throw Error(ErrorKind::InvalidParams, "alpha and beta must be finite and nonnegative");
  }
  if (p.alpha == 0.0 && p.beta == 0.0) {
    throw Error(ErrorKind::InvalidParams, "(alpha, beta) must differ from (0, 0)");
  }
  const std::vector<CMatrix> ops = compressed_tuple(space, t, cfg);
  if (space.zero_weight()) return zero_estimate();

  if (cfg.dispatch_special_cases && (p.alpha == 0.0 || p.beta == 0.0)) {
    Estimate est = p.alpha == 0.0 ? joint_op_norm(space, t, cfg) : euclid_radius(space, t, cfg);
    const double factor = std::sqrt(p.alpha == 0.0 ? p.beta : p.alpha);
    est.value *= factor;
    est.residual *= factor;
    if (std::isfinite(est.upper_envelope)) est.upper_envelope *= factor;
    return est;
  }
  // Normalising by the joint norm makes the optimisation scale-free, so
  // ||lambda T|| and ||T|| follow the same iterates.
  const double scale = std::sqrt(std::max(hermitian_eigvals(gram_sum(ops)).back(), 0.0));
  if (scale == 0.0) return zero_estimate();
  return optimise_tuple(space, ops, p.alpha, p.beta, scale, true, cfg);
}

}  // namespace aradius
