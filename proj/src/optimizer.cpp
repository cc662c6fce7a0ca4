#include "aradius/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "aradius/error.hpp"

namespace aradius {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kStallGradTol = 1e-6;

double checked_eval(const SphereObjective& obj, std::span<const Complex> y) {
  const double v = obj.eval(y);
  if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "objective returned a non-finite value");
  return v;
}

struct StartResult {
  double value = 0.0;
  CVector point;
  bool converged = false;
};

// Ascent on sign * f.
StartResult run_start(const SphereObjective& obj, const OptConfig& cfg, double sign, CVector y) {
  const std::size_t d = obj.dim;
  y = normalized(y);
  double v = sign * checked_eval(obj, y);
  StartResult res;
  CVector trial(d);
  CVector tangent(d);
  CVector second(d);
  double t_next = cfg.step_init;
  for (std::size_t it = 0; it < cfg.max_iter; ++it) {
    CVector g = obj.wirtinger_grad(y);
    if (!all_finite(g)) throw Error(ErrorKind::NonFinite, "objective gradient is not finite");
    if (sign < 0.0) {
      for (auto& z : g) z = -z;
    }
    const Complex c = dot(y, g);
    for (std::size_t i = 0; i < d; ++i) tangent[i] = g[i] - c * y[i];
    const double gn2 = squared_norm(tangent);
    if (std::sqrt(gn2) <= cfg.grad_tol * (1.0 + std::abs(v))) {
      res.converged = true;
      break;
    }
    double t = t_next;
    bool accepted = false;
    double v_trial = v;
    for (std::size_t b = 0; b <= cfg.max_backtracks; ++b) {
      double nrm = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        trial[i] = y[i] + t * tangent[i];
        nrm += std::norm(trial[i]);
      }
      nrm = std::sqrt(nrm);
      for (auto& z : trial) z /= nrm;
      v_trial = sign * checked_eval(obj, trial);
      if (v_trial > v && v_trial >= v + kArmijo * 2.0 * t * gn2) {
        accepted = true;
        break;
      }
      t *= cfg.backtrack_factor;
    }
    if (accepted) {
      // Keep halving while it still helps; a plain Armijo step can reflect across a
      // minimum and stall into slow oscillation.
      for (std::size_t b = 0; b < cfg.max_backtracks; ++b) {
        const double t2 = t * cfg.backtrack_factor;
        double nrm = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          second[i] = y[i] + t2 * tangent[i];
          nrm += std::norm(second[i]);
        }
        nrm = std::sqrt(nrm);
        for (auto& z : second) z /= nrm;
        const double v2 = sign * checked_eval(obj, second);
        if (!(v2 > v_trial)) break;
        trial.swap(second);
        v_trial = v2;
        t = t2;
      }
    }
    if (!accepted) {
      // No step changes the value in floating point; accept as stationary when the
      // gradient is at the rounding floor of the objective.
      res.converged = std::sqrt(gn2) <= kStallGradTol * (1.0 + std::abs(v));
      break;
    }
    y.swap(trial);
    v = v_trial;
    // Warm start the next line search just above the step that worked.
    t_next = std::min(cfg.step_init, 2.0 * t);
  }
  res.value = sign * v;
  res.point = std::move(y);
  return res;
}

Estimate multistart(const SphereObjective& obj, const OptConfig& cfg,
                    std::span<const CVector> seeds, double sign) {
  if (obj.dim == 0) throw Error(ErrorKind::DimensionMismatch, "sphere optimisation on C^0");
  if (cfg.starts == 0 && seeds.empty()) {
    throw Error(ErrorKind::InvalidParams, "optimizer needs at least one start");
  }
  std::mt19937_64 rng(cfg.seed);
  Estimate best;
  best.method = Method::sphere_opt;
  best.bound = sign > 0.0 ? Bound::lower_bound : Bound::upper_bound;
  bool have = false;

  auto consider = [&](CVector start) {
    StartResult r = run_start(obj, cfg, sign, std::move(start));
    ++best.total_starts;
    if (r.converged) ++best.converged_starts;
    if (!have || sign * r.value > sign * best.value) {
      best.value = r.value;
      best.certificate = std::move(r.point);
      have = true;
    }
  };
  for (const auto& s : seeds) {
    if (s.size() != obj.dim) throw Error(ErrorKind::DimensionMismatch, "seed length != dim");
    if (norm(s) == 0.0) continue;
    consider(s);
  }
  for (std::size_t k = 0; k < cfg.starts; ++k) consider(random_unit_vector(obj.dim, rng));
  if (!have) consider(random_unit_vector(obj.dim, rng));
  best.residual = std::abs(checked_eval(obj, best.certificate) - best.value);
  return best;
}

}  // namespace

CVector random_unit_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector v(dim);
  do {
    for (auto& z : v) z = Complex{normal(rng), normal(rng)};
  } while (norm(v) == 0.0);
  return normalized(v);
}

SupEstimate sphere_maximize(const SphereObjective& obj, const OptConfig& cfg,
                            std::span<const CVector> seeds) {
  return multistart(obj, cfg, seeds, 1.0);
}

InfEstimate sphere_minimize(const SphereObjective& obj, const OptConfig& cfg,
                            std::span<const CVector> seeds) {
  return multistart(obj, cfg, seeds, -1.0);
}

BruteForceResult brute_force_extremum(const SphereObjective& obj, std::size_t samples,
                                      std::uint64_t seed) {
  if (samples == 0) throw Error(ErrorKind::InvalidParams, "brute force needs samples >= 1");
  std::mt19937_64 rng(seed);
  BruteForceResult res;
  for (std::size_t s = 0; s < samples; ++s) {
    CVector y = random_unit_vector(obj.dim, rng);
    const double v = checked_eval(obj, y);
    if (s == 0 || v > res.hi) {
      res.hi = v;
      res.argmax = y;
    }
    if (s == 0 || v < res.lo) {
      res.lo = v;
      res.argmin = std::move(y);
    }
  }
  return res;
}

SphereObjective quadratic_objective(const CMatrix& m) {
  require_square(m, "quadratic_objective");
  auto mat = std::make_shared<const CMatrix>(m);
  auto adj = std::make_shared<const CMatrix>(m.adjoint());
  SphereObjective obj;
  obj.dim = m.rows();
  obj.eval = [mat](std::span<const Complex> y) { return squared_norm(*mat * y); };
  obj.wirtinger_grad = [mat, adj](std::span<const Complex> y) {
    const CVector my = *mat * y;
    return *adj * std::span<const Complex>(my);
  };
  return obj;
}

SphereObjective numrad_objective(const CMatrix& m) {
  return weighted_tuple_objective({m}, 1.0, 0.0);
}

SphereObjective weighted_tuple_objective(std::vector<CMatrix> ops, double alpha, double beta) {
  if (ops.empty()) throw Error(ErrorKind::DimensionMismatch, "weighted_tuple_objective: no ops");
  const std::size_t d = ops.front().rows();
  struct Data {
    std::size_t d;
    std::size_t n;
    double alpha;
    double beta;
    std::vector<Complex> fwd;  // n blocks of d x d, row-major
    std::vector<Complex> adj;
  };
  auto data = std::make_shared<Data>();
  data->d = d;
  data->n = ops.size();
  data->alpha = alpha;
  data->beta = beta;
  data->fwd.reserve(ops.size() * d * d);
  data->adj.reserve(ops.size() * d * d);
  for (const auto& op : ops) {
    require_square(op, "weighted_tuple_objective");
    if (op.rows() != d) throw Error(ErrorKind::DimensionMismatch, "weighted_tuple_objective");
    data->fwd.insert(data->fwd.end(), op.entries().begin(), op.entries().end());
    const CMatrix a = op.adjoint();
    data->adj.insert(data->adj.end(), a.entries().begin(), a.entries().end());
  }

  auto matvec = [](const Complex* m, std::span<const Complex> x, Complex* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      Complex acc{0.0, 0.0};
      const Complex* row = m + i * n;
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
      out[i] = acc;
    }
  };

  SphereObjective obj;
  obj.dim = d;
  obj.eval = [data, matvec](std::span<const Complex> y) {
    const std::size_t n = data->d;
    std::vector<Complex> w(n);
    double total = 0.0;
    for (std::size_t k = 0; k < data->n; ++k) {
      matvec(data->fwd.data() + k * n * n, y, w.data(), n);
      if (data->alpha != 0.0) total += data->alpha * std::norm(dot(y, w));
      if (data->beta != 0.0) total += data->beta * squared_norm(w);
    }
    return total;
  };
  obj.wirtinger_grad = [data, matvec](std::span<const Complex> y) {
    const std::size_t n = data->d;
    std::vector<Complex> w(n), adj_y(n), adj_w(n);
    CVector g(n, Complex{0.0, 0.0});
    for (std::size_t k = 0; k < data->n; ++k) {
      const Complex* fwd = data->fwd.data() + k * n * n;
      const Complex* adj = data->adj.data() + k * n * n;
      matvec(fwd, y, w.data(), n);
      if (data->alpha != 0.0) {
        // d|c|^2 / d conj(y) = conj(c) M y + c M* y with c = y* M y.
        const Complex c = dot(y, w);
        matvec(adj, y, adj_y.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
          g[i] += data->alpha * (std::conj(c) * w[i] + c * adj_y[i]);
        }
      }
      if (data->beta != 0.0) {
        matvec(adj, w, adj_w.data(), n);
        for (std::size_t i = 0; i < n; ++i) g[i] += data->beta * adj_w[i];
      }
    }
    return g;
  };
  return obj;
}

}  // namespace aradius
