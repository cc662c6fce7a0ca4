#include "aradius/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "aradius/error.hpp"

namespace aradius {
namespace {

constexpr std::size_t kMaxSweeps = 100;
constexpr double kOffDiagonalTol = 1e-13;

void check_hermitian_input(const CMatrix& m, double tol) {
  require_square(m, "hermitian_eig");
  if (!m.all_finite()) throw Error(ErrorKind::NonFinite, "hermitian_eig: non-finite entry");
  const double fro = m.frobenius_norm();
  double asym = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) asym += std::norm(m(i, j) - std::conj(m(j, i)));
  }
  if (std::sqrt(asym) > tol * fro) {
    throw Error(ErrorKind::NotHermitian, "hermitian_eig: ||M - M*||_F exceeds tolerance");
  }
}

double off_diagonal_norm(const CMatrix& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      if (i != j) s += std::norm(w(i, j));
    }
  }
  return std::sqrt(s);
}

// Diagonalises `w` in place; accumulates rotations into `v` when non-null.
void jacobi(CMatrix& w, CMatrix* v) {
  const std::size_t n = w.rows();
  const double scale = w.frobenius_norm();
  if (scale == 0.0) return;
  for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(w) <= kOffDiagonalTol * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = w(p, q);
        const double r = std::abs(apq);
        if (r < 1e-300) continue;
        const Complex e = apq / r;
        const double app = w(p, p).real();
        const double aqq = w(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // J = [[c, s e], [-s conj(e), c]] on the (p, q) plane; W <- J* W J.
        const Complex se = s * e;
        const Complex sec = s * std::conj(e);
        for (std::size_t i = 0; i < n; ++i) {
          const Complex wip = w(i, p);
          const Complex wiq = w(i, q);
          w(i, p) = c * wip - sec * wiq;
          w(i, q) = se * wip + c * wiq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const Complex wpj = w(p, j);
          const Complex wqj = w(q, j);
          w(p, j) = c * wpj - se * wqj;
          w(q, j) = sec * wpj + c * wqj;
        }
        w(p, p) = app - t * r;
        w(q, q) = aqq + t * r;
        w(p, q) = 0.0;
        w(q, p) = 0.0;
        if (v != nullptr) {
          for (std::size_t i = 0; i < n; ++i) {
            const Complex vip = (*v)(i, p);
            const Complex viq = (*v)(i, q);
            (*v)(i, p) = c * vip - sec * viq;
            (*v)(i, q) = se * vip + c * viq;
          }
        }
      }
    }
  }
}

// Number of eigenvalues below x of the real symmetric tridiagonal (d, e).
std::size_t sturm_count(const std::vector<double>& d, const std::vector<double>& e2, double x) {
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    q = d[i] - x - (i == 0 ? 0.0 : e2[i - 1] / q);
    if (q == 0.0) q = -std::numeric_limits<double>::min();
    if (q < 0.0) ++count;
  }
  return count;
}

// Largest eigenvalue only: Householder tridiagonalisation, then bisection on the Sturm count.
double lambda_max_unchecked(CMatrix h) {
  const std::size_t n = h.rows();
  if (n == 0) return -std::numeric_limits<double>::infinity();
  std::vector<Complex> v(n), p(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm += std::norm(h(i, k));
    xnorm = std::sqrt(xnorm);
    const double tail = std::sqrt(std::max(xnorm * xnorm - std::norm(h(k + 1, k)), 0.0));
    if (tail == 0.0) continue;
    const Complex x0 = h(k + 1, k);
    const Complex phase = std::abs(x0) == 0.0 ? Complex{1.0, 0.0} : x0 / std::abs(x0);
    const Complex alpha = -phase * xnorm;
    double vnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = h(i, k) - (i == k + 1 ? alpha : Complex{0.0, 0.0});
      vnorm += std::norm(v[i]);
    }
    vnorm = std::sqrt(vnorm);
    for (std::size_t i = k + 1; i < n; ++i) v[i] /= vnorm;
    // A <- A - 2 v w* - 2 w v* with w = A v - (v* A v) v on the trailing block.
    Complex kappa{0.0, 0.0};
    for (std::size_t i = k + 1; i < n; ++i) {
      Complex s{0.0, 0.0};
      for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * v[j];
      p[i] = s;
      kappa += std::conj(v[i]) * s;
    }
    for (std::size_t i = k + 1; i < n; ++i) p[i] -= kappa.real() * v[i];
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        h(i, j) -= 2.0 * (v[i] * std::conj(p[j]) + p[i] * std::conj(v[j]));
      }
    }
    h(k + 1, k) = alpha;
    h(k, k + 1) = std::conj(alpha);
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = h(k, i) = 0.0;
  }
  std::vector<double> d(n), e(n, 0.0), e2(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = h(i, i).real();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    e[i] = std::abs(h(i + 1, i));
    e2[i] = e[i] * e[i];
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i == 0 ? 0.0 : e[i - 1]) + e[i];
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  const double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi))) break;
    if (sturm_count(d, e2, mid) == n) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Re(e^{i theta} M) = (e^{i theta} M + e^{-i theta} M*) / 2.
CMatrix rotated_real_part(const CMatrix& m, double theta) {
  const Complex phase = std::polar(1.0, theta);
  const std::size_t n = m.rows();
  CMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      h(i, j) = 0.5 * (phase * m(i, j) + std::conj(phase * m(j, i)));
    }
  }
  return h;
}

}  // namespace

HermEig hermitian_eig(const CMatrix& m, double tol) {
  check_hermitian_input(m, tol);
  const std::size_t n = m.rows();
  CMatrix w = m.hermitian_part();
  CMatrix v = CMatrix::identity(n);
  jacobi(w, &v);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return w(a, a).real() < w(b, b).real(); });
  HermEig out;
  out.values.resize(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = w(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

std::vector<double> hermitian_eigvals(const CMatrix& m, double tol) {
  check_hermitian_input(m, tol);
  CMatrix w = m.hermitian_part();
  jacobi(w, nullptr);
  std::vector<double> values(w.rows());
  for (std::size_t i = 0; i < w.rows(); ++i) values[i] = w(i, i).real();
  std::sort(values.begin(), values.end());
  return values;
}

PsdCalculus psd_calculus(const CMatrix& a, double rank_tol) {
  PsdCalculus out;
  out.eig = hermitian_eig(a);
  const std::size_t n = a.rows();
  const double lambda_max = n == 0 ? 0.0 : std::max(out.eig.values.back(), 0.0);
  for (double lambda : out.eig.values) {
    if (lambda < -rank_tol * lambda_max) {
      throw Error(ErrorKind::NotPSD, "psd_calculus: eigenvalue " + std::to_string(lambda) +
                                         " below -rank_tol * lambda_max");
    }
  }
  out.cutoff = rank_tol * lambda_max;
  out.sqrt = CMatrix(n, n);
  out.sqrt_pinv = CMatrix(n, n);
  out.pinv = CMatrix(n, n);
  out.projector = CMatrix(n, n);
  const CMatrix& v = out.eig.vectors;
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = out.eig.values[k];
    if (lambda_max == 0.0 || lambda <= out.cutoff) continue;
    ++out.rank;
    const double root = std::sqrt(lambda);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const Complex outer = v(i, k) * std::conj(v(j, k));
        out.sqrt(i, j) += root * outer;
        out.sqrt_pinv(i, j) += outer / root;
        out.pinv(i, j) += outer / lambda;
        out.projector(i, j) += outer;
      }
    }
  }
  out.zero_weight = out.rank == 0;
  return out;
}

double spectral_norm(const CMatrix& m) {
  if (!m.all_finite()) throw Error(ErrorKind::NonFinite, "spectral_norm: non-finite entry");
  if (m.empty()) return 0.0;
  const CMatrix gram = m.adjoint() * m;
  return std::sqrt(std::max(lambda_max_unchecked(gram.hermitian_part()), 0.0));
}

SupEstimate classical_numrad(const CMatrix& m, const SweepConfig& cfg) {
  require_square(m, "classical_numrad");
  if (!m.all_finite()) throw Error(ErrorKind::NonFinite, "classical_numrad: non-finite entry");
  const std::size_t n = m.rows();
  SupEstimate est;
  est.method = Method::theta_sweep;
  est.bound = Bound::lower_bound;
  if (n == 0) {
    est.upper_envelope = 0.0;
    return est;
  }
  const double norm_m = spectral_norm(m);
  if (norm_m == 0.0) {
    est.certificate.assign(n, Complex{0.0, 0.0});
    est.certificate[0] = 1.0;
    est.upper_envelope = 0.0;
    return est;
  }

  const std::size_t grid = std::max<std::size_t>(cfg.grid_points, 8);
  const double h = 2.0 * std::numbers::pi / static_cast<double>(grid);
  std::vector<double> f(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    f[i] = lambda_max_unchecked(rotated_real_part(m, h * static_cast<double>(i)));
  }
  const double grid_max = *std::max_element(f.begin(), f.end());
  est.upper_envelope = grid_max + 0.5 * norm_m * h;

  // Refine every grid-local maximum that could still beat the best cell.
  const double margin = norm_m * h * h;
  double best_theta = 0.0;
  double best_value = -std::numeric_limits<double>::infinity();
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double left = f[(i + grid - 1) % grid];
    const double right = f[(i + 1) % grid];
    if (f[i] < left || f[i] < right || f[i] < grid_max - margin) continue;
    double lo = h * (static_cast<double>(i) - 1.0);
    double hi = h * (static_cast<double>(i) + 1.0);
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = lambda_max_unchecked(rotated_real_part(m, x1));
    double f2 = lambda_max_unchecked(rotated_real_part(m, x2));
    while (hi - lo > cfg.refine_width) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = lambda_max_unchecked(rotated_real_part(m, x2));
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = lambda_max_unchecked(rotated_real_part(m, x1));
      }
    }
    const double theta = 0.5 * (lo + hi);
    double value = lambda_max_unchecked(rotated_real_part(m, theta));
    if (f[i] > value) value = f[i];
    if (value > best_value) {
      best_value = value;
      best_theta = value == f[i] ? h * static_cast<double>(i) : theta;
    }
  }

  const HermEig top = hermitian_eig(rotated_real_part(m, best_theta));
  est.certificate = top.vectors.column(n - 1);
  const Complex q = dot(est.certificate, m * std::span<const Complex>(est.certificate));
  est.value = std::abs(q);
  est.residual = std::abs(est.value - top.values.back());
  return est;
}

}  // namespace aradius
