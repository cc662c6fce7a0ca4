#include "aradius/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>

#include "aradius/error.hpp"

namespace aradius {
namespace {

using Rng = std::mt19937_64;

constexpr std::array<Ensemble, 9> kAllEnsembles = {
    Ensemble::generic,    Ensemble::invertibleA, Ensemble::singularA,
    Ensemble::commuting,  Ensemble::a_normal_commuting, Ensemble::a_isometry,
    Ensemble::a_unitary,  Ensemble::nilpotentA2, Ensemble::random_params,
};

constexpr double kLeqTol = 1e-6;
constexpr double kEqTol = 1e-6;
constexpr double kHomogeneityTol = 1e-7;
constexpr double kFormulaTol = 1e-7;
constexpr double kEqFloor = 1e-12;
constexpr std::size_t kGenAttempts = 8;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) { return mix(seed ^ mix(tag)); }

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Complex gaussian_scalar(Rng& rng, double sigma) {
  std::normal_distribution<double> nd(0.0, sigma);
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

CMatrix gaussian(std::size_t rows, std::size_t cols, Rng& rng, double sigma) {
  CMatrix m(rows, cols);
  for (auto& z : m.entries()) z = gaussian_scalar(rng, sigma);
  return m;
}

// Gram-Schmidt (twice) on Gaussian columns.
CMatrix random_unitary(std::size_t k, Rng& rng) {
  const CMatrix g = gaussian(k, k, rng, 1.0);
  CMatrix q(k, k);
  for (std::size_t j = 0; j < k; ++j) {
    CVector v = g.column(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const CVector qi = q.column(i);
        const Complex c = dot(qi, v);
        for (std::size_t r = 0; r < k; ++r) v[r] -= c * qi[r];
      }
    }
    q.set_column(j, normalized(v));
  }
  return q;
}

CMatrix weight_of_rank(std::size_t dim, std::size_t rank, Rng& rng) {
  const CMatrix b = gaussian(rank, dim, rng, 1.0 / std::sqrt(2.0));
  return (b.adjoint() * b).hermitian_part();
}

CMatrix complement(const SpaceA& sp) { return CMatrix::identity(sp.dim()) - sp.proj(); }

// (I - P) H (I - P): acts only on null(A).
CMatrix null_part(const SpaceA& sp, Rng& rng, double sigma) {
  const CMatrix q = complement(sp);
  return q * gaussian(sp.dim(), sp.dim(), rng, sigma) * q;
}

// G P + (I - P) H (I - P): a generic operator mapping null(A) into itself.
CMatrix a_bounded_random(const SpaceA& sp, Rng& rng) {
  const double sigma = 1.0 / std::sqrt(2.0 * static_cast<double>(sp.dim()));
  CMatrix g = gaussian(sp.dim(), sp.dim(), rng, sigma) * sp.proj();
  return g + null_part(sp, rng, sigma);
}

// (A^{1/2})^dagger W A^{1/2} with W unitary on range(A), plus a null-space action.
CMatrix a_unitary_random(const SpaceA& sp, Rng& rng) {
  const CMatrix& q = sp.range_basis();
  const CMatrix w = q * random_unitary(sp.rank(), rng) * q.adjoint();
  const double sigma = 1.0 / std::sqrt(2.0 * static_cast<double>(sp.dim()));
  return sp.sqrt_a_pinv() * w * sp.sqrt_a() + null_part(sp, rng, sigma);
}

CMatrix a_nilpotent_random(const SpaceA& sp, Rng& rng) {
  const std::size_t r = sp.rank();
  const CMatrix basis = sp.range_basis() * random_unitary(r, rng);
  const std::size_t r1 = pick(rng, 1, r - 1);
  CMatrix q1(sp.dim(), r1);
  CMatrix q2(sp.dim(), r - r1);
  for (std::size_t j = 0; j < r; ++j) {
    if (j < r1) {
      q1.set_column(j, basis.column(j));
    } else {
      q2.set_column(j - r1, basis.column(j));
    }
  }
  const CMatrix g = gaussian(r1, r - r1, rng, 1.0 / std::sqrt(2.0 * static_cast<double>(r)));
  const CMatrix reduced = q1 * g * q2.adjoint();
  const double sigma = 1.0 / std::sqrt(2.0 * static_cast<double>(sp.dim()));
  return sp.sqrt_a_pinv() * reduced * sp.sqrt_a() + null_part(sp, rng, sigma);
}

CMatrix polynomial_of(const CMatrix& m, Rng& rng) {
  const std::size_t d = m.rows();
  const CMatrix m2 = m * m;
  const CMatrix m3 = m2 * m;
  return gaussian_scalar(rng, 0.5) * CMatrix::identity(d) + gaussian_scalar(rng, 1.0) * m +
         gaussian_scalar(rng, 0.5) * m2 + gaussian_scalar(rng, 0.25) * m3;
}

SeminormParams grid_params(Rng& rng) {
  static constexpr std::array<double, 6> kVals = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  SeminormParams p;
  do {
    p.alpha = kVals[pick(rng, 0, kVals.size() - 1)];
    p.beta = kVals[pick(rng, 0, kVals.size() - 1)];
  } while (p.alpha == 0.0 && p.beta == 0.0);
  return p;
}

SeminormParams continuous_params(Rng& rng) {
  SeminormParams p;
  do {
    p.alpha = uniform(rng, 0.0, 1.0) < 0.1 ? 0.0 : uniform(rng, 0.0, 4.0);
    p.beta = uniform(rng, 0.0, 1.0) < 0.1 ? 0.0 : uniform(rng, 0.0, 4.0);
  } while (p.alpha == 0.0 && p.beta == 0.0);
  return p;
}

bool a_square_zero(const SpaceA& sp, const CMatrix& t, double tol) {
  const double scale = tol * sp.weight().frobenius_norm() * t.frobenius_norm() * t.frobenius_norm();
  return (sp.weight() * t * t).frobenius_norm() <= scale;
}

bool entrywise_commute(const OpTuple& t, const OpTuple& s, double tol) {
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double scale = tol * t[k].frobenius_norm() * s[k].frobenius_norm();
    if (distance(t[k] * s[k], s[k] * t[k]) > scale) return false;
  }
  return true;
}

bool hypothesis_holds(const Instance& in) {
  const double tol = kDefaultClassifyTol;
  switch (in.ensemble) {
    case Ensemble::commuting:
      return tuple_predicates(in.space, in.t, tol).commuting && entrywise_commute(in.t, in.s, tol);
    case Ensemble::a_normal_commuting: {
      const TuplePredicates p = tuple_predicates(in.space, in.t, tol);
      return p.commuting && p.a_normal;
    }
    case Ensemble::a_isometry:
      for (const auto& op : in.t) {
        if (!classify(in.space, op, tol).a_isometry) return false;
      }
      return true;
    case Ensemble::a_unitary:
      return classify(in.space, in.t[0], tol).a_unitary;
    case Ensemble::nilpotentA2:
      for (const auto& op : in.t) {
        if (!a_square_zero(in.space, op, tol)) return false;
      }
      return true;
    default:
      return true;
  }
}

Instance generate_once(Ensemble e, std::size_t dim, std::size_t n, Rng& rng, double rank_tol) {
  Instance in;
  in.ensemble = e;
  std::size_t rank = pick(rng, 1, dim);
  if (e == Ensemble::invertibleA) rank = dim;
  if (e == Ensemble::singularA) rank = pick(rng, 1, dim - 1);
  if (e == Ensemble::nilpotentA2) rank = pick(rng, 2, dim);

  std::vector<CMatrix> t;
  std::vector<CMatrix> s;
  if (e == Ensemble::a_normal_commuting) {
    const CMatrix v = random_unitary(dim, rng);
    std::vector<double> diag(dim, 1.0);
    if (uniform(rng, 0.0, 1.0) < 0.5) {
      for (auto& x : diag) x = uniform(rng, 0.2, 2.0);
      std::vector<std::size_t> order(dim);
      for (std::size_t i = 0; i < dim; ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t i = rank; i < dim; ++i) diag[order[i]] = 0.0;
    }
    const CMatrix a = (v * CMatrix::diagonal(std::span<const double>(diag)) * v.adjoint()).hermitian_part();
    in.space = build_space(a, rank_tol);
    auto normal_op = [&] {
      CVector lams(dim);
      for (auto& z : lams) z = gaussian_scalar(rng, 1.0 / std::sqrt(2.0));
      return v * CMatrix::diagonal(std::span<const Complex>(lams)) * v.adjoint();
    };
    for (std::size_t k = 0; k < n; ++k) t.push_back(normal_op());
    for (std::size_t k = 0; k < n; ++k) s.push_back(normal_op());
  } else {
    in.space = build_space(weight_of_rank(dim, rank, rng), rank_tol);
    const SpaceA& sp = in.space;
    switch (e) {
      case Ensemble::commuting: {
        const CMatrix m = a_bounded_random(sp, rng);
        for (std::size_t k = 0; k < n; ++k) t.push_back(polynomial_of(m, rng));
        for (std::size_t k = 0; k < n; ++k) s.push_back(polynomial_of(m, rng));
        break;
      }
      case Ensemble::a_isometry:
        for (std::size_t k = 0; k < n; ++k) t.push_back(a_unitary_random(sp, rng));
        for (std::size_t k = 0; k < n; ++k) s.push_back(a_bounded_random(sp, rng));
        break;
      case Ensemble::a_unitary:
        t.push_back(a_unitary_random(sp, rng));
        s.push_back(a_bounded_random(sp, rng));
        break;
      case Ensemble::nilpotentA2:
        for (std::size_t k = 0; k < n; ++k) t.push_back(a_nilpotent_random(sp, rng));
        for (std::size_t k = 0; k < n; ++k) s.push_back(a_bounded_random(sp, rng));
        break;
      default:
        for (std::size_t k = 0; k < n; ++k) t.push_back(a_bounded_random(sp, rng));
        for (std::size_t k = 0; k < n; ++k) s.push_back(a_bounded_random(sp, rng));
        break;
    }
  }
  in.t = OpTuple(std::move(t));
  in.s = OpTuple(std::move(s));
  in.u = e == Ensemble::a_unitary ? in.t[0] : a_unitary_random(in.space, rng);
  in.params = e == Ensemble::random_params ? continuous_params(rng) : grid_params(rng);
  return in;
}

void hash_bytes(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

void hash_matrix(std::uint64_t& h, const CMatrix& m) {
  const std::size_t dims[2] = {m.rows(), m.cols()};
  hash_bytes(h, dims, sizeof dims);
  for (const Complex& z : m.entries()) {
    const double parts[2] = {z.real(), z.imag()};
    hash_bytes(h, parts, sizeof parts);
  }
}

std::string hex16(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Evaluation with a per-instance cache.

struct Val {
  double v = 0.0;
  Bound b = Bound::exact;
};

// Exact terms inherit the other side's direction; mixing a lower and an upper
// estimate is reported as a lower bound.
Bound merge(Bound a, Bound b) {
  if (a == b || b == Bound::exact) return a;
  if (a == Bound::exact) return b;
  return Bound::lower_bound;
}

Val operator+(Val a, Val b) { return {a.v + b.v, merge(a.b, b.b)}; }
Val operator*(double c, Val a) { return {c * a.v, a.b}; }
Val operator*(Val a, Val b) { return {a.v * b.v, merge(a.b, b.b)}; }
Val pow_val(Val a, int m) { return {std::pow(a.v, m), a.b}; }
Val sqrt_val(Val a) { return {std::sqrt(std::max(a.v, 0.0)), a.b}; }
Val max_val(Val a, Val b) { return a.v >= b.v ? a : b; }
Val min_val(Val a, Val b) { return a.v <= b.v ? a : b; }

std::string num_key(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

std::string param_key(SeminormParams p) { return num_key(p.alpha) + "," + num_key(p.beta); }

OpTuple single(const CMatrix& m) { return OpTuple({m}); }

class Eval {
 public:
  Eval(const Instance& inst, const HarnessConfig& cfg, bool escalated,
       std::vector<CVector> extra_seeds)
      : in(inst), cfg_(cfg), escalated_(escalated) {
    rc_ = cfg.radii;
    rc_.opt.seed = sub_seed(inst.seed, escalated ? 0xe5ca1a7eULL : 0x0b5e55edULL);
    if (escalated) {
      const std::size_t f = std::max<std::size_t>(cfg.escalation_factor, 1);
      rc_.opt.starts *= f;
      rc_.seeded_starts *= f;
      rc_.opt.max_iter *= f;
    }
    rc_.extra_seeds.insert(rc_.extra_seeds.end(), extra_seeds.begin(), extra_seeds.end());
    const SpaceA& sp = in.space;
    const std::size_t n = in.t.size();
    std::vector<CMatrix> ts, tts, sss, sadjt, prod, sq;
    for (std::size_t k = 0; k < n; ++k) {
      adj_t.push_back(a_adjoint(sp, in.t[k]));
      adj_s.push_back(a_adjoint(sp, in.s[k]));
      ts.push_back(adj_t[k] * in.t[k]);
      tts.push_back(in.t[k] * adj_t[k]);
      sss.push_back(adj_s[k] * in.s[k]);
      sadjt.push_back(adj_s[k] * in.t[k]);
      prod.push_back(in.t[k] * in.s[k]);
      sq.push_back(in.t[k] * in.t[k]);
    }
    tst = std::move(ts);
    ttst = std::move(tts);
    sss_ = std::move(sss);
    s_adj_t = OpTuple(std::move(sadjt));
    t_times_s = OpTuple(std::move(prod));
    t_squared = OpTuple(std::move(sq));
    for (const auto& p : cfg.inf_grid) {
      if (p.alpha + p.beta > 0.0) weights.push_back(p.alpha / (p.alpha + p.beta));
    }
    std::sort(weights.begin(), weights.end());
    weights.erase(std::unique(weights.begin(), weights.end()), weights.end());
  }

  const Instance& in;
  std::vector<CMatrix> adj_t, adj_s;
  std::vector<CMatrix> tst, ttst, sss_;  // T_k^# T_k, T_k T_k^#, S_k^# S_k
  OpTuple s_adj_t, t_times_s, t_squared;
  // Distinct alpha / (alpha + beta) over the inf grid.
  std::vector<double> weights;

  std::size_t n() const { return in.t.size(); }
  const SpaceA& sp() const { return in.space; }
  double tol() const { return rc_.classify_tol; }
  bool escalated() const { return escalated_; }

  Val norm(const std::string& key, const CMatrix& m) {
    return cached("norm|" + key, [&] { return a_op_seminorm(sp(), m, rc_); });
  }
  Val numrad(const std::string& key, const CMatrix& m) {
    return cached("numrad|" + key, [&] { return a_numrad(sp(), m, rc_); });
  }
  Val joint(const std::string& key, const OpTuple& t) {
    return cached("joint|" + key, [&] { return joint_op_norm(sp(), t, rc_); });
  }
  Val joint_def(const std::string& key, const OpTuple& t) {
    return cached("jointdef|" + key, [&] {
      return joint_op_norm_by_definition(sp(), t, with_brute(t, 0.0, 1.0, true));
    });
  }
  // Single operators go through the sweep, which is exact to the grid refinement.
  Val euclid(const std::string& key, const OpTuple& t) {
    if (t.size() == 1) return numrad(key, t[0]);
    return cached("euclid|" + key,
                  [&] { return euclid_radius(sp(), t, with_brute(t, 1.0, 0.0, true)); });
  }
  Val crawford(const std::string& key, const OpTuple& t) {
    return cached("crawford|" + key,
                  [&] { return joint_crawford(sp(), t, with_brute(t, 1.0, 0.0, false)); });
  }
  Val minmod(const std::string& key, const OpTuple& t) {
    return cached("minmod|" + key, [&] { return joint_min_modulus(sp(), t, rc_); });
  }
  Val ab(const std::string& key, const OpTuple& t, SeminormParams p, bool dispatch = true,
         const std::vector<CVector>& seeds = {}) {
    return cached("ab|" + key + "|" + param_key(p) + (dispatch ? "" : "|nd"), [&] {
      RadiiConfig rc = with_brute(t, p.alpha, p.beta, true);
      rc.dispatch_special_cases = dispatch;
      rc.extra_seeds.insert(rc.extra_seeds.end(), seeds.begin(), seeds.end());
      return alpha_beta_seminorm(sp(), t, p, rc);
    });
  }
  // The main seminorm, seeded with the Euclidean-radius certificate of the same tuple.
  Val ab_t(SeminormParams p) {
    euclid("T", in.t);
    const Estimate& w = cache_.at(in.t.size() == 1 ? "numrad|T" : "euclid|T");
    std::vector<CVector> seeds;
    if (!w.certificate.empty()) seeds.push_back(w.certificate);
    return ab("T", in.t, p, true, seeds);
  }

  std::vector<CVector> certificates() const {
    std::vector<CVector> out;
    for (const auto& [key, est] : cache_) {
      if (!est.certificate.empty()) out.push_back(est.certificate);
    }
    return out;
  }

 private:
  template <class F>
  Val cached(const std::string& key, F&& compute) {
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, compute()).first;
    return {it->second.value, it->second.bound};
  }

  // In escalated mode, adds the brute-force extremiser of the same objective
  // as an extra start.
  RadiiConfig with_brute(const OpTuple& t, double alpha, double beta, bool maximise) const {
    RadiiConfig rc = rc_;
    if (!escalated_ || cfg_.brute_force_samples == 0 || sp().zero_weight()) return rc;
    const std::vector<CMatrix> ops = compressed_tuple(sp(), t, rc_);
    const SphereObjective obj = weighted_tuple_objective(ops, alpha, beta);
    const BruteForceResult bf =
        brute_force_extremum(obj, cfg_.brute_force_samples, sub_seed(rc_.opt.seed, 0xb7u));
    rc.extra_seeds.push_back(sp().embed(maximise ? bf.argmax : bf.argmin));
    return rc;
  }

  const HarnessConfig& cfg_;
  bool escalated_;
  RadiiConfig rc_;
  std::map<std::string, Estimate> cache_;
};

// ---------------------------------------------------------------------------
// Registry.

struct Outcome {
  Val lhs;
  Val rhs;
  bool skipped = false;
  std::string note;
  // Equality checks: slack = eq_tol max(|lhs|, |rhs|) + floor, or
  // eq_tol (1 + |lhs| + |rhs|) when `eq_absolute`.
  double eq_tol = kEqTol;
  bool eq_absolute = false;
};

Outcome leq(Val lhs, Val rhs) {
  Outcome o;
  o.lhs = lhs;
  o.rhs = rhs;
  return o;
}
Outcome eq(Val lhs, Val rhs, double tol = kEqTol) {
  Outcome o = leq(lhs, rhs);
  o.eq_tol = tol;
  return o;
}
Outcome skip(std::string note) {
  Outcome o;
  o.skipped = true;
  o.note = std::move(note);
  return o;
}

using CheckFn = std::function<Outcome(Eval&)>;

struct CheckDef {
  CheckInfo info;
  CheckFn fn;
};

const std::vector<Ensemble> kGeneral = {Ensemble::generic, Ensemble::invertibleA,
                                        Ensemble::singularA, Ensemble::random_params};

double sqrt_n(const Eval& e) { return std::sqrt(static_cast<double>(e.n())); }

CMatrix lin(double a, const CMatrix& x, double b, const CMatrix& y) {
  return Complex{a, 0.0} * x + Complex{b, 0.0} * y;
}

CMatrix sum_lin(double a, const std::vector<CMatrix>& x, double b, const std::vector<CMatrix>& y) {
  CMatrix out = CMatrix::zeros(x.front().rows(), x.front().cols());
  for (std::size_t k = 0; k < x.size(); ++k) out += lin(a, x[k], b, y[k]);
  return out;
}

OpTuple tuple_lin(double a, const std::vector<CMatrix>& x, double b, const std::vector<CMatrix>& y) {
  std::vector<CMatrix> out;
  for (std::size_t k = 0; k < x.size(); ++k) out.push_back(lin(a, x[k], b, y[k]));
  return OpTuple(std::move(out));
}

const CMatrix& t1(const Eval& e) { return e.in.t[0]; }
const CMatrix& s1(const Eval& e) { return e.in.s[0]; }

// omega_A(w T^#T + (1 - w) T T^#) for the tuple.
Val mix5(Eval& e, double w) {
  return e.euclid("mix5|" + num_key(w), tuple_lin(w, e.tst, 1.0 - w, e.ttst));
}

// omega_A((w/4 + 1 - w) T^#T + (w/4) T T^#) for the tuple.
Val mix7(Eval& e, double w) {
  return e.euclid("mix7|" + num_key(w), tuple_lin(w / 4.0 + 1.0 - w, e.tst, w / 4.0, e.ttst));
}

// Certified upper bound of w_A for a tuple of A-selfadjoint operators (n <= 3):
// w_A(X) = max over real unit lambda of ||sum lambda_k X^_k||, swept over a
// hemisphere grid plus the Lipschitz slack of the parametrisation. Cells whose
// bound still exceeds `target` are split until it drops below or the budget ends.
double selfadjoint_radius_upper(const SpaceA& sp, const OpTuple& x, double target) {
  std::vector<CMatrix> ops;
  double lip = 0.0;
  for (const auto& op : x) {
    ops.push_back(sp.compress(op).hermitian_part());
    lip += std::pow(spectral_norm(ops.back()), 2);
  }
  lip = std::sqrt(lip);
  const std::size_t m = ops.size();
  auto value = [&](const double* c) {
    double lam[3];
    if (m == 1) {
      lam[0] = 1.0;
    } else if (m == 2) {
      lam[0] = std::cos(c[0]);
      lam[1] = std::sin(c[0]);
    } else {
      lam[0] = std::sin(c[0]) * std::cos(c[1]);
      lam[1] = std::sin(c[0]) * std::sin(c[1]);
      lam[2] = std::cos(c[0]);
    }
    CMatrix sum = CMatrix::zeros(ops.front().rows(), ops.front().rows());
    for (std::size_t k = 0; k < m; ++k) sum += Complex{lam[k], 0.0} * ops[k];
    return spectral_norm(sum);
  };
  if (m == 1) return value(nullptr);
  if (m > 3) return std::numeric_limits<double>::infinity();

  struct Cell {
    std::array<double, 2> c;
    std::array<double, 2> hw;
  };
  const double pi = std::acos(-1.0);
  std::vector<Cell> stack;
  if (m == 2) {
    constexpr std::size_t kSteps = 4096;
    const double h = pi / kSteps;
    for (std::size_t i = 0; i < kSteps; ++i) stack.push_back({{i * h, 0.0}, {h / 2.0, 0.0}});
  } else {
    constexpr std::size_t kPolar = 256;
    constexpr std::size_t kAzimuth = 512;
    const double hp = (pi / 2.0) / kPolar;
    const double ha = 2.0 * pi / kAzimuth;
    for (std::size_t i = 0; i <= kPolar; ++i)
      for (std::size_t j = 0; j < kAzimuth; ++j)
        stack.push_back({{i * hp, j * ha}, {hp / 2.0, ha / 2.0}});
  }
  constexpr std::size_t kRefineBudget = 400000;
  std::size_t refined = 0;
  double best = 0.0;
  while (!stack.empty()) {
    const Cell cell = stack.back();
    stack.pop_back();
    const double bound = value(cell.c.data()) + lip * std::hypot(cell.hw[0], cell.hw[1]);
    if (bound <= target || refined >= kRefineBudget) {
      best = std::max(best, bound);
      continue;
    }
    const int splits = m == 2 ? 1 : 2;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < (splits == 2 ? 2 : 1); ++b) {
        Cell child = cell;
        child.hw[0] = cell.hw[0] / 2.0;
        child.c[0] = cell.c[0] + (a == 0 ? -1.0 : 1.0) * child.hw[0];
        if (splits == 2) {
          child.hw[1] = cell.hw[1] / 2.0;
          child.c[1] = cell.c[1] + (b == 0 ? -1.0 : 1.0) * child.hw[1];
        }
        stack.push_back(child);
        ++refined;
      }
    }
  }
  return best;
}

template <class F>
Val grid_min(const Eval& e, F&& f) {
  Val best{std::numeric_limits<double>::infinity(), Bound::exact};
  for (double w : e.weights) best = min_val(best, f(w));
  return best;
}

double weight_of(SeminormParams p) { return p.alpha / (p.alpha + p.beta); }

Val numrad_t1(Eval& e) { return e.numrad("T", t1(e)); }
Val norm_sum_t1(Eval& e) { return e.norm("TsT+TTs1", e.tst[0] + e.ttst[0]); }
Val numrad_t1_sq(Eval& e) { return e.numrad("T1^2", e.t_squared[0]); }

CMatrix squares_sum(const Eval& e, std::size_t count) {
  CMatrix out = CMatrix::zeros(e.sp().dim(), e.sp().dim());
  for (std::size_t k = 0; k < count; ++k) out += e.tst[k] * e.tst[k] + e.sss_[k] * e.sss_[k];
  return out;
}

Val sum_sq_norms_sadjt(Eval& e) {
  Val total;
  for (std::size_t k = 0; k < e.n(); ++k) {
    total = total + pow_val(e.norm("SadjT" + std::to_string(k), e.s_adj_t[k]), 2);
  }
  return total;
}

bool all_a_isometries(const Eval& e) {
  for (const auto& op : e.in.t) {
    if (!classify(e.sp(), op, e.tol()).a_isometry) return false;
  }
  return true;
}

bool all_a_square_zero(const Eval& e) {
  for (const auto& op : e.in.t) {
    if (!a_square_zero(e.sp(), op, e.tol())) return false;
  }
  return true;
}

Rng check_rng(const Eval& e, std::uint64_t tag) { return Rng(sub_seed(e.in.seed, tag)); }

CVector random_vector(std::size_t d, Rng& rng) {
  CVector v(d);
  for (auto& z : v) z = gaussian_scalar(rng, 1.0 / std::sqrt(2.0));
  return v;
}

// Random x with ||x||_A = 1 (A != 0 is guaranteed by the ensembles).
CVector random_a_unit(const SpaceA& sp, Rng& rng) {
  CVector x = random_vector(sp.dim(), rng);
  const double nx = a_norm(sp, x);
  for (auto& z : x) z /= nx;
  return x;
}

std::vector<CheckDef> build_registry() {
  std::vector<CheckDef> r;
  auto add = [&](std::string id, std::string statement, Relation rel,
                 std::vector<Ensemble> ens, CheckFn fn) {
    r.push_back({CheckInfo{std::move(id), std::move(statement), rel, std::move(ens)},
                 std::move(fn)});
  };
  const Relation LE = Relation::leq;
  const Relation EQ = Relation::eq;

  // Single-operator bounds.
  add("INEQ-00-lower", "||T||_A / 2 <= w_A(T)", LE, kGeneral, [](Eval& e) {
    return leq(0.5 * e.norm("T1", t1(e)), numrad_t1(e));
  });
  add("INEQ-00-upper", "w_A(T) <= ||T||_A", LE, kGeneral, [](Eval& e) {
    return leq(numrad_t1(e), e.norm("T1", t1(e)));
  });
  add("EQ-SA", "T = T^#A  =>  w_A(T) = ||T||_A  (on T + T^#A)", EQ, kGeneral, [](Eval& e) {
    const CMatrix h = t1(e) + e.adj_t[0];
    if (!classify(e.sp(), h, e.tol()).a_selfadjoint) return skip("not A-selfadjoint");
    return eq(e.numrad("H", h), e.norm("H", h));
  });
  add("EQ-NILP", "A T^2 = 0  =>  w_A(T) = ||T||_A / 2", EQ, {Ensemble::nilpotentA2}, [](Eval& e) {
    if (!a_square_zero(e.sp(), t1(e), e.tol())) return skip("A T^2 != 0");
    return eq(numrad_t1(e), 0.5 * e.norm("T1", t1(e)));
  });
  add("INEQ-Z1", "w_A^2(T) <= ||T^#T + TT^#||_A / 2", LE, kGeneral, [](Eval& e) {
    return leq(pow_val(numrad_t1(e), 2), 0.5 * norm_sum_t1(e));
  });
  add("INEQ-Z2", "w_A^2(T) <= ||T^#T + TT^#||_A / 4 + w_A(T^2) / 2", LE, kGeneral, [](Eval& e) {
    return leq(pow_val(numrad_t1(e), 2), 0.25 * norm_sum_t1(e) + 0.5 * numrad_t1_sq(e));
  });
  for (int m = 1; m <= 3; ++m) {
    const std::string ms = std::to_string(m);
    add("INEQ-G1-m" + ms, "w_A^(2m)(T) <= ||(T^#T)^m + (TT^#)^m||_A / 2, m = " + ms, LE, kGeneral,
        [m, ms](Eval& e) {
          const CMatrix x = power(e.tst[0], m) + power(e.ttst[0], m);
          return leq(pow_val(numrad_t1(e), 2 * m), 0.5 * e.norm("G1|" + ms, x));
        });
  }
  for (int m = 1; m <= 3; ++m) {
    const std::string ms = std::to_string(m);
    add("INEQ-G2-m" + ms, "w_A^m(S^#T) <= ||(T^#T)^m + (S^#S)^m||_A / 2, m = " + ms, LE, kGeneral,
        [m, ms](Eval& e) {
          const CMatrix x = power(e.tst[0], m) + power(e.sss_[0], m);
          return leq(pow_val(e.numrad("SadjT1", e.s_adj_t[0]), m), 0.5 * e.norm("G2|" + ms, x));
        });
  }
  add("INEQ-G3", "w_A(S^#T) <= ||T^#T + S^#S||_A / 2", LE, kGeneral, [](Eval& e) {
    return leq(e.numrad("SadjT1", e.s_adj_t[0]), 0.5 * e.norm("G3", e.tst[0] + e.sss_[0]));
  });

  // Lemmas.
  add("LEM-L1", "|<x,z>_A <z,y>_A| <= (||x||_A ||y||_A + |<x,y>_A|) / 2, ||z||_A = 1", LE,
      kGeneral, [](Eval& e) {
        Rng rng = check_rng(e, 0x11);
        const CVector x = random_vector(e.sp().dim(), rng);
        const CVector y = random_vector(e.sp().dim(), rng);
        const CVector z = random_a_unit(e.sp(), rng);
        const double lhs = std::abs(a_inner(e.sp(), x, z) * a_inner(e.sp(), z, y));
        const double rhs =
            0.5 * (a_norm(e.sp(), x) * a_norm(e.sp(), y) + std::abs(a_inner(e.sp(), x, y)));
        return leq({lhs}, {rhs});
      });
  for (int m = 2; m <= 3; ++m) {
    const std::string ms = std::to_string(m);
    add("LEM-L2-m" + ms, "<Tx,x>_A^m <= <T^m x,x>_A for A-positive T (T^#T), m = " + ms, LE,
        kGeneral, [m](Eval& e) {
          const CMatrix& x_op = e.tst[0];
          if (!classify(e.sp(), x_op, e.tol()).a_positive) return skip("not A-positive");
          Rng rng = check_rng(e, 0x20 + static_cast<std::uint64_t>(m));
          const CVector x = random_a_unit(e.sp(), rng);
          const double lhs = std::pow(a_inner(e.sp(), x_op * std::span<const Complex>(x), x).real(), m);
          const double rhs = a_inner(e.sp(), power(x_op, m) * std::span<const Complex>(x), x).real();
          return leq({lhs}, {rhs});
        });
  }
  add("LEM-L4-lower", "||T||_A / (2 sqrt n) <= w_A(T)", LE, kGeneral, [](Eval& e) {
    return leq((0.5 / sqrt_n(e)) * e.joint("T", e.in.t), e.euclid("T", e.in.t));
  });
  add("LEM-L4-upper", "w_A(T) <= ||T||_A", LE, kGeneral, [](Eval& e) {
    return leq(e.euclid("T", e.in.t), e.joint("T", e.in.t));
  });
  add("LEM-L004", "commuting A-normal  =>  ||T||_A = w_A(T)", EQ, {Ensemble::a_normal_commuting},
      [](Eval& e) {
        const TuplePredicates p = tuple_predicates(e.sp(), e.in.t, e.tol());
        if (!p.commuting || !p.a_normal) return skip("not commuting A-normal");
        return eq(e.joint("T", e.in.t), e.euclid("T", e.in.t));
      });
  add("LEM-L05", "sup-definition of ||T||_A = ||sum T_k^# T_k||_A^(1/2)", EQ, kGeneral,
      [](Eval& e) {
        Outcome o = eq(e.joint_def("T", e.in.t), e.joint("T", e.in.t), kFormulaTol);
        o.eq_absolute = true;
        return o;
      });
  add("LEM-L5", "||TS||_A <= ||T||_A ||S||_A", LE, kGeneral, [](Eval& e) {
    return leq(e.joint("TS", e.t_times_s), e.joint("T", e.in.t) * e.joint("S", e.in.s));
  });
  add("LEM-L6", "w_A(TS) <= 4n w_A(T) w_A(S)", LE, kGeneral, [](Eval& e) {
    const double c = 4.0 * static_cast<double>(e.n());
    return leq(e.euclid("TS", e.t_times_s), c * (e.euclid("T", e.in.t) * e.euclid("S", e.in.s)));
  });
  add("LEM-L66", "TS = ST  =>  w_A(TS) <= 2 sqrt(n) w_A(T) w_A(S)", LE, {Ensemble::commuting},
      [](Eval& e) {
        if (!entrywise_commute(e.in.t, e.in.s, e.tol())) return skip("TS != ST");
        return leq(e.euclid("TS", e.t_times_s),
                   (2.0 * sqrt_n(e)) * (e.euclid("T", e.in.t) * e.euclid("S", e.in.s)));
      });
  const std::vector<Ensemble> iso = {Ensemble::a_isometry, Ensemble::a_unitary};
  add("LEM-L7-i", "T_k A-isometries  =>  w_A(TS) <= ||S||_A", LE, iso, [](Eval& e) {
    if (!all_a_isometries(e)) return skip("not A-isometries");
    return leq(e.euclid("TS", e.t_times_s), e.joint("S", e.in.s));
  });
  add("LEM-L7-ii", "T_k A-isometries  =>  ||TS||_A <= ||S||_A", LE, iso, [](Eval& e) {
    if (!all_a_isometries(e)) return skip("not A-isometries");
    return leq(e.joint("TS", e.t_times_s), e.joint("S", e.in.s));
  });

  // Definition remarks and seminorm properties.
  add("REMARK-a0", "||T||_{A_{0,1}} = ||T||_A (general optimiser path)", EQ, kGeneral,
      [](Eval& e) {
        return eq(e.ab("T", e.in.t, {0.0, 1.0}, false), e.joint("T", e.in.t));
      });
  add("REMARK-b0", "||T||_{A_{1,0}} = w_A(T) (general optimiser path)", EQ, kGeneral,
      [](Eval& e) {
        return eq(e.ab("T", e.in.t, {1.0, 0.0}, false), e.euclid("T", e.in.t));
      });
  add("PROP-P1a", "||T||_{A_{a,b}} = 0  <=>  A T_k = 0 for all k", EQ, kGeneral, [](Eval& e) {
    Rng rng = check_rng(e, 0x1a);
    std::vector<CMatrix> k_ops;
    for (std::size_t k = 0; k < e.n(); ++k) k_ops.push_back(null_part(e.sp(), rng, 1.0));
    Val lhs = e.ab("K", OpTuple(std::move(k_ops)), e.in.params);
    // A nonzero seminorm for a tuple with A T_k != 0 is the other direction.
    if (e.joint("T", e.in.t).v > 1e-8 && e.ab_t(e.in.params).v <= 0.0) lhs.v += 1.0;
    return eq(lhs, {0.0});
  });
  add("PROP-P1b", "||lambda T||_{A_{a,b}} = |lambda| ||T||_{A_{a,b}}", EQ, kGeneral, [](Eval& e) {
    Rng rng = check_rng(e, 0x1b);
    const double mod = uniform(rng, 0.5, 2.0);
    const Complex lambda = std::polar(mod, uniform(rng, 0.0, 2.0 * std::acos(-1.0)));
    return eq(e.ab("lambdaT", tuple_scaled(e.in.t, lambda), e.in.params),
              mod * e.ab_t(e.in.params), kHomogeneityTol);
  });
  add("PROP-P1c", "||T + S||_{A_{a,b}} <= ||T||_{A_{a,b}} + ||S||_{A_{a,b}}", LE, kGeneral,
      [](Eval& e) {
        const SeminormParams p = e.in.params;
        return leq(e.ab("T+S", tuple_sum(e.in.t, e.in.s), p),
                   e.ab_t(p) + e.ab("S", e.in.s, p));
      });
  add("PROP-P2", "||(S,...,S)||_{A_{a,1-a}} = sqrt(n) ||S||_{A_{a,1-a}}", EQ, kGeneral,
      [](Eval& e) {
        static constexpr std::array<double, 5> kAlphas = {0.0, 0.25, 0.5, 0.75, 1.0};
        Rng rng = check_rng(e, 0x02);
        const std::size_t copies = pick(rng, 2, 4);
        const double a = kAlphas[pick(rng, 0, kAlphas.size() - 1)];
        const SeminormParams p{a, 1.0 - a};
        const OpTuple constant(std::vector<CMatrix>(copies, s1(e)));
        return eq(e.ab("const" + std::to_string(copies), constant, p),
                  std::sqrt(static_cast<double>(copies)) * e.ab("S1", single(s1(e)), p));
      });

  // Equivalence with the Euclidean radius and the joint norm.
  add("TH1-i-lower", "sqrt(a+b) w_A(T) <= ||T||_{A_{a,b}}", LE, kGeneral, [](Eval& e) {
    const SeminormParams p = e.in.params;
    return leq(std::sqrt(p.alpha + p.beta) * e.euclid("T", e.in.t), e.ab_t(p));
  });
  add("TH1-i-upper", "||T||_{A_{a,b}} <= sqrt(a + 4bn) w_A(T)", LE, kGeneral, [](Eval& e) {
    const SeminormParams p = e.in.params;
    const double c = std::sqrt(p.alpha + 4.0 * p.beta * static_cast<double>(e.n()));
    return leq(e.ab_t(p), c * e.euclid("T", e.in.t));
  });
  add("TH1-ii-lower", "max{sqrt b, sqrt((a+b)/n) / 2} ||T||_A <= ||T||_{A_{a,b}}", LE, kGeneral,
      [](Eval& e) {
        const SeminormParams p = e.in.params;
        const double c = std::max(std::sqrt(p.beta),
                                  0.5 * std::sqrt((p.alpha + p.beta) / static_cast<double>(e.n())));
        return leq(c * e.joint("T", e.in.t), e.ab_t(p));
      });
  add("TH1-ii-upper", "||T||_{A_{a,b}} <= sqrt(a+b) ||T||_A", LE, kGeneral, [](Eval& e) {
    const SeminormParams p = e.in.params;
    return leq(e.ab_t(p), std::sqrt(p.alpha + p.beta) * e.joint("T", e.in.t));
  });
  add("PROP-UNIT", "||U T U^#||_{A_{a,b}} = ||T||_{A_{a,b}} for A-unitary U", EQ,
      {Ensemble::generic, Ensemble::invertibleA, Ensemble::singularA}, [](Eval& e) {
        const CMatrix& u = e.in.u;
        if (!classify(e.sp(), u, e.tol()).a_unitary) return skip("U not A-unitary");
        const CMatrix u_adj = a_adjoint(e.sp(), u);
        std::vector<CMatrix> conj;
        for (const auto& op : e.in.t) conj.push_back(u * op * u_adj);
        return eq(e.ab("UTU", OpTuple(std::move(conj)), e.in.params), e.ab_t(e.in.params));
      });

  // Products.
  add("TH2", "||TS|| <= min{2 sqrt(n/b), sqrt(a+b)/b, 4n/sqrt(a+b)} ||T|| ||S||, b != 0", LE,
      kGeneral, [](Eval& e) {
        const SeminormParams p = e.in.params;
        if (p.beta == 0.0) return skip("beta = 0");
        const double n = static_cast<double>(e.n());
        const double c = std::min({2.0 * std::sqrt(n / p.beta), std::sqrt(p.alpha + p.beta) / p.beta,
                                   4.0 * n / std::sqrt(p.alpha + p.beta)});
        return leq(e.ab("TS", e.t_times_s, p), c * (e.ab_t(p) * e.ab("S", e.in.s, p)));
      });
  add("TH3-i", "TS = ST, b != 0  =>  ||TS|| <= sqrt(4an/(a+b)^2 + 1/b) ||T|| ||S||", LE,
      {Ensemble::commuting}, [](Eval& e) {
        const SeminormParams p = e.in.params;
        if (p.beta == 0.0) return skip("beta = 0");
        if (!entrywise_commute(e.in.t, e.in.s, e.tol())) return skip("TS != ST");
        const double n = static_cast<double>(e.n());
        const double c = std::sqrt(4.0 * p.alpha * n / std::pow(p.alpha + p.beta, 2) + 1.0 / p.beta);
        return leq(e.ab("TS", e.t_times_s, p), c * (e.ab_t(p) * e.ab("S", e.in.s, p)));
      });
  add("TH3-ii", "T_k A-isometries  =>  ||TS|| <= sqrt(4an/(a+b) + 1) ||S||", LE, iso,
      [](Eval& e) {
        if (!all_a_isometries(e)) return skip("not A-isometries");
        const SeminormParams p = e.in.params;
        const double n = static_cast<double>(e.n());
        const double c = std::sqrt(4.0 * p.alpha * n / (p.alpha + p.beta) + 1.0);
        return leq(e.ab("TS", e.t_times_s, p), c * e.ab("S", e.in.s, p));
      });

  // Lower bounds.
  add("TH-LOW", "max{sqrt(a w^2 + b m^2), sqrt(a c^2 + b ||T||^2)} <= ||T||_{A_{a,b}}", LE,
      kGeneral, [](Eval& e) {
        const SeminormParams p = e.in.params;
        const Val w = e.euclid("T", e.in.t);
        const Val m = e.minmod("T", e.in.t);
        const Val c = e.crawford("T", e.in.t);
        const Val nt = e.joint("T", e.in.t);
        const Val first = sqrt_val(p.alpha * pow_val(w, 2) + p.beta * pow_val(m, 2));
        const Val second = sqrt_val(p.alpha * pow_val(c, 2) + p.beta * pow_val(nt, 2));
        return leq(max_val(first, second), e.ab_t(p));
      });
  add("TH-P1", "commuting  =>  ||sum (a/8) T T^# + (a/8 + b/2) T^# T||_A <= ||T||^2_{A_{a,b}}", LE,
      {Ensemble::commuting}, [](Eval& e) {
        if (!tuple_predicates(e.sp(), e.in.t, e.tol()).commuting) return skip("not commuting");
        const SeminormParams p = e.in.params;
        const CMatrix x = sum_lin(p.alpha / 8.0, e.ttst, p.alpha / 8.0 + p.beta / 2.0, e.tst);
        return leq(e.norm("P1|" + param_key(p), x), pow_val(e.ab_t(p), 2));
      });
  add("COR-CL", "||(a/8) T T^# + (a/8 + b/2) T^# T||_A <= ||T||^2_{A_{a,b}}, n = 1", LE, kGeneral,
      [](Eval& e) {
        const SeminormParams p = e.in.params;
        const CMatrix x = lin(p.alpha / 8.0, e.ttst[0], p.alpha / 8.0 + p.beta / 2.0, e.tst[0]);
        return leq(e.norm("CL|" + param_key(p), x), pow_val(e.ab("T1", single(t1(e)), p), 2));
      });

  // Upper bounds through T^#T and T T^#.
  add("TH5-stmt", "||T||^2_{A_{a,b}} <= sqrt(n) w_A(a T T^# + b T^# T)", LE, kGeneral,
      [](Eval& e) {
        const SeminormParams p = e.in.params;
        const Val rhs = (sqrt_n(e) * (p.alpha + p.beta)) * mix5(e, 1.0 - weight_of(p));
        return leq(pow_val(e.ab_t(p), 2), rhs);
      });
  add("TH5-proof", "||T||^2_{A_{a,b}} <= sqrt(n) w_A(a T^# T + b T T^#)", LE, kGeneral,
      [](Eval& e) {
        const SeminormParams p = e.in.params;
        const Val rhs = (sqrt_n(e) * (p.alpha + p.beta)) * mix5(e, weight_of(p));
        Outcome o = leq(pow_val(e.ab_t(p), 2), rhs);
        if (e.escalated() && o.lhs.v > o.rhs.v) {
          const double w = weight_of(p);
          const double factor = sqrt_n(e) * (p.alpha + p.beta);
          const double upper =
              factor * selfadjoint_radius_upper(e.sp(), tuple_lin(w, e.tst, 1.0 - w, e.ttst),
                                                o.lhs.v / factor);
          char buf[160];
          std::snprintf(buf, sizeof buf, "certified upper bound of rhs: %.17g (%s)", upper,
                        o.lhs.v > upper ? "lhs exceeds it" : "lhs within it");
          o.note = buf;
        }
        return o;
      });
  add("COR-TH5", "w_A^2(T) <= inf sqrt(n)/(a+b) w_A(a T^#T + b TT^#)", LE, kGeneral, [](Eval& e) {
    const Val rhs = grid_min(e, [&](double w) { return sqrt_n(e) * mix5(e, w); });
    return leq(pow_val(e.euclid("T", e.in.t), 2), rhs);
  });
  auto th5_n1_mid = [](Eval& e) {
    return grid_min(e, [&](double w) {
      return e.norm("th5n1|" + num_key(w), lin(w, e.tst[0], 1.0 - w, e.ttst[0]));
    });
  };
  add("COR-TH5-n1", "w_A^2(T) <= inf ||a T^#T + b TT^#||_A / (a+b)", LE, kGeneral,
      [th5_n1_mid](Eval& e) { return leq(pow_val(numrad_t1(e), 2), th5_n1_mid(e)); });
  add("REFINE-ORDER-TH5-n1", "inf ||a T^#T + b TT^#||_A / (a+b) <= ||T^#T + TT^#||_A / 2", LE,
      kGeneral, [th5_n1_mid](Eval& e) { return leq(th5_n1_mid(e), 0.5 * norm_sum_t1(e)); });

  add("TH6", "||T||^2_{A_{a,b}} <= ||sum (a/2 + b) T^#T + (a/2) TT^#||_A", LE, kGeneral,
      [](Eval& e) {
        const SeminormParams p = e.in.params;
        const CMatrix x = sum_lin(p.alpha / 2.0 + p.beta, e.tst, p.alpha / 2.0, e.ttst);
        return leq(pow_val(e.ab_t(p), 2), e.norm("TH6|" + param_key(p), x));
      });
  auto th6_mid = [](Eval& e) {
    return grid_min(e, [&](double w) {
      return sqrt_val(e.norm("th6|" + num_key(w), sum_lin(w / 2.0 + 1.0 - w, e.tst, w / 2.0, e.ttst)));
    });
  };
  add("COR-TH6", "w_A(T) <= inf ||sum (a/2 + b) T^#T + (a/2) TT^#||_A^(1/2) / sqrt(a+b)", LE,
      kGeneral, [th6_mid](Eval& e) { return leq(e.euclid("T", e.in.t), th6_mid(e)); });
  add("REFINE-ORDER-TH6", "inf-form <= ||sum T^#T + TT^#||_A^(1/2) / sqrt 2", LE, kGeneral,
      [th6_mid](Eval& e) {
        const Val rhs = (1.0 / std::sqrt(2.0)) * sqrt_val(e.norm("sumTsT+TTs", sum_lin(1.0, e.tst, 1.0, e.ttst)));
        return leq(th6_mid(e), rhs);
      });
  auto th6_n1_mid = [](Eval& e) {
    return grid_min(e, [&](double w) {
      return e.norm("th6n1|" + num_key(w), lin(w / 2.0 + 1.0 - w, e.tst[0], w / 2.0, e.ttst[0]));
    });
  };
  add("COR-TH6-n1", "w_A^2(T) <= inf ||(a/2 + b) T^#T + (a/2) TT^#||_A / (a+b)", LE, kGeneral,
      [th6_n1_mid](Eval& e) { return leq(pow_val(numrad_t1(e), 2), th6_n1_mid(e)); });
  add("REFINE-ORDER-TH6-n1", "n = 1 inf-form <= ||T^#T + TT^#||_A / 2", LE, kGeneral,
      [th6_n1_mid](Eval& e) { return leq(th6_n1_mid(e), 0.5 * norm_sum_t1(e)); });

  auto omega_t2 = [](Eval& e) { return e.euclid("T^2", e.t_squared); };
  add("TH7", "||T||^2_{A_{a,b}} <= sqrt(n) (w_A((a/4 + b) T^#T + (a/4) TT^#) + (a/2) w_A(T^2))",
      LE, kGeneral, [omega_t2](Eval& e) {
        const SeminormParams p = e.in.params;
        const Val rhs = sqrt_n(e) * ((p.alpha + p.beta) * mix7(e, weight_of(p)) +
                                     (p.alpha / 2.0) * omega_t2(e));
        return leq(pow_val(e.ab_t(p), 2), rhs);
      });
  auto ccc_mid = [omega_t2](Eval& e) {
    return grid_min(e, [&](double w) {
      return sqrt_n(e) * (mix7(e, w) + (w / 2.0) * omega_t2(e));
    });
  };
  add("COR-CCC", "w_A^2(T) <= inf sqrt(n)/(a+b) {w_A((a/4 + b) T^#T + (a/4) TT^#) + (a/2) w_A(T^2)}",
      LE, kGeneral, [ccc_mid](Eval& e) { return leq(pow_val(e.euclid("T", e.in.t), 2), ccc_mid(e)); });
  add("REFINE-ORDER-CCC", "inf-form <= sqrt(n) (w_A(T^#T + TT^#) / 4 + w_A(T^2) / 2)", LE,
      kGeneral, [ccc_mid, omega_t2](Eval& e) {
        const Val rhs = sqrt_n(e) * (0.25 * e.euclid("TsT+TTs", tuple_lin(1.0, e.tst, 1.0, e.ttst)) +
                                     0.5 * omega_t2(e));
        return leq(ccc_mid(e), rhs);
      });
  add("COR-CCC-nilp", "A T_k^2 = 0  =>  w_A^2(T) <= sqrt(n)/4 w_A(T^#T + TT^#)", LE,
      {Ensemble::nilpotentA2}, [](Eval& e) {
        if (!all_a_square_zero(e)) return skip("A T^2 != 0");
        const Val rhs = (sqrt_n(e) / 4.0) * e.euclid("TsT+TTs", tuple_lin(1.0, e.tst, 1.0, e.ttst));
        return leq(pow_val(e.euclid("T", e.in.t), 2), rhs);
      });
  auto cx_mid = [](Eval& e) {
    return grid_min(e, [&](double w) {
      const CMatrix x = lin(w / 4.0 + 1.0 - w, e.tst[0], w / 4.0, e.ttst[0]);
      return e.norm("cx|" + num_key(w), x) + (w / 2.0) * numrad_t1_sq(e);
    });
  };
  add("COR-CX", "w_A^2(T) <= inf {||(a/4 + b) T^#T + (a/4) TT^#||_A + (a/2) w_A(T^2)} / (a+b)",
      LE, kGeneral, [cx_mid](Eval& e) { return leq(pow_val(numrad_t1(e), 2), cx_mid(e)); });
  add("REFINE-ORDER-CX", "n = 1 inf-form <= ||T^#T + TT^#||_A / 4 + w_A(T^2) / 2", LE, kGeneral,
      [cx_mid](Eval& e) {
        return leq(cx_mid(e), 0.25 * norm_sum_t1(e) + 0.5 * numrad_t1_sq(e));
      });

  // Products S^# T.
  add("TH-TTTT",
      "||S^#T||^2_{A_{a,b}} <= (a/2) ||sum (T^#T)^2 + (S^#S)^2||_A + b sum ||S_k^# T_k||_A^2", LE,
      kGeneral, [](Eval& e) {
        const SeminormParams p = e.in.params;
        const Val rhs = (p.alpha / 2.0) * e.norm("squares", squares_sum(e, e.n())) +
                        p.beta * sum_sq_norms_sadjt(e);
        return leq(pow_val(e.ab("SadjT", e.s_adj_t, p), 2), rhs);
      });
  auto cw_mid = [](Eval& e) {
    return grid_min(e, [&](double w) {
      return (w / 2.0) * e.norm("squares", squares_sum(e, e.n())) +
             (1.0 - w) * sum_sq_norms_sadjt(e);
    });
  };
  add("COR-CW", "w_A^2(S^#T) <= inf {(a/2) ||sum (T^#T)^2 + (S^#S)^2||_A + b sum ||S^#T||^2} / (a+b)",
      LE, kGeneral, [cw_mid](Eval& e) {
        return leq(pow_val(e.euclid("SadjT", e.s_adj_t), 2), cw_mid(e));
      });
  add("REFINE-ORDER-CW", "inf-form <= ||sum (T^#T)^2 + (S^#S)^2||_A / 2", LE, kGeneral,
      [cw_mid](Eval& e) {
        return leq(cw_mid(e), 0.5 * e.norm("squares", squares_sum(e, e.n())));
      });
  add("COR-TTTT-n1",
      "||S^#T||^2_{A_{a,b}} <= (a/2) ||(T^#T)^2 + (S^#S)^2||_A + b ||S^#T||_A^2, n = 1", LE,
      kGeneral, [](Eval& e) {
        const SeminormParams p = e.in.params;
        const Val rhs = (p.alpha / 2.0) * e.norm("squares1", squares_sum(e, 1)) +
                        p.beta * pow_val(e.norm("SadjT0", e.s_adj_t[0]), 2);
        return leq(pow_val(e.ab("SadjT1", single(e.s_adj_t[0]), p), 2), rhs);
      });
  auto cw_n1_mid = [](Eval& e) {
    return grid_min(e, [&](double w) {
      return (w / 2.0) * e.norm("squares1", squares_sum(e, 1)) +
             (1.0 - w) * pow_val(e.norm("SadjT0", e.s_adj_t[0]), 2);
    });
  };
  add("COR-CW-n1", "w_A^2(S^#T) <= inf {(a/2) ||(T^#T)^2 + (S^#S)^2||_A + b ||S^#T||_A^2} / (a+b)",
      LE, kGeneral, [cw_n1_mid](Eval& e) {
        return leq(pow_val(e.numrad("SadjT1", e.s_adj_t[0]), 2), cw_n1_mid(e));
      });
  add("REFINE-ORDER-CW-n1", "n = 1 inf-form <= ||(T^#T)^2 + (S^#S)^2||_A / 2", LE, kGeneral,
      [cw_n1_mid](Eval& e) {
        return leq(cw_n1_mid(e), 0.5 * e.norm("squares1", squares_sum(e, 1)));
      });
  return r;
}

const std::vector<CheckDef>& defs() {
  static const std::vector<CheckDef> registry = build_registry();
  return registry;
}

std::vector<CheckInfo> build_infos() {
  std::vector<CheckInfo> out;
  for (const auto& d : defs()) out.push_back(d.info);
  return out;
}

const CheckDef& def_of(std::string_view id) {
  for (const auto& d : defs()) {
    if (d.info.id == id) return d;
  }
  throw Error(ErrorKind::UnknownCheck, "unknown check id '" + std::string(id) + "'");
}

double slack_of(const Outcome& o, Relation rel, double scale) {
  const double l = std::abs(o.lhs.v);
  const double r = std::abs(o.rhs.v);
  if (rel == Relation::leq || o.eq_absolute) {
    const double tol = rel == Relation::leq ? kLeqTol : o.eq_tol;
    return scale * tol * (1.0 + l + r);
  }
  return scale * (o.eq_tol * std::max(l, r) + kEqFloor);
}

// A vanishing right side gives 1 inside the slack and a huge finite value outside.
double ratio_of(double lhs, double rhs, double slack) {
  if (rhs == 0.0) return std::abs(lhs) <= slack ? 1.0 : std::numeric_limits<double>::max();
  return lhs / rhs;
}

CheckResult to_result(const CheckDef& def, const Outcome& o, const Instance& in,
                      const std::string& digest, double scale) {
  CheckResult r;
  r.check_id = def.info.id;
  r.instance_digest = digest;
  r.seed = in.seed;
  r.ensemble = in.ensemble;
  r.dim = in.space.dim();
  r.n = in.t.size();
  r.params = in.params;
  r.note = o.note;
  if (o.skipped) {
    r.verdict = Verdict::skipped;
    return r;
  }
  r.lhs = o.lhs.v;
  r.rhs = o.rhs.v;
  r.lhs_direction = o.lhs.b;
  r.rhs_direction = o.rhs.b;
  r.slack_used = slack_of(o, def.info.relation, scale);
  r.ratio = ratio_of(r.lhs, r.rhs, r.slack_used);
  const bool ok = def.info.relation == Relation::leq ? r.lhs <= r.rhs + r.slack_used
                                                     : std::abs(r.lhs - r.rhs) <= r.slack_used;
  if (!std::isfinite(r.lhs) || !std::isfinite(r.rhs)) {
    r.verdict = Verdict::violation_candidate;
    r.note = "non-finite side";
  } else {
    r.verdict = ok ? Verdict::pass : Verdict::violation_candidate;
  }
  return r;
}

Outcome evaluate(const CheckDef& def, Eval& e) {
  try {
    return def.fn(e);
  } catch (const Error& err) {
    return skip(std::string("error: ") + err.what());
  }
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const std::size_t idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::min(sorted.size() - 1, idx == 0 ? 0 : idx - 1)];
}

double slack_consumed(const CheckResult& r, Relation rel) {
  if (r.verdict == Verdict::skipped || r.slack_used <= 0.0) return 0.0;
  const double gap = rel == Relation::leq ? std::max(0.0, r.lhs - r.rhs) : std::abs(r.lhs - r.rhs);
  return gap / r.slack_used;
}

void dims_for(Rng& rng, std::size_t dmin, std::size_t dmax, std::size_t nmin, std::size_t nmax,
              std::size_t& dim, std::size_t& n) {
  dim = pick(rng, dmin, dmax);
  n = pick(rng, nmin, nmax);
}

void validate_ranges(std::size_t dmin, std::size_t dmax, std::size_t nmin, std::size_t nmax) {
  if (dmin < 2 || dmin > dmax || dmax > 64) {
    throw Error(ErrorKind::InvalidParams, "dimensions must satisfy 2 <= dim_min <= dim_max <= 64");
  }
  if (nmin < 1 || nmin > nmax || nmax > 4) {
    throw Error(ErrorKind::InvalidParams, "tuple sizes must satisfy 1 <= n_min <= n_max <= 4");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(Ensemble e) {
  switch (e) {
    case Ensemble::generic: return "generic";
    case Ensemble::invertibleA: return "invertibleA";
    case Ensemble::singularA: return "singularA";
    case Ensemble::commuting: return "commuting";
    case Ensemble::a_normal_commuting: return "a_normal_commuting";
    case Ensemble::a_isometry: return "a_isometry";
    case Ensemble::a_unitary: return "a_unitary";
    case Ensemble::nilpotentA2: return "nilpotentA2";
    case Ensemble::random_params: return "random_params";
  }
  return "unknown";
}

std::optional<Ensemble> parse_ensemble(std::string_view name) {
  for (Ensemble e : kAllEnsembles) {
    if (name == to_string(e)) return e;
  }
  return std::nullopt;
}

std::span<const Ensemble> all_ensembles() { return kAllEnsembles; }

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::violation_candidate: return "violation_candidate";
    case Verdict::skipped: return "skipped";
  }
  return "unknown";
}

std::string Instance::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  hash_matrix(h, space.weight());
  for (const auto& op : t) hash_matrix(h, op);
  for (const auto& op : s) hash_matrix(h, op);
  hash_matrix(h, u);
  const double p[2] = {params.alpha, params.beta};
  hash_bytes(h, p, sizeof p);
  const int tag = static_cast<int>(ensemble);
  hash_bytes(h, &tag, sizeof tag);
  return hex16(h);
}

Instance gen_instance(Ensemble ensemble, std::size_t dim, std::size_t n, std::uint64_t seed,
                      double rank_tol) {
  if (static_cast<int>(ensemble) < 0 || static_cast<std::size_t>(ensemble) >= kAllEnsembles.size()) {
    throw Error(ErrorKind::UnsupportedEnsemble, "unknown ensemble tag");
  }
  if (dim < 2 || dim > 64) throw Error(ErrorKind::InvalidParams, "gen_instance: dim must be in [2, 64]");
  if (n < 1 || n > 4) throw Error(ErrorKind::InvalidParams, "gen_instance: n must be in [1, 4]");
  if (ensemble == Ensemble::a_unitary) n = 1;
  for (std::size_t attempt = 0; attempt < kGenAttempts; ++attempt) {
    Rng rng(sub_seed(seed, attempt));
    Instance in = generate_once(ensemble, dim, n, rng, rank_tol);
    in.seed = seed;
    if (hypothesis_holds(in)) return in;
  }
  throw Error(ErrorKind::InvalidParams,
              std::string("could not generate an instance satisfying the ") + to_string(ensemble) +
                  " hypothesis");
}

Instance make_instance(const CMatrix& a, std::vector<CMatrix> t, std::vector<CMatrix> s, CMatrix u,
                       SeminormParams params, Ensemble ensemble, std::uint64_t seed,
                       double rank_tol) {
  Instance in;
  in.space = build_space(a, rank_tol);
  if (t.empty()) throw Error(ErrorKind::DimensionMismatch, "instance needs at least one T_k");
  if (s.empty()) s = t;
  if (s.size() != t.size()) throw Error(ErrorKind::DimensionMismatch, "T and S sizes differ");
  if (u.empty()) u = CMatrix::identity(a.rows());
  in.t = OpTuple(std::move(t));
  in.s = OpTuple(std::move(s));
  in.u = std::move(u);
  in.params = params;
  in.ensemble = ensemble;
  in.seed = seed;
  return in;
}

std::span<const CheckInfo> registry() {
  static const std::vector<CheckInfo> infos = build_infos();
  return infos;
}

const CheckInfo* find_check(std::string_view id) {
  for (const auto& info : registry()) {
    if (info.id == id) return &info;
  }
  return nullptr;
}

std::vector<SeminormParams> HarnessConfig::default_inf_grid() {
  static constexpr std::array<double, 6> kVals = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<SeminormParams> grid;
  for (double a : kVals) {
    for (double b : kVals) {
      if (a != 0.0 || b != 0.0) grid.push_back({a, b});
    }
  }
  return grid;
}

std::vector<CheckResult> run_checks(std::span<const std::string> ids, const Instance& inst,
                                    const HarnessConfig& cfg) {
  std::vector<const CheckDef*> list;
  for (const auto& id : ids) list.push_back(&def_of(id));
  const std::string digest = inst.digest();

  Eval base(inst, cfg, false, {});
  std::vector<CheckResult> results;
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < list.size(); ++i) {
    results.push_back(to_result(*list[i], evaluate(*list[i], base), inst, digest, cfg.slack_scale));
    if (results.back().verdict == Verdict::violation_candidate) pending.push_back(i);
  }
  if (pending.empty()) return results;

  // Escalation: larger budget, brute-force starts, and every certificate found so
  // far (with its images under the reduced U and U*) as cross seeds.
  std::vector<CVector> seeds = base.certificates();
  if (!inst.space.zero_weight() && inst.u.rows() == inst.space.dim()) {
    const CMatrix ru = reduce_op(inst.space, inst.u);
    const CMatrix ru_adj = ru.adjoint();
    const std::size_t count = seeds.size();
    for (std::size_t i = 0; i < count; ++i) {
      seeds.push_back(ru * std::span<const Complex>(seeds[i]));
      seeds.push_back(ru_adj * std::span<const Complex>(seeds[i]));
    }
  }
  Eval esc(inst, cfg, true, std::move(seeds));
  for (std::size_t i : pending) {
    CheckResult r = to_result(*list[i], evaluate(*list[i], esc), inst, digest, cfg.slack_scale);
    r.escalated = true;
    results[i] = std::move(r);
  }
  return results;
}

CheckResult run_check(std::string_view id, const Instance& inst, const HarnessConfig& cfg) {
  const std::string ids[1] = {std::string(id)};
  return run_checks(ids, inst, cfg).front();
}

std::uint64_t instance_seed(std::uint64_t seed, Ensemble e, std::size_t index) {
  return sub_seed(sub_seed(seed, 0xe0 + static_cast<std::uint64_t>(e)), index);
}

Report run_suite(const SuiteConfig& cfg) {
  validate_ranges(cfg.dim_min, cfg.dim_max, cfg.n_min, cfg.n_max);
  if (cfg.samples < 1) throw Error(ErrorKind::InvalidParams, "samples must be >= 1");
  std::vector<std::string> ids = cfg.checks;
  if (ids.empty()) {
    for (const auto& info : registry()) ids.push_back(info.id);
  }
  for (const auto& id : ids) def_of(id);
  const std::vector<Ensemble> ensembles =
      cfg.ensembles.empty() ? std::vector<Ensemble>(kAllEnsembles.begin(), kAllEnsembles.end())
                            : cfg.ensembles;

  Report report;
  report.config = cfg;
  std::map<std::string, std::vector<double>> ratios;
  std::map<std::string, CheckSummary> summaries;
  for (const auto& id : ids) summaries[id].check_id = id;

  for (Ensemble e : ensembles) {
    std::vector<std::string> active;
    for (const auto& id : ids) {
      const auto& list = find_check(id)->ensembles;
      if (std::find(list.begin(), list.end(), e) != list.end()) active.push_back(id);
    }
    if (active.empty()) continue;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      const std::uint64_t seed = instance_seed(cfg.seed, e, i);
      Rng rng(sub_seed(seed, 0xd1));
      std::size_t dim = 0;
      std::size_t n = 0;
      dims_for(rng, cfg.dim_min, cfg.dim_max, cfg.n_min, cfg.n_max, dim, n);
      const Instance inst = gen_instance(e, dim, n, seed, cfg.rank_tol);
      ++report.instances;
      for (CheckResult& r : run_checks(active, inst, cfg.harness)) {
        CheckSummary& sum = summaries[r.check_id];
        const Relation rel = find_check(r.check_id)->relation;
        ++sum.samples;
        if (r.escalated) ++sum.escalations;
        switch (r.verdict) {
          case Verdict::pass: ++sum.passes; break;
          case Verdict::violation_candidate: ++sum.candidates; break;
          case Verdict::skipped: ++sum.skipped; break;
        }
        if (r.verdict != Verdict::skipped) {
          ratios[r.check_id].push_back(r.ratio);
          sum.max_slack_consumed = std::max(sum.max_slack_consumed, slack_consumed(r, rel));
          if (!sum.tightest || r.ratio > sum.tightest->ratio) sum.tightest = r;
        }
        if (r.verdict == Verdict::violation_candidate) report.candidates.push_back(r);
        if (cfg.keep_all_results) report.results.push_back(std::move(r));
      }
    }
  }
  for (const auto& id : ids) {
    CheckSummary sum = summaries[id];
    std::vector<double> v = ratios[id];
    std::sort(v.begin(), v.end());
    if (!v.empty()) {
      sum.ratio_quantiles = {v.front(), quantile(v, 0.5), quantile(v, 0.9), quantile(v, 0.99),
                             v.back()};
    }
    report.checks.push_back(std::move(sum));
  }
  return report;
}

SearchResult tightness_search(std::string_view check_id, const SearchConfig& cfg) {
  const CheckDef& def = def_of(check_id);
  validate_ranges(cfg.dim_min, cfg.dim_max, cfg.n_min, cfg.n_max);
  const std::vector<Ensemble> ensembles = cfg.ensembles.empty() ? def.info.ensembles : cfg.ensembles;
  if (ensembles.empty()) throw Error(ErrorKind::InvalidParams, "no ensembles to search");

  SearchResult best;
  bool have = false;
  Rng rng(sub_seed(cfg.seed, 0x5ea7c4));
  auto consider = [&](Instance inst) {
    if (cfg.params) inst.params = *cfg.params;
    CheckResult r = run_check(def.info.id, inst, cfg.harness);
    ++best.evaluated;
    if (r.verdict != Verdict::pass) return false;
    if (have && !(r.ratio > best.result.ratio)) return false;
    best.instance = std::move(inst);
    best.result = std::move(r);
    have = true;
    return true;
  };

  const std::size_t trials = std::max<std::size_t>(cfg.random_trials, 1);
  for (std::size_t t = 0; t < trials; ++t) {
    const Ensemble e = ensembles[t % ensembles.size()];
    std::size_t dim = 0;
    std::size_t n = 0;
    dims_for(rng, cfg.dim_min, cfg.dim_max, cfg.n_min, cfg.n_max, dim, n);
    consider(gen_instance(e, dim, n, mix(rng())));
  }
  if (!have) {
    throw Error(ErrorKind::InvalidParams,
                "no instance passed the hypotheses of " + def.info.id + " during the search");
  }

  // Hill climbing: perturb T and S by A-bounded noise, keep improvements.
  double step = 0.1;
  for (std::size_t k = 0; k < cfg.climb_steps; ++k) {
    Instance cand = best.instance;
    const SpaceA& sp = cand.space;
    std::vector<CMatrix> t, s;
    for (const auto& op : cand.t) t.push_back(op + Complex{step, 0.0} * a_bounded_random(sp, rng));
    for (const auto& op : cand.s) s.push_back(op + Complex{step, 0.0} * a_bounded_random(sp, rng));
    cand.t = OpTuple(std::move(t));
    cand.s = OpTuple(std::move(s));
    cand.seed = mix(rng());
    if (consider(std::move(cand))) {
      step = std::min(step * 1.5, 1.0);
    } else {
      step = std::max(step * 0.5, 1e-4);
    }
  }
  return best;
}

}  // namespace aradius
