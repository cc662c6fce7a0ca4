#include "aradius/space.hpp"

#include <cmath>
#include <string>

#include "aradius/error.hpp"

namespace aradius {
namespace {

void require_dim(const SpaceA& space, const CMatrix& t, const char* context) {
  if (t.rows() != space.dim() || t.cols() != space.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(context) + ": operator is " + std::to_string(t.rows()) + "x" +
                    std::to_string(t.cols()) + ", space has dim " + std::to_string(space.dim()));
  }
}

void require_dim(const SpaceA& space, std::span<const Complex> x, const char* context) {
  if (x.size() != space.dim()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(context) + ": vector length " +
                                                  std::to_string(x.size()) + " != dim " +
                                                  std::to_string(space.dim()));
  }
}

}  // namespace

SpaceA build_space(const CMatrix& a, double rank_tol) {
  require_square(a, "build_space");
  PsdCalculus calc = psd_calculus(a, rank_tol);
  SpaceA s;
  s.dim_ = a.rows();
  s.rank_ = calc.rank;
  s.rank_tol_ = rank_tol;
  s.a_ = a;
  s.weight_norm_ = s.dim_ == 0 ? 0.0 : std::max(calc.eig.values.back(), 0.0);
  s.sqrt_a_ = std::move(calc.sqrt);
  s.sqrt_a_pinv_ = std::move(calc.sqrt_pinv);
  s.pinv_a_ = std::move(calc.pinv);
  s.proj_ = std::move(calc.projector);
  s.eig_ = std::move(calc.eig);

  // Retained eigenpairs are the top `rank` entries of the ascending spectrum.
  s.range_basis_ = CMatrix(s.dim_, s.rank_);
  s.range_sqrt_.resize(s.rank_);
  for (std::size_t k = 0; k < s.rank_; ++k) {
    const std::size_t src = s.dim_ - s.rank_ + k;
    s.range_sqrt_[k] = std::sqrt(s.eig_.values[src]);
    for (std::size_t i = 0; i < s.dim_; ++i) s.range_basis_(i, k) = s.eig_.vectors(i, src);
  }
  return s;
}

CMatrix SpaceA::compress(const CMatrix& t) const {
  require_dim(*this, t, "compress");
  const CMatrix inner = range_basis_.adjoint() * t * range_basis_;
  CMatrix out(rank_, rank_);
  for (std::size_t i = 0; i < rank_; ++i) {
    for (std::size_t j = 0; j < rank_; ++j) {
      out(i, j) = range_sqrt_[i] * inner(i, j) / range_sqrt_[j];
    }
  }
  return out;
}

CVector SpaceA::embed(std::span<const Complex> z) const {
  if (z.size() != rank_) throw Error(ErrorKind::DimensionMismatch, "embed: length != rank");
  return range_basis_ * z;
}

CVector SpaceA::pull_back(std::span<const Complex> y) const {
  require_dim(*this, y, "pull_back");
  return sqrt_a_pinv_ * y;
}

OpTuple::OpTuple(std::vector<CMatrix> ops) : ops_(std::move(ops)) {
  for (const auto& op : ops_) {
    require_square(op, "OpTuple");
    if (op.rows() != ops_.front().rows()) {
      throw Error(ErrorKind::DimensionMismatch, "OpTuple: members differ in dimension");
    }
  }
}

Complex a_inner(const SpaceA& space, std::span<const Complex> x, std::span<const Complex> y) {
  require_dim(space, x, "a_inner");
  require_dim(space, y, "a_inner");
  return dot(y, space.weight() * x);
}

double a_norm(const SpaceA& space, std::span<const Complex> x) {
  return std::sqrt(std::max(a_inner(space, x, x).real(), 0.0));
}

CMatrix reduce_op(const SpaceA& space, const CMatrix& t) {
  require_dim(space, t, "reduce_op");
  return space.sqrt_a() * t * space.sqrt_a_pinv();
}

CMatrix a_adjoint(const SpaceA& space, const CMatrix& t) {
  require_dim(space, t, "a_adjoint");
  return space.pinv_a() * t.adjoint() * space.weight();
}

bool is_a_bounded(const SpaceA& space, const CMatrix& t, double tol) {
  require_dim(space, t, "is_a_bounded");
  const CMatrix null_proj = CMatrix::identity(space.dim()) - space.proj();
  const double scale = tol * space.weight().frobenius_norm() * t.frobenius_norm();
  return (space.weight() * t * null_proj).frobenius_norm() <= scale;
}

OpFlags classify(const SpaceA& space, const CMatrix& t, double tol) {
  require_dim(space, t, "classify");
  const std::size_t n = space.dim();
  const CMatrix& a = space.weight();
  const CMatrix null_proj = CMatrix::identity(n) - space.proj();
  const double scale = tol * a.frobenius_norm() * t.frobenius_norm();

  OpFlags f;
  f.a_bounded = (a * t * null_proj).frobenius_norm() <= scale;
  f.in_B_A = (null_proj * t.adjoint() * a).frobenius_norm() <= scale;
  const CMatrix at = a * t;
  f.a_selfadjoint = distance(at, t.adjoint() * a) <= scale;
  if (f.a_selfadjoint) {
    const auto eigs = hermitian_eigvals(at.hermitian_part());
    f.a_positive = n == 0 || eigs.front() >= -scale;
  }
  const double iso_tol = tol * (1.0 + space.proj().frobenius_norm());
  const CMatrix adj = a_adjoint(space, t);
  f.a_isometry = distance(adj * t, space.proj()) <= iso_tol;
  if (f.a_isometry) {
    const CMatrix adj2 = a_adjoint(space, adj);
    f.a_unitary = distance(adj2 * adj, space.proj()) <= iso_tol;
  }
  return f;
}

TuplePredicates tuple_predicates(const SpaceA& space, const OpTuple& t, double tol) {
  for (const auto& op : t) require_dim(space, op, "tuple_predicates");
  const CMatrix& a = space.weight();
  const double a_norm_f = a.frobenius_norm();
  TuplePredicates p;
  p.commuting = true;
  bool a_commuting = true;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      const CMatrix comm = t[i] * t[j] - t[j] * t[i];
      const double scale = tol * t[i].frobenius_norm() * t[j].frobenius_norm();
      if (comm.frobenius_norm() > scale) p.commuting = false;
      if ((a * comm).frobenius_norm() > scale * a_norm_f) a_commuting = false;
    }
  }
  bool self_normal = true;
  for (const auto& op : t) {
    const CMatrix adj = a_adjoint(space, op);
    const double scale = tol * adj.frobenius_norm() * op.frobenius_norm();
    if (distance(adj * op, op * adj) > scale) self_normal = false;
  }
  p.a_normal = a_commuting && self_normal;
  return p;
}

std::pair<CMatrix, CMatrix> cartesian_a(const SpaceA& space, const CMatrix& t) {
  const CMatrix adj = a_adjoint(space, t);
  CMatrix re = Complex{0.5, 0.0} * (t + adj);
  CMatrix im = Complex{0.0, -0.5} * (t - adj);
  return {std::move(re), std::move(im)};
}

OpTuple tuple_product(const OpTuple& t, const OpTuple& s) {
  if (t.size() != s.size()) throw Error(ErrorKind::DimensionMismatch, "tuple_product: sizes");
  std::vector<CMatrix> out;
  out.reserve(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) out.push_back(t[k] * s[k]);
  return OpTuple(std::move(out));
}

OpTuple tuple_sum(const OpTuple& t, const OpTuple& s) {
  if (t.size() != s.size()) throw Error(ErrorKind::DimensionMismatch, "tuple_sum: sizes");
  std::vector<CMatrix> out;
  out.reserve(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) out.push_back(t[k] + s[k]);
  return OpTuple(std::move(out));
}

OpTuple tuple_scaled(const OpTuple& t, Complex lambda) {
  std::vector<CMatrix> out;
  out.reserve(t.size());
  for (const auto& op : t) out.push_back(lambda * op);
  return OpTuple(std::move(out));
}

OpTuple tuple_a_adjoint(const SpaceA& space, const OpTuple& t) {
  std::vector<CMatrix> out;
  out.reserve(t.size());
  for (const auto& op : t) out.push_back(a_adjoint(space, op));
  return OpTuple(std::move(out));
}

}  // namespace aradius
