#include "doctest.h"

#include "aradius/error.hpp"
#include "aradius/radii.hpp"
#include "support.hpp"

using namespace aradius;
using namespace std::complex_literals;

namespace {

CMatrix diag(std::vector<double> d) { return CMatrix::diagonal(std::span<const double>(d)); }

// Rank-2 weight A = B*B, B = [[1, 0.5i, -0.25], [0, 2, 1+i]], and two operators
// mapping null(A) into itself. Reference values were computed independently
// (dense theta grid and multistart BFGS in double precision) and frozen.
struct Fixture {
  CMatrix a;
  CMatrix t1;
  CMatrix t2;
  Fixture() {
    const CMatrix b{{1.0, 0.5i, -0.25}, {0.0, 2.0, 1.0 + 1i}};
    a = (b.adjoint() * b).hermitian_part();
    t1 = CMatrix{{{1.1839999999999997, 0.18399999999999977}, {6.9388939039072284e-17, 1.1840000000000002},
                  {-0.496000000000001, 0.49600000000000077}},
                 {{0.22400000000000009, 0.3199999999999994}, {0.35200000000000004, 0.071999999999999814},
                  {-0.28000000000000042, -0.14400000000000077}},
                 {{0.17600000000000027, 0.14399999999999891}, {-0.38400000000000001, 0.35999999999999988},
                  {0.46400000000000025, -0.25599999999999939}}};
    t2 = CMatrix{{{-0.10879999999999984, -0.012799999999999961}, {0.83200000000000074, 0.16320000000000046},
                  {0.37119999999999992, 0.68480000000000019}},
                 {{0.88320000000000054, -0.19200000000000034}, {0.72959999999999958, 0.057599999999999985},
                  {-0.11200000000000007, -0.06719999999999958}},
                 {{0.30879999999999996, -0.72480000000000011}, {0.11280000000000007, 0.27199999999999969},
                  {0.37920000000000037, -0.044800000000000048}}};
  }
};

constexpr double kNormT1 = 1.4887073644329414;
constexpr double kNormT2 = 3.06382814170178;
constexpr double kNumradT1 = 1.301506651941387;
constexpr double kNumradT2 = 1.9545127225610393;
constexpr double kJointNorm = 3.3954456510406295;
constexpr double kMinModulus = 0.6961537767112023;
constexpr double kEuclid = 2.2412861980169145;
constexpr double kAb_05_2 = 4.894427572966011;
constexpr double kAb_1_1 = 3.7616359867097375;
constexpr double kCrawford = 0.22333941506743774;

}  // namespace

TEST_CASE("frozen values on a singular weight") {
  const Fixture f;
  const SpaceA sp = build_space(f.a);
  REQUIRE(sp.rank() == 2);
  const OpTuple t({f.t1, f.t2});
  CHECK(testing::rel_err(a_op_seminorm(sp, f.t1).value, kNormT1) <= 1e-10);
  CHECK(testing::rel_err(a_op_seminorm(sp, f.t2).value, kNormT2) <= 1e-10);
  CHECK(testing::rel_err(a_numrad(sp, f.t1).value, kNumradT1) <= 1e-9);
  CHECK(testing::rel_err(a_numrad(sp, f.t2).value, kNumradT2) <= 1e-9);
  CHECK(testing::rel_err(joint_op_norm(sp, t).value, kJointNorm) <= 1e-10);
  CHECK(testing::rel_err(joint_min_modulus(sp, t).value, kMinModulus) <= 1e-10);
  CHECK(testing::rel_err(euclid_radius(sp, t).value, kEuclid) <= 1e-8);
  CHECK(testing::rel_err(alpha_beta_seminorm(sp, t, {0.5, 2.0}).value, kAb_05_2) <= 1e-8);
  CHECK(testing::rel_err(alpha_beta_seminorm(sp, t, {1.0, 1.0}).value, kAb_1_1) <= 1e-8);
  CHECK(testing::rel_err(joint_crawford(sp, t).value, kCrawford) <= 1e-7);
}

TEST_CASE("estimate directions and certificates") {
  const Fixture f;
  const SpaceA sp = build_space(f.a);
  const OpTuple t({f.t1, f.t2});
  CHECK(a_op_seminorm(sp, f.t1).bound == Bound::exact);
  CHECK(joint_op_norm(sp, t).bound == Bound::exact);
  CHECK(joint_min_modulus(sp, t).bound == Bound::exact);
  CHECK(a_numrad(sp, f.t1).bound == Bound::lower_bound);
  CHECK(euclid_radius(sp, t).bound == Bound::lower_bound);
  CHECK(alpha_beta_seminorm(sp, t, {0.5, 2.0}).bound == Bound::lower_bound);
  CHECK(joint_crawford(sp, t).bound == Bound::upper_bound);

  // The certificate y is a unit vector in range(A); x = pull_back(y) is A-unit and
  // reproduces the value.
  const SupEstimate e = alpha_beta_seminorm(sp, t, {0.5, 2.0});
  CHECK(norm(e.certificate) == doctest::Approx(1.0).epsilon(1e-12));
  const CVector x = sp.pull_back(e.certificate);
  CHECK(a_norm(sp, x) == doctest::Approx(1.0).epsilon(1e-10));
  double f2 = 0.0;
  for (const auto& op : t) {
    const CVector tx = op * std::span<const Complex>(x);
    f2 += 0.5 * std::norm(a_inner(sp, tx, x)) + 2.0 * std::pow(a_norm(sp, tx), 2);
  }
  CHECK(std::abs(std::sqrt(f2) - e.value) <= 1e-9 * e.value + e.residual);
}

TEST_CASE("single operator closed forms") {
  const SpaceA id = build_space(CMatrix::identity(2));
  const CMatrix n{{0.0, 1.0}, {0.0, 0.0}};
  CHECK(a_numrad(id, n).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a_op_seminorm(id, n).value == doctest::Approx(1.0).epsilon(1e-14));
  std::mt19937_64 rng(3);
  const SpaceA sp = build_space(testing::random_psd(4, 2, rng));
  CHECK(a_op_seminorm(sp, CMatrix::identity(4)).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a_numrad(sp, CMatrix::identity(4)).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a_op_seminorm against sampled A-unit vectors") {
  std::mt19937_64 rng(14);
  for (std::size_t rank : {2u, 3u}) {
    const CMatrix a = testing::random_psd(3, rank, rng);
    const SpaceA sp = build_space(a);
    const testing::EigenWeight w = testing::eigen_weight(a);
    const testing::EMat tt = w.proj * testing::to_eigen(testing::gaussian(3, 3, rng)) * w.proj;
    const CMatrix t = testing::from_eigen(tt);
    const double v = a_op_seminorm(sp, t).value;
    double sampled = 0.0;
    for (int k = 0; k < 100000; ++k) {
      const CVector x = testing::random_unit(3, rng);
      const double nx = a_norm(sp, x);
      if (nx < 1e-8) continue;
      sampled = std::max(sampled, a_norm(sp, t * std::span<const Complex>(x)) / nx);
    }
    CHECK(sampled <= v + 1e-6);
    CHECK(sampled >= 0.95 * v);
  }
}

TEST_CASE("tuple closed forms") {
  std::mt19937_64 rng(19);
  const SpaceA sp = build_space(testing::random_psd(3, 2, rng));
  const CMatrix i3 = CMatrix::identity(3);
  CHECK(joint_op_norm(sp, OpTuple({i3, i3})).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(euclid_radius(sp, OpTuple({i3, i3, i3})).value == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
  CHECK(joint_crawford(sp, OpTuple({i3})).value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(joint_min_modulus(sp, OpTuple({i3})).value == doctest::Approx(1.0).epsilon(1e-12));

  const SpaceA id = build_space(CMatrix::identity(2));
  CHECK(joint_crawford(id, OpTuple({diag({1, -1})})).value <= 1e-8);
  CHECK(joint_min_modulus(id, OpTuple({diag({1, 0})})).value <= 1e-12);
  CHECK(joint_min_modulus(id, OpTuple({diag({1, 0})})).value >= 0.0);

  const Fixture f;
  const SpaceA fs = build_space(f.a);
  CHECK(testing::rel_err(joint_op_norm(fs, OpTuple({f.t1})).value, a_op_seminorm(fs, f.t1).value) <= 1e-12);
  CHECK(testing::rel_err(euclid_radius(fs, OpTuple({f.t2})).value, a_numrad(fs, f.t2).value) <= 1e-8);
}

TEST_CASE("orderings between inf and sup quantities") {
  std::mt19937_64 rng(27);
  for (int rep = 0; rep < 6; ++rep) {
    const std::size_t d = 2 + rep % 3;
    const SpaceA sp = build_space(testing::random_psd(d, d, rng));
    const OpTuple t({testing::gaussian(d, d, rng), testing::gaussian(d, d, rng)});
    const double er = euclid_radius(sp, t).value;
    CHECK(joint_crawford(sp, t).value <= er + 1e-9);
    CHECK(joint_min_modulus(sp, t).value <= joint_op_norm(sp, t).value + 1e-9);
    CHECK(testing::rel_err(euclid_radius_dual(sp, t).value, er) <= 1e-6);
    CHECK(testing::rel_err(joint_op_norm_by_definition(sp, t).value, joint_op_norm(sp, t).value) <= 1e-6);
  }
}

TEST_CASE("euclid_radius agrees with brute force sampling") {
  // Oracle: best of 2e5 random unit vectors, then fixed-step ascent on
  // f(y) = sum |y* T_k y|^2 from that sample.
  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 3; ++rep) {
    const std::size_t d = 2 + rep;
    const SpaceA sp = build_space(CMatrix::identity(d));
    std::vector<testing::EMat> ops{testing::to_eigen(testing::gaussian(d, d, rng)),
                                   testing::to_eigen(testing::gaussian(d, d, rng))};
    auto f = [&](const testing::EVec& y) {
      double s = 0.0;
      for (const auto& op : ops) s += std::norm(y.dot(op * y));
      return s;
    };
    testing::EVec best;
    double fbest = -1.0;
    for (int k = 0; k < 200000; ++k) {
      const testing::EVec y = testing::to_eigen(testing::random_unit(d, rng));
      const double fy = f(y);
      if (fy > fbest) {
        fbest = fy;
        best = y;
      }
    }
    const double sampled = std::sqrt(fbest);
    testing::EVec y = best;
    for (int it = 0; it < 20000; ++it) {
      testing::EVec g = testing::EVec::Zero(static_cast<Eigen::Index>(d));
      for (const auto& op : ops) {
        const Complex c = y.dot(op * y);
        g += std::conj(c) * (op * y) + c * (op.adjoint() * y);
      }
      y = (y + 0.01 * g).normalized();
    }
    const double polished = std::sqrt(f(y));
    std::vector<CMatrix> mats;
    for (const auto& op : ops) mats.push_back(testing::from_eigen(op));
    const double v = euclid_radius(sp, OpTuple(mats)).value;
    CHECK(v >= sampled - 1e-12);
    CHECK(std::abs(v - polished) <= 1e-5);
  }
}

TEST_CASE("alpha_beta closed form for the Jordan block") {
  // f(t) = alpha t (1 - t) + beta t over t = |x_2|^2 in [0, 1].
  const SpaceA id = build_space(CMatrix::identity(2));
  const OpTuple n({CMatrix{{0.0, 1.0}, {0.0, 0.0}}});
  for (double alpha : {0.0, 0.25, 1.0, 2.0, 4.0}) {
    for (double beta : {0.0, 0.5, 1.0, 3.0}) {
      if (alpha == 0.0 && beta == 0.0) continue;
      const double expect = beta >= alpha ? beta : (alpha + beta) * (alpha + beta) / (4 * alpha);
      const double v = alpha_beta_seminorm(id, n, {alpha, beta}).value;
      CHECK(std::abs(v * v - expect) <= 1e-10 * (1 + expect));
    }
  }
}

TEST_CASE("alpha_beta special cases and scaling") {
  const Fixture f;
  const SpaceA sp = build_space(f.a);
  const OpTuple t({f.t1, f.t2});
  CHECK(testing::rel_err(alpha_beta_seminorm(sp, t, {0.0, 1.0}).value, joint_op_norm(sp, t).value) <= 1e-12);
  CHECK(testing::rel_err(alpha_beta_seminorm(sp, t, {1.0, 0.0}).value, euclid_radius(sp, t).value) <= 1e-12);
  CHECK(testing::rel_err(alpha_beta_seminorm(sp, t, {0.0, 4.0}).value, 2.0 * kJointNorm) <= 1e-10);
  RadiiConfig raw;
  raw.dispatch_special_cases = false;
  CHECK(testing::rel_err(alpha_beta_seminorm(sp, t, {0.0, 1.0}, raw).value, kJointNorm) <= 1e-8);
  CHECK(testing::rel_err(alpha_beta_seminorm(sp, t, {1.0, 0.0}, raw).value, kEuclid) <= 1e-8);
  CHECK(testing::rel_err(alpha_beta_seminorm(sp, t, {2.0, 8.0}).value, 2.0 * kAb_05_2) <= 1e-8);
}

TEST_CASE("constant tuples scale by sqrt(n)") {
  const Fixture f;
  const SpaceA sp = build_space(f.a);
  for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const SeminormParams p{alpha, 1.0 - alpha};
    const double one = alpha_beta_seminorm(sp, OpTuple({f.t1}), p).value;
    for (std::size_t n = 2; n <= 4; ++n) {
      const double many = alpha_beta_seminorm(sp, OpTuple(std::vector<CMatrix>(n, f.t1)), p).value;
      CHECK(testing::rel_err(many, std::sqrt(double(n)) * one) <= 1e-6);
    }
  }
}

TEST_CASE("adjoint symmetry of the numerical radius") {
  const Fixture f;
  const SpaceA sp = build_space(f.a);
  CHECK(std::abs(a_numrad(sp, a_adjoint(sp, f.t1)).value - kNumradT1) <= 1e-7);
}

TEST_CASE("radii errors") {
  const SpaceA d = build_space(diag({1, 0}));
  const CMatrix leak{{0.0, 1.0}, {0.0, 0.0}};
  try {
    a_op_seminorm(d, leak);
    FAIL("expected NotABounded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotABounded);
  }
  CHECK_THROWS_AS(a_numrad(d, leak), Error);
  CHECK_THROWS_AS(euclid_radius(d, OpTuple({leak})), Error);
  const OpTuple ok({CMatrix::identity(2)});
  for (SeminormParams p : {SeminormParams{0.0, 0.0}, SeminormParams{-1.0, 1.0},
                           SeminormParams{1.0, std::nan("")}}) {
    try {
      alpha_beta_seminorm(d, ok, p);
      FAIL("expected InvalidParams");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidParams);
    }
  }
  const SpaceA z = build_space(CMatrix::zeros(2, 2));
  CHECK(alpha_beta_seminorm(z, ok, {1.0, 1.0}).value == 0.0);
  CHECK(euclid_radius(z, ok).value == 0.0);
  try {
    joint_crawford(z, ok);
    FAIL("expected ZeroWeight");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroWeight);
  }
  CHECK_THROWS_AS(joint_min_modulus(z, ok), Error);
  CHECK_THROWS_AS(joint_op_norm(d, OpTuple({CMatrix::identity(3)})), Error);
}
