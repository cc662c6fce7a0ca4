#include "doctest.h"

#include <algorithm>

#include "aradius/error.hpp"
#include "aradius/matrix.hpp"
#include "aradius/spectral.hpp"
#include "support.hpp"

using namespace aradius;
using namespace std::complex_literals;
using testing::to_eigen;

namespace {

CMatrix diag(std::vector<double> d) { return CMatrix::diagonal(std::span<const double>(d)); }

double reconstruction_error(const CMatrix& m, const HermEig& e) {
  const std::vector<double>& w = e.values;
  const CMatrix lam = CMatrix::diagonal(std::span<const double>(w));
  return distance(e.vectors * lam * e.vectors.adjoint(), m);
}

}  // namespace

TEST_CASE("matrix arithmetic matches Eigen") {
  std::mt19937_64 rng(3);
  const CMatrix a = testing::gaussian(4, 3, rng);
  const CMatrix b = testing::gaussian(3, 5, rng);
  const CMatrix c = testing::gaussian(4, 3, rng);
  CHECK(distance(a * b, testing::from_eigen(to_eigen(a) * to_eigen(b))) < 1e-13);
  CHECK(distance(a + c, testing::from_eigen(to_eigen(a) + to_eigen(c))) < 1e-14);
  CHECK(distance(a.adjoint(), testing::from_eigen(to_eigen(a).adjoint())) == 0.0);
  const CMatrix sq = testing::gaussian(3, 3, rng);
  CHECK(distance(power(sq, 3), sq * sq * sq) < 1e-12);
  CHECK(distance(power(sq, 0), CMatrix::identity(3)) == 0.0);
  CHECK(distance(sq.hermitian_part() + 1i * sq.skew_hermitian_part(), sq) < 1e-14);
  CHECK_THROWS_AS(a * c, Error);
  CHECK_THROWS_AS(distance(a, b), Error);
}

TEST_CASE("vector helpers") {
  const CVector x{1.0 + 1i, 2.0};
  const CVector y{1i, -1.0};
  CHECK(dot(x, y) == Complex{(1.0 - 1i) * 1i - 2.0});
  CHECK(norm(x) == doctest::Approx(std::sqrt(6.0)));
  CHECK(norm(normalized(x)) == doctest::Approx(1.0));
  const CMatrix m{{1.0, 2.0}, {0.0, 1i}};
  const CVector mx = m * std::span<const Complex>(x);
  CHECK(mx[0] == Complex{5.0 + 1i});
  CHECK(mx[1] == Complex{2i});
}

TEST_CASE("hermitian_eig on diagonal and swap matrices") {
  const HermEig d = hermitian_eig(diag({3, 1, 2}));
  CHECK(d.values == std::vector<double>{1, 2, 3});
  for (std::size_t j = 0; j < 3; ++j) {
    const CVector v = d.vectors.column(j);
    std::size_t hits = 0;
    for (const auto& z : v) hits += std::abs(std::abs(z) - 1.0) < 1e-14 ? 1 : 0;
    CHECK(hits == 1);
  }
  CHECK(std::abs(d.vectors.column(0)[1]) == doctest::Approx(1.0));

  const HermEig s = hermitian_eig(CMatrix{{0.0, 1.0}, {1.0, 0.0}});
  CHECK(s.values[0] == doctest::Approx(-1.0));
  CHECK(s.values[1] == doctest::Approx(1.0));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(dot(s.vectors.column(0), CVector{r, -r})) == doctest::Approx(1.0));
  CHECK(std::abs(dot(s.vectors.column(1), CVector{r, r})) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig reconstructs random Hermitian matrices") {
  std::mt19937_64 rng(11);
  for (std::size_t d : {1u, 2u, 3u, 6u, 12u, 32u}) {
    const CMatrix h = testing::random_hermitian(d, rng);
    const HermEig e = hermitian_eig(h);
    const double scale = h.frobenius_norm();
    CHECK(reconstruction_error(h, e) <= 1e-9 * scale);
    CHECK(distance(e.vectors.adjoint() * e.vectors, CMatrix::identity(d)) <= 1e-10 * d);
    CHECK(std::is_sorted(e.values.begin(), e.values.end()));
    Eigen::SelfAdjointEigenSolver<testing::EMat> oracle(to_eigen(h), Eigen::EigenvaluesOnly);
    for (std::size_t i = 0; i < d; ++i) {
      CHECK(std::abs(e.values[i] - oracle.eigenvalues()(static_cast<Eigen::Index>(i))) <=
            1e-11 * (1.0 + scale));
    }
    const std::vector<double> only = hermitian_eigvals(h);
    for (std::size_t i = 0; i < d; ++i) CHECK(std::abs(only[i] - e.values[i]) <= 1e-11 * (1.0 + scale));
  }
}

TEST_CASE("hermitian_eig rejects bad input") {
  CHECK_THROWS_AS(hermitian_eig(CMatrix{{0.0, 1.0}, {0.0, 0.0}}), Error);
  try {
    hermitian_eig(CMatrix{{0.0, 1.0}, {0.0, 0.0}});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotHermitian);
  }
  try {
    hermitian_eig(CMatrix{{std::nan(""), 0.0}, {0.0, 1.0}});
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFinite);
  }
}

TEST_CASE("psd_calculus on identity and diag(4, 0)") {
  const PsdCalculus id = psd_calculus(CMatrix::identity(3));
  CHECK(id.rank == 3);
  CHECK(distance(id.sqrt, CMatrix::identity(3)) < 1e-14);
  CHECK(distance(id.pinv, CMatrix::identity(3)) < 1e-14);
  CHECK(distance(id.projector, CMatrix::identity(3)) < 1e-14);

  const PsdCalculus d = psd_calculus(diag({4, 0}));
  CHECK(d.rank == 1);
  CHECK(distance(d.sqrt, diag({2, 0})) < 1e-14);
  CHECK(distance(d.pinv, diag({0.25, 0})) < 1e-14);
  CHECK(distance(d.projector, diag({1, 0})) < 1e-14);
  CHECK(distance(d.sqrt_pinv, diag({0.5, 0})) < 1e-14);

  const PsdCalculus z = psd_calculus(CMatrix::zeros(2, 2));
  CHECK(z.zero_weight);
  CHECK(z.rank == 0);
}

TEST_CASE("psd_calculus satisfies the Penrose identities") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const CMatrix a = testing::random_psd(4, 2, rng);
    const PsdCalculus c = psd_calculus(a);
    const double s = a.frobenius_norm();
    CHECK(c.rank == 2);
    CHECK(distance(c.sqrt * c.sqrt, a) <= 1e-9 * s);
    CHECK(distance(a * c.pinv * a, a) <= 1e-9 * s);
    CHECK(distance(c.pinv * a * c.pinv, c.pinv) <= 1e-9 * c.pinv.frobenius_norm());
    CHECK(distance((a * c.pinv).adjoint(), a * c.pinv) <= 1e-9);
    CHECK(distance((c.pinv * a).adjoint(), c.pinv * a) <= 1e-9);
    CHECK(distance(c.projector * c.projector, c.projector) <= 1e-10);
    CHECK(distance(c.projector.adjoint(), c.projector) <= 1e-10);
    const testing::EMat oracle = to_eigen(a).completeOrthogonalDecomposition().pseudoInverse();
    CHECK(distance(c.pinv, testing::from_eigen(oracle)) <= 1e-8 * c.pinv.frobenius_norm());
  }
}

TEST_CASE("psd_calculus rejects indefinite weights") {
  try {
    psd_calculus(diag({1, -1}));
    FAIL("expected NotPSD");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotPSD);
  }
}

TEST_CASE("spectral_norm") {
  CHECK(spectral_norm(CMatrix::zeros(3, 3)) == 0.0);
  CHECK(spectral_norm(CMatrix{{0.0, 2.0}, {0.0, 0.0}}) == doctest::Approx(2.0));
  std::mt19937_64 rng(9);
  const CMatrix m = testing::gaussian(5, 5, rng);
  const double v = spectral_norm(m);
  Eigen::JacobiSVD<testing::EMat> svd(to_eigen(m));
  CHECK(std::abs(v - svd.singularValues()(0)) <= 1e-12 * v);
  double sampled = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const CVector x = testing::random_unit(5, rng);
    sampled = std::max(sampled, norm(m * std::span<const Complex>(x)));
  }
  CHECK(sampled <= v + 1e-6);
  CHECK(sampled >= 0.9 * v);
  CHECK_THROWS_AS(spectral_norm(CMatrix{{std::nan(""), 0.0}, {0.0, 1.0}}), Error);
}

TEST_CASE("classical_numrad on closed-form cases") {
  CHECK(classical_numrad(CMatrix{{0.0, 1.0}, {0.0, 0.0}}).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(classical_numrad(CMatrix{{1.0, 0.0}, {0.0, 1i}}).value == doctest::Approx(1.0).epsilon(1e-12));
  const SupEstimate e = classical_numrad(CMatrix{{1.0, 1.0}, {0.0, 1.0}});
  CHECK(e.value == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(e.bound == Bound::lower_bound);
  CHECK(norm(e.certificate) == doctest::Approx(1.0).epsilon(1e-12));
  const CVector my = CMatrix{{1.0, 1.0}, {0.0, 1.0}} * std::span<const Complex>(e.certificate);
  CHECK(std::abs(dot(e.certificate, my)) == doctest::Approx(e.value).epsilon(1e-12));
  CHECK(e.upper_envelope >= e.value);
}

TEST_CASE("classical_numrad against a dense grid oracle") {
  std::mt19937_64 rng(21);
  for (std::size_t d : {2u, 3u, 5u}) {
    for (int rep = 0; rep < 4; ++rep) {
      const CMatrix m = testing::gaussian(d, d, rng);
      const SupEstimate e = classical_numrad(m);
      const double nm = spectral_norm(m);
      const double oracle = testing::grid_numrad(to_eigen(m), 20000);
      CHECK(e.value >= oracle - 1e-12);
      CHECK(e.value <= oracle + 1e-6 * (1.0 + nm));
      CHECK(e.upper_envelope >= e.value);
      CHECK(e.value >= nm / 2 - 1e-9);
      CHECK(e.value <= nm + 1e-9);
      CHECK(std::abs(classical_numrad(m.adjoint()).value - e.value) <= 2e-9);
      const CVector my = m * std::span<const Complex>(e.certificate);
      CHECK(std::abs(std::abs(dot(e.certificate, my)) - e.value) <= 1e-9 * (1.0 + nm));
    }
  }
}
