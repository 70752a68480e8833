#include "doctest.h"
#include "errors.hpp"
#include "numerics.hpp"
#include "support.hpp"

using namespace afrelay;
using testing::gaussian;

TEST_CASE("dft_matrix small sizes") {
  const ComplexMatrix one = dft_matrix(1);
  CHECK(one.rows() == 1);
  CHECK(std::abs(one(0, 0) - Complex(1, 0)) < 1e-15);

  const ComplexMatrix two = dft_matrix(2);
  const double h = 1.0 / std::sqrt(2.0);
  ComplexMatrix expected(2, 2);
  expected << h, h, h, -h;
  CHECK(max_abs_diff(two, expected) < 1e-15);
}

TEST_CASE("dft_matrix is unitary with the stated entries") {
  const int k = 8;
  const ComplexMatrix f = dft_matrix(k);
  CHECK(max_abs_diff(f * f.adjoint(), ComplexMatrix::Identity(k, k)) < 1e-12);
  for (int m = 0; m < k; ++m)
    for (int n = 0; n < k; ++n) {
      const Complex want = std::polar(1.0 / std::sqrt(8.0), -2.0 * std::numbers::pi * m * n / k);
      CHECK(std::abs(f(m, n) - want) < 1e-14);
    }
}

TEST_CASE("svd_ordered sorts and reconstructs") {
  const OrderedSVD id = svd_ordered(ComplexMatrix::Identity(2, 2));
  CHECK(id.singular_values(0) == doctest::Approx(1.0));
  CHECK(id.singular_values(1) == doctest::Approx(1.0));

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 3.0;
  const OrderedSVD s = svd_ordered(d);
  CHECK(s.singular_values(0) == doctest::Approx(3.0));
  CHECK(s.singular_values(1) == doctest::Approx(1.0));
  // The dominant direction is the second coordinate.
  CHECK(std::abs(s.u(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(s.v(1, 0)) == doctest::Approx(1.0));

  RandomStream rng(3);
  const ComplexMatrix a = gaussian(4, 2, rng);
  const OrderedSVD r = svd_ordered(a);
  const ComplexMatrix rebuilt = r.u.leftCols(2) * r.singular_values.head(2).cast<Complex>().asDiagonal() *
                                r.v.leftCols(2).adjoint();
  CHECK(testing::rel_diff(rebuilt, a) < 1e-10);
  CHECK(r.singular_values(0) >= r.singular_values(1));
  CHECK(max_abs_diff(r.u.adjoint() * r.u, ComplexMatrix::Identity(4, 4)) < 1e-12);
}

TEST_CASE("svd_ordered is deterministic and phase-canonical") {
  RandomStream rng(4);
  const ComplexMatrix a = gaussian(3, 3, rng);
  const OrderedSVD x = svd_ordered(a);
  const OrderedSVD y = svd_ordered(a);
  CHECK((x.u.array() == y.u.array()).all());
  CHECK((x.v.array() == y.v.array()).all());
  for (int j = 0; j < 3; ++j) {
    Eigen::Index arg = 0;
    x.u.col(j).cwiseAbs().maxCoeff(&arg);
    CHECK(x.u(arg, j).real() > 0.0);
    CHECK(std::abs(x.u(arg, j).imag()) < 1e-14);
  }
}

TEST_CASE("eigh_ordered") {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 5.0;
  const OrderedEigh e = eigh_ordered(d);
  CHECK(e.eigenvalues(0) == doctest::Approx(5.0));
  CHECK(e.eigenvalues(1) == doctest::Approx(2.0));

  const OrderedEigh i4 = eigh_ordered(ComplexMatrix::Identity(4, 4));
  for (int i = 0; i < 4; ++i) CHECK(i4.eigenvalues(i) == doctest::Approx(1.0));

  RandomStream rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix h = gaussian(3, 2, rng);
    const OrderedEigh g = eigh_ordered(h.adjoint() * h);
    CHECK(g.eigenvalues.minCoeff() >= -1e-12);
    const ComplexMatrix rebuilt = g.u * g.eigenvalues.cast<Complex>().asDiagonal() * g.u.adjoint();
    CHECK(testing::rel_diff(rebuilt, h.adjoint() * h) < 1e-10);
  }

  ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
  bad(0, 1) = 1.0;
  try {
    eigh_ordered(bad);
    FAIL("non-Hermitian input accepted");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::kContractViolation);
  }
}

TEST_CASE("hermitian_inv_sqrt") {
  const ComplexMatrix four = 4.0 * ComplexMatrix::Identity(2, 2);
  CHECK(max_abs_diff(hermitian_inv_sqrt(four), 0.5 * ComplexMatrix::Identity(2, 2)) < 1e-14);

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 9.0;
  const ComplexMatrix r = hermitian_inv_sqrt(d);
  CHECK(std::abs(r(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(r(1, 1) - 1.0 / 3.0) < 1e-14);
  CHECK(std::abs(r(0, 1)) < 1e-14);

  RandomStream rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix a = testing::random_pd(4, rng);
    const ComplexMatrix b = hermitian_inv_sqrt(a);
    CHECK(is_hermitian(b, 1e-12));
    CHECK(max_abs_diff(b * a * b, ComplexMatrix::Identity(4, 4)) < 1e-10);
    CHECK(testing::rel_diff(a * b, b * a) < 1e-10);
  }

  ComplexMatrix singular = ComplexMatrix::Identity(2, 2);
  singular(1, 1) = 0.0;
  try {
    hermitian_inv_sqrt(singular);
    FAIL("singular input accepted");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::kSingular);
  }
}

TEST_CASE("hermitian_sqrt squares back") {
  RandomStream rng(7);
  const ComplexMatrix a = testing::random_pd(3, rng);
  const ComplexMatrix s = hermitian_sqrt(a);
  CHECK(testing::rel_diff(s * s, a) < 1e-12);
}

TEST_CASE("kron") {
  CHECK(max_abs_diff(kron(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3)),
                     ComplexMatrix::Identity(6, 6)) == 0.0);

  ComplexMatrix swap = ComplexMatrix::Zero(2, 2);
  swap(0, 1) = swap(1, 0) = 1.0;
  const ComplexMatrix k = kron(swap, ComplexMatrix::Identity(2, 2));
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected.block(0, 2, 2, 2) = ComplexMatrix::Identity(2, 2);
  expected.block(2, 0, 2, 2) = ComplexMatrix::Identity(2, 2);
  CHECK(max_abs_diff(k, expected) == 0.0);

  RandomStream rng(8);
  const ComplexMatrix a = gaussian(2, 2, rng), b = gaussian(2, 2, rng), c = gaussian(2, 2, rng),
                      d = gaussian(2, 2, rng);
  CHECK(max_abs_diff(kron(a, b) * kron(c, d), kron(a * c, b * d)) < 1e-12);
}

TEST_CASE("numerical_rank uses a relative threshold") {
  RealVector v(3);
  v << 1.0, 1e-9, 1e-11;
  CHECK(numerical_rank(v) == 2);
  v << 0.0, 0.0, 0.0;
  CHECK(numerical_rank(v) == 0);
}
